//! The social relationship graph: persons with attribute labels, directed
//! relationship edges, label vocabularies, validation, DOT rendering and
//! JSON-lines annotation IO.

mod dot;
mod io;
mod types;
mod validate;
mod vocab;

pub use dot::to_dot;
pub use io::{read_graphs, write_graphs, graph_to_json_line};
pub use types::{BoundingBox, Person, PersonId, RelationshipEdge, SocialGraph};
pub use validate::{validate, validate_labels, Violation, ViolationCode};
pub use vocab::{DatasetKind, LabelVocab, Task, Vocabs, DEFAULT_DOMAINS};
