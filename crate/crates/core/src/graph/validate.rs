use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{SocialGraph, Task, Vocabs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyImage,
    DupPerson,
    BadBox,
    BoxOutOfBounds,
    SelfEdge,
    DupEdge,
    UnknownEndpoint,
    LabelOutOfRange,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyImage => "EMPTY_IMAGE",
            ViolationCode::DupPerson => "DUP_PERSON",
            ViolationCode::BadBox => "BAD_BOX",
            ViolationCode::BoxOutOfBounds => "BOX_OUT_OF_BOUNDS",
            ViolationCode::SelfEdge => "SELF_EDGE",
            ViolationCode::DupEdge => "DUP_EDGE",
            ViolationCode::UnknownEndpoint => "UNKNOWN_ENDPOINT",
            ViolationCode::LabelOutOfRange => "LABEL_OUT_OF_RANGE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.detail)
    }
}

fn push(out: &mut Vec<Violation>, code: ViolationCode, detail: String) {
    out.push(Violation { code, detail });
}

/// Structural checks. Returns every violation found; an empty list means
/// the graph is valid.
pub fn validate(graph: &SocialGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    if graph.width == 0 || graph.height == 0 {
        push(&mut out, ViolationCode::EmptyImage, format!("image size {}x{}", graph.width, graph.height));
    }
    let mut ids = HashSet::new();
    for p in &graph.persons {
        if !ids.insert(p.id) {
            push(&mut out, ViolationCode::DupPerson, format!("person {} listed twice", p.id));
        }
        if !p.body_box.is_valid() {
            push(&mut out, ViolationCode::BadBox, format!("person {} box {:?}", p.id, p.body_box));
        } else if !p.body_box.within_image(graph.width, graph.height) {
            push(&mut out, ViolationCode::BoxOutOfBounds, format!("person {} box {:?}", p.id, p.body_box));
        }
    }
    let mut pairs = HashSet::new();
    for e in &graph.edges {
        if e.src == e.dst {
            push(&mut out, ViolationCode::SelfEdge, format!("edge {}->{}", e.src, e.dst));
        }
        for end in [e.src, e.dst] {
            if !ids.contains(&end) {
                push(&mut out, ViolationCode::UnknownEndpoint, format!("edge {}->{} references person {end}", e.src, e.dst));
            }
        }
        if !pairs.insert((e.src, e.dst)) {
            push(&mut out, ViolationCode::DupEdge, format!("edge {}->{} listed twice", e.src, e.dst));
        }
    }
    out
}

/// Checks that every label index lies inside its vocabulary.
pub fn validate_labels(graph: &SocialGraph, vocabs: &Vocabs) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut check = |task: Task, label: Option<usize>, what: String| {
        if let Some(l) = label {
            if l >= vocabs.get(task).len() {
                push(&mut out, ViolationCode::LabelOutOfRange, format!("{what} {task} label {l}"));
            }
        }
    };
    for p in &graph.persons {
        check(Task::Age, p.age, format!("person {}", p.id));
        check(Task::Gender, p.gender, format!("person {}", p.id));
    }
    for e in &graph.edges {
        check(Task::Relationship, e.relationship, format!("edge {}->{}", e.src, e.dst));
        check(Task::Domain, e.domain, format!("edge {}->{}", e.src, e.dst));
    }
    out
}

impl SocialGraph {
    /// Runs both validators and converts any violation into an error.
    pub fn check(&self, vocabs: &Vocabs) -> crate::Result<()> {
        let mut v = validate(self);
        v.extend(validate_labels(self, vocabs));
        if v.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::Validation {
                image_id: self.image_id.clone(),
                violations: v.iter().map(ToString::to_string).collect(),
            })
        }
    }
}
