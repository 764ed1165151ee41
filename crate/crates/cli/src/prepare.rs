//! Face-annotation input for `srgn prepare`, one image per line:
//!
//! ```json
//! {"image_id":"a","width":640,"height":480,
//!  "faces":[{"id":1,"box":[100,50,20,30],"age":"child","gender":"male"}],
//!  "relationships":[{"src":1,"dst":2,"relationship":"friends"}]}
//! ```
//!
//! A missing domain is filled in from the relationship when the dataset
//! defines that mapping.

use std::fmt;
use std::io::BufRead;

use serde::Deserialize;
use srgn_core::features::expand_face_box;
use srgn_core::graph::{BoundingBox, LabelVocab, Person, PersonId, RelationshipEdge, SocialGraph, Vocabs};
use srgn_core::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ImageRecord {
    image_id: String,
    width: u32,
    height: u32,
    faces: Vec<FaceRecord>,
    #[serde(default)]
    relationships: Vec<PairRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceRecord {
    id: PersonId,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    age: Option<String>,
    gender: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRecord {
    src: PersonId,
    dst: PersonId,
    relationship: Option<String>,
    domain: Option<String>,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub images: usize,
    pub persons: usize,
    pub relationships: usize,
    pub attributes: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} images, {} relationships, {} persons, {} attributes",
            self.images, self.relationships, self.persons, self.attributes
        )
    }
}

fn label(vocab: &LabelVocab, name: Option<&str>, image: &str) -> Result<Option<usize>> {
    name.map(|n| vocab.lookup(n).map_err(|e| Error::Label(format!("image {image}: {e}"))))
        .transpose()
}

fn to_graph(r: ImageRecord, vocabs: &Vocabs) -> Result<SocialGraph> {
    let mut g = SocialGraph::new(r.image_id.clone(), r.width, r.height);
    for f in r.faces {
        let [x, y, w, h] = f.bbox;
        let body = expand_face_box(&BoundingBox::new(x, y, w, h), r.width, r.height)
            .map_err(|e| Error::Geometry(format!("image {}, person {}: {e}", r.image_id, f.id)))?;
        g.persons.push(Person {
            id: f.id,
            body_box: body,
            age: label(&vocabs.age, f.age.as_deref(), &r.image_id)?,
            gender: label(&vocabs.gender, f.gender.as_deref(), &r.image_id)?,
        });
    }
    for p in r.relationships {
        let relationship = label(&vocabs.relationship, p.relationship.as_deref(), &r.image_id)?;
        let domain = match label(&vocabs.domain, p.domain.as_deref(), &r.image_id)? {
            Some(d) => Some(d),
            None => relationship.and_then(|rel| vocabs.domain_of(rel)),
        };
        g.edges.push(RelationshipEdge {
            src: p.src,
            dst: p.dst,
            relationship,
            domain,
        });
    }
    g.check(vocabs)?;
    Ok(g)
}

/// Parses and validates every image. Errors carry the 1-based line.
pub fn read_annotations<R: BufRead>(input: R, vocabs: &Vocabs) -> Result<(Vec<SocialGraph>, Summary)> {
    let mut graphs = Vec::new();
    let mut summary = Summary::default();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ImageRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        let g = to_graph(rec, vocabs)?;
        summary.images += 1;
        summary.persons += g.persons.len();
        summary.relationships += g.edges.len();
        summary.attributes += g
            .persons
            .iter()
            .map(|p| usize::from(p.age.is_some()) + usize::from(p.gender.is_some()))
            .sum::<usize>();
        graphs.push(g);
    }
    Ok((graphs, summary))
}
