//! JSON-lines annotation records, one graph per line:
//!
//! ```json
//! {"image_id":"a","width":640,"height":480,
//!  "persons":[{"id":1,"box":[10,20,60,180],"age":"child","gender":"male"}],
//!  "edges":[{"src":1,"dst":2,"relationship":"friends","domain":"reciprocity"}]}
//! ```
//!
//! Labels are stored as vocabulary names. Optional fields are omitted when
//! unknown.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{BoundingBox, LabelVocab, Person, PersonId, RelationshipEdge, SocialGraph, Vocabs};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    image_id: String,
    width: u32,
    height: u32,
    persons: Vec<PersonRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
struct PersonRecord {
    id: PersonId,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    age: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gender: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    src: PersonId,
    dst: PersonId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relationship: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<String>,
}

fn name_of(vocab: &LabelVocab, index: Option<usize>) -> Result<Option<String>> {
    index
        .map(|i| {
            vocab
                .name(i)
                .map(str::to_owned)
                .ok_or_else(|| Error::Label(format!("{} label {i} out of range", vocab.task())))
        })
        .transpose()
}

fn index_of(vocab: &LabelVocab, name: Option<&str>) -> Result<Option<usize>> {
    name.map(|n| vocab.lookup(n)).transpose()
}

fn to_record(g: &SocialGraph, v: &Vocabs) -> Result<GraphRecord> {
    Ok(GraphRecord {
        image_id: g.image_id.clone(),
        width: g.width,
        height: g.height,
        persons: g
            .persons
            .iter()
            .map(|p| {
                Ok(PersonRecord {
                    id: p.id,
                    bbox: [p.body_box.x, p.body_box.y, p.body_box.w, p.body_box.h],
                    age: name_of(&v.age, p.age)?,
                    gender: name_of(&v.gender, p.gender)?,
                })
            })
            .collect::<Result<_>>()?,
        edges: g
            .edges
            .iter()
            .map(|e| {
                Ok(EdgeRecord {
                    src: e.src,
                    dst: e.dst,
                    relationship: name_of(&v.relationship, e.relationship)?,
                    domain: name_of(&v.domain, e.domain)?,
                })
            })
            .collect::<Result<_>>()?,
    })
}

fn from_record(r: GraphRecord, v: &Vocabs) -> Result<SocialGraph> {
    Ok(SocialGraph {
        image_id: r.image_id,
        width: r.width,
        height: r.height,
        persons: r
            .persons
            .into_iter()
            .map(|p| {
                let [x, y, w, h] = p.bbox;
                Ok(Person {
                    id: p.id,
                    body_box: BoundingBox::new(x, y, w, h),
                    age: index_of(&v.age, p.age.as_deref())?,
                    gender: index_of(&v.gender, p.gender.as_deref())?,
                })
            })
            .collect::<Result<_>>()?,
        edges: r
            .edges
            .into_iter()
            .map(|e| {
                Ok(RelationshipEdge {
                    src: e.src,
                    dst: e.dst,
                    relationship: index_of(&v.relationship, e.relationship.as_deref())?,
                    domain: index_of(&v.domain, e.domain.as_deref())?,
                })
            })
            .collect::<Result<_>>()?,
    })
}

pub fn graph_to_json_line(graph: &SocialGraph, vocabs: &Vocabs) -> Result<String> {
    let rec = to_record(graph, vocabs)?;
    serde_json::to_string(&rec).map_err(|e| Error::Contract(format!("serialising graph: {e}")))
}

pub fn write_graphs<W: Write>(mut out: W, graphs: &[SocialGraph], vocabs: &Vocabs) -> Result<()> {
    for g in graphs {
        writeln!(out, "{}", graph_to_json_line(g, vocabs)?)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads every graph in order. Blank lines are skipped; errors carry the
/// 1-based line number.
pub fn read_graphs<R: BufRead>(input: R, vocabs: &Vocabs) -> Result<Vec<SocialGraph>> {
    let mut graphs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: i + 1, message };
        let rec: GraphRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        graphs.push(from_record(rec, vocabs).map_err(|e| parse_err(e.to_string()))?);
    }
    Ok(graphs)
}
