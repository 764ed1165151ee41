use std::fmt::Write as _;

use super::{validate, validate_labels, SocialGraph, Vocabs};
use crate::error::{Error, Result};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders the graph in Graphviz DOT.
///
/// Persons become blue ellipses, each known age or gender becomes a green
/// ellipse linked to its person, and each edge becomes a box on the path
/// `src -> relationship -> dst`. Output order follows person ids and edge
/// endpoints, so equal graphs render to identical bytes.
pub fn to_dot(graph: &SocialGraph, vocabs: &Vocabs) -> Result<String> {
    let mut violations = validate(graph);
    violations.extend(validate_labels(graph, vocabs));
    if !violations.is_empty() {
        return Err(Error::Validation {
            image_id: graph.image_id.clone(),
            violations: violations.iter().map(ToString::to_string).collect(),
        });
    }

    let mut persons: Vec<_> = graph.persons.iter().collect();
    persons.sort_by_key(|p| p.id);
    let mut edges: Vec<_> = graph.edges.iter().collect();
    edges.sort_by_key(|e| (e.src, e.dst));

    let mut out = String::new();
    let w = &mut out;
    // Writing into a String cannot fail.
    let _ = writeln!(w, "digraph {} {{", quote(&graph.image_id));
    let _ = writeln!(w, "  rankdir=LR;");
    let _ = writeln!(w, "  node [fontname=\"Helvetica\"];");
    for p in &persons {
        let node = format!("p{}", p.id);
        let _ = writeln!(
            w,
            "  {} [label={}, shape=ellipse, style=filled, fillcolor=lightblue];",
            quote(&node),
            quote(&format!("person {}", p.id))
        );
        let attrs = [("age", p.age.and_then(|a| vocabs.age.name(a))), ("gender", p.gender.and_then(|g| vocabs.gender.name(g)))];
        for (kind, name) in attrs {
            if let Some(name) = name {
                let attr = format!("{node}_{kind}");
                let _ = writeln!(
                    w,
                    "  {} [label={}, shape=ellipse, style=filled, fillcolor=palegreen];",
                    quote(&attr),
                    quote(name)
                );
                let _ = writeln!(w, "  {} -> {} [arrowhead=none];", quote(&node), quote(&attr));
            }
        }
    }
    for e in &edges {
        let node = format!("r{}_{}", e.src, e.dst);
        let rel = e
            .relationship
            .and_then(|r| vocabs.relationship.name(r))
            .unwrap_or("unlabeled");
        let label = match e.domain.and_then(|d| vocabs.domain.name(d)) {
            Some(dom) => format!("{rel}\n({dom})"),
            None => rel.to_owned(),
        };
        let _ = writeln!(w, "  {} [label={}, shape=box];", quote(&node), quote(&label));
        let _ = writeln!(w, "  {} -> {};", quote(&format!("p{}", e.src)), quote(&node));
        let _ = writeln!(w, "  {} -> {};", quote(&node), quote(&format!("p{}", e.dst)));
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BoundingBox, Person, RelationshipEdge};

    fn graph(age: Option<usize>) -> SocialGraph {
        let v = Vocabs::pipa();
        let mut g = SocialGraph::new("img \"1\"", 100, 100);
        g.persons = vec![
            Person {
                id: 2,
                body_box: BoundingBox::new(50.0, 0.0, 20.0, 60.0),
                age: None,
                gender: Some(1),
            },
            Person {
                id: 1,
                body_box: BoundingBox::new(0.0, 0.0, 20.0, 60.0),
                age,
                gender: None,
            },
        ];
        g.edges = vec![RelationshipEdge {
            src: 1,
            dst: 2,
            relationship: v.relationship.index_of("friends"),
            domain: None,
        }];
        g
    }

    #[test]
    fn structure() {
        let dot = to_dot(&graph(Some(2)), &Vocabs::pipa()).unwrap();
        assert!(dot.starts_with("digraph \"img \\\"1\\\"\" {"));
        assert_eq!(dot.matches("fillcolor=lightblue").count(), 2);
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert!(dot.contains("\"p1\" -> \"r1_2\";"));
        assert!(dot.contains("\"r1_2\" -> \"p2\";"));
        assert!(dot.contains("label=\"friends\""));
        assert!(dot.contains("label=\"young adult\""));
        assert!(dot.find("\"p1\" [").unwrap() < dot.find("\"p2\" [").unwrap());
        assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    }

    #[test]
    fn deterministic() {
        let v = Vocabs::pipa();
        assert_eq!(to_dot(&graph(Some(0)), &v).unwrap(), to_dot(&graph(Some(0)), &v).unwrap());
    }

    #[test]
    fn absent_age_not_emitted() {
        let dot = to_dot(&graph(None), &Vocabs::pipa()).unwrap();
        assert!(!dot.contains("p1_age"));
        assert!(dot.contains("p2_gender"));
    }

    #[test]
    fn invalid_graph_rejected() {
        let mut g = graph(None);
        g.edges[0].dst = 1;
        assert!(matches!(to_dot(&g, &Vocabs::pipa()), Err(Error::Validation { .. })));
    }
}
