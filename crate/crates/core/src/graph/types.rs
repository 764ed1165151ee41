use serde::{Deserialize, Serialize};

pub type PersonId = u32;

/// Axis-aligned box in pixels, `(x, y)` is the top-left corner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BoundingBox { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn is_valid(&self) -> bool {
        [self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite()) && self.w > 0.0 && self.h > 0.0
    }

    pub fn contains(&self, other: &BoundingBox) -> bool {
        self.x <= other.x && self.y <= other.y && self.right() >= other.right() && self.bottom() >= other.bottom()
    }

    pub fn within_image(&self, width: u32, height: u32) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.right() <= f64::from(width) && self.bottom() <= f64::from(height)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Person {
    pub id: PersonId,
    pub body_box: BoundingBox,
    pub age: Option<usize>,
    pub gender: Option<usize>,
}

/// Directed relationship `src -> dst`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationshipEdge {
    pub src: PersonId,
    pub dst: PersonId,
    pub relationship: Option<usize>,
    pub domain: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SocialGraph {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub persons: Vec<Person>,
    pub edges: Vec<RelationshipEdge>,
}

impl SocialGraph {
    pub fn new(image_id: impl Into<String>, width: u32, height: u32) -> Self {
        SocialGraph {
            image_id: image_id.into(),
            width,
            height,
            persons: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn person(&self, id: PersonId) -> Option<&Person> {
        self.persons.iter().find(|p| p.id == id)
    }

    pub fn person_index(&self, id: PersonId) -> Option<usize> {
        self.persons.iter().position(|p| p.id == id)
    }

    pub fn edge(&self, src: PersonId, dst: PersonId) -> Option<&RelationshipEdge> {
        self.edges.iter().find(|e| e.src == src && e.dst == dst)
    }

    /// Copy with every label cleared, the shape of an inference input.
    pub fn unlabeled(&self) -> SocialGraph {
        let mut g = self.clone();
        for p in &mut g.persons {
            p.age = None;
            p.gender = None;
        }
        for e in &mut g.edges {
            e.relationship = None;
            e.domain = None;
        }
        g
    }
}
