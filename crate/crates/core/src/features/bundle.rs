use std::collections::BTreeMap;

use super::FeatureConfig;
use crate::error::{Error, Result};
use crate::graph::{PersonId, SocialGraph};

/// Which backbone output a vector stands for. The discriminant is the
/// on-disk role byte.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Role {
    Age = 0,
    Gender = 1,
    Clothing = 2,
    Activity = 3,
    Scene = 4,
}

impl Role {
    pub const PERSON: [Role; 3] = [Role::Age, Role::Gender, Role::Clothing];
    pub const EDGE: [Role; 2] = [Role::Activity, Role::Scene];

    pub fn from_byte(b: u8) -> Option<Role> {
        [Role::Age, Role::Gender, Role::Clothing, Role::Activity, Role::Scene]
            .get(b as usize)
            .copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Age => "age",
            Role::Gender => "gender",
            Role::Clothing => "clothing",
            Role::Activity => "activity",
            Role::Scene => "scene",
        }
    }

    pub fn dim(self, cfg: &FeatureConfig) -> usize {
        match self {
            Role::Age => cfg.dim_age,
            Role::Gender => cfg.dim_gender,
            Role::Clothing => cfg.dim_clothing,
            Role::Activity => cfg.dim_activity,
            Role::Scene => cfg.dim_scene,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersonFeatures {
    pub age: Vec<f64>,
    pub gender: Vec<f64>,
    pub clothing: Vec<f64>,
}

impl PersonFeatures {
    pub fn get(&self, role: Role) -> Option<&[f64]> {
        match role {
            Role::Age => Some(&self.age),
            Role::Gender => Some(&self.gender),
            Role::Clothing => Some(&self.clothing),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFeatures {
    pub activity: Vec<f64>,
    pub scene: Vec<f64>,
}

impl EdgeFeatures {
    pub fn get(&self, role: Role) -> Option<&[f64]> {
        match role {
            Role::Activity => Some(&self.activity),
            Role::Scene => Some(&self.scene),
            _ => None,
        }
    }
}

pub(crate) fn person_key(image: &str, id: PersonId) -> String {
    format!("person {image}/{id}")
}

pub(crate) fn edge_key(image: &str, src: PersonId, dst: PersonId) -> String {
    format!("edge {image}/{src}->{dst}")
}

/// Feature vectors keyed by `(image_id, person_id)` and
/// `(image_id, src, dst)`, all conforming to one [`FeatureConfig`].
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureBundle {
    cfg: FeatureConfig,
    persons: BTreeMap<(String, PersonId), PersonFeatures>,
    edges: BTreeMap<(String, PersonId, PersonId), EdgeFeatures>,
}

fn check_len(role: Role, v: &[f64], cfg: &FeatureConfig) -> Result<()> {
    if v.len() != role.dim(cfg) {
        return Err(Error::dim(role.as_str(), &[v.len()], &[role.dim(cfg)]));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Contract(format!("non-finite {} feature", role.as_str())));
    }
    Ok(())
}

impl FeatureBundle {
    pub fn new(cfg: FeatureConfig) -> Self {
        FeatureBundle {
            cfg,
            persons: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    pub fn insert_person(&mut self, image: &str, id: PersonId, f: PersonFeatures) -> Result<()> {
        for role in Role::PERSON {
            check_len(role, f.get(role).expect("person role"), &self.cfg)?;
        }
        self.persons.insert((image.to_owned(), id), f);
        Ok(())
    }

    pub fn insert_edge(&mut self, image: &str, src: PersonId, dst: PersonId, f: EdgeFeatures) -> Result<()> {
        for role in Role::EDGE {
            check_len(role, f.get(role).expect("edge role"), &self.cfg)?;
        }
        self.edges.insert((image.to_owned(), src, dst), f);
        Ok(())
    }

    pub fn person(&self, image: &str, id: PersonId) -> Result<&PersonFeatures> {
        self.persons
            .get(&(image.to_owned(), id))
            .ok_or_else(|| Error::MissingFeature {
                keys: vec![person_key(image, id)],
            })
    }

    pub fn edge(&self, image: &str, src: PersonId, dst: PersonId) -> Result<&EdgeFeatures> {
        self.edges
            .get(&(image.to_owned(), src, dst))
            .ok_or_else(|| Error::MissingFeature {
                keys: vec![edge_key(image, src, dst)],
            })
    }

    /// Keys the graph needs that are absent from the bundle.
    pub fn missing_keys(&self, graph: &SocialGraph) -> Vec<String> {
        let img = &graph.image_id;
        let mut missing: Vec<String> = graph
            .persons
            .iter()
            .filter(|p| !self.persons.contains_key(&(img.clone(), p.id)))
            .map(|p| person_key(img, p.id))
            .collect();
        missing.extend(
            graph
                .edges
                .iter()
                .filter(|e| !self.edges.contains_key(&(img.clone(), e.src, e.dst)))
                .map(|e| edge_key(img, e.src, e.dst)),
        );
        missing
    }

    /// Errors with every missing key across `graphs`.
    pub fn require(&self, graphs: &[SocialGraph]) -> Result<()> {
        let keys: Vec<String> = graphs.iter().flat_map(|g| self.missing_keys(g)).collect();
        if keys.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingFeature { keys })
        }
    }

    pub fn persons(&self) -> impl Iterator<Item = (&(String, PersonId), &PersonFeatures)> {
        self.persons.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(String, PersonId, PersonId), &EdgeFeatures)> {
        self.edges.iter()
    }

    pub fn num_persons(&self) -> usize {
        self.persons.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Adds all entries of `other`; configurations must agree.
    pub fn merge(&mut self, other: FeatureBundle) -> Result<()> {
        if other.cfg != self.cfg {
            return Err(Error::Config("cannot merge bundles with different feature dimensions".into()));
        }
        self.persons.extend(other.persons);
        self.edges.extend(other.edges);
        Ok(())
    }
}
