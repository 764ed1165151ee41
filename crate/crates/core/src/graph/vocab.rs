use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Relationship,
    Domain,
    Age,
    Gender,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Relationship, Task::Domain, Task::Age, Task::Gender];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Relationship => "relationship",
            Task::Domain => "domain",
            Task::Age => "age",
            Task::Gender => "gender",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered class names for one task, with a name to index map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelVocab {
    task: Task,
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabelVocab {
    pub fn new<S: AsRef<str>>(task: Task, names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Config(format!("{task} vocabulary is empty")));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate {task} label {n:?}")));
            }
        }
        Ok(LabelVocab { task, names, index })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    /// Index lookup that reports the task and offending name on failure.
    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::Label(format!("unknown {} label {name:?}", self.task)))
    }
}

const PIPA_RELATIONSHIPS: [&str; 16] = [
    "father-child",
    "mother-child",
    "grandpa-grandchild",
    "grandma-grandchild",
    "friends",
    "siblings",
    "classmates",
    "lovers/spouses",
    "presenter-audience",
    "teacher-student",
    "trainer-trainee",
    "leader-subordinate",
    "band members",
    "dance team members",
    "sport team members",
    "colleagues",
];

/// Domain index (into [`DEFAULT_DOMAINS`]) of each PIPA relationship.
const PIPA_DOMAIN_OF: [usize; 16] = [0, 0, 0, 0, 1, 1, 1, 4, 3, 3, 3, 3, 2, 2, 2, 2];

pub const DEFAULT_DOMAINS: [&str; 5] = ["attachment", "reciprocity", "mastery", "hierarchical-power", "mating"];

const AGES: [&str; 6] = ["infant", "child", "young adult", "middle age", "senior", "unknown"];
const GENDERS: [&str; 2] = ["male", "female"];

const PISC_RELATIONSHIPS: [&str; 6] = ["commercial", "couple", "family", "friends", "professional", "no-relation"];
const PISC_DOMAINS: [&str; 3] = ["intimate", "not-intimate", "no-relation"];
const PISC_DOMAIN_OF: [usize; 6] = [1, 0, 0, 0, 1, 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Pipa,
    Pisc,
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pipa" => Ok(DatasetKind::Pipa),
            "pisc" => Ok(DatasetKind::Pisc),
            other => Err(Error::Config(format!("unknown dataset {other:?}, expected pipa or pisc"))),
        }
    }
}

/// Vocabularies for the four tasks of one dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabs {
    pub kind: DatasetKind,
    pub relationship: LabelVocab,
    pub domain: LabelVocab,
    pub age: LabelVocab,
    pub gender: LabelVocab,
    /// Domain implied by each relationship, when the mapping is known.
    relationship_domain: Option<Vec<usize>>,
}

impl Vocabs {
    pub fn pipa() -> Self {
        Self::build(DatasetKind::Pipa, &PIPA_RELATIONSHIPS, &DEFAULT_DOMAINS, Some(PIPA_DOMAIN_OF.to_vec()))
            .expect("built-in vocabulary")
    }

    /// PIPA relationships with a caller-chosen domain vocabulary. The
    /// relationship-to-domain mapping is dropped since it is only defined
    /// for the default domains.
    pub fn pipa_with_domains<S: AsRef<str>>(domains: &[S]) -> Result<Self> {
        let names: Vec<&str> = domains.iter().map(AsRef::as_ref).collect();
        let mapping = (names == DEFAULT_DOMAINS).then(|| PIPA_DOMAIN_OF.to_vec());
        Self::build(DatasetKind::Pipa, &PIPA_RELATIONSHIPS, &names, mapping)
    }

    pub fn pisc() -> Self {
        Self::build(DatasetKind::Pisc, &PISC_RELATIONSHIPS, &PISC_DOMAINS, Some(PISC_DOMAIN_OF.to_vec()))
            .expect("built-in vocabulary")
    }

    pub fn for_dataset(kind: DatasetKind) -> Self {
        match kind {
            DatasetKind::Pipa => Self::pipa(),
            DatasetKind::Pisc => Self::pisc(),
        }
    }

    fn build(kind: DatasetKind, rel: &[&str], dom: &[&str], mapping: Option<Vec<usize>>) -> Result<Self> {
        Ok(Vocabs {
            kind,
            relationship: LabelVocab::new(Task::Relationship, rel)?,
            domain: LabelVocab::new(Task::Domain, dom)?,
            age: LabelVocab::new(Task::Age, &AGES)?,
            gender: LabelVocab::new(Task::Gender, &GENDERS)?,
            relationship_domain: mapping,
        })
    }

    pub fn get(&self, task: Task) -> &LabelVocab {
        match task {
            Task::Relationship => &self.relationship,
            Task::Domain => &self.domain,
            Task::Age => &self.age,
            Task::Gender => &self.gender,
        }
    }

    pub fn domain_of(&self, relationship: usize) -> Option<usize> {
        self.relationship_domain.as_ref()?.get(relationship).copied()
    }

    /// Whether the dataset annotates age and gender.
    pub fn has_attributes(&self) -> bool {
        self.kind == DatasetKind::Pipa
    }
}
