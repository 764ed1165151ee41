use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ForwardOutput;
use crate::error::{Error, Result};
use crate::graph::{SocialGraph, Task, Vocabs};
use crate::tensor::{Tape, Var};

/// Weighting of the four task losses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MtlLossSpec {
    pub w_relationship: f64,
    pub w_domain: f64,
    pub w_age: f64,
    pub w_gender: f64,
    /// Optional per-class weights, keyed by task.
    pub class_weights: BTreeMap<Task, Vec<f64>>,
    pub active: Vec<Task>,
}

impl Default for MtlLossSpec {
    fn default() -> Self {
        MtlLossSpec {
            w_relationship: 1.0,
            w_domain: 1.0,
            w_age: 1.0,
            w_gender: 1.0,
            class_weights: BTreeMap::new(),
            active: Task::ALL.to_vec(),
        }
    }
}

impl MtlLossSpec {
    /// All tasks for datasets with attribute labels, otherwise relationship
    /// and domain only.
    pub fn for_vocabs(vocabs: &Vocabs) -> Self {
        let active = if vocabs.has_attributes() {
            Task::ALL.to_vec()
        } else {
            vec![Task::Relationship, Task::Domain]
        };
        MtlLossSpec {
            active,
            ..Default::default()
        }
    }

    /// Only `task`, with unit weight.
    pub fn single(task: Task) -> Self {
        MtlLossSpec {
            active: vec![task],
            ..Default::default()
        }
    }

    pub fn weight(&self, task: Task) -> f64 {
        match task {
            Task::Relationship => self.w_relationship,
            Task::Domain => self.w_domain,
            Task::Age => self.w_age,
            Task::Gender => self.w_gender,
        }
    }

    pub fn is_active(&self, task: Task) -> bool {
        self.active.contains(&task)
    }

    pub fn validate(&self) -> Result<()> {
        for task in Task::ALL {
            let w = self.weight(task);
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Config(format!("{task} weight must be >= 0, got {w}")));
            }
        }
        if self.active.is_empty() {
            return Err(Error::Config("at least one task must be active".into()));
        }
        Ok(())
    }

    /// Inverse-frequency class weights for `task`, normalised to mean 1 over
    /// classes present in `graphs`.
    pub fn balance(&mut self, task: Task, graphs: &[SocialGraph], classes: usize) {
        let mut counts = vec![0usize; classes];
        for label in graphs.iter().flat_map(|g| labels(g, task)).flatten() {
            if label < classes {
                counts[label] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        let present = counts.iter().filter(|c| **c > 0).count().max(1);
        let weights = counts
            .iter()
            .map(|&c| if c == 0 { 1.0 } else { total as f64 / (present as f64 * c as f64) })
            .collect();
        self.class_weights.insert(task, weights);
    }
}

fn labels(g: &SocialGraph, task: Task) -> Vec<Option<usize>> {
    match task {
        Task::Relationship => g.edges.iter().map(|e| e.relationship).collect(),
        Task::Domain => g.edges.iter().map(|e| e.domain).collect(),
        Task::Age => g.persons.iter().map(|p| p.age).collect(),
        Task::Gender => g.persons.iter().map(|p| p.gender).collect(),
    }
}

#[derive(Clone, Debug)]
pub struct LossOutput {
    pub total: Var,
    /// Unweighted mean cross-entropy of each contributing task.
    pub per_task: BTreeMap<Task, f64>,
    /// Number of instances each task averaged over.
    pub counts: BTreeMap<Task, usize>,
}

/// `sum_task w_task * mean_instances(class_weight[label] * CE)` over the
/// active tasks with positive weight. `outputs[i]` must come from
/// `graphs[i]`.
pub fn mtl_loss(tape: &mut Tape, outputs: &[ForwardOutput], graphs: &[&SocialGraph], spec: &MtlLossSpec) -> Result<LossOutput> {
    spec.validate()?;
    if outputs.len() != graphs.len() {
        return Err(Error::dim("mtl_loss", &[outputs.len()], &[graphs.len()]));
    }
    let mut terms = Vec::new();
    let mut per_task = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for task in Task::ALL {
        let w = spec.weight(task);
        if !spec.is_active(task) || w == 0.0 {
            continue;
        }
        let cw = spec.class_weights.get(&task).map(Vec::as_slice);
        let mut losses = Vec::new();
        for (out, g) in outputs.iter().zip(graphs) {
            let logits = out.logits(task);
            let labels = labels(g, task);
            if logits.len() != labels.len() {
                return Err(Error::dim("mtl_loss", &[logits.len()], &[labels.len()]));
            }
            for (k, (logit, label)) in logits.iter().zip(labels).enumerate() {
                let label = label.ok_or_else(|| {
                    Error::Label(format!("image {}: {task} instance {k} has no label", g.image_id))
                })?;
                let probs = tape.softmax(*logit)?;
                losses.push(tape.cross_entropy(probs, label, cw)?);
            }
        }
        if losses.is_empty() {
            continue;
        }
        let n = losses.len();
        let sum = tape.add_n(&losses)?;
        let mean = tape.scale(sum, 1.0 / n as f64);
        per_task.insert(task, tape.value(mean).item()?);
        counts.insert(task, n);
        terms.push(tape.scale(mean, w));
    }
    let total = if terms.is_empty() {
        tape.constant(crate::tensor::Tensor::scalar(0.0))
    } else {
        tape.add_n(&terms)?
    };
    Ok(LossOutput { total, per_task, counts })
}
