use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::metrics::{
    confusion_matrix, mean_ap, per_class_precision, relationship_pairs, srggen_accuracy, srrec_accuracy, SrgGenMode,
};
use super::trainer::train;
use super::TrainConfig;
use crate::error::{Error, Result};
use crate::features::FeatureBundle;
use crate::graph::{SocialGraph, Task, Vocabs};
use crate::srgin::{ModelConfig, MtlLossSpec, Pooling, SrgInModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub images: usize,
    pub edges: usize,
    pub srrec_accuracy: f64,
    /// Absent for datasets without attribute labels.
    pub srggen_accuracy: Option<f64>,
    pub srggen_strict_accuracy: Option<f64>,
    pub domain_accuracy: Option<f64>,
    /// Relationship precision per class, `None` where never predicted.
    pub per_class_precision: Vec<Option<f64>>,
    pub relationship_classes: Vec<String>,
    pub mean_ap: Option<f64>,
    /// Rows are true classes, columns predicted.
    pub confusion: BTreeMap<Task, Vec<Vec<usize>>>,
}

fn task_pairs(pred: &[SocialGraph], gt: &[SocialGraph], task: Task) -> Vec<(usize, usize)> {
    let by_id: BTreeMap<&str, &SocialGraph> = pred.iter().map(|g| (g.image_id.as_str(), g)).collect();
    let mut out = Vec::new();
    for g in gt {
        let Some(p) = by_id.get(g.image_id.as_str()) else { continue };
        match task {
            Task::Relationship | Task::Domain => {
                for e in &g.edges {
                    let Some(pe) = p.edge(e.src, e.dst) else { continue };
                    let (t, q) = if task == Task::Domain { (e.domain, pe.domain) } else { (e.relationship, pe.relationship) };
                    if let (Some(t), Some(q)) = (t, q) {
                        out.push((q, t));
                    }
                }
            }
            Task::Age | Task::Gender => {
                for person in &g.persons {
                    let Some(pp) = p.person(person.id) else { continue };
                    let (t, q) = if task == Task::Age { (person.age, pp.age) } else { (person.gender, pp.gender) };
                    if let (Some(t), Some(q)) = (t, q) {
                        out.push((q, t));
                    }
                }
            }
        }
    }
    out
}

/// Runs the model over `graphs` and scores it against their labels.
pub fn evaluate(model: &SrgInModel, graphs: &[SocialGraph], bundle: &FeatureBundle, vocabs: &Vocabs) -> Result<EvalReport> {
    model.config().check_vocabs(vocabs)?;
    for g in graphs {
        g.check(vocabs)?;
    }
    let mut preds = Vec::with_capacity(graphs.len());
    let mut scores = Vec::new();
    let mut truth = Vec::new();
    for g in graphs {
        let p = model.predict(g, bundle)?;
        for (e, probs) in g.edges.iter().zip(&p.relationship_probs) {
            if let Some(t) = e.relationship {
                scores.push(probs.clone());
                truth.push(t);
            }
        }
        preds.push(p.graph);
    }
    let pairs = relationship_pairs(&preds, graphs)?;
    let (rel_pred, rel_true): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
    let n_rel = vocabs.relationship.len();

    let mut confusion = BTreeMap::new();
    for task in Task::ALL {
        if !vocabs.has_attributes() && matches!(task, Task::Age | Task::Gender) {
            continue;
        }
        let (p, t): (Vec<usize>, Vec<usize>) = task_pairs(&preds, graphs, task).into_iter().unzip();
        if !t.is_empty() {
            confusion.insert(task, confusion_matrix(&p, &t, vocabs.get(task).len())?);
        }
    }
    let domain_pairs = task_pairs(&preds, graphs, Task::Domain);
    let srggen = |mode| match srggen_accuracy(&preds, graphs, mode) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Metric(_)) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(EvalReport {
        images: graphs.len(),
        edges: graphs.iter().map(|g| g.edges.len()).sum(),
        srrec_accuracy: srrec_accuracy(&preds, graphs)?,
        srggen_accuracy: if vocabs.has_attributes() { srggen(SrgGenMode::PaperChance)? } else { None },
        srggen_strict_accuracy: if vocabs.has_attributes() { srggen(SrgGenMode::Strict)? } else { None },
        domain_accuracy: (!domain_pairs.is_empty())
            .then(|| domain_pairs.iter().filter(|(p, t)| p == t).count() as f64 / domain_pairs.len() as f64),
        per_class_precision: per_class_precision(&rel_pred, &rel_true, n_rel)?,
        relationship_classes: vocabs.relationship.names().to_vec(),
        mean_ap: mean_ap(&scores, &truth, n_rel).ok(),
        confusion,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub pooling: Pooling,
    pub time_steps: usize,
    pub srrec_accuracy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
}

impl fmt::Display for AblationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "| pooling | T | SRRec |")?;
        writeln!(f, "|---------|---|-------|")?;
        for r in &self.rows {
            writeln!(f, "| {} | {} | {:.2}% |", r.pooling, r.time_steps, 100.0 * r.srrec_accuracy)?;
        }
        Ok(())
    }
}

/// Inputs shared by every cell of an ablation grid.
pub struct AblationSetup<'a> {
    pub model: &'a ModelConfig,
    pub model_seed: u64,
    pub train: &'a [SocialGraph],
    pub val: &'a [SocialGraph],
    pub test: &'a [SocialGraph],
    pub bundle: &'a FeatureBundle,
    pub train_cfg: &'a TrainConfig,
    pub loss: &'a MtlLossSpec,
}

/// Trains one fresh model per `(pooling, T)` cell and reports SRRec on the
/// test graphs.
pub fn ablate(setup: &AblationSetup<'_>, poolings: &[Pooling], time_steps: &[usize]) -> Result<AblationTable> {
    if poolings.is_empty() || time_steps.is_empty() {
        return Err(Error::Config("ablation grid is empty".into()));
    }
    let mut table = AblationTable::default();
    for &pooling in poolings {
        for &t in time_steps {
            let mut model = SrgInModel::new(setup.model.clone(), setup.model_seed)?;
            let cfg = TrainConfig {
                pooling,
                time_steps: t,
                ..setup.train_cfg.clone()
            };
            train(&mut model, setup.train, setup.val, setup.bundle, &cfg, setup.loss)?;
            let preds: Vec<SocialGraph> = setup
                .test
                .iter()
                .map(|g| Ok(model.predict(g, setup.bundle)?.graph))
                .collect::<Result<_>>()?;
            table.rows.push(AblationRow {
                pooling,
                time_steps: t,
                srrec_accuracy: srrec_accuracy(&preds, setup.test)?,
            });
        }
    }
    Ok(table)
}
