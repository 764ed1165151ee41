//! Evaluation metrics over predicted and ground-truth graphs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{PersonId, SocialGraph};

/// Scoring rule for joint relationship and attribute predictions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SrgGenMode {
    /// Relationship plus the source person's age and gender.
    #[default]
    PaperChance,
    /// Relationship plus age and gender of both endpoints.
    Strict,
}

impl std::str::FromStr for SrgGenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-chance" => Ok(SrgGenMode::PaperChance),
            "strict" => Ok(SrgGenMode::Strict),
            other => Err(Error::Config(format!("unknown srggen mode {other:?}"))),
        }
    }
}

/// Pairs every ground-truth graph with the prediction of the same image.
fn align<'a>(pred: &'a [SocialGraph], gt: &'a [SocialGraph]) -> Result<Vec<(&'a SocialGraph, &'a SocialGraph)>> {
    let mut by_id: HashMap<&str, &SocialGraph> = HashMap::with_capacity(pred.len());
    for p in pred {
        if by_id.insert(&p.image_id, p).is_some() {
            return Err(Error::Alignment(format!("image {} predicted twice", p.image_id)));
        }
    }
    if pred.len() != gt.len() {
        return Err(Error::Alignment(format!("{} predicted graphs for {} ground-truth graphs", pred.len(), gt.len())));
    }
    gt.iter()
        .map(|g| {
            by_id
                .get(g.image_id.as_str())
                .map(|p| (*p, g))
                .ok_or_else(|| Error::Alignment(format!("no prediction for image {}", g.image_id)))
        })
        .collect()
}

fn check_edge_sets(p: &SocialGraph, g: &SocialGraph) -> Result<()> {
    let mut a: Vec<_> = p.edges.iter().map(|e| (e.src, e.dst)).collect();
    let mut b: Vec<_> = g.edges.iter().map(|e| (e.src, e.dst)).collect();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(Error::Alignment(format!("image {}: predicted and ground-truth edge sets differ", g.image_id)));
    }
    Ok(())
}

/// Aligned `(predicted, true)` relationship labels for every ground-truth
/// edge that carries a relationship label.
pub fn relationship_pairs(pred: &[SocialGraph], gt: &[SocialGraph]) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (p, g) in align(pred, gt)? {
        check_edge_sets(p, g)?;
        for e in &g.edges {
            let Some(truth) = e.relationship else { continue };
            let pe = p.edge(e.src, e.dst).expect("edge sets checked");
            let guess = pe.relationship.ok_or_else(|| {
                Error::Label(format!("image {}: no predicted relationship for {}->{}", g.image_id, e.src, e.dst))
            })?;
            out.push((guess, truth));
        }
    }
    Ok(out)
}

/// Fraction of labelled ground-truth edges whose predicted relationship is
/// correct.
pub fn srrec_accuracy(pred: &[SocialGraph], gt: &[SocialGraph]) -> Result<f64> {
    let pairs = relationship_pairs(pred, gt)?;
    if pairs.is_empty() {
        return Err(Error::Metric("no labelled relationship edges".into()));
    }
    let hits = pairs.iter().filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pairs.len() as f64)
}

fn attrs(g: &SocialGraph, id: PersonId) -> Option<(usize, usize)> {
    let p = g.person(id)?;
    Some((p.age?, p.gender?))
}

/// Joint graph-generation accuracy. Instances are ground-truth edges with a
/// relationship label whose endpoints both carry age and gender labels; the
/// same instances are scored in both modes, so strict never exceeds
/// paper-chance.
pub fn srggen_accuracy(pred: &[SocialGraph], gt: &[SocialGraph], mode: SrgGenMode) -> Result<f64> {
    let mut total = 0usize;
    let mut hits = 0usize;
    for (p, g) in align(pred, gt)? {
        check_edge_sets(p, g)?;
        for e in &g.edges {
            let (Some(rel), Some(src_t), Some(dst_t)) = (e.relationship, attrs(g, e.src), attrs(g, e.dst)) else {
                continue;
            };
            let pe = p.edge(e.src, e.dst).expect("edge sets checked");
            let missing = || Error::Label(format!("image {}: missing predictions for edge {}->{}", g.image_id, e.src, e.dst));
            let rel_p = pe.relationship.ok_or_else(missing)?;
            let src_p = attrs(p, e.src).ok_or_else(missing)?;
            let dst_p = attrs(p, e.dst).ok_or_else(missing)?;
            total += 1;
            let ok = rel_p == rel
                && src_p == src_t
                && match mode {
                    SrgGenMode::PaperChance => true,
                    SrgGenMode::Strict => dst_p == dst_t,
                };
            hits += usize::from(ok);
        }
    }
    if total == 0 {
        return Err(Error::Metric("no edges with complete relationship and attribute labels".into()));
    }
    Ok(hits as f64 / total as f64)
}

/// `TP_k / (TP_k + FP_k)` per class; classes never predicted are `None`.
pub fn per_class_precision(pred: &[usize], truth: &[usize], classes: usize) -> Result<Vec<Option<f64>>> {
    if pred.len() != truth.len() {
        return Err(Error::dim("per_class_precision", &[pred.len()], &[truth.len()]));
    }
    let mut predicted = vec![0usize; classes];
    let mut correct = vec![0usize; classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= classes || t >= classes {
            return Err(Error::Label(format!("class index {} out of range for {classes} classes", p.max(t))));
        }
        predicted[p] += 1;
        correct[p] += usize::from(p == t);
    }
    Ok(predicted
        .iter()
        .zip(&correct)
        .map(|(&n, &c)| (n > 0).then(|| c as f64 / n as f64))
        .collect())
}

/// Rows are true classes, columns predicted classes.
pub fn confusion_matrix(pred: &[usize], truth: &[usize], classes: usize) -> Result<Vec<Vec<usize>>> {
    if pred.len() != truth.len() {
        return Err(Error::dim("confusion_matrix", &[pred.len()], &[truth.len()]));
    }
    let mut m = vec![vec![0usize; classes]; classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= classes || t >= classes {
            return Err(Error::Label(format!("class index {} out of range for {classes} classes", p.max(t))));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// All-point interpolated average precision of one ranking. `ranked` holds
/// the relevance of each item, best score first. `None` without positives.
pub fn average_precision(ranked: &[bool]) -> Option<f64> {
    let positives = ranked.iter().filter(|r| **r).count();
    if positives == 0 {
        return None;
    }
    let mut precision = Vec::with_capacity(ranked.len());
    let mut hits = 0usize;
    for (i, &r) in ranked.iter().enumerate() {
        hits += usize::from(r);
        precision.push(hits as f64 / (i + 1) as f64);
    }
    // make precision monotone from the right
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let sum: f64 = ranked.iter().zip(&precision).filter(|(r, _)| **r).map(|(_, p)| p).sum();
    Some(sum / positives as f64)
}

/// Unweighted mean over classes with at least one positive of the average
/// precision obtained by ranking all edges by that class's score. Ties keep
/// input order.
pub fn mean_ap(scores: &[Vec<f64>], truth: &[usize], classes: usize) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::dim("mean_ap", &[scores.len()], &[truth.len()]));
    }
    if let Some(s) = scores.iter().find(|s| s.len() != classes) {
        return Err(Error::dim("mean_ap", &[s.len()], &[classes]));
    }
    if let Some(t) = truth.iter().find(|t| **t >= classes) {
        return Err(Error::Label(format!("class index {t} out of range for {classes} classes")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let aps: Vec<f64> = (0..classes)
        .filter_map(|k| {
            order.sort_by(|&a, &b| scores[b][k].total_cmp(&scores[a][k]).then(a.cmp(&b)));
            let ranked: Vec<bool> = order.iter().map(|&i| truth[i] == k).collect();
            average_precision(&ranked)
        })
        .collect();
    if aps.is_empty() {
        return Err(Error::Metric("no class has a positive instance".into()));
    }
    Ok(aps.iter().sum::<f64>() / aps.len() as f64)
}
