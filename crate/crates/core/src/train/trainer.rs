use std::collections::BTreeMap;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::metrics::srrec_accuracy;
use super::TrainConfig;
use crate::error::{Error, Result};
use crate::features::FeatureBundle;
use crate::graph::{SocialGraph, Task};
use crate::nn::Mode;
use crate::srgin::{mtl_loss, GraphInputs, MtlLossSpec, SrgInModel};
use crate::tensor::{ParamStore, SeededRng, Tape};

/// `p <- p - lr * (grad + l2 * p)` for every trainable parameter.
pub fn sgd_step(store: &mut ParamStore, learning_rate: f64, l2: f64) -> Result<()> {
    for (name, p) in store.iter_mut() {
        if !p.trainable {
            continue;
        }
        let grad = p
            .tensor
            .grad()
            .ok_or_else(|| Error::Contract(format!("parameter {name} has no gradient")))?
            .to_vec();
        for (v, g) in p.tensor.data_mut().iter_mut().zip(grad) {
            *v -= learning_rate * (g + l2 * *v);
        }
    }
    Ok(())
}

/// Seeded split of `graphs` into `(train, held_out)`, the held-out part
/// holding `round(fraction * n)` graphs. Graph order is preserved.
pub fn split_graphs(graphs: &[SocialGraph], fraction: f64, seed: u64) -> Result<(Vec<SocialGraph>, Vec<SocialGraph>)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Config(format!("split fraction must be in [0, 1], got {fraction}")));
    }
    let mut idx: Vec<usize> = (0..graphs.len()).collect();
    SeededRng::derive(seed, "split").shuffle(&mut idx);
    let n_out = (fraction * graphs.len() as f64).round() as usize;
    let mut held = vec![false; graphs.len()];
    for &i in &idx[..n_out] {
        held[i] = true;
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (g, h) in graphs.iter().zip(held) {
        if h { b.push(g.clone()) } else { a.push(g.clone()) }
    }
    Ok((a, b))
}

/// One line of the training log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the mini-batch losses.
    pub loss_total: f64,
    pub loss_per_task: BTreeMap<Task, f64>,
    pub val_loss: Option<f64>,
    pub val_srrec: Option<f64>,
    pub lr: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters of the epoch with the lowest validation loss (training
    /// loss when there is no validation set).
    pub best: ParamStore,
    pub best_epoch: usize,
    pub log: Vec<EpochRecord>,
    pub stopped_early: bool,
}

fn batches(inputs: &[GraphInputs], order: &[usize], batch_edges: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut edges = 0;
    for &i in order {
        cur.push(i);
        edges += inputs[i].x_e.len();
        if edges >= batch_edges {
            out.push(std::mem::take(&mut cur));
            edges = 0;
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Eval-mode loss over `graphs`, averaged per task across all of them.
pub fn dataset_loss(model: &SrgInModel, graphs: &[SocialGraph], inputs: &[GraphInputs], spec: &MtlLossSpec) -> Result<f64> {
    let mut tape = Tape::new();
    let mut rng = SeededRng::new(0);
    let mut outs = Vec::with_capacity(graphs.len());
    for inp in inputs {
        outs.push(model.forward_inputs(&mut tape, inp, Mode::Eval, 0.0, &mut rng)?);
    }
    let refs: Vec<&SocialGraph> = graphs.iter().collect();
    let loss = mtl_loss(&mut tape, &outs, &refs, spec)?;
    tape.value(loss.total).item()
}

/// Argmax predictions for every graph.
pub fn predict_all(model: &SrgInModel, graphs: &[SocialGraph], bundle: &FeatureBundle) -> Result<Vec<SocialGraph>> {
    graphs.iter().map(|g| Ok(model.predict(g, bundle)?.graph)).collect()
}

/// Mini-batch SGD with seeded per-epoch shuffling and early stopping on
/// validation loss. `model` is left holding the best parameters.
pub fn train(
    model: &mut SrgInModel,
    train_set: &[SocialGraph],
    val_set: &[SocialGraph],
    bundle: &FeatureBundle,
    cfg: &TrainConfig,
    spec: &MtlLossSpec,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    spec.validate()?;
    if train_set.is_empty() || train_set.iter().all(|g| g.edges.is_empty()) {
        return Err(Error::Config("training set has no edges".into()));
    }
    model.set_time_steps(cfg.time_steps);
    model.set_pooling(cfg.pooling);
    let train_inputs: Vec<GraphInputs> = train_set.iter().map(|g| model.prepare(g, bundle)).collect::<Result<_>>()?;
    let val_inputs: Vec<GraphInputs> = val_set.iter().map(|g| model.prepare(g, bundle)).collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut shuffle_rng = SeededRng::derive(cfg.seed, "shuffle");
    let mut dropout_rng = SeededRng::derive(cfg.seed, "dropout");
    let mut log = Vec::new();
    let mut best = (f64::INFINITY, model.params.clone(), 0usize);
    let mut stale = 0;
    let mut stopped_early = false;

    for epoch in 1..=cfg.epochs {
        shuffle_rng.shuffle(&mut order);
        let mut batch_losses = Vec::new();
        let mut task_sums: BTreeMap<Task, (f64, usize)> = BTreeMap::new();
        for batch in batches(&train_inputs, &order, cfg.batch_size) {
            let mut tape = Tape::new();
            let mut outs = Vec::with_capacity(batch.len());
            for &i in &batch {
                outs.push(model.forward_inputs(&mut tape, &train_inputs[i], Mode::Train, cfg.dropout, &mut dropout_rng)?);
            }
            let refs: Vec<&SocialGraph> = batch.iter().map(|&i| &train_set[i]).collect();
            let loss = mtl_loss(&mut tape, &outs, &refs, spec)?;
            batch_losses.push(tape.value(loss.total).item()?);
            for (task, v) in &loss.per_task {
                let e = task_sums.entry(*task).or_default();
                e.0 += v;
                e.1 += 1;
            }
            model.params.zero_grad();
            tape.backward(loss.total, &mut model.params)?;
            sgd_step(&mut model.params, cfg.learning_rate, cfg.l2)?;
        }
        let loss_total = batch_losses.iter().sum::<f64>() / batch_losses.len() as f64;
        if !loss_total.is_finite() {
            return Err(Error::Contract(format!("training loss diverged at epoch {epoch}")));
        }
        let (val_loss, val_srrec) = if val_set.is_empty() {
            (None, None)
        } else {
            let l = dataset_loss(model, val_set, &val_inputs, spec)?;
            let preds = predict_all(model, val_set, bundle)?;
            (Some(l), srrec_accuracy(&preds, val_set).ok())
        };
        let record = EpochRecord {
            epoch,
            loss_total,
            loss_per_task: task_sums.into_iter().map(|(t, (s, n))| (t, s / n as f64)).collect(),
            val_loss,
            val_srrec,
            lr: cfg.learning_rate,
        };
        debug!("epoch {epoch}: loss {loss_total:.6} val {val_loss:?}");
        log.push(record);

        let monitored = match val_loss {
            Some(v) => v,
            None => dataset_loss(model, train_set, &train_inputs, spec)?,
        };
        if monitored < best.0 {
            best = (monitored, model.params.clone(), epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                stopped_early = true;
                info!("early stop at epoch {epoch}, best epoch {}", best.2);
                break;
            }
        }
    }
    let (_, params, best_epoch) = best;
    let params = if best_epoch == 0 { model.params.clone() } else { params };
    model.params = params.clone();
    Ok(TrainOutcome {
        best: params,
        best_epoch,
        log,
        stopped_early,
    })
}
