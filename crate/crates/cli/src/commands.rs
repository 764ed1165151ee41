use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;

use log::info;
use srgn_core::features::{synth_features_all, synth_graphs, write_features, FeatureConfig, SynthGraphSpec};
use srgn_core::graph::{to_dot, write_graphs, SocialGraph, Task};
use srgn_core::nn::{load_checkpoint, read_checkpoint, write_checkpoint};
use srgn_core::srgin::{ModelConfig, MtlLossSpec, Pooling, SrgInModel};
use srgn_core::train::{ablate, check_model_gradients, evaluate, split_graphs, train, AblationSetup};
use srgn_core::{Error, Result};

use crate::args::{Command, DataArgs, Format, GlobalArgs};
use crate::config::{pick, require_path, Resolved, RunConfig};
use crate::output::{load_features, load_graphs, write_atomic};
use crate::prepare::read_annotations;

pub fn run(global: &GlobalArgs, command: Command, stdout: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::load(global)?;
    match command {
        Command::Prepare { input, out } => prepare(&cfg, &input, &out, stdout),
        Command::Synth {
            out_graphs,
            out_features,
            graphs,
            images,
            min_persons,
            max_persons,
            correlation,
        } => {
            let spec = SynthGraphSpec {
                images,
                min_persons,
                max_persons,
                seed: cfg.run.seed,
                ..Default::default()
            };
            let graphs = match graphs {
                Some(p) => load_graphs(require_path(&p)?, &cfg.vocabs)?,
                None => synth_graphs(&spec, &cfg.vocabs)?,
            };
            let correlation = correlation.unwrap_or(cfg.run.correlation);
            let bundle = synth_features_all(&graphs, &cfg.features, cfg.run.seed, correlation)?;
            write_atomic(&out_graphs, |w| write_graphs(w, &graphs, &cfg.vocabs))?;
            write_atomic(&out_features, |w| write_features(&bundle, w))?;
            let edges: usize = graphs.iter().map(|g| g.edges.len()).sum();
            writeln!(stdout, "{} images, {edges} relationships", graphs.len())?;
            Ok(())
        }
        Command::Train {
            data,
            val_graphs,
            out,
            log,
            epochs,
        } => {
            let mut cfg = cfg;
            if let Some(e) = epochs {
                cfg.train.epochs = e;
            }
            let (graphs, bundle) = load_data(&cfg, &data)?;
            let (train_set, val_set) = match val_graphs {
                Some(p) => (graphs, load_graphs(require_path(&p)?, &cfg.vocabs)?),
                None => split_graphs(&graphs, cfg.run.val_fraction, cfg.run.seed)?,
            };
            bundle.require(&val_set)?;
            let mut model = SrgInModel::new(cfg.model.clone(), cfg.run.seed)?;
            let outcome = train(&mut model, &train_set, &val_set, &bundle, &cfg.train, &cfg.loss)?;
            write_atomic(&out, |w| write_checkpoint(&outcome.best, w))?;
            if let Some(log_path) = log {
                write_atomic(&log_path, |w| {
                    for rec in &outcome.log {
                        let line = serde_json::to_string(rec).map_err(|e| Error::Contract(e.to_string()))?;
                        writeln!(w, "{line}")?;
                    }
                    Ok(())
                })?;
            }
            let last = outcome.log.last();
            writeln!(
                stdout,
                "trained {} epochs on {} graphs, best epoch {}, final loss {:.6}{}",
                outcome.log.len(),
                train_set.len(),
                outcome.best_epoch,
                last.map_or(f64::NAN, |r| r.loss_total),
                last.and_then(|r| r.val_srrec).map_or(String::new(), |v| format!(", val SRRec {v:.4}")),
            )?;
            Ok(())
        }
        Command::Eval { data, checkpoint, out } => {
            let model = load_model(&cfg, &checkpoint)?;
            let (graphs, bundle) = load_data(&cfg, &data)?;
            let report = evaluate(&model, &graphs, &bundle, &cfg.vocabs)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Contract(e.to_string()))?;
            match out {
                Some(p) => write_atomic(&p, |w| Ok(writeln!(w, "{json}")?)),
                None => Ok(writeln!(stdout, "{json}")?),
            }
        }
        Command::Infer {
            data,
            checkpoint,
            format,
            out,
        } => {
            let model = load_model(&cfg, &checkpoint)?;
            let (graphs, bundle) = load_data(&cfg, &data)?;
            let preds = graphs
                .iter()
                .map(|g| Ok(model.predict(&g.unlabeled(), &bundle)?.graph))
                .collect::<Result<Vec<SocialGraph>>>()?;
            let render = |w: &mut dyn Write| -> Result<()> {
                match format {
                    Format::Json => write_graphs(w, &preds, &cfg.vocabs),
                    Format::Dot => {
                        for g in &preds {
                            w.write_all(to_dot(g, &cfg.vocabs)?.as_bytes())?;
                        }
                        Ok(())
                    }
                }
            };
            match out {
                Some(p) => write_atomic(&p, render),
                None => render(stdout),
            }
        }
        Command::Gradcheck {
            hidden,
            feature_dim,
            persons,
            eps,
            tol,
            report,
        } => gradcheck(&cfg, hidden, feature_dim, persons, eps, tol, report.as_deref(), stdout),
        Command::Ablate {
            data,
            poolings,
            steps,
            epochs,
            out,
        } => {
            let mut cfg = cfg;
            if let Some(e) = epochs {
                cfg.train.epochs = e;
            }
            let poolings = poolings.iter().map(|p| p.parse()).collect::<Result<Vec<Pooling>>>()?;
            let (graphs, bundle) = load_data(&cfg, &data)?;
            let (train_set, held_out) = split_graphs(&graphs, cfg.run.val_fraction, cfg.run.seed)?;
            let setup = AblationSetup {
                model: &cfg.model,
                model_seed: cfg.run.seed,
                train: &train_set,
                val: &held_out,
                test: &held_out,
                bundle: &bundle,
                train_cfg: &cfg.train,
                loss: &cfg.loss,
            };
            let table = ablate(&setup, &poolings, &steps)?;
            write!(stdout, "{table}")?;
            if let Some(p) = out {
                let json = serde_json::to_string_pretty(&table).map_err(|e| Error::Contract(e.to_string()))?;
                write_atomic(&p, |w| Ok(writeln!(w, "{json}")?))?;
            }
            Ok(())
        }
    }
}

fn prepare(cfg: &Resolved, input: &Path, out: &Path, stdout: &mut dyn Write) -> Result<()> {
    let file = fs::File::open(require_path(input)?)?;
    let (graphs, summary) = read_annotations(BufReader::new(file), &cfg.vocabs)?;
    write_atomic(out, |w| write_graphs(w, &graphs, &cfg.vocabs))?;
    writeln!(stdout, "{summary}")?;
    Ok(())
}

fn load_data(cfg: &Resolved, data: &DataArgs) -> Result<(Vec<SocialGraph>, srgn_core::features::FeatureBundle)> {
    let graphs_path = pick(&data.graphs, &cfg.run.graphs, "graphs")?;
    let features_path = pick(&data.features, &cfg.run.features, "features")?;
    let graphs = load_graphs(graphs_path, &cfg.vocabs)?;
    let bundle = load_features(features_path, &cfg.features)?;
    bundle.require(&graphs)?;
    info!("loaded {} graphs from {}", graphs.len(), graphs_path.display());
    Ok((graphs, bundle))
}

/// Builds the configured model and loads `checkpoint` into it. A checkpoint
/// whose heads disagree with the dataset vocabulary is an alignment error.
fn load_model(cfg: &Resolved, checkpoint: &Path) -> Result<SrgInModel> {
    let bytes = fs::read(require_path(checkpoint)?)?;
    for (name, tensor) in read_checkpoint(bytes.as_slice())? {
        let Some(task) = name.strip_prefix("head.").and_then(|n| n.strip_suffix(".weight")) else { continue };
        let Some(task) = Task::ALL.into_iter().find(|t| t.as_str() == task) else { continue };
        let classes = tensor.shape()[0];
        let expected = cfg.vocabs.get(task).len();
        if classes != expected {
            return Err(Error::Alignment(format!(
                "checkpoint predicts {classes} {task} classes but the {} vocabulary has {expected}",
                format!("{:?}", cfg.vocabs.kind).to_lowercase()
            )));
        }
    }
    let mut model = SrgInModel::new(cfg.model.clone(), cfg.run.seed)?;
    load_checkpoint(&mut model.params, bytes.as_slice())?;
    Ok(model)
}

#[allow(clippy::too_many_arguments)]
fn gradcheck(
    cfg: &Resolved,
    hidden: usize,
    feature_dim: usize,
    persons: usize,
    eps: f64,
    tol: f64,
    report_path: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let features = FeatureConfig::uniform(feature_dim);
    let mut model_cfg = ModelConfig::for_vocabs(&cfg.vocabs, features, hidden);
    model_cfg.time_steps = cfg.model.time_steps;
    model_cfg.pooling = cfg.model.pooling;
    model_cfg.cross_edge = cfg.model.cross_edge;
    model_cfg.with_scene = cfg.model.with_scene;
    model_cfg.state_init = cfg.model.state_init;
    let spec = SynthGraphSpec {
        images: 1,
        min_persons: persons,
        max_persons: persons,
        seed: cfg.run.seed,
        ..Default::default()
    };
    let graphs = synth_graphs(&spec, &cfg.vocabs)?;
    let bundle = synth_features_all(&graphs, &features, cfg.run.seed, 0.5)?;
    let model = SrgInModel::new(model_cfg, cfg.run.seed)?;
    let loss = MtlLossSpec::for_vocabs(&cfg.vocabs);
    let report = check_model_gradients(&model, &graphs, &bundle, &loss, eps, tol)?;
    if let Some(p) = report_path {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Contract(e.to_string()))?;
        write_atomic(p, |w| Ok(writeln!(w, "{json}")?))?;
    }
    let values: usize = report.params.iter().map(|p| p.values_checked).sum();
    if report.passed {
        writeln!(
            stdout,
            "pass, max_rel_err {:.3e} < {tol:e} over {values} values in {} parameters",
            report.max_rel_err,
            report.params.len()
        )?;
        Ok(())
    } else {
        let worst = report
            .params
            .iter()
            .max_by(|a, b| a.max_rel_err.total_cmp(&b.max_rel_err))
            .map(|p| p.name.clone())
            .unwrap_or_default();
        writeln!(stdout, "fail, max_rel_err {:.3e} >= {tol:e} (worst: {worst})", report.max_rel_err)?;
        Err(Error::Contract(format!(
            "gradient check failed: max relative error {:.3e} in {worst}",
            report.max_rel_err
        )))
    }
}
