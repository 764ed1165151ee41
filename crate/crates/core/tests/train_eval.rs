use srgn_core::features::{synth_features_all, synth_graphs, FeatureBundle, FeatureConfig, SynthGraphSpec};
use srgn_core::graph::{SocialGraph, Vocabs};
use srgn_core::srgin::{ModelConfig, MtlLossSpec, Pooling, SrgInModel};
use srgn_core::train::*;
use srgn_core::{Error, ParamStore, SeededRng, Tensor};

fn store_with(value: f64, grad: f64, trainable: bool) -> ParamStore {
    let mut s = ParamStore::new();
    if trainable {
        s.register("p", Tensor::vector(vec![value])).unwrap();
    } else {
        s.register_frozen("p", Tensor::vector(vec![value])).unwrap();
    }
    s.get_mut("p").unwrap().grad_mut()[0] = grad;
    s
}

#[test]
fn sgd_examples() {
    let mut s = store_with(5.0, 1.0, true);
    sgd_step(&mut s, 1.0, 0.0).unwrap();
    assert_eq!(s.get("p").unwrap().data(), [4.0]);

    let mut s = store_with(10.0, 0.0, true);
    sgd_step(&mut s, 1.0, 0.1).unwrap();
    assert_eq!(s.get("p").unwrap().data(), [9.0]);

    let mut s = store_with(5.0, 1.0, false);
    sgd_step(&mut s, 1.0, 0.5).unwrap();
    assert_eq!(s.get("p").unwrap().data(), [5.0]);

    let mut s = ParamStore::new();
    s.register("q", Tensor::vector(vec![1.0])).unwrap();
    assert!(matches!(sgd_step(&mut s, 1.0, 0.0), Err(Error::Contract(_))));
}

struct Bench {
    model: ModelConfig,
    train: Vec<SocialGraph>,
    val: Vec<SocialGraph>,
    bundle: FeatureBundle,
}

fn bench(images: usize, correlation: f64, hidden: usize) -> Bench {
    let vocabs = Vocabs::pipa();
    let cfg = FeatureConfig::uniform(6);
    let all = synth_graphs(
        &SynthGraphSpec {
            images: images + 4,
            seed: 21,
            ..Default::default()
        },
        &vocabs,
    )
    .unwrap();
    let bundle = synth_features_all(&all, &cfg, 21, correlation).unwrap();
    let (train, val) = all.split_at(images);
    Bench {
        model: ModelConfig::for_vocabs(&vocabs, cfg, hidden),
        train: train.to_vec(),
        val: val.to_vec(),
        bundle,
    }
}

fn quick_cfg(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        ..TrainConfig::desk()
    }
}

#[test]
fn zero_learning_rate_leaves_params() {
    let b = bench(4, 0.9, 8);
    let mut model = SrgInModel::new(b.model.clone(), 1).unwrap();
    let before = model.params.clone();
    let cfg = TrainConfig {
        learning_rate: 0.0,
        ..quick_cfg(3)
    };
    train(&mut model, &b.train, &b.val, &b.bundle, &cfg, &MtlLossSpec::default()).unwrap();
    for ((_, a), (_, c)) in before.iter().zip(model.params.iter()) {
        assert_eq!(a.tensor.data(), c.tensor.data());
    }
}

#[test]
fn training_is_deterministic() {
    let b = bench(6, 0.9, 8);
    let run = || {
        let mut model = SrgInModel::new(b.model.clone(), 4).unwrap();
        let cfg = TrainConfig {
            dropout: 0.2,
            l2: 1e-3,
            ..quick_cfg(5)
        };
        let out = train(&mut model, &b.train, &b.val, &b.bundle, &cfg, &MtlLossSpec::default()).unwrap();
        let mut bytes = Vec::new();
        srgn_core::nn::write_checkpoint(&out.best, &mut bytes).unwrap();
        (out.log, bytes)
    };
    let (log_a, ck_a) = run();
    let (log_b, ck_b) = run();
    assert_eq!(log_a, log_b);
    assert_eq!(ck_a, ck_b);
}

#[test]
fn empty_training_set() {
    let b = bench(2, 0.9, 4);
    let mut model = SrgInModel::new(b.model, 0).unwrap();
    let err = train(&mut model, &[], &b.val, &b.bundle, &quick_cfg(1), &MtlLossSpec::default()).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn early_stopping_within_patience() {
    let b = bench(6, 0.9, 8);
    let mut model = SrgInModel::new(b.model.clone(), 2).unwrap();
    // a large step makes validation loss worsen quickly
    let cfg = TrainConfig {
        learning_rate: 3.0,
        patience: 3,
        ..quick_cfg(100)
    };
    let out = train(&mut model, &b.train, &b.val, &b.bundle, &cfg, &MtlLossSpec::default()).unwrap();
    assert!(out.stopped_early);
    let last = out.log.last().unwrap().epoch;
    assert_eq!(last, out.best_epoch + cfg.patience);
    let best_val = out.log[out.best_epoch - 1].val_loss.unwrap();
    assert!(out.log.iter().all(|r| r.val_loss.unwrap() >= best_val));
}

#[test]
fn loss_decreases_on_correlated_data() {
    let b = bench(20, 0.9, 16);
    let mut model = SrgInModel::new(b.model.clone(), 3).unwrap();
    let out = train(&mut model, &b.train, &b.val, &b.bundle, &quick_cfg(50), &MtlLossSpec::default()).unwrap();
    assert_eq!(out.log.len(), 50);
    assert!(out.log[49].loss_total < out.log[0].loss_total);
    let rec = serde_json::to_value(&out.log[0]).unwrap();
    for key in ["epoch", "loss_total", "loss_per_task", "val_srrec", "lr"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
}

fn random_labels(n: usize, classes: usize, rng: &mut SeededRng) -> Vec<usize> {
    (0..n).map(|_| rng.below(classes)).collect()
}

#[test]
fn precision_matches_brute_force() {
    let mut rng = SeededRng::new(5);
    for _ in 0..100 {
        let n = 1 + rng.below(100);
        let k = 1 + rng.below(8);
        let pred = random_labels(n, k, &mut rng);
        let truth = random_labels(n, k, &mut rng);
        let got = per_class_precision(&pred, &truth, k).unwrap();
        for c in 0..k {
            let predicted = (0..n).filter(|&i| pred[i] == c).count();
            let tp = (0..n).filter(|&i| pred[i] == c && truth[i] == c).count();
            let expect = if predicted == 0 { None } else { Some(tp as f64 / predicted as f64) };
            assert_eq!(got[c], expect);
        }
        let m = confusion_matrix(&pred, &truth, k).unwrap();
        for c in 0..k {
            assert_eq!(m[c].iter().sum::<usize>(), truth.iter().filter(|t| **t == c).count());
        }
    }
}

/// AP straight from its definition: at each positive, the best precision
/// reached at that depth or deeper.
fn ap_oracle(ranked: &[bool]) -> Option<f64> {
    let prec_at = |d: usize| ranked[..=d].iter().filter(|r| **r).count() as f64 / (d + 1) as f64;
    let hits: Vec<usize> = (0..ranked.len()).filter(|&i| ranked[i]).collect();
    if hits.is_empty() {
        return None;
    }
    let total: f64 = hits
        .iter()
        .map(|&h| (h..ranked.len()).map(prec_at).fold(f64::MIN, f64::max))
        .sum();
    Some(total / hits.len() as f64)
}

#[test]
fn ap_exhaustive_small_rankings() {
    for n in 1..=10usize {
        for mask in 0u32..(1 << n) {
            let ranked: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            match (average_precision(&ranked), ap_oracle(&ranked)) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "{ranked:?}"),
                (a, b) => assert_eq!(a, b),
            }
        }
    }
    assert!((average_precision(&[true, false, true]).unwrap() - 0.8333333333).abs() < 1e-9);
}

#[test]
fn map_matches_brute_force() {
    let mut rng = SeededRng::new(8);
    for _ in 0..100 {
        let n = 1 + rng.below(100);
        let k = 2 + rng.below(5);
        let truth = random_labels(n, k, &mut rng);
        let scores: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.unit()).collect()).collect();
        let mut aps = Vec::new();
        for c in 0..k {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| scores[b][c].partial_cmp(&scores[a][c]).unwrap());
            let ranked: Vec<bool> = idx.iter().map(|&i| truth[i] == c).collect();
            aps.extend(ap_oracle(&ranked));
        }
        let expect = aps.iter().sum::<f64>() / aps.len() as f64;
        assert!((mean_ap(&scores, &truth, k).unwrap() - expect).abs() < 1e-12);
    }
}

#[test]
fn random_scores_give_half_map() {
    let mut rng = SeededRng::new(13);
    let truth: Vec<usize> = (0..10_000).map(|i| i % 2).collect();
    let scores: Vec<Vec<f64>> = (0..10_000)
        .map(|_| {
            let p = rng.unit();
            vec![p, 1.0 - p]
        })
        .collect();
    let m = mean_ap(&scores, &truth, 2).unwrap();
    assert!((m - 0.5).abs() < 0.05, "{m}");
}

#[test]
fn strict_never_exceeds_paper_chance() {
    let vocabs = Vocabs::pipa();
    let gt = synth_graphs(
        &SynthGraphSpec {
            images: 30,
            seed: 2,
            ..Default::default()
        },
        &vocabs,
    )
    .unwrap();
    for seed in 0..20 {
        let mut pred = synth_graphs(
            &SynthGraphSpec {
                images: 30,
                seed: 2,
                ..Default::default()
            },
            &vocabs,
        )
        .unwrap();
        let mut rng = SeededRng::new(seed);
        for g in &mut pred {
            for p in &mut g.persons {
                if rng.bernoulli(0.5) {
                    p.age = Some(rng.below(6));
                }
            }
            for e in &mut g.edges {
                if rng.bernoulli(0.3) {
                    e.relationship = Some(rng.below(16));
                }
            }
        }
        let loose = srggen_accuracy(&pred, &gt, SrgGenMode::PaperChance).unwrap();
        let strict = srggen_accuracy(&pred, &gt, SrgGenMode::Strict).unwrap();
        assert!(strict <= loose);
    }
}

#[test]
fn evaluate_report_shape() {
    let b = bench(4, 0.9, 8);
    let model = SrgInModel::new(b.model.clone(), 1).unwrap();
    let r = evaluate(&model, &b.train, &b.bundle, &Vocabs::pipa()).unwrap();
    assert!((0.0..=1.0).contains(&r.srrec_accuracy));
    assert_eq!(r.per_class_precision.len(), 16);
    assert_eq!(r.confusion.len(), 4);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"srrec_accuracy\""));
    assert!(matches!(evaluate(&model, &b.train, &b.bundle, &Vocabs::pisc()), Err(Error::Alignment(_))));
}

#[test]
fn ablation_grid_shape_and_consistency() {
    let b = bench(4, 0.9, 8);
    let cfg = quick_cfg(3);
    let loss = MtlLossSpec::default();
    let setup = AblationSetup {
        model: &b.model,
        model_seed: 9,
        train: &b.train,
        val: &b.val,
        test: &b.val,
        bundle: &b.bundle,
        train_cfg: &cfg,
        loss: &loss,
    };
    let table = ablate(&setup, &[Pooling::Max, Pooling::Mean], &[1, 2, 3]).unwrap();
    assert_eq!(table.rows.len(), 6);
    assert!(table.rows.iter().all(|r| (0.0..=1.0).contains(&r.srrec_accuracy)));
    assert_eq!(table.to_string().lines().count(), 8);

    let single = ablate(&setup, &[Pooling::Mean], &[2]).unwrap();
    let mut model = SrgInModel::new(b.model.clone(), 9).unwrap();
    let direct_cfg = TrainConfig {
        pooling: Pooling::Mean,
        time_steps: 2,
        ..cfg.clone()
    };
    train(&mut model, &b.train, &b.val, &b.bundle, &direct_cfg, &loss).unwrap();
    let preds = predict_all(&model, &b.val, &b.bundle).unwrap();
    assert_eq!(single.rows[0].srrec_accuracy, srrec_accuracy(&preds, &b.val).unwrap());
    assert!(ablate(&setup, &[], &[1]).is_err());
}

#[test]
fn split_is_seeded_and_complete() {
    let b = bench(10, 0.5, 4);
    let (a, h) = split_graphs(&b.train, 0.3, 1).unwrap();
    assert_eq!((a.len(), h.len()), (7, 3));
    assert_eq!(split_graphs(&b.train, 0.3, 1).unwrap().1, h);
}
