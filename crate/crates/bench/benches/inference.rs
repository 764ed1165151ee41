use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use srgn_core::features::{synth_features_all, synth_graphs, FeatureConfig, SynthGraphSpec};
use srgn_core::graph::Vocabs;
use srgn_core::srgin::{mtl_loss, ModelConfig, MtlLossSpec, SrgInModel};
use srgn_core::Tape;

fn desk_fixture(persons: usize) -> (SrgInModel, Vec<srgn_core::graph::SocialGraph>, srgn_core::features::FeatureBundle) {
    let vocabs = Vocabs::pipa();
    let cfg = FeatureConfig::desk();
    let graphs = synth_graphs(
        &SynthGraphSpec {
            images: 1,
            min_persons: persons,
            max_persons: persons,
            seed: 1,
            ..Default::default()
        },
        &vocabs,
    )
    .unwrap();
    let bundle = synth_features_all(&graphs, &cfg, 1, 0.9).unwrap();
    let model = SrgInModel::new(ModelConfig::for_vocabs(&vocabs, cfg, 32), 1).unwrap();
    (model, graphs, bundle)
}

fn predict(c: &mut Criterion) {
    let mut group = c.benchmark_group("predict");
    for persons in [2, 4, 8] {
        let (model, graphs, bundle) = desk_fixture(persons);
        group.bench_with_input(BenchmarkId::from_parameter(persons), &persons, |b, _| {
            b.iter(|| model.predict(&graphs[0], &bundle).unwrap())
        });
    }
    group.finish();
}

fn forward_backward(c: &mut Criterion) {
    let (mut model, graphs, bundle) = desk_fixture(4);
    let spec = MtlLossSpec::default();
    c.bench_function("forward_backward/4", |b| {
        b.iter(|| {
            let mut tape = Tape::new();
            let out = model.forward(&mut tape, &graphs[0], &bundle).unwrap();
            let loss = mtl_loss(&mut tape, &[out], &[&graphs[0]], &spec).unwrap();
            model.params.zero_grad();
            tape.backward(loss.total, &mut model.params).unwrap();
        })
    });
}

criterion_group!(benches, predict, forward_backward);
criterion_main!(benches);
