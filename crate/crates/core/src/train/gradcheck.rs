use crate::error::Result;
use crate::features::FeatureBundle;
use crate::graph::SocialGraph;
use crate::nn::Mode;
use crate::srgin::{mtl_loss, MtlLossSpec, SrgInModel};
use crate::tensor::{grad_check, GradCheckReport, ParamStore, SeededRng, Tape};

/// Finite-difference check of the multi-task loss over `graphs` with
/// respect to every trainable model parameter.
pub fn check_model_gradients(
    model: &SrgInModel,
    graphs: &[SocialGraph],
    bundle: &FeatureBundle,
    spec: &MtlLossSpec,
    eps: f64,
    tol: f64,
) -> Result<GradCheckReport> {
    let refs: Vec<&SocialGraph> = graphs.iter().collect();
    let inputs = graphs.iter().map(|g| model.prepare(g, bundle)).collect::<Result<Vec<_>>>()?;
    let loss = |tape: &mut Tape, store: &ParamStore| {
        // layers read the model's own store, so evaluate a copy carrying `store`
        let mut m = model.clone();
        m.params = store.clone();
        let mut rng = SeededRng::new(0);
        let outs = inputs
            .iter()
            .map(|i| m.forward_inputs(tape, i, Mode::Eval, 0.0, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(mtl_loss(tape, &outs, &refs, spec)?.total)
    };
    grad_check(loss, &model.params, eps, tol)
}
