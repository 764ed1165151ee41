use serde::Serialize;

use super::{ParamStore, Tape, Var};
use crate::error::{Error, Result};

/// Denominator floor for relative errors, so gradients that are zero up to
/// round-off are compared on an absolute scale.
pub const REL_ERR_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct ParamCheck {
    pub name: String,
    pub values_checked: usize,
    pub max_rel_err: f64,
    pub max_abs_err: f64,
    pub worst_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradCheckReport {
    pub eps: f64,
    pub tol: f64,
    pub loss: f64,
    pub params: Vec<ParamCheck>,
    pub max_rel_err: f64,
    pub passed: bool,
}

fn evaluate<F>(f: &F, store: &ParamStore) -> Result<f64>
where
    F: Fn(&mut Tape, &ParamStore) -> Result<Var>,
{
    let mut tape = Tape::new();
    let loss = f(&mut tape, store)?;
    tape.value(loss).item()
}

/// Compares tape gradients of the scalar built by `f` against central
/// finite differences for every trainable parameter in `store`.
pub fn grad_check<F>(f: F, store: &ParamStore, eps: f64, tol: f64) -> Result<GradCheckReport>
where
    F: Fn(&mut Tape, &ParamStore) -> Result<Var>,
{
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let first = evaluate(&f, store)?;
    let second = evaluate(&f, store)?;
    if first.to_bits() != second.to_bits() {
        return Err(Error::Determinism { first, second });
    }

    let mut analytic = store.clone();
    analytic.zero_grad();
    let mut tape = Tape::new();
    let loss = f(&mut tape, store)?;
    tape.backward(loss, &mut analytic)?;

    let mut probe = store.clone();
    let mut params = Vec::new();
    let names: Vec<String> = store
        .iter()
        .filter(|(_, p)| p.trainable)
        .map(|(n, _)| n.to_owned())
        .collect();
    for name in names {
        let grad = analytic.get(&name)?.grad().expect("zeroed above").to_vec();
        let mut check = ParamCheck {
            name: name.clone(),
            values_checked: grad.len(),
            max_rel_err: 0.0,
            max_abs_err: 0.0,
            worst_index: 0,
        };
        for (i, &a) in grad.iter().enumerate() {
            let orig = probe.get(&name)?.data()[i];
            probe.get_mut(&name)?.data_mut()[i] = orig + eps;
            let plus = evaluate(&f, &probe)?;
            probe.get_mut(&name)?.data_mut()[i] = orig - eps;
            let minus = evaluate(&f, &probe)?;
            probe.get_mut(&name)?.data_mut()[i] = orig;

            let numeric = (plus - minus) / (2.0 * eps);
            let abs = (a - numeric).abs();
            let rel = abs / a.abs().max(numeric.abs()).max(REL_ERR_FLOOR);
            if rel > check.max_rel_err || !rel.is_finite() {
                check.max_rel_err = rel;
                check.worst_index = i;
            }
            check.max_abs_err = check.max_abs_err.max(abs);
        }
        params.push(check);
    }
    let max_rel_err = params.iter().fold(0.0, |m: f64, p| m.max(p.max_rel_err));
    Ok(GradCheckReport {
        eps,
        tol,
        loss: first,
        passed: max_rel_err < tol && max_rel_err.is_finite(),
        max_rel_err,
        params,
    })
}
