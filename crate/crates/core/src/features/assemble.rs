use super::{EdgeFeatures, FeatureConfig, PersonFeatures, Role};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

fn check(role: Role, v: &[f64], cfg: &FeatureConfig) -> Result<()> {
    if v.len() != role.dim(cfg) {
        return Err(Error::dim(role.as_str(), &[v.len()], &[role.dim(cfg)]));
    }
    Ok(())
}

/// Node-pair input: age, gender and clothing of `i`, then of `j`.
pub fn assemble_ppair(i: &PersonFeatures, j: &PersonFeatures, cfg: &FeatureConfig) -> Result<Tensor> {
    let mut out = Vec::with_capacity(cfg.ppair_input_dim());
    for p in [i, j] {
        for role in Role::PERSON {
            let v = p.get(role).expect("person role");
            check(role, v, cfg)?;
            out.extend_from_slice(v);
        }
    }
    Ok(Tensor::vector(out))
}

/// Edge input: activity then scene, or activity alone without scene.
pub fn assemble_rship(e: &EdgeFeatures, cfg: &FeatureConfig, with_scene: bool) -> Result<Tensor> {
    check(Role::Activity, &e.activity, cfg)?;
    let mut out = Vec::with_capacity(cfg.rship_dim(with_scene));
    out.extend_from_slice(&e.activity);
    if with_scene {
        check(Role::Scene, &e.scene, cfg)?;
        out.extend_from_slice(&e.scene);
    }
    Ok(Tensor::vector(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn person(cfg: &FeatureConfig, v: f64) -> PersonFeatures {
        PersonFeatures {
            age: vec![v; cfg.dim_age],
            gender: vec![v; cfg.dim_gender],
            clothing: vec![v; cfg.dim_clothing],
        }
    }

    #[test]
    fn ppair_order() {
        let cfg = FeatureConfig::uniform(2);
        let x = assemble_ppair(&person(&cfg, 1.0), &person(&cfg, 2.0), &cfg).unwrap();
        assert_eq!(x.data(), &[1., 1., 1., 1., 1., 1., 2., 2., 2., 2., 2., 2.]);
        let y = assemble_ppair(&person(&cfg, 2.0), &person(&cfg, 1.0), &cfg).unwrap();
        assert_ne!(x, y);
    }

    #[test]
    fn ppair_role_order_within_person() {
        let cfg = FeatureConfig::uniform(1);
        let p = PersonFeatures {
            age: vec![1.0],
            gender: vec![2.0],
            clothing: vec![3.0],
        };
        let q = PersonFeatures {
            age: vec![4.0],
            gender: vec![5.0],
            clothing: vec![6.0],
        };
        assert_eq!(assemble_ppair(&p, &q, &cfg).unwrap().data(), &[1., 2., 3., 4., 5., 6.]);
    }

    #[test]
    fn paper_lengths() {
        let cfg = FeatureConfig::paper();
        let x = assemble_ppair(&person(&cfg, 0.0), &person(&cfg, 0.0), &cfg).unwrap();
        assert_eq!(x.len(), 24576);
        let e = EdgeFeatures {
            activity: vec![0.0; 1024],
            scene: vec![0.0; 4096],
        };
        assert_eq!(assemble_rship(&e, &cfg, true).unwrap().len(), 5120);
        assert_eq!(assemble_rship(&e, &cfg, false).unwrap().len(), 1024);
    }

    #[test]
    fn rship_order() {
        let cfg = FeatureConfig::uniform(4);
        let e = EdgeFeatures {
            activity: vec![1.0; 4],
            scene: vec![2.0; 4],
        };
        assert_eq!(assemble_rship(&e, &cfg, true).unwrap().data(), &[1., 1., 1., 1., 2., 2., 2., 2.]);
    }

    #[test]
    fn dim_mismatch() {
        let cfg = FeatureConfig::uniform(2);
        let bad = person(&FeatureConfig::uniform(3), 0.0);
        assert!(matches!(assemble_ppair(&bad, &person(&cfg, 0.0), &cfg), Err(Error::Dimension { .. })));
    }
}
