//! Binary feature files.
//!
//! Little-endian layout: magic `SRGF`, version `u32`, record count `u32`,
//! then one record per vector: key kind `u8` (0 person, 1 edge), the key
//! strings each as `u16` length plus UTF-8 (`image_id, person_id` or
//! `image_id, src, dst`), role `u8` (0 age, 1 gender, 2 clothing,
//! 3 activity, 4 scene), length `u32`, and the values as `f32`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{EdgeFeatures, FeatureBundle, FeatureConfig, PersonFeatures, Role};
use crate::error::{Error, Result};
use crate::graph::PersonId;

pub const FEATURE_MAGIC: &[u8; 4] = b"SRGF";
pub const FEATURE_VERSION: u32 = 1;

const KIND_PERSON: u8 = 0;
const KIND_EDGE: u8 = 1;

fn write_str<W: Write>(out: &mut W, s: &str) -> Result<()> {
    let len = u16::try_from(s.len()).map_err(|_| Error::Config(format!("key too long: {s}")))?;
    out.write_all(&len.to_le_bytes())?;
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn write_vec<W: Write>(out: &mut W, role: Role, v: &[f64]) -> Result<()> {
    out.write_all(&[role as u8])?;
    out.write_all(&(v.len() as u32).to_le_bytes())?;
    for x in v {
        out.write_all(&(*x as f32).to_le_bytes())?;
    }
    Ok(())
}

pub fn write_features<W: Write>(bundle: &FeatureBundle, mut out: W) -> Result<()> {
    let count = 3 * bundle.num_persons() + 2 * bundle.num_edges();
    out.write_all(FEATURE_MAGIC)?;
    out.write_all(&FEATURE_VERSION.to_le_bytes())?;
    out.write_all(&(count as u32).to_le_bytes())?;
    for ((img, id), f) in bundle.persons() {
        for role in Role::PERSON {
            out.write_all(&[KIND_PERSON])?;
            write_str(&mut out, img)?;
            write_str(&mut out, &id.to_string())?;
            write_vec(&mut out, role, f.get(role).expect("person role"))?;
        }
    }
    for ((img, src, dst), f) in bundle.edges() {
        for role in Role::EDGE {
            out.write_all(&[KIND_EDGE])?;
            write_str(&mut out, img)?;
            write_str(&mut out, &src.to_string())?;
            write_str(&mut out, &dst.to_string())?;
            write_vec(&mut out, role, f.get(role).expect("edge role"))?;
        }
    }
    out.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
    record: usize,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b).map_err(|e| Error::Parse {
            line: self.record,
            message: format!("truncated feature file: {e}"),
        })?;
        Ok(b)
    }

    fn string(&mut self) -> Result<String> {
        let len = u16::from_le_bytes(self.bytes()?) as usize;
        let mut buf = vec![0u8; len];
        self.inner.read_exact(&mut buf).map_err(|e| Error::Parse {
            line: self.record,
            message: format!("truncated key: {e}"),
        })?;
        String::from_utf8(buf).map_err(|_| self.err("key is not UTF-8".into()))
    }

    fn id(&mut self) -> Result<PersonId> {
        let s = self.string()?;
        s.parse().map_err(|_| self.err(format!("person id {s:?} is not an integer")))
    }

    fn err(&self, message: String) -> Error {
        Error::Parse {
            line: self.record,
            message,
        }
    }
}

#[derive(Default)]
struct Partial {
    roles: BTreeMap<u8, Vec<f64>>,
}

impl Partial {
    fn take(&mut self, role: Role, key: &str) -> Result<Vec<f64>> {
        self.roles.remove(&(role as u8)).ok_or_else(|| Error::MissingFeature {
            keys: vec![format!("{key} ({})", role.as_str())],
        })
    }
}

/// Loads a feature file, checking every vector against `cfg`. Errors use
/// the 0-based record index as their location.
pub fn read_features<R: Read>(input: R, cfg: &FeatureConfig) -> Result<FeatureBundle> {
    let mut r = Reader { inner: input, record: 0 };
    if &r.bytes::<4>()? != FEATURE_MAGIC {
        return Err(r.err("bad magic, not an SRGF feature file".into()));
    }
    let version = u32::from_le_bytes(r.bytes()?);
    if version != FEATURE_VERSION {
        return Err(r.err(format!("unsupported feature file version {version}")));
    }
    let count = u32::from_le_bytes(r.bytes()?) as usize;
    let mut persons: BTreeMap<(String, PersonId), Partial> = BTreeMap::new();
    let mut edges: BTreeMap<(String, PersonId, PersonId), Partial> = BTreeMap::new();
    for rec in 0..count {
        r.record = rec;
        let kind = r.bytes::<1>()?[0];
        let slot = match kind {
            KIND_PERSON => {
                let img = r.string()?;
                let id = r.id()?;
                persons.entry((img, id)).or_default()
            }
            KIND_EDGE => {
                let img = r.string()?;
                let src = r.id()?;
                let dst = r.id()?;
                edges.entry((img, src, dst)).or_default()
            }
            k => return Err(r.err(format!("unknown key kind {k}"))),
        };
        let role_byte = r.bytes::<1>()?[0];
        let role = Role::from_byte(role_byte).ok_or_else(|| r.err(format!("unknown vector role {role_byte}")))?;
        let expected_kind = if Role::PERSON.contains(&role) { KIND_PERSON } else { KIND_EDGE };
        if expected_kind != kind {
            return Err(r.err(format!("role {} on wrong key kind", role.as_str())));
        }
        let len = u32::from_le_bytes(r.bytes()?) as usize;
        if len != role.dim(cfg) {
            return Err(Error::dim(role.as_str(), &[len], &[role.dim(cfg)]));
        }
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push(f64::from(f32::from_le_bytes(r.bytes()?)));
        }
        if slot.roles.insert(role as u8, v).is_some() {
            return Err(r.err(format!("duplicate {} vector", role.as_str())));
        }
    }

    let mut bundle = FeatureBundle::new(*cfg);
    for ((img, id), mut p) in persons {
        let key = super::bundle::person_key(&img, id);
        let f = PersonFeatures {
            age: p.take(Role::Age, &key)?,
            gender: p.take(Role::Gender, &key)?,
            clothing: p.take(Role::Clothing, &key)?,
        };
        bundle.insert_person(&img, id, f)?;
    }
    for ((img, src, dst), mut e) in edges {
        let key = super::bundle::edge_key(&img, src, dst);
        let f = EdgeFeatures {
            activity: e.take(Role::Activity, &key)?,
            scene: e.take(Role::Scene, &key)?,
        };
        bundle.insert_edge(&img, src, dst, f)?;
    }
    Ok(bundle)
}
