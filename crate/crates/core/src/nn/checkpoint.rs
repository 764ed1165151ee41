//! Binary parameter checkpoints.
//!
//! Little-endian layout: magic `SRGN`, format version `u32`, parameter count
//! `u32`, then per parameter (in store order) a `u16` name length, the UTF-8
//! name, a `u8` rank, `rank` dimensions as `u64`, and the values as `f64`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::tensor::{ParamStore, Tensor};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"SRGN";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(store: &ParamStore, mut out: W) -> Result<()> {
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    let count = u32::try_from(store.len()).map_err(|_| Error::Checkpoint("too many parameters".into()))?;
    out.write_all(&count.to_le_bytes())?;
    for (name, param) in store.iter() {
        let len = u16::try_from(name.len()).map_err(|_| Error::Checkpoint(format!("name too long: {name}")))?;
        out.write_all(&len.to_le_bytes())?;
        out.write_all(name.as_bytes())?;
        let shape = param.tensor.shape();
        out.write_all(&[shape.len() as u8])?;
        for d in shape {
            out.write_all(&(*d as u64).to_le_bytes())?;
        }
        for v in param.tensor.data() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Checkpoint(format!("truncated checkpoint: {e}")))?;
    Ok(buf)
}

/// Parses every entry of a checkpoint, in file order.
pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Vec<(String, Tensor)>> {
    if &read_array::<4, _>(&mut r)? != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic, not an SRGN checkpoint".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported checkpoint version {version}")));
    }
    let count = u32::from_le_bytes(read_array(&mut r)?);
    let mut entries = Vec::with_capacity(count.min(1 << 16) as usize);
    for _ in 0..count {
        let len = u16::from_le_bytes(read_array(&mut r)?) as usize;
        let mut name = vec![0u8; len];
        r.read_exact(&mut name)
            .map_err(|e| Error::Checkpoint(format!("truncated checkpoint: {e}")))?;
        let name = String::from_utf8(name).map_err(|_| Error::Checkpoint("parameter name is not UTF-8".into()))?;
        let rank = read_array::<1, _>(&mut r)?[0] as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(u64::from_le_bytes(read_array(&mut r)?) as usize);
        }
        let n: usize = shape.iter().product();
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(f64::from_le_bytes(read_array(&mut r)?));
        }
        let tensor =
            Tensor::new(shape, data).map_err(|e| Error::Checkpoint(format!("parameter {name}: {e}")))?;
        entries.push((name, tensor));
    }
    Ok(entries)
}

/// Reads a checkpoint into an already-registered store. Names must match
/// one to one and every shape must agree with the registered shape.
pub fn load_checkpoint<R: Read>(store: &mut ParamStore, r: R) -> Result<()> {
    let entries = read_checkpoint(r)?;
    if entries.len() != store.len() {
        return Err(Error::Checkpoint(format!(
            "checkpoint has {} parameters, model expects {}",
            entries.len(),
            store.len()
        )));
    }
    let mut staged = store.clone();
    for (name, tensor) in entries {
        let slot = staged
            .get_mut(&name)
            .map_err(|_| Error::Checkpoint(format!("unexpected parameter {name}")))?;
        if slot.shape() != tensor.shape() {
            return Err(Error::Checkpoint(format!(
                "shape mismatch for {name}: checkpoint {:?}, model {:?}",
                tensor.shape(),
                slot.shape()
            )));
        }
        slot.data_mut().copy_from_slice(tensor.data());
    }
    *store = staged;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> ParamStore {
        let mut s = ParamStore::new();
        s.register("layer.weight", Tensor::matrix(2, 3, vec![1.0, -2.5, 3.0, 0.0, 1e-300, -0.0]).unwrap())
            .unwrap();
        s.register("layer.bias", Tensor::vector(vec![0.25, f64::MIN_POSITIVE])).unwrap();
        s
    }

    #[test]
    fn round_trip_is_bitwise() {
        let s = store();
        let mut bytes = Vec::new();
        write_checkpoint(&s, &mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"SRGN");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        let mut target = store();
        target.iter_mut().for_each(|(_, p)| p.tensor.data_mut().fill(9.0));
        load_checkpoint(&mut target, bytes.as_slice()).unwrap();
        for ((_, a), (_, b)) in s.iter().zip(target.iter()) {
            let bits = |t: &Tensor| t.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a.tensor), bits(&b.tensor));
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut bytes = Vec::new();
        write_checkpoint(&store(), &mut bytes).unwrap();
        let mut other = ParamStore::new();
        other.register("layer.weight", Tensor::zeros(&[3, 2])).unwrap();
        other.register("layer.bias", Tensor::zeros(&[2])).unwrap();
        let err = load_checkpoint(&mut other, bytes.as_slice()).unwrap_err();
        assert!(err.to_string().contains("shape mismatch"), "{err}");
        assert_eq!(other.get("layer.weight").unwrap().max_abs(), 0.0);
    }

    #[test]
    fn corrupt_input_rejected() {
        assert!(read_checkpoint(&b"NOPE"[..]).is_err());
        let mut bytes = Vec::new();
        write_checkpoint(&store(), &mut bytes).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(matches!(read_checkpoint(bytes.as_slice()), Err(Error::Checkpoint(_))));
    }
}
