use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;

use srgn_core::features::{read_features, FeatureBundle, FeatureConfig};
use srgn_core::graph::{read_graphs, SocialGraph, Vocabs};
use srgn_core::{Error, Result};
use tempfile::NamedTempFile;

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed command never leaves a partial file.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Reads and validates graphs.
pub fn load_graphs(path: &Path, vocabs: &Vocabs) -> Result<Vec<SocialGraph>> {
    let graphs = read_graphs(BufReader::new(fs::File::open(path)?), vocabs)?;
    for g in &graphs {
        g.check(vocabs)?;
    }
    Ok(graphs)
}

pub fn load_features(path: &Path, cfg: &FeatureConfig) -> Result<FeatureBundle> {
    read_features(BufReader::new(fs::File::open(path)?), cfg)
}
