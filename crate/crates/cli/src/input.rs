//! Locating FCIDUMP files and reading their geometry tags.

use std::path::{Path, PathBuf};

use fermicorr::integrals::parse_fcidump;
use fermicorr::IntegralTable;
use sha2::{Digest, Sha256};

use crate::Failure;

/// One integral file with its geometry tag (O–H distance in Å) if known.
#[derive(Debug, Clone)]
pub struct Input {
    pub path: PathBuf,
    pub tag: Option<f64>,
}

/// `R` from a file name of the form `<anything>_R<value>.fcidump`.
pub fn tag_from_name(path: &Path) -> Option<f64> {
    let name = path.file_name()?.to_str()?;
    let stem = name
        .strip_suffix(".fcidump")
        .or_else(|| name.strip_suffix(".FCIDUMP"))?;
    let (_, value) = stem.rsplit_once("_R")?;
    value.parse().ok().filter(|v: &f64| v.is_finite())
}

/// Expands directories into their `*.fcidump` files, sorted by name.
pub fn collect(paths: &[PathBuf]) -> Result<Vec<Input>, Failure> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let entries = std::fs::read_dir(path).map_err(|e| Failure::input(path, e))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("fcidump")))
                .collect();
            found.sort();
            if found.is_empty() {
                log::warn!("{} contains no .fcidump files", path.display());
            }
            out.extend(found.into_iter().map(|p| Input {
                tag: tag_from_name(&p),
                path: p,
            }));
        } else {
            out.push(Input {
                tag: tag_from_name(path),
                path: path.clone(),
            });
        }
    }
    if out.is_empty() {
        return Err(Failure::Input("no input files".into()));
    }
    Ok(out)
}

pub struct Loaded {
    pub table: IntegralTable,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(path, e))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Failure::input(path, e))?;
    let table = parse_fcidump(&text).map_err(|e| Failure::input(path, e))?;
    Ok(Loaded {
        table,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}
