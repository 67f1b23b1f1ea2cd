//! Reading and writing algebra, frame, poset and representation-map files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, RawAlgebra};
use crate::frame::{FrameError, RawFrame, RelevanceFrame};
use crate::models::poset::PosetError;
use crate::models::representation::RepresentationMap;
use crate::models::{Poset, RawPoset, Relation, WkBound};

/// Overrides the element bound of wk enumeration.
pub const MAX_ELEMENTS_VAR: &str = "WKRA_MAX_ELEMENTS";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Algebra { path: PathBuf, source: AlgebraError },
    #[error("{path}: {source}")]
    Frame { path: PathBuf, source: FrameError },
    #[error("{path}: {source}")]
    Poset { path: PathBuf, source: PosetError },
    #[error("{path}: unknown element `{name}`")]
    UnknownElement { path: PathBuf, name: String },
    #[error("{path}: no image for element `{name}`")]
    MissingImage { path: PathBuf, name: String },
    #[error("{path}: pair ({i}, {j}) is outside the poset")]
    PairOutOfRange { path: PathBuf, i: usize, j: usize },
    #[error("{path}: neither an algebra (`elements`) nor a frame (`points`)")]
    UnknownKind { path: PathBuf },
    #[error("{MAX_ELEMENTS_VAR}={0} is not a positive integer")]
    BadBound(String),
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.into(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).expect("file types serialise");
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Write { path: path.into(), source })
}

pub fn load_algebra(path: &Path) -> Result<FiniteAlgebra, IoError> {
    let raw: RawAlgebra = read_json(path)?;
    FiniteAlgebra::new(raw).map_err(|source| IoError::Algebra { path: path.into(), source })
}

pub fn save_algebra(path: &Path, alg: &FiniteAlgebra) -> Result<(), IoError> {
    write_json(path, &alg.to_raw())
}

pub fn load_frame(path: &Path) -> Result<RelevanceFrame, IoError> {
    let raw: RawFrame = read_json(path)?;
    RelevanceFrame::new(&raw).map_err(|source| IoError::Frame { path: path.into(), source })
}

pub fn save_frame(path: &Path, frame: &RelevanceFrame) -> Result<(), IoError> {
    write_json(path, &frame.to_raw())
}

/// Either kind of structure file.
#[derive(Clone, Debug)]
pub enum Structure {
    Algebra(FiniteAlgebra),
    Frame(RelevanceFrame),
}

/// Loads an algebra or a frame, told apart by the `elements` / `points`
/// key.
pub fn load_structure(path: &Path) -> Result<Structure, IoError> {
    let value: serde_json::Value = read_json(path)?;
    let json = |source| IoError::Json { path: path.into(), source };
    if value.get("elements").is_some() {
        let raw: RawAlgebra = serde_json::from_value(value).map_err(json)?;
        FiniteAlgebra::new(raw).map(Structure::Algebra).map_err(|source| IoError::Algebra { path: path.into(), source })
    } else if value.get("points").is_some() && value.get("hat").is_some() {
        let raw: RawFrame = serde_json::from_value(value).map_err(json)?;
        RelevanceFrame::new(&raw).map(Structure::Frame).map_err(|source| IoError::Frame { path: path.into(), source })
    } else {
        Err(IoError::UnknownKind { path: path.into() })
    }
}

pub fn load_poset(path: &Path) -> Result<Poset, IoError> {
    let raw: RawPoset = read_json(path)?;
    Poset::new(&raw).map_err(|source| IoError::Poset { path: path.into(), source })
}

pub fn save_poset(path: &Path, poset: &Poset) -> Result<(), IoError> {
    write_json(path, &poset.to_raw())
}

/// On-disk representation map; `algebra` and `poset` are relative to the
/// map file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawRepMap {
    pub algebra: PathBuf,
    pub poset: PathBuf,
    pub map: BTreeMap<String, Vec<[usize; 2]>>,
}

/// Loads a representation map with its algebra; every element needs an
/// image.
pub fn load_rep_map(path: &Path) -> Result<(FiniteAlgebra, RepresentationMap), IoError> {
    let raw: RawRepMap = read_json(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let alg = load_algebra(&dir.join(&raw.algebra))?;
    let poset = load_poset(&dir.join(&raw.poset))?;
    let n = poset.len();
    for name in raw.map.keys() {
        if alg.index_of(name).is_none() {
            return Err(IoError::UnknownElement { path: path.into(), name: name.clone() });
        }
    }
    let mut images = Vec::new();
    for e in 0..alg.size() {
        let name = alg.element_name(e);
        let pairs = raw.map.get(name).ok_or_else(|| IoError::MissingImage { path: path.into(), name: name.into() })?;
        if let Some(&[i, j]) = pairs.iter().find(|[i, j]| *i >= n || *j >= n) {
            return Err(IoError::PairOutOfRange { path: path.into(), i, j });
        }
        images.push(Relation::from_pairs(n, pairs.iter().map(|&[i, j]| (i, j))));
    }
    Ok((alg, RepresentationMap { poset, images }))
}

pub fn save_rep_map(path: &Path, alg_path: &Path, poset_path: &Path, alg: &FiniteAlgebra, map: &RepresentationMap) -> Result<(), IoError> {
    let entries = (0..alg.size())
        .map(|e| (alg.element_name(e).to_string(), map.images[e].pairs().map(|(i, j)| [i, j]).collect()))
        .collect();
    write_json(path, &RawRepMap { algebra: alg_path.into(), poset: poset_path.into(), map: entries })
}

/// The default wk bound with `WKRA_MAX_ELEMENTS` applied.
pub fn wk_bound_from_env() -> Result<WkBound, IoError> {
    let mut bound = WkBound::default();
    if let Ok(v) = std::env::var(MAX_ELEMENTS_VAR) {
        bound.max_elements = match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => k,
            _ => return Err(IoError::BadBound(v)),
        };
    }
    Ok(bound)
}
