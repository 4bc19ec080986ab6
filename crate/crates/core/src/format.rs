//! Instance files.
//!
//! An instance is a JSON object with fields in this order:
//!
//! ```text
//! {
//!   "n": 6,
//!   "k": 2,
//!   "a": [4.0, 100.0, 100.0, 100.0, 4.0, 4.0],
//!   "f": { "family": "sqrt_scaled", "omega": 1.0 }
//! }
//! ```
//!
//! `f.family` is one of `sqrt_scaled {omega}`, `power {p}`,
//! `capped_quadratic {c}` or `piecewise_linear {breakpoints, slopes}`.
//! The canonical form is two-space-indented JSON with a trailing newline, as
//! produced by [`to_canonical_json`]; parsing and re-serializing a canonical
//! file reproduces it byte for byte. Item indices elsewhere in the CLI are
//! 1-based.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::ConcaveFunction;
use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub k: usize,
    pub a: Vec<f64>,
    pub f: ConcaveFunction,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.n != file.a.len() {
            return Err(Error::Input(format!("n = {} but the weight vector has {} entries", file.n, file.a.len())));
        }
        Instance::new(file.a, file.k, file.f)
    }
}

impl From<Instance> for InstanceFile {
    fn from(inst: Instance) -> Self {
        Self { n: inst.n(), k: inst.k(), a: inst.a().to_vec(), f: inst.f().clone() }
    }
}

pub fn to_canonical_json(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(inst).expect("instance serializes");
    s.push('\n');
    s
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    Instance::try_from(file)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn write_instance(path: impl AsRef<Path>, inst: &Instance) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_canonical_json(inst)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
