//! JSON state files: `{"dim": d, "re": [[..]], "im": [[..]]}`, row-major.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::hermitian::{ComplexMatrix, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        let row = |i: usize, f: fn(C64) -> f64| (0..n).map(|j| f(rho.get(i, j))).collect();
        Self {
            dim: n,
            re: (0..n).map(|i| row(i, |z| z.re)).collect(),
            im: (0..n).map(|i| row(i, |z| z.im)).collect(),
        }
    }

    pub fn into_state(self) -> Result<DensityMatrix> {
        let n = self.dim;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !square(&self.re) || !square(&self.im) {
            return Err(Error::Parse(format!("re/im must be {n}x{n} arrays with dim > 0")));
        }
        if self.re.iter().chain(&self.im).flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite entry".into()));
        }
        DensityMatrix::new(ComplexMatrix::from_fn(n, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(rho)).expect("state file serializes")
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_state()
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    state_from_json(&fs::read_to_string(path)?)
}

pub fn write_state(rho: &DensityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut text = state_to_json(rho);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
