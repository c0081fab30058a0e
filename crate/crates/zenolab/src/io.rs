//! JSON documents for operators and states.
//!
//! Both use `{"dim": n, "re": [...], "im": [...]}`, row-major for operators
//! (`n * n` entries) and plain for states (`n` entries). Loaders validate the
//! requested invariant before handing anything to the numerics.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use zenolab_core::{Complex64, DensityMatrix, Operator, StateVector, Symmetry, ZenoError};

use crate::runner::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixDoc {
    fn entries(&self, expected: usize) -> Result<Vec<Complex64>, ZenoError> {
        if self.dim == 0 {
            return Err(ZenoError::MalformedData("dimension must be positive"));
        }
        for part in [&self.re, &self.im] {
            if part.len() != expected {
                return Err(ZenoError::DimensionMismatch {
                    expected,
                    found: part.len(),
                });
            }
        }
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect())
    }

    pub fn to_operator(&self, symmetry: Symmetry) -> Result<Operator, ZenoError> {
        Operator::new(self.dim, self.entries(self.dim * self.dim)?, symmetry)
    }

    pub fn to_state(&self) -> Result<StateVector, ZenoError> {
        StateVector::new(self.entries(self.dim)?)
    }

    pub fn to_density(&self) -> Result<DensityMatrix, ZenoError> {
        DensityMatrix::new(self.to_operator(Symmetry::General)?)
    }

    pub fn from_operator(op: &Operator) -> Self {
        Self::from_entries(op.dim(), op.data())
    }

    pub fn from_state(psi: &StateVector) -> Self {
        Self::from_entries(psi.dim(), psi.amplitudes())
    }

    fn from_entries(dim: usize, data: &[Complex64]) -> Self {
        MatrixDoc {
            dim,
            re: data.iter().map(|z| z.re).collect(),
            im: data.iter().map(|z| z.im).collect(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::validation("ReadableConfig", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::validation("ConfigSchema", format!("{}: {e}", path.display())))
}

pub fn load_operator(path: &Path, symmetry: Symmetry) -> Result<Operator, RunError> {
    Ok(read_json::<MatrixDoc>(path)?.to_operator(symmetry)?)
}

pub fn load_state(path: &Path) -> Result<StateVector, RunError> {
    Ok(read_json::<MatrixDoc>(path)?.to_state()?)
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable document");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use zenolab_core::models;

    #[test]
    fn operator_round_trip() {
        let h = models::three_level_hamiltonian(1.0, 0.5);
        let doc = MatrixDoc::from_operator(&h);
        let json = to_json_string(&doc);
        let back: MatrixDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_operator(Symmetry::Hermitian).unwrap().data(), h.data());
    }

    #[test]
    fn invariants_checked_on_load() {
        let doc = MatrixDoc {
            dim: 2,
            re: vec![0.0, 1.0, 0.0, 0.0],
            im: vec![0.0; 4],
        };
        assert!(matches!(
            doc.to_operator(Symmetry::Hermitian),
            Err(ZenoError::NonHermitianInput { .. })
        ));
        assert!(doc.to_operator(Symmetry::General).is_ok());
        let short = MatrixDoc {
            dim: 2,
            re: vec![1.0],
            im: vec![0.0],
        };
        assert!(matches!(short.to_state(), Err(ZenoError::DimensionMismatch { .. })));
        let unnormalized = MatrixDoc {
            dim: 2,
            re: vec![1.0, 1.0],
            im: vec![0.0, 0.0],
        };
        assert!(matches!(unnormalized.to_state(), Err(ZenoError::NotNormalized { .. })));
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<MatrixDoc>(r#"{"dim":1,"re":[1],"im":[0],"extra":1}"#);
        assert!(err.is_err());
    }
}
