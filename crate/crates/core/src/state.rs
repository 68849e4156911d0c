//! Three-qubit density operators, ordered A ⊗ B ⊗ C with C the fastest index.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

pub const TRACE_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const MIN_EIGENVALUE_TOL: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GghzParams {
    alpha: f64,
}

impl GghzParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Debug, Clone)]
pub struct TripartiteState {
    rho: ComplexMatrix,
    label: String,
}

impl TripartiteState {
    /// Wraps an 8×8 matrix without checking physicality; see
    /// [`validate_density`] and [`TripartiteState::validated`].
    pub fn new(rho: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if rho.dim() != 8 {
            return Err(Error::Shape {
                op: "TripartiteState::new",
                left: rho.dim(),
                right: 8,
            });
        }
        Ok(Self {
            rho,
            label: label.into(),
        })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix::identity(8).scale_real(1.0 / 8.0),
            label: "maximally mixed".into(),
        }
    }

    /// The product state `|abc⟩⟨abc|`.
    pub fn computational(a: u8, b: u8, c: u8) -> Self {
        let idx = ((a & 1) as usize) << 2 | ((b & 1) as usize) << 1 | (c & 1) as usize;
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[idx] = C64::new(1.0, 0.0);
        Self {
            rho: ComplexMatrix::outer(&v),
            label: format!("|{a}{b}{c}>"),
        }
    }

    pub fn validated(self) -> Result<Self> {
        let report = validate_density(&self);
        if report.passed {
            Ok(self)
        } else {
            Err(Error::InvalidState(report.to_string()))
        }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `Re tr(ρ O)`.
    pub fn expectation(&self, observable: &ComplexMatrix) -> Result<f64> {
        Ok(self.rho.trace_product(observable)?.re)
    }

    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).unwrap().re
    }
}

/// `cos α|000⟩ + sin α|111⟩` as a rank-one density matrix.
pub fn build_gghz(p: GghzParams) -> TripartiteState {
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[0] = C64::new(p.alpha.cos(), 0.0);
    v[7] = C64::new(p.alpha.sin(), 0.0);
    TripartiteState {
        rho: ComplexMatrix::outer(&v),
        label: format!("GGHZ(alpha={})", p.alpha),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub trace_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

impl std::fmt::Display for DensityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "|tr - 1| = {:.3e}, hermiticity deviation = {:.3e}, min eigenvalue = {:.3e} ({})",
            self.trace_deviation,
            self.hermiticity_deviation,
            self.min_eigenvalue,
            if self.passed { "pass" } else { "fail" }
        )
    }
}

pub fn validate_density(s: &TripartiteState) -> DensityReport {
    let tr = s.rho.trace();
    let trace_deviation = (tr - C64::new(1.0, 0.0)).norm();
    let hermiticity_deviation = s.rho.hermiticity_deviation();
    let min_eigenvalue = s
        .rho
        .hermitian_eigenvalues()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let passed = trace_deviation <= TRACE_TOL
        && hermiticity_deviation <= HERMITIAN_TOL
        && min_eigenvalue >= MIN_EIGENVALUE_TOL;
    DensityReport {
        trace_deviation,
        hermiticity_deviation,
        min_eigenvalue,
        passed,
    }
}
