//! Dense complex matrices of dimension ≤ 8 and qubit effects in Bloch form.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const UNIT_NORM_TOL: f64 = 1e-12;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadMatrixData {
                dim,
                len: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = C64::new(v, 0.0);
        }
        m
    }

    /// σ₁
    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    /// σ₂
    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        Self::new(2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]).unwrap()
    }

    /// σ₃
    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    /// `n·σ` for a real 3-vector `n`.
    pub fn bloch_operator(n: [f64; 3]) -> Self {
        let c = |x: f64| C64::new(x, 0.0);
        let i = C64::new(0.0, 1.0);
        Self {
            dim: 2,
            data: vec![c(n[2]), c(n[0]) - i * n[1], c(n[0]) + i * n[1], c(-n[2])],
        }
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut data = Vec::with_capacity(dim * dim);
        for vi in v {
            for vj in v {
                data.push(vi * vj.conj());
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    /// Kronecker product; `self` indexes the slow (most significant) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        data[(i * m + k) * dim + j * m + l] = a * other.get(k, l);
                    }
                }
            }
        }
        Self { dim, data }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_shape("matmul", other)?;
        let n = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Self { dim: n, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape("add", other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape("sub", other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(j, i).conj());
            }
        }
        Self { dim: n, data }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_shape("trace_product", other)?;
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        Ok(acc)
    }

    /// `max |M_ij − conj(M_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape("max_abs_diff", other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Eigenvalues (ascending) of the Hermitian part of the matrix.
    ///
    /// The `n×n` Hermitian matrix `H = A + iB` is embedded as the real
    /// symmetric `2n×2n` matrix `[[A, −B], [B, A]]`, whose spectrum is that of
    /// `H` with every eigenvalue doubled, and diagonalized by cyclic Jacobi
    /// rotations.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let size = 2 * n;
        let mut s = vec![0.0f64; size * size];
        for i in 0..n {
            for j in 0..n {
                let h = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                s[i * size + j] = h.re;
                s[(i + n) * size + j + n] = h.re;
                s[i * size + j + n] = -h.im;
                s[(i + n) * size + j] = h.im;
            }
        }
        let mut evals = jacobi_eigenvalues(&mut s, size);
        evals.sort_by(|a, b| a.total_cmp(b));
        // pairs are degenerate up to rounding
        evals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    }

    fn check_shape(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Shape {
                op,
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = 1e-15 * frob.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// One qubit effect `(𝕀 + γ n·σ)/2` with unit Bloch direction `n` and
/// sharpness `γ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochEffect {
    direction: [f64; 3],
    sharpness: f64,
}

impl BlochEffect {
    pub fn new(direction: [f64; 3], sharpness: f64) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NonUnitDirection { norm });
        }
        if !(0.0..=1.0).contains(&sharpness) {
            return Err(Error::SharpnessOutOfRange(sharpness));
        }
        Ok(Self {
            direction,
            sharpness,
        })
    }

    pub fn sharp(direction: [f64; 3]) -> Result<Self> {
        Self::new(direction, 1.0)
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// The complementary effect `𝕀 − F`.
    pub fn complement(&self) -> Self {
        let [x, y, z] = self.direction;
        Self {
            direction: [-x, -y, -z],
            sharpness: self.sharpness,
        }
    }
}

pub fn effect_matrix(e: &BlochEffect) -> ComplexMatrix {
    let n = ComplexMatrix::bloch_operator(e.direction).scale_real(e.sharpness);
    ComplexMatrix::identity(2).add(&n).unwrap().scale_real(0.5)
}

/// Closed-form `√F = a𝕀 + b n·σ`; the eigenvalues of `F` are `(1 ± γ)/2`.
pub fn effect_sqrt(e: &BlochEffect) -> ComplexMatrix {
    let g = e.sharpness;
    let up = ((1.0 + g) / 2.0).sqrt();
    let down = ((1.0 - g) / 2.0).max(0.0).sqrt();
    let a = 0.5 * (up + down);
    let b = 0.5 * (up - down);
    ComplexMatrix::identity(2)
        .scale_real(a)
        .add(&ComplexMatrix::bloch_operator(e.direction).scale_real(b))
        .unwrap()
}
