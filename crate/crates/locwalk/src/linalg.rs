//! Dense symmetric matrices and their eigendecomposition.
//!
//! Everything downstream works with small matrices (n ≲ 100), so a cyclic
//! Jacobi sweep is both simple and accurate to near machine precision —
//! there is no need for a LAPACK binding. Spectral functions (operator
//! norm, real matrix powers, resolvent traces) are all derived from the
//! decomposition.

use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Symmetric tolerance accepted by [`SymMatrix::from_rows`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense n×n real symmetric matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Eigendecomposition `A = Q diag(values) Qᵀ` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, row-major: `vectors[i*n + j]` is the
    /// i-th component of the j-th eigenvector.
    pub vectors: Vec<f64>,
    n: usize,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = entries[i];
        }
        m
    }

    /// Build from rows, enforcing symmetry to [`SYMMETRY_TOL`] (relative to
    /// the largest entry). The stored matrix is the symmetrized average.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix", "must have at least one row"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix", "rows must form a square matrix"));
        }
        let scale = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(1.0f64, |a, &x| a.max(x.abs()));
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let d = (rows[i][j] - rows[j][i]).abs();
                if d > SYMMETRY_TOL * scale {
                    return Err(Error::invalid(
                        "matrix",
                        format!("not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {d:e}"),
                    ));
                }
                m.data[i * n + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Set entry (i, j) and its mirror (j, i).
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        SymMatrix { n: self.n, data }
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// self + s·I.
    pub fn shift(&self, s: f64) -> SymMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += s;
        }
        m
    }

    /// Largest absolute entry; used for tolerance scaling.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
    }

    /// Quadratic form xᵀ A x.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.data[i * n + j] * x[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// A·x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * x[j]).sum())
            .collect()
    }

    /// Cyclic Jacobi eigendecomposition. Converges to off-diagonal mass
    /// below ~n·ε·‖A‖ in a handful of sweeps for the sizes used here.
    pub fn eigh(&self) -> EigDecomp {
        let n = self.n;
        let mut a = self.data.clone();
        // q starts as identity, accumulates rotations
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }

        let off = |a: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
            s
        };
        let norm = self.max_abs().max(f64::MIN_POSITIVE);
        let tol = (n as f64) * 1e-30 * norm * norm;

        for _sweep in 0..64 {
            if off(&a) <= tol {
                break;
            }
            for p in 0..n {
                for r in (p + 1)..n {
                    let apr = a[p * n + r];
                    if apr.abs() <= 1e-300 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let arr = a[r * n + r];
                    let theta = (arr - app) / (2.0 * apr);
                    // smaller root of t^2 + 2 theta t - 1 = 0 for stability
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akr = a[k * n + r];
                        a[k * n + p] = c * akp - s * akr;
                        a[k * n + r] = s * akp + c * akr;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let ark = a[r * n + k];
                        a[p * n + k] = c * apk - s * ark;
                        a[r * n + k] = s * apk + c * ark;
                    }
                    for k in 0..n {
                        let qkp = q[k * n + p];
                        let qkr = q[k * n + r];
                        q[k * n + p] = c * qkp - s * qkr;
                        q[k * n + r] = s * qkp + c * qkr;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
        let mut vectors = vec![0.0; n * n];
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..n {
                vectors[i * n + newj] = q[i * n + oldj];
            }
        }
        EigDecomp { values, vectors, n }
    }

    pub fn lambda_max(&self) -> f64 {
        *self
            .eigh()
            .values
            .last()
            .expect("eigendecomposition of empty matrix")
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigh().values[0]
    }

    /// Operator (spectral) norm: max |λ_i|.
    pub fn op_norm(&self) -> f64 {
        self.eigh()
            .values
            .iter()
            .fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// Real matrix power A^α by spectral calculus. Requires A ≻ 0 for
    /// non-integer α; α = 0 gives the identity by convention.
    pub fn power(&self, alpha: f64) -> Result<SymMatrix> {
        let eig = self.eigh();
        if (alpha != alpha.trunc() || alpha < 0.0) && eig.values[0] <= 0.0 {
            return Err(Error::invalid(
                "matrix",
                format!(
                    "fractional power requires a positive definite matrix (λ_min = {:e})",
                    eig.values[0]
                ),
            ));
        }
        let powered: Vec<f64> = eig.values.iter().map(|&l| l.powf(alpha)).collect();
        Ok(eig.recompose(&powered))
    }

    /// Clamp eigenvalues below `floor` up to `floor`, erroring if any lies
    /// below `hard_min` (genuine loss of positive semidefiniteness rather
    /// than rounding noise).
    pub fn clamp_psd(&self, floor: f64, hard_min: f64) -> Result<SymMatrix> {
        let eig = self.eigh();
        if eig.values[0] < hard_min {
            return Err(Error::Degenerate(format!(
                "matrix eigenvalue {:e} below PSD floor {:e}",
                eig.values[0], hard_min
            )));
        }
        if eig.values[0] >= floor {
            return Ok(self.clone());
        }
        let vals: Vec<f64> = eig.values.iter().map(|&l| l.max(floor)).collect();
        Ok(eig.recompose(&vals))
    }
}

impl EigDecomp {
    /// Q diag(vals) Qᵀ for the decomposition's eigenbasis.
    pub fn recompose(&self, vals: &[f64]) -> SymMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.vectors[i * n + k] * vals[k] * self.vectors[j * n + k];
                }
                data[i * n + j] = s;
                data[j * n + i] = s;
            }
        }
        SymMatrix { n, data }
    }

    /// Rotate a symmetric matrix into this eigenbasis: Qᵀ H Q.
    pub fn rotate(&self, h: &SymMatrix) -> SymMatrix {
        let n = self.n;
        assert_eq!(h.n, n);
        // tmp = H Q
        let mut tmp = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += h.data[i * n + k] * self.vectors[k * n + j];
                }
                tmp[i * n + j] = s;
            }
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.vectors[k * n + i] * tmp[k * n + j];
                }
                data[i * n + j] = s;
            }
        }
        SymMatrix { n, data }
    }
}

/// Haar-ish random orthogonal matrix via Gram-Schmidt on a Gaussian matrix,
/// returned row-major. Used by test-instance generators.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for j in 0..n {
            for k in 0..j {
                let dot: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                for i in 0..n {
                    cols[j][i] -= dot * cols[k][i];
                }
            }
            let nrm: f64 = cols[j].iter().map(|a| a * a).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                ok = false;
                break;
            }
            for i in 0..n {
                cols[j][i] /= nrm;
            }
        }
        if ok {
            let mut q = vec![0.0; n * n];
            for j in 0..n {
                for i in 0..n {
                    q[i * n + j] = cols[j][i];
                }
            }
            return q;
        }
    }
}

/// Conjugate a symmetric matrix by an orthogonal matrix: Q X Qᵀ.
pub fn conjugate(x: &SymMatrix, q: &[f64]) -> SymMatrix {
    let n = x.dim();
    assert_eq!(q.len(), n * n);
    let mut tmp = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += q[i * n + k] * x.get(k, j);
            }
            tmp[i * n + j] = s;
        }
    }
    let mut out = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                s += tmp[i * n + k] * q[j * n + k];
            }
            out.set_sym(i, j, s);
        }
    }
    out
}
