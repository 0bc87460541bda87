//! Dense square matrices and a cyclic Jacobi eigensolver for the symmetric
//! spectral diagnostics. Dimensions here are the orbit counts (a few
//! hundred at most), so dense storage and Jacobi rotations are plenty.

use crate::error::{Error, Result};
use crate::stats::KahanSum;

/// Row-major dense square matrix of f64.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Build from nested rows; rejects ragged or non-square input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must form a square"));
        }
        Ok(SquareMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn symmetric_part(&self) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        out
    }

    pub fn antisymmetric_part(&self) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, 0.5 * (self.get(i, j) - self.get(j, i)));
            }
        }
        out
    }

    pub fn add(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn entrywise_abs(&self) -> SquareMatrix {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Matrix infinity norm: maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let mut acc = KahanSum::new();
                for v in self.row(i) {
                    acc.add(v.abs());
                }
                acc.value()
            })
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        let mut acc = KahanSum::new();
        for v in &self.data {
            acc.add(v * v);
        }
        acc.value().sqrt()
    }

    /// Frobenius norm of the antisymmetric part relative to the whole.
    pub fn relative_asymmetry(&self) -> f64 {
        let f = self.frobenius();
        if f == 0.0 {
            0.0
        } else {
            self.antisymmetric_part().frobenius() / f
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `x^T A x` for a real vector.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut acc = KahanSum::new();
        for i in 0..self.n {
            for j in 0..self.n {
                acc.add(x[i] * self.get(i, j) * x[j]);
            }
        }
        acc.value()
    }
}

/// Relative asymmetry tolerated by the symmetric eigensolver entry point.
pub const SYMMETRY_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 60;

fn off_diagonal_sq(a: &SquareMatrix) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a.get(i, j);
            s += 2.0 * v * v;
        }
    }
    s
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Iterates
/// until the off-diagonal Frobenius mass falls below `1e-14` relative to
/// the full norm.
pub fn symmetric_eigenvalues(m: &SquareMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    let fro = a.frobenius();
    if fro == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = (JACOBI_OFF_TOL * fro) * (JACOBI_OFF_TOL * fro);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_sq(&a) <= target {
            return Ok((0..n).map(|i| a.get(i, i)).collect());
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    let new_ip = aip - s * (aiq + tau * aip);
                    let new_iq = aiq + s * (aip - tau * aiq);
                    a.set(i, p, new_ip);
                    a.set(p, i, new_ip);
                    a.set(i, q, new_iq);
                    a.set(q, i, new_iq);
                }
            }
        }
    }
    Err(Error::EigenNonConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

/// Largest absolute eigenvalue of a symmetric matrix. Rejects inputs whose
/// relative asymmetry exceeds [`SYMMETRY_TOL`].
pub fn spectral_radius(m: &SquareMatrix) -> Result<f64> {
    let asym = m.relative_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::AsymmetricMatrix { asymmetry: asym });
    }
    let sym = m.symmetric_part();
    Ok(symmetric_eigenvalues(&sym)?
        .into_iter()
        .fold(0.0, |acc, l| acc.max(l.abs())))
}
