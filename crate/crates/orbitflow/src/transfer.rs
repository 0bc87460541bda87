//! Orbit-level enstrophy transfer: the state-dependent matrix assembled
//! from triad interactions, its antisymmetric/symmetric split, and the
//! spectral diagnostics of the symmetric stretching part.
//!
//! The bilinear term is the convective pairing
//! `N_k = -i P(k) sum_{p+q=k} (q . u_p) u_q`,
//! and the per-triad contribution to row `alpha`, column `beta` is
//! `|k|^2 Re( conj(u_k) . (-i) P(k)[ (q . u_p) u_q ] ) / |orbit_alpha|`
//! summed over targets `k` in orbit alpha and sources `p` in orbit beta
//! with `q = k - p` retained in the lattice.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{Vec3c, VelocityField, ZERO3};
use crate::error::{Error, Result};
use crate::lattice::{LatticeIndex, Mode};
use crate::matrix::{spectral_radius, SquareMatrix};

/// Precomputed triad pairs for every target mode, grouped by source orbit.
/// Built once per lattice and shared across samples and time steps.
#[derive(Debug)]
pub struct TriadTable {
    /// (p, q) mode positions, grouped contiguously per target mode and,
    /// within a target, per source orbit in ascending orbit order.
    pairs: Vec<[u32; 2]>,
    /// (source orbit, begin, end) ranges into `pairs`.
    runs: Vec<(u32, u32, u32)>,
    /// per target mode: range into `runs`.
    mode_runs: Vec<(u32, u32)>,
    /// per target mode: range into `pairs`.
    mode_pairs: Vec<(u32, u32)>,
}

impl TriadTable {
    pub fn build(index: &LatticeIndex) -> Self {
        let n_modes = index.mode_count();
        let mut pairs = Vec::new();
        let mut runs = Vec::new();
        let mut mode_runs = Vec::with_capacity(n_modes);
        let mut mode_pairs = Vec::with_capacity(n_modes);
        let n = index.n();

        let mut scratch: Vec<(u32, u32, u32)> = Vec::new();
        for k in index.modes() {
            let pair_begin = pairs.len() as u32;
            let run_begin = runs.len() as u32;
            scratch.clear();

            // p ranges over the box [k_i - N, k_i + N] X [-N, N]; membership
            // checks keep only lattice modes (this also covers the sphere)
            let lo = |i: usize| (k.0[i] - n).max(-n);
            let hi = |i: usize| (k.0[i] + n).min(n);
            for p1 in lo(0)..=hi(0) {
                for p2 in lo(1)..=hi(1) {
                    for p3 in lo(2)..=hi(2) {
                        let p = Mode([p1, p2, p3]);
                        if p.is_zero() || p == *k {
                            continue;
                        }
                        let (Some(ppos), Some(qpos)) =
                            (index.position(p), index.position(k.sub(p)))
                        else {
                            continue;
                        };
                        let beta = index.orbit_index_of_position(ppos) as u32;
                        scratch.push((beta, ppos as u32, qpos as u32));
                    }
                }
            }
            scratch.sort_unstable();

            let mut i = 0;
            while i < scratch.len() {
                let beta = scratch[i].0;
                let begin = pairs.len() as u32;
                while i < scratch.len() && scratch[i].0 == beta {
                    pairs.push([scratch[i].1, scratch[i].2]);
                    i += 1;
                }
                runs.push((beta, begin, pairs.len() as u32));
            }
            mode_runs.push((run_begin, runs.len() as u32));
            mode_pairs.push((pair_begin, pairs.len() as u32));
        }

        TriadTable {
            pairs,
            runs,
            mode_runs,
            mode_pairs,
        }
    }

    pub fn total_triads(&self) -> u64 {
        self.pairs.len() as u64
    }

    pub fn triads_of_mode(&self, pos: usize) -> u64 {
        let (b, e) = self.mode_pairs[pos];
        (e - b) as u64
    }
}

/// Raw transfer together with its antisymmetric and symmetric parts.
#[derive(Clone, Debug)]
pub struct TransferMatrices {
    pub raw: SquareMatrix,
    pub antisymmetric: SquareMatrix,
    pub symmetric: SquareMatrix,
}

/// Exact halved sum/difference split `S = A + V`.
pub fn split_transfer(s: &SquareMatrix) -> TransferMatrices {
    TransferMatrices {
        raw: s.clone(),
        antisymmetric: s.antisymmetric_part(),
        symmetric: s.symmetric_part(),
    }
}

/// Spectral diagnostics of the symmetric stretching matrix.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StretchDiagnostics {
    /// Spectral radius of the symmetric part.
    pub rho_v: f64,
    /// Spectral radius of the entrywise absolute value.
    pub rho_abs_v: f64,
    /// Maximum absolute row sum.
    pub inf_norm_v: f64,
    /// `rho_v / N^2`.
    pub nu_c_star: f64,
}

impl StretchDiagnostics {
    pub fn zero() -> Self {
        StretchDiagnostics {
            rho_v: 0.0,
            rho_abs_v: 0.0,
            inf_norm_v: 0.0,
            nu_c_star: 0.0,
        }
    }
}

/// Triad-summation engine bound to one lattice.
#[derive(Debug)]
pub struct TransferOperator {
    index: Arc<LatticeIndex>,
    table: TriadTable,
}

#[inline]
fn dot3(a: &Vec3c, b: &Vec3c) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl TransferOperator {
    pub fn new(index: Arc<LatticeIndex>) -> Self {
        let table = TriadTable::build(&index);
        TransferOperator { index, table }
    }

    pub fn index(&self) -> &Arc<LatticeIndex> {
        &self.index
    }

    pub fn table(&self) -> &TriadTable {
        &self.table
    }

    /// Convective sum for one target mode: accumulate `(q . u_p) u_q` over
    /// the admissible pairs, before the projector and the `-i` factor.
    #[inline]
    fn convective_sum(&self, coeffs: &[Vec3c], pairs: &[[u32; 2]], modes: &[Mode]) -> Vec3c {
        let mut acc = ZERO3;
        for pr in pairs {
            let up = &coeffs[pr[0] as usize];
            let uq = &coeffs[pr[1] as usize];
            let q = modes[pr[1] as usize].0;
            let s = up[0] * q[0] as f64 + up[1] * q[1] as f64 + up[2] * q[2] as f64;
            acc[0] += s * uq[0];
            acc[1] += s * uq[1];
            acc[2] += s * uq[2];
        }
        acc
    }

    #[inline]
    fn project_and_rotate(k: Mode, acc: Vec3c) -> Vec3c {
        let kf = [k.0[0] as f64, k.0[1] as f64, k.0[2] as f64];
        let r = k.norm_sq() as f64;
        let kdot = acc[0] * kf[0] + acc[1] * kf[1] + acc[2] * kf[2];
        let proj = [
            acc[0] - kdot * kf[0] / r,
            acc[1] - kdot * kf[1] / r,
            acc[2] - kdot * kf[2] / r,
        ];
        // multiply by -i
        let mi = Complex64::new(0.0, -1.0);
        [mi * proj[0], mi * proj[1], mi * proj[2]]
    }

    /// Nonlinear term `N_k = -i P(k) sum (q . u_p) u_q` for one target.
    pub fn nonlinear_term(&self, u: &VelocityField, k: Mode) -> Result<Vec3c> {
        let pos = self
            .index
            .position(k)
            .ok_or_else(|| Error::invalid(format!("mode {k} is not in the lattice")))?;
        let (b, e) = self.table.mode_pairs[pos];
        let acc = self.convective_sum(
            u.coeffs(),
            &self.table.pairs[b as usize..e as usize],
            self.index.modes(),
        );
        Ok(Self::project_and_rotate(k, acc))
    }

    /// Nonlinear term for every mode, in mode order.
    pub fn nonlinear_all(&self, u: &VelocityField) -> Vec<Vec3c> {
        let coeffs = u.coeffs();
        let modes = self.index.modes();
        (0..self.index.mode_count())
            .into_par_iter()
            .map(|pos| {
                let (b, e) = self.table.mode_pairs[pos];
                let acc =
                    self.convective_sum(coeffs, &self.table.pairs[b as usize..e as usize], modes);
                Self::project_and_rotate(modes[pos], acc)
            })
            .collect()
    }

    /// Total energy production of the bilinear term,
    /// `sum_k Re(conj(u_k) . N_k)`; zero for the truncated system.
    pub fn energy_production(&self, u: &VelocityField) -> f64 {
        self.weighted_production(u, |_| 1.0)
    }

    /// Total enstrophy production `sum_k |k|^2 Re(conj(u_k) . N_k)`.
    pub fn enstrophy_production(&self, u: &VelocityField) -> f64 {
        self.weighted_production(u, |r| r)
    }

    fn weighted_production(&self, u: &VelocityField, weight: impl Fn(f64) -> f64) -> f64 {
        let nl = self.nonlinear_all(u);
        let mut acc = crate::stats::KahanSum::new();
        for (pos, term) in nl.iter().enumerate() {
            let r = self.index.modes()[pos].norm_sq() as f64;
            let c = u.coeff(pos);
            let z = c[0].conj() * term[0] + c[1].conj() * term[1] + c[2].conj() * term[2];
            acc.add(weight(r) * z.re);
        }
        acc.value()
    }

    /// Assemble the raw orbit-pair transfer matrix. Rows are computed
    /// independently (and in parallel); the summation order within a row
    /// is fixed by the mode and pair ordering, so results do not depend on
    /// the thread count.
    pub fn raw_transfer(&self, u: &VelocityField) -> SquareMatrix {
        let n_orb = self.index.orbit_count();
        let coeffs = u.coeffs();
        let modes = self.index.modes();

        let rows: Vec<Vec<f64>> = (0..n_orb)
            .into_par_iter()
            .map(|alpha| {
                let mut row = vec![0.0f64; n_orb];
                let orbit = &self.index.orbits()[alpha];
                for member in &orbit.members {
                    let t = self.index.position(*member).expect("member in lattice");
                    let k = modes[t];
                    let r = k.norm_sq() as f64;
                    let uk = coeffs[t];
                    let (rb, re) = self.table.mode_runs[t];
                    for run in &self.table.runs[rb as usize..re as usize] {
                        let acc = self.convective_sum(
                            coeffs,
                            &self.table.pairs[run.1 as usize..run.2 as usize],
                            modes,
                        );
                        let term = Self::project_and_rotate(k, acc);
                        let z = uk[0].conj() * term[0]
                            + uk[1].conj() * term[1]
                            + uk[2].conj() * term[2];
                        row[run.0 as usize] += r * z.re;
                    }
                }
                let inv = 1.0 / orbit.size() as f64;
                for v in &mut row {
                    *v *= inv;
                }
                row
            })
            .collect();

        let mut s = SquareMatrix::zeros(n_orb);
        for (alpha, row) in rows.into_iter().enumerate() {
            s.row_mut(alpha).copy_from_slice(&row);
        }
        s
    }

    pub fn transfer_matrices(&self, u: &VelocityField) -> TransferMatrices {
        split_transfer(&self.raw_transfer(u))
    }

    /// Full spectral diagnostics of the stretching part for one field.
    pub fn stretch_diagnostics(&self, u: &VelocityField) -> Result<StretchDiagnostics> {
        let v = self.transfer_matrices(u).symmetric;
        let rho_v = spectral_radius(&v)?;
        let rho_abs_v = spectral_radius(&v.entrywise_abs())?;
        let inf_norm_v = v.inf_norm();
        let n = self.index.n() as f64;
        Ok(StretchDiagnostics {
            rho_v,
            rho_abs_v,
            inf_norm_v,
            nu_c_star: rho_v / (n * n),
        })
    }
}

/// Tableless direct summation of the nonlinear term; oracle for the
/// table-driven path.
pub fn nonlinear_term_direct(u: &VelocityField, k: Mode) -> Result<Vec3c> {
    let index = u.index();
    if !index.contains(k) {
        return Err(Error::invalid(format!("mode {k} is not in the lattice")));
    }
    let mut acc = ZERO3;
    for (ppos, p) in index.modes().iter().enumerate() {
        let q = k.sub(*p);
        let Some(qpos) = index.position(q) else {
            continue;
        };
        let up = u.coeff(ppos);
        let uq = u.coeff(qpos);
        let s = up[0] * q.0[0] as f64 + up[1] * q.0[1] as f64 + up[2] * q.0[2] as f64;
        acc[0] += s * uq[0];
        acc[1] += s * uq[1];
        acc[2] += s * uq[2];
    }
    Ok(TransferOperator::project_and_rotate(k, acc))
}
