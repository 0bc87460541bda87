//! Exact triad arithmetic and orbit-pair incidence counts.
//!
//! A triad for target mode `k` is an ordered pair `(p, q)` with `p + q = k`
//! and all three modes in the truncated lattice. The incidence matrix
//! counts triads between a target orbit and the orbit of the source `p`.

use crate::error::{Error, Result};
use crate::lattice::{LatticeIndex, Mode, Truncation};
use crate::stats::KahanSum;

/// Dense orbit-pair triad count matrix. Row = target orbit, column = orbit
/// of the source mode `p`. Generally not symmetric.
#[derive(Clone, Debug)]
pub struct IncidenceMatrix {
    n_orb: usize,
    data: Vec<u64>,
}

impl IncidenceMatrix {
    fn zeros(n_orb: usize) -> Self {
        IncidenceMatrix {
            n_orb,
            data: vec![0; n_orb * n_orb],
        }
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.n_orb + col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.n_orb..(row + 1) * self.n_orb]
    }

    pub fn row_sum(&self, row: usize) -> u64 {
        self.row(row).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.data.iter().sum()
    }
}

/// Closed-form ordered triad count for the cubic truncation:
/// `prod_i (2N+1 - |k_i|) - 2`.
pub fn triad_count(k: Mode, n: i32) -> Result<u64> {
    if n < 1 {
        return Err(Error::invalid("N must be >= 1"));
    }
    if k.is_zero() || k.linf() > n {
        return Err(Error::invalid(format!(
            "mode {k} is not in the cubic lattice at N={n}"
        )));
    }
    let mut prod: u64 = 1;
    for &c in &k.0 {
        prod *= (2 * n + 1 - c.abs()) as u64;
    }
    Ok(prod - 2)
}

/// Largest triad count over the lattice, attained at the axial modes:
/// `2N(2N+1)^2 - 2`.
pub fn triad_count_max(n: i32) -> u64 {
    let n = n as u64;
    2 * n * (2 * n + 1) * (2 * n + 1) - 2
}

/// Exhaustive ordered-pair count; works for both truncations and serves as
/// the oracle for the closed form.
pub fn triad_count_bruteforce(k: Mode, index: &LatticeIndex) -> u64 {
    let mut count = 0;
    for &p in index.modes() {
        if index.contains(k.sub(p)) {
            count += 1;
        }
    }
    count
}

/// Sum of triad counts over every target mode in the lattice.
pub fn triad_total(index: &LatticeIndex) -> Result<u64> {
    match index.truncation() {
        Truncation::Cube => {
            let mut total = 0u64;
            for &k in index.modes() {
                total += triad_count(k, index.n())?;
            }
            Ok(total)
        }
        Truncation::Sphere => Ok(index
            .modes()
            .iter()
            .map(|&k| triad_count_bruteforce(k, index))
            .sum()),
    }
}

/// Orbit-pair incidence matrix via the equivariance shortcut: fix one
/// representative `k` per target orbit, count source modes per orbit among
/// `{p : k - p in lattice}`, and scale the row by the target orbit size.
pub fn gamma_matrix(index: &LatticeIndex) -> IncidenceMatrix {
    let n_orb = index.orbit_count();
    let mut gamma = IncidenceMatrix::zeros(n_orb);
    for (alpha, orbit) in index.orbits().iter().enumerate() {
        let k = orbit.rep;
        let row = &mut gamma.data[alpha * n_orb..(alpha + 1) * n_orb];
        for (pos, &p) in index.modes().iter().enumerate() {
            if index.contains(k.sub(p)) {
                row[index.orbit_index_of_position(pos)] += orbit.size() as u64;
            }
        }
    }
    gamma
}

/// Full double-loop assembly over every target mode; oracle for
/// [`gamma_matrix`].
pub fn gamma_matrix_bruteforce(index: &LatticeIndex) -> IncidenceMatrix {
    let n_orb = index.orbit_count();
    let mut gamma = IncidenceMatrix::zeros(n_orb);
    for (kpos, &k) in index.modes().iter().enumerate() {
        let alpha = index.orbit_index_of_position(kpos);
        for (ppos, &p) in index.modes().iter().enumerate() {
            if index.contains(k.sub(p)) {
                let beta = index.orbit_index_of_position(ppos);
                gamma.data[alpha * n_orb + beta] += 1;
            }
        }
    }
    gamma
}

/// A row-maximized incidence statistic together with the maximizing orbit.
#[derive(Clone, Copy, Debug)]
pub struct RowMaxSummary {
    pub value: f64,
    pub argmax_orbit: usize,
}

impl RowMaxSummary {
    pub fn argmax_rep(&self, index: &LatticeIndex) -> Mode {
        index.orbits()[self.argmax_orbit].rep
    }

    pub fn argmax_size(&self, index: &LatticeIndex) -> usize {
        index.orbits()[self.argmax_orbit].size()
    }
}

fn row_max<F: Fn(usize) -> f64>(gamma: &IncidenceMatrix, weight: F) -> RowMaxSummary {
    let mut best = RowMaxSummary {
        value: f64::NEG_INFINITY,
        argmax_orbit: 0,
    };
    for alpha in 0..gamma.n_orb() {
        let mut acc = KahanSum::new();
        for (beta, &g) in gamma.row(alpha).iter().enumerate() {
            if g > 0 {
                acc.add((g as f64).sqrt() * weight(beta));
            }
        }
        let v = acc.value();
        if v > best.value {
            best = RowMaxSummary {
                value: v,
                argmax_orbit: alpha,
            };
        }
    }
    best
}

/// `max_alpha sum_beta sqrt(Gamma[alpha][beta])` and the maximizing orbit.
pub fn incidence_sum(gamma: &IncidenceMatrix) -> RowMaxSummary {
    row_max(gamma, |_| 1.0)
}

/// Weighted variant: each source orbit contributes `sqrt(Gamma)/|k_beta|`.
pub fn weighted_incidence(gamma: &IncidenceMatrix, index: &LatticeIndex) -> RowMaxSummary {
    let inv_norm: Vec<f64> = index
        .orbits()
        .iter()
        .map(|o| 1.0 / (o.shell_r as f64).sqrt())
        .collect();
    row_max(gamma, |beta| inv_norm[beta])
}

/// Number of ordered integer pairs `(a, b)` with `a^2 + b^2 = n`, by the
/// divisor-class formula `4 (d_1(n) - d_3(n))`.
pub fn r2(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    // strip factors of 2: they do not change the count
    let mut m = n;
    while m % 2 == 0 {
        m /= 2;
    }
    let mut d1: i64 = 0;
    let mut d3: i64 = 0;
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            match d % 4 {
                1 => d1 += 1,
                3 => d3 += 1,
                _ => {}
            }
            let e = m / d;
            if e != d {
                match e % 4 {
                    1 => d1 += 1,
                    3 => d3 += 1,
                    _ => {}
                }
            }
        }
        d += 1;
    }
    (4 * (d1 - d3)).max(0) as u64
}

/// Exhaustive pair count; oracle for [`r2`].
pub fn r2_bruteforce(n: u64) -> u64 {
    let bound = (n as f64).sqrt() as i64 + 1;
    let mut count = 0;
    for a in -bound..=bound {
        for b in -bound..=bound {
            if (a * a + b * b) as u64 == n {
                count += 1;
            }
        }
    }
    count
}

/// `(1/X) * sum_{n<=X} r2(n)`, the average order that tends to pi.
pub fn r2_average(x: u64) -> f64 {
    let total: u64 = (0..=x).map(r2).sum();
    total as f64 / x as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Truncation;

    #[test]
    fn formula_known_values() {
        assert_eq!(triad_count(Mode::new(1, 0, 0), 1).unwrap(), 16);
        assert_eq!(triad_count(Mode::new(1, 1, 1), 1).unwrap(), 6);
        assert_eq!(triad_count(Mode::new(1, 0, 0), 8).unwrap(), 4622);
        assert_eq!(triad_count_max(1), 16);
        assert_eq!(triad_count_max(8), 4622);
    }

    #[test]
    fn formula_rejects_out_of_lattice() {
        assert!(triad_count(Mode::new(0, 0, 0), 3).is_err());
        assert!(triad_count(Mode::new(4, 0, 0), 3).is_err());
    }

    #[test]
    fn formula_matches_bruteforce_cube() {
        for n in 1..=4 {
            let idx = LatticeIndex::build(n, Truncation::Cube).unwrap();
            for &k in idx.modes() {
                assert_eq!(
                    triad_count(k, n).unwrap(),
                    triad_count_bruteforce(k, &idx),
                    "k={k} N={n}"
                );
            }
        }
    }

    #[test]
    fn triad_totals_match_known_values() {
        let idx3 = LatticeIndex::build(3, Truncation::Cube).unwrap();
        assert_eq!(triad_total(&idx3).unwrap(), 49626);
        let idx1 = LatticeIndex::build(1, Truncation::Cube).unwrap();
        assert_eq!(triad_total(&idx1).unwrap(), 264);
    }

    #[test]
    fn sphere_n1_has_no_triads() {
        let idx = LatticeIndex::build(1, Truncation::Sphere).unwrap();
        assert_eq!(triad_count_bruteforce(Mode::new(1, 0, 0), &idx), 0);
        assert_eq!(triad_total(&idx).unwrap(), 0);
        let gamma = gamma_matrix(&idx);
        assert_eq!(gamma.total(), 0);
        assert_eq!(incidence_sum(&gamma).value, 0.0);
        assert_eq!(weighted_incidence(&gamma, &idx).value, 0.0);
    }

    #[test]
    fn gamma_n1_row_of_axial_orbit() {
        let idx = LatticeIndex::build(1, Truncation::Cube).unwrap();
        let gamma = gamma_matrix(&idx);
        let alpha = idx.orbit_index_of(Mode::new(1, 0, 0)).unwrap();
        assert_eq!(gamma.get(alpha, alpha), 24);
        assert_eq!(gamma.row_sum(alpha), 96);
    }

    #[test]
    fn gamma_row_sums_equal_orbit_size_times_triads() {
        for n in 1..=6 {
            let idx = LatticeIndex::build(n, Truncation::Cube).unwrap();
            let gamma = gamma_matrix(&idx);
            for (alpha, orbit) in idx.orbits().iter().enumerate() {
                let expected = orbit.size() as u64 * triad_count(orbit.rep, n).unwrap();
                assert_eq!(gamma.row_sum(alpha), expected, "orbit {} N={n}", orbit.rep);
            }
        }
    }

    #[test]
    fn gamma_shortcut_matches_bruteforce_both_truncations() {
        for n in 1..=3 {
            for trunc in [Truncation::Cube, Truncation::Sphere] {
                let idx = LatticeIndex::build(n, trunc).unwrap();
                let fast = gamma_matrix(&idx);
                let slow = gamma_matrix_bruteforce(&idx);
                assert_eq!(fast.data, slow.data, "N={n} {trunc}");
            }
        }
    }

    #[test]
    fn sphere_row_sums_match_bruteforce_triads() {
        let idx = LatticeIndex::build(3, Truncation::Sphere).unwrap();
        let gamma = gamma_matrix(&idx);
        for (alpha, orbit) in idx.orbits().iter().enumerate() {
            let expected = orbit.size() as u64 * triad_count_bruteforce(orbit.rep, &idx);
            assert_eq!(gamma.row_sum(alpha), expected);
        }
    }

    #[test]
    fn incidence_sum_n1() {
        let idx = LatticeIndex::build(1, Truncation::Cube).unwrap();
        let gamma = gamma_matrix(&idx);
        let s = incidence_sum(&gamma);
        assert!((s.value - 18.76).abs() < 0.005, "S(1) = {}", s.value);
        // the maximizing row is the planar orbit (1,1,0)
        assert_eq!(s.argmax_rep(&idx), Mode::new(1, 1, 0));
    }

    #[test]
    fn weighted_incidence_n1() {
        let idx = LatticeIndex::build(1, Truncation::Cube).unwrap();
        let gamma = gamma_matrix(&idx);
        let iw = weighted_incidence(&gamma, &idx);
        assert!((iw.value - 14.66).abs() < 0.01, "I_w(1) = {}", iw.value);
    }

    #[test]
    fn incidence_argmax_orbit_at_n3() {
        let idx = LatticeIndex::build(3, Truncation::Cube).unwrap();
        let gamma = gamma_matrix(&idx);
        let s = incidence_sum(&gamma);
        assert_eq!(s.argmax_rep(&idx), Mode::new(3, 2, 1));
        assert_eq!(s.argmax_size(&idx), 48);
    }

    #[test]
    fn r2_small_values() {
        assert_eq!(r2(0), 1);
        assert_eq!(r2(1), 4);
        assert_eq!(r2(2), 4);
        assert_eq!(r2(3), 0);
        assert_eq!(r2(25), 12);
        assert_eq!(r2_bruteforce(25), 12);
    }

    #[test]
    fn r2_matches_bruteforce() {
        for n in 0..=2000 {
            assert_eq!(r2(n), r2_bruteforce(n), "n={n}");
        }
    }

    #[test]
    fn r2_average_tends_to_pi() {
        let avg = r2_average(10_000);
        assert!(
            (avg - std::f64::consts::PI).abs() < 0.02,
            "average {avg} vs pi"
        );
    }
}
