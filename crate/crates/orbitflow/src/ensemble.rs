//! Random divergence-free velocity fields on the truncated lattice.
//!
//! Independent complex Gaussian draws live on the half-lattice (first
//! nonzero coordinate positive); the other half is forced by the reality
//! constraint. Each draw is projected onto the plane orthogonal to its
//! wavevector, then the whole field is rescaled to unit kinetic energy
//! (except the Sobolev-envelope ensemble, whose deterministic amplitude
//! decay is the point).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{GroupElement, LatticeIndex, Mode};
use crate::rng::{field_lane, SampleRng};
use crate::stats::KahanSum;

pub type Vec3c = [Complex64; 3];

pub const ZERO3: Vec3c = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(0.0, 0.0),
];

/// Ensemble families for the random initial data.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EnsembleKind {
    /// Flat spectrum, unit total energy.
    Isotropic,
    /// Spectrum `E[|u_k|^2] ~ |k|^(-11/3)`, unit total energy.
    Kolmogorov,
    /// Deterministic envelope `|u_k| = M |k|^(-s)` with random phases and
    /// tangent directions; not renormalized.
    Sobolev,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleKind::Isotropic => write!(f, "isotropic"),
            EnsembleKind::Kolmogorov => write!(f, "kolmogorov"),
            EnsembleKind::Sobolev => write!(f, "sobolev"),
        }
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isotropic" => Ok(EnsembleKind::Isotropic),
            "kolmogorov" => Ok(EnsembleKind::Kolmogorov),
            "sobolev" => Ok(EnsembleKind::Sobolev),
            other => Err(Error::invalid(format!(
                "unknown ensemble '{other}' (expected isotropic|kolmogorov|sobolev)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// Sobolev decay exponent; unused otherwise.
    pub s: f64,
    /// Sobolev envelope constant; unused otherwise.
    pub m: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn isotropic(seed: u64) -> Self {
        EnsembleSpec {
            kind: EnsembleKind::Isotropic,
            s: 0.0,
            m: 0.0,
            seed,
        }
    }

    pub fn kolmogorov(seed: u64) -> Self {
        EnsembleSpec {
            kind: EnsembleKind::Kolmogorov,
            s: 0.0,
            m: 0.0,
            seed,
        }
    }

    pub fn sobolev(s: f64, m: f64, seed: u64) -> Result<Self> {
        if !(s > 1.5) {
            return Err(Error::invalid(format!(
                "sobolev exponent must satisfy s > 3/2, got {s}"
            )));
        }
        if !(m > 0.0) {
            return Err(Error::invalid("sobolev envelope constant must be positive"));
        }
        Ok(EnsembleSpec {
            kind: EnsembleKind::Sobolev,
            s,
            m,
            seed,
        })
    }
}

/// Fourier-side projection onto the plane orthogonal to `k`:
/// `v - k (k.v) / |k|^2`.
pub fn leray_project(k: Mode, v: Vec3c) -> Result<Vec3c> {
    if k.is_zero() {
        return Err(Error::invalid("leray projector undefined at k = 0"));
    }
    let kf = [k.0[0] as f64, k.0[1] as f64, k.0[2] as f64];
    let r = k.norm_sq() as f64;
    let kdot = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
    Ok([
        v[0] - kdot * kf[0] / r,
        v[1] - kdot * kf[1] / r,
        v[2] - kdot * kf[2] / r,
    ])
}

/// Complex coefficients on every lattice mode, satisfying the reality and
/// incompressibility constraints.
#[derive(Clone, Debug)]
pub struct VelocityField {
    index: Arc<LatticeIndex>,
    coeffs: Vec<Vec3c>,
}

impl VelocityField {
    pub fn zero(index: Arc<LatticeIndex>) -> Self {
        let n = index.mode_count();
        VelocityField {
            index,
            coeffs: vec![ZERO3; n],
        }
    }

    pub fn from_coeffs(index: Arc<LatticeIndex>, coeffs: Vec<Vec3c>) -> Result<Self> {
        if coeffs.len() != index.mode_count() {
            return Err(Error::invalid("coefficient count must match mode count"));
        }
        Ok(VelocityField { index, coeffs })
    }

    pub fn index(&self) -> &Arc<LatticeIndex> {
        &self.index
    }

    #[inline]
    pub fn coeff(&self, pos: usize) -> Vec3c {
        self.coeffs[pos]
    }

    pub fn coeffs(&self) -> &[Vec3c] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Vec3c] {
        &mut self.coeffs
    }

    /// Total kinetic energy `0.5 * sum |u_k|^2`.
    pub fn energy(&self) -> f64 {
        let mut acc = KahanSum::new();
        for c in &self.coeffs {
            acc.add(c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr());
        }
        0.5 * acc.value()
    }

    /// Total enstrophy `0.5 * sum |k|^2 |u_k|^2`.
    pub fn enstrophy(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (pos, c) in self.coeffs.iter().enumerate() {
            let r = self.index.modes()[pos].norm_sq() as f64;
            acc.add(r * (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr()));
        }
        0.5 * acc.value()
    }

    /// Orbit-averaged enstrophy: `Z_a = sum_{k in orbit} |k|^2 |u_k|^2 / (2 |orbit|)`.
    /// Satisfies `sum_a |orbit_a| Z_a = enstrophy`.
    pub fn orbit_enstrophy(&self) -> Vec<f64> {
        let mut acc = vec![KahanSum::new(); self.index.orbit_count()];
        for (pos, c) in self.coeffs.iter().enumerate() {
            let r = self.index.modes()[pos].norm_sq() as f64;
            let oi = self.index.orbit_index_of_position(pos);
            acc[oi].add(r * (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr()));
        }
        self.index
            .orbits()
            .iter()
            .zip(acc)
            .map(|(o, a)| 0.5 * a.value() / o.size() as f64)
            .collect()
    }

    /// Largest violation of the reality constraint `u_{-k} = conj(u_k)`.
    pub fn reality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (pos, m) in self.index.modes().iter().enumerate() {
            let mirror = self.index.position(m.neg()).expect("lattice is symmetric");
            let a = self.coeffs[pos];
            let b = self.coeffs[mirror];
            for c in 0..3 {
                worst = worst.max((a[c] - b[c].conj()).norm());
            }
        }
        worst
    }

    /// Largest normalized divergence `|k . u_k| / (|k| |u_k|)`.
    pub fn max_divergence(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (pos, m) in self.index.modes().iter().enumerate() {
            let c = self.coeffs[pos];
            let mag = (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr()).sqrt();
            if mag == 0.0 {
                continue;
            }
            let kf = [m.0[0] as f64, m.0[1] as f64, m.0[2] as f64];
            let kdot = c[0] * kf[0] + c[1] * kf[1] + c[2] * kf[2];
            let knorm = (m.norm_sq() as f64).sqrt();
            worst = worst.max(kdot.norm() / (knorm * mag));
        }
        worst
    }

    /// Symmetry-transformed field: the coefficient at `g k` is the signed
    /// permutation `g` applied to the coefficient at `k`.
    pub fn transformed(&self, g: &GroupElement) -> VelocityField {
        let mut coeffs = vec![ZERO3; self.coeffs.len()];
        for (pos, m) in self.index.modes().iter().enumerate() {
            let target = self
                .index
                .position(g.apply(*m))
                .expect("group action preserves the lattice");
            coeffs[target] = g.apply_components(self.coeffs[pos]);
        }
        VelocityField {
            index: self.index.clone(),
            coeffs,
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.coeffs {
            for comp in c.iter_mut() {
                *comp *= factor;
            }
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Deterministic orthonormal basis of the plane orthogonal to `k`.
fn tangent_basis(k: Mode) -> ([f64; 3], [f64; 3]) {
    let kf = [k.0[0] as f64, k.0[1] as f64, k.0[2] as f64];
    let knorm = (k.norm_sq() as f64).sqrt();
    let khat = [kf[0] / knorm, kf[1] / knorm, kf[2] / knorm];
    // cross with the axis least aligned with k
    let axis = if k.0[1] == 0 && k.0[2] == 0 {
        [0.0, 1.0, 0.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let cross = [
        khat[1] * axis[2] - khat[2] * axis[1],
        khat[2] * axis[0] - khat[0] * axis[2],
        khat[0] * axis[1] - khat[1] * axis[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let e1 = [cross[0] / cn, cross[1] / cn, cross[2] / cn];
    let e2 = [
        khat[1] * e1[2] - khat[2] * e1[1],
        khat[2] * e1[0] - khat[0] * e1[2],
        khat[0] * e1[1] - khat[1] * e1[0],
    ];
    (e1, e2)
}

/// Draw one field. Deterministic in `(spec.seed, sample_id)` regardless of
/// evaluation order or thread count.
pub fn sample_field(
    spec: &EnsembleSpec,
    index: &Arc<LatticeIndex>,
    sample_id: u64,
) -> VelocityField {
    // a zero-energy draw has probability zero, but stay total: retry with
    // the sample id offset into a disjoint stream
    for attempt in 0..64u64 {
        let rng = SampleRng::new(spec.seed, sample_id.wrapping_add(attempt << 32));
        let field = draw_once(spec, index, &rng);
        if let Some(f) = field {
            return f;
        }
    }
    unreachable!("zero-energy draws cannot persist across retries");
}

fn draw_once(spec: &EnsembleSpec, index: &Arc<LatticeIndex>, rng: &SampleRng) -> Option<VelocityField> {
    let n_modes = index.mode_count();
    let mut coeffs = vec![ZERO3; n_modes];

    for (pos, &k) in index.modes().iter().enumerate() {
        if !k.is_half_lattice_rep() {
            continue;
        }
        let r = k.norm_sq() as f64;
        let v: Vec3c = match spec.kind {
            EnsembleKind::Isotropic | EnsembleKind::Kolmogorov => {
                let mut v = ZERO3;
                for c in 0..3 {
                    let (re, im) = rng.gaussian_pair(field_lane(pos, c, 0));
                    v[c as usize] = Complex64::new(re, im);
                }
                if spec.kind == EnsembleKind::Kolmogorov {
                    // amplitude |k|^(-11/6) gives the |k|^(-11/3) spectrum
                    let w = r.powf(-11.0 / 12.0);
                    for comp in v.iter_mut() {
                        *comp *= w;
                    }
                }
                leray_project(k, v).expect("k is nonzero")
            }
            EnsembleKind::Sobolev => {
                let theta = std::f64::consts::TAU * rng.uniform(field_lane(pos, 0, 0));
                let phase = std::f64::consts::TAU * rng.uniform(field_lane(pos, 0, 1));
                let (e1, e2) = tangent_basis(k);
                let amp = spec.m * r.powf(-spec.s / 2.0);
                let z = Complex64::from_polar(amp, phase);
                [
                    z * (theta.cos() * e1[0] + theta.sin() * e2[0]),
                    z * (theta.cos() * e1[1] + theta.sin() * e2[1]),
                    z * (theta.cos() * e1[2] + theta.sin() * e2[2]),
                ]
            }
        };
        let mirror = index.position(k.neg()).expect("lattice is symmetric");
        coeffs[pos] = v;
        coeffs[mirror] = [v[0].conj(), v[1].conj(), v[2].conj()];
    }

    let mut field = VelocityField {
        index: index.clone(),
        coeffs,
    };
    if spec.kind != EnsembleKind::Sobolev {
        let e = field.energy();
        if !(e > 0.0) {
            return None;
        }
        field.scale(1.0 / e.sqrt());
    }
    Some(field)
}
