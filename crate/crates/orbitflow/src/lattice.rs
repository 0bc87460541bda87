//! Truncated Fourier lattice, the 48-element signed-permutation symmetry
//! group, and its orbit/shell decomposition.
//!
//! The lattice is the set of nonzero integer wavevectors `k` with either
//! `|k|_inf <= N` (cube) or `|k| <= N` (sphere). The full octahedral group
//! acts by signed coordinate permutations; orbits collect modes that are
//! equivalent under that action and shells collect modes of equal `|k|^2`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// A nonzero integer wavevector.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Mode(pub [i32; 3]);

impl Mode {
    pub fn new(k1: i32, k2: i32, k3: i32) -> Self {
        Mode([k1, k2, k3])
    }

    /// Squared Euclidean norm `k1^2 + k2^2 + k3^2`.
    pub fn norm_sq(&self) -> i64 {
        let [a, b, c] = self.0;
        a as i64 * a as i64 + b as i64 * b as i64 + c as i64 * c as i64
    }

    /// Max norm `max(|k1|, |k2|, |k3|)`.
    pub fn linf(&self) -> i32 {
        self.0.iter().map(|k| k.abs()).max().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    pub fn neg(&self) -> Mode {
        Mode([-self.0[0], -self.0[1], -self.0[2]])
    }

    pub fn sub(&self, other: Mode) -> Mode {
        Mode([
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ])
    }

    /// True when this mode carries the independent random draw under the
    /// half-lattice convention: the first nonzero coordinate is positive.
    pub fn is_half_lattice_rep(&self) -> bool {
        for &c in &self.0 {
            if c > 0 {
                return true;
            }
            if c < 0 {
                return false;
            }
        }
        false
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// One signed coordinate permutation: `(g k)_i = signs[i] * k[perm[i]]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GroupElement {
    perm: [usize; 3],
    signs: [i8; 3],
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        perm: [0, 1, 2],
        signs: [1, 1, 1],
    };

    pub fn new(perm: [usize; 3], signs: [i8; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p] {
                return Err(Error::invalid("perm must be a permutation of {0,1,2}"));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("signs must be +1 or -1"));
        }
        Ok(GroupElement { perm, signs })
    }

    pub fn apply(&self, k: Mode) -> Mode {
        Mode([
            self.signs[0] as i32 * k.0[self.perm[0]],
            self.signs[1] as i32 * k.0[self.perm[1]],
            self.signs[2] as i32 * k.0[self.perm[2]],
        ])
    }

    /// Same signed permutation acting on a 3-vector of arbitrary scalars.
    pub fn apply_components<T>(&self, v: [T; 3]) -> [T; 3]
    where
        T: Copy + std::ops::Neg<Output = T>,
    {
        let pick = |i: usize| {
            let x = v[self.perm[i]];
            if self.signs[i] < 0 {
                -x
            } else {
                x
            }
        };
        [pick(0), pick(1), pick(2)]
    }

    /// Composition `(self * other)(k) = self(other(k))`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let mut perm = [0usize; 3];
        let mut signs = [1i8; 3];
        for i in 0..3 {
            perm[i] = other.perm[self.perm[i]];
            signs[i] = self.signs[i] * other.signs[self.perm[i]];
        }
        GroupElement { perm, signs }
    }

    pub fn inverse(&self) -> GroupElement {
        let mut perm = [0usize; 3];
        let mut signs = [1i8; 3];
        for i in 0..3 {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        GroupElement { perm, signs }
    }
}

/// All 48 signed coordinate permutations, in a fixed deterministic order.
pub fn octahedral_group() -> &'static [GroupElement; 48] {
    static GROUP: OnceLock<[GroupElement; 48]> = OnceLock::new();
    GROUP.get_or_init(|| {
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut out = [GroupElement::IDENTITY; 48];
        let mut idx = 0;
        for perm in PERMS {
            for bits in 0..8u8 {
                let sign = |b: u8| if bits & (1 << b) != 0 { -1i8 } else { 1i8 };
                out[idx] = GroupElement {
                    perm,
                    signs: [sign(0), sign(1), sign(2)],
                };
                idx += 1;
            }
        }
        out
    })
}

/// Canonical orbit representative: absolute coordinate values sorted in
/// descending order, all entries nonnegative. Every member of an orbit maps
/// to the same representative.
pub fn canonical_rep(k: Mode) -> Mode {
    let mut abs = [k.0[0].abs(), k.0[1].abs(), k.0[2].abs()];
    abs.sort_unstable_by(|a, b| b.cmp(a));
    Mode(abs)
}

/// Truncation geometry of the lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    Cube,
    Sphere,
}

impl Truncation {
    fn admits(&self, k: Mode, n: i32) -> bool {
        if k.is_zero() {
            return false;
        }
        match self {
            Truncation::Cube => k.linf() <= n,
            Truncation::Sphere => k.norm_sq() <= (n as i64) * (n as i64),
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Cube => write!(f, "cube"),
            Truncation::Sphere => write!(f, "sphere"),
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cube" => Ok(Truncation::Cube),
            "sphere" => Ok(Truncation::Sphere),
            other => Err(Error::invalid(format!(
                "unknown truncation '{other}' (expected cube|sphere)"
            ))),
        }
    }
}

/// One symmetry orbit: all lattice modes reachable from each other by
/// signed coordinate permutations. Every member shares the same `|k|^2`.
#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub rep: Mode,
    pub members: Vec<Mode>,
    pub shell_r: i64,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

const ABSENT: u32 = u32::MAX;

/// The truncated lattice together with its orbit and shell decomposition
/// and O(1) mode-position lookup.
///
/// Modes are stored in lexicographic order of `(k1, k2, k3)`; orbits are
/// ordered by `(shell radius, representative)`. Both orderings are stable
/// across runs and platforms.
#[derive(Clone, Debug)]
pub struct LatticeIndex {
    n: i32,
    truncation: Truncation,
    modes: Vec<Mode>,
    orbits: Vec<Orbit>,
    mode_orbit: Vec<u32>,
    shells: BTreeMap<i64, Vec<u32>>,
    lookup: Vec<u32>,
    side: i32,
}

impl LatticeIndex {
    /// Enumerate the truncated lattice for resolution `n >= 1`.
    pub fn build(n: i32, truncation: Truncation) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid(format!("resolution N must be >= 1, got {n}")));
        }
        let mut modes = Vec::new();
        for k1 in -n..=n {
            for k2 in -n..=n {
                for k3 in -n..=n {
                    let m = Mode([k1, k2, k3]);
                    if truncation.admits(m, n) {
                        modes.push(m);
                    }
                }
            }
        }
        // the triple loop above already emits lexicographic order
        debug_assert!(modes.windows(2).all(|w| w[0] < w[1]));

        let side = 2 * n + 1;
        let mut lookup = vec![ABSENT; (side as usize).pow(3)];
        for (pos, m) in modes.iter().enumerate() {
            lookup[Self::flat(side, n, *m)] = pos as u32;
        }

        // group into orbits keyed by (shell radius, canonical representative)
        let mut grouped: BTreeMap<(i64, Mode), Vec<Mode>> = BTreeMap::new();
        for &m in &modes {
            grouped
                .entry((m.norm_sq(), canonical_rep(m)))
                .or_default()
                .push(m);
        }
        let orbits: Vec<Orbit> = grouped
            .into_iter()
            .map(|((r, rep), members)| {
                debug_assert!(48 % members.len() == 0);
                debug_assert!(members.contains(&rep));
                Orbit {
                    rep,
                    members,
                    shell_r: r,
                }
            })
            .collect();

        let mut mode_orbit = vec![0u32; modes.len()];
        for (oi, orbit) in orbits.iter().enumerate() {
            for m in &orbit.members {
                let pos = lookup[Self::flat(side, n, *m)];
                mode_orbit[pos as usize] = oi as u32;
            }
        }

        let mut shells: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        for (pos, m) in modes.iter().enumerate() {
            shells.entry(m.norm_sq()).or_default().push(pos as u32);
        }

        Ok(LatticeIndex {
            n,
            truncation,
            modes,
            orbits,
            mode_orbit,
            shells,
            lookup,
            side,
        })
    }

    fn flat(side: i32, n: i32, m: Mode) -> usize {
        let [a, b, c] = m.0;
        (((a + n) * side + (b + n)) * side + (c + n)) as usize
    }

    pub fn n(&self) -> i32 {
        self.n
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn shell_count(&self) -> usize {
        self.shells.len()
    }

    /// Represented squared radii, ascending.
    pub fn shell_radii(&self) -> impl Iterator<Item = i64> + '_ {
        self.shells.keys().copied()
    }

    /// Mode positions in the shell of squared radius `r`.
    pub fn shell_modes(&self, r: i64) -> Option<&[u32]> {
        self.shells.get(&r).map(|v| v.as_slice())
    }

    pub fn contains(&self, m: Mode) -> bool {
        self.position(m).is_some()
    }

    /// Position of `m` in the lexicographic mode ordering, if present.
    pub fn position(&self, m: Mode) -> Option<usize> {
        if m.linf() > self.n {
            return None;
        }
        let v = self.lookup[Self::flat(self.side, self.n, m)];
        (v != ABSENT).then_some(v as usize)
    }

    pub fn orbit_index_of_position(&self, pos: usize) -> usize {
        self.mode_orbit[pos] as usize
    }

    pub fn orbit_index_of(&self, m: Mode) -> Option<usize> {
        self.position(m).map(|p| self.orbit_index_of_position(p))
    }

    /// Multiset of orbit sizes, in orbit order.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.size()).collect()
    }

    /// Number of orbits in shell `r` counted by the fixed-point average
    /// over the 48 group elements. Must equal direct enumeration.
    pub fn burnside_orbit_count(&self, r: i64) -> Result<usize> {
        let shell = self
            .shells
            .get(&r)
            .ok_or_else(|| Error::invalid(format!("shell radius {r} is not represented")))?;
        let mut fixed_total: u64 = 0;
        for g in octahedral_group() {
            for &pos in shell {
                let m = self.modes[pos as usize];
                if g.apply(m) == m {
                    fixed_total += 1;
                }
            }
        }
        debug_assert_eq!(fixed_total % 48, 0);
        Ok((fixed_total / 48) as usize)
    }

    /// Orbit count summed over all shells by the fixed-point formula.
    pub fn burnside_total(&self) -> Result<usize> {
        let mut total = 0;
        for r in self.shell_radii().collect::<Vec<_>>() {
            total += self.burnside_orbit_count(r)?;
        }
        Ok(total)
    }

    /// Direct orbit count in shell `r`.
    pub fn orbit_count_in_shell(&self, r: i64) -> usize {
        self.orbits.iter().filter(|o| o.shell_r == r).count()
    }

    /// Positions of the members of orbit `oi`, ascending.
    pub fn orbit_member_positions(&self, oi: usize) -> Vec<usize> {
        self.orbits[oi]
            .members
            .iter()
            .map(|m| self.position(*m).expect("orbit member in lattice"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn group_has_48_distinct_elements() {
        let g = octahedral_group();
        for i in 0..48 {
            for j in (i + 1)..48 {
                assert_ne!(g[i], g[j]);
            }
        }
    }

    #[test]
    fn group_closure_and_inverses() {
        let g = octahedral_group();
        for a in g.iter() {
            assert!(g.contains(&a.inverse()));
            assert_eq!(a.compose(&a.inverse()), GroupElement::IDENTITY);
            for b in g.iter() {
                assert!(g.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn apply_preserves_norms() {
        let k = Mode::new(3, -2, 1);
        for g in octahedral_group() {
            let gk = g.apply(k);
            assert_eq!(gk.norm_sq(), k.norm_sq());
            assert_eq!(gk.linf(), k.linf());
        }
    }

    #[test]
    fn apply_identity_and_sign_convention() {
        assert_eq!(GroupElement::IDENTITY.apply(Mode::new(1, 2, 3)), Mode::new(1, 2, 3));
        // convention: result_i = signs_i * k_{perm(i)}
        let g = GroupElement::new([1, 0, 2], [-1, 1, 1]).unwrap();
        assert_eq!(g.apply(Mode::new(1, 0, 0)), Mode::new(0, 1, 0));
        assert_eq!(g.apply(Mode::new(0, 1, 0)), Mode::new(-1, 0, 0));
        // the swap that sends e1 to -e2 puts the flip on output slot 2
        let h = GroupElement::new([1, 0, 2], [1, -1, 1]).unwrap();
        assert_eq!(h.apply(Mode::new(1, 0, 0)), Mode::new(0, -1, 0));
    }

    #[test]
    fn generic_mode_has_full_orbit() {
        let k = Mode::new(3, 2, 1);
        let mut images: Vec<Mode> = octahedral_group().iter().map(|g| g.apply(k)).collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 48);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let g = octahedral_group();
        let k = Mode::new(2, -1, 3);
        for a in g.iter().step_by(5) {
            for b in g.iter().step_by(7) {
                assert_eq!(a.compose(b).apply(k), a.apply(b.apply(k)));
            }
        }
    }

    #[test]
    fn cube_n1_counts() {
        let idx = LatticeIndex::build(1, Truncation::Cube).unwrap();
        assert_eq!(idx.mode_count(), 26);
        assert_eq!(idx.orbit_count(), 3);
        assert_eq!(idx.shell_count(), 3);
        let mut sizes = idx.orbit_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![6, 8, 12]);
    }

    #[test]
    fn cube_n8_counts() {
        let idx = LatticeIndex::build(8, Truncation::Cube).unwrap();
        assert_eq!(idx.mode_count(), 4912);
        assert_eq!(idx.orbit_count(), 164);
        assert_eq!(idx.shell_count(), 115);
    }

    #[test]
    fn sphere_n1_is_six_axial_modes() {
        let idx = LatticeIndex::build(1, Truncation::Sphere).unwrap();
        assert_eq!(idx.mode_count(), 6);
        assert_eq!(idx.orbit_count(), 1);
        let mut ms: Vec<Mode> = idx.modes().to_vec();
        ms.sort();
        assert_eq!(
            ms,
            vec![
                Mode::new(-1, 0, 0),
                Mode::new(0, -1, 0),
                Mode::new(0, 0, -1),
                Mode::new(0, 0, 1),
                Mode::new(0, 1, 0),
                Mode::new(1, 0, 0),
            ]
        );
    }

    #[test]
    fn rejects_n_below_one() {
        assert!(LatticeIndex::build(0, Truncation::Cube).is_err());
        assert!(LatticeIndex::build(-3, Truncation::Sphere).is_err());
    }

    #[test]
    fn partitions_are_consistent() {
        for n in 1..=6 {
            let idx = LatticeIndex::build(n, Truncation::Cube).unwrap();
            let total: usize = idx.orbit_sizes().iter().sum();
            assert_eq!(total, ((2 * n + 1).pow(3) - 1) as usize);
            let shell_total: usize = idx
                .shell_radii()
                .map(|r| idx.shell_modes(r).unwrap().len())
                .sum();
            assert_eq!(shell_total, idx.mode_count());
            for s in idx.orbit_sizes() {
                assert_eq!(48 % s, 0);
            }
        }
    }

    #[test]
    fn orbit_members_share_shell_and_abs_multiset() {
        let idx = LatticeIndex::build(4, Truncation::Cube).unwrap();
        for o in idx.orbits() {
            for m in &o.members {
                assert_eq!(m.norm_sq(), o.shell_r);
                assert_eq!(canonical_rep(*m), o.rep);
            }
        }
    }

    #[test]
    fn burnside_equals_enumeration_per_shell() {
        for n in 1..=5 {
            let idx = LatticeIndex::build(n, Truncation::Cube).unwrap();
            for r in idx.shell_radii().collect::<Vec<_>>() {
                assert_eq!(
                    idx.burnside_orbit_count(r).unwrap(),
                    idx.orbit_count_in_shell(r),
                    "shell {r} at N={n}"
                );
            }
        }
    }

    #[test]
    fn burnside_totals_match_known_counts() {
        let expected = [3, 9, 19, 34, 55];
        for (n, want) in (1..=5).zip(expected) {
            let idx = LatticeIndex::build(n, Truncation::Cube).unwrap();
            assert_eq!(idx.burnside_total().unwrap(), want);
            assert_eq!(idx.orbit_count(), want);
        }
    }

    #[test]
    fn burnside_rejects_unrepresented_radius() {
        let idx = LatticeIndex::build(1, Truncation::Cube).unwrap();
        assert!(idx.burnside_orbit_count(7).is_err());
    }

    #[test]
    fn sphere_subset_of_cube() {
        for n in 1..=5 {
            let sph = LatticeIndex::build(n, Truncation::Sphere).unwrap();
            let cube = LatticeIndex::build(n, Truncation::Cube).unwrap();
            for m in sph.modes() {
                assert!(cube.contains(*m));
            }
        }
    }

    #[test]
    fn half_lattice_splits_modes_in_two() {
        let idx = LatticeIndex::build(3, Truncation::Cube).unwrap();
        let reps = idx.modes().iter().filter(|m| m.is_half_lattice_rep()).count();
        assert_eq!(reps * 2, idx.mode_count());
        for m in idx.modes() {
            assert_ne!(m.is_half_lattice_rep(), m.neg().is_half_lattice_rep());
        }
    }

    proptest! {
        #[test]
        fn canonicalization_idempotent(k1 in -8i32..=8, k2 in -8i32..=8, k3 in -8i32..=8) {
            prop_assume!((k1, k2, k3) != (0, 0, 0));
            let m = Mode::new(k1, k2, k3);
            let rep = canonical_rep(m);
            prop_assert_eq!(canonical_rep(rep), rep);
            // every group image canonicalizes to the same representative
            for g in octahedral_group().iter().step_by(7) {
                prop_assert_eq!(canonical_rep(g.apply(m)), rep);
            }
        }

        #[test]
        fn position_lookup_roundtrip(n in 1i32..=5) {
            let idx = LatticeIndex::build(n, Truncation::Cube).unwrap();
            for (pos, m) in idx.modes().iter().enumerate() {
                prop_assert_eq!(idx.position(*m), Some(pos));
            }
            prop_assert_eq!(idx.position(Mode::new(0, 0, 0)), None);
            prop_assert_eq!(idx.position(Mode::new(n + 1, 0, 0)), None);
        }
    }
}
