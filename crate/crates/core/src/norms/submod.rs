//! Property engines for continuous submodularity and DR-submodularity.
//!
//! Four equivalent characterizations of continuous submodularity are tested
//! independently (lattice inequality, disjoint-support additivity, restricted
//! diminishing returns, two-coordinate form). None of them certifies a norm;
//! they search for counterexamples by sampling or by scanning a finite grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::norms::oracle::Norm;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Characterization {
    /// `f(x ∨ y) + f(x ∧ y) <= f(x) + f(y)`.
    Lattice,
    /// `f(x) + f(x+y+z) <= f(x+y) + f(x+z)` for disjointly supported `y, z`.
    DisjointSupport,
    /// `f(w + a e_i) − f(w) <= f(x + a e_i) − f(x)` for `x <= w`, `x_i = w_i`.
    RestrictedDiminishing,
    /// `f(x) + f(x + a e_i + b e_j) <= f(x + a e_i) + f(x + b e_j)`, `i != j`.
    TwoCoordinate,
    /// Diminishing returns without the `x_i = w_i` restriction.
    DiminishingReturns,
}

impl Characterization {
    /// Four equivalent characterizations of submodularity, numbered 1–4.
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Self::Lattice),
            2 => Some(Self::DisjointSupport),
            3 => Some(Self::RestrictedDiminishing),
            4 => Some(Self::TwoCoordinate),
            _ => None,
        }
    }

    pub const ALL: [Characterization; 4] = [
        Self::Lattice,
        Self::DisjointSupport,
        Self::RestrictedDiminishing,
        Self::TwoCoordinate,
    ];
}

/// The concrete points at which an inequality failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Witness<T> {
    Lattice { x: Vec<T>, y: Vec<T> },
    Disjoint { x: Vec<T>, y: Vec<T>, z: Vec<T> },
    Diminishing { x: Vec<T>, w: Vec<T>, i: usize, a: T },
    TwoCoordinate { x: Vec<T>, i: usize, j: usize, a: T, b: T },
}

impl<T: Clone> Witness<T> {
    pub fn x(&self) -> &[T] {
        match self {
            Witness::Lattice { x, .. }
            | Witness::Disjoint { x, .. }
            | Witness::Diminishing { x, .. }
            | Witness::TwoCoordinate { x, .. } => x,
        }
    }

    /// Second point of the witness (`y` or `w`), when one exists.
    pub fn y(&self) -> Option<&[T]> {
        match self {
            Witness::Lattice { y, .. } | Witness::Disjoint { y, .. } => Some(y),
            Witness::Diminishing { w, .. } => Some(w),
            Witness::TwoCoordinate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<T> {
    pub witness: Witness<T>,
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmodCheckReport<T> {
    pub trials: usize,
    pub violations: Vec<Violation<T>>,
    pub characterization: Characterization,
    pub tolerance: T,
}

impl<T: Scalar> SubmodCheckReport<T> {
    fn new(characterization: Characterization, tolerance: T) -> Self {
        Self {
            trials: 0,
            violations: Vec::new(),
            characterization,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Records the comparison; a violation needs `lhs − rhs > tol · max(1, |rhs|)`.
    fn record(&mut self, witness: impl FnOnce() -> Witness<T>, lhs: T, rhs: T) {
        self.trials += 1;
        let slack = lhs - rhs;
        if slack > self.tolerance * rhs.abs().max(T::one()) {
            self.violations.push(Violation {
                witness: witness(),
                lhs,
                rhs,
                slack,
            });
        }
    }
}

/// Source of random test points.
pub trait VectorSampler<T> {
    fn vector(&mut self, n: usize) -> Vec<T>;
    fn scalar(&mut self) -> T;
    fn index(&mut self, n: usize) -> usize;
}

/// Mix of dense uniform, sparse and capped heavy-tailed vectors.
pub struct MixedSampler {
    rng: ChaCha8Rng,
}

impl MixedSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn heavy(&mut self) -> f64 {
        let u: f64 = self.rng.gen_range(1e-3..1.0);
        u.powf(-1.0 / 1.5).min(100.0)
    }
}

impl<T: Scalar> VectorSampler<T> for MixedSampler {
    fn vector(&mut self, n: usize) -> Vec<T> {
        let mode = self.rng.gen_range(0..4u8);
        (0..n)
            .map(|_| {
                let v = match mode {
                    0 => self.rng.gen::<f64>(),
                    1 => {
                        if self.rng.gen_bool(0.3) {
                            self.rng.gen::<f64>()
                        } else {
                            0.0
                        }
                    }
                    2 => {
                        if self.rng.gen_bool(0.2) {
                            self.heavy()
                        } else {
                            self.rng.gen::<f64>() * 0.1
                        }
                    }
                    _ => match self.rng.gen_range(0..3u8) {
                        0 => 0.0,
                        1 => self.rng.gen::<f64>(),
                        _ => self.heavy(),
                    },
                };
                T::of(v)
            })
            .collect()
    }

    fn scalar(&mut self) -> T {
        if self.rng.gen_bool(0.2) {
            T::of(self.heavy())
        } else {
            T::of(self.rng.gen::<f64>())
        }
    }

    fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

fn join<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| a.max(*b)).collect()
}

fn meet<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| a.min(*b)).collect()
}

fn add<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| *a + *b).collect()
}

fn bump<T: Scalar>(x: &[T], i: usize, a: T) -> Vec<T> {
    let mut v = x.to_vec();
    v[i] = v[i] + a;
    v
}

fn lattice<T: Scalar>(norm: &Norm<T>, rep: &mut SubmodCheckReport<T>, x: &[T], y: &[T]) {
    let lhs = norm.value(&join(x, y)) + norm.value(&meet(x, y));
    let rhs = norm.value(x) + norm.value(y);
    rep.record(
        || Witness::Lattice {
            x: x.to_vec(),
            y: y.to_vec(),
        },
        lhs,
        rhs,
    );
}

fn disjoint<T: Scalar>(norm: &Norm<T>, rep: &mut SubmodCheckReport<T>, x: &[T], y: &[T], z: &[T]) {
    let xy = add(x, y);
    let xz = add(x, z);
    let lhs = norm.value(x) + norm.value(&add(&xy, z));
    let rhs = norm.value(&xy) + norm.value(&xz);
    rep.record(
        || Witness::Disjoint {
            x: x.to_vec(),
            y: y.to_vec(),
            z: z.to_vec(),
        },
        lhs,
        rhs,
    );
}

/// Inequality `f(w + a e_i) − f(w) <= f(x + a e_i) − f(x)`, rearranged as
/// `f(w + a e_i) + f(x) <= f(x + a e_i) + f(w)`.
fn diminishing<T: Scalar>(norm: &Norm<T>, rep: &mut SubmodCheckReport<T>, x: &[T], w: &[T], i: usize, a: T) {
    let lhs = norm.value(&bump(w, i, a)) + norm.value(x);
    let rhs = norm.value(&bump(x, i, a)) + norm.value(w);
    rep.record(
        || Witness::Diminishing {
            x: x.to_vec(),
            w: w.to_vec(),
            i,
            a,
        },
        lhs,
        rhs,
    );
}

fn two_coord<T: Scalar>(norm: &Norm<T>, rep: &mut SubmodCheckReport<T>, x: &[T], i: usize, j: usize, a: T, b: T) {
    let lhs = norm.value(x) + norm.value(&bump(&bump(x, i, a), j, b));
    let rhs = norm.value(&bump(x, i, a)) + norm.value(&bump(x, j, b));
    rep.record(|| Witness::TwoCoordinate { x: x.to_vec(), i, j, a, b }, lhs, rhs);
}

/// Randomized search for violations of one characterization.
pub fn check_submodular<T: Scalar>(
    norm: &Norm<T>,
    sampler: &mut dyn VectorSampler<T>,
    trials: usize,
    tol: T,
    characterization: Characterization,
) -> SubmodCheckReport<T> {
    let n = norm.dim();
    let mut rep = SubmodCheckReport::new(characterization, tol);
    for _ in 0..trials {
        match characterization {
            Characterization::Lattice => {
                let x = sampler.vector(n);
                let y = sampler.vector(n);
                lattice(norm, &mut rep, &x, &y);
            }
            Characterization::DisjointSupport => {
                let x = sampler.vector(n);
                let mut y = sampler.vector(n);
                let mut z = sampler.vector(n);
                // each coordinate goes to y, to z, or to neither
                for k in 0..n {
                    match sampler.index(3) {
                        0 => z[k] = T::zero(),
                        1 => y[k] = T::zero(),
                        _ => {
                            y[k] = T::zero();
                            z[k] = T::zero();
                        }
                    }
                }
                disjoint(norm, &mut rep, &x, &y, &z);
            }
            Characterization::RestrictedDiminishing | Characterization::DiminishingReturns => {
                let x = sampler.vector(n);
                let i = sampler.index(n);
                let mut w = add(&x, &sampler.vector(n));
                if characterization == Characterization::RestrictedDiminishing {
                    w[i] = x[i];
                }
                let a = sampler.scalar();
                diminishing(norm, &mut rep, &x, &w, i, a);
            }
            Characterization::TwoCoordinate => {
                if n < 2 {
                    rep.trials += 1;
                    continue;
                }
                let x = sampler.vector(n);
                let i = sampler.index(n);
                let j = (i + 1 + sampler.index(n - 1)) % n;
                let (a, b) = (sampler.scalar(), sampler.scalar());
                two_coord(norm, &mut rep, &x, i, j, a, b);
            }
        }
    }
    rep
}

/// Randomized DR-submodularity check.
pub fn check_dr_submodular<T: Scalar>(
    norm: &Norm<T>,
    sampler: &mut dyn VectorSampler<T>,
    trials: usize,
    tol: T,
) -> SubmodCheckReport<T> {
    check_submodular(norm, sampler, trials, tol, Characterization::DiminishingReturns)
}

fn grid_points<T: Scalar>(grid: &[T], n: usize) -> Vec<Vec<T>> {
    let g = grid.len();
    let total = g.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = grid[code % g];
                    code /= g;
                    v
                })
                .collect()
        })
        .collect()
}

/// Exhaustive scan of one characterization over all points of `grid^n`.
///
/// Step sizes (`a`, `b`) range over the non-zero grid values.
pub fn exhaustive_grid_check<T: Scalar>(
    norm: &Norm<T>,
    characterization: Characterization,
    grid: &[T],
    tol: T,
) -> SubmodCheckReport<T> {
    let n = norm.dim();
    let points = grid_points(grid, n);
    let steps: Vec<T> = grid.iter().copied().filter(|v| *v > T::zero()).collect();
    let mut rep = SubmodCheckReport::new(characterization, tol);
    match characterization {
        Characterization::Lattice => {
            for x in &points {
                for y in &points {
                    lattice(norm, &mut rep, x, y);
                }
            }
        }
        Characterization::DisjointSupport => {
            for x in &points {
                for y in &points {
                    for z in &points {
                        if y.iter().zip(z).all(|(a, b)| *a == T::zero() || *b == T::zero()) {
                            disjoint(norm, &mut rep, x, y, z);
                        }
                    }
                }
            }
        }
        Characterization::RestrictedDiminishing | Characterization::DiminishingReturns => {
            let restricted = characterization == Characterization::RestrictedDiminishing;
            for x in &points {
                for w in &points {
                    if !x.iter().zip(w).all(|(a, b)| a <= b) {
                        continue;
                    }
                    for i in 0..n {
                        if restricted && x[i] != w[i] {
                            continue;
                        }
                        for &a in &steps {
                            diminishing(norm, &mut rep, x, w, i, a);
                        }
                    }
                }
            }
        }
        Characterization::TwoCoordinate => {
            for x in &points {
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        for &a in &steps {
                            for &b in &steps {
                                two_coord(norm, &mut rep, x, i, j, a, b);
                            }
                        }
                    }
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::fixtures::block_max_fixture;

    #[test]
    fn l2_lattice_passes_and_dr_fails() {
        let l2 = Norm::<f64>::l2(3);
        let mut s = MixedSampler::new(7);
        let rep = check_submodular(&l2, &mut s, 2000, 1e-9, Characterization::Lattice);
        assert!(rep.passed(), "{:?}", rep.violations.first());
        assert_eq!(rep.trials, 2000);
        let dr = check_dr_submodular(&l2, &mut s, 2000, 1e-9);
        assert!(!dr.passed());
        let v = &dr.violations[0];
        assert!(v.lhs > v.rhs + dr.tolerance);
    }

    #[test]
    fn block_max_found_by_every_grid_characterization() {
        let f = block_max_fixture::<f64>(4).unwrap();
        for c in Characterization::ALL {
            let rep = exhaustive_grid_check(&f, c, &[0.0, 1.0], 1e-9);
            assert!(!rep.passed(), "{c:?} missed the block-max violation");
        }
    }

    #[test]
    fn l1_passes_dr_on_grid() {
        let rep = exhaustive_grid_check(
            &Norm::<f64>::l1(3),
            Characterization::DiminishingReturns,
            &[0.0, 0.5, 1.0],
            1e-9,
        );
        assert!(rep.passed());
    }

    #[test]
    fn characterization_numbering() {
        assert_eq!(Characterization::from_index(1), Some(Characterization::Lattice));
        assert_eq!(Characterization::from_index(4), Some(Characterization::TwoCoordinate));
        assert_eq!(Characterization::from_index(5), None);
    }
}
