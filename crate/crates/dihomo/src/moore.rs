//! Exact piecewise-linear paths with explicit durations.
//!
//! A path carries its duration with it and is taken to be constant from the
//! duration onward, so composition concatenates in time and simply adds
//! durations instead of reparametrizing. All data is rational and composition
//! is plain breakpoint concatenation with the junction merged, which makes
//! the category laws (associativity, units, duration additivity) hold as
//! equalities of representations, not merely up to reparametrization.

use crate::dihomotopy::{validate_schedule, walk_vertices, Schedule, ScheduleError};
use crate::geom::StateSpace;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

pub type Rational = BigRational;
pub type Point = Vec<Rational>;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_point(coords: &[(i64, i64)]) -> Point {
    coords.iter().map(|&(n, d)| rational(n, d)).collect()
}

pub fn integer_point(coords: &[i64]) -> Point {
    coords.iter().map(|&c| BigRational::from(BigInt::from(c))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MooreError {
    #[error("a path needs at least one breakpoint")]
    NoBreakpoints,
    #[error("first breakpoint must be at time 0, found {0}")]
    FirstTimeNonzero(String),
    #[error("breakpoint times must strictly increase ({0} repeated or decreasing)")]
    TimesNotIncreasing(String),
    #[error("breakpoint {index} has dimension {got}, expected {expected}")]
    PointDimension { index: usize, expected: usize, got: usize },
    #[error("directed axis {axis} out of range for dimension {dim}")]
    DirectedAxisOutOfRange { axis: usize, dim: usize },
    #[error("cannot compose: codomain of first differs from domain of second")]
    EndpointMismatch,
    #[error("cannot compose: dimensions {0} and {1} differ")]
    DimensionMismatch(usize, usize),
    #[error("cannot compose: directed axes differ")]
    DirectedAxesMismatch,
    #[error("cannot evaluate at negative time {0}")]
    NegativeTime(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(#[from] ScheduleError),
}

/// A piecewise-linear path with an explicit duration.
///
/// Breakpoints are `(time, point)` pairs with strictly increasing times
/// starting at 0; the duration is the last breakpoint time and the path is
/// constant afterwards. Exact duplicates arising at composition junctions are
/// merged at construction, so path equality is representation equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoorePath {
    breakpoints: Vec<(Rational, Point)>,
    directed_axes: BTreeSet<usize>,
}

impl MoorePath {
    pub fn new(
        breakpoints: Vec<(Rational, Point)>,
        directed_axes: BTreeSet<usize>,
    ) -> Result<MoorePath, MooreError> {
        if breakpoints.is_empty() {
            return Err(MooreError::NoBreakpoints);
        }
        let dim = breakpoints[0].1.len();
        for (index, (_, p)) in breakpoints.iter().enumerate() {
            if p.len() != dim {
                return Err(MooreError::PointDimension { index, expected: dim, got: p.len() });
            }
        }
        for &axis in &directed_axes {
            if axis >= dim {
                return Err(MooreError::DirectedAxisOutOfRange { axis, dim });
            }
        }
        if !breakpoints[0].0.is_zero() {
            return Err(MooreError::FirstTimeNonzero(breakpoints[0].0.to_string()));
        }
        let mut merged: Vec<(Rational, Point)> = Vec::with_capacity(breakpoints.len());
        for (t, p) in breakpoints {
            match merged.last() {
                Some((lt, lp)) if *lt == t && *lp == p => continue,
                Some((lt, _)) if *lt >= t => {
                    return Err(MooreError::TimesNotIncreasing(t.to_string()));
                }
                _ => merged.push((t, p)),
            }
        }
        Ok(MoorePath { breakpoints: merged, directed_axes })
    }

    /// The constant path of duration 0 at `point`.
    pub fn identity(point: Point, directed_axes: BTreeSet<usize>) -> MoorePath {
        MoorePath::new(vec![(BigRational::zero(), point)], directed_axes)
            .expect("single breakpoint at time 0 is always valid")
    }

    pub fn dim(&self) -> usize {
        self.breakpoints[0].1.len()
    }

    pub fn duration(&self) -> &Rational {
        &self.breakpoints.last().unwrap().0
    }

    pub fn breakpoints(&self) -> &[(Rational, Point)] {
        &self.breakpoints
    }

    pub fn directed_axes(&self) -> &BTreeSet<usize> {
        &self.directed_axes
    }

    /// Start point.
    pub fn dom(&self) -> &Point {
        &self.breakpoints[0].1
    }

    /// End point, which the path holds forever after its duration.
    pub fn cod(&self) -> &Point {
        &self.breakpoints.last().unwrap().1
    }

    /// Position at time `t >= 0`: linear interpolation between the
    /// surrounding breakpoints, the end point from the duration on.
    pub fn evaluate(&self, t: &Rational) -> Result<Point, MooreError> {
        if t.is_negative() {
            return Err(MooreError::NegativeTime(t.to_string()));
        }
        if t >= self.duration() {
            return Ok(self.cod().clone());
        }
        // find the segment with start <= t < end
        let seg = self
            .breakpoints
            .windows(2)
            .find(|w| w[0].0 <= *t && *t < w[1].0)
            .expect("t below duration lies in some segment");
        let (t0, p0) = &seg[0];
        let (t1, p1) = &seg[1];
        let lambda = (t - t0) / (t1 - t0);
        Ok(p0
            .iter()
            .zip(p1)
            .map(|(a, b)| a + &lambda * (b - a))
            .collect())
    }

    /// Whether every directed coordinate is nondecreasing along the path.
    pub fn is_dipath(&self) -> bool {
        self.breakpoints.windows(2).all(|w| {
            self.directed_axes
                .iter()
                .all(|&axis| w[0].1[axis] <= w[1].1[axis])
        })
    }
}

/// Composition in diagram order: runs `first`, then `second`. Durations add
/// and the duplicated junction breakpoint is merged away.
pub fn compose(second: &MoorePath, first: &MoorePath) -> Result<MoorePath, MooreError> {
    if first.dim() != second.dim() {
        return Err(MooreError::DimensionMismatch(first.dim(), second.dim()));
    }
    if first.directed_axes != second.directed_axes {
        return Err(MooreError::DirectedAxesMismatch);
    }
    if first.cod() != second.dom() {
        return Err(MooreError::EndpointMismatch);
    }
    let shift = first.duration().clone();
    let mut breakpoints = first.breakpoints.clone();
    for (t, p) in &second.breakpoints[1..] {
        breakpoints.push((t + &shift, p.clone()));
    }
    MoorePath::new(breakpoints, first.directed_axes.clone())
}

/// The unit-speed realization of a complete schedule through the grid:
/// breakpoints at integer times, one coordinate stepping per letter, all axes
/// directed. Duration equals the word length.
pub fn schedule_to_moore(s: &StateSpace, w: &Schedule) -> Result<MoorePath, MooreError> {
    validate_schedule(s, w)?;
    path_through_grid(s, &s.bottom(), w.letters())
}

/// Unit-speed realization of a partial walk starting at `start`.
pub fn path_through_grid(
    s: &StateSpace,
    start: &[u32],
    letters: &[u8],
) -> Result<MoorePath, MooreError> {
    let walk = walk_vertices(s, start, letters)?;
    let breakpoints = walk
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            let t = BigRational::from(BigInt::from(k));
            let p = v.iter().map(|&c| BigRational::from(BigInt::from(c))).collect();
            (t, p)
        })
        .collect();
    MoorePath::new(breakpoints, (0..s.n()).collect())
}

/// Outcome of the randomized law check: counts of trials and of any law
/// violations (associativity, left/right unit, duration additivity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestOutcome {
    pub trials: usize,
    pub failures: usize,
}

/// A random rational PL path from `from` to `to` with up to two interior
/// breakpoints.
pub fn random_path<R: Rng>(
    rng: &mut R,
    from: Point,
    to: Point,
    directed_axes: &BTreeSet<usize>,
) -> MoorePath {
    let dim = from.len();
    let interior = rng.gen_range(0..=2usize);
    let mut t = BigRational::zero();
    let mut breakpoints = vec![(t.clone(), from)];
    for _ in 0..interior {
        t += rational(rng.gen_range(1..=8), rng.gen_range(1..=4));
        let p: Point = (0..dim)
            .map(|_| rational(rng.gen_range(-12..=12), rng.gen_range(1..=6)))
            .collect();
        breakpoints.push((t.clone(), p));
    }
    t += rational(rng.gen_range(1..=8), rng.gen_range(1..=4));
    breakpoints.push((t, to));
    MoorePath::new(breakpoints, directed_axes.clone()).expect("times strictly increase")
}

/// Three composable random paths `p: x0 -> x1`, `q: x1 -> x2`, `r: x2 -> x3`.
pub fn random_composable_triple<R: Rng>(
    rng: &mut R,
    dim: usize,
) -> (MoorePath, MoorePath, MoorePath) {
    let directed: BTreeSet<usize> = (0..dim).filter(|_| rng.gen_bool(0.5)).collect();
    let point = |rng: &mut R| -> Point {
        (0..dim)
            .map(|_| rational(rng.gen_range(-12..=12), rng.gen_range(1..=6)))
            .collect()
    };
    let x0 = point(rng);
    let x1 = point(rng);
    let x2 = point(rng);
    let x3 = point(rng);
    let p = random_path(rng, x0, x1.clone(), &directed);
    let q = random_path(rng, x1, x2.clone(), &directed);
    let r = random_path(rng, x2, x3, &directed);
    (p, q, r)
}

/// Checks the category laws on random rational triples, deterministically in
/// `seed`: associativity and both unit laws by exact representation
/// equality, and duration additivity of composition.
pub fn selftest(seed: u64, trials: usize) -> SelftestOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let dim = rng.gen_range(1..=3);
        let (p, q, r) = random_composable_triple(&mut rng, dim);
        let qp = compose(&q, &p).unwrap();
        let rq = compose(&r, &q).unwrap();
        let assoc_left = compose(&r, &qp).unwrap();
        let assoc_right = compose(&rq, &p).unwrap();
        let left_unit = compose(&MoorePath::identity(p.cod().clone(), p.directed_axes().clone()), &p).unwrap();
        let right_unit = compose(&p, &MoorePath::identity(p.dom().clone(), p.directed_axes().clone())).unwrap();
        let ok = assoc_left == assoc_right
            && left_unit == p
            && right_unit == p
            && *qp.duration() == p.duration() + q.duration()
            && *assoc_left.duration() == p.duration() + q.duration() + r.duration()
            && qp.dom() == p.dom()
            && qp.cod() == q.cod();
        if !ok {
            failures += 1;
        }
    }
    SelftestOutcome { trials, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::StateSpace;
    use num_traits::Zero;

    fn all_axes(n: usize) -> BTreeSet<usize> {
        (0..n).collect()
    }

    #[test]
    fn identity_path_shape() {
        let x = integer_point(&[0, 0]);
        let id = MoorePath::identity(x.clone(), all_axes(2));
        assert!(id.duration().is_zero());
        assert_eq!(id.breakpoints().len(), 1);
        assert_eq!(id.evaluate(&rational(7, 1)).unwrap(), x);
    }

    #[test]
    fn unit_laws_exact() {
        let p = MoorePath::new(
            vec![
                (rational(0, 1), integer_point(&[0, 0])),
                (rational(2, 1), integer_point(&[2, 0])),
                (rational(3, 1), integer_point(&[2, 2])),
            ],
            all_axes(2),
        )
        .unwrap();
        let left = compose(&MoorePath::identity(p.cod().clone(), all_axes(2)), &p).unwrap();
        let right = compose(&p, &MoorePath::identity(p.dom().clone(), all_axes(2))).unwrap();
        assert_eq!(left, p);
        assert_eq!(right, p);
    }

    #[test]
    fn durations_add() {
        let p = MoorePath::new(
            vec![(rational(0, 1), integer_point(&[0])), (rational(2, 1), integer_point(&[1]))],
            all_axes(1),
        )
        .unwrap();
        let q = MoorePath::new(
            vec![(rational(0, 1), integer_point(&[1])), (rational(3, 1), integer_point(&[5]))],
            all_axes(1),
        )
        .unwrap();
        let qp = compose(&q, &p).unwrap();
        assert_eq!(*qp.duration(), rational(5, 1));
        assert_eq!(qp.dom(), p.dom());
        assert_eq!(qp.cod(), q.cod());
    }

    #[test]
    fn evaluation() {
        let p = MoorePath::new(
            vec![(rational(0, 1), integer_point(&[0, 0])), (rational(2, 1), integer_point(&[2, 0]))],
            all_axes(2),
        )
        .unwrap();
        assert_eq!(p.evaluate(&rational(0, 1)).unwrap(), *p.dom());
        assert_eq!(p.evaluate(&rational(1, 1)).unwrap(), integer_point(&[1, 0]));
        assert_eq!(p.evaluate(&rational(9, 1)).unwrap(), *p.cod());
        assert!(p.evaluate(&rational(-1, 2)).is_err());
    }

    #[test]
    fn compose_rejects_mismatches() {
        let p = MoorePath::identity(integer_point(&[0, 0]), all_axes(2));
        let q = MoorePath::identity(integer_point(&[1, 0]), all_axes(2));
        assert_eq!(compose(&q, &p), Err(MooreError::EndpointMismatch));

        let r = MoorePath::identity(integer_point(&[0]), all_axes(1));
        assert!(matches!(compose(&r, &p), Err(MooreError::DimensionMismatch(2, 1))));

        let undirected = MoorePath::identity(integer_point(&[0, 0]), BTreeSet::new());
        assert_eq!(compose(&undirected, &p), Err(MooreError::DirectedAxesMismatch));
    }

    #[test]
    fn dipath_detection() {
        let up = MoorePath::new(
            vec![(rational(0, 1), integer_point(&[0])), (rational(1, 1), integer_point(&[2]))],
            all_axes(1),
        )
        .unwrap();
        assert!(up.is_dipath());
        let down = MoorePath::new(
            vec![(rational(0, 1), integer_point(&[2])), (rational(1, 1), integer_point(&[0]))],
            all_axes(1),
        )
        .unwrap();
        assert!(!down.is_dipath());
        let undirected = MoorePath::new(
            vec![(rational(0, 1), integer_point(&[2])), (rational(1, 1), integer_point(&[0]))],
            BTreeSet::new(),
        )
        .unwrap();
        assert!(undirected.is_dipath());
    }

    #[test]
    fn schedule_realization() {
        let s = StateSpace::new(vec![1, 1], vec![]).unwrap();
        let w = Schedule::new(vec![0, 1]);
        let path = schedule_to_moore(&s, &w).unwrap();
        assert_eq!(
            path.breakpoints(),
            &[
                (rational(0, 1), integer_point(&[0, 0])),
                (rational(1, 1), integer_point(&[1, 0])),
                (rational(2, 1), integer_point(&[1, 1])),
            ]
        );
        assert!(path.is_dipath());

        let empty = StateSpace::new(vec![0, 0], vec![]).unwrap();
        let id = schedule_to_moore(&empty, &Schedule::new(vec![])).unwrap();
        assert_eq!(id, MoorePath::identity(integer_point(&[0, 0]), all_axes(2)));
    }

    #[test]
    fn schedule_realization_splits_as_composition() {
        let s = StateSpace::new(vec![2, 2], vec![]).unwrap();
        let whole = Schedule::new(vec![0, 1, 0, 1]);
        let full = schedule_to_moore(&s, &whole).unwrap();
        for cut in 0..=whole.len() {
            let prefix = path_through_grid(&s, &s.bottom(), &whole.letters()[..cut]).unwrap();
            let mid: Vec<u32> = prefix.cod().iter().map(|c| c.to_integer().try_into().unwrap()).collect();
            let suffix = path_through_grid(&s, &mid, &whole.letters()[cut..]).unwrap();
            assert_eq!(compose(&suffix, &prefix).unwrap(), full);
        }
    }

    #[test]
    fn selftest_is_clean_and_deterministic() {
        let a = selftest(11, 64);
        let b = selftest(11, 64);
        assert_eq!(a, b);
        assert_eq!(a.failures, 0);
        assert_eq!(a.trials, 64);
    }
}
