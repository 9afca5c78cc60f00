//! Geometric semantics of lock programs.
//!
//! A program with `n` processes runs inside the grid `[0,N1] x ... x [0,Nn]`
//! where `Ni` is the instruction count of process `i`; executing instruction
//! `j` of a process moves its coordinate from `j-1` to `j`. Capacity
//! violations carve open axis-aligned boxes out of that cube: a grid point is
//! forbidden exactly when more processes hold a semaphore than its capacity
//! permits. All queries below are decided with integer comparisons only.

use crate::pv::{Instruction, Program};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("box has {got} axes, state space has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis {axis}: interval ({lo}, {hi}) has empty interior")]
    EmptyInterior { axis: usize, lo: i64, hi: i64 },
    #[error("axis {axis}: interval ({lo}, {hi}) exceeds extent {extent}")]
    OutOfBounds { axis: usize, lo: i64, hi: i64, extent: u32 },
    #[error("vertex {vertex:?} out of range for extents {extents:?}")]
    VertexOutOfRange { vertex: Vec<u32>, extents: Vec<u32> },
    #[error("axis {axis} out of range for {n} axes")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("equal axes {axis} passed where two distinct axes are required")]
    EqualAxes { axis: usize },
    #[error("k = {k} out of range for {n} axes")]
    KOutOfRange { k: usize, n: usize },
}

/// An open axis-aligned box with integer bounds.
///
/// An unconstrained axis is stored as the sentinel full interval
/// `(-1, N+1)`, which makes every in-range coordinate pass the strict
/// interval tests without special cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl OpenBox {
    /// `bounds[i] = Some((l, u))` constrains axis `i` to the open interval
    /// `(l, u)` with `0 <= l < u <= extents[i]`; `None` leaves it full.
    pub fn new(bounds: &[Option<(u32, u32)>], extents: &[u32]) -> Result<OpenBox, GeomError> {
        if bounds.len() != extents.len() {
            return Err(GeomError::DimensionMismatch { expected: extents.len(), got: bounds.len() });
        }
        let mut lo = Vec::with_capacity(bounds.len());
        let mut hi = Vec::with_capacity(bounds.len());
        for (axis, b) in bounds.iter().enumerate() {
            match *b {
                Some((l, u)) => {
                    if l >= u {
                        return Err(GeomError::EmptyInterior { axis, lo: l as i64, hi: u as i64 });
                    }
                    if u > extents[axis] {
                        return Err(GeomError::OutOfBounds {
                            axis,
                            lo: l as i64,
                            hi: u as i64,
                            extent: extents[axis],
                        });
                    }
                    lo.push(l as i64);
                    hi.push(u as i64);
                }
                None => {
                    lo.push(-1);
                    hi.push(extents[axis] as i64 + 1);
                }
            }
        }
        Ok(OpenBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self, axis: usize) -> i64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> i64 {
        self.hi[axis]
    }

    /// True when the axis carries the full-extent sentinel.
    pub fn is_full_axis(&self, axis: usize) -> bool {
        self.lo[axis] < 0
    }

    /// Strict membership of a grid point in the open box.
    pub fn contains_point(&self, v: &[u32]) -> bool {
        v.iter()
            .enumerate()
            .all(|(i, &c)| self.lo[i] < c as i64 && (c as i64) < self.hi[i])
    }

    /// Whether the open boxes intersect (open interval overlap on every axis).
    pub fn meets_box(&self, other: &OpenBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] < other.hi[i] && other.lo[i] < self.hi[i])
    }

    fn permuted(&self, perm: &[usize]) -> OpenBox {
        OpenBox {
            lo: perm.iter().map(|&a| self.lo[a]).collect(),
            hi: perm.iter().map(|&a| self.hi[a]).collect(),
        }
    }
}

/// The directed state space: integer extents minus a union of open boxes.
///
/// The extreme vertices `(0,...,0)` and `(N1,...,Nn)` can never lie inside a
/// box because constrained open intervals with bounds in `[0, Ni]` exclude
/// both `0` and `Ni`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    extents: Vec<u32>,
    boxes: Vec<OpenBox>,
}

impl StateSpace {
    pub fn new(extents: Vec<u32>, boxes: Vec<OpenBox>) -> Result<StateSpace, GeomError> {
        for b in &boxes {
            if b.dim() != extents.len() {
                return Err(GeomError::DimensionMismatch { expected: extents.len(), got: b.dim() });
            }
            for axis in 0..b.dim() {
                let (lo, hi) = (b.lo(axis), b.hi(axis));
                let full = lo == -1 && hi == extents[axis] as i64 + 1;
                let constrained = lo >= 0 && hi <= extents[axis] as i64 && lo < hi;
                if !full && !constrained {
                    return Err(GeomError::OutOfBounds { axis, lo, hi, extent: extents[axis] });
                }
            }
        }
        Ok(StateSpace { extents, boxes })
    }

    pub fn n(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[u32] {
        &self.extents
    }

    pub fn boxes(&self) -> &[OpenBox] {
        &self.boxes
    }

    /// Number of grid vertices.
    pub fn vertex_count(&self) -> usize {
        self.extents.iter().map(|&e| e as usize + 1).product()
    }

    pub fn top(&self) -> Vec<u32> {
        self.extents.clone()
    }

    pub fn bottom(&self) -> Vec<u32> {
        vec![0; self.n()]
    }

    fn check_vertex(&self, v: &[u32]) -> Result<(), GeomError> {
        if v.len() != self.n() || v.iter().zip(&self.extents).any(|(&c, &e)| c > e) {
            return Err(GeomError::VertexOutOfRange {
                vertex: v.to_vec(),
                extents: self.extents.clone(),
            });
        }
        Ok(())
    }

    /// True when the grid point lies inside some forbidden box.
    pub fn forbidden_vertex(&self, v: &[u32]) -> bool {
        self.boxes.iter().any(|b| b.contains_point(v))
    }

    /// Whether the closed unit segment from `v` one step along `axis` avoids
    /// every box. The segment meets an open box iff every other coordinate
    /// lies strictly inside the box on its axis and the open unit interval
    /// `(v_i, v_i + 1)` overlaps the box interval on the stepped axis.
    pub fn edge_allowed(&self, v: &[u32], axis: usize) -> Result<bool, GeomError> {
        self.check_vertex(v)?;
        if axis >= self.n() {
            return Err(GeomError::AxisOutOfRange { axis, n: self.n() });
        }
        if v[axis] >= self.extents[axis] {
            return Err(GeomError::VertexOutOfRange {
                vertex: v.to_vec(),
                extents: self.extents.clone(),
            });
        }
        Ok(self.edge_allowed_raw(v, axis))
    }

    pub(crate) fn edge_allowed_raw(&self, v: &[u32], axis: usize) -> bool {
        'boxes: for b in &self.boxes {
            for j in 0..self.n() {
                let c = v[j] as i64;
                let hit = if j == axis {
                    c < b.hi[j] && c + 1 > b.lo[j]
                } else {
                    b.lo[j] < c && c < b.hi[j]
                };
                if !hit {
                    continue 'boxes;
                }
            }
            return false;
        }
        true
    }

    /// Whether the unit square at `v` spanned by axes `i`, `j` is usable for a
    /// local commutation: all four boundary edges allowed and the open 2-face
    /// disjoint from every box.
    pub fn square_free(&self, v: &[u32], i: usize, j: usize) -> Result<bool, GeomError> {
        self.check_vertex(v)?;
        for axis in [i, j] {
            if axis >= self.n() {
                return Err(GeomError::AxisOutOfRange { axis, n: self.n() });
            }
        }
        if i == j {
            return Err(GeomError::EqualAxes { axis: i });
        }
        if v[i] >= self.extents[i] || v[j] >= self.extents[j] {
            return Err(GeomError::VertexOutOfRange {
                vertex: v.to_vec(),
                extents: self.extents.clone(),
            });
        }
        Ok(self.square_free_raw(v, i, j))
    }

    pub(crate) fn square_free_raw(&self, v: &[u32], i: usize, j: usize) -> bool {
        let mut w = v.to_vec();
        if !self.edge_allowed_raw(v, i) || !self.edge_allowed_raw(v, j) {
            return false;
        }
        w[i] += 1;
        let far_j = self.edge_allowed_raw(&w, j);
        w[i] -= 1;
        w[j] += 1;
        let far_i = self.edge_allowed_raw(&w, i);
        w[j] -= 1;
        if !far_i || !far_j {
            return false;
        }
        // open 2-face against each box
        'boxes: for b in &self.boxes {
            for axis in 0..self.n() {
                let c = v[axis] as i64;
                let hit = if axis == i || axis == j {
                    c < b.hi[axis] && c + 1 > b.lo[axis]
                } else {
                    b.lo[axis] < c && c < b.hi[axis]
                };
                if !hit {
                    continue 'boxes;
                }
            }
            return false;
        }
        true
    }

    /// Membership in the k-process skeleton: at least `n - k` coordinates sit
    /// at an axis extreme (`0` or `Ni`).
    pub fn in_xk(&self, v: &[u32], k: usize) -> Result<bool, GeomError> {
        self.check_vertex(v)?;
        if k > self.n() {
            return Err(GeomError::KOutOfRange { k, n: self.n() });
        }
        let extreme = v
            .iter()
            .zip(&self.extents)
            .filter(|&(&c, &e)| c == 0 || c == e)
            .count();
        Ok(extreme + k >= self.n())
    }

    /// The space with axes relabeled: axis `a` of the result is axis
    /// `perm[a]` of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> StateSpace {
        assert_eq!(perm.len(), self.n());
        StateSpace {
            extents: perm.iter().map(|&a| self.extents[a]).collect(),
            boxes: self.boxes.iter().map(|b| b.permuted(perm)).collect(),
        }
    }
}

/// Iterates all grid vertices of the given extents in lexicographic order.
pub fn vertices(extents: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    let n = extents.len();
    let mut cur: Option<Vec<u32>> = Some(vec![0; n]);
    std::iter::from_fn(move || {
        let out = cur.take()?;
        // odometer increment, last axis fastest
        let mut next = out.clone();
        let mut axis = n;
        while axis > 0 {
            axis -= 1;
            if next[axis] < extents[axis] {
                next[axis] += 1;
                cur = Some(next);
                break;
            }
            next[axis] = 0;
        }
        Some(out)
    })
}

/// Open intervals during which each process holds each lock.
///
/// For an acquire at 1-based position `a` matched by a release at position
/// `v`, the process holds the lock on the open coordinate interval
/// `(a - 1, v)`: possession starts when the acquire starts and ends when the
/// release completes. Indexed `[process][lock]`, locks in declaration order.
pub fn holding_intervals(p: &Program) -> Vec<Vec<Vec<(u32, u32)>>> {
    let nlocks = p.semaphores().len();
    p.processes()
        .iter()
        .map(|proc| {
            let mut intervals = vec![Vec::new(); nlocks];
            let mut open: Vec<Option<u32>> = vec![None; nlocks];
            for (k, instr) in proc.instructions.iter().enumerate() {
                let pos = k as u32 + 1;
                match instr {
                    Instruction::Acquire(l) => open[*l] = Some(pos - 1),
                    Instruction::Release(l) => {
                        let start = open[*l].take().expect("validated program");
                        intervals[*l].push((start, pos));
                    }
                }
            }
            intervals
        })
        .collect()
}

/// The forbidden region of a program as a list of open boxes.
///
/// For each lock of capacity `k`, every choice of `k + 1` holder processes
/// and one holding interval per chosen process yields one box: those axes
/// carry the chosen intervals, all other axes are full. A grid point lies in
/// the union exactly when some lock is simultaneously held by more processes
/// than its capacity.
pub fn forbidden_rects(p: &Program) -> Vec<OpenBox> {
    let extents = p.instruction_counts();
    let intervals = holding_intervals(p);
    let mut boxes = Vec::new();
    for (lock, sem) in p.semaphores().iter().enumerate() {
        let need = sem.capacity as usize + 1;
        let holders: Vec<usize> = (0..p.processes().len())
            .filter(|&pi| !intervals[pi][lock].is_empty())
            .collect();
        if holders.len() < need {
            continue;
        }
        for subset in combinations(&holders, need) {
            emit_interval_choices(&subset, lock, &intervals, &extents, &mut boxes);
        }
    }
    boxes
}

/// All `k`-element subsets of `items`, in lexicographic order.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

fn emit_interval_choices(
    subset: &[usize],
    lock: usize,
    intervals: &[Vec<Vec<(u32, u32)>>],
    extents: &[u32],
    boxes: &mut Vec<OpenBox>,
) {
    let mut choice = vec![0usize; subset.len()];
    loop {
        let mut bounds: Vec<Option<(u32, u32)>> = vec![None; extents.len()];
        for (slot, &pi) in subset.iter().enumerate() {
            bounds[pi] = Some(intervals[pi][lock][choice[slot]]);
        }
        boxes.push(OpenBox::new(&bounds, extents).expect("holding intervals are in range"));
        // odometer over interval choices, last slot fastest
        let mut slot = subset.len();
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            choice[slot] += 1;
            if choice[slot] < intervals[subset[slot]][lock].len() {
                break;
            }
            choice[slot] = 0;
        }
    }
}

/// The state space induced by a program: per-process instruction counts as
/// extents, capacity violations as boxes.
pub fn build_state_space(p: &Program) -> StateSpace {
    StateSpace::new(p.instruction_counts(), forbidden_rects(p))
        .expect("program-derived boxes respect extents")
}
