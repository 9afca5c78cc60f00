//! Vertex-level reachability analyses on a state space.
//!
//! All four analyses are fixed points over the grid and are independent of
//! worklist order: `reachable_set` closes forward from the initial vertex,
//! `safe_set` closes backward from the final vertex, deadlocks are reachable
//! non-final vertices with no allowed outgoing edge, and the unsafe region is
//! what is reachable but not safe.

use crate::geom::StateSpace;
use std::collections::VecDeque;

/// A set of grid vertices, stored as a dense bitset over the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    extents: Vec<u32>,
    strides: Vec<usize>,
    bits: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn empty(extents: &[u32]) -> VertexSet {
        let mut strides = vec![1usize; extents.len()];
        for i in (0..extents.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (extents[i + 1] as usize + 1);
        }
        let total: usize = extents.iter().map(|&e| e as usize + 1).product();
        VertexSet {
            extents: extents.to_vec(),
            strides,
            bits: vec![0; total.div_ceil(64)],
            len: 0,
        }
    }

    fn index(&self, v: &[u32]) -> usize {
        v.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let i = self.index(v);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Inserts a vertex, returning whether it was new.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let i = self.index(v);
        let word = &mut self.bits[i / 64];
        let mask = 1u64 << (i % 64);
        if *word & mask == 0 {
            *word |= mask;
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Members in lexicographic order.
    pub fn to_vec(&self) -> Vec<Vec<u32>> {
        crate::geom::vertices(&self.extents)
            .filter(|v| self.contains(v))
            .collect()
    }

    /// Set difference over identical grids.
    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        assert_eq!(self.extents, other.extents);
        let mut out = self.clone();
        out.len = 0;
        for (w, o) in out.bits.iter_mut().zip(&other.bits) {
            *w &= !o;
            out.len += w.count_ones() as usize;
        }
        out
    }
}

/// Least set containing the initial vertex and closed under allowed forward
/// edges.
pub fn reachable_set(s: &StateSpace) -> VertexSet {
    let n = s.n();
    let mut set = VertexSet::empty(s.extents());
    let mut queue = VecDeque::new();
    set.insert(&s.bottom());
    queue.push_back(s.bottom());
    while let Some(v) = queue.pop_front() {
        for axis in 0..n {
            if v[axis] < s.extents()[axis] && s.edge_allowed_raw(&v, axis) {
                let mut w = v.clone();
                w[axis] += 1;
                if set.insert(&w) {
                    queue.push_back(w);
                }
            }
        }
    }
    set
}

/// Least set containing the final vertex and closed under allowed backward
/// edges: a vertex is safe when some allowed outgoing edge reaches a safe
/// vertex.
pub fn safe_set(s: &StateSpace) -> VertexSet {
    let n = s.n();
    let mut set = VertexSet::empty(s.extents());
    let mut queue = VecDeque::new();
    set.insert(&s.top());
    queue.push_back(s.top());
    while let Some(v) = queue.pop_front() {
        for axis in 0..n {
            if v[axis] > 0 {
                let mut u = v.clone();
                u[axis] -= 1;
                if s.edge_allowed_raw(&u, axis) && set.insert(&u) {
                    queue.push_back(u);
                }
            }
        }
    }
    set
}

/// Reachable non-final vertices with no allowed outgoing edge.
pub fn deadlocks(s: &StateSpace) -> VertexSet {
    let reachable = reachable_set(s);
    let top = s.top();
    let mut out = VertexSet::empty(s.extents());
    for v in crate::geom::vertices(s.extents()) {
        if v == top || !reachable.contains(&v) {
            continue;
        }
        let stuck = (0..s.n())
            .all(|axis| v[axis] >= s.extents()[axis] || !s.edge_allowed_raw(&v, axis));
        if stuck {
            out.insert(&v);
        }
    }
    out
}

/// Reachable vertices from which the final vertex cannot be reached.
pub fn unsafe_region(s: &StateSpace) -> VertexSet {
    reachable_set(s).difference(&safe_set(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build_state_space, StateSpace};
    use crate::pv::Program;

    fn swiss() -> StateSpace {
        build_state_space(
            &Program::parse(
                "sem a 1\nsem b 1\nproc P1: P(a) P(b) V(b) V(a)\nproc P2: P(b) P(a) V(a) V(b)\n",
            )
            .unwrap(),
        )
    }

    #[test]
    fn free_square_is_fully_reachable_and_safe() {
        let s = StateSpace::new(vec![1, 1], vec![]).unwrap();
        assert_eq!(reachable_set(&s).len(), 4);
        assert_eq!(safe_set(&s).len(), 4);
        assert!(deadlocks(&s).is_empty());
        assert!(unsafe_region(&s).is_empty());
    }

    #[test]
    fn swiss_flag_analyses() {
        let s = swiss();
        let reach = reachable_set(&s);
        assert!(!reach.contains(&[3, 3]));
        assert!(reach.contains(&[1, 1]));

        let safe = safe_set(&s);
        assert!(!safe.contains(&[1, 1]));

        assert_eq!(deadlocks(&s).to_vec(), vec![vec![1, 1]]);

        let unsafe_r = unsafe_region(&s);
        assert!(!unsafe_r.is_empty());
        assert!(unsafe_r.contains(&[1, 1]));
    }

    #[test]
    fn central_mutex_interior_unreachable() {
        let s = build_state_space(
            &Program::parse("sem a 1\nproc P1: P(a) V(a)\nproc P2: P(a) V(a)\n").unwrap(),
        );
        let reach = reachable_set(&s);
        assert!(!reach.contains(&[1, 1]));
        // all 8 frame vertices reachable
        assert_eq!(reach.len(), 8);
    }

    #[test]
    fn two_phase_programs_can_still_deadlock() {
        let s = build_state_space(
            &Program::parse(
                "sem a 1\nsem b 1\nproc P1: P(a) P(b) V(a) V(b)\nproc P2: P(b) P(a) V(b) V(a)\n",
            )
            .unwrap(),
        );
        assert_eq!(deadlocks(&s).to_vec(), vec![vec![1, 1]]);
    }

    #[test]
    fn degenerate_extents() {
        let s = StateSpace::new(vec![0, 0], vec![]).unwrap();
        assert_eq!(safe_set(&s).to_vec(), vec![vec![0, 0]]);
        assert_eq!(reachable_set(&s).to_vec(), vec![vec![0, 0]]);
        assert!(deadlocks(&s).is_empty());

        let one = build_state_space(&Program::parse("sem a 1\nproc P: P(a) V(a)\n").unwrap());
        assert!(unsafe_region(&one).is_empty());
    }

    #[test]
    fn containment_invariants() {
        let s = swiss();
        let reach = reachable_set(&s);
        let safe = safe_set(&s);
        assert!(reach.contains(&s.bottom()));
        assert!(safe.contains(&s.top()));
        let dead = deadlocks(&s);
        let unsafe_r = unsafe_region(&s);
        for v in dead.to_vec() {
            assert!(unsafe_r.contains(&v));
        }
    }
}
