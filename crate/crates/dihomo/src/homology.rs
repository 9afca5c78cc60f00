//! Integer cubical homology of a state space.
//!
//! The surviving cells are exactly the grid cells whose closed realization
//! misses every open forbidden box; with integer box bounds the union of
//! those closed cells equals the state space point for point, so no
//! approximation argument is needed. Boundary matrices use the standard
//! cubical signs, homology groups come out of Smith normal form over
//! arbitrary-precision integers, and the relative homology of the space
//! against its one-process skeleton is what the serializability analysis
//! consumes.

use crate::geom::StateSpace;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("dimension {d} exceeds complex dimension {n}")]
    DimensionOutOfRange { d: usize, n: usize },
    #[error("subcomplex cell {cell:?} is missing from the ambient complex")]
    NotSubcomplex { cell: String },
    #[error("analysis is defined for 2 processes, space has {n}")]
    RequiresTwoProcesses { n: usize },
}

/// A grid cell: a base vertex and the set of axes it extends one unit along.
/// Axes are kept sorted; the cell dimension is the number of axes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub base: Vec<u32>,
    pub axes: Vec<usize>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }
}

/// All surviving cells of a state space, listed per dimension in a fixed
/// deterministic order (axis subsets lexicographically, then base vertices
/// lexicographically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalComplex {
    n: usize,
    extents: Vec<u32>,
    cells: Vec<Vec<Cell>>,
}

impl CubicalComplex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extents(&self) -> &[u32] {
        &self.extents
    }

    /// Cells of one dimension; empty past the complex dimension.
    pub fn cells(&self, d: usize) -> &[Cell] {
        static EMPTY: Vec<Cell> = Vec::new();
        self.cells.get(d).unwrap_or(&EMPTY)
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    /// An empty complex over the same grid, the trivial subcomplex.
    pub fn empty_like(&self) -> CubicalComplex {
        CubicalComplex {
            n: self.n,
            extents: self.extents.clone(),
            cells: vec![Vec::new(); self.cells.len()],
        }
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells(cell.dim()).binary_search(cell).is_ok()
    }

    /// Every face of every cell must itself be present.
    pub fn closure_holds(&self) -> bool {
        self.cells.iter().flatten().all(|cell| {
            boundary_faces(cell).into_iter().all(|(_, face)| self.contains(&face))
        })
    }
}

/// Builds the complex of all cells whose closed realization avoids every
/// box. A closed interval `[a, b]` meets an open interval `(l, u)` exactly
/// when `b > l` and `a < u`, so the test is per-axis integer comparison.
pub fn build_complex(s: &StateSpace) -> CubicalComplex {
    let n = s.n();
    let extents = s.extents().to_vec();
    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); n + 1];
    for axes in axis_subsets(n) {
        let d = axes.len();
        // base ranges: one less along extruded axes
        let mut base_extents = extents.clone();
        let mut degenerate = false;
        for &a in &axes {
            if extents[a] == 0 {
                degenerate = true;
                break;
            }
            base_extents[a] -= 1;
        }
        if degenerate {
            continue;
        }
        for base in crate::geom::vertices(&base_extents) {
            let cell = Cell { base, axes: axes.clone() };
            if cell_avoids_boxes(s, &cell) {
                cells[d].push(cell);
            }
        }
    }
    for layer in &mut cells {
        layer.sort();
    }
    CubicalComplex { n, extents, cells }
}

fn cell_avoids_boxes(s: &StateSpace, cell: &Cell) -> bool {
    'boxes: for b in s.boxes() {
        for axis in 0..s.n() {
            let lo = cell.base[axis] as i64;
            let hi = if cell.axes.contains(&axis) { lo + 1 } else { lo };
            if !(hi > b.lo(axis) && lo < b.hi(axis)) {
                continue 'boxes;
            }
        }
        return false;
    }
    true
}

/// Subsets of `0..n` ordered by size then lexicographically.
fn axis_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| (a.len(), a.clone()).cmp(&(b.len(), b.clone())));
    out
}

/// The cells lying entirely in the one-process skeleton: at least `n - 1`
/// axes sit degenerate at an extreme coordinate. An extruded axis is never
/// extreme, so only vertices and edges survive for `n >= 2`.
pub fn sub_complex_x1(c: &CubicalComplex) -> CubicalComplex {
    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); c.cells.len()];
    for layer in &c.cells {
        for cell in layer {
            let extreme = (0..c.n)
                .filter(|&a| {
                    !cell.axes.contains(&a)
                        && (cell.base[a] == 0 || cell.base[a] == c.extents[a])
                })
                .count();
            if extreme + 1 >= c.n {
                cells[cell.dim()].push(cell.clone());
            }
        }
    }
    CubicalComplex { n: c.n, extents: c.extents.clone(), cells }
}

/// Signed faces of a cell: along the k-th extruded axis (zero-based position
/// in the sorted axis list) the front face minus the back face, weighted by
/// `(-1)^k`.
fn boundary_faces(cell: &Cell) -> Vec<(i32, Cell)> {
    let mut out = Vec::with_capacity(2 * cell.dim());
    for (k, &axis) in cell.axes.iter().enumerate() {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let mut axes = cell.axes.clone();
        axes.remove(k);
        let mut front = cell.base.clone();
        front[axis] += 1;
        out.push((sign, Cell { base: front, axes: axes.clone() }));
        out.push((-sign, Cell { base: cell.base.clone(), axes }));
    }
    out
}

/// A dense integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    if !add.is_zero() {
                        let cur = out.get(i, j) + add;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = factor * self.get(source, j);
            let v = self.get(target, j) + add;
            self.set(target, j, v);
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = factor * self.get(i, source);
            let v = self.get(i, target) + add;
            self.set(i, target, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }
}

/// `u * a * v = d` with `d` diagonal, each diagonal entry dividing the next,
/// and `u`, `v` products of swaps, negations, and integer shears (hence of
/// determinant plus or minus one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithNormalForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithNormalForm {
    /// Nonzero diagonal entries, the elementary divisors.
    pub fn divisors(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k)
            .map(|i| self.d.get(i, i).clone())
            .filter(|v| !v.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithNormalForm {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut v = IntMatrix::identity(a.cols());
    let limit = a.rows().min(a.cols());

    for k in 0..limit {
        'pivot: loop {
            // smallest nonzero magnitude in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..d.rows() {
                for j in k..d.cols() {
                    let val = d.get(i, j);
                    if val.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if d.get(bi, bj).abs() <= val.abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let (pi, pj) = match best {
                Some(p) => p,
                None => return SmithNormalForm { d, u, v },
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);
            if d.get(k, k).is_negative() {
                d.negate_row(k);
                u.negate_row(k);
            }

            let pivot = d.get(k, k).clone();
            let mut dirty = false;
            for i in k + 1..d.rows() {
                let q = -(d.get(i, k) / &pivot);
                d.add_row_multiple(i, k, &q);
                u.add_row_multiple(i, k, &q);
                if !d.get(i, k).is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..d.cols() {
                let q = -(d.get(k, j) / &pivot);
                d.add_col_multiple(j, k, &q);
                v.add_col_multiple(j, k, &q);
                if !d.get(k, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // pivot must divide the whole trailing block
            for i in k + 1..d.rows() {
                for j in k + 1..d.cols() {
                    if !(d.get(i, j) % &pivot).is_zero() {
                        d.add_row_multiple(k, i, &BigInt::one());
                        u.add_row_multiple(k, i, &BigInt::one());
                        continue 'pivot;
                    }
                }
            }
            break;
        }
    }
    SmithNormalForm { d, u, v }
}

/// One homology group: free rank and torsion coefficients (each > 1, in
/// divisibility order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

/// The boundary matrix from dimension `d` cells to dimension `d - 1` cells.
/// For `d = 0` this is the zero map out of the vertices.
pub fn boundary_matrix(c: &CubicalComplex, d: usize) -> Result<IntMatrix, HomologyError> {
    if d > c.n() {
        return Err(HomologyError::DimensionOutOfRange { d, n: c.n() });
    }
    if d == 0 {
        return Ok(IntMatrix::zeros(0, c.cells(0).len()));
    }
    let rows_index: HashMap<&Cell, usize> =
        c.cells(d - 1).iter().enumerate().map(|(i, cell)| (cell, i)).collect();
    let mut m = IntMatrix::zeros(c.cells(d - 1).len(), c.cells(d).len());
    for (j, cell) in c.cells(d).iter().enumerate() {
        for (sign, face) in boundary_faces(cell) {
            let i = *rows_index.get(&face).expect("closure property");
            let v = m.get(i, j) + BigInt::from(sign);
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Absolute homology of the complex in degree `d`.
pub fn homology(c: &CubicalComplex, d: usize) -> Result<HomologyGroup, HomologyError> {
    relative_homology(c, &c.empty_like(), d)
}

/// Homology of the quotient chain complex of the pair in degree `d`.
///
/// The relative chain groups are spanned by the ambient cells not in the
/// subcomplex; boundary terms landing in the subcomplex are dropped.
pub fn relative_homology(
    c: &CubicalComplex,
    sub: &CubicalComplex,
    d: usize,
) -> Result<HomologyGroup, HomologyError> {
    if d > c.n() {
        return Err(HomologyError::DimensionOutOfRange { d, n: c.n() });
    }
    for layer in &sub.cells {
        for cell in layer {
            if !c.contains(cell) {
                return Err(HomologyError::NotSubcomplex { cell: format!("{cell:?}") });
            }
        }
    }

    let rel_cells = |dim: usize| -> Vec<&Cell> {
        c.cells(dim).iter().filter(|cell| !sub.contains(cell)).collect()
    };
    let rel_boundary = |dim: usize| -> IntMatrix {
        if dim == 0 || dim > c.n() {
            let cols = if dim > c.n() { 0 } else { rel_cells(dim).len() };
            return IntMatrix::zeros(0, cols);
        }
        let domain = rel_cells(dim);
        let codomain = rel_cells(dim - 1);
        let index: HashMap<&Cell, usize> =
            codomain.iter().enumerate().map(|(i, &cell)| (cell, i)).collect();
        let mut m = IntMatrix::zeros(codomain.len(), domain.len());
        for (j, cell) in domain.iter().enumerate() {
            for (sign, face) in boundary_faces(cell) {
                if let Some(&i) = index.get(&face) {
                    let v = m.get(i, j) + BigInt::from(sign);
                    m.set(i, j, v);
                }
            }
        }
        m
    };

    let dim_d = rel_cells(d).len();
    let rank_d = if d == 0 { 0 } else { smith_normal_form(&rel_boundary(d)).rank() };
    let snf_up = smith_normal_form(&rel_boundary(d + 1));
    let rank_up = snf_up.rank();
    let betti = dim_d - rank_d - rank_up;
    let torsion: Vec<BigInt> = snf_up
        .divisors()
        .into_iter()
        .filter(|v| v > &BigInt::one())
        .collect();
    Ok(HomologyGroup { betti, torsion })
}

/// Number of connected components of the forbidden region: components of the
/// graph on boxes whose edges are nonempty open intersections.
pub fn forbidden_components(s: &StateSpace) -> usize {
    let boxes = s.boxes();
    let mut parent: Vec<usize> = (0..boxes.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].meets_box(&boxes[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..boxes.len()).filter(|&i| find(&mut parent, i) == i).count()
}

/// The duality comparison for two-process spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlexanderCheck {
    pub h1: HomologyGroup,
    pub forbidden_components: usize,
}

impl AlexanderCheck {
    pub fn expected_rank(&self) -> usize {
        self.forbidden_components.saturating_sub(1)
    }

    /// Rank of the first relative group equals components minus one (floored
    /// at zero) with no torsion.
    pub fn holds(&self) -> bool {
        self.h1.betti == self.expected_rank() && self.h1.torsion.is_empty()
    }
}

/// Computes the first homology of the pair (space, one-process skeleton) and
/// the forbidden component count for a two-process space.
pub fn alexander_check(s: &StateSpace) -> Result<AlexanderCheck, HomologyError> {
    if s.n() != 2 {
        return Err(HomologyError::RequiresTwoProcesses { n: s.n() });
    }
    let c = build_complex(s);
    let sub = sub_complex_x1(&c);
    let h1 = relative_homology(&c, &sub, 1)?;
    Ok(AlexanderCheck { h1, forbidden_components: forbidden_components(s) })
}
