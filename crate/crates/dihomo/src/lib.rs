//! Geometric analysis of shared-lock concurrency.
//!
//! A lock program (sequential processes issuing `P`/`V` operations on
//! counting semaphores) induces a directed state space: a hypercube with
//! integer extents minus a union of open axis-aligned boxes, one coordinate
//! axis per process. This crate builds that space and answers the questions
//! that matter about it: which states are reachable or doomed, which complete
//! interleavings exist, how interleavings fall into deformation classes under
//! local square swaps, whether every execution is equivalent to a serial one,
//! and what the integer homology of the space relative to its
//! one-process-at-a-time skeleton looks like.
//!
//! Module map:
//!
//! * [`pv`] — program text front end, two-phase detection, seeded generation
//! * [`geom`] — state spaces, forbidden boxes, exact edge/square/skeleton queries
//! * [`exec`] — reachable, safe, deadlock, and unsafe vertex sets
//! * [`dihomotopy`] — schedule enumeration, swap classes, serializability
//! * [`moore`] — exact rational paths with explicit durations and
//!   duration-adding composition
//! * [`monoid`] — monoid presentations, shortlex completion, group completion
//! * [`homology`] — cubical complexes, Smith normal form, relative homology
//! * [`report`] — raw-geometry loader and canonical JSON reports
//!
//! Everything is computed exactly: geometry with integer comparisons, paths
//! with arbitrary-precision rationals, homology with arbitrary-precision
//! integers. All values are immutable after construction and all analyses are
//! pure functions of their inputs, so the whole API is safe to call from any
//! number of threads.

pub mod dihomotopy;
pub mod exec;
pub mod geom;
pub mod homology;
pub mod monoid;
pub mod moore;
pub mod pv;
pub mod report;
