//! Diffeomorphism classification of simply connected 3-dimensional Mori
//! fiber spaces with torsion-free homology.
//!
//! The crate computes, from algebro-geometric input data, the finite tuple of
//! numerical invariants that classifies such a space up to oriented
//! diffeomorphism, and decides whether two spaces are diffeomorphic by a
//! complete case analysis over the base dimension. Independent brute-force
//! oracles (reflection-orbit enumeration on unimodular lattices, bounded
//! unimodular search for cubic-form equivalence) cross-check the closed-form
//! decision rules.
//!
//! Modules:
//! * [`lattice`] — exact arithmetic on unimodular symmetric bilinear forms:
//!   norms, types, signatures, reflection isometries, bounded orbit searches.
//! * [`cubic`] — symmetric trilinear forms on `H^2`, the full
//!   (cubic, p1-pairing, w2, b3) diffeomorphism invariant of a simply
//!   connected torsion-free 6-manifold, and a bounded equivalence oracle.
//! * [`mfs`] — the four input families (rank-one Fano, del Pezzo fibration
//!   over the line, smooth conic bundle, singular conic bundle), their
//!   validation, and the characteristic-class formulas that extract the
//!   invariant record and the full invariant triple.
//! * [`classifier`] — the pairwise decision procedure, the cross-dimension
//!   exceptions, and a bounded census.
//! * [`format`] — the line-based `[mfs]` description format used by the CLI.
//! * [`verify`] — seeded verification suites run by `mori-class verify` and
//!   by the acceptance tests.

pub mod classifier;
pub mod cubic;
pub mod format;
pub mod intmat;
pub mod lattice;
pub mod mfs;
pub mod verify;

pub use classifier::{canonical_records, census, compare, Branch, Outcome, Verdict};
pub use cubic::{equivalent_bounded, CubicForm, Equivalence, WallJuppTriple};
pub use lattice::{
    divisibility, BilinearLattice, IsometryMap, LatticeVector, Mod2Class, Parity, SearchOutcome,
    SearchParams, VectorType,
};
pub use mfs::{
    hodge_feasibility, DelPezzoFibration, FanoRankOne, InvariantRecord, MfsDescription,
    SingularConicBundle, SmoothConicBundle, SurfaceData,
};
