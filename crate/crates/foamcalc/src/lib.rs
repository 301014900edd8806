//! foamcalc computes the universal sl(2) link cohomology built from webs
//! and dotted foams: an exact, two-parameter Khovanov-type invariant over
//! Z[i][a, h] whose graded Euler characteristic is the quantum sl(2)
//! polynomial.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! PD / braid text --> LinkDiagram --> cube of resolutions --> ChainComplex
//!                                         |                       |
//!                                  skein state sum          simplify + exact
//!                                  (independent oracle)     homology ranks
//! ```
//!
//! plus closed-form evaluators for closed foams, closed surfaces in
//! four-space, and the canonical-coloring structure of the homology at a
//! specialization with distinct roots.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `foamcalc` binary for the command-line front end.

pub mod analysis;
pub mod cli;
pub mod coeff;
pub mod complex;
pub mod diagram;
pub mod frobenius;
pub mod skein;

pub use analysis::{
    predict_colorings, surface_invariant, trivial_surface_pairing, verify_structure, AlgGenerator,
    AnalysisError, CanonicalColoring, Color, StructureReport, SurfaceKnot,
};
pub use coeff::{GaussPoly, GaussRat, LaurentBi, LaurentQ, PolyDegree};
pub use complex::{
    build_complex, derive_edge_maps, euler_characteristic, simplify, BuildError, ChainComplex,
    EdgeRuleTable, Gen, HomEntry, HomologyTable,
};
pub use diagram::{parse_braid, parse_pd, DiagramError, LinkDiagram, ResolutionState};
pub use frobenius::{
    alg_comul, alg_counit, alg_mul, apply_gen, compile_word, eval_closed_surface, sing_annulus,
    ufo_value, AlgElem, FoamError, FoamGen, LinearMap, Ordering2, TensorVec,
};
pub use skein::{bracket, p2};
