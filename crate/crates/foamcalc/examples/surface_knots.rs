//! Invariants of closed surfaces embedded in four-space: determined by the
//! genus alone, vanishing in even genus.
//!
//! ```bash
//! cargo run -p foamcalc --example surface_knots
//! ```

use foamcalc::{surface_invariant, trivial_surface_pairing, AlgGenerator, SurfaceKnot};

fn main() {
    println!("surface invariant by genus:");
    for genus in 0..=7 {
        println!(
            "  genus {genus}: {}",
            surface_invariant(SurfaceKnot { genus })
        );
    }

    println!("\npunctured trivial surface of even genus, paired with 1 and X:");
    for genus in [0, 2, 4] {
        println!(
            "  genus {genus}: 1 -> {},  X -> {}",
            trivial_surface_pairing(genus, AlgGenerator::One).unwrap(),
            trivial_surface_pairing(genus, AlgGenerator::X).unwrap(),
        );
    }
}
