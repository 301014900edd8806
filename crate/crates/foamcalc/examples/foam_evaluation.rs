//! Evaluating closed dotted foams: spheres, higher-genus surfaces, and the
//! two-facet foams with a singular circle.
//!
//! ```bash
//! cargo run -p foamcalc --example foam_evaluation
//! ```

use foamcalc::{compile_word, eval_closed_surface, ufo_value, FoamGen, Ordering2};

fn main() {
    println!("closed orientable surfaces, genus x dots:");
    for genus in 0..=4 {
        for dots in 0..=2 {
            println!(
                "  genus {genus}, {dots} dot(s): {}",
                eval_closed_surface(genus, dots)
            );
        }
    }

    println!("\ntwo disks along one singular circle (left ordering):");
    for (bottom, top) in [(false, false), (true, false), (false, true), (true, true)] {
        println!(
            "  dots (bottom={}, top={}): {}",
            bottom as u8,
            top as u8,
            ufo_value(bottom, top, Ordering2::Left)
        );
    }

    // Foams are words in generating pieces, compiled to exact matrices.
    // A sphere carrying two singular circles evaluates to minus the plain
    // sphere, hence to zero; with a dot it picks up the sign.
    let word = [
        FoamGen::cup(),
        FoamGen::annulus(0, Ordering2::Left),
        FoamGen::annulus(0, Ordering2::Left),
        FoamGen::dot(0),
        FoamGen::cap(0),
    ];
    let (map, degree) = compile_word(&word, 0).unwrap();
    println!(
        "\nsphere with two singular circles and a dot: {} (foam degree {degree})",
        map.scalar().unwrap()
    );
}
