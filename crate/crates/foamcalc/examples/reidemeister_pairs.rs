//! Invariance in action: diagrams of the same link related by Reidemeister
//! moves produce identical homology tables.
//!
//! ```bash
//! cargo run -p foamcalc --example reidemeister_pairs
//! ```

use foamcalc::{build_complex, parse_braid, parse_pd, simplify, GaussRat};

fn main() {
    let zero = GaussRat::zero();
    let pairs = [
        (
            "unknot vs positive kink (R1)",
            parse_pd("U1").unwrap(),
            parse_braid("s1", 2).unwrap(),
        ),
        (
            "unlink vs cancelling pair (R2)",
            parse_pd("U2").unwrap(),
            parse_braid("s1 s1^-1", 2).unwrap(),
        ),
        (
            "braid relation (R3)",
            parse_braid("s1 s2 s1", 3).unwrap(),
            parse_braid("s2 s1 s2", 3).unwrap(),
        ),
        (
            "trefoil vs stabilized trefoil",
            parse_braid("s1 s1 s1", 2).unwrap(),
            parse_braid("s1 s1 s1 s2", 3).unwrap(),
        ),
    ];
    for (name, d1, d2) in pairs {
        let t1 = simplify(build_complex(&d1).unwrap()).homology(&zero, &zero);
        let t2 = simplify(build_complex(&d2).unwrap()).homology(&zero, &zero);
        println!(
            "{name}: {}",
            if t1 == t2 {
                "tables agree"
            } else {
                "TABLES DIFFER"
            }
        );
        println!("  {}", t1.poincare);
    }

    // and a non-pair for contrast
    let unknot = simplify(build_complex(&parse_pd("U1").unwrap()).unwrap());
    let hopf = simplify(build_complex(&parse_braid("s1 s1", 2).unwrap()).unwrap());
    let same = unknot.homology(&zero, &zero) == hopf.homology(&zero, &zero);
    println!(
        "unknot vs Hopf link: {}",
        if same {
            "tables agree (!)"
        } else {
            "distinguished, as they should be"
        }
    );
}
