//! The structure of the homology at a specialization with two distinct
//! roots: one generator per coloring of the components by the roots, at a
//! degree read off from the linking matrix, 2^n generators in total.
//!
//! ```bash
//! cargo run -p foamcalc --example canonical_colorings
//! ```

use foamcalc::{parse_braid, parse_pd, predict_colorings, verify_structure, Color, GaussRat};

fn main() {
    let a: GaussRat = "1".parse().unwrap();
    let h: GaussRat = "0".parse().unwrap();

    let links = [
        ("unknot", parse_pd("U1").unwrap()),
        ("two-component unlink", parse_pd("U2").unwrap()),
        ("positive Hopf link", parse_braid("s1 s1", 2).unwrap()),
        ("negative Hopf link", parse_braid("s1^-1 s1^-1", 2).unwrap()),
        ("trefoil", parse_braid("s1 s1 s1", 2).unwrap()),
    ];

    for (name, d) in links {
        println!("{name} ({} component(s)):", d.n_components());
        for (coloring, degree) in predict_colorings(&d, &a, &h).unwrap() {
            let word: String = coloring
                .assignment
                .iter()
                .map(|c| match c {
                    Color::Alpha => 'a',
                    Color::Beta => 'b',
                })
                .collect();
            println!("  coloring {word} -> degree {degree}");
        }
        let report = verify_structure(&d, &a, &h).unwrap();
        println!(
            "  homology check: {} (total dimension {})",
            if report.pass { "pass" } else { "FAIL" },
            report.computed.iter().map(|e| e.dim).sum::<usize>()
        );
    }
}
