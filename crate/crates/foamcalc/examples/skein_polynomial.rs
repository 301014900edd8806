//! The quantum sl(2) polynomial by the brute-force state sum over all
//! resolutions.
//!
//! ```bash
//! cargo run -p foamcalc --example skein_polynomial
//! ```

use foamcalc::{parse_braid, parse_pd, skein};

fn main() {
    let links = [
        ("unknot", parse_pd("U1").unwrap()),
        ("two-component unlink", parse_pd("U2").unwrap()),
        ("positive Hopf link", parse_braid("s1 s1", 2).unwrap()),
        ("right trefoil", parse_braid("s1 s1 s1", 2).unwrap()),
        ("left trefoil", parse_braid("s1^-1 s1^-1 s1^-1", 2).unwrap()),
        ("figure eight", parse_braid("s1 s2^-1 s1 s2^-1", 3).unwrap()),
    ];
    for (name, d) in links {
        println!(
            "{name:24} {} crossings, writhe {:+}: {}",
            d.n_crossings(),
            d.writhe(),
            skein::p2(&d)
        );
    }
}
