//! Cross-check: the graded Euler characteristic of the cube complex equals
//! the skein state sum, link by link.
//!
//! ```bash
//! cargo run -p foamcalc --example euler_vs_skein
//! ```

use foamcalc::{build_complex, parse_braid, parse_pd, skein, LinkDiagram};

fn main() {
    let links: Vec<(&str, LinkDiagram)> = vec![
        ("unknot", parse_pd("U1").unwrap()),
        ("hopf", parse_braid("s1 s1", 2).unwrap()),
        ("trefoil", parse_braid("s1 s1 s1", 2).unwrap()),
        ("figure eight", parse_braid("s1 s2^-1 s1 s2^-1", 3).unwrap()),
        ("5-crossing", parse_braid("s1 s1 s1 s1 s1", 2).unwrap()),
        (
            "6-crossing",
            parse_braid("s1 s1 s2^-1 s1 s2^-1 s2^-1", 3).unwrap(),
        ),
    ];
    for (name, d) in links {
        let chi = build_complex(&d).unwrap().euler_characteristic();
        let p2 = skein::p2(&d);
        let verdict = if chi == p2 { "agree" } else { "DISAGREE" };
        println!("{name:14} chi = {chi}");
        println!("{:14} sum = {p2}  [{verdict}]", "");
    }
}
