//! Building the cube complex, cancelling unit entries, and computing exact
//! homology tables: bigraded at a = h = 0 and filtered elsewhere.
//!
//! ```bash
//! cargo run -p foamcalc --example homology_tables
//! ```

use foamcalc::{build_complex, parse_braid, simplify, GaussRat};

fn main() {
    let trefoil = parse_braid("s1 s1 s1", 2).unwrap();
    let complex = build_complex(&trefoil).unwrap();
    println!(
        "right trefoil cube: {} generators before simplification",
        complex.total_generators()
    );
    let slim = simplify(complex);
    println!("after unit cancellation: {}", slim.total_generators());

    let zero = GaussRat::zero();
    let one = GaussRat::one();

    println!("\nbigraded homology at a = 0, h = 0:");
    println!("{}", slim.homology(&zero, &zero));

    println!("\nfiltered homology at a = 1, h = 0 (two distinct roots):");
    println!("{}", slim.homology(&one, &zero));

    // Any exact specialization works, including non-integral ones.
    println!("\nfiltered homology at a = 1/2, h = 3:");
    println!(
        "{}",
        slim.homology(&"1/2".parse().unwrap(), &"3".parse().unwrap())
    );

    println!("\nJSON rendering of the bigraded table:");
    println!("{}", slim.homology(&zero, &zero).to_json());
}
