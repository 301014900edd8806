//! The derived saddle-map convention: units and twist rules for every
//! saddle type, certified at derivation time against the singular-tube
//! identities and the squares of a battery of small cubes.
//!
//! ```bash
//! cargo run -p foamcalc --example edge_rule_table
//! ```

use foamcalc::derive_edge_maps;

fn main() {
    match derive_edge_maps() {
        Ok(table) => print!("{table}"),
        Err(e) => eprintln!("derivation failed: {e}"),
    }
}
