//! Independent state-sum oracle for the quantum sl(2) polynomial of a link.
//!
//! Every resolution contributes (q + q^{-1})^{#circles} weighted per
//! crossing by q for an oriented smoothing of a positive crossing, -q^2 for
//! its singular smoothing, and q^{-1} / -q^{-2} for a negative crossing.
//! The sum is deliberately brute force: it is the cross-check for the
//! cube's graded Euler characteristic, so it shares nothing with it.

use crate::coeff::LaurentQ;
use crate::diagram::{LinkDiagram, ResolutionState, Sign};

/// Bracket value of a closed web: (q + q^{-1})^{#circles}.
pub fn bracket(r: &ResolutionState) -> LaurentQ {
    LaurentQ::circle().pow(r.n_circles() as u32)
}

/// The full state sum over all 2^c resolutions.
pub fn p2(d: &LinkDiagram) -> LaurentQ {
    let c = d.n_crossings();
    let mut total = LaurentQ::zero();
    for bits in 0..1u64 << c {
        let choice: Vec<bool> = (0..c).map(|k| bits >> k & 1 == 1).collect();
        let state = d.resolve(&choice).expect("choice length matches");
        let mut weight = LaurentQ::one();
        for (x, &singular) in choice.iter().enumerate() {
            let factor = match (d.crossings[x].sign, singular) {
                (Sign::Positive, false) => LaurentQ::monomial(1, 1),
                (Sign::Positive, true) => LaurentQ::monomial(2, -1),
                (Sign::Negative, false) => LaurentQ::monomial(-1, 1),
                (Sign::Negative, true) => LaurentQ::monomial(-2, -1),
            };
            weight = &weight * &factor;
        }
        total = &total + &(&weight * &bracket(&state));
    }
    total
}
