//! Closed-form consequences of the theory: invariants of closed surfaces in
//! four-space, and the canonical-coloring structure of the homology over a
//! specialization where X^2 - hX - a has two distinct roots.
//!
//! An n-component link has 2^n canonical colorings (one root per
//! component). Each contributes one homology generator whose cohomological
//! degree is -2 times the total linking number between the two color
//! classes, i.e. -2 sum over unordered pairs of differently colored
//! components of lk. Only the crossings between differently colored
//! components resolve to the singular smoothing, at -1 per positive and +1
//! per negative crossing, which is where that count comes from.

use num::{BigInt, BigRational, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{GaussPoly, GaussRat};
use crate::complex::{build_complex, simplify, BuildError, HomologyTable};
use crate::diagram::LinkDiagram;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("specialization has a repeated root (h^2 + 4a = 0); use the graded a = h = 0 computation after shifting X by h/2")]
    RepeatedRoot,
    #[error("surface pairing is defined for even genus only, got {0}")]
    OddGenus(u32),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// A closed orientable surface embedded in four-space; only the genus
/// enters its invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceKnot {
    pub genus: u32,
}

/// The invariant of a closed surface of the given genus: 0 for even genus
/// and 2 (h^2 + 4a)^{(g-1)/2} for odd genus.
pub fn surface_invariant(s: SurfaceKnot) -> GaussPoly {
    if s.genus % 2 == 0 {
        GaussPoly::zero()
    } else {
        let k = (s.genus - 1) / 2;
        let disc: GaussPoly = "h^2 + 4a".parse().unwrap();
        &GaussPoly::from_int(2) * &disc.pow(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgGenerator {
    One,
    X,
}

/// The punctured trivial surface of even genus 2k, read as a map from the
/// circle's state space to the ground ring: X goes to (h^2 + 4a)^k and 1
/// goes to 0.
pub fn trivial_surface_pairing(genus: u32, gen: AlgGenerator) -> Result<GaussPoly, AnalysisError> {
    if genus % 2 != 0 {
        return Err(AnalysisError::OddGenus(genus));
    }
    let k = genus / 2;
    Ok(match gen {
        AlgGenerator::One => GaussPoly::zero(),
        AlgGenerator::X => {
            let disc: GaussPoly = "h^2 + 4a".parse().unwrap();
            disc.pow(k)
        }
    })
}

/// One root per link component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalColoring {
    pub assignment: Vec<Color>,
}

fn has_distinct_roots(a_val: &GaussRat, h_val: &GaussRat) -> bool {
    let four = GaussRat::from_int(4);
    let disc = &(h_val * h_val) + &(&four * a_val);
    !disc.is_zero()
}

/// All 2^n canonical colorings with their predicted cohomological degrees,
/// computed from the linking matrix alone.
pub fn predict_colorings(
    d: &LinkDiagram,
    a_val: &GaussRat,
    h_val: &GaussRat,
) -> Result<Vec<(CanonicalColoring, i64)>, AnalysisError> {
    if !has_distinct_roots(a_val, h_val) {
        return Err(AnalysisError::RepeatedRoot);
    }
    let n = d.n_components();
    let lk = d.linking_matrix();
    let mut out = Vec::with_capacity(1 << n);
    for bits in 0..1u64 << n {
        let assignment: Vec<Color> = (0..n)
            .map(|k| {
                if bits >> k & 1 == 1 {
                    Color::Beta
                } else {
                    Color::Alpha
                }
            })
            .collect();
        let mut degree = BigRational::zero();
        for u in 0..n {
            for v in (u + 1)..n {
                if assignment[u] != assignment[v] {
                    degree += &lk[u][v];
                }
            }
        }
        let degree = degree * BigRational::from_integer(BigInt::from(-2));
        assert!(
            degree.denom().abs() == BigInt::from(1),
            "degree is integral"
        );
        let degree: i64 = degree
            .numer()
            .try_into()
            .expect("degree fits in a machine integer");
        out.push((CanonicalColoring { assignment }, degree));
    }
    Ok(out)
}

/// Comparison of the coloring predictions against a computed homology
/// table: the total dimension must be 2^n and the multiset of occupied
/// degrees must match.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub predicted: Vec<PredictedEntry>,
    pub computed: Vec<ComputedEntry>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictedEntry {
    pub coloring: Vec<Color>,
    pub degree: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputedEntry {
    pub i: i64,
    pub dim: usize,
}

impl StructureReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Runs the homology at the given specialization and checks the structure
/// theorem's dimension and degree predictions against it.
pub fn verify_structure(
    d: &LinkDiagram,
    a_val: &GaussRat,
    h_val: &GaussRat,
) -> Result<StructureReport, AnalysisError> {
    let predictions = predict_colorings(d, a_val, h_val)?;
    let complex = simplify(build_complex(d)?);
    let table: HomologyTable = complex.homology(a_val, h_val);

    let mut predicted_dims = std::collections::BTreeMap::new();
    for (_, deg) in &predictions {
        *predicted_dims.entry(*deg).or_insert(0usize) += 1;
    }
    let computed_dims = table.dims_by_degree();
    let pass =
        predicted_dims == computed_dims && table.total_dimension() == 1usize << d.n_components();

    Ok(StructureReport {
        n: d.n_components(),
        predicted: predictions
            .into_iter()
            .map(|(c, degree)| PredictedEntry {
                coloring: c.assignment,
                degree,
            })
            .collect(),
        computed: computed_dims
            .into_iter()
            .map(|(i, dim)| ComputedEntry { i, dim })
            .collect(),
        pass,
    })
}

/// Dimensions at a repeated-root specialization equal the graded a = h = 0
/// dimensions: shifting X by the double root h/2 is an isomorphism onto the
/// graded case. This routes such a request through the graded computation.
pub fn repeated_root_homology(d: &LinkDiagram) -> Result<HomologyTable, AnalysisError> {
    let complex = simplify(build_complex(d)?);
    Ok(complex.homology(&GaussRat::zero(), &GaussRat::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_braid, parse_pd};

    fn gp(s: &str) -> GaussPoly {
        s.parse().unwrap()
    }

    #[test]
    fn surface_invariants() {
        assert_eq!(surface_invariant(SurfaceKnot { genus: 0 }), gp("0"));
        assert_eq!(surface_invariant(SurfaceKnot { genus: 1 }), gp("2"));
        assert_eq!(surface_invariant(SurfaceKnot { genus: 2 }), gp("0"));
        assert_eq!(
            surface_invariant(SurfaceKnot { genus: 3 }),
            gp("2*h^2 + 8*a")
        );
        assert_eq!(surface_invariant(SurfaceKnot { genus: 4 }), gp("0"));
    }

    #[test]
    fn surface_invariant_degree() {
        use crate::coeff::PolyDegree;
        for g in [1u32, 3, 5, 7] {
            let inv = surface_invariant(SurfaceKnot { genus: g });
            assert_eq!(inv.degree(), PolyDegree::Homogeneous(2 * (g as i64 - 1)));
        }
    }

    #[test]
    fn pairing_table() {
        assert_eq!(
            trivial_surface_pairing(0, AlgGenerator::X).unwrap(),
            gp("1")
        );
        assert_eq!(
            trivial_surface_pairing(0, AlgGenerator::One).unwrap(),
            gp("0")
        );
        assert_eq!(
            trivial_surface_pairing(2, AlgGenerator::X).unwrap(),
            gp("h^2 + 4a")
        );
        assert!(matches!(
            trivial_surface_pairing(3, AlgGenerator::X),
            Err(AnalysisError::OddGenus(3))
        ));
    }

    #[test]
    fn coloring_predictions() {
        let one = GaussRat::one();
        let zero = GaussRat::zero();

        let unknot = parse_pd("U1").unwrap();
        let p = predict_colorings(&unknot, &one, &zero).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|(_, d)| *d == 0));

        let hopf = parse_braid("s1 s1", 2).unwrap();
        let p = predict_colorings(&hopf, &one, &zero).unwrap();
        assert_eq!(p.len(), 4);
        let degrees: Vec<i64> = p.iter().map(|(_, d)| *d).collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 0).count(), 2);
        assert_eq!(degrees.iter().filter(|&&d| d == -2).count(), 2);

        let unlink = parse_pd("U2").unwrap();
        let p = predict_colorings(&unlink, &one, &zero).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|(_, d)| *d == 0));
    }

    #[test]
    fn coloring_count_and_parity() {
        let one = GaussRat::one();
        let zero = GaussRat::zero();
        for d in [
            parse_braid("s1 s1", 2).unwrap(),
            parse_braid("s1 s1 s1", 2).unwrap(),
            parse_braid("s1 s2^-1 s1 s2^-1", 3).unwrap(),
        ] {
            let p = predict_colorings(&d, &one, &zero).unwrap();
            assert_eq!(p.len(), 1 << d.n_components());
            // degrees are even; constant colorings sit at 0; the degree
            // multiset is symmetric under a global color swap
            let mut degs: Vec<i64> = p.iter().map(|(_, deg)| *deg).collect();
            assert!(degs.iter().all(|deg| deg % 2 == 0));
            assert_eq!(p[0].1, 0);
            let mut swapped: Vec<i64> = p
                .iter()
                .map(|(c, _)| {
                    let flipped: Vec<Color> = c
                        .assignment
                        .iter()
                        .map(|v| match v {
                            Color::Alpha => Color::Beta,
                            Color::Beta => Color::Alpha,
                        })
                        .collect();
                    p.iter().find(|(c2, _)| c2.assignment == flipped).unwrap().1
                })
                .collect();
            degs.sort();
            swapped.sort();
            assert_eq!(degs, swapped);
        }
    }

    #[test]
    fn repeated_root_rejected() {
        let d = parse_pd("U1").unwrap();
        let err = predict_colorings(&d, &"-1/4".parse().unwrap(), &GaussRat::one());
        assert!(matches!(err, Err(AnalysisError::RepeatedRoot)));
    }

    #[test]
    fn structure_small_links() {
        let one = GaussRat::one();
        let zero = GaussRat::zero();
        for d in [
            parse_pd("U1").unwrap(),
            parse_braid("s1 s1", 2).unwrap(),
            parse_braid("s1 s1 s1", 2).unwrap(),
        ] {
            let report = verify_structure(&d, &one, &zero).unwrap();
            assert!(report.pass, "structure check failed for {d}");
        }
    }

    #[test]
    fn structure_detects_mismatch_against_wrong_table() {
        // comparing the unknot's predictions against the Hopf link's
        // homology dimensions must fail
        let one = GaussRat::one();
        let zero = GaussRat::zero();
        let unknot = parse_pd("U1").unwrap();
        let hopf = parse_braid("s1 s1", 2).unwrap();
        let pred = predict_colorings(&unknot, &one, &zero).unwrap();
        let hopf_hom = simplify(build_complex(&hopf).unwrap()).homology(&one, &zero);
        assert_ne!(pred.len(), hopf_hom.total_dimension());
    }
}
