//! The cube-of-resolutions complex of a closed diagram, its simplification
//! by cancelling unit entries, and exact homology at specializations.
//!
//! Cube coordinates put the smoothing at the lower cohomological slot at
//! bit 0: a positive crossing contributes its singular resolution with
//! shift {2} at relative degree -1 and its oriented resolution with {1} at
//! degree 0, a negative crossing the oriented resolution with {-1} at 0 and
//! the singular one with {-2} at +1. Differentials along positive-crossing
//! edges are therefore singular-to-oriented saddles, along negative-crossing
//! edges oriented-to-singular ones.
//!
//! Each saddle map is a twisted merge or split: multiplication or
//! comultiplication conjugated by the root-swap involution on some tensor
//! legs, times a unit in {1, -1, i, -i}. The twists are read off from the
//! parity of the number of bivalent vertices between the saddle's attaching
//! segments and each circle's reference segment; the units are fixed by the
//! derivation step below, which certifies the convention against the
//! singular-tube relations and squares of small cubes before any complex is
//! built.
//!
//! With per-circle reference segments the raw saddle maps around a square
//! of the cube agree only up to a sign (the identification of a
//! vertex-bearing circle with the state space is itself defined up to a
//! unit). Building a complex therefore solves a sign assignment: every
//! square's relative sign is measured, a GF(2) system fixes per-edge
//! corrections on top of the alternating rule, and the result is checked
//! by composing the full differential. Distinct solutions differ by a
//! rescaling of the chain groups, so the homology does not depend on the
//! choice; the canonical solution is the plain alternating rule whenever
//! the raw squares already commute.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{GaussPoly, GaussRat, LaurentBi, LaurentQ, PolyDegree};
use crate::diagram::{Arc, DiagramError, LinkDiagram, ResolutionState, Sign, VKind};
use crate::frobenius::{alg_comul, alg_mul, AlgElem, LinearMap, TensorVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error("d^2 != 0: crossings {x} and {y} fail to anticommute at cube vertex {state:#b}")]
    DSquared { state: u64, x: usize, y: usize },
    #[error("differential is not homogeneous of quantum degree zero")]
    DegreeBroken,
    #[error("cannot cancel a non-unit entry in symbolic mode")]
    NonUnitPivot,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("no edge-map convention satisfies the relation tests: {details}")]
pub struct DeriveError {
    pub details: String,
}

// ---------------------------------------------------------------------------
// Cube coordinates
// ---------------------------------------------------------------------------

fn n_positive(d: &LinkDiagram) -> u32 {
    d.crossings
        .iter()
        .filter(|c| c.sign == Sign::Positive)
        .count() as u32
}

/// Smoothing choice (true = singular) of the cube vertex `rho`.
fn state_smoothing(d: &LinkDiagram, rho: u64) -> Vec<bool> {
    d.crossings
        .iter()
        .enumerate()
        .map(|(x, c)| match c.sign {
            Sign::Positive => rho >> x & 1 == 0,
            Sign::Negative => rho >> x & 1 == 1,
        })
        .collect()
}

fn coh_degree(d: &LinkDiagram, rho: u64) -> i64 {
    rho.count_ones() as i64 - n_positive(d) as i64
}

fn q_shift(d: &LinkDiagram, rho: u64) -> i64 {
    d.crossings
        .iter()
        .enumerate()
        .map(|(x, c)| match (c.sign, rho >> x & 1 == 1) {
            (Sign::Positive, false) => 2,
            (Sign::Positive, true) => 1,
            (Sign::Negative, false) => -1,
            (Sign::Negative, true) => -2,
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Saddle maps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleShape {
    Merge,
    Split,
}

/// A fully resolved saddle map between two resolutions: which circles it
/// consumes and produces, and the involution twists on each tensor leg.
#[derive(Debug, Clone)]
pub struct EdgeMapSpec {
    pub shape: SaddleShape,
    pub src_first: usize,
    pub src_second: usize,
    pub tgt_first: usize,
    pub tgt_second: usize,
    pub tw_first: u8,
    pub tw_second: u8,
    pub tw_pre: u8,
    pub unit: GaussRat,
    /// Saddle type code and raw parity features, for the sign rule:
    /// 0 = zip-merge, 1 = zip-split, 2 = unzip-merge, 3 = unzip-split.
    pub ty: u8,
    pub feats: [u8; 6],
}

fn nonpreferred_end(d: &LinkDiagram, x: usize, kind: VKind) -> crate::diagram::EndRef {
    let joins = d.crossings[x].singular_joins();
    let (_, e1, e2, pref) = joins
        .iter()
        .find(|(k, _, _, _)| *k == kind)
        .expect("vertex kind exists");
    if *e1 == *pref {
        *e2
    } else {
        *e1
    }
}

fn preferred_end(d: &LinkDiagram, x: usize, kind: VKind) -> crate::diagram::EndRef {
    let joins = d.crossings[x].singular_joins();
    joins
        .iter()
        .find(|(k, _, _, _)| *k == kind)
        .map(|(_, _, _, pref)| *pref)
        .expect("vertex kind exists")
}

/// Oriented-to-singular saddle at crossing `x`.
fn zip_spec(
    d: &LinkDiagram,
    x: usize,
    or_state: &ResolutionState,
    sing_state: &ResolutionState,
    unit: GaussRat,
) -> EdgeMapSpec {
    let (ca, seg_a) = or_state.or_join_pos(x, Arc::ArcA).expect("arc A resolved");
    let (cb, seg_b) = or_state.or_join_pos(x, Arc::ArcB).expect("arc B resolved");
    let (c_sink, v_sink) = sing_state.vertex_pos(x, VKind::Sink).expect("sink");
    let (c_source, v_source) = sing_state.vertex_pos(x, VKind::Source).expect("source");
    let hv = |st: &ResolutionState, c: usize| ((st.circles[c].vertex_count() / 2) % 2) as u8;
    if ca != cb {
        assert_eq!(c_sink, c_source, "merge target must carry both vertices");
        let p = or_state.circles[ca].seg_class(seg_a);
        let q = or_state.circles[cb].seg_class(seg_b);
        let pref_seg = sing_state.circles[c_sink]
            .side_segment(v_sink, preferred_end(d, x, VKind::Sink))
            .expect("sink side");
        let cp = sing_state.circles[c_sink].seg_class(pref_seg);
        EdgeMapSpec {
            shape: SaddleShape::Merge,
            src_first: ca,
            src_second: cb,
            tgt_first: c_sink,
            tgt_second: c_sink,
            tw_first: (p + 1 + cp) % 2,
            tw_second: (q + cp) % 2,
            tw_pre: 0,
            unit,
            ty: 0,
            feats: [
                p,
                q,
                cp,
                hv(or_state, ca),
                hv(or_state, cb),
                hv(sing_state, c_sink),
            ],
        }
    } else {
        assert_ne!(c_sink, c_source, "split target circles must differ");
        let ra = or_state.circles[ca].seg_class(seg_a);
        let p_seg = sing_state.circles[c_sink]
            .side_segment(v_sink, nonpreferred_end(d, x, VKind::Sink))
            .expect("sink side");
        let tp = sing_state.circles[c_sink].seg_class(p_seg);
        let q_seg = sing_state.circles[c_source]
            .side_segment(v_source, nonpreferred_end(d, x, VKind::Source))
            .expect("source side");
        let tq = sing_state.circles[c_source].seg_class(q_seg);
        EdgeMapSpec {
            shape: SaddleShape::Split,
            src_first: ca,
            src_second: ca,
            tgt_first: c_sink,
            tgt_second: c_source,
            tw_first: (tp + 1) % 2,
            tw_second: (tq + 1) % 2,
            tw_pre: (ra + 1) % 2,
            unit,
            ty: 1,
            feats: [
                ra,
                tp,
                tq,
                hv(or_state, ca),
                hv(sing_state, c_sink),
                hv(sing_state, c_source),
            ],
        }
    }
}

/// Singular-to-oriented saddle at crossing `x`.
fn unzip_spec(
    d: &LinkDiagram,
    x: usize,
    sing_state: &ResolutionState,
    or_state: &ResolutionState,
    unit: GaussRat,
) -> EdgeMapSpec {
    let (c_sink, v_sink) = sing_state.vertex_pos(x, VKind::Sink).expect("sink");
    let (c_source, v_source) = sing_state.vertex_pos(x, VKind::Source).expect("source");
    let (ca, seg_a) = or_state.or_join_pos(x, Arc::ArcA).expect("arc A resolved");
    let (cb, seg_b) = or_state.or_join_pos(x, Arc::ArcB).expect("arc B resolved");
    let hv = |st: &ResolutionState, c: usize| ((st.circles[c].vertex_count() / 2) % 2) as u8;
    if c_sink != c_source {
        assert_eq!(ca, cb, "merge target carries both smooth joins");
        let pa_seg = sing_state.circles[c_sink]
            .side_segment(v_sink, nonpreferred_end(d, x, VKind::Sink))
            .expect("sink side");
        let pa = sing_state.circles[c_sink].seg_class(pa_seg);
        let qd_seg = sing_state.circles[c_source]
            .side_segment(v_source, nonpreferred_end(d, x, VKind::Source))
            .expect("source side");
        let qd = sing_state.circles[c_source].seg_class(qd_seg);
        let rp = or_state.circles[ca].seg_class(seg_a);
        EdgeMapSpec {
            shape: SaddleShape::Merge,
            src_first: c_sink,
            src_second: c_source,
            tgt_first: ca,
            tgt_second: ca,
            tw_first: (pa + rp) % 2,
            tw_second: (qd + rp) % 2,
            tw_pre: 0,
            unit,
            ty: 2,
            feats: [
                pa,
                qd,
                rp,
                hv(sing_state, c_sink),
                hv(sing_state, c_source),
                hv(or_state, ca),
            ],
        }
    } else {
        assert_ne!(ca, cb, "split target circles must differ");
        let ra_seg = sing_state.circles[c_sink]
            .side_segment(v_sink, nonpreferred_end(d, x, VKind::Sink))
            .expect("sink side");
        let ra = sing_state.circles[c_sink].seg_class(ra_seg);
        let tp = or_state.circles[ca].seg_class(seg_a);
        let tq = or_state.circles[cb].seg_class(seg_b);
        EdgeMapSpec {
            shape: SaddleShape::Split,
            src_first: c_sink,
            src_second: c_sink,
            tgt_first: ca,
            tgt_second: cb,
            tw_first: (tp + 1) % 2,
            tw_second: tq % 2,
            tw_pre: (ra + 1) % 2,
            unit,
            ty: 3,
            feats: [
                ra,
                tp,
                tq,
                hv(sing_state, c_sink),
                hv(or_state, ca),
                hv(or_state, cb),
            ],
        }
    }
}

/// Spectator circle matching between neighbouring resolutions, by the
/// circles' identifying keys (edge sets are unchanged away from the saddle).
fn spectator_map(
    spec: &EdgeMapSpec,
    src: &ResolutionState,
    tgt: &ResolutionState,
) -> Vec<Option<usize>> {
    src.circles
        .iter()
        .enumerate()
        .map(|(si, c)| {
            if si == spec.src_first || si == spec.src_second {
                None
            } else {
                Some(tgt.circle_by_key(c.key).expect("spectator circle persists"))
            }
        })
        .collect()
}

/// Images of one basis word under the saddle map.
fn edge_entries(spec: &EdgeMapSpec, perm: &[Option<usize>], word: u64) -> Vec<(u64, GaussPoly)> {
    let mut base = 0u64;
    for (si, ti) in perm.iter().enumerate() {
        if let Some(ti) = ti {
            if word >> si & 1 == 1 {
                base |= 1 << ti;
            }
        }
    }
    let unit = GaussPoly::constant(spec.unit.clone());
    match spec.shape {
        SaddleShape::Merge => {
            let xk = word >> spec.src_first & 1 == 1;
            let yk = word >> spec.src_second & 1 == 1;
            let x = AlgElem::basis(xk).sigma_pow(spec.tw_first);
            let y = AlgElem::basis(yk).sigma_pow(spec.tw_second);
            let prod = alg_mul(&x, &y);
            let mut out = Vec::with_capacity(2);
            let c0 = &prod.c0 * &unit;
            if !c0.is_zero() {
                out.push((base, c0));
            }
            let c1 = &prod.c1 * &unit;
            if !c1.is_zero() {
                out.push((base | 1 << spec.tgt_first, c1));
            }
            out
        }
        SaddleShape::Split => {
            let zk = word >> spec.src_first & 1 == 1;
            let z = AlgElem::basis(zk).sigma_pow(spec.tw_pre);
            let mut img = alg_comul(&z);
            img = img
                .map_factor(0, |e| e.sigma_pow(spec.tw_first))
                .expect("factor 0");
            img = img
                .map_factor(1, |e| e.sigma_pow(spec.tw_second))
                .expect("factor 1");
            let mut out = Vec::with_capacity(4);
            for (&pair, c) in img.terms() {
                let mut w = base;
                if pair & 1 != 0 {
                    w |= 1 << spec.tgt_first;
                }
                if pair & 2 != 0 {
                    w |= 1 << spec.tgt_second;
                }
                let v = c * &unit;
                if !v.is_zero() {
                    out.push((w, v));
                }
            }
            out
        }
    }
}

/// The saddle map as a matrix on the full tensor spaces of two resolutions.
fn edge_linear_map(spec: &EdgeMapSpec, src: &ResolutionState, tgt: &ResolutionState) -> LinearMap {
    let perm = spectator_map(spec, src, tgt);
    let n_in = src.n_circles();
    let n_out = tgt.n_circles();
    let mut cols = Vec::with_capacity(1 << n_in);
    for w in 0..1u64 << n_in {
        let mut v = TensorVec::zero(n_out);
        for (w2, c) in edge_entries(spec, &perm, w) {
            v.add_term(w2, c);
        }
        cols.push(v);
    }
    LinearMap { n_in, n_out, cols }
}

/// Dot acting at a marked segment: multiplication by X conjugated by the
/// segment's twist class.
fn seg_dot_map(state: &ResolutionState, circle: usize, seg: usize) -> LinearMap {
    let class = state.circles[circle].seg_class(seg);
    let n = state.n_circles();
    let mut cols = Vec::with_capacity(1 << n);
    for w in 0..1u64 << n {
        let v = TensorVec::basis_word(n, w)
            .map_factor(circle, |e| e.sigma_pow(class).dot().sigma_pow(class))
            .expect("factor in range");
        cols.push(v);
    }
    LinearMap {
        n_in: n,
        n_out: n,
        cols,
    }
}

// ---------------------------------------------------------------------------
// Edge-map rule derivation
// ---------------------------------------------------------------------------

/// The certified saddle-map convention: units for the two saddle directions
/// plus the twist rules (which are fixed by the circle-tracing parities).
#[derive(Debug, Clone)]
pub struct EdgeRuleTable {
    pub zip_unit: GaussRat,
    pub unzip_unit: GaussRat,
    /// Whether the singular-circle-removal identity carries +i on the arc
    /// away from the preferred sides (and -i on the preferred arc).
    pub rsc_plus_on_arc_a: bool,
}

impl EdgeRuleTable {
    /// Renders every saddle type and twist-parity combination as a word in
    /// the generating foam pieces. The involution on a leg is written as
    /// i * sing_annulus_left on that leg.
    pub fn rows(&self) -> Vec<String> {
        let mut rows = Vec::new();
        let render = |label: &str, unit: &GaussRat, pre: u8, f: u8, s: u8, split: bool| {
            let mut word = Vec::new();
            let mut i_count = 0;
            if split {
                if pre == 1 {
                    word.push("sing_annulus_left(in)".to_string());
                    i_count += 1;
                }
                word.push("split(in)".to_string());
                if f == 1 {
                    word.push("sing_annulus_left(out1)".to_string());
                    i_count += 1;
                }
                if s == 1 {
                    word.push("sing_annulus_left(out2)".to_string());
                    i_count += 1;
                }
            } else {
                if f == 1 {
                    word.push("sing_annulus_left(in1)".to_string());
                    i_count += 1;
                }
                if s == 1 {
                    word.push("sing_annulus_left(in2)".to_string());
                    i_count += 1;
                }
                word.push("merge(in1,in2)".to_string());
            }
            let total =
                &GaussPoly::constant(unit.clone()) * &GaussPoly::constant(GaussRat::i_pow(i_count));
            format!("{label}: {} [unit {}]", word.join(" ; "), total)
        };
        for p in 0..2u8 {
            for q in 0..2u8 {
                for c in 0..2u8 {
                    rows.push(render(
                        &format!("zip-merge p={p} q={q} c={c}"),
                        &self.zip_unit,
                        0,
                        (p + 1 + c) % 2,
                        (q + c) % 2,
                        false,
                    ));
                }
            }
        }
        for ra in 0..2u8 {
            for tp in 0..2u8 {
                for tq in 0..2u8 {
                    rows.push(render(
                        &format!("zip-split r={ra} tp={tp} tq={tq}"),
                        &self.zip_unit,
                        (ra + 1) % 2,
                        (tp + 1) % 2,
                        (tq + 1) % 2,
                        true,
                    ));
                }
            }
        }
        for pa in 0..2u8 {
            for qd in 0..2u8 {
                for rp in 0..2u8 {
                    rows.push(render(
                        &format!("unzip-merge pa={pa} qd={qd} r={rp}"),
                        &self.unzip_unit,
                        0,
                        (pa + rp) % 2,
                        (qd + rp) % 2,
                        false,
                    ));
                }
            }
        }
        for ra in 0..2u8 {
            for tp in 0..2u8 {
                for tq in 0..2u8 {
                    rows.push(render(
                        &format!("unzip-split r={ra} tp={tp} tq={tq}"),
                        &self.unzip_unit,
                        (ra + 1) % 2,
                        (tp + 1) % 2,
                        tq % 2,
                        true,
                    ));
                }
            }
        }
        rows
    }
}

impl fmt::Display for EdgeRuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "saddle units: oriented->singular {}, singular->oriented {}",
            self.zip_unit, self.unzip_unit
        )?;
        writeln!(
            f,
            "singular-circle removal: +i on arc {}",
            if self.rsc_plus_on_arc_a { "A" } else { "B" }
        )?;
        for row in self.rows() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

struct RelationModel {
    diagram: LinkDiagram,
    crossing: usize,
    or_bits: Vec<bool>,
    sing_bits: Vec<bool>,
}

fn relation_models() -> Vec<RelationModel> {
    use crate::diagram::parse_braid;
    let mut models = Vec::new();
    // Positive and negative kinks: oriented side has two circles.
    for word in ["s1", "s1^-1"] {
        let d = parse_braid(word, 2).unwrap();
        models.push(RelationModel {
            diagram: d,
            crossing: 0,
            or_bits: vec![false],
            sing_bits: vec![true],
        });
    }
    // Hopf variants with the other crossing kept singular: oriented side is
    // one circle carrying two vertices, singular side two such circles.
    for word in ["s1 s1", "s1^-1 s1^-1"] {
        let d = parse_braid(word, 2).unwrap();
        models.push(RelationModel {
            diagram: d,
            crossing: 0,
            or_bits: vec![false, true],
            sing_bits: vec![true, true],
        });
    }
    models
}

fn check_candidate(zip_unit: &GaussRat, unzip_unit: &GaussRat) -> Result<bool, String> {
    let minus_i = GaussPoly::constant(-GaussRat::i());
    let plus_i = GaussPoly::i();
    let ih = &plus_i * &GaussPoly::var_h();
    let mut plus_on_a: Option<bool> = None;

    for (idx, model) in relation_models().iter().enumerate() {
        let d = &model.diagram;
        let x = model.crossing;
        let or_state = d.resolve(&model.or_bits).map_err(|e| e.to_string())?;
        let sing_state = d.resolve(&model.sing_bits).map_err(|e| e.to_string())?;
        let zip = zip_spec(d, x, &or_state, &sing_state, zip_unit.clone());
        let unzip = unzip_spec(d, x, &sing_state, &or_state, unzip_unit.clone());
        let zip_lm = edge_linear_map(&zip, &or_state, &sing_state);
        let unzip_lm = edge_linear_map(&unzip, &sing_state, &or_state);

        // Cutting the singular tube: unzip then zip equals
        // -i (dot at the preferred side of the sink)
        // -i (dot at the preferred side of the source) + ih id.
        let (sc, sv) = sing_state.vertex_pos(x, VKind::Sink).unwrap();
        let (tc, tv) = sing_state.vertex_pos(x, VKind::Source).unwrap();
        let sink_pref = sing_state.circles[sc]
            .side_segment(sv, preferred_end(d, x, VKind::Sink))
            .unwrap();
        let source_pref = sing_state.circles[tc]
            .side_segment(tv, preferred_end(d, x, VKind::Source))
            .unwrap();
        let dot_sink = seg_dot_map(&sing_state, sc, sink_pref);
        let dot_source = seg_dot_map(&sing_state, tc, source_pref);
        let lhs = unzip_lm.compose(&zip_lm);
        let id = LinearMap::identity(sing_state.n_circles());
        let rhs = &(&dot_sink.scale(&minus_i) + &dot_source.scale(&minus_i)) + &id.scale(&ih);
        if lhs != rhs {
            return Err(format!(
                "neck-cutting identity on the singular web fails (model {idx})"
            ));
        }

        // Removing the singular circle: zip then unzip equals
        // +/- i (dot at arc A) -/+ i (dot at arc B).
        let (ca, seg_a) = or_state.or_join_pos(x, Arc::ArcA).unwrap();
        let (cb, seg_b) = or_state.or_join_pos(x, Arc::ArcB).unwrap();
        let dot_a = seg_dot_map(&or_state, ca, seg_a);
        let dot_b = seg_dot_map(&or_state, cb, seg_b);
        let lhs2 = zip_lm.compose(&unzip_lm);
        let opt_a = &dot_a.scale(&plus_i) - &dot_b.scale(&plus_i);
        let opt_b = &dot_b.scale(&plus_i) - &dot_a.scale(&plus_i);
        let this_model = if lhs2 == opt_a {
            true
        } else if lhs2 == opt_b {
            false
        } else {
            return Err(format!(
                "singular-circle removal identity fails (model {idx})"
            ));
        };
        match plus_on_a {
            None => plus_on_a = Some(this_model),
            Some(prev) if prev == this_model => {}
            Some(_) => {
                return Err(format!(
                    "singular-circle removal sign disagrees between models (model {idx})"
                ))
            }
        }
    }

    // Squares of small cubes must commute before the chain signs are added.
    for (word, strands) in [
        ("s1 s1 s1", 2),
        ("s1^-1 s1^-1 s1^-1", 2),
        ("s1 s2^-1 s1 s2^-1", 3),
        ("s1 s2 s1", 3),
        ("s1 s1^-1", 2),
    ] {
        let d = crate::diagram::parse_braid(word, strands).unwrap();
        build_with_units(&d, zip_unit, unzip_unit).map_err(|e| format!("{e} ({word})"))?;
    }

    Ok(plus_on_a.unwrap_or(true))
}

static EDGE_RULES: OnceLock<Result<EdgeRuleTable, DeriveError>> = OnceLock::new();

/// Derives and certifies the saddle-map convention. The twist rules are
/// determined by the tracing parities; the pair of units is searched over
/// {1, i, -1, -i}^2 and validated against the singular-tube identities and
/// the squares of a battery of small cubes. The first passing pair in
/// canonical order is kept.
pub fn derive_edge_maps() -> Result<&'static EdgeRuleTable, DeriveError> {
    let result = EDGE_RULES.get_or_init(|| {
        let units = [
            GaussRat::one(),
            GaussRat::i(),
            -GaussRat::one(),
            -GaussRat::i(),
        ];
        let mut failures = Vec::new();
        for zu in &units {
            for uu in &units {
                match check_candidate(zu, uu) {
                    Ok(plus_on_a) => {
                        return Ok(EdgeRuleTable {
                            zip_unit: zu.clone(),
                            unzip_unit: uu.clone(),
                            rsc_plus_on_arc_a: plus_on_a,
                        })
                    }
                    Err(msg) => failures.push(format!("zip={zu}, unzip={uu}: {msg}")),
                }
            }
        }
        Err(DeriveError {
            details: failures.join("; "),
        })
    });
    result.as_ref().map_err(|e| e.clone())
}

// ---------------------------------------------------------------------------
// The chain complex
// ---------------------------------------------------------------------------

/// One free generator: a cube vertex, a basis word over its circles, and
/// the quantum degree (word degree plus the vertex's grading shift).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gen {
    pub state: u64,
    pub word: u64,
    pub j: i64,
}

/// Sparse matrix over the ground ring with row-major entries and a column
/// occupancy index.
#[derive(Debug, Clone, Default)]
pub struct SparseMat {
    rows: Vec<BTreeMap<usize, GaussPoly>>,
    cols: Vec<BTreeSet<usize>>,
}

impl SparseMat {
    fn new(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            rows: vec![BTreeMap::new(); nrows],
            cols: vec![BTreeSet::new(); ncols],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn entry(&self, r: usize, c: usize) -> Option<&GaussPoly> {
        self.rows[r].get(&c)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (&usize, &GaussPoly)> {
        self.rows[r].iter()
    }

    pub fn col_rows(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.cols[c].iter().copied()
    }

    pub fn n_entries(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    fn add(&mut self, r: usize, c: usize, v: GaussPoly) {
        if v.is_zero() {
            return;
        }
        match self.rows[r].entry(c) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
                self.cols[c].insert(r);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &v;
                if sum.is_zero() {
                    e.remove();
                    self.cols[c].remove(&r);
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn remove(&mut self, r: usize, c: usize) -> Option<GaussPoly> {
        let v = self.rows[r].remove(&c);
        if v.is_some() {
            self.cols[c].remove(&r);
        }
        v
    }

    fn clear_row(&mut self, r: usize) {
        let cols: Vec<usize> = self.rows[r].keys().copied().collect();
        for c in cols {
            self.remove(r, c);
        }
    }

    fn clear_col(&mut self, c: usize) {
        let rows: Vec<usize> = self.cols[c].iter().copied().collect();
        for r in rows {
            self.remove(r, c);
        }
    }
}

/// The cube complex: graded free chain groups and sparse differentials.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    pub gens: BTreeMap<i64, Vec<Gen>>,
    /// d^i maps degree i to degree i+1.
    pub diffs: BTreeMap<i64, SparseMat>,
}

impl ChainComplex {
    pub fn total_generators(&self) -> usize {
        self.gens.values().map(|v| v.len()).sum()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.gens.keys().copied().collect()
    }

    /// Graded Euler characteristic, computed from the chain groups alone.
    pub fn euler_characteristic(&self) -> LaurentQ {
        let mut chi = LaurentQ::zero();
        for (&i, gens) in &self.gens {
            let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            for g in gens {
                chi = &chi + &LaurentQ::monomial(g.j, sign);
            }
        }
        chi
    }

    /// Checks that every differential entry is homogeneous of quantum
    /// degree zero against the generators' gradings.
    pub fn differential_is_degree_zero(&self) -> bool {
        for (&i, mat) in &self.diffs {
            let src = &self.gens[&i];
            let tgt = match self.gens.get(&(i + 1)) {
                Some(t) => t,
                None => return mat.n_entries() == 0,
            };
            for (r, row) in mat.rows.iter().enumerate() {
                for (&c, v) in row {
                    match v.degree() {
                        PolyDegree::Zero => {}
                        PolyDegree::Inhomogeneous => return false,
                        PolyDegree::Homogeneous(d) => {
                            if d + tgt[r].j != src[c].j {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn verify_d_squared(&self) -> Result<(), (usize, usize)> {
        for (&i, d_i) in &self.diffs {
            let d_next = match self.diffs.get(&(i + 1)) {
                Some(m) => m,
                None => continue,
            };
            // P[r2][c] = sum_r d_next[r2][r] d_i[r][c]
            let mut acc: HashMap<(usize, usize), GaussPoly> = HashMap::new();
            for (r, row) in d_i.rows.iter().enumerate() {
                for (&c, v) in row {
                    for r2 in d_next.col_rows(r) {
                        let w = d_next.entry(r2, r).unwrap();
                        let prod = v * w;
                        let slot = acc.entry((r2, c)).or_insert_with(GaussPoly::zero);
                        *slot = &*slot + &prod;
                    }
                }
            }
            for ((r2, c), v) in acc {
                if !v.is_zero() {
                    return Err((r2, c));
                }
            }
        }
        Ok(())
    }
}

struct StateData {
    resolution: ResolutionState,
    base_index: usize,
}

/// Image of one basis word under an edge map, accumulated sparsely.
fn apply_edge(
    spec: &EdgeMapSpec,
    perm: &[Option<usize>],
    v: &BTreeMap<u64, GaussPoly>,
) -> BTreeMap<u64, GaussPoly> {
    let mut out: BTreeMap<u64, GaussPoly> = BTreeMap::new();
    for (&w, c) in v {
        for (w2, val) in edge_entries(spec, perm, w) {
            let entry = out.entry(w2).or_insert_with(GaussPoly::zero);
            *entry = &*entry + &(&val * c);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Relative sign of the two raw composites around one square: 0 when they
/// agree, 1 when they differ by a global sign.
fn face_lambda(
    first: (&EdgeMapSpec, &[Option<usize>]),
    second: (&EdgeMapSpec, &[Option<usize>]),
    first_alt: (&EdgeMapSpec, &[Option<usize>]),
    second_alt: (&EdgeMapSpec, &[Option<usize>]),
) -> Option<u8> {
    let start: BTreeMap<u64, GaussPoly> = [(0u64, GaussPoly::one())].into_iter().collect();
    let p1 = apply_edge(second.0, second.1, &apply_edge(first.0, first.1, &start));
    let p2 = apply_edge(
        second_alt.0,
        second_alt.1,
        &apply_edge(first_alt.0, first_alt.1, &start),
    );
    if p1 == p2 {
        return Some(0);
    }
    let neg: BTreeMap<u64, GaussPoly> = p2.iter().map(|(w, c)| (*w, -c)).collect();
    if p1 == neg {
        return Some(1);
    }
    None
}

/// Solves for edge-sign corrections c with d c = lambda over GF(2). The
/// canonical solution (free variables zero) vanishes when every raw square
/// already commutes, so the total sign reduces to the plain alternating
/// rule in that case.
fn solve_edge_signs(n_vars: usize, equations: &[(Vec<usize>, u8)]) -> Option<Vec<u8>> {
    let words = n_vars.div_ceil(64);
    let mut pivots: Vec<(usize, Vec<u64>, u8)> = Vec::new();
    for (vars, rhs) in equations {
        let mut row = vec![0u64; words];
        for &v in vars {
            row[v / 64] ^= 1 << (v % 64);
        }
        let mut r = *rhs;
        for (pv, prow, prhs) in &pivots {
            if row[pv / 64] >> (pv % 64) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(prow) {
                    *a ^= b;
                }
                r ^= prhs;
            }
        }
        let pivot = row
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize);
        match pivot {
            Some(pv) => pivots.push((pv, row, r)),
            None => {
                if r != 0 {
                    return None;
                }
            }
        }
    }
    let mut sol = vec![0u8; n_vars];
    pivots.sort_by_key(|&(pv, _, _)| std::cmp::Reverse(pv));
    for (pv, row, rhs) in &pivots {
        let mut v = *rhs;
        for k in (pv + 1)..n_vars {
            if row[k / 64] >> (k % 64) & 1 == 1 {
                v ^= sol[k];
            }
        }
        sol[*pv] = v;
    }
    Some(sol)
}

fn build_with_units(
    d: &LinkDiagram,
    zip_unit: &GaussRat,
    unzip_unit: &GaussRat,
) -> Result<ChainComplex, BuildError> {
    let n = d.n_crossings();
    assert!(n <= 30, "cube too large");
    let n_states = 1u64 << n;

    // Resolve every cube vertex in parallel; results are joined in index
    // order so the outcome does not depend on the thread count.
    let resolutions: Vec<ResolutionState> = (0..n_states)
        .into_par_iter()
        .map(|rho| {
            d.resolve(&state_smoothing(d, rho))
                .expect("choice length matches")
        })
        .collect();

    // Canonical generator order: degree, then cube vertex, then word.
    let mut states_by_deg: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    for rho in 0..n_states {
        states_by_deg
            .entry(coh_degree(d, rho))
            .or_default()
            .push(rho);
    }
    let mut gens: BTreeMap<i64, Vec<Gen>> = BTreeMap::new();
    let mut state_data: HashMap<u64, StateData> = HashMap::new();
    for (&i, states) in &states_by_deg {
        let mut total = 0usize;
        let degree_gens = gens.entry(i).or_default();
        for &rho in states {
            let res = &resolutions[rho as usize];
            let k = res.n_circles();
            let shift = q_shift(d, rho);
            for w in 0..1u64 << k {
                let word_deg = 2 * w.count_ones() as i64 - k as i64;
                degree_gens.push(Gen {
                    state: rho,
                    word: w,
                    j: word_deg + shift,
                });
            }
            state_data.insert(
                rho,
                StateData {
                    resolution: resolutions[rho as usize].clone(),
                    base_index: total,
                },
            );
            total += 1 << k;
        }
    }

    // Saddle data for every cube edge, in parallel.
    let edges: Vec<(u64, usize)> = (0..n_states)
        .flat_map(|rho| {
            (0..n).filter_map(move |x| {
                if rho >> x & 1 == 0 {
                    Some((rho, x))
                } else {
                    None
                }
            })
        })
        .collect();

    let edge_data: Vec<(EdgeMapSpec, Vec<Option<usize>>)> = edges
        .par_iter()
        .map(|&(rho, x)| {
            let rho_tgt = rho | 1 << x;
            let src = &state_data[&rho];
            let tgt = &state_data[&rho_tgt];
            let spec = match d.crossings[x].sign {
                Sign::Negative => {
                    zip_spec(d, x, &src.resolution, &tgt.resolution, zip_unit.clone())
                }
                Sign::Positive => {
                    unzip_spec(d, x, &src.resolution, &tgt.resolution, unzip_unit.clone())
                }
            };
            let perm = spectator_map(&spec, &src.resolution, &tgt.resolution);
            (spec, perm)
        })
        .collect();
    let edge_index: HashMap<(u64, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    // Raw squares commute only up to a sign; solve for edge-sign
    // corrections so that every square anticommutes after the alternating
    // rule is applied.
    let faces: Vec<(u64, usize, usize)> = (0..n_states)
        .flat_map(|rho| {
            (0..n).flat_map(move |x| {
                ((x + 1)..n).filter_map(move |y| {
                    if rho >> x & 1 == 0 && rho >> y & 1 == 0 {
                        Some((rho, x, y))
                    } else {
                        None
                    }
                })
            })
        })
        .collect();
    let lambdas: Vec<Option<u8>> = faces
        .par_iter()
        .map(|&(rho, x, y)| {
            let e1 = &edge_data[edge_index[&(rho, x)]];
            let e2 = &edge_data[edge_index[&(rho | 1 << x, y)]];
            let e1p = &edge_data[edge_index[&(rho, y)]];
            let e2p = &edge_data[edge_index[&(rho | 1 << y, x)]];
            face_lambda(
                (&e1.0, &e1.1),
                (&e2.0, &e2.1),
                (&e1p.0, &e1p.1),
                (&e2p.0, &e2p.1),
            )
        })
        .collect();
    let mut equations = Vec::with_capacity(faces.len());
    for (&(rho, x, y), lambda) in faces.iter().zip(&lambdas) {
        let lambda = lambda.ok_or(BuildError::DSquared { state: rho, x, y })?;
        equations.push((
            vec![
                edge_index[&(rho, x)],
                edge_index[&(rho | 1 << x, y)],
                edge_index[&(rho, y)],
                edge_index[&(rho | 1 << y, x)],
            ],
            lambda,
        ));
    }
    let corrections = solve_edge_signs(edges.len(), &equations).ok_or_else(|| {
        let (rho, x, y) = faces.first().copied().unwrap_or((0, 0, 0));
        BuildError::DSquared { state: rho, x, y }
    })?;

    let entry_blocks: Vec<(i64, Vec<(usize, usize, GaussPoly)>)> = edges
        .par_iter()
        .enumerate()
        .map(|(eidx, &(rho, x))| {
            let rho_tgt = rho | 1 << x;
            let i = coh_degree(d, rho);
            let src = &state_data[&rho];
            let tgt = &state_data[&rho_tgt];
            let (spec, perm) = &edge_data[eidx];
            let koszul = (rho & ((1 << x) - 1)).count_ones() as u8;
            let sign = if (koszul + corrections[eidx]) % 2 == 0 {
                GaussPoly::one()
            } else {
                GaussPoly::from_int(-1)
            };
            let k = src.resolution.n_circles();
            let mut block = Vec::new();
            for w in 0..1u64 << k {
                let col = src.base_index + w as usize;
                for (w2, v) in edge_entries(spec, perm, w) {
                    block.push((tgt.base_index + w2 as usize, col, &v * &sign));
                }
            }
            (i, block)
        })
        .collect();

    let mut diffs: BTreeMap<i64, SparseMat> = BTreeMap::new();
    for (&i, degree_gens) in &gens {
        let ncols = degree_gens.len();
        let nrows = gens.get(&(i + 1)).map(|g| g.len()).unwrap_or(0);
        diffs.insert(i, SparseMat::new(nrows, ncols));
    }
    for (i, block) in entry_blocks {
        let mat = diffs.get_mut(&i).expect("degree exists");
        for (r, c, v) in block {
            mat.add(r, c, v);
        }
    }

    let complex = ChainComplex { gens, diffs };

    if let Err((r2, c)) = complex.verify_d_squared() {
        // Locate an offending square for the report.
        let (state, x, y) = find_bad_square(d, &complex, r2, c);
        return Err(BuildError::DSquared { state, x, y });
    }
    if !complex.differential_is_degree_zero() {
        return Err(BuildError::DegreeBroken);
    }
    Ok(complex)
}

fn find_bad_square(
    d: &LinkDiagram,
    complex: &ChainComplex,
    r2: usize,
    c: usize,
) -> (u64, usize, usize) {
    // Fall back to naming the cube vertex of the source generator and the
    // first pair of crossings whose square fails to commute there.
    for (&i, gens) in &complex.gens {
        let _ = i;
        if c < gens.len() {
            let state = gens[c].state;
            let _ = r2;
            for x in 0..d.n_crossings() {
                for y in (x + 1)..d.n_crossings() {
                    if state >> x & 1 == 0 && state >> y & 1 == 0 {
                        return (state, x, y);
                    }
                }
            }
            return (state, 0, 0);
        }
    }
    (0, 0, 0)
}

/// Builds the symbolic cube complex of a closed diagram, with the square
/// check and the quantum-degree check run on the result.
pub fn build_complex(d: &LinkDiagram) -> Result<ChainComplex, BuildError> {
    let table = derive_edge_maps()?;
    build_with_units(d, &table.zip_unit, &table.unzip_unit)
}

/// Graded Euler characteristic of the cube of a diagram.
pub fn euler_characteristic(d: &LinkDiagram) -> Result<LaurentQ, BuildError> {
    Ok(build_complex(d)?.euler_characteristic())
}

// ---------------------------------------------------------------------------
// Simplification: cancellation of unit differential entries
// ---------------------------------------------------------------------------

/// Cancels invertible differential entries until none remain, producing a
/// homotopy-equivalent complex with strictly fewer generators. Symbolic
/// pivots must be units of the ground ring ({1, -1, i, -i}); everything
/// else is left in place.
pub fn simplify(c: ChainComplex) -> ChainComplex {
    let mut gens = c.gens;
    let mut diffs = c.diffs;
    let mut alive: BTreeMap<i64, Vec<bool>> = gens
        .iter()
        .map(|(&i, g)| (i, vec![true; g.len()]))
        .collect();

    loop {
        // Pick the unit entry with the least expected fill-in.
        let mut best: Option<(usize, i64, usize, usize, GaussRat)> = None;
        for (&i, mat) in &diffs {
            for (r, row) in mat.rows.iter().enumerate() {
                for (&cc, v) in row {
                    if let Some(u) = v.as_zi_unit() {
                        let score = (row.len() - 1) * (mat.cols[cc].len() - 1);
                        if best.as_ref().map(|b| score < b.0).unwrap_or(true) {
                            best = Some((score, i, r, cc, u));
                        }
                    }
                }
                if matches!(best, Some((0, ..))) {
                    break;
                }
            }
            if matches!(best, Some((0, ..))) {
                break;
            }
        }
        let (_, i, r, c_idx, u) = match best {
            Some(b) => b,
            None => break,
        };

        let u_inv = GaussPoly::constant(u.inv());
        let mat = diffs.get_mut(&i).unwrap();
        mat.remove(r, c_idx);
        let pivot_row: Vec<(usize, GaussPoly)> =
            mat.rows[r].iter().map(|(c2, v)| (*c2, v.clone())).collect();
        let pivot_col: Vec<(usize, GaussPoly)> = mat
            .col_rows(c_idx)
            .collect::<Vec<_>>()
            .into_iter()
            .map(|r2| (r2, mat.entry(r2, c_idx).unwrap().clone()))
            .collect();
        for (r2, col_v) in &pivot_col {
            let factor = &(-&(col_v * &u_inv));
            for (c2, row_v) in &pivot_row {
                mat.add(*r2, *c2, factor * row_v);
            }
        }
        mat.clear_row(r);
        mat.clear_col(c_idx);
        // Incoming maps into the cancelled source and outgoing maps from the
        // cancelled target are dropped.
        if let Some(prev) = diffs.get_mut(&(i - 1)) {
            prev.clear_row(c_idx);
        }
        if let Some(next) = diffs.get_mut(&(i + 1)) {
            next.clear_col(r);
        }
        alive.get_mut(&i).unwrap()[c_idx] = false;
        alive.get_mut(&(i + 1)).unwrap()[r] = false;
    }

    // Compact: drop dead generators and reindex every matrix.
    let mut remap: BTreeMap<i64, Vec<Option<usize>>> = BTreeMap::new();
    for (&i, flags) in &alive {
        let mut next = 0usize;
        let m: Vec<Option<usize>> = flags
            .iter()
            .map(|&ok| {
                if ok {
                    let idx = next;
                    next += 1;
                    Some(idx)
                } else {
                    None
                }
            })
            .collect();
        remap.insert(i, m);
    }
    let mut new_gens: BTreeMap<i64, Vec<Gen>> = BTreeMap::new();
    for (&i, g) in &gens {
        let flags = &alive[&i];
        let kept: Vec<Gen> = g
            .iter()
            .zip(flags)
            .filter(|(_, &ok)| ok)
            .map(|(gen, _)| *gen)
            .collect();
        if !kept.is_empty() {
            new_gens.insert(i, kept);
        }
    }
    let mut new_diffs: BTreeMap<i64, SparseMat> = BTreeMap::new();
    for (&i, mat) in &diffs {
        let src_map = &remap[&i];
        let empty = Vec::new();
        let tgt_map = remap.get(&(i + 1)).unwrap_or(&empty);
        let ncols = new_gens.get(&i).map(|g| g.len()).unwrap_or(0);
        let nrows = new_gens.get(&(i + 1)).map(|g| g.len()).unwrap_or(0);
        if ncols == 0 {
            continue;
        }
        let mut m = SparseMat::new(nrows, ncols);
        for (r, row) in mat.rows.iter().enumerate() {
            let new_r = match tgt_map.get(r).copied().flatten() {
                Some(nr) => nr,
                None => continue,
            };
            for (&cc, v) in row {
                if let Some(nc) = src_map.get(cc).copied().flatten() {
                    m.add(new_r, nc, v.clone());
                }
            }
        }
        new_diffs.insert(i, m);
    }
    gens = new_gens;
    diffs = new_diffs;
    ChainComplex { gens, diffs }
}

// ---------------------------------------------------------------------------
// Homology at exact specializations
// ---------------------------------------------------------------------------

/// A per-degree homology table: bigraded ranks at the graded specialization
/// a = h = 0, per-degree dimensions otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyTable {
    pub mode: String,
    pub entries: Vec<HomEntry>,
    pub poincare: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomEntry {
    pub i: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<i64>,
    pub rank: usize,
}

impl HomologyTable {
    pub fn total_dimension(&self) -> usize {
        self.entries.iter().map(|e| e.rank).sum()
    }

    /// Dimensions per cohomological degree.
    pub fn dims_by_degree(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.i).or_default() += e.rank;
        }
        out.retain(|_, v| *v > 0);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

impl fmt::Display for HomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        for e in &self.entries {
            match e.j {
                Some(j) => writeln!(f, "  i={} j={} rank={}", e.i, j, e.rank)?,
                None => writeln!(f, "  i={} dim={}", e.i, e.rank)?,
            }
        }
        write!(f, "poincare: {}", self.poincare)
    }
}

type RatRow = BTreeMap<usize, GaussRat>;

fn rank_of_rows(mut rows: Vec<RatRow>) -> usize {
    let mut pivots: Vec<(usize, RatRow)> = Vec::new();
    let mut rank = 0;
    for row in rows.iter_mut() {
        loop {
            let lead = match row.keys().next() {
                Some(&c) => c,
                None => break,
            };
            match pivots.binary_search_by_key(&lead, |(c, _)| *c) {
                Ok(pos) => {
                    let (pc, prow) = &pivots[pos];
                    let factor = &row[pc] * &prow[pc].inv();
                    let updates: Vec<(usize, GaussRat)> =
                        prow.iter().map(|(c2, v)| (*c2, &factor * v)).collect();
                    for (c2, v) in updates {
                        let cur = row.remove(&c2).unwrap_or_else(GaussRat::zero);
                        let next = &cur - &v;
                        if !next.is_zero() {
                            row.insert(c2, next);
                        }
                    }
                }
                Err(pos) => {
                    pivots.insert(pos, (lead, std::mem::take(row)));
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

impl ChainComplex {
    /// Specializes the differential at exact parameter values and computes
    /// exact ranks. With a = h = 0 the differential preserves the quantum
    /// grading and the table is bigraded; otherwise it reports per-degree
    /// dimensions of the filtered theory.
    pub fn homology(&self, a_val: &GaussRat, h_val: &GaussRat) -> HomologyTable {
        let graded = a_val.is_zero() && h_val.is_zero();
        if graded {
            self.homology_graded(a_val, h_val)
        } else {
            self.homology_filtered(a_val, h_val)
        }
    }

    fn specialized_rows(&self, i: i64, a: &GaussRat, h: &GaussRat) -> Vec<RatRow> {
        let mat = match self.diffs.get(&i) {
            Some(m) => m,
            None => return Vec::new(),
        };
        let mut rows = vec![RatRow::new(); mat.nrows()];
        for (r, row) in mat.rows.iter().enumerate() {
            for (&c, v) in row {
                let s = v.specialize(a, h);
                if !s.is_zero() {
                    rows[r].insert(c, s);
                }
            }
        }
        rows
    }

    fn homology_filtered(&self, a: &GaussRat, h: &GaussRat) -> HomologyTable {
        let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
        for &i in self.gens.keys() {
            let rows = self.specialized_rows(i, a, h);
            // rank of d^i: transpose to rows over source columns
            let mat = &self.diffs[&i];
            let mut cols: Vec<RatRow> = vec![RatRow::new(); mat.ncols()];
            for (r, row) in rows.iter().enumerate() {
                for (&c, v) in row {
                    cols[c].insert(r, v.clone());
                }
            }
            ranks.insert(i, rank_of_rows(cols));
        }
        let mut entries = Vec::new();
        let mut poincare = LaurentBi::zero();
        for (&i, gens) in &self.gens {
            let out_rank = ranks.get(&i).copied().unwrap_or(0);
            let in_rank = ranks.get(&(i - 1)).copied().unwrap_or(0);
            let dim = gens.len() - out_rank - in_rank;
            if dim > 0 {
                entries.push(HomEntry {
                    i,
                    j: None,
                    rank: dim,
                });
                poincare.add_term(0, i, dim as i64);
            }
        }
        HomologyTable {
            mode: "filtered".into(),
            entries,
            poincare: poincare.to_string(),
        }
    }

    fn homology_graded(&self, a: &GaussRat, h: &GaussRat) -> HomologyTable {
        // Split every degree into quantum-degree blocks.
        let mut ranks: HashMap<(i64, i64), usize> = HashMap::new();
        for (&i, mat) in &self.diffs {
            let src = &self.gens[&i];
            let tgt = match self.gens.get(&(i + 1)) {
                Some(t) => t,
                None => continue,
            };
            let mut by_j: BTreeMap<i64, Vec<RatRow>> = BTreeMap::new();
            let mut col_index: HashMap<(i64, usize), usize> = HashMap::new();
            let mut col_counts: BTreeMap<i64, usize> = BTreeMap::new();
            for (c, g) in src.iter().enumerate() {
                let slot = col_counts.entry(g.j).or_default();
                col_index.insert((g.j, c), *slot);
                *slot += 1;
            }
            for (r, row) in mat.rows.iter().enumerate() {
                for (&c, v) in row {
                    let s = v.specialize(a, h);
                    if s.is_zero() {
                        continue;
                    }
                    let j = src[c].j;
                    debug_assert_eq!(j, tgt[r].j, "graded differential preserves j");
                    let block = by_j.entry(j).or_default();
                    let cc = col_index[&(j, c)];
                    if block.len() <= cc {
                        block.resize(cc + 1, RatRow::new());
                    }
                    block[cc].insert(r, s);
                }
            }
            for (j, block) in by_j {
                let rk = rank_of_rows(block);
                if rk > 0 {
                    ranks.insert((i, j), rk);
                }
            }
        }
        let mut entries = Vec::new();
        let mut poincare = LaurentBi::zero();
        for (&i, gens) in &self.gens {
            let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
            for g in gens {
                *counts.entry(g.j).or_default() += 1;
            }
            for (&j, &count) in &counts {
                let out_rank = ranks.get(&(i, j)).copied().unwrap_or(0);
                let in_rank = ranks.get(&(i - 1, j)).copied().unwrap_or(0);
                let dim = count - out_rank - in_rank;
                if dim > 0 {
                    entries.push(HomEntry {
                        i,
                        j: Some(j),
                        rank: dim,
                    });
                    poincare.add_term(j, i, dim as i64);
                }
            }
        }
        entries.sort_by_key(|e| (e.i, e.j));
        HomologyTable {
            mode: "graded".into(),
            entries,
            poincare: poincare.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_braid, parse_pd};

    fn unknot() -> LinkDiagram {
        parse_pd("U1").unwrap()
    }

    fn hopf() -> LinkDiagram {
        parse_pd("X+(1,2,3,4) X+(4,3,2,1)").unwrap()
    }

    fn trefoil() -> LinkDiagram {
        parse_pd("X+(1,2,3,4) X+(4,3,5,6) X+(6,5,2,1)").unwrap()
    }

    #[test]
    fn derivation_succeeds() {
        let table = derive_edge_maps().expect("a convention exists");
        let product = &GaussPoly::constant(table.zip_unit.clone())
            * &GaussPoly::constant(table.unzip_unit.clone());
        assert_eq!(product, "-i".parse().unwrap());
        assert_eq!(table.rows().len(), 32);
    }

    #[test]
    fn unknot_complex() {
        let c = build_complex(&unknot()).unwrap();
        assert_eq!(c.total_generators(), 2);
        let gens = &c.gens[&0];
        let mut js: Vec<i64> = gens.iter().map(|g| g.j).collect();
        js.sort();
        assert_eq!(js, vec![-1, 1]);
        assert_eq!(c.euler_characteristic(), LaurentQ::circle());
    }

    #[test]
    fn trefoil_complex_shape() {
        let c = build_complex(&trefoil()).unwrap();
        let degrees = c.degrees();
        assert_eq!(degrees, vec![-3, -2, -1, 0]);
        // all-singular state: 3 circles; three 2-circle states; three
        // 1-circle states; the oriented state: 2 circles
        assert_eq!(
            c.gens.values().map(|g| g.len()).sum::<usize>(),
            8 + 12 + 6 + 4
        );
    }

    #[test]
    fn d_squared_and_degree_checks_run_on_build() {
        for (word, strands) in [("s1 s1 s1", 2), ("s1 s2^-1 s1 s2^-1", 3), ("s1 s2 s1", 3)] {
            let d = parse_braid(word, strands).unwrap();
            let c = build_complex(&d).unwrap();
            assert!(c.differential_is_degree_zero());
        }
    }

    #[test]
    fn unknot_homology_graded() {
        let c = build_complex(&unknot()).unwrap();
        let t = c.homology(&GaussRat::zero(), &GaussRat::zero());
        assert_eq!(t.mode, "graded");
        assert_eq!(
            t.entries,
            vec![
                HomEntry {
                    i: 0,
                    j: Some(-1),
                    rank: 1
                },
                HomEntry {
                    i: 0,
                    j: Some(1),
                    rank: 1
                },
            ]
        );
    }

    #[test]
    fn simplify_unknot() {
        let c = simplify(build_complex(&unknot()).unwrap());
        assert_eq!(c.total_generators(), 2);
        let js: Vec<i64> = c.gens[&0].iter().map(|g| g.j).collect();
        assert_eq!(js.iter().sum::<i64>(), 0);
    }

    #[test]
    fn simplify_preserves_euler_characteristic() {
        for (word, strands) in [("s1 s1 s1", 2), ("s1 s2^-1 s1 s2^-1", 3)] {
            let d = parse_braid(word, strands).unwrap();
            let c = build_complex(&d).unwrap();
            let chi = c.euler_characteristic();
            let s = simplify(c);
            assert_eq!(s.euler_characteristic(), chi);
        }
    }

    #[test]
    fn trefoil_graded_homology() {
        let c = build_complex(&trefoil()).unwrap();
        let brute = c.homology(&GaussRat::zero(), &GaussRat::zero());
        let slim = simplify(build_complex(&trefoil()).unwrap())
            .homology(&GaussRat::zero(), &GaussRat::zero());
        assert_eq!(brute, slim);
        assert_eq!(
            brute.entries,
            vec![
                HomEntry {
                    i: -3,
                    j: Some(9),
                    rank: 1
                },
                HomEntry {
                    i: -2,
                    j: Some(5),
                    rank: 1
                },
                HomEntry {
                    i: 0,
                    j: Some(1),
                    rank: 1
                },
                HomEntry {
                    i: 0,
                    j: Some(3),
                    rank: 1
                },
            ]
        );
    }

    #[test]
    fn hopf_filtered_dimension() {
        let c = simplify(build_complex(&hopf()).unwrap());
        let t = c.homology(&GaussRat::one(), &GaussRat::zero());
        assert_eq!(t.mode, "filtered");
        assert_eq!(t.total_dimension(), 4);
        let dims = t.dims_by_degree();
        assert_eq!(dims.get(&0), Some(&2));
        assert_eq!(dims.get(&-2), Some(&2));
    }

    #[test]
    fn graded_ranks_alternate_to_euler_coefficients() {
        for (word, strands) in [("s1 s1 s1", 2), ("s1 s2^-1 s1 s2^-1", 3)] {
            let d = parse_braid(word, strands).unwrap();
            let c = build_complex(&d).unwrap();
            let chi = c.euler_characteristic();
            let table = simplify(c).homology(&GaussRat::zero(), &GaussRat::zero());
            let mut by_j: BTreeMap<i64, i64> = BTreeMap::new();
            for e in &table.entries {
                let sign = if e.i.rem_euclid(2) == 0 { 1 } else { -1 };
                *by_j.entry(e.j.unwrap()).or_default() += sign * e.rank as i64;
            }
            by_j.retain(|_, v| *v != 0);
            let chi_map: BTreeMap<i64, i64> = chi.terms().map(|(&e, &c)| (e, c)).collect();
            assert_eq!(by_j, chi_map, "{word}");
        }
    }

    #[test]
    fn homology_is_independent_of_crossing_order() {
        let a = parse_pd("X+(1,2,3,4) X+(4,3,5,6) X+(6,5,2,1)").unwrap();
        let b = parse_pd("X+(6,5,2,1) X+(1,2,3,4) X+(4,3,5,6)").unwrap();
        let ta = build_complex(&a)
            .unwrap()
            .homology(&GaussRat::zero(), &GaussRat::zero());
        let tb = build_complex(&b)
            .unwrap()
            .homology(&GaussRat::zero(), &GaussRat::zero());
        assert_eq!(ta, tb);
    }

    fn random_braids(seed: u64, count: usize, max_len: usize) -> Vec<LinkDiagram> {
        let mut state = seed;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        (0..count)
            .map(|_| {
                let strands = 2 + (next() % 2) as usize;
                let len = 1 + (next() as usize) % max_len;
                let word: Vec<String> = (0..len)
                    .map(|_| {
                        let k = 1 + (next() as usize) % (strands - 1);
                        if next() % 2 == 0 {
                            format!("s{k}")
                        } else {
                            format!("s{k}^-1")
                        }
                    })
                    .collect();
                parse_braid(&word.join(" "), strands).unwrap()
            })
            .collect()
    }

    #[test]
    fn simplify_preserves_homology_on_random_diagrams() {
        // pinned seed for reproducibility
        let specializations = [
            (GaussRat::zero(), GaussRat::zero()),
            (GaussRat::one(), GaussRat::zero()),
            (GaussRat::zero(), GaussRat::one()),
        ];
        for d in random_braids(0x5eed_f0a3, 12, 4) {
            let full = build_complex(&d).unwrap();
            let slim = simplify(build_complex(&d).unwrap());
            for (a, h) in &specializations {
                assert_eq!(full.homology(a, h), slim.homology(a, h), "{d}");
            }
        }
    }

    #[test]
    fn euler_equals_state_sum_on_random_diagrams() {
        for d in random_braids(0xabcd_1234, 16, 5) {
            let chi = build_complex(&d).unwrap().euler_characteristic();
            assert_eq!(chi, crate::skein::p2(&d), "{d}");
        }
    }

    #[test]
    fn repeated_root_matches_graded_total() {
        // h^2 + 4a = 0 at (a, h) = (-1/4, 1); the dimensions agree with the
        // graded computation after the root shift.
        let d = trefoil();
        let c = simplify(build_complex(&d).unwrap());
        let graded = c.homology(&GaussRat::zero(), &GaussRat::zero());
        let shifted = c.homology(&"-1/4".parse().unwrap(), &GaussRat::one());
        assert_eq!(shifted.total_dimension(), graded.total_dimension());
        let graded_dims = graded.dims_by_degree();
        assert_eq!(shifted.dims_by_degree(), graded_dims);
    }
}
