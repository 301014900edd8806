//! Oriented link diagrams and their resolutions.
//!
//! PD codes list each crossing as `X+(a,b,c,d)` or `X-(a,b,c,d)` with the
//! four edge labels read counterclockwise starting from the incoming
//! under-edge `a`. The under-strand always runs `a -> c`. For a positive
//! crossing the over-strand runs `b -> d`; for a negative crossing it runs
//! `d -> b`. Crossingless unknot components are written `U<n>` (n circles).
//!
//! Resolving a crossing keeps either the orientation-preserving smoothing
//! (the oriented resolution) or the other smoothing, which acquires a sink
//! and a source bivalent vertex (the singular resolution). Circles of a
//! resolution are traced together with their vertices; a segment is a
//! maximal vertex-free arc of a circle.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num::{BigInt, BigRational, Zero};
use thiserror::Error;

pub type EdgeId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("edge {edge} appears {count} times as {role}; expected exactly once")]
    EdgeCount {
        edge: EdgeId,
        count: usize,
        role: &'static str,
    },
    #[error("braid generator s{index} out of range for {strands} strands")]
    GeneratorOutOfRange { index: usize, strands: usize },
    #[error("resolution choice has {got} bits, diagram has {want} crossings")]
    ChoiceLength { got: usize, want: usize },
    #[error("crossing smoothing does not change the circle count; diagram is not planar")]
    NotPlanar,
}

fn parse_err(src: &str, offset: usize, msg: impl Into<String>) -> DiagramError {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in src.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    DiagramError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

/// One crossing: slots a, b, c, d counterclockwise from the incoming
/// under-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub sign: Sign,
    pub edges: [EdgeId; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Head,
    Tail,
}

pub type EndRef = (EdgeId, End);

/// The two arcs of an oriented smoothing. `ArcB` is the arc carrying the
/// preferred sides of the vertices created by the singular smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arc {
    ArcA,
    ArcB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VKind {
    Sink,
    Source,
}

impl Crossing {
    fn a(&self) -> EdgeId {
        self.edges[0]
    }
    fn b(&self) -> EdgeId {
        self.edges[1]
    }
    fn c(&self) -> EdgeId {
        self.edges[2]
    }
    fn d(&self) -> EdgeId {
        self.edges[3]
    }

    /// Incoming ends at this crossing.
    pub fn heads(&self) -> [EndRef; 2] {
        match self.sign {
            Sign::Positive => [(self.a(), End::Head), (self.b(), End::Head)],
            Sign::Negative => [(self.a(), End::Head), (self.d(), End::Head)],
        }
    }

    /// Outgoing ends at this crossing.
    pub fn tails(&self) -> [EndRef; 2] {
        match self.sign {
            Sign::Positive => [(self.c(), End::Tail), (self.d(), End::Tail)],
            Sign::Negative => [(self.b(), End::Tail), (self.c(), End::Tail)],
        }
    }

    /// End pairs joined by the oriented smoothing.
    pub fn oriented_joins(&self) -> [(Arc, EndRef, EndRef); 2] {
        match self.sign {
            Sign::Positive => [
                (Arc::ArcA, (self.a(), End::Head), (self.d(), End::Tail)),
                (Arc::ArcB, (self.b(), End::Head), (self.c(), End::Tail)),
            ],
            Sign::Negative => [
                (Arc::ArcA, (self.d(), End::Head), (self.c(), End::Tail)),
                (Arc::ArcB, (self.a(), End::Head), (self.b(), End::Tail)),
            ],
        }
    }

    /// End pairs joined by the singular smoothing, with the preferred side
    /// of each new vertex.
    pub fn singular_joins(&self) -> [(VKind, EndRef, EndRef, EndRef); 2] {
        match self.sign {
            Sign::Positive => [
                (
                    VKind::Sink,
                    (self.a(), End::Head),
                    (self.b(), End::Head),
                    (self.b(), End::Head),
                ),
                (
                    VKind::Source,
                    (self.c(), End::Tail),
                    (self.d(), End::Tail),
                    (self.c(), End::Tail),
                ),
            ],
            Sign::Negative => [
                (
                    VKind::Sink,
                    (self.a(), End::Head),
                    (self.d(), End::Head),
                    (self.a(), End::Head),
                ),
                (
                    VKind::Source,
                    (self.b(), End::Tail),
                    (self.c(), End::Tail),
                    (self.b(), End::Tail),
                ),
            ],
        }
    }
}

/// An oriented link diagram with explicit crossing signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDiagram {
    pub crossings: Vec<Crossing>,
    /// Number of crossingless unknot components.
    pub unknots: usize,
    /// Link components as cyclic edge lists (crossingless unknots excluded).
    pub components: Vec<Vec<EdgeId>>,
}

impl LinkDiagram {
    pub fn new(crossings: Vec<Crossing>, unknots: usize) -> Result<Self, DiagramError> {
        // Every edge must occur exactly once as a head and once as a tail.
        let mut head_count: BTreeMap<EdgeId, usize> = BTreeMap::new();
        let mut tail_count: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for x in &crossings {
            for (e, _) in x.heads() {
                *head_count.entry(e).or_default() += 1;
            }
            for (e, _) in x.tails() {
                *tail_count.entry(e).or_default() += 1;
            }
        }
        let edges: BTreeSet<EdgeId> = head_count
            .keys()
            .chain(tail_count.keys())
            .copied()
            .collect();
        for &e in &edges {
            let hc = head_count.get(&e).copied().unwrap_or(0);
            let tc = tail_count.get(&e).copied().unwrap_or(0);
            if hc != 1 {
                return Err(DiagramError::EdgeCount {
                    edge: e,
                    count: hc,
                    role: "head",
                });
            }
            if tc != 1 {
                return Err(DiagramError::EdgeCount {
                    edge: e,
                    count: tc,
                    role: "tail",
                });
            }
        }

        // Trace link components along strands.
        let mut succ: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
        for x in &crossings {
            succ.insert(x.a(), x.c());
            match x.sign {
                Sign::Positive => succ.insert(x.b(), x.d()),
                Sign::Negative => succ.insert(x.d(), x.b()),
            };
        }
        let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
        let mut components = Vec::new();
        for &e in &edges {
            if seen.contains(&e) {
                continue;
            }
            let mut comp = Vec::new();
            let mut cur = e;
            loop {
                comp.push(cur);
                seen.insert(cur);
                cur = succ[&cur];
                if cur == e {
                    break;
                }
            }
            components.push(comp);
        }

        Ok(LinkDiagram {
            crossings,
            unknots,
            components,
        })
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }

    /// Total component count, crossingless unknots included.
    pub fn n_components(&self) -> usize {
        self.components.len() + self.unknots
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|x| x.sign.value()).sum()
    }

    pub fn signed_crossing_counts(&self) -> (usize, usize) {
        let pos = self
            .crossings
            .iter()
            .filter(|x| x.sign == Sign::Positive)
            .count();
        (pos, self.crossings.len() - pos)
    }

    fn component_of(&self) -> HashMap<EdgeId, usize> {
        let mut map = HashMap::new();
        for (idx, comp) in self.components.iter().enumerate() {
            for &e in comp {
                map.insert(e, idx);
            }
        }
        map
    }

    /// Pairwise linking numbers over all components (crossingless unknots
    /// occupy the trailing rows and columns and link nothing).
    pub fn linking_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.n_components();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        let comp_of = self.component_of();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        for x in &self.crossings {
            let under = comp_of[&x.a()];
            let over = match x.sign {
                Sign::Positive => comp_of[&x.b()],
                Sign::Negative => comp_of[&x.d()],
            };
            if under != over {
                let s = &half * BigRational::from_integer(BigInt::from(x.sign.value()));
                m[under][over] += &s;
                m[over][under] += &s;
            }
        }
        m
    }

    /// Replaces one crossing by its oriented smoothing, merging the strands.
    pub fn smooth_oriented(&self, crossing: usize) -> Result<LinkDiagram, DiagramError> {
        let x = self.crossings[crossing].clone();
        let pairs: Vec<(EdgeId, EdgeId)> = x
            .oriented_joins()
            .iter()
            .map(|(_, (e1, _), (e2, _))| (*e1, *e2))
            .collect();
        let mut crossings: Vec<Crossing> = self
            .crossings
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != crossing)
            .map(|(_, c)| c.clone())
            .collect();
        let mut unknots = self.unknots;
        // Union the joined edges; a join of an edge with itself closes a loop.
        let mut rename: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
        let resolve = |rename: &BTreeMap<EdgeId, EdgeId>, mut e: EdgeId| {
            while let Some(&next) = rename.get(&e) {
                e = next;
            }
            e
        };
        for (e1, e2) in pairs {
            let r1 = resolve(&rename, e1);
            let r2 = resolve(&rename, e2);
            if r1 == r2 {
                unknots += 1;
            } else {
                rename.insert(r2.max(r1), r2.min(r1));
            }
        }
        for c in &mut crossings {
            for e in &mut c.edges {
                *e = resolve(&rename, *e);
            }
        }
        LinkDiagram::new(crossings, unknots)
    }

    /// The same diagram with one crossing's over/under swapped to give it
    /// the requested sign. The four ends stay in place; the slot labels
    /// rotate because slot `a` must stay the incoming under-edge.
    pub fn with_sign(&self, crossing: usize, sign: Sign) -> LinkDiagram {
        let mut crossings = self.crossings.clone();
        let x = &mut crossings[crossing];
        if x.sign != sign {
            let e = x.edges;
            x.edges = match sign {
                Sign::Negative => [e[1], e[2], e[3], e[0]],
                Sign::Positive => [e[3], e[0], e[1], e[2]],
            };
            x.sign = sign;
        }
        LinkDiagram::new(crossings, self.unknots).expect("relabelled crossing stays valid")
    }

    /// Renders the diagram back to PD text.
    pub fn to_pd_string(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|x| {
                format!(
                    "X{}({},{},{},{})",
                    match x.sign {
                        Sign::Positive => '+',
                        Sign::Negative => '-',
                    },
                    x.edges[0],
                    x.edges[1],
                    x.edges[2],
                    x.edges[3]
                )
            })
            .collect();
        if self.unknots > 0 {
            parts.push(format!("U{}", self.unknots));
        }
        if parts.is_empty() {
            parts.push("U0".into());
        }
        parts.join(" ")
    }

    /// Traces the circles of the resolution given by one smoothing choice
    /// per crossing (false = oriented, true = singular).
    pub fn resolve(&self, choice: &[bool]) -> Result<ResolutionState, DiagramError> {
        if choice.len() != self.crossings.len() {
            return Err(DiagramError::ChoiceLength {
                got: choice.len(),
                want: self.crossings.len(),
            });
        }
        trace_state(self, choice)
    }
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_pd_string())
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses PD text such as `X+(1,2,3,4) X+(4,3,2,1)` or `U1`.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let mut crossings = Vec::new();
    let mut unknots = 0usize;
    let bytes: Vec<char> = text.chars().collect();
    let mut pos = 0usize;
    while pos < bytes.len() {
        if bytes[pos].is_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        match bytes[pos] {
            'U' | 'u' => {
                pos += 1;
                let dstart = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == dstart {
                    return Err(parse_err(text, start, "expected a count after `U`"));
                }
                let n: usize = bytes[dstart..pos]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| parse_err(text, dstart, "count out of range"))?;
                unknots += n;
            }
            'X' | 'x' => {
                pos += 1;
                let sign = match bytes.get(pos) {
                    Some('+') => Sign::Positive,
                    Some('-') => Sign::Negative,
                    _ => {
                        return Err(parse_err(
                            text,
                            pos,
                            "expected `+` or `-` after `X` (crossing signs are explicit)",
                        ))
                    }
                };
                pos += 1;
                if bytes.get(pos) != Some(&'(') {
                    return Err(parse_err(text, pos, "expected `(`"));
                }
                pos += 1;
                let mut edges = [0u32; 4];
                for slot in 0..4 {
                    while pos < bytes.len() && bytes[pos].is_whitespace() {
                        pos += 1;
                    }
                    let dstart = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == dstart {
                        return Err(parse_err(text, pos, "expected an edge label"));
                    }
                    edges[slot] = bytes[dstart..pos]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| parse_err(text, dstart, "edge label out of range"))?;
                    while pos < bytes.len() && bytes[pos].is_whitespace() {
                        pos += 1;
                    }
                    let want = if slot < 3 { ',' } else { ')' };
                    if bytes.get(pos) != Some(&want) {
                        return Err(parse_err(text, pos, format!("expected `{want}`")));
                    }
                    pos += 1;
                }
                crossings.push(Crossing { sign, edges });
            }
            other => {
                return Err(parse_err(
                    text,
                    pos,
                    format!("unexpected character `{other}`; expected `X` or `U`"),
                ))
            }
        }
    }
    LinkDiagram::new(crossings, unknots)
}

/// Parses a braid word such as `s1 s2^-1 s1` on the given number of strands
/// and returns the diagram of its closure.
pub fn parse_braid(word: &str, strands: usize) -> Result<LinkDiagram, DiagramError> {
    if strands == 0 {
        return Err(parse_err(word, 0, "a braid needs at least one strand"));
    }
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut next_edge: EdgeId = strands as EdgeId + 1;
    let init: Vec<EdgeId> = (1..=strands as EdgeId).collect();
    let mut current = init.clone();

    let chars: Vec<char> = word.chars().collect();
    let mut pos = 0usize;
    while pos < chars.len() {
        if chars[pos].is_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        if chars[pos] != 's' && chars[pos] != 'S' {
            return Err(parse_err(word, pos, "expected a generator `s<k>`"));
        }
        pos += 1;
        let dstart = pos;
        while pos < chars.len() && chars[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == dstart {
            return Err(parse_err(word, pos, "expected a strand index after `s`"));
        }
        let k: usize = chars[dstart..pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| parse_err(word, dstart, "strand index out of range"))?;
        let mut inverse = false;
        if chars.get(pos) == Some(&'^') {
            let rest: String = chars[pos..].iter().take(3).collect();
            if rest == "^-1" {
                inverse = true;
                pos += 3;
            } else {
                return Err(parse_err(word, pos, "expected `^-1`"));
            }
        }
        if k == 0 || k >= strands {
            let _ = start;
            return Err(DiagramError::GeneratorOutOfRange { index: k, strands });
        }
        let i = k - 1;
        if inverse {
            // Under-strand from the right position, over from the left.
            let a = current[i + 1];
            let d = current[i];
            let c = next_edge;
            let b = next_edge + 1;
            next_edge += 2;
            crossings.push(Crossing {
                sign: Sign::Negative,
                edges: [a, b, c, d],
            });
            current[i] = c;
            current[i + 1] = b;
        } else {
            let a = current[i];
            let b = current[i + 1];
            let c = next_edge;
            let d = next_edge + 1;
            next_edge += 2;
            crossings.push(Crossing {
                sign: Sign::Positive,
                edges: [a, b, c, d],
            });
            current[i] = d;
            current[i + 1] = c;
        }
    }

    // Close the braid: the top of each position joins its own bottom.
    let mut unknots = 0usize;
    let mut rename: HashMap<EdgeId, EdgeId> = HashMap::new();
    for p in 0..strands {
        if current[p] == init[p] {
            unknots += 1;
        } else {
            rename.insert(current[p], init[p]);
        }
    }
    for x in &mut crossings {
        for e in &mut x.edges {
            if let Some(&r) = rename.get(e) {
                *e = r;
            }
        }
    }
    LinkDiagram::new(crossings, unknots)
}

// ---------------------------------------------------------------------------
// Resolution tracing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Forward,
    Backward,
}

/// A maximal vertex-free arc of a traced circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub edges: Vec<(EdgeId, Dir)>,
    /// Oriented-smoothing joins passed inside this segment.
    pub joins: Vec<(usize, Arc)>,
}

/// A bivalent vertex encountered along a circle, between two segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexStop {
    pub crossing: usize,
    pub kind: VKind,
    /// End at which the walk arrived.
    pub enter: EndRef,
    /// End at which the walk left.
    pub exit: EndRef,
    /// Whether the preferred side of this vertex is the entering side.
    pub preferred_is_enter: bool,
}

/// Sort key identifying a circle across neighbouring resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CircleKey {
    Edge(EdgeId),
    Unknot(u32),
}

/// One circle of a resolution. `stops[k]` separates `segments[k-1]` from
/// `segments[k]` cyclically; a vertex-free circle has one segment and no
/// stops. Consecutive segments alternate between the two twist classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    pub key: CircleKey,
    pub segments: Vec<Segment>,
    pub stops: Vec<VertexStop>,
    /// Index of the segment containing the smallest edge (the reference).
    pub ref_segment: usize,
}

impl Circle {
    pub fn vertex_count(&self) -> usize {
        self.stops.len()
    }

    /// Twist class of a segment relative to the reference segment: the
    /// parity of the number of vertices between them.
    pub fn seg_class(&self, seg: usize) -> u8 {
        if self.stops.is_empty() {
            return 0;
        }
        (((seg as i64 - self.ref_segment as i64).rem_euclid(2)) % 2) as u8
    }

    /// The segment adjacent to stop `k` on the side of the given end.
    pub fn side_segment(&self, stop: usize, end: EndRef) -> Option<usize> {
        let s = &self.stops[stop];
        let m = self.segments.len();
        if s.enter == end {
            Some((stop + m - 1) % m)
        } else if s.exit == end {
            Some(stop)
        } else {
            None
        }
    }
}

/// A full resolution of a diagram: a disjoint union of circles carrying
/// bivalent vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionState {
    pub circles: Vec<Circle>,
    or_join_pos: HashMap<(usize, Arc), (usize, usize)>,
    vertex_pos: HashMap<(usize, VKind), (usize, usize)>,
}

impl ResolutionState {
    pub fn n_circles(&self) -> usize {
        self.circles.len()
    }

    /// Which (circle, segment) passes the oriented-smoothing join of a
    /// crossing resolved orientedly in this state.
    pub fn or_join_pos(&self, crossing: usize, arc: Arc) -> Option<(usize, usize)> {
        self.or_join_pos.get(&(crossing, arc)).copied()
    }

    /// Which (circle, stop index) carries a vertex of a singularly resolved
    /// crossing.
    pub fn vertex_pos(&self, crossing: usize, kind: VKind) -> Option<(usize, usize)> {
        self.vertex_pos.get(&(crossing, kind)).copied()
    }

    /// Circle index by identifying key.
    pub fn circle_by_key(&self, key: CircleKey) -> Option<usize> {
        self.circles.iter().position(|c| c.key == key)
    }
}

#[derive(Debug, Clone)]
enum WalkItem {
    Edge(EdgeId, Dir),
    SmoothJoin(usize, Arc),
    Vertex(usize, VKind, EndRef, EndRef, bool),
}

fn trace_state(diagram: &LinkDiagram, choice: &[bool]) -> Result<ResolutionState, DiagramError> {
    #[derive(Clone, Copy)]
    enum JoinInfo {
        Smooth(usize, Arc),
        Vertex(usize, VKind, bool),
    }

    // Partner table across the chosen smoothings.
    let mut partner: HashMap<EndRef, (EndRef, JoinInfo)> = HashMap::new();
    for (idx, x) in diagram.crossings.iter().enumerate() {
        if choice[idx] {
            for (kind, e1, e2, pref) in x.singular_joins() {
                partner.insert(e1, (e2, JoinInfo::Vertex(idx, kind, e2 == pref)));
                partner.insert(e2, (e1, JoinInfo::Vertex(idx, kind, e1 == pref)));
            }
        } else {
            for (arc, e1, e2) in x.oriented_joins() {
                partner.insert(e1, (e2, JoinInfo::Smooth(idx, arc)));
                partner.insert(e2, (e1, JoinInfo::Smooth(idx, arc)));
            }
        }
    }

    let mut edges: Vec<EdgeId> = partner.keys().map(|(e, _)| *e).collect();
    edges.sort_unstable();
    edges.dedup();

    let mut visited: BTreeSet<EdgeId> = BTreeSet::new();
    let mut circles = Vec::new();
    for &start_edge in &edges {
        if visited.contains(&start_edge) {
            continue;
        }
        let start = (start_edge, Dir::Forward);
        let mut items: Vec<WalkItem> = Vec::new();
        let mut cur = start;
        loop {
            let (e, dir) = cur;
            debug_assert!(!visited.contains(&e), "edge {e} traversed twice");
            visited.insert(e);
            items.push(WalkItem::Edge(e, dir));
            let arriving: EndRef = match dir {
                Dir::Forward => (e, End::Head),
                Dir::Backward => (e, End::Tail),
            };
            let (next_end, info) = partner[&arriving];
            match info {
                JoinInfo::Smooth(x, arc) => items.push(WalkItem::SmoothJoin(x, arc)),
                JoinInfo::Vertex(x, kind, pref_is_arriving) => {
                    // preferred_is_enter refers to the side the walk came from
                    items.push(WalkItem::Vertex(
                        x,
                        kind,
                        arriving,
                        next_end,
                        pref_is_arriving,
                    ));
                }
            }
            let next_dir = match next_end.1 {
                End::Head => Dir::Backward,
                End::Tail => Dir::Forward,
            };
            cur = (next_end.0, next_dir);
            if cur == start {
                break;
            }
        }
        circles.push(build_circle(items));
    }

    for k in 0..diagram.unknots {
        circles.push(Circle {
            key: CircleKey::Unknot(k as u32),
            segments: vec![Segment {
                edges: vec![],
                joins: vec![],
            }],
            stops: vec![],
            ref_segment: 0,
        });
    }

    circles.sort_by_key(|c| c.key);

    let mut or_join_pos = HashMap::new();
    let mut vertex_pos = HashMap::new();
    for (ci, circle) in circles.iter().enumerate() {
        for (si, seg) in circle.segments.iter().enumerate() {
            for &(x, arc) in &seg.joins {
                or_join_pos.insert((x, arc), (ci, si));
            }
        }
        for (vi, stop) in circle.stops.iter().enumerate() {
            vertex_pos.insert((stop.crossing, stop.kind), (ci, vi));
        }
        debug_assert!(
            circle.stops.len() % 2 == 0,
            "circle carries an odd number of vertices"
        );
    }

    Ok(ResolutionState {
        circles,
        or_join_pos,
        vertex_pos,
    })
}

fn build_circle(items: Vec<WalkItem>) -> Circle {
    // Rotate so that the walk starts right after a vertex, when one exists.
    let first_vertex = items
        .iter()
        .position(|it| matches!(it, WalkItem::Vertex(..)));
    let rotated: Vec<WalkItem> = match first_vertex {
        Some(pos) => {
            let mut v = Vec::with_capacity(items.len());
            v.extend_from_slice(&items[pos + 1..]);
            v.extend_from_slice(&items[..=pos]);
            v
        }
        None => items,
    };

    let mut segments = Vec::new();
    let mut stops = Vec::new();
    let mut seg = Segment {
        edges: vec![],
        joins: vec![],
    };
    for item in rotated {
        match item {
            WalkItem::Edge(e, d) => seg.edges.push((e, d)),
            WalkItem::SmoothJoin(x, arc) => seg.joins.push((x, arc)),
            WalkItem::Vertex(x, kind, enter, exit, pref_is_enter) => {
                segments.push(std::mem::replace(
                    &mut seg,
                    Segment {
                        edges: vec![],
                        joins: vec![],
                    },
                ));
                stops.push(VertexStop {
                    crossing: x,
                    kind,
                    enter,
                    exit,
                    preferred_is_enter: pref_is_enter,
                });
            }
        }
    }
    if stops.is_empty() {
        segments.push(seg);
    } else {
        debug_assert!(seg.edges.is_empty() && seg.joins.is_empty());
        // With the rotation above, stops[k] closes segments[k]; shift so that
        // stops[k] precedes segments[k].
        stops.rotate_right(1);
    }

    let min_edge = segments
        .iter()
        .flat_map(|s| s.edges.iter().map(|(e, _)| *e))
        .min()
        .expect("traced circle has at least one edge");
    let ref_segment = segments
        .iter()
        .position(|s| s.edges.iter().any(|(e, _)| *e == min_edge))
        .unwrap();

    Circle {
        key: CircleKey::Edge(min_edge),
        segments,
        stops,
        ref_segment,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn hopf() -> LinkDiagram {
        parse_pd("X+(1,2,3,4) X+(4,3,2,1)").unwrap()
    }

    pub fn trefoil() -> LinkDiagram {
        parse_pd("X+(1,2,3,4) X+(4,3,5,6) X+(6,5,2,1)").unwrap()
    }

    #[test]
    fn parse_unknot_token() {
        let d = parse_pd("U1").unwrap();
        assert_eq!(d.n_crossings(), 0);
        assert_eq!(d.n_components(), 1);
        assert_eq!(d.writhe(), 0);
    }

    #[test]
    fn parse_hopf() {
        let d = hopf();
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.writhe(), 2);
    }

    #[test]
    fn parse_trefoil() {
        let d = trefoil();
        assert_eq!(d.n_components(), 1);
        assert_eq!(d.writhe(), 3);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_pd("X(1,2,3,4)"),
            Err(DiagramError::Parse { .. })
        ));
        assert!(matches!(
            parse_pd("Y+(1,2,3,4)"),
            Err(DiagramError::Parse { .. })
        ));
        // edge 1 appears twice as head
        assert!(matches!(
            parse_pd("X+(1,1,2,2) X+(3,3,4,4)"),
            Err(DiagramError::EdgeCount { .. })
        ));
    }

    #[test]
    fn braid_closures() {
        let hopf_b = parse_braid("s1 s1", 2).unwrap();
        assert_eq!(hopf_b.n_components(), 2);
        assert_eq!(hopf_b.writhe(), 2);
        assert_eq!(hopf_b.n_crossings(), 2);

        let tref = parse_braid("s1 s1 s1", 2).unwrap();
        assert_eq!(tref.n_components(), 1);
        assert_eq!(tref.writhe(), 3);

        let unknot = parse_braid("", 1).unwrap();
        assert_eq!(unknot.n_components(), 1);
        assert_eq!(unknot.n_crossings(), 0);

        assert!(matches!(
            parse_braid("s2", 2),
            Err(DiagramError::GeneratorOutOfRange { .. })
        ));
    }

    #[test]
    fn braid_spare_strand_becomes_unknot() {
        let d = parse_braid("s1", 3).unwrap();
        assert_eq!(d.unknots, 1);
        assert_eq!(d.n_components(), 2);
    }

    #[test]
    fn writhe_agrees_between_parsers() {
        let by_pd = trefoil();
        let by_braid = parse_braid("s1 s1 s1", 2).unwrap();
        assert_eq!(by_pd.writhe(), by_braid.writhe());
        assert_eq!(by_pd.n_components(), by_braid.n_components());
    }

    #[test]
    fn resolve_unknot() {
        let d = parse_pd("U1").unwrap();
        let r = d.resolve(&[]).unwrap();
        assert_eq!(r.n_circles(), 1);
        assert_eq!(r.circles[0].vertex_count(), 0);
    }

    #[test]
    fn resolve_hopf_states() {
        let d = hopf();
        let oriented = d.resolve(&[false, false]).unwrap();
        assert_eq!(oriented.n_circles(), 2);
        assert!(oriented.circles.iter().all(|c| c.vertex_count() == 0));

        let singular = d.resolve(&[true, true]).unwrap();
        assert_eq!(singular.n_circles(), 2);
        assert!(singular.circles.iter().all(|c| c.vertex_count() == 2));

        let mixed = d.resolve(&[true, false]).unwrap();
        assert_eq!(mixed.n_circles(), 1);
        assert_eq!(mixed.circles[0].vertex_count(), 2);
    }

    #[test]
    fn circle_count_changes_by_one_per_flip() {
        for d in [
            hopf(),
            trefoil(),
            parse_braid("s1 s2^-1 s1 s2^-1", 3).unwrap(),
        ] {
            let c = d.n_crossings();
            for bits in 0..(1u32 << c) {
                let choice: Vec<bool> = (0..c).map(|k| bits >> k & 1 == 1).collect();
                let base = d.resolve(&choice).unwrap().n_circles() as i64;
                for k in 0..c {
                    let mut flipped = choice.clone();
                    flipped[k] = !flipped[k];
                    let other = d.resolve(&flipped).unwrap().n_circles() as i64;
                    assert_eq!((base - other).abs(), 1);
                }
            }
        }
    }

    #[test]
    fn even_vertex_counts() {
        for d in [
            hopf(),
            trefoil(),
            parse_braid("s1 s2^-1 s1 s2^-1", 3).unwrap(),
        ] {
            let c = d.n_crossings();
            for bits in 0..(1u32 << c) {
                let choice: Vec<bool> = (0..c).map(|k| bits >> k & 1 == 1).collect();
                let state = d.resolve(&choice).unwrap();
                for circle in &state.circles {
                    assert_eq!(circle.vertex_count() % 2, 0);
                }
            }
        }
    }

    #[test]
    fn linking_matrices() {
        let unknot = parse_pd("U1").unwrap();
        assert!(unknot.linking_matrix()[0][0].is_zero());

        let d = hopf();
        let m = d.linking_matrix();
        assert_eq!(m[0][1], BigRational::from_integer(BigInt::from(1)));
        assert_eq!(m[1][0], BigRational::from_integer(BigInt::from(1)));
        assert!(m[0][0].is_zero());

        let unlink = parse_pd("U2").unwrap();
        let m = unlink.linking_matrix();
        assert!(m.iter().all(|row| row.iter().all(|v| v.is_zero())));
    }

    #[test]
    fn smooth_oriented_drops_a_crossing() {
        let d = trefoil();
        let s = d.smooth_oriented(0).unwrap();
        assert_eq!(s.n_crossings(), 2);
        // smoothing the Seifert way splits into the 2-braid closure of s1 s1
        assert_eq!(s.n_components(), 2);
    }
}
