//! Splitting detectors: the link certificate for one-endedness, searches
//! for 0-, 1- and 2-cuts in a ball of the universal cover, periodic 2-cuts
//! and the Grushko unfolding of square complexes.
//!
//! Searches "at scale `R`" develop a ball of radius `R + 1` and take
//! candidate subcomplexes among hulls of one or two vertices of depth at
//! most `R - 1`, so every candidate has margin at least 2 and crossings are
//! stabilized against the outer shell.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::cover::{ConvexSubcomplex, CoverBall, CoverError};
use crate::cube_complex::{CubeComplex, CubeComplexBuilder, CubeError, HomologyGroup, SignedEdge, UnionFind};
use crate::simplicial::{
    isomorphism, same_reduced_class, SimplicialComplex, SimplicialError, ZeroCohomologyClass,
};
use crate::whitehead::{
    hyperplane_component, whitehead_complex, wh_link_check, HyperplaneComponent, WhiteheadComplex, WhiteheadError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("complex is not non-positively curved at vertex {0:?}")]
    NotNpc(String),
    #[error("only square complexes are supported here (dimension {0})")]
    UnsupportedDimension(usize),
    #[error("Whitehead complex is not stabilized at this radius")]
    NotStabilized,
    #[error("preflight found a {k}-cut at scale {radius}")]
    Preflight { k: usize, radius: usize, report: Box<CutReport> },
    #[error("class pulls back to a trivial class on the component of wall {0}")]
    TrivialPullback(usize),
    #[error("class is undefined at wall {0}")]
    ClassDomain(usize),
    #[error("link of wall {0} does not match the Whitehead complex of its component")]
    LinkMismatch(usize),
    #[error("unfolding did not finish within {0} steps")]
    IterationCap(usize),
    #[error("unfolding produced an invalid complex: {0}")]
    Unfold(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Whitehead(#[from] WhiteheadError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

fn require_npc(x: &CubeComplex) -> Result<(), SplitError> {
    let verdict = x.check_npc();
    match verdict.offending_vertex {
        Some(v) if !verdict.npc => Err(SplitError::NotNpc(v)),
        _ => Ok(()),
    }
}

fn labels(cx: &SimplicialComplex, vs: impl IntoIterator<Item = usize>) -> Vec<String> {
    vs.into_iter()
        .map(|v| cx.label(v).map_or_else(|| v.to_string(), str::to_string))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Certificate {
    /// Every vertex link is connected with no cut simplex.
    CertifiedOneEndOrPoint,
    Inapplicable { vertex: String, reason: CertificateFailure },
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::CertifiedOneEndOrPoint)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateFailure {
    /// Edge-end labels of each link component.
    DisconnectedLink { components: Vec<Vec<String>> },
    CutSimplex { simplex: Vec<String> },
}

/// Checks every vertex link for connectedness and cut simplices.
pub fn whitehead_lemma_certificate(x: &CubeComplex) -> Result<Certificate, SplitError> {
    require_npc(x)?;
    for v in 0..x.num_vertices() {
        let lk = x.vertex_link(v);
        if lk.is_empty() {
            continue;
        }
        let vertex = x.vertex_id(v).to_string();
        if !lk.is_connected() {
            let components = lk.components().into_iter().map(|c| labels(&lk, c)).collect();
            return Ok(Certificate::Inapplicable {
                vertex,
                reason: CertificateFailure::DisconnectedLink { components },
            });
        }
        if let Some(s) = lk.find_cut_simplex()? {
            return Ok(Certificate::Inapplicable {
                vertex,
                reason: CertificateFailure::CutSimplex { simplex: labels(&lk, s) },
            });
        }
    }
    Ok(Certificate::CertifiedOneEndOrPoint)
}

/// A `k`-cut witness in a ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutReport {
    pub y: ConvexSubcomplex,
    pub k: usize,
    /// Minimal cut set of `Wh(Y)` (wall ids), empty for `k = 0`.
    pub cut_walls: Vec<usize>,
    /// Least width over pairs of cut walls; `None` for `k < 2`.
    pub width: Option<usize>,
    /// Classes of `Wh(Y)` minus the open star of the cut set.
    pub classes: Vec<ZeroCohomologyClass>,
    pub stabilized: bool,
}

/// Ball used for a search at scale `radius`.
pub fn search_ball(x: &CubeComplex, radius: usize) -> Result<CoverBall, SplitError> {
    require_npc(x)?;
    Ok(CoverBall::develop(x, 0, radius + 1)?)
}

/// Hulls of one or two vertices at depth `<= R - 1` of a radius `R + 1`
/// ball, ordered by (size, vertex list).
pub fn candidate_subcomplexes(ball: &CoverBall) -> Vec<ConvexSubcomplex> {
    let r = ball.radius();
    if r < 2 {
        return Vec::new();
    }
    let gens: Vec<usize> = (0..ball.num_vertices()).filter(|&v| ball.depth(v) + 2 <= r).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, &p) in gens.iter().enumerate() {
        for &q in &gens[i..] {
            let Ok(y) = ball.convex_hull(&[p, q]) else { continue };
            if y.margin >= 2 && seen.insert(y.vertices.clone()) {
                out.push(y);
            }
        }
    }
    out.sort_by(|a, b| (a.len(), &a.vertices).cmp(&(b.len(), &b.vertices)));
    out
}

fn zero_cut(y: &ConvexSubcomplex, wh: &WhiteheadComplex) -> Option<CutReport> {
    if wh.complex.is_empty() || !wh.complex.is_connected() {
        Some(CutReport {
            y: y.clone(),
            k: 0,
            cut_walls: Vec::new(),
            width: None,
            classes: wh.complex.reduced_h0_classes(),
            stabilized: wh.stabilized,
        })
    } else {
        None
    }
}

/// First candidate `Y` whose Whitehead complex is empty or disconnected.
/// `None` is inconclusive at this scale.
pub fn search_free_splitting(x: &CubeComplex, radius: usize) -> Result<Option<CutReport>, SplitError> {
    let ball = search_ball(x, radius)?;
    search_free_splitting_in(&ball)
}

pub fn search_free_splitting_in(ball: &CoverBall) -> Result<Option<CutReport>, SplitError> {
    for y in candidate_subcomplexes(ball) {
        let wh = whitehead_complex(ball, &y)?;
        if let Some(r) = zero_cut(&y, &wh) {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// `1 +` the least ball distance between the carriers of two walls.
pub fn wall_width(ball: &CoverBall, a: usize, b: usize) -> usize {
    let carrier = |w: usize| -> BTreeSet<usize> {
        ball.walls()[w].edges.iter().flat_map(|&e| ball.edges()[e].ends).collect()
    };
    let target = carrier(b);
    let mut dist = vec![usize::MAX; ball.num_vertices()];
    let mut queue = VecDeque::new();
    for v in carrier(a) {
        dist[v] = 0;
        queue.push_back(v);
    }
    while let Some(x) = queue.pop_front() {
        if target.contains(&x) {
            return dist[x] + 1;
        }
        for (y, _) in ball.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    usize::MAX
}

fn cut_width(ball: &CoverBall, walls: &[usize]) -> Option<usize> {
    let mut best = None;
    for (i, &a) in walls.iter().enumerate() {
        for &b in &walls[i + 1..] {
            let w = wall_width(ball, a, b);
            best = Some(best.map_or(w, |x: usize| x.min(w)));
        }
    }
    best
}

fn report_for(ball: &CoverBall, y: &ConvexSubcomplex, wh: &WhiteheadComplex, walls: Vec<usize>) -> Result<CutReport, SplitError> {
    let star: Vec<Vec<usize>> = walls.iter().map(|&w| vec![w]).collect();
    let rest = wh.complex.remove_open_star(&star)?;
    Ok(CutReport {
        y: y.clone(),
        k: walls.len(),
        width: cut_width(ball, &walls),
        classes: rest.reduced_h0_classes(),
        cut_walls: walls,
        stabilized: wh.stabilized,
    })
}

/// Least `k <= k_max` with a cut set of size `k` in `Wh(Y)`.
pub fn classify_cut(ball: &CoverBall, y: &ConvexSubcomplex, k_max: usize) -> Result<Option<CutReport>, SplitError> {
    let wh = whitehead_complex(ball, y)?;
    if !wh.stabilized {
        return Err(SplitError::NotStabilized);
    }
    if let Some(r) = zero_cut(y, &wh) {
        return Ok(Some(r));
    }
    match wh.complex.min_cut_cardinality(k_max)? {
        Some((_, walls)) => Ok(Some(report_for(ball, y, &wh, walls)?)),
        None => Ok(None),
    }
}

/// A bounding-wall component with a class on its Whitehead complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbstractHyperplaneComponent {
    pub component: HyperplaneComponent,
    /// `Wh_H(K)`, vertices are wall ids.
    pub wh: SimplicialComplex,
    pub c_k: ZeroCohomologyClass,
}

/// Pulls `c_y` back along `Lk_{Wh(Y)}(H) ≅ Wh_H(H_Y)`.
pub fn abstract_component(
    ball: &CoverBall,
    y: &ConvexSubcomplex,
    wall: usize,
    c_y: &ZeroCohomologyClass,
) -> Result<AbstractHyperplaneComponent, SplitError> {
    let check = wh_link_check(ball, y, wall)?;
    if !check.isomorphic {
        return Err(SplitError::LinkMismatch(wall));
    }
    let component = hyperplane_component(ball, y, wall)?;
    let wh = check.component.complex;
    let components = wh.components();
    let mut class = BTreeSet::new();
    for (i, comp) in components.iter().enumerate() {
        let v = comp[0];
        if c_y.value_at(v).ok_or(SplitError::ClassDomain(v))? {
            class.insert(i);
        }
    }
    if class.contains(&0) {
        class = (0..components.len()).filter(|i| !class.contains(i)).collect();
    }
    if class.is_empty() {
        return Err(SplitError::TrivialPullback(wall));
    }
    Ok(AbstractHyperplaneComponent {
        component,
        wh,
        c_k: ZeroCohomologyClass { components, class },
    })
}

/// Deck transformation taking one oriented component to another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OppositeWitness {
    pub from: usize,
    pub to: usize,
    /// The group element as an edge-end word at the basepoint.
    pub word: String,
    /// Image of each wall of `Wh_H(K)`.
    pub wall_map: BTreeMap<usize, usize>,
}

fn image_wall(ball: &CoverBall, g: &BTreeMap<usize, usize>, wall: usize) -> Option<usize> {
    ball.walls()[wall].edges.iter().find_map(|&e| {
        let [x, y] = ball.edges()[e].ends;
        let (gx, gy) = (*g.get(&x)?, *g.get(&y)?);
        ball.neighbors(gx).find(|&(n, _)| n == gy).map(|(_, e2)| ball.edges()[e2].wall)
    })
}

/// Checks that the translation `p ↦ q` carries `a` onto `b`, pulls `c_b`
/// back to `c_a` and reverses orientations.
pub fn check_translation(
    ball: &CoverBall,
    a: &AbstractHyperplaneComponent,
    b: &AbstractHyperplaneComponent,
    p: usize,
    q: usize,
) -> Option<OppositeWitness> {
    let g = ball.translation(p, q)?;
    let ka = &a.component;
    let kb = &b.component;
    if ka.edges.len() != kb.edges.len() {
        return None;
    }
    let mut hit = BTreeSet::new();
    for (&x, &y) in ka.inner_ends.iter().zip(&ka.outer_ends) {
        let (gx, gy) = (*g.get(&x)?, *g.get(&y)?);
        let j = kb.edges.iter().position(|&e| {
            let ends = ball.edges()[e].ends;
            ends == [gx, gy] || ends == [gy, gx]
        })?;
        // orientation reversal: inner ends go to outer ends
        if kb.outer_ends[j] != gx {
            return None;
        }
        hit.insert(j);
    }
    if hit.len() != kb.edges.len() {
        return None;
    }
    let mut wall_map = BTreeMap::new();
    for w in a.wh.vertices() {
        let w2 = image_wall(ball, &g, w)?;
        if !b.wh.contains_vertex(w2) {
            return None;
        }
        wall_map.insert(w, w2);
    }
    let images: BTreeSet<usize> = wall_map.values().copied().collect();
    if images.len() != wall_map.len() || images.len() != b.wh.num_vertices() {
        return None;
    }
    if a.wh.relabeled(&wall_map).simplices_canonical() != b.wh.simplices_canonical() {
        return None;
    }
    let verts: BTreeSet<usize> = a.wh.vertices().collect();
    let ca = |v: usize| a.c_k.value_at(v).unwrap_or(false);
    let cb = |v: usize| b.c_k.value_at(wall_map[&v]).unwrap_or(false);
    if !same_reduced_class(&verts, &ca, &cb) {
        return None;
    }
    Some(OppositeWitness {
        from: p,
        to: q,
        word: ball.word_string(&ball.deck_word(p, q)),
        wall_map,
    })
}

/// Searches deck transformations carrying `a` to `b` with reversed
/// orientation, least group element first.
pub fn opposite_type(
    a: &AbstractHyperplaneComponent,
    b: &AbstractHyperplaneComponent,
    ball: &CoverBall,
) -> Option<OppositeWitness> {
    if isomorphism(&a.wh, &b.wh, false).is_none() {
        return None;
    }
    let p = a.component.inner_ends[0];
    let mut targets: Vec<(Vec<usize>, usize)> = b
        .component
        .outer_ends
        .iter()
        .chain(&b.component.inner_ends)
        .filter(|&&q| ball.proj(q) == ball.proj(p))
        .map(|&q| (ball.deck_word(p, q), q))
        .collect();
    targets.sort_by(|x, y| (x.0.len(), &x.0, x.1).cmp(&(y.0.len(), &y.0, y.1)));
    targets.dedup();
    targets.into_iter().find_map(|(_, q)| check_translation(ball, a, b, p, q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicCut {
    pub radius: usize,
    pub report: CutReport,
    /// The class `c_Y` used for both components.
    pub class: ZeroCohomologyClass,
    pub first: AbstractHyperplaneComponent,
    pub second: AbstractHyperplaneComponent,
    pub witness: OppositeWitness,
    /// Candidates skipped because their crossings were not stabilized.
    pub skipped_unstabilized: usize,
}

/// Semi-decision search for a periodic 2-cut at scale `radius`.
/// `Ok(None)` is inconclusive.
pub fn detect_periodic_2cut(
    x: &CubeComplex,
    radius: usize,
    width_max: usize,
) -> Result<Option<PeriodicCut>, SplitError> {
    let ball = search_ball(x, radius)?;
    if let Some(report) = search_free_splitting_in(&ball)? {
        return Err(SplitError::Preflight { k: 0, radius, report: Box::new(report) });
    }
    let mut stable = Vec::new();
    let mut skipped = 0;
    for y in candidate_subcomplexes(&ball) {
        let wh = whitehead_complex(&ball, &y)?;
        if !wh.stabilized {
            skipped += 1;
            continue;
        }
        if let Some(cut) = wh.complex.cut_sets_of_size(1, true).into_iter().next() {
            let report = report_for(&ball, &y, &wh, cut)?;
            return Err(SplitError::Preflight { k: 1, radius, report: Box::new(report) });
        }
        stable.push((y, wh));
    }
    for (y, wh) in &stable {
        let mut pairs: Vec<(usize, Vec<usize>)> = wh
            .complex
            .cut_sets_of_size(2, false)
            .into_iter()
            .map(|p| (wall_width(&ball, p[0], p[1]), p))
            .filter(|(w, _)| *w <= width_max)
            .collect();
        pairs.sort();
        for (_, pair) in pairs {
            let report = report_for(&ball, y, wh, pair.clone())?;
            for c in &report.classes {
                let Ok(a) = abstract_component(&ball, y, pair[0], c) else { continue };
                let Ok(b) = abstract_component(&ball, y, pair[1], c) else { continue };
                if let Some(witness) = opposite_type(&a, &b, &ball) {
                    return Ok(Some(PeriodicCut {
                        radius,
                        class: c.clone(),
                        report,
                        first: a,
                        second: b,
                        witness,
                        skipped_unstabilized: skipped,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Recomputes both components and the translation from the witness.
pub fn verify_periodic_2cut(x: &CubeComplex, cut: &PeriodicCut) -> Result<bool, SplitError> {
    let ball = search_ball(x, cut.radius)?;
    let y = &cut.report.y;
    let [h1, h2] = cut.report.cut_walls[..] else { return Ok(false) };
    let a = abstract_component(&ball, y, h1, &cut.class)?;
    let b = abstract_component(&ball, y, h2, &cut.class)?;
    if a != cut.first || b != cut.second {
        return Ok(false);
    }
    Ok(check_translation(&ball, &a, &b, cut.witness.from, cut.witness.to).as_ref() == Some(&cut.witness))
}

/// One unfolding move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnfoldStep {
    pub vertex: String,
    pub edge: String,
    /// Number of copies the edge was split into.
    pub copies: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrushkoReport {
    pub unfolded: CubeComplex,
    pub trace: Vec<UnfoldStep>,
    /// Rank of the free factor.
    pub graph_rank: usize,
    /// Edges lying in no factor.
    pub graph_edges: Vec<String>,
    pub factors: Vec<CubeComplex>,
    /// Pieces made of one embedded square.
    pub squares: Vec<CubeComplex>,
    pub h1_before: HomologyGroup,
    pub h1_after: HomologyGroup,
}

fn fresh(taken: &mut BTreeSet<String>, base: &str) -> String {
    let mut i = 1;
    loop {
        let id = format!("{base}~{i}");
        if taken.insert(id.clone()) {
            return id;
        }
        i += 1;
    }
}

/// Corners of a square in boundary order.
const WALK: [usize; 4] = [0, 1, 3, 2];

/// Finds the least `(vertex, link cut vertex)`; returns the partition of
/// the remaining edge-ends at that vertex.
fn find_unfolding(x: &CubeComplex) -> Option<(usize, usize, Vec<BTreeSet<usize>>)> {
    for v in 0..x.num_vertices() {
        let lk = x.vertex_link(v);
        for comp in lk.components() {
            let sub = lk.induced(&comp.iter().copied().collect());
            let Some(cut) = sub.cut_sets_of_size(1, true).into_iter().next() else { continue };
            let c = cut[0];
            let mut parts: Vec<BTreeSet<usize>> = sub
                .remove_vertices(&BTreeSet::from([c]))
                .components()
                .into_iter()
                .map(|p| p.into_iter().collect())
                .collect();
            parts.sort();
            for other in lk.components() {
                if !other.contains(&c) {
                    parts[0].extend(other);
                }
            }
            return Some((v, c, parts));
        }
    }
    None
}

/// Splits vertex `v` into one copy per part and the edge of `c` into one
/// copy per part, reattaching squares by the link component of their corner.
fn unfold(x: &CubeComplex, v: usize, c: usize, parts: &[BTreeSet<usize>]) -> Result<CubeComplex, SplitError> {
    let part_of = |ee: usize| parts.iter().position(|p| p.contains(&ee)).expect("edge-end in a part");
    let e = c / 2;
    let mut taken: BTreeSet<String> = (0..x.num_vertices()).map(|u| x.vertex_id(u).to_string()).collect();
    taken.extend(x.edges().iter().map(|f| f.id.clone()));
    let mut b = CubeComplexBuilder::new();
    let mut vmap = Vec::new();
    let mut copies = Vec::new();
    for u in 0..x.num_vertices() {
        vmap.push(b.vertex(x.vertex_id(u)));
        if u == v {
            copies.push(vmap[u]);
            for _ in 1..parts.len() {
                let id = fresh(&mut taken, x.vertex_id(v));
                copies.push(b.vertex(id));
            }
        }
    }
    let end_vertex = |ee: usize| {
        let u = x.edge(ee / 2).ends[ee % 2];
        if u == v {
            copies[part_of(ee)]
        } else {
            vmap[u]
        }
    };
    let mut emap = Vec::new();
    let mut e_copies = Vec::new();
    for (f, edge) in x.edges().iter().enumerate() {
        if f == e {
            for i in 0..parts.len() {
                let id = if i == 0 { edge.id.clone() } else { fresh(&mut taken, &edge.id) };
                let mut ends = [0; 2];
                ends[c % 2] = copies[i];
                ends[1 - c % 2] = end_vertex(c ^ 1);
                e_copies.push(b.edge(id, ends[0], ends[1]));
            }
            emap.push(e_copies[0]);
        } else {
            emap.push(b.edge(edge.id.clone(), end_vertex(2 * f), end_vertex(2 * f + 1)));
        }
    }
    for (s, sq) in x.squares().iter().enumerate() {
        let frame = x.square_frame(s);
        let mut boundary = sq.boundary;
        for (k, side) in boundary.iter_mut().enumerate() {
            if side.edge != e {
                side.edge = emap[side.edge];
                continue;
            }
            let axis = k % 2;
            let copy = [WALK[k], WALK[(k + 1) % 4]]
                .into_iter()
                .find(|&q| frame.corners[q] == v && frame.edge_end(axis, q) == c)
                .map(|q| part_of(frame.edge_end(1 - axis, q)))
                .unwrap_or(0);
            *side = SignedEdge::new(e_copies[copy], side.forward);
        }
        b.square(sq.id.clone(), boundary);
    }
    b.build().map_err(|err: CubeError| SplitError::Unfold(err.to_string()))
}

/// Link component index of every edge-end, per vertex.
fn link_pieces(x: &CubeComplex) -> (Vec<usize>, Vec<usize>) {
    // copy id of each edge-end, first copy id of each vertex
    let mut copy_of_end = vec![0; 2 * x.num_edges()];
    let mut first = Vec::new();
    let mut next = 0;
    for v in 0..x.num_vertices() {
        first.push(next);
        let comps = x.vertex_link(v).components();
        for (i, comp) in comps.iter().enumerate() {
            for &ee in comp {
                copy_of_end[ee] = next + i;
            }
        }
        next += comps.len().max(1);
    }
    first.push(next);
    (copy_of_end, first)
}

/// Unfolds until no link has a cut vertex, then splits the result into a
/// graph part and factor complexes.
pub fn unfold_grushko(x: &CubeComplex, max_steps: Option<usize>) -> Result<GrushkoReport, SplitError> {
    if x.dimension() > 2 {
        return Err(SplitError::UnsupportedDimension(x.dimension()));
    }
    require_npc(x)?;
    let cap = max_steps.unwrap_or(10 * x.num_squares().max(1));
    let mut cur = x.clone();
    let mut trace = Vec::new();
    loop {
        let Some((v, c, parts)) = find_unfolding(&cur) else { break };
        if trace.len() == cap {
            return Err(SplitError::IterationCap(cap));
        }
        trace.push(UnfoldStep {
            vertex: cur.vertex_id(v).to_string(),
            edge: cur.edge(c / 2).id.clone(),
            copies: parts.len(),
        });
        cur = unfold(&cur, v, c, &parts)?;
        require_npc(&cur).map_err(|e| SplitError::Unfold(e.to_string()))?;
    }

    let (copy_of_end, first) = link_pieces(&cur);
    let n_copies = first[cur.num_vertices()];
    let mut uf = UnionFind::new(n_copies);
    for f in 0..cur.num_edges() {
        uf.union(copy_of_end[2 * f], copy_of_end[2 * f + 1]);
    }
    let mut piece_index: BTreeMap<usize, usize> = BTreeMap::new();
    for k in 0..n_copies {
        let r = uf.find(k);
        let n = piece_index.len();
        piece_index.entry(r).or_insert(n);
    }
    let n_pieces = piece_index.len();
    let piece = |uf: &mut UnionFind, k: usize| piece_index[&uf.find(k)];

    // bipartite graph: vertices of `cur` and pieces, one edge per copy
    let b1_bipartite = n_copies + 1 - cur.num_vertices() - n_pieces;
    let mut piece_edges = vec![Vec::new(); n_pieces];
    for f in 0..cur.num_edges() {
        piece_edges[piece(&mut uf, copy_of_end[2 * f])].push(f);
    }
    let mut piece_squares = vec![Vec::new(); n_pieces];
    for (s, sq) in cur.squares().iter().enumerate() {
        piece_squares[piece(&mut uf, copy_of_end[2 * sq.boundary[0].edge])].push(s);
    }
    let mut piece_copies = vec![Vec::new(); n_pieces];
    for v in 0..cur.num_vertices() {
        for k in first[v]..first[v + 1] {
            piece_copies[piece(&mut uf, k)].push((v, k));
        }
    }

    let mut graph_rank = b1_bipartite;
    let mut graph_edges = Vec::new();
    let mut factors = Vec::new();
    let mut squares = Vec::new();
    for p in 0..n_pieces {
        if piece_squares[p].is_empty() {
            graph_rank += piece_edges[p].len() + 1 - piece_copies[p].len();
            graph_edges.extend(piece_edges[p].iter().map(|&f| cur.edge(f).id.clone()));
            continue;
        }
        let mut b = CubeComplexBuilder::new();
        let mut local = BTreeMap::new();
        for &(v, k) in &piece_copies[p] {
            let id = if first[v + 1] - first[v] == 1 {
                cur.vertex_id(v).to_string()
            } else {
                format!("{}#{}", cur.vertex_id(v), k - first[v])
            };
            local.insert(k, b.vertex(id));
        }
        let mut emap = BTreeMap::new();
        for &f in &piece_edges[p] {
            let ends = [local[&copy_of_end[2 * f]], local[&copy_of_end[2 * f + 1]]];
            emap.insert(f, b.edge(cur.edge(f).id.clone(), ends[0], ends[1]));
        }
        for &s in &piece_squares[p] {
            let mut boundary = cur.square(s).boundary;
            for side in boundary.iter_mut() {
                side.edge = emap[&side.edge];
            }
            b.square(cur.square(s).id.clone(), boundary);
        }
        let cx = b.build().map_err(|err| SplitError::Unfold(err.to_string()))?;
        if cx.cell_counts() == [4, 4, 1, 0] {
            squares.push(cx);
        } else {
            factors.push(cx);
        }
    }
    Ok(GrushkoReport {
        h1_before: x.homology_h1(),
        h1_after: cur.homology_h1(),
        unfolded: cur,
        trace,
        graph_rank,
        graph_edges,
        factors,
        squares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::simplicial::shapes;
    use crate::words::{double_complex, CyclicWord};

    fn w(s: &str) -> CyclicWord {
        CyclicWord::parse(s, Some(2)).unwrap()
    }

    #[test]
    fn certificates() {
        assert!(whitehead_lemma_certificate(&corpus::torus()).unwrap().is_certified());
        assert!(whitehead_lemma_certificate(&double_complex(&w("aBaab"))).unwrap().is_certified());
        let twi = corpus::torus_wedge_interval();
        match whitehead_lemma_certificate(&twi).unwrap() {
            Certificate::Inapplicable {
                vertex,
                reason: CertificateFailure::DisconnectedLink { components },
            } => {
                assert_eq!(vertex, "v");
                let mut sizes: Vec<usize> = components.iter().map(Vec::len).collect();
                sizes.sort();
                assert_eq!(sizes, vec![1, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(whitehead_lemma_certificate(&twi.collapse_free_faces()).unwrap().is_certified());
        assert_eq!(
            whitehead_lemma_certificate(&corpus::cube_surface()),
            Err(SplitError::NotNpc("000".into()))
        );
    }

    #[test]
    fn free_splittings() {
        let r = search_free_splitting(&corpus::rose(2), 2).unwrap().unwrap();
        assert_eq!((r.k, r.y.len()), (0, 1));
        let r = search_free_splitting(&corpus::torus_wedge_circle(), 2).unwrap().unwrap();
        assert_eq!(r.y.len(), 1);
        assert_eq!(r.classes.len(), 3);
        assert_eq!(search_free_splitting(&corpus::torus(), 3).unwrap(), None);
    }

    #[test]
    fn torus_vertex_two_cut() {
        let ball = search_ball(&corpus::torus(), 3).unwrap();
        let y = ball.convex_hull(&[0]).unwrap();
        let r = classify_cut(&ball, &y, 2).unwrap().unwrap();
        assert_eq!(r.k, 2);
        assert_eq!(r.width, Some(1));
        assert_eq!(r.classes.len(), 1);
        let wh = whitehead_complex(&ball, &y).unwrap();
        assert!(!wh.complex.are_adjacent(r.cut_walls[0], r.cut_walls[1]));
        assert_eq!(classify_cut(&ball, &y, 1).unwrap(), None);
    }

    #[test]
    fn grid_component_class() {
        let ball = search_ball(&corpus::torus(), 3).unwrap();
        let y = ball.convex_hull(&[0]).unwrap();
        let r = classify_cut(&ball, &y, 2).unwrap().unwrap();
        let a = abstract_component(&ball, &y, r.cut_walls[0], &r.classes[0]).unwrap();
        assert_eq!(a.component.edges.len(), 1);
        assert_eq!(a.wh.num_vertices(), 2);
        assert!(a.c_k.is_valid());
        // same component, same orientation: no reversal
        assert_eq!(opposite_type(&a, &a, &ball), None);
    }

    #[test]
    fn periodic_torus() {
        let cut = detect_periodic_2cut(&corpus::torus(), 3, 3).unwrap().unwrap();
        assert_eq!(cut.report.width, Some(1));
        assert!(verify_periodic_2cut(&corpus::torus(), &cut).unwrap());
        assert_eq!(detect_periodic_2cut(&corpus::torus(), 3, 0).unwrap(), None);
    }

    #[test]
    fn periodic_preflight_on_rose() {
        assert!(matches!(
            detect_periodic_2cut(&corpus::rose(2), 2, 3),
            Err(SplitError::Preflight { k: 0, .. })
        ));
    }

    #[test]
    fn periodic_double() {
        let x = double_complex(&w("aBaab"));
        let cut = detect_periodic_2cut(&x, 2, 2).unwrap().expect("periodic 2-cut");
        assert!(verify_periodic_2cut(&x, &cut).unwrap());
    }

    #[test]
    fn grushko_examples() {
        let t = unfold_grushko(&corpus::torus(), None).unwrap();
        assert_eq!((t.graph_rank, t.factors.len()), (0, 1));
        assert!(t.trace.is_empty());
        let g = unfold_grushko(&corpus::torus_wedge_circle(), None).unwrap();
        assert_eq!(g.graph_rank, 1);
        assert_eq!(g.factors.len(), 1);
        assert!(isomorphism(&g.factors[0].vertex_link(0), &shapes::cycle(4), false).is_some());
        let d = unfold_grushko(&double_complex(&w("ababbabbb")), None).unwrap();
        assert_eq!(d.h1_before, d.h1_after);
        assert_eq!(d.h1_before, HomologyGroup { rank: 3, torsion: vec![3] });
        assert_eq!(d.factors.len(), 1);
        assert_eq!(d.graph_rank, 0);
        for f in &d.factors {
            assert!(whitehead_lemma_certificate(f).unwrap().is_certified());
        }
    }
}
