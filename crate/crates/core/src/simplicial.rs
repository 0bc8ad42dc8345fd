//! Finite abstract simplicial complexes with the star/link/cut-set calculus
//! used to analyse Whitehead complexes.
//!
//! Vertices are opaque `usize` ids. A simplex is stored as a sorted vertex
//! list, and the simplex set is always closed under taking faces. Canonical
//! order for every deterministic witness is (dimension, lexicographic).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;

/// A simplex as a sorted, duplicate-free list of vertex ids.
pub type Simplex = Vec<VertexId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Simplex),
    #[error("{0:?} is not a simplex of the complex")]
    NotASimplex(Simplex),
    #[error("subcomplex is not full: {0:?} spans a simplex missing from it")]
    NotFull(Simplex),
    #[error("vertices {0} and {1} are adjacent; a cut set must be pairwise non-adjacent")]
    AdjacentVertices(VertexId, VertexId),
    #[error("complex is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("link map is not an isomorphism: {0}")]
    NotLinkIsomorphism(String),
}

/// Finite simplicial complex, optionally carrying an external tag per vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    vertices: BTreeSet<VertexId>,
    simplices: BTreeSet<Simplex>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<VertexId, String>,
}

fn canonical(simplex: &[VertexId]) -> Result<Simplex, SimplicialError> {
    let mut s = simplex.to_vec();
    s.sort_unstable();
    let before = s.len();
    s.dedup();
    if s.len() != before {
        return Err(SimplicialError::RepeatedVertex(simplex.to_vec()));
    }
    Ok(s)
}

/// Every non-empty subset of a sorted simplex.
fn faces_of(simplex: &[VertexId]) -> impl Iterator<Item = Simplex> + '_ {
    let n = simplex.len();
    (1u64..(1u64 << n)).map(move |mask| {
        (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| simplex[i])
            .collect()
    })
}

impl SimplicialComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the downward closure of `facets` on the given vertex set.
    /// Every facet vertex must appear in `vertices`.
    pub fn from_facets<I, F>(vertices: I, facets: F) -> Result<Self, SimplicialError>
    where
        I: IntoIterator<Item = VertexId>,
        F: IntoIterator<Item = Simplex>,
    {
        let mut cx = SimplicialComplex::new();
        for v in vertices {
            cx.add_vertex(v);
        }
        for f in facets {
            cx.add_simplex(&f)?;
        }
        Ok(cx)
    }

    /// Complex of a simple graph (vertices and edges only).
    pub fn from_graph<I, E>(vertices: I, edges: E) -> Result<Self, SimplicialError>
    where
        I: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        Self::from_facets(vertices, edges.into_iter().map(|(a, b)| vec![a, b]))
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.vertices.insert(v);
        self.simplices.insert(vec![v]);
    }

    /// Adds a simplex and all of its faces. Its vertices must already exist.
    pub fn add_simplex(&mut self, simplex: &[VertexId]) -> Result<(), SimplicialError> {
        let s = canonical(simplex)?;
        if let Some(&v) = s.iter().find(|v| !self.vertices.contains(v)) {
            return Err(SimplicialError::UnknownVertex(v));
        }
        if self.simplices.contains(&s) {
            return Ok(());
        }
        for f in faces_of(&s) {
            self.simplices.insert(f);
        }
        Ok(())
    }

    pub fn set_label(&mut self, v: VertexId, label: impl Into<String>) {
        self.labels.insert(v, label.into());
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, String> {
        &self.labels
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_simplex(&self, simplex: &[VertexId]) -> bool {
        match canonical(simplex) {
            Ok(s) => self.simplices.contains(&s),
            Err(_) => false,
        }
    }

    /// All simplices in lexicographic order.
    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    /// All simplices in canonical (dimension, lexicographic) order.
    pub fn simplices_canonical(&self) -> Vec<Simplex> {
        let mut all: Vec<Simplex> = self.simplices.iter().cloned().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    /// Dimension, or `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    /// Simplices that are not proper faces of another simplex.
    pub fn facets(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for s in &self.simplices {
            let maximal = !self.vertices.iter().any(|v| {
                if s.binary_search(v).is_ok() {
                    return false;
                }
                let mut t = s.clone();
                t.push(*v);
                t.sort_unstable();
                self.simplices.contains(&t)
            });
            if maximal {
                out.push(s.clone());
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.simplices
            .iter()
            .filter(|s| s.len() == 2)
            .map(|s| (s[0], s[1]))
            .collect()
    }

    pub fn adjacency(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (a, b) in self.edges() {
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        for nbrs in adj.values_mut() {
            nbrs.sort_unstable();
        }
        adj
    }

    pub fn are_adjacent(&self, a: VertexId, b: VertexId) -> bool {
        a != b && self.simplices.contains(&if a < b { vec![a, b] } else { vec![b, a] })
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertices
            .iter()
            .filter(|&&u| self.are_adjacent(u, v))
            .count()
    }

    /// Connected components of the 1-skeleton, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        components_avoiding(self, &BTreeSet::new())
    }

    pub fn num_components(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// Full subcomplex spanned by `keep`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> SimplicialComplex {
        let vertices: BTreeSet<VertexId> =
            self.vertices.intersection(keep).copied().collect();
        let simplices = self
            .simplices
            .iter()
            .filter(|s| s.iter().all(|v| vertices.contains(v)))
            .cloned()
            .collect();
        let labels = self
            .labels
            .iter()
            .filter(|(v, _)| vertices.contains(v))
            .map(|(v, l)| (*v, l.clone()))
            .collect();
        SimplicialComplex {
            vertices,
            simplices,
            labels,
        }
    }

    /// `A_B` for the full subcomplex spanned by `removed`: every simplex that
    /// meets `removed` loses its interior, which leaves exactly the simplices
    /// disjoint from it.
    pub fn remove_vertices(&self, removed: &BTreeSet<VertexId>) -> SimplicialComplex {
        let keep = self.vertices.difference(removed).copied().collect();
        self.induced(&keep)
    }

    /// `A ∖ St(B)` for a full subcomplex `B` given by its simplices.
    pub fn remove_open_star(&self, b: &[Simplex]) -> Result<SimplicialComplex, SimplicialError> {
        let mut closure = BTreeSet::new();
        for s in b {
            let s = canonical(s)?;
            if !self.simplices.contains(&s) {
                return Err(SimplicialError::NotASimplex(s));
            }
            closure.extend(faces_of(&s));
        }
        let support: BTreeSet<VertexId> = closure.iter().flatten().copied().collect();
        if let Some(missing) = self
            .simplices
            .iter()
            .find(|s| s.iter().all(|v| support.contains(v)) && !closure.contains(*s))
        {
            return Err(SimplicialError::NotFull(missing.clone()));
        }
        Ok(self.remove_vertices(&support))
    }

    /// Link of a simplex: faces `τ` disjoint from `σ` with `τ ∪ σ` a simplex.
    pub fn link(&self, sigma: &[VertexId]) -> SimplicialComplex {
        let sigma: BTreeSet<VertexId> = sigma.iter().copied().collect();
        let mut lk = SimplicialComplex::new();
        for s in &self.simplices {
            if sigma.iter().all(|v| s.binary_search(v).is_ok()) && s.len() > sigma.len() {
                let tau: Simplex = s.iter().copied().filter(|v| !sigma.contains(v)).collect();
                for &v in &tau {
                    lk.add_vertex(v);
                    if let Some(l) = self.labels.get(&v) {
                        lk.labels.insert(v, l.clone());
                    }
                }
                lk.simplices.insert(tau);
            }
        }
        lk
    }

    pub fn vertex_link(&self, v: VertexId) -> SimplicialComplex {
        self.link(&[v])
    }

    fn check_vertices(&self, vs: &[VertexId]) -> Result<(), SimplicialError> {
        match vs.iter().find(|v| !self.vertices.contains(v)) {
            Some(&v) => Err(SimplicialError::UnknownVertex(v)),
            None => Ok(()),
        }
    }

    fn check_independent(&self, vs: &[VertexId]) -> Result<(), SimplicialError> {
        self.check_vertices(vs)?;
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                if self.are_adjacent(a, b) {
                    return Err(SimplicialError::AdjacentVertices(a, b));
                }
            }
        }
        Ok(())
    }

    /// True iff `vs` (pairwise non-adjacent) separates: `A_V` has at least two components.
    pub fn is_cut_set(&self, vs: &[VertexId]) -> Result<bool, SimplicialError> {
        self.check_independent(vs)?;
        Ok(self.separates(vs))
    }

    /// Whether removing the open star of the full subcomplex spanned by `vs`
    /// leaves two or more components. No adjacency requirement.
    pub fn separates(&self, vs: &[VertexId]) -> bool {
        let removed: BTreeSet<VertexId> = vs.iter().copied().collect();
        components_avoiding(self, &removed).len() >= 2
    }

    /// Smallest `k <= k_max` admitting a cut set of size `k`, with the
    /// lexicographically least such cut set.
    pub fn min_cut_cardinality(
        &self,
        k_max: usize,
    ) -> Result<Option<(usize, Vec<VertexId>)>, SimplicialError> {
        self.require_connected()?;
        for k in 1..=k_max {
            if let Some(w) = self.cut_sets_of_size(k, true).into_iter().next() {
                return Ok(Some((k, w)));
            }
        }
        Ok(None)
    }

    /// All cut sets of exactly `k` pairwise non-adjacent vertices, in
    /// lexicographic order. With `first_only`, stops after the first.
    pub fn cut_sets_of_size(&self, k: usize, first_only: bool) -> Vec<Vec<VertexId>> {
        let verts: Vec<VertexId> = self.vertices.iter().copied().collect();
        let adj = self.adjacency();
        let mut found = Vec::new();
        let mut current = Vec::with_capacity(k);
        self.independent_sets(&verts, &adj, 0, k, &mut current, &mut |set| {
            if self.separates(set) {
                found.push(set.to_vec());
                first_only
            } else {
                false
            }
        });
        found
    }

    /// Enumerates independent `k`-sets in lexicographic order; the visitor
    /// returns `true` to stop.
    fn independent_sets(
        &self,
        verts: &[VertexId],
        adj: &BTreeMap<VertexId, Vec<VertexId>>,
        start: usize,
        k: usize,
        current: &mut Vec<VertexId>,
        visit: &mut dyn FnMut(&[VertexId]) -> bool,
    ) -> bool {
        if current.len() == k {
            return visit(current);
        }
        for i in start..verts.len() {
            if verts.len() - i < k - current.len() {
                break;
            }
            let v = verts[i];
            if current.iter().any(|u| adj[u].binary_search(&v).is_ok()) {
                continue;
            }
            current.push(v);
            let stop = self.independent_sets(verts, adj, i + 1, k, current, visit);
            current.pop();
            if stop {
                return true;
            }
        }
        false
    }

    /// Least simplex (canonical order) whose removal disconnects the complex.
    pub fn find_cut_simplex(&self) -> Result<Option<Simplex>, SimplicialError> {
        self.require_connected()?;
        Ok(self
            .simplices_canonical()
            .into_iter()
            .find(|s| self.separates(s)))
    }

    fn require_connected(&self) -> Result<(), SimplicialError> {
        let n = self.num_components();
        if n != 1 {
            return Err(SimplicialError::Disconnected(n));
        }
        Ok(())
    }

    /// Whether every clique of the 1-skeleton spans a simplex.
    pub fn is_flag(&self) -> bool {
        flag_complete_from(self).simplices == self.simplices
    }

    /// Connected sum `A_a ∪_φ B_b`, where `phi` maps `Lk_A(a)` onto `Lk_B(b)`.
    ///
    /// Vertex ids of `A_a` are kept. Vertices of `B_b` outside the link get
    /// fresh ids above every id of `A`, in increasing order of their old id;
    /// the returned map records where every vertex of `B_b` went.
    pub fn connected_sum(
        a_cx: &SimplicialComplex,
        a: VertexId,
        b_cx: &SimplicialComplex,
        b: VertexId,
        phi: &BTreeMap<VertexId, VertexId>,
    ) -> Result<(SimplicialComplex, BTreeMap<VertexId, VertexId>), SimplicialError> {
        a_cx.check_vertices(&[a])?;
        b_cx.check_vertices(&[b])?;
        let lk_a = a_cx.vertex_link(a);
        let lk_b = b_cx.vertex_link(b);
        check_link_isomorphism(&lk_a, &lk_b, phi)?;

        let inverse: BTreeMap<VertexId, VertexId> = phi.iter().map(|(&x, &y)| (y, x)).collect();
        let mut next = a_cx.vertices.iter().next_back().map_or(0, |m| m + 1);
        let mut relabel = BTreeMap::new();
        for &v in &b_cx.vertices {
            if v == b {
                continue;
            }
            let image = match inverse.get(&v) {
                Some(&x) => x,
                None => {
                    let id = next;
                    next += 1;
                    id
                }
            };
            relabel.insert(v, image);
        }

        let mut sum = a_cx.remove_vertices(&BTreeSet::from([a]));
        for (&old, &new) in &relabel {
            if !sum.vertices.contains(&new) {
                sum.add_vertex(new);
                if let Some(l) = b_cx.labels.get(&old) {
                    sum.labels.insert(new, l.clone());
                }
            }
        }
        for s in &b_cx.simplices {
            if s.contains(&b) {
                continue;
            }
            let mut image: Simplex = s.iter().map(|v| relabel[v]).collect();
            image.sort_unstable();
            sum.simplices.insert(image);
        }
        Ok((sum, relabel))
    }

    /// One representative per non-zero class of reduced 0-cohomology with
    /// Z/2 coefficients. Each class is a set of components that excludes the
    /// component of the least vertex; classes are ordered by bitmask.
    pub fn reduced_h0_classes(&self) -> Vec<ZeroCohomologyClass> {
        let components = self.components();
        let m = components.len();
        if m < 2 {
            return Vec::new();
        }
        assert!(m <= 24, "too many components for class enumeration ({m})");
        (1u32..(1u32 << (m - 1)))
            .map(|mask| ZeroCohomologyClass {
                components: components.clone(),
                class: (0..m - 1)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| i + 1)
                    .collect(),
            })
            .collect()
    }

    /// Relabel every vertex through `map` (which must be injective on the vertex set).
    pub fn relabeled(&self, map: &BTreeMap<VertexId, VertexId>) -> SimplicialComplex {
        let mut out = SimplicialComplex::new();
        for &v in &self.vertices {
            out.add_vertex(map[&v]);
            if let Some(l) = self.labels.get(&v) {
                out.labels.insert(map[&v], l.clone());
            }
        }
        for s in &self.simplices {
            let mut t: Simplex = s.iter().map(|v| map[v]).collect();
            t.sort_unstable();
            out.simplices.insert(t);
        }
        out
    }

    /// First barycentric-free subdivision of the 1-skeleton: every edge gets
    /// a midpoint. Higher simplices are dropped.
    pub fn subdivide_edges(&self) -> SimplicialComplex {
        let mut out = self.induced(&self.vertices.clone());
        out.simplices.retain(|s| s.len() == 1);
        let mut next = self.vertices.iter().next_back().map_or(0, |m| m + 1);
        for (a, b) in self.edges() {
            out.add_vertex(next);
            out.simplices.insert(vec![a, next]);
            out.simplices.insert(vec![b, next]);
            next += 1;
        }
        out
    }
}

fn components_avoiding(cx: &SimplicialComplex, removed: &BTreeSet<VertexId>) -> Vec<Vec<VertexId>> {
    let adj = cx.adjacency();
    let mut seen: BTreeSet<VertexId> = removed.clone();
    let mut comps = Vec::new();
    for &start in &cx.vertices {
        if seen.contains(&start) {
            continue;
        }
        seen.insert(start);
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[&v] {
                if seen.insert(u) {
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

fn check_link_isomorphism(
    lk_a: &SimplicialComplex,
    lk_b: &SimplicialComplex,
    phi: &BTreeMap<VertexId, VertexId>,
) -> Result<(), SimplicialError> {
    let domain: BTreeSet<VertexId> = phi.keys().copied().collect();
    if domain != lk_a.vertices {
        return Err(SimplicialError::NotLinkIsomorphism(
            "domain is not the vertex set of the first link".into(),
        ));
    }
    let image: BTreeSet<VertexId> = phi.values().copied().collect();
    if image.len() != phi.len() || image != lk_b.vertices {
        return Err(SimplicialError::NotLinkIsomorphism(
            "not a bijection onto the vertices of the second link".into(),
        ));
    }
    let mapped: BTreeSet<Simplex> = lk_a
        .simplices
        .iter()
        .map(|s| {
            let mut t: Simplex = s.iter().map(|v| phi[v]).collect();
            t.sort_unstable();
            t
        })
        .collect();
    if mapped != lk_b.simplices {
        return Err(SimplicialError::NotLinkIsomorphism(
            "simplices are not carried onto simplices".into(),
        ));
    }
    Ok(())
}

fn flag_complete_from(cx: &SimplicialComplex) -> SimplicialComplex {
    flag_complete(cx.vertices.iter().copied(), cx.edges())
}

/// Clique complex of a simple graph. Self-loops and repeated edges are ignored.
pub fn flag_complete<I, E>(vertices: I, edges: E) -> SimplicialComplex
where
    I: IntoIterator<Item = VertexId>,
    E: IntoIterator<Item = (VertexId, VertexId)>,
{
    let mut cx = SimplicialComplex::new();
    for v in vertices {
        cx.add_vertex(v);
    }
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> =
        cx.vertices.iter().map(|&v| (v, BTreeSet::new())).collect();
    for (a, b) in edges {
        if a == b {
            continue;
        }
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
        cx.vertices.insert(a);
        cx.vertices.insert(b);
        cx.simplices.insert(vec![a]);
        cx.simplices.insert(vec![b]);
    }
    // Grow cliques in increasing vertex order so each is produced once.
    let mut frontier: Vec<Simplex> = cx.vertices.iter().map(|&v| vec![v]).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for clique in &frontier {
            let last = *clique.last().unwrap();
            for &u in adj[&last].range(last + 1..) {
                if clique.iter().all(|w| adj[w].contains(&u)) {
                    let mut bigger = clique.clone();
                    bigger.push(u);
                    next.push(bigger);
                }
            }
        }
        for c in &next {
            cx.simplices.insert(c.clone());
        }
        frontier = next;
    }
    cx
}

/// A non-zero class in reduced 0-cohomology with Z/2 coefficients, stored as
/// the partition of vertices into components plus the chosen component set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCohomologyClass {
    pub components: Vec<Vec<VertexId>>,
    /// Indices into `components`; proper and non-empty.
    pub class: BTreeSet<usize>,
}

impl ZeroCohomologyClass {
    /// Value of the representative cocycle at a vertex, or `None` off the complex.
    pub fn value_at(&self, v: VertexId) -> Option<bool> {
        self.components
            .iter()
            .position(|c| c.binary_search(&v).is_ok())
            .map(|i| self.class.contains(&i))
    }

    /// Vertices where the representative cocycle is 1.
    pub fn support(&self) -> BTreeSet<VertexId> {
        self.class
            .iter()
            .flat_map(|&i| self.components[i].iter().copied())
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        !self.class.is_empty()
            && self.class.len() < self.components.len()
            && self.class.iter().all(|&i| i < self.components.len())
    }
}

/// A 0-cochain restricted to a vertex set, compared modulo constants: two
/// partitions agree if they are equal or complementary.
pub fn same_reduced_class(
    vertices: &BTreeSet<VertexId>,
    a: &dyn Fn(VertexId) -> bool,
    b: &dyn Fn(VertexId) -> bool,
) -> bool {
    let equal = vertices.iter().all(|&v| a(v) == b(v));
    let complementary = vertices.iter().all(|&v| a(v) != b(v));
    equal || complementary
}

/// Whether a cochain on `vertices` is non-constant (a non-trivial reduced class).
pub fn is_nontrivial_cochain(vertices: &BTreeSet<VertexId>, c: &dyn Fn(VertexId) -> bool) -> bool {
    let mut values = vertices.iter().map(|&v| c(v));
    match values.next() {
        None => false,
        Some(first) => values.any(|x| x != first),
    }
}

/// Search for a simplicial isomorphism `a -> b`, optionally required to
/// preserve vertex labels. Candidates are tried in increasing id order after
/// refining by degree, label and simplex counts, so the result is deterministic.
pub fn isomorphism(
    a: &SimplicialComplex,
    b: &SimplicialComplex,
    respect_labels: bool,
) -> Option<BTreeMap<VertexId, VertexId>> {
    if a.num_vertices() != b.num_vertices() || a.num_simplices() != b.num_simplices() {
        return None;
    }
    let sig_a = signatures(a, respect_labels);
    let sig_b = signatures(b, respect_labels);
    let mut multiset_a: Vec<&Signature> = sig_a.values().collect();
    let mut multiset_b: Vec<&Signature> = sig_b.values().collect();
    multiset_a.sort();
    multiset_b.sort();
    if multiset_a != multiset_b {
        return None;
    }

    let adj_a = a.adjacency();
    let adj_b = b.adjacency();
    // Order: BFS from the rarest signature so that each new vertex tends to
    // have an already-mapped neighbour.
    let order = search_order(a, &adj_a, &sig_a);
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    if extend(a, b, &adj_a, &adj_b, &sig_a, &sig_b, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

type Signature = (usize, Vec<usize>, Option<String>);

fn signatures(cx: &SimplicialComplex, labels: bool) -> BTreeMap<VertexId, Signature> {
    let dim = cx.dimension().unwrap_or(0);
    let mut sig: BTreeMap<VertexId, Signature> = cx
        .vertices
        .iter()
        .map(|&v| {
            let label = if labels { cx.labels.get(&v).cloned() } else { None };
            (v, (0, vec![0; dim + 1], label))
        })
        .collect();
    for s in &cx.simplices {
        for v in s {
            let entry = sig.get_mut(v).unwrap();
            entry.1[s.len() - 1] += 1;
            if s.len() == 2 {
                entry.0 += 1;
            }
        }
    }
    sig
}

fn search_order(
    cx: &SimplicialComplex,
    adj: &BTreeMap<VertexId, Vec<VertexId>>,
    sig: &BTreeMap<VertexId, Signature>,
) -> Vec<VertexId> {
    let mut counts: BTreeMap<&Signature, usize> = BTreeMap::new();
    for s in sig.values() {
        *counts.entry(s).or_default() += 1;
    }
    let mut remaining: BTreeSet<VertexId> = cx.vertices.clone();
    let mut order = Vec::with_capacity(remaining.len());
    while let Some(&root) = remaining
        .iter()
        .min_by_key(|v| (counts[&sig[v]], std::cmp::Reverse(sig[v].0), **v))
    {
        let mut queue = VecDeque::from([root]);
        remaining.remove(&root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in &adj[&v] {
                if remaining.remove(&u) {
                    queue.push_back(u);
                }
            }
        }
    }
    order
}

#[allow(clippy::too_many_arguments)]
fn extend(
    a: &SimplicialComplex,
    b: &SimplicialComplex,
    adj_a: &BTreeMap<VertexId, Vec<VertexId>>,
    adj_b: &BTreeMap<VertexId, Vec<VertexId>>,
    sig_a: &BTreeMap<VertexId, Signature>,
    sig_b: &BTreeMap<VertexId, Signature>,
    order: &[VertexId],
    depth: usize,
    map: &mut BTreeMap<VertexId, VertexId>,
    used: &mut BTreeSet<VertexId>,
) -> bool {
    if depth == order.len() {
        return a.simplices.iter().all(|s| {
            let mut t: Simplex = s.iter().map(|v| map[v]).collect();
            t.sort_unstable();
            b.simplices.contains(&t)
        });
    }
    let v = order[depth];
    for &w in b.vertices.iter() {
        if used.contains(&w) || sig_a[&v] != sig_b[&w] {
            continue;
        }
        let consistent = map.iter().all(|(&x, &y)| {
            adj_a[&v].binary_search(&x).is_ok() == adj_b[&w].binary_search(&y).is_ok()
        });
        if !consistent {
            continue;
        }
        map.insert(v, w);
        used.insert(w);
        if extend(a, b, adj_a, adj_b, sig_a, sig_b, order, depth + 1, map, used) {
            return true;
        }
        map.remove(&v);
        used.remove(&w);
    }
    false
}

/// Graphviz rendering of the 1-skeleton; vertices show their label when set.
pub fn to_dot(cx: &SimplicialComplex, name: &str) -> String {
    let mut out = format!("graph \"{}\" {{\n", name.replace('"', "'"));
    for v in cx.vertices() {
        let label = cx.label(v).map_or_else(|| v.to_string(), str::to_owned);
        out.push_str(&format!("  {v} [label=\"{}\"];\n", label.replace('"', "'")));
    }
    for (a, b) in cx.edges() {
        out.push_str(&format!("  {a} -- {b};\n"));
    }
    out.push_str("}\n");
    out
}

/// Builders for the small complexes used throughout the tests and docs.
pub mod shapes {
    use super::*;

    /// Cycle graph on vertices `0..n`.
    pub fn cycle(n: usize) -> SimplicialComplex {
        SimplicialComplex::from_graph(0..n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Path graph on vertices `0..n`.
    pub fn path(n: usize) -> SimplicialComplex {
        SimplicialComplex::from_graph(0..n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    /// Boundary of the octahedron: vertices `0..6`, antipodal pairs `{i, i+3}`.
    pub fn octahedron() -> SimplicialComplex {
        let mut facets = Vec::new();
        for x in [0, 3] {
            for y in [1, 4] {
                for z in [2, 5] {
                    facets.push(vec![x, y, z]);
                }
            }
        }
        SimplicialComplex::from_facets(0..6, facets).unwrap()
    }

    /// 1-skeleton of the octahedron.
    pub fn octahedron_graph() -> SimplicialComplex {
        let oct = octahedron();
        SimplicialComplex::from_graph(oct.vertices(), oct.edges()).unwrap()
    }

    /// Cone with apex `apex` over `base`.
    pub fn cone(base: &SimplicialComplex, apex: VertexId) -> SimplicialComplex {
        let mut cx = base.clone();
        cx.add_vertex(apex);
        for s in base.simplices() {
            let mut t = s.clone();
            t.push(apex);
            cx.add_simplex(&t).unwrap();
        }
        cx
    }
}

#[cfg(test)]
mod tests {
    use super::shapes::*;
    use super::*;

    fn set(vs: &[VertexId]) -> BTreeSet<VertexId> {
        vs.iter().copied().collect()
    }

    #[test]
    fn components_examples() {
        assert_eq!(cycle(4).components().len(), 1);
        let two_edges = SimplicialComplex::from_graph(0..4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two_edges.components(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn open_star_removal() {
        let c = cycle(4);
        let rest = c.remove_open_star(&[vec![0]]).unwrap();
        assert_eq!(rest, path(4).remove_vertices(&set(&[0])));
        assert_eq!(rest.edges(), vec![(1, 2), (2, 3)]);

        let p = path(3);
        let rest = p.remove_open_star(&[vec![1]]).unwrap();
        assert_eq!(rest.num_vertices(), 2);
        assert_eq!(rest.components().len(), 2);

        // Octahedron minus a vertex: cone over the equatorial 4-cycle.
        let oct = octahedron();
        let rest = oct.remove_open_star(&[vec![0]]).unwrap();
        let equator = SimplicialComplex::from_graph([1, 2, 4, 5], [(1, 2), (2, 4), (4, 5), (5, 1)]).unwrap();
        assert!(isomorphism(&rest, &cone(&equator, 3), false).is_some());
        assert_eq!(rest.num_simplices(), 5 + 8 + 4);
        assert!(rest.is_connected());
    }

    #[test]
    fn open_star_rejects_non_full() {
        let tri = SimplicialComplex::from_facets(0..3, [vec![0, 1, 2]]).unwrap();
        // The hollow boundary is not full in the filled triangle.
        let err = tri.remove_open_star(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap_err();
        assert!(matches!(err, SimplicialError::NotFull(_)));
        let err = tri.remove_open_star(&[vec![0, 7]]).unwrap_err();
        assert!(matches!(err, SimplicialError::NotASimplex(_)));
    }

    #[test]
    fn cut_sets() {
        let c = cycle(4);
        assert!(c.is_cut_set(&[0, 2]).unwrap());
        assert!(!c.is_cut_set(&[0]).unwrap());
        assert!(matches!(
            c.is_cut_set(&[0, 1]),
            Err(SimplicialError::AdjacentVertices(0, 1))
        ));
        assert_eq!(c.min_cut_cardinality(3).unwrap(), Some((2, vec![0, 2])));
        assert_eq!(octahedron_graph().min_cut_cardinality(2).unwrap(), None);
        let two = SimplicialComplex::from_graph(0..4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(two.min_cut_cardinality(2), Err(SimplicialError::Disconnected(2))));
    }

    #[test]
    fn octahedron_antipodal_pairs_do_not_cut() {
        // Brute force: the only independent pairs are the three antipodal ones.
        let g = octahedron_graph();
        let mut pairs = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                if !g.are_adjacent(a, b) {
                    pairs.push((a, b));
                }
            }
        }
        assert_eq!(pairs, vec![(0, 3), (1, 4), (2, 5)]);
        for (a, b) in pairs {
            assert!(!g.is_cut_set(&[a, b]).unwrap());
        }
    }

    #[test]
    fn cut_simplices() {
        // All 8 simplices of the 4-cycle fail to cut.
        let c = cycle(4);
        assert_eq!(c.num_simplices(), 8);
        for s in c.simplices() {
            assert!(!c.separates(s));
        }
        assert_eq!(c.find_cut_simplex().unwrap(), None);
        assert_eq!(path(3).find_cut_simplex().unwrap(), Some(vec![1]));
    }

    #[test]
    fn flagness() {
        let hollow = cycle(3);
        assert!(!hollow.is_flag());
        let filled = flag_complete(hollow.vertices(), hollow.edges());
        assert!(filled.contains_simplex(&[0, 1, 2]));
        assert!(filled.is_flag());
        assert!(cycle(4).is_flag());
        assert!(octahedron().is_flag());
        assert_eq!(flag_complete(octahedron().vertices(), octahedron().edges()), octahedron());
    }

    #[test]
    fn reduced_classes() {
        assert!(cycle(5).reduced_h0_classes().is_empty());
        let two = SimplicialComplex::from_graph(0..4, [(0, 1), (2, 3)]).unwrap();
        let classes = two.reduced_h0_classes();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].support(), set(&[2, 3]));
        let three = SimplicialComplex::from_graph(0..3, []).unwrap();
        let classes = three.reduced_h0_classes();
        assert_eq!(classes.len(), 3);
        assert!(classes.iter().all(|c| c.is_valid() && !c.class.contains(&0)));
    }

    #[test]
    fn connected_sum_with_cone_or_suspension() {
        let b = octahedron();
        let link = b.vertex_link(0);
        let phi: BTreeMap<_, _> = link.vertices().map(|v| (v, v)).collect();
        // Closed star of a: the sum is B with the open star of b removed.
        let star = cone(&link, 100);
        let (sum, _) = SimplicialComplex::connected_sum(&star, 100, &b, 0, &phi).unwrap();
        assert!(isomorphism(&sum, &b.remove_vertices(&set(&[0])), false).is_some());
        // Suspension of the link: the sum recovers B.
        let mut susp = link.clone();
        susp.add_vertex(100);
        susp.add_vertex(101);
        for s in link.simplices() {
            for apex in [100, 101] {
                let mut t = s.clone();
                t.push(apex);
                susp.add_simplex(&t).unwrap();
            }
        }
        let (sum, _) = SimplicialComplex::connected_sum(&susp, 100, &b, 0, &phi).unwrap();
        assert!(isomorphism(&sum, &b, false).is_some());
    }

    #[test]
    fn connected_sum_of_two_squares_is_a_square() {
        // (4 - 1) + (4 - 1) - 2 = 4 vertices: the sum is again a 4-cycle.
        let a = cycle(4);
        let b = cycle(4);
        let phi = BTreeMap::from([(1, 1), (3, 3)]);
        let (sum, relabel) = SimplicialComplex::connected_sum(&a, 0, &b, 0, &phi).unwrap();
        assert_eq!(sum.num_vertices(), 4);
        assert!(isomorphism(&sum, &cycle(4), false).is_some());
        assert_eq!(relabel[&2], 4);
    }

    #[test]
    fn connected_sum_rejects_bad_phi() {
        let a = cycle(4);
        let phi = BTreeMap::from([(1, 1)]);
        assert!(matches!(
            SimplicialComplex::connected_sum(&a, 0, &a, 0, &phi),
            Err(SimplicialError::NotLinkIsomorphism(_))
        ));
    }

    #[test]
    fn isomorphism_search() {
        assert!(isomorphism(&cycle(4), &cycle(4), false).is_some());
        assert!(isomorphism(&cycle(4), &path(4), false).is_none());
        let mut a = path(3);
        a.set_label(0, "x");
        let mut b = path(3);
        b.set_label(2, "x");
        let map = isomorphism(&a, &b, true).unwrap();
        assert_eq!(map[&0], 2);
        b.set_label(2, "y");
        assert!(isomorphism(&a, &b, true).is_none());
        assert!(isomorphism(&a, &b, false).is_some());
    }

    #[test]
    fn json_round_trip() {
        let mut oct = octahedron();
        oct.set_label(0, "north");
        let text = serde_json::to_string(&oct).unwrap();
        let back: SimplicialComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back, oct);
    }

    #[test]
    fn dot_lists_edges() {
        let dot = to_dot(&path(3), "p");
        assert!(dot.contains("0 -- 1;"));
        assert!(dot.contains("1 -- 2;"));
    }
}
