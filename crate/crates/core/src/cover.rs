//! Finite balls in the universal cover of an NPC cube complex.
//!
//! The ball is grown one sphere at a time. Every vertex at depth `d + 1`
//! is a class of "pending" edges leaving depth `d`; two pending edges are
//! identified when they close up a lifted square with a vertex at depth
//! `d - 1` (the quadrangle condition of median graphs). Vertices are
//! numbered by (depth, normal form), where the normal form is the
//! lexicographically least geodesic edge-end word from the basepoint.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::cube_complex::{CubeComplex, UnionFind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("complex is not non-positively curved (link of vertex {0:?} is not flag)")]
    NotNpc(String),
    #[error("unknown base vertex {0}")]
    UnknownBaseVertex(usize),
    #[error("development failed: {0}")]
    Inconsistent(String),
    #[error("vertex {0} lies on the boundary shell of the ball")]
    OnBoundary(usize),
    #[error("unknown ball vertex {0}")]
    UnknownVertex(usize),
    #[error("hull reaches the boundary shell at vertex {0}; enlarge the radius")]
    BoundaryTouched(usize),
    #[error("empty vertex set")]
    Empty,
    #[error("path leaves the ball or uses a missing edge at step {0}")]
    BadPath(usize),
}

/// Side of a wall: `Minus` is the half-space containing the basepoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Clone, Debug)]
pub struct BallVertex {
    pub proj: usize,
    pub depth: usize,
    /// Edge-end word of the least geodesic from the basepoint.
    pub nf: Vec<usize>,
    /// Neighbour and ball edge per edge-end slot at `proj` (same order as
    /// [`CubeComplex::edge_ends_at`]); `None` only on the boundary shell.
    slots: Vec<Option<(usize, usize)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallEdge {
    /// `ends[k]` lies over end `k` of the base edge.
    pub ends: [usize; 2],
    pub base: usize,
    pub wall: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallSquare {
    pub base: usize,
    /// Corners by bitmask: `[c00, c10, c01, c11]`.
    pub corners: [usize; 4],
    /// Walls dual to axis 0 and axis 1.
    pub walls: [usize; 2],
    /// Largest depth of a corner.
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallCube {
    pub base: usize,
    pub corners: [usize; 8],
    pub walls: [usize; 3],
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Wall {
    pub id: usize,
    /// Ball edges dual to the wall, increasing.
    pub edges: Vec<usize>,
    /// Hyperplane of the base complex it covers.
    pub base_hyperplane: usize,
}

/// A full subcomplex of a ball given by its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexSubcomplex {
    pub vertices: Vec<usize>,
    /// `radius - max depth`: distance guaranteed to the boundary shell.
    pub margin: usize,
}

impl ConvexSubcomplex {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct CoverBall {
    base: CubeComplex,
    basepoint: usize,
    radius: usize,
    /// Edge-ends at each base vertex, and the slot position of each edge-end.
    ends_at: Vec<Vec<usize>>,
    slot_of: Vec<usize>,
    vertices: Vec<BallVertex>,
    edges: Vec<BallEdge>,
    squares: Vec<BallSquare>,
    cubes: Vec<BallCube>,
    walls: Vec<Wall>,
    sep: Vec<Vec<usize>>,
    wall_squares: Vec<Vec<usize>>,
    wall_cubes: Vec<Vec<usize>>,
}

/// A corner of a base square.
#[derive(Clone, Copy)]
struct CornerView {
    square: usize,
    corner: usize,
}

impl CoverBall {
    /// Develops the radius-`radius` ball about a lift of `basepoint`.
    pub fn develop(base: &CubeComplex, basepoint: usize, radius: usize) -> Result<Self, CoverError> {
        if basepoint >= base.num_vertices() {
            return Err(CoverError::UnknownBaseVertex(basepoint));
        }
        let npc = base.check_npc();
        if !npc.npc {
            return Err(CoverError::NotNpc(npc.offending_vertex.unwrap_or_default()));
        }
        let ends_at: Vec<Vec<usize>> = (0..base.num_vertices()).map(|v| base.edge_ends_at(v)).collect();
        let mut slot_of = vec![usize::MAX; 2 * base.num_edges()];
        for list in &ends_at {
            for (i, &ee) in list.iter().enumerate() {
                slot_of[ee] = i;
            }
        }
        let mut corners_at: Vec<Vec<CornerView>> = vec![Vec::new(); base.num_vertices()];
        for s in 0..base.num_squares() {
            let f = base.square_frame(s);
            for corner in 0..4 {
                corners_at[f.corners[corner]].push(CornerView { square: s, corner });
            }
        }

        let mut ball = CoverBall {
            base: base.clone(),
            basepoint,
            radius,
            slot_of,
            vertices: vec![BallVertex {
                proj: basepoint,
                depth: 0,
                nf: Vec::new(),
                slots: vec![None; ends_at[basepoint].len()],
            }],
            ends_at,
            edges: Vec::new(),
            squares: Vec::new(),
            cubes: Vec::new(),
            walls: Vec::new(),
            sep: Vec::new(),
            wall_squares: Vec::new(),
            wall_cubes: Vec::new(),
        };
        let mut parent: Vec<Option<(usize, usize)>> = vec![None];
        let mut layer_start = 0;
        for d in 0..radius {
            let layer: Vec<usize> = (layer_start..ball.vertices.len()).collect();
            layer_start = ball.vertices.len();
            ball.grow_layer(d, &layer, &corners_at, &mut parent)?;
        }
        ball.lift_squares()?;
        ball.build_walls();
        ball.lift_cubes();
        ball.build_separation(&parent);
        Ok(ball)
    }

    fn slot(&self, v: usize, ee: usize) -> Option<(usize, usize)> {
        self.vertices[v].slots[self.slot_of[ee]]
    }

    /// Neighbour of `v` across the edge leaving through edge-end `ee`.
    pub fn neighbor(&self, v: usize, ee: usize) -> Option<usize> {
        let vx = &self.vertices[v];
        if self.base.edge(ee / 2).ends[ee % 2] != vx.proj {
            return None;
        }
        self.slot(v, ee).map(|(u, _)| u)
    }

    fn grow_layer(
        &mut self,
        d: usize,
        layer: &[usize],
        corners_at: &[Vec<CornerView>],
        parent: &mut Vec<Option<(usize, usize)>>,
    ) -> Result<(), CoverError> {
        let mut pending: Vec<(usize, usize)> = Vec::new();
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &v in layer {
            let proj = self.vertices[v].proj;
            for (i, &ee) in self.ends_at[proj].iter().enumerate() {
                if self.vertices[v].slots[i].is_none() {
                    index.insert((v, ee), pending.len());
                    pending.push((v, ee));
                }
            }
        }
        let mut uf = UnionFind::new(pending.len());
        if d > 0 {
            for &v in layer {
                let proj = self.vertices[v].proj;
                for cv in &corners_at[proj] {
                    let f = self.base.square_frame(cv.square);
                    let c = cv.corner;
                    for axis in 0..2 {
                        // `w` across `axis` one layer down; close the square
                        // along the other axis.
                        let other = 1 - axis;
                        let (ee_down, ee_up) = (f.edge_end(axis, c), f.edge_end(other, c));
                        let Some((w, _)) = self.slot(v, ee_down) else { continue };
                        if self.vertices[w].depth != d - 1 {
                            continue;
                        }
                        let Some(&a) = index.get(&(v, ee_up)) else { continue };
                        let cw = c ^ (1 << axis);
                        let (vp, _) = self.slot(w, f.edge_end(other, cw)).ok_or_else(|| {
                            CoverError::Inconsistent(format!("interior vertex {w} has an empty slot"))
                        })?;
                        let far = c ^ 3;
                        let b = *index.get(&(vp, f.edge_end(axis, far))).ok_or_else(|| {
                            CoverError::Inconsistent(format!(
                                "square {} does not close at vertex {vp}",
                                self.base.square(cv.square).id
                            ))
                        })?;
                        uf.union(a, b);
                    }
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..pending.len() {
            classes.entry(uf.find(i)).or_default().push(i);
        }
        let mut fresh: Vec<(Vec<usize>, usize, Vec<usize>, usize)> = Vec::new();
        for members in classes.values() {
            let target = self.base.across(pending[members[0]].1);
            let mut arrivals = BTreeSet::new();
            let mut sources = BTreeSet::new();
            let mut best: Option<(Vec<usize>, usize)> = None;
            for &m in members {
                let (v, ee) = pending[m];
                if self.base.across(ee) != target {
                    return Err(CoverError::Inconsistent(
                        "identified edges lead to different base vertices".into(),
                    ));
                }
                if !arrivals.insert(ee ^ 1) || !sources.insert(v) {
                    return Err(CoverError::Inconsistent(format!(
                        "two identified edges share an end at depth {}",
                        d + 1
                    )));
                }
                let mut word = self.vertices[v].nf.clone();
                word.push(ee);
                if best.as_ref().map_or(true, |(b, _)| word < *b) {
                    best = Some((word, m));
                }
            }
            let (nf, via) = best.expect("classes are non-empty");
            fresh.push((nf, target, members.clone(), via));
        }
        fresh.sort();
        for (nf, target, members, via) in fresh {
            let u = self.vertices.len();
            self.vertices.push(BallVertex {
                proj: target,
                depth: d + 1,
                nf,
                slots: vec![None; self.ends_at[target].len()],
            });
            parent.push(Some(pending[via]));
            for m in members {
                let (v, ee) = pending[m];
                let e = self.edges.len();
                let ends = if ee % 2 == 0 { [v, u] } else { [u, v] };
                self.edges.push(BallEdge {
                    ends,
                    base: ee / 2,
                    wall: usize::MAX,
                });
                let (sv, su) = (self.slot_of[ee], self.slot_of[ee ^ 1]);
                self.vertices[v].slots[sv] = Some((u, e));
                self.vertices[u].slots[su] = Some((v, e));
            }
        }
        Ok(())
    }

    fn lift_squares(&mut self) -> Result<(), CoverError> {
        for v in 0..self.vertices.len() {
            let proj = self.vertices[v].proj;
            for s in 0..self.base.num_squares() {
                let f = self.base.square_frame(s).clone();
                if f.corners[0] != proj {
                    continue;
                }
                let (Some(c1), Some(c2)) = (self.neighbor(v, f.edge_end(0, 0)), self.neighbor(v, f.edge_end(1, 0)))
                else {
                    continue;
                };
                let via1 = self.neighbor(c1, f.edge_end(1, 1));
                let via2 = self.neighbor(c2, f.edge_end(0, 2));
                let c3 = match (via1, via2) {
                    (Some(a), Some(b)) if a == b => a,
                    (None, None) => continue,
                    _ => {
                        return Err(CoverError::Inconsistent(format!(
                            "lift of square {} at vertex {v} does not close",
                            self.base.square(s).id
                        )))
                    }
                };
                let corners = [v, c1, c2, c3];
                let depth = corners.iter().map(|&c| self.vertices[c].depth).max().unwrap();
                self.squares.push(BallSquare {
                    base: s,
                    corners,
                    walls: [usize::MAX; 2],
                    depth,
                });
            }
        }
        Ok(())
    }

    fn edge_between(&self, a: usize, b: usize) -> usize {
        self.vertices[a]
            .slots
            .iter()
            .flatten()
            .find(|(n, _)| *n == b)
            .map(|&(_, e)| e)
            .expect("adjacent ball vertices share an edge")
    }

    fn build_walls(&mut self) {
        let mut uf = UnionFind::new(self.edges.len());
        for sq in &self.squares {
            let [c0, c1, c2, c3] = sq.corners;
            uf.union(self.edge_between(c0, c1), self.edge_between(c2, c3));
            uf.union(self.edge_between(c0, c2), self.edge_between(c1, c3));
        }
        let hyp = self.base.edge_hyperplanes();
        let mut id_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        for e in 0..self.edges.len() {
            let r = uf.find(e);
            let next = self.walls.len();
            let id = *id_of_root.entry(r).or_insert(next);
            if id == next {
                self.walls.push(Wall {
                    id,
                    edges: Vec::new(),
                    base_hyperplane: hyp[self.edges[e].base],
                });
            }
            self.walls[id].edges.push(e);
            self.edges[e].wall = id;
        }
        self.wall_squares = vec![Vec::new(); self.walls.len()];
        for i in 0..self.squares.len() {
            let [c0, c1, c2, _] = self.squares[i].corners;
            let w0 = self.edges[self.edge_between(c0, c1)].wall;
            let w1 = self.edges[self.edge_between(c0, c2)].wall;
            self.squares[i].walls = [w0, w1];
            self.wall_squares[w0].push(i);
            self.wall_squares[w1].push(i);
        }
    }

    fn lift_cubes(&mut self) {
        self.wall_cubes = vec![Vec::new(); self.walls.len()];
        for v in 0..self.vertices.len() {
            let proj = self.vertices[v].proj;
            'cubes: for c in 0..self.base.num_cubes() {
                let f = self.base.cube_frame(c).clone();
                if f.corners[0] != proj {
                    continue;
                }
                let mut corners = [usize::MAX; 8];
                corners[0] = v;
                for k in 1..8usize {
                    let axis = k.trailing_zeros() as usize;
                    let prev = k ^ (1 << axis);
                    match self.neighbor(corners[prev], f.edge_end(axis, prev)) {
                        Some(u) => corners[k] = u,
                        None => continue 'cubes,
                    }
                }
                let walls = [0, 1, 2].map(|axis| self.edges[self.edge_between(corners[0], corners[1 << axis])].wall);
                let depth = corners.iter().map(|&x| self.vertices[x].depth).max().unwrap();
                let id = self.cubes.len();
                self.cubes.push(BallCube {
                    base: c,
                    corners,
                    walls,
                    depth,
                });
                for w in walls {
                    self.wall_cubes[w].push(id);
                }
            }
        }
    }

    fn build_separation(&mut self, parent: &[Option<(usize, usize)>]) {
        self.sep = vec![Vec::new(); self.vertices.len()];
        for u in 1..self.vertices.len() {
            let (v, ee) = parent[u].expect("non-root vertices have a parent");
            let (_, e) = self.slot(v, ee).expect("parent edge exists");
            let mut s = self.sep[v].clone();
            let w = self.edges[e].wall;
            let pos = s.binary_search(&w).expect_err("geodesics cross each wall once");
            s.insert(pos, w);
            self.sep[u] = s;
        }
    }

    pub fn base(&self) -> &CubeComplex {
        &self.base
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> &BallVertex {
        &self.vertices[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.vertices[v].depth
    }

    pub fn proj(&self, v: usize) -> usize {
        self.vertices[v].proj
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.vertices[v].depth < self.radius
    }

    pub fn edges(&self) -> &[BallEdge] {
        &self.edges
    }

    pub fn squares(&self) -> &[BallSquare] {
        &self.squares
    }

    pub fn cubes(&self) -> &[BallCube] {
        &self.cubes
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn wall_squares(&self, wall: usize) -> &[usize] {
        &self.wall_squares[wall]
    }

    pub fn wall_cubes(&self, wall: usize) -> &[usize] {
        &self.wall_cubes[wall]
    }

    /// Neighbours of `v` with the connecting ball edge, by slot order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices[v].slots.iter().flatten().copied()
    }

    /// Slot (edge-end at the base) through which `v` reaches its neighbour `u`.
    pub fn slot_towards(&self, v: usize, u: usize) -> Option<usize> {
        let proj = self.vertices[v].proj;
        self.vertices[v]
            .slots
            .iter()
            .position(|s| s.map(|(n, _)| n) == Some(u))
            .map(|i| self.ends_at[proj][i])
    }

    /// Walls separating `v` from the basepoint, increasing.
    pub fn sep(&self, v: usize) -> &[usize] {
        &self.sep[v]
    }

    pub fn side(&self, wall: usize, v: usize) -> Side {
        if self.sep[v].binary_search(&wall).is_ok() {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    /// Vertex at the end of an edge-end word from the basepoint.
    pub fn follow(&self, word: &[usize]) -> Result<usize, CoverError> {
        let mut v = 0;
        for (i, &ee) in word.iter().enumerate() {
            v = self.neighbor(v, ee).ok_or(CoverError::BadPath(i))?;
        }
        Ok(v)
    }

    /// Vertex with a given normal form, if present.
    pub fn vertex_by_nf(&self, nf: &[usize]) -> Option<usize> {
        let lo = self.vertices.partition_point(|x| (x.depth, &x.nf[..]) < (nf.len(), nf));
        (lo < self.vertices.len() && self.vertices[lo].nf == nf).then_some(lo)
    }

    /// Human-readable edge word for an edge-end word.
    pub fn word_string(&self, word: &[usize]) -> String {
        let tokens: Vec<String> = word
            .iter()
            .map(|&ee| {
                let id = &self.base.edge(ee / 2).id;
                if ee % 2 == 0 {
                    id.clone()
                } else {
                    format!("-{id}")
                }
            })
            .collect();
        tokens.join(" ")
    }

    /// Parses a word of edge ids (`-x` or uppercase single letters for inverses)
    /// into edge-ends.
    pub fn parse_word(&self, word: &str) -> Option<Vec<usize>> {
        crate::cube_complex::word_tokens(word)
            .iter()
            .map(|tok| match tok.strip_prefix('-') {
                Some(rest) => self.base.edge_index(rest).map(|e| 2 * e + 1),
                None => self.base.edge_index(tok).map(|e| 2 * e),
            })
            .collect()
    }

    fn check_interior(&self, v: usize) -> Result<(), CoverError> {
        if v >= self.vertices.len() {
            return Err(CoverError::UnknownVertex(v));
        }
        if !self.is_interior(v) {
            return Err(CoverError::OnBoundary(v));
        }
        Ok(())
    }

    /// ℓ¹ distance between interior vertices, as the number of separating walls.
    pub fn l1_distance(&self, u: usize, v: usize) -> Result<usize, CoverError> {
        Ok(self.separating_walls(u, v)?.len())
    }

    /// Walls with `u` and `v` on different sides, increasing.
    pub fn separating_walls(&self, u: usize, v: usize) -> Result<Vec<usize>, CoverError> {
        self.check_interior(u)?;
        self.check_interior(v)?;
        Ok(sym_diff(&self.sep[u], &self.sep[v]))
    }

    /// Breadth-first distance inside the ball (all vertices allowed).
    pub fn bfs_distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for (y, _) in self.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Intersection of all half-spaces containing `set`.
    pub fn convex_hull(&self, set: &[usize]) -> Result<ConvexSubcomplex, CoverError> {
        let (&s0, rest) = set.split_first().ok_or(CoverError::Empty)?;
        for &s in set {
            self.check_interior(s)?;
        }
        let mut free: BTreeSet<usize> = BTreeSet::new();
        for &s in rest {
            free.extend(sym_diff(&self.sep[s], &self.sep[s0]));
        }
        // crossing an edge toggles its wall, so the hull is what s0 reaches
        // through walls in `free`
        let mut seen = BTreeSet::from([s0]);
        let mut queue = VecDeque::from([s0]);
        while let Some(x) = queue.pop_front() {
            if !self.is_interior(x) {
                return Err(CoverError::BoundaryTouched(x));
            }
            for (y, e) in self.neighbors(x) {
                if free.contains(&self.edges[e].wall) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Ok(self.subcomplex(seen.into_iter().collect()))
    }

    /// Wraps a vertex set (sorted, deduplicated) with its margin.
    pub fn subcomplex(&self, mut vertices: Vec<usize>) -> ConvexSubcomplex {
        vertices.sort_unstable();
        vertices.dedup();
        let max_depth = vertices.iter().map(|&v| self.vertices[v].depth).max().unwrap_or(0);
        ConvexSubcomplex {
            vertices,
            margin: self.radius.saturating_sub(max_depth),
        }
    }

    /// Connected and locally convex: every square with two edges at a
    /// corner inside the set has its far corner inside too.
    pub fn is_convex(&self, vertices: &[usize]) -> bool {
        let set: BTreeSet<usize> = vertices.iter().copied().collect();
        let Some(&start) = set.iter().next() else { return false };
        if set.iter().any(|&v| v >= self.vertices.len() || !self.is_interior(v)) {
            return false;
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for (y, _) in self.neighbors(x) {
                if set.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != set.len() {
            return false;
        }
        self.squares.iter().all(|sq| {
            let c = sq.corners;
            (0..4).all(|k| {
                !(set.contains(&c[k]) && set.contains(&c[k ^ 1]) && set.contains(&c[k ^ 2])) || set.contains(&c[k ^ 3])
            })
        })
    }

    /// Partial deck transformation sending `p` to `q`, obtained by
    /// following identical edge-end slots. Defined on the vertices whose
    /// images stay in the ball; `None` if `p`, `q` have different images.
    pub fn translation(&self, p: usize, q: usize) -> Option<BTreeMap<usize, usize>> {
        if self.vertices[p].proj != self.vertices[q].proj {
            return None;
        }
        let mut map = BTreeMap::from([(p, q)]);
        let mut queue = VecDeque::from([p]);
        while let Some(x) = queue.pop_front() {
            let y = map[&x];
            for (i, s) in self.vertices[x].slots.iter().enumerate() {
                let Some((x2, _)) = *s else { continue };
                let Some((y2, _)) = self.vertices[y].slots[i] else { continue };
                match map.get(&x2) {
                    Some(&old) if old != y2 => return None,
                    Some(_) => {}
                    None => {
                        map.insert(x2, y2);
                        queue.push_back(x2);
                    }
                }
            }
        }
        Some(map)
    }

    /// Group element (as a freely reduced edge-end word at the basepoint)
    /// of the deck transformation taking `p` to `q`.
    pub fn deck_word(&self, p: usize, q: usize) -> Vec<usize> {
        let mut word = self.vertices[q].nf.clone();
        word.extend(self.vertices[p].nf.iter().rev().map(|&ee| ee ^ 1));
        free_reduce(&word)
    }

    pub fn to_dump(&self) -> BallDump {
        BallDump {
            basepoint: self.base.vertex_id(self.basepoint).to_string(),
            radius: self.radius,
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| DumpVertex {
                    id: i,
                    proj: self.base.vertex_id(v.proj).to_string(),
                    depth: v.depth,
                    normal_form: self.word_string(&v.nf),
                    separating_walls: self.sep[i].clone(),
                })
                .collect(),
            edges: self.edges.clone(),
            squares: self.squares.clone(),
            cubes: self.cubes.clone(),
            walls: self.walls.clone(),
        }
    }
}

/// Cancels adjacent `ee, ee ^ 1` pairs (backtracking along one edge).
pub fn free_reduce(word: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(word.len());
    for &ee in word {
        if out.last() == Some(&(ee ^ 1)) {
            out.pop();
        } else {
            out.push(ee);
        }
    }
    out
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BallDump {
    pub basepoint: String,
    pub radius: usize,
    pub vertices: Vec<DumpVertex>,
    pub edges: Vec<BallEdge>,
    pub squares: Vec<BallSquare>,
    pub cubes: Vec<BallCube>,
    pub walls: Vec<Wall>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DumpVertex {
    pub id: usize,
    pub proj: String,
    pub depth: usize,
    pub normal_form: String,
    pub separating_walls: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn ball_sizes() {
        assert_eq!(CoverBall::develop(&corpus::torus(), 0, 2).unwrap().num_vertices(), 13);
        assert_eq!(CoverBall::develop(&corpus::rose(2), 0, 2).unwrap().num_vertices(), 17);
        assert_eq!(CoverBall::develop(&corpus::three_torus(), 0, 1).unwrap().num_vertices(), 7);
        assert_eq!(CoverBall::develop(&corpus::three_torus(), 0, 2).unwrap().num_vertices(), 25);
    }

    #[test]
    fn non_npc_is_rejected() {
        assert!(matches!(
            CoverBall::develop(&corpus::cube_surface(), 0, 1),
            Err(CoverError::NotNpc(_))
        ));
    }

    #[test]
    fn torus_distances() {
        let ball = CoverBall::develop(&corpus::torus(), 0, 3).unwrap();
        let a = 0; // edge-end a:0
        let b = 2;
        let diag = ball.follow(&[a, b]).unwrap();
        assert_eq!(ball.l1_distance(0, diag).unwrap(), 2);
        let two = ball.follow(&[a, a]).unwrap();
        let walls = ball.separating_walls(0, two).unwrap();
        assert_eq!(walls.len(), 2);
        assert!(walls.iter().all(|&w| ball.walls()[w].base_hyperplane == ball.walls()[walls[0]].base_hyperplane));
        assert_eq!(ball.l1_distance(diag, diag).unwrap(), 0);
        let edge = ball.follow(&[a, a, a]).unwrap();
        assert_eq!(ball.l1_distance(0, edge), Err(CoverError::OnBoundary(edge)));
    }

    #[test]
    fn square_relation_identifies_paths() {
        let ball = CoverBall::develop(&corpus::torus(), 0, 2).unwrap();
        assert_eq!(ball.follow(&[0, 2]).unwrap(), ball.follow(&[2, 0]).unwrap());
        assert_eq!(ball.follow(&[0, 1]).unwrap(), 0);
        assert_eq!(ball.vertex_by_nf(&[0, 2]), Some(ball.follow(&[2, 0]).unwrap()));
    }

    #[test]
    fn hulls_and_convexity() {
        let ball = CoverBall::develop(&corpus::torus(), 0, 3).unwrap();
        let diag = ball.follow(&[0, 2]).unwrap();
        let hull = ball.convex_hull(&[0, diag]).unwrap();
        assert_eq!(hull.len(), 4);
        assert_eq!(ball.convex_hull(&[0]).unwrap().vertices, vec![0]);
        assert!(ball.is_convex(&hull.vertices));
        let path = [0, ball.follow(&[0]).unwrap(), diag];
        assert!(!ball.is_convex(&path));
        let far = ball.follow(&[0, 0]).unwrap();
        let other = ball.follow(&[2, 2]).unwrap();
        assert!(matches!(ball.convex_hull(&[far, other]), Err(CoverError::BoundaryTouched(_))));
    }

    #[test]
    fn translations() {
        let ball = CoverBall::develop(&corpus::torus(), 0, 3).unwrap();
        let a = ball.follow(&[0]).unwrap();
        let map = ball.translation(0, a).unwrap();
        assert_eq!(map[&ball.follow(&[2]).unwrap()], ball.follow(&[0, 2]).unwrap());
        assert_eq!(ball.deck_word(0, a), vec![0]);
        assert_eq!(free_reduce(&[0, 2, 3, 1]), Vec::<usize>::new());
    }
}
