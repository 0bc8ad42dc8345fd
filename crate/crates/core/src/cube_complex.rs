//! Compact cube complexes of dimension at most 3, presented by face maps.
//!
//! Edges carry their two ends, squares a closed boundary path of four
//! signed edges, and 3-cubes six square faces with signed-permutation
//! alignments. From this data every cube gets a *frame*: the base vertex of
//! each corner (bitmask, axis `i` = bit `i`) and the base edge along each
//! axis-parallel side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simplicial::{SimplicialComplex, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{owner} refers to unknown {kind} {id:?}")]
    DanglingRef {
        owner: String,
        kind: &'static str,
        id: String,
    },
    #[error("square {square:?}: boundary is not a closed path ({detail})")]
    OpenBoundary { square: String, detail: String },
    #[error("cube {cube:?}: invalid alignment {alignment:?} on face {face}")]
    BadAlignment {
        cube: String,
        face: usize,
        alignment: [i32; 2],
    },
    #[error("cube {cube:?}: faces disagree on {what}")]
    InconsistentFaces { cube: String, what: String },
    #[error("link of vertex {vertex:?} is not simplicial: {reason}")]
    NonSimplicialLink { vertex: String, reason: String },
    #[error("unsupported dimension {0} (at most 3)")]
    UnsupportedDimension(usize),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("hyperplane {0} is one-sided")]
    OneSided(usize),
    #[error("hyperplane {0} is not embedded")]
    NotEmbedded(usize),
    #[error("unknown hyperplane {0}")]
    UnknownHyperplane(usize),
}

/// An edge traversed forwards (`end 0 -> end 1`) or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedEdge {
    pub edge: usize,
    pub forward: bool,
}

impl SignedEdge {
    pub fn new(edge: usize, forward: bool) -> Self {
        Self { edge, forward }
    }

    pub fn inverse(self) -> Self {
        Self {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

/// Reference to a face square of a 3-cube. `alignment[j]` is the 1-based
/// cube axis carrying square coordinate `j`, negated when reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceGluing {
    pub square: usize,
    pub alignment: [i32; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCell {
    pub id: String,
    pub ends: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareCell {
    pub id: String,
    pub boundary: [SignedEdge; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube3Cell {
    pub id: String,
    /// Face `2a + s` is the side where coordinate `a` equals `s`.
    pub faces: [FaceGluing; 6],
}

/// A cube of any dimension in the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellRef {
    pub dim: usize,
    pub index: usize,
}

/// Corner vertices and side edges of one cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub dim: usize,
    /// Base vertex at each corner bitmask.
    pub corners: Vec<usize>,
    /// `(edge, forward)` indexed by `axis * 2^dim + base corner` (bit `axis` clear).
    sides: Vec<Option<(usize, bool)>>,
}

impl Frame {
    fn empty(dim: usize) -> Self {
        Frame {
            dim,
            corners: vec![usize::MAX; 1 << dim],
            sides: vec![None; dim << dim],
        }
    }

    /// Edge along `axis` through `corner`, with `forward` true when the
    /// edge runs from the 0 side to the 1 side of that axis.
    pub fn side(&self, axis: usize, corner: usize) -> (usize, bool) {
        let base = corner & !(1 << axis);
        self.sides[(axis << self.dim) + base].expect("frame is complete")
    }

    /// Edge-end (link vertex `2 * edge + end`) at `corner` along `axis`.
    pub fn edge_end(&self, axis: usize, corner: usize) -> usize {
        let (edge, forward) = self.side(axis, corner);
        let bit = (corner >> axis) & 1;
        2 * edge + (bit ^ usize::from(!forward))
    }
}

/// A validated compact cube complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeComplex {
    vertex_ids: Vec<String>,
    edges: Vec<EdgeCell>,
    squares: Vec<SquareCell>,
    cubes: Vec<Cube3Cell>,
    square_frames: Vec<Frame>,
    cube_frames: Vec<Frame>,
}

/// Incremental construction with validation in [`CubeComplexBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct CubeComplexBuilder {
    vertex_ids: Vec<String>,
    edges: Vec<EdgeCell>,
    squares: Vec<SquareCell>,
    cubes: Vec<Cube3Cell>,
}

impl CubeComplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: impl Into<String>) -> usize {
        self.vertex_ids.push(id.into());
        self.vertex_ids.len() - 1
    }

    pub fn edge(&mut self, id: impl Into<String>, from: usize, to: usize) -> usize {
        self.edges.push(EdgeCell {
            id: id.into(),
            ends: [from, to],
        });
        self.edges.len() - 1
    }

    pub fn square(&mut self, id: impl Into<String>, boundary: [SignedEdge; 4]) -> usize {
        self.squares.push(SquareCell {
            id: id.into(),
            boundary,
        });
        self.squares.len() - 1
    }

    pub fn cube(&mut self, id: impl Into<String>, faces: [FaceGluing; 6]) -> usize {
        self.cubes.push(Cube3Cell {
            id: id.into(),
            faces,
        });
        self.cubes.len() - 1
    }

    pub fn build(self) -> Result<CubeComplex, CubeError> {
        CubeComplex::assemble(self.vertex_ids, self.edges, self.squares, self.cubes)
    }
}

fn check_unique<'a>(kind: &'static str, ids: impl Iterator<Item = &'a String>) -> Result<(), CubeError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(CubeError::DuplicateId {
                kind,
                id: id.clone(),
            });
        }
    }
    Ok(())
}

impl CubeComplex {
    fn assemble(
        vertex_ids: Vec<String>,
        edges: Vec<EdgeCell>,
        squares: Vec<SquareCell>,
        cubes: Vec<Cube3Cell>,
    ) -> Result<Self, CubeError> {
        check_unique("vertex", vertex_ids.iter())?;
        check_unique("edge", edges.iter().map(|e| &e.id))?;
        check_unique("square", squares.iter().map(|s| &s.id))?;
        check_unique("cube", cubes.iter().map(|c| &c.id))?;
        for e in &edges {
            for &v in &e.ends {
                if v >= vertex_ids.len() {
                    return Err(CubeError::DanglingRef {
                        owner: format!("edge {:?}", e.id),
                        kind: "vertex",
                        id: v.to_string(),
                    });
                }
            }
        }
        let mut square_frames = Vec::with_capacity(squares.len());
        for s in &squares {
            square_frames.push(square_frame(s, &edges)?);
        }
        let mut cube_frames = Vec::with_capacity(cubes.len());
        for c in &cubes {
            cube_frames.push(cube_frame(c, &squares, &square_frames)?);
        }
        let cx = CubeComplex {
            vertex_ids,
            edges,
            squares,
            cubes,
            square_frames,
            cube_frames,
        };
        for v in 0..cx.num_vertices() {
            cx.link_checked(v)?;
        }
        Ok(cx)
    }

    pub fn dimension(&self) -> usize {
        if !self.cubes.is_empty() {
            3
        } else if !self.squares.is_empty() {
            2
        } else if !self.edges.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_squares(&self) -> usize {
        self.squares.len()
    }

    pub fn num_cubes(&self) -> usize {
        self.cubes.len()
    }

    /// Number of cubes in each dimension 0..=3.
    pub fn cell_counts(&self) -> [usize; 4] {
        [
            self.num_vertices(),
            self.num_edges(),
            self.num_squares(),
            self.num_cubes(),
        ]
    }

    pub fn euler_characteristic(&self) -> i64 {
        let [v, e, f, c] = self.cell_counts().map(|n| n as i64);
        v - e + f - c
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_ids.iter().position(|x| x == id)
    }

    pub fn edge(&self, e: usize) -> &EdgeCell {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[EdgeCell] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|x| x.id == id)
    }

    pub fn square(&self, s: usize) -> &SquareCell {
        &self.squares[s]
    }

    pub fn squares(&self) -> &[SquareCell] {
        &self.squares
    }

    pub fn cube(&self, c: usize) -> &Cube3Cell {
        &self.cubes[c]
    }

    pub fn cubes(&self) -> &[Cube3Cell] {
        &self.cubes
    }

    pub fn square_frame(&self, s: usize) -> &Frame {
        &self.square_frames[s]
    }

    pub fn cube_frame(&self, c: usize) -> &Frame {
        &self.cube_frames[c]
    }

    /// Frame of any positive-dimensional cube.
    pub fn frame(&self, cell: CellRef) -> Frame {
        match cell.dim {
            1 => {
                let e = &self.edges[cell.index];
                let mut f = Frame::empty(1);
                f.corners = e.ends.to_vec();
                f.sides[0] = Some((cell.index, true));
                f
            }
            2 => self.square_frames[cell.index].clone(),
            3 => self.cube_frames[cell.index].clone(),
            d => panic!("no frame for dimension {d}"),
        }
    }

    /// All cubes of dimension >= 1 in (dimension, index) order.
    pub fn positive_cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        let e = (0..self.num_edges()).map(|index| CellRef { dim: 1, index });
        let s = (0..self.num_squares()).map(|index| CellRef { dim: 2, index });
        let c = (0..self.num_cubes()).map(|index| CellRef { dim: 3, index });
        e.chain(s).chain(c)
    }

    pub fn cell_id(&self, cell: CellRef) -> &str {
        match cell.dim {
            0 => &self.vertex_ids[cell.index],
            1 => &self.edges[cell.index].id,
            2 => &self.squares[cell.index].id,
            3 => &self.cubes[cell.index].id,
            _ => unreachable!(),
        }
    }

    /// Label used for the link vertex `2 * edge + end`.
    pub fn edge_end_label(&self, edge_end: usize) -> String {
        format!("{}:{}", self.edges[edge_end / 2].id, edge_end % 2)
    }

    /// Edge-ends (link vertices) at base vertex `v`, increasing.
    pub fn edge_ends_at(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            for end in 0..2 {
                if edge.ends[end] == v {
                    out.push(2 * e + end);
                }
            }
        }
        out
    }

    /// Vertex at the far end of the edge leaving through `edge_end`.
    pub fn across(&self, edge_end: usize) -> usize {
        self.edges[edge_end / 2].ends[1 - edge_end % 2]
    }

    /// Link of a vertex: one vertex per edge-end, one simplex per cube corner.
    pub fn vertex_link(&self, v: usize) -> SimplicialComplex {
        self.link_checked(v).expect("validated complexes have simplicial links")
    }

    fn link_checked(&self, v: usize) -> Result<SimplicialComplex, CubeError> {
        let mut lk = SimplicialComplex::new();
        for ee in self.edge_ends_at(v) {
            lk.add_vertex(ee);
            lk.set_label(ee, self.edge_end_label(ee));
        }
        let mut seen: BTreeMap<Vec<VertexId>, (CellRef, usize)> = BTreeMap::new();
        for cell in self.positive_cells().filter(|c| c.dim >= 2) {
            let frame = self.frame(cell);
            for corner in 0..(1usize << cell.dim) {
                if frame.corners[corner] != v {
                    continue;
                }
                let mut simplex: Vec<usize> =
                    (0..cell.dim).map(|axis| frame.edge_end(axis, corner)).collect();
                simplex.sort_unstable();
                if simplex.windows(2).any(|w| w[0] == w[1]) {
                    return Err(CubeError::NonSimplicialLink {
                        vertex: self.vertex_ids[v].clone(),
                        reason: format!(
                            "corner {corner} of {} {:?} uses one edge-end twice",
                            cell_kind(cell.dim),
                            self.cell_id(cell)
                        ),
                    });
                }
                if let Some((other, oc)) = seen.insert(simplex.clone(), (cell, corner)) {
                    return Err(CubeError::NonSimplicialLink {
                        vertex: self.vertex_ids[v].clone(),
                        reason: format!(
                            "corners {oc} of {:?} and {corner} of {:?} span the same simplex",
                            self.cell_id(other),
                            self.cell_id(cell)
                        ),
                    });
                }
                lk.add_simplex(&simplex).expect("edge-ends are link vertices");
            }
        }
        Ok(lk)
    }

    /// Gromov's condition: every vertex link is flag.
    pub fn check_npc(&self) -> NpcVerdict {
        for v in 0..self.num_vertices() {
            if !self.vertex_link(v).is_flag() {
                return NpcVerdict {
                    npc: false,
                    offending_vertex: Some(self.vertex_ids[v].clone()),
                };
            }
        }
        NpcVerdict {
            npc: true,
            offending_vertex: None,
        }
    }

    pub fn is_npc(&self) -> bool {
        self.check_npc().npc
    }

    /// Hyperplanes as classes of edges under square parallelism, with
    /// their midcubes and two-sidedness / embeddedness flags.
    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        let n = self.num_edges();
        let mut uf = ParityUnionFind::new(n);
        for frame in &self.square_frames {
            for axis in 0..2 {
                let (e0, f0) = frame.side(axis, 0);
                let (e1, f1) = frame.side(axis, 3);
                uf.union(e0, e1, f0 != f1);
            }
        }
        let mut class_of = vec![usize::MAX; n];
        let mut reps: Vec<usize> = Vec::new();
        for (e, slot) in class_of.iter_mut().enumerate() {
            let r = uf.find(e).0;
            let idx = match reps.iter().position(|&x| x == r) {
                Some(i) => i,
                None => {
                    reps.push(r);
                    reps.len() - 1
                }
            };
            *slot = idx;
        }
        let mut hyps: Vec<Hyperplane> = (0..reps.len())
            .map(|id| Hyperplane {
                id,
                edges: Vec::new(),
                midcubes: Vec::new(),
                two_sided: !uf.contradiction[reps[id]],
                embedded: true,
            })
            .collect();
        for (e, &h) in class_of.iter().enumerate() {
            hyps[h].edges.push(e);
            hyps[h].midcubes.push(Midcube {
                cell: CellRef { dim: 1, index: e },
                axis: 0,
            });
        }
        for cell in self.positive_cells().filter(|c| c.dim >= 2) {
            let frame = self.frame(cell);
            let mut seen_here = BTreeSet::new();
            for axis in 0..cell.dim {
                let h = class_of[frame.side(axis, 0).0];
                hyps[h].midcubes.push(Midcube { cell, axis });
                if !seen_here.insert(h) {
                    hyps[h].embedded = false;
                }
            }
        }
        hyps
    }

    /// Hyperplane id of every edge.
    pub fn edge_hyperplanes(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_edges()];
        for h in self.hyperplanes() {
            for &e in &h.edges {
                out[e] = h.id;
            }
        }
        out
    }

    /// `X ∖ N̊(H)` split into connected components, with the gluing data
    /// that recovers `X`.
    pub fn cut_along(&self, hyperplane: usize) -> Result<CutResult, CubeError> {
        let hyps = self.hyperplanes();
        let h = hyps
            .get(hyperplane)
            .ok_or(CubeError::UnknownHyperplane(hyperplane))?;
        if !h.two_sided {
            return Err(CubeError::OneSided(hyperplane));
        }
        if !h.embedded {
            return Err(CubeError::NotEmbedded(hyperplane));
        }
        let dual: BTreeSet<CellRef> = h.midcubes.iter().map(|m| m.cell).collect();
        let kept = CellSelection {
            vertices: (0..self.num_vertices()).collect(),
            edges: (0..self.num_edges())
                .filter(|&e| !dual.contains(&CellRef { dim: 1, index: e }))
                .collect(),
            squares: (0..self.num_squares())
                .filter(|&s| !dual.contains(&CellRef { dim: 2, index: s }))
                .collect(),
            cubes: (0..self.num_cubes())
                .filter(|&c| !dual.contains(&CellRef { dim: 3, index: c }))
                .collect(),
        };
        let pieces = self.components_of(&kept);
        let mut gluing = Vec::new();
        let orient = self.hyperplane_orientation(h);
        for m in &h.midcubes {
            let frame = self.frame(m.cell);
            let (e, fwd) = frame.side(m.axis, 0);
            // Side 0 of the hyperplane is where the oriented dual edge starts.
            let flip = fwd != orient[&e];
            let low: Vec<usize> = (0..frame.corners.len()).filter(|c| c >> m.axis & 1 == 0).collect();
            let high: Vec<usize> = low.iter().map(|c| c | 1 << m.axis).collect();
            let (side0, side1) = if flip { (high, low) } else { (low, high) };
            let corners = |cs: &[usize]| cs.iter().map(|&c| self.vertex_ids[frame.corners[c]].clone()).collect();
            gluing.push(GluingRecord {
                dual_cell: self.cell_id(m.cell).to_string(),
                dual_dim: m.cell.dim,
                side0_corners: corners(&side0),
                side1_corners: corners(&side1),
            });
        }
        let mut components = Vec::new();
        for sel in pieces {
            components.push(self.subcomplex(&sel)?);
        }
        Ok(CutResult {
            hyperplane,
            components,
            gluing,
        })
    }

    /// Consistent orientation of the edges of a two-sided hyperplane:
    /// `true` means the edge's own direction agrees with the normal.
    fn hyperplane_orientation(&self, h: &Hyperplane) -> BTreeMap<usize, bool> {
        let mut uf = ParityUnionFind::new(self.num_edges());
        for frame in &self.square_frames {
            for axis in 0..2 {
                let (e0, f0) = frame.side(axis, 0);
                let (e1, f1) = frame.side(axis, 3);
                uf.union(e0, e1, f0 != f1);
            }
        }
        h.edges.iter().map(|&e| (e, !uf.find(e).1)).collect()
    }

    /// Iteratively deletes a cube together with a free codimension-1 face,
    /// always choosing the least (dimension, index) cube that has one.
    pub fn collapse_free_faces(&self) -> CubeComplex {
        let mut sel = CellSelection::all(self);
        loop {
            match self.find_free_pair(&sel) {
                Some((cell, face)) => {
                    sel.remove(cell);
                    sel.remove(face);
                }
                None => break,
            }
        }
        self.subcomplex(&sel).expect("subcomplexes of valid complexes are valid")
    }

    fn find_free_pair(&self, sel: &CellSelection) -> Option<(CellRef, CellRef)> {
        // Count how many times each cell occurs as a facet of a selected cube.
        let mut uses: BTreeMap<CellRef, usize> = BTreeMap::new();
        let mut facets_of: BTreeMap<CellRef, Vec<CellRef>> = BTreeMap::new();
        for cell in sel.iter() {
            let facets = self.facets(cell);
            for &f in &facets {
                *uses.entry(f).or_default() += 1;
            }
            facets_of.insert(cell, facets);
        }
        for cell in sel.iter() {
            if cell.dim == 0 {
                continue;
            }
            let mut candidates: Vec<CellRef> = facets_of[&cell]
                .iter()
                .copied()
                .filter(|f| uses.get(f) == Some(&1))
                .collect();
            candidates.sort();
            if let Some(&face) = candidates.first() {
                return Some((cell, face));
            }
        }
        None
    }

    /// Codimension-1 faces with multiplicity.
    pub fn facets(&self, cell: CellRef) -> Vec<CellRef> {
        match cell.dim {
            0 => Vec::new(),
            1 => self.edges[cell.index]
                .ends
                .iter()
                .map(|&v| CellRef { dim: 0, index: v })
                .collect(),
            2 => self.squares[cell.index]
                .boundary
                .iter()
                .map(|s| CellRef { dim: 1, index: s.edge })
                .collect(),
            3 => self.cubes[cell.index]
                .faces
                .iter()
                .map(|f| CellRef { dim: 2, index: f.square })
                .collect(),
            _ => unreachable!(),
        }
    }

    fn components_of(&self, sel: &CellSelection) -> Vec<CellSelection> {
        let mut uf = UnionFind::new(self.num_vertices());
        for &e in &sel.edges {
            let [a, b] = self.edges[e].ends;
            uf.union(a, b);
        }
        let mut groups: BTreeMap<usize, usize> = BTreeMap::new();
        let mut out: Vec<CellSelection> = Vec::new();
        for &v in &sel.vertices {
            let r = uf.find(v);
            let idx = *groups.entry(r).or_insert_with(|| {
                out.push(CellSelection::default());
                out.len() - 1
            });
            out[idx].vertices.insert(v);
        }
        let comp = |v: usize| groups[&uf.clone().find(v)];
        for &e in &sel.edges {
            out[comp(self.edges[e].ends[0])].edges.insert(e);
        }
        for &s in &sel.squares {
            out[comp(self.square_frames[s].corners[0])].squares.insert(s);
        }
        for &c in &sel.cubes {
            out[comp(self.cube_frames[c].corners[0])].cubes.insert(c);
        }
        out
    }

    /// Connected components of the complex, as standalone complexes.
    pub fn components(&self) -> Vec<CubeComplex> {
        self.components_of(&CellSelection::all(self))
            .into_iter()
            .map(|s| self.subcomplex(&s).expect("valid"))
            .collect()
    }

    pub fn num_components(&self) -> usize {
        self.components_of(&CellSelection::all(self)).len()
    }

    /// Subcomplex on a face-closed selection of cells, keeping ids.
    pub fn subcomplex(&self, sel: &CellSelection) -> Result<CubeComplex, CubeError> {
        let vmap: BTreeMap<usize, usize> = sel.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let emap: BTreeMap<usize, usize> = sel.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let smap: BTreeMap<usize, usize> = sel.squares.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let missing = |what: &str| CubeError::Malformed(format!("selection is not closed under faces ({what})"));
        let mut b = CubeComplexBuilder::new();
        for &v in &sel.vertices {
            b.vertex(self.vertex_ids[v].clone());
        }
        for &e in &sel.edges {
            let [x, y] = self.edges[e].ends;
            let (x, y) = (
                *vmap.get(&x).ok_or_else(|| missing("vertex"))?,
                *vmap.get(&y).ok_or_else(|| missing("vertex"))?,
            );
            b.edge(self.edges[e].id.clone(), x, y);
        }
        for &s in &sel.squares {
            let mut boundary = self.squares[s].boundary;
            for se in boundary.iter_mut() {
                se.edge = *emap.get(&se.edge).ok_or_else(|| missing("edge"))?;
            }
            b.square(self.squares[s].id.clone(), boundary);
        }
        for &c in &sel.cubes {
            let mut faces = self.cubes[c].faces;
            for f in faces.iter_mut() {
                f.square = *smap.get(&f.square).ok_or_else(|| missing("square"))?;
            }
            b.cube(self.cubes[c].id.clone(), faces);
        }
        b.build()
    }

    /// First homology with integer coefficients.
    pub fn homology_h1(&self) -> HomologyGroup {
        let v = self.num_vertices();
        let e = self.num_edges();
        let f = self.num_squares();
        let mut d1 = vec![vec![0i64; e]; v];
        for (j, edge) in self.edges.iter().enumerate() {
            d1[edge.ends[1]][j] += 1;
            d1[edge.ends[0]][j] -= 1;
        }
        let mut d2 = vec![vec![0i64; f]; e];
        for (j, sq) in self.squares.iter().enumerate() {
            for se in &sq.boundary {
                d2[se.edge][j] += if se.forward { 1 } else { -1 };
            }
        }
        let rank_d1 = smith_diagonal(d1).len();
        let diag2 = smith_diagonal(d2);
        let rank = e - rank_d1 - diag2.len();
        let mut torsion: Vec<u64> = diag2.into_iter().filter(|&d| d > 1).collect();
        torsion.sort_unstable();
        HomologyGroup { rank, torsion }
    }

    /// Serializable description in the face-map schema.
    pub fn to_description(&self) -> CubeComplexDescription {
        let mut cubes = CubesByDim::default();
        cubes.vertices = self.vertex_ids.clone();
        cubes.edges = self
            .edges
            .iter()
            .map(|e| EdgeDesc {
                id: e.id.clone(),
                ends: [self.vertex_ids[e.ends[0]].clone(), self.vertex_ids[e.ends[1]].clone()],
            })
            .collect();
        cubes.squares = self
            .squares
            .iter()
            .map(|s| SquareDesc {
                id: s.id.clone(),
                boundary: s
                    .boundary
                    .iter()
                    .map(|se| {
                        let id = &self.edges[se.edge].id;
                        if se.forward {
                            id.clone()
                        } else {
                            format!("-{id}")
                        }
                    })
                    .collect(),
            })
            .collect();
        cubes.cubes = self
            .cubes
            .iter()
            .map(|c| CubeDesc {
                id: c.id.clone(),
                faces: c
                    .faces
                    .iter()
                    .map(|f| FaceDesc {
                        square: self.squares[f.square].id.clone(),
                        alignment: f.alignment,
                    })
                    .collect(),
            })
            .collect();
        CubeComplexDescription {
            dim: self.dimension(),
            cubes,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_description()).expect("serializable")
    }

    /// Parses either the face-map schema (`{"dim", "cubes"}`) or the
    /// square-word form (`{"vertices", "edges", "squares"}`).
    pub fn from_json(text: &str) -> Result<CubeComplex, CubeError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CubeError::Malformed(e.to_string()))?;
        if value.get("cubes").is_some() {
            let desc: CubeComplexDescription =
                serde_json::from_value(value).map_err(|e| CubeError::Malformed(e.to_string()))?;
            desc.build()
        } else {
            let desc: SquareComplexDescription =
                serde_json::from_value(value).map_err(|e| CubeError::Malformed(e.to_string()))?;
            desc.build()
        }
    }

    /// Graphviz rendering of the 1-skeleton.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{}\" {{\n", name.replace('"', "'"));
        for (i, v) in self.vertex_ids.iter().enumerate() {
            out.push_str(&format!("  v{i} [label=\"{}\"];\n", v.replace('"', "'")));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  v{} -> v{} [label=\"{}\"];\n",
                e.ends[0],
                e.ends[1],
                e.id.replace('"', "'")
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn cell_kind(dim: usize) -> &'static str {
    match dim {
        0 => "vertex",
        1 => "edge",
        2 => "square",
        _ => "cube",
    }
}

fn start_of(se: SignedEdge, edges: &[EdgeCell]) -> usize {
    let e = &edges[se.edge];
    if se.forward {
        e.ends[0]
    } else {
        e.ends[1]
    }
}

fn end_of(se: SignedEdge, edges: &[EdgeCell]) -> usize {
    start_of(se.inverse(), edges)
}

/// Corners: `c00 = start(s0)`, `c10 = start(s1)`, `c11 = start(s2)`,
/// `c01 = start(s3)`. Axis 0 sides are `s0` and `s2⁻¹`, axis 1 sides `s3⁻¹` and `s1`.
fn square_frame(sq: &SquareCell, edges: &[EdgeCell]) -> Result<Frame, CubeError> {
    for se in &sq.boundary {
        if se.edge >= edges.len() {
            return Err(CubeError::DanglingRef {
                owner: format!("square {:?}", sq.id),
                kind: "edge",
                id: se.edge.to_string(),
            });
        }
    }
    let b = sq.boundary;
    for i in 0..4 {
        if end_of(b[i], edges) != start_of(b[(i + 1) % 4], edges) {
            return Err(CubeError::OpenBoundary {
                square: sq.id.clone(),
                detail: format!(
                    "side {i} ({}) does not end where side {} ({}) starts",
                    edges[b[i].edge].id,
                    (i + 1) % 4,
                    edges[b[(i + 1) % 4].edge].id
                ),
            });
        }
    }
    let mut f = Frame::empty(2);
    f.corners = vec![
        start_of(b[0], edges),
        start_of(b[1], edges),
        start_of(b[3], edges),
        start_of(b[2], edges),
    ];
    // sides index = axis * 4 + base corner
    f.sides[0] = Some((b[0].edge, b[0].forward));
    f.sides[2] = Some((b[2].edge, !b[2].forward));
    f.sides[4] = Some((b[3].edge, !b[3].forward));
    f.sides[5] = Some((b[1].edge, b[1].forward));
    Ok(f)
}

fn cube_frame(cube: &Cube3Cell, squares: &[SquareCell], frames: &[Frame]) -> Result<Frame, CubeError> {
    let mut f = Frame::empty(3);
    let inconsistent = |what: String| CubeError::InconsistentFaces {
        cube: cube.id.clone(),
        what,
    };
    for (face_no, face) in cube.faces.iter().enumerate() {
        if face.square >= squares.len() {
            return Err(CubeError::DanglingRef {
                owner: format!("cube {:?}", cube.id),
                kind: "square",
                id: face.square.to_string(),
            });
        }
        let normal = face_no / 2;
        let level = face_no % 2;
        let axes: Vec<usize> = face.alignment.iter().map(|a| a.unsigned_abs() as usize).collect();
        let valid = axes.iter().all(|&a| (1..=3).contains(&a))
            && axes[0] != axes[1]
            && !axes.contains(&(normal + 1));
        if !valid {
            return Err(CubeError::BadAlignment {
                cube: cube.id.clone(),
                face: face_no,
                alignment: face.alignment,
            });
        }
        let target = [axes[0] - 1, axes[1] - 1];
        let flip = [face.alignment[0] < 0, face.alignment[1] < 0];
        let sf = &frames[face.square];
        let to_cube = |q: usize| -> usize {
            let mut c = level << normal;
            for j in 0..2 {
                let bit = (q >> j & 1) ^ usize::from(flip[j]);
                c |= bit << target[j];
            }
            c
        };
        for q in 0..4 {
            let c = to_cube(q);
            let v = sf.corners[q];
            if f.corners[c] == usize::MAX {
                f.corners[c] = v;
            } else if f.corners[c] != v {
                return Err(inconsistent(format!("corner {c}")));
            }
        }
        for j in 0..2 {
            for base in [0usize, 1 << (1 - j)] {
                let (e, fwd) = sf.side(j, base);
                let c = to_cube(base) & !(1 << target[j]);
                let slot = (target[j] << 3) + c;
                let val = (e, fwd != flip[j]);
                match f.sides[slot] {
                    None => f.sides[slot] = Some(val),
                    Some(old) if old == val => {}
                    Some(_) => {
                        return Err(inconsistent(format!("edge along axis {} at corner {c}", target[j])));
                    }
                }
            }
        }
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpcVerdict {
    pub npc: bool,
    pub offending_vertex: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Midcube {
    pub cell: CellRef,
    pub axis: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub id: usize,
    /// Dual edges (indices), increasing.
    pub edges: Vec<usize>,
    pub midcubes: Vec<Midcube>,
    pub two_sided: bool,
    pub embedded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingRecord {
    pub dual_cell: String,
    pub dual_dim: usize,
    /// Corner vertex ids of the cell's face on side 0 of the hyperplane.
    pub side0_corners: Vec<String>,
    pub side1_corners: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CutResult {
    pub hyperplane: usize,
    pub components: Vec<CubeComplex>,
    pub gluing: Vec<GluingRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    /// Invariant factors greater than 1, increasing.
    pub torsion: Vec<u64>,
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A face-closed set of cells, by index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellSelection {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
    pub squares: BTreeSet<usize>,
    pub cubes: BTreeSet<usize>,
}

impl CellSelection {
    pub fn all(cx: &CubeComplex) -> Self {
        CellSelection {
            vertices: (0..cx.num_vertices()).collect(),
            edges: (0..cx.num_edges()).collect(),
            squares: (0..cx.num_squares()).collect(),
            cubes: (0..cx.num_cubes()).collect(),
        }
    }

    fn set_mut(&mut self, dim: usize) -> &mut BTreeSet<usize> {
        match dim {
            0 => &mut self.vertices,
            1 => &mut self.edges,
            2 => &mut self.squares,
            _ => &mut self.cubes,
        }
    }

    pub fn remove(&mut self, cell: CellRef) {
        self.set_mut(cell.dim).remove(&cell.index);
    }

    pub fn iter(&self) -> impl Iterator<Item = CellRef> + '_ {
        let v = self.vertices.iter().map(|&index| CellRef { dim: 0, index });
        let e = self.edges.iter().map(|&index| CellRef { dim: 1, index });
        let s = self.squares.iter().map(|&index| CellRef { dim: 2, index });
        let c = self.cubes.iter().map(|&index| CellRef { dim: 3, index });
        v.chain(e).chain(s).chain(c)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Joins two classes; the smaller representative wins.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Union-find tracking the relative parity of each element to its root.
struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
    contradiction: Vec<bool>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            parity: vec![false; n],
            contradiction: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (r, p) = self.find(self.parent[x]);
        self.parity[x] ^= p;
        self.parent[x] = r;
        (r, self.parity[x])
    }

    fn union(&mut self, a: usize, b: usize, odd: bool) {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if pa ^ pb != odd {
                self.contradiction[ra] = true;
            }
            return;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        self.parity[hi] = pa ^ pb ^ odd;
        self.contradiction[lo] |= self.contradiction[hi];
    }
}

/// Non-zero diagonal entries of the Smith normal form, by absolute value.
pub fn smith_diagonal(mut m: Vec<Vec<i64>>) -> Vec<u64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        // Pivot: smallest non-zero absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                dirty |= m[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                dirty |= m[t][j] != 0;
            }
            if !dirty {
                // Ensure divisibility of the rest of the block by the pivot.
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // Move the smallest remaining entry of row/column t into the pivot.
            let mut best = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].unsigned_abs());
        t += 1;
    }
    diag
}

// ---------------------------------------------------------------------------
// JSON schema

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeComplexDescription {
    pub dim: usize,
    pub cubes: CubesByDim,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CubesByDim {
    #[serde(rename = "0", default, deserialize_with = "de_ids")]
    pub vertices: Vec<String>,
    #[serde(rename = "1", default)]
    pub edges: Vec<EdgeDesc>,
    #[serde(rename = "2", default, skip_serializing_if = "Vec::is_empty")]
    pub squares: Vec<SquareDesc>,
    #[serde(rename = "3", default, skip_serializing_if = "Vec::is_empty")]
    pub cubes: Vec<CubeDesc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDesc {
    #[serde(deserialize_with = "de_id")]
    pub id: String,
    #[serde(deserialize_with = "de_id_pair")]
    pub ends: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareDesc {
    #[serde(deserialize_with = "de_id")]
    pub id: String,
    /// Signed edge ids; a leading `-` reverses the edge.
    #[serde(deserialize_with = "de_ids")]
    pub boundary: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeDesc {
    #[serde(deserialize_with = "de_id")]
    pub id: String,
    pub faces: Vec<FaceDesc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceDesc {
    #[serde(deserialize_with = "de_id")]
    pub square: String,
    pub alignment: [i32; 2],
}

fn id_of(v: &serde_json::Value) -> Result<String, String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) if n.is_i64() => Ok(n.to_string()),
        other => Err(format!("expected a string or integer id, got {other}")),
    }
}

fn de_id<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    let v = serde_json::Value::deserialize(d)?;
    id_of(&v).map_err(serde::de::Error::custom)
}

fn de_ids<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    let v = Vec::<serde_json::Value>::deserialize(d)?;
    v.iter().map(id_of).collect::<Result<_, _>>().map_err(serde::de::Error::custom)
}

fn de_id_pair<'de, D: serde::Deserializer<'de>>(d: D) -> Result<[String; 2], D::Error> {
    let v = de_ids(d)?;
    <[String; 2]>::try_from(v).map_err(|v| serde::de::Error::custom(format!("expected 2 ends, got {}", v.len())))
}

fn lookup(map: &BTreeMap<String, usize>, owner: &str, kind: &'static str, id: &str) -> Result<usize, CubeError> {
    map.get(id).copied().ok_or_else(|| CubeError::DanglingRef {
        owner: owner.to_string(),
        kind,
        id: id.to_string(),
    })
}

fn parse_signed(
    token: &str,
    edges: &BTreeMap<String, usize>,
    owner: &str,
) -> Result<SignedEdge, CubeError> {
    match token.strip_prefix('-') {
        Some(rest) if !edges.contains_key(token) => Ok(SignedEdge::new(lookup(edges, owner, "edge", rest)?, false)),
        _ => Ok(SignedEdge::new(lookup(edges, owner, "edge", token)?, true)),
    }
}

impl CubeComplexDescription {
    pub fn build(&self) -> Result<CubeComplex, CubeError> {
        if self.dim > 3 {
            return Err(CubeError::UnsupportedDimension(self.dim));
        }
        let c = &self.cubes;
        let mut b = CubeComplexBuilder::new();
        let mut vmap = BTreeMap::new();
        for v in &c.vertices {
            vmap.insert(v.clone(), b.vertex(v.clone()));
        }
        let mut emap = BTreeMap::new();
        for e in &c.edges {
            let owner = format!("edge {:?}", e.id);
            let x = lookup(&vmap, &owner, "vertex", &e.ends[0])?;
            let y = lookup(&vmap, &owner, "vertex", &e.ends[1])?;
            emap.insert(e.id.clone(), b.edge(e.id.clone(), x, y));
        }
        let mut smap = BTreeMap::new();
        for s in &c.squares {
            let owner = format!("square {:?}", s.id);
            if s.boundary.len() != 4 {
                return Err(CubeError::Malformed(format!("{owner}: boundary needs 4 edges")));
            }
            let mut bd = [SignedEdge::new(0, true); 4];
            for (slot, tok) in bd.iter_mut().zip(&s.boundary) {
                *slot = parse_signed(tok, &emap, &owner)?;
            }
            smap.insert(s.id.clone(), b.square(s.id.clone(), bd));
        }
        for cube in &c.cubes {
            let owner = format!("cube {:?}", cube.id);
            if cube.faces.len() != 6 {
                return Err(CubeError::Malformed(format!("{owner}: needs 6 faces")));
            }
            let mut faces = [FaceGluing {
                square: 0,
                alignment: [1, 2],
            }; 6];
            for (slot, f) in faces.iter_mut().zip(&cube.faces) {
                *slot = FaceGluing {
                    square: lookup(&smap, &owner, "square", &f.square)?,
                    alignment: f.alignment,
                };
            }
            b.cube(cube.id.clone(), faces);
        }
        let cx = b.build()?;
        if cx.dimension() > self.dim {
            return Err(CubeError::Malformed(format!(
                "declared dim {} but cubes of dimension {} are present",
                self.dim,
                cx.dimension()
            )));
        }
        Ok(cx)
    }
}

/// Square complexes given by boundary words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareComplexDescription {
    #[serde(deserialize_with = "de_ids")]
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDesc>,
    #[serde(default)]
    pub squares: Vec<WordSquare>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordSquare {
    #[serde(deserialize_with = "de_id")]
    pub id: String,
    /// `"a b -a -b"` (tokens) or `"abAB"` (single letters, uppercase = inverse).
    pub word: String,
}

/// Splits a boundary word into signed edge tokens (`-x` for inverses).
pub fn word_tokens(word: &str) -> Vec<String> {
    if word.split_whitespace().count() > 1 {
        word.split_whitespace().map(str::to_string).collect()
    } else {
        word.trim()
            .chars()
            .map(|ch| {
                if ch.is_uppercase() {
                    format!("-{}", ch.to_lowercase())
                } else {
                    ch.to_string()
                }
            })
            .collect()
    }
}

impl SquareComplexDescription {
    pub fn build(&self) -> Result<CubeComplex, CubeError> {
        let desc = CubeComplexDescription {
            dim: 2,
            cubes: CubesByDim {
                vertices: self.vertices.clone(),
                edges: self.edges.clone(),
                squares: self
                    .squares
                    .iter()
                    .map(|s| SquareDesc {
                        id: s.id.clone(),
                        boundary: word_tokens(&s.word),
                    })
                    .collect(),
                cubes: Vec::new(),
            },
        };
        desc.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::simplicial::{isomorphism, shapes};

    #[test]
    fn torus_is_valid_with_square_link() {
        let t = corpus::torus();
        assert_eq!(t.cell_counts(), [1, 2, 1, 0]);
        let lk = t.vertex_link(0);
        assert!(isomorphism(&lk, &shapes::cycle(4), false).is_some());
        assert!(t.is_npc());
    }

    #[test]
    fn doubled_boundary_is_rejected() {
        let json = r#"{"vertices":["v"],"edges":[{"id":"a","ends":["v","v"]},{"id":"b","ends":["v","v"]}],
                      "squares":[{"id":"s","word":"abab"}]}"#;
        let err = CubeComplex::from_json(json).unwrap_err();
        assert!(matches!(err, CubeError::NonSimplicialLink { .. }), "{err}");
    }

    #[test]
    fn three_torus_link_is_octahedron() {
        let t3 = corpus::three_torus();
        assert_eq!(t3.cell_counts(), [1, 3, 3, 1]);
        let lk = t3.vertex_link(0);
        assert_eq!(lk.num_vertices(), 6);
        assert!(isomorphism(&lk, &shapes::octahedron(), false).is_some());
        assert!(t3.is_npc());
    }

    #[test]
    fn bad_alignment_and_dangling_refs() {
        let json = r#"{"dim":1,"cubes":{"0":["v"],"1":[{"id":"a","ends":["v","w"]}]}}"#;
        assert!(matches!(CubeComplex::from_json(json), Err(CubeError::DanglingRef { .. })));
        let mut desc = corpus::three_torus().to_description();
        desc.cubes.cubes[0].faces[0].alignment = [1, 2];
        assert!(matches!(desc.build(), Err(CubeError::BadAlignment { .. })));
        let mut desc = corpus::three_torus().to_description();
        desc.cubes.cubes[0].faces[0].alignment[0] *= -1;
        assert!(matches!(desc.build(), Err(CubeError::InconsistentFaces { .. })));
    }

    #[test]
    fn json_round_trip() {
        for cx in [corpus::torus(), corpus::three_torus(), corpus::torus_wedge_interval()] {
            let back = CubeComplex::from_json(&cx.to_json()).unwrap();
            assert_eq!(back, cx);
        }
    }

    #[test]
    fn hollow_triangle_link_is_not_npc() {
        let cx = corpus::cube_surface();
        let verdict = cx.check_npc();
        assert!(!verdict.npc);
        assert!(verdict.offending_vertex.is_some());
    }

    #[test]
    fn hyperplane_counts() {
        let t = corpus::torus().hyperplanes();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|h| h.two_sided && h.embedded));
        assert_eq!(corpus::three_torus().hyperplanes().len(), 3);
        let tc = corpus::torus_wedge_circle().hyperplanes();
        assert_eq!(tc.len(), 3);
        assert_eq!(tc.iter().filter(|h| h.midcubes.len() == 1).count(), 1);
    }

    #[test]
    fn cutting() {
        let t = corpus::torus();
        let cut = t.cut_along(0).unwrap();
        assert_eq!(cut.components.len(), 1);
        // chi(X) = sum chi(pieces) - chi(H)
        assert_eq!(cut.components[0].euler_characteristic(), 0);

        let strip = corpus::grid(3, 1);
        let mid = strip
            .hyperplanes()
            .into_iter()
            .find(|h| h.edges.iter().any(|&e| strip.edge(e).id == "h1,0"))
            .unwrap();
        let cut = strip.cut_along(mid.id).unwrap();
        assert_eq!(cut.components.len(), 2);
        for c in &cut.components {
            assert_eq!(c.cell_counts(), [4, 4, 1, 0]);
        }
    }

    #[test]
    fn collapse() {
        let tw = corpus::torus_wedge_interval().collapse_free_faces();
        assert_eq!(tw.cell_counts(), [1, 2, 1, 0]);
        let t = corpus::torus().collapse_free_faces();
        assert_eq!(t, corpus::torus());
        let sq = corpus::grid(1, 1).collapse_free_faces();
        assert_eq!(sq.cell_counts(), [1, 0, 0, 0]);
    }

    #[test]
    fn homology() {
        assert_eq!(corpus::torus().homology_h1(), HomologyGroup { rank: 2, torsion: vec![] });
        assert_eq!(corpus::rose(2).homology_h1(), HomologyGroup { rank: 2, torsion: vec![] });
        assert_eq!(corpus::three_torus().homology_h1().rank, 3);
        assert_eq!(corpus::grid(2, 2).homology_h1().rank, 0);
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_diagonal(vec![vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(smith_diagonal(vec![vec![3, 6, -3, -6]]), vec![3]);
        assert_eq!(smith_diagonal(vec![vec![0, 0]]), Vec::<u64>::new());
        assert_eq!(smith_diagonal(vec![vec![2, 0], vec![0, 3]]), vec![1, 6]);
    }
}

impl Serialize for CubeComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_description().serialize(serializer)
    }
}
