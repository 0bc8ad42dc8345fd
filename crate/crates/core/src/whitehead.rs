//! Bounding walls and Whitehead complexes of convex subcomplexes of a ball,
//! and of components of walls.
//!
//! Both a ball and a single wall inside it are handled through [`Patch`]:
//! a CAT(0) cube complex seen as a graph whose edges are labelled by walls,
//! together with the squares witnessing that two walls cross. The wall
//! patch of `H` has the `H`-edges as vertices, the squares dual to `H` as
//! edges (labelled by their other wall) and the 3-cubes dual to `H` as
//! squares, so `Wh_H(K)` runs through the same code as `Wh(Y)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::cover::{ConvexSubcomplex, CoverBall, Side};
use crate::simplicial::{flag_complete, isomorphism, SimplicialComplex, SimplicialError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WhiteheadError {
    #[error("subcomplex margin {margin} is below the required {required}")]
    InsufficientMargin { margin: usize, required: usize },
    #[error("wall {0} does not bound the subcomplex")]
    NotBounding(usize),
    #[error("wall {0} does not cross the subcomplex")]
    NotCrossing(usize),
    #[error("subcomplex is empty")]
    Empty,
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

/// Minimum margin for Whitehead computations: edges leaving `Y` and the
/// squares at their ends must lie in the ball.
pub const REQUIRED_MARGIN: usize = 2;

/// A CAT(0) cube complex given by wall-labelled adjacency and crossing squares.
pub trait Patch {
    /// Neighbours of a vertex together with the wall dual to the joining edge.
    fn labelled_neighbors(&self, v: usize) -> Vec<(usize, usize)>;
    /// Walls crossing `wall` inside the patch, with the least depth of a
    /// witnessing square.
    fn crossings(&self, wall: usize) -> BTreeMap<usize, usize>;
    /// Depth bound of the patch; crossings seen at depth `< radius` are stable.
    fn radius(&self) -> usize;
}

impl Patch for CoverBall {
    fn labelled_neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        self.neighbors(v).map(|(u, e)| (u, self.edges()[e].wall)).collect()
    }

    fn crossings(&self, wall: usize) -> BTreeMap<usize, usize> {
        let mut out: BTreeMap<usize, usize> = BTreeMap::new();
        for &s in self.wall_squares(wall) {
            let sq = &self.squares()[s];
            let other = if sq.walls[0] == wall { sq.walls[1] } else { sq.walls[0] };
            let d = out.entry(other).or_insert(sq.depth);
            *d = (*d).min(sq.depth);
        }
        out
    }

    fn radius(&self) -> usize {
        CoverBall::radius(self)
    }
}

/// A wall of a ball as a cube complex one dimension lower. Vertices are
/// ball edge ids dual to the wall.
pub struct WallPatch<'a> {
    ball: &'a CoverBall,
    wall: usize,
    adjacency: BTreeMap<usize, Vec<(usize, usize)>>,
}

impl<'a> WallPatch<'a> {
    pub fn new(ball: &'a CoverBall, wall: usize) -> Self {
        let mut adjacency: BTreeMap<usize, Vec<(usize, usize)>> =
            ball.walls()[wall].edges.iter().map(|&e| (e, Vec::new())).collect();
        for &s in ball.wall_squares(wall) {
            let sq = &ball.squares()[s];
            let [c0, c1, c2, c3] = sq.corners;
            // Axis along which `wall` is dual: the two dual edges are parallel.
            let (pairs, other) = if sq.walls[0] == wall {
                ([(c0, c1), (c2, c3)], sq.walls[1])
            } else {
                ([(c0, c2), (c1, c3)], sq.walls[0])
            };
            let e1 = edge_between(ball, pairs[0].0, pairs[0].1);
            let e2 = edge_between(ball, pairs[1].0, pairs[1].1);
            adjacency.get_mut(&e1).unwrap().push((e2, other));
            adjacency.get_mut(&e2).unwrap().push((e1, other));
        }
        for list in adjacency.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        WallPatch { ball, wall, adjacency }
    }

    pub fn wall(&self) -> usize {
        self.wall
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.keys().copied()
    }
}

impl Patch for WallPatch<'_> {
    fn labelled_neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        self.adjacency.get(&v).cloned().unwrap_or_default()
    }

    fn crossings(&self, wall: usize) -> BTreeMap<usize, usize> {
        let mut out: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in self.ball.wall_cubes(self.wall) {
            let cube = &self.ball.cubes()[c];
            if !cube.walls.contains(&wall) {
                continue;
            }
            for &other in &cube.walls {
                if other != wall && other != self.wall {
                    let d = out.entry(other).or_insert(cube.depth);
                    *d = (*d).min(cube.depth);
                }
            }
        }
        out
    }

    fn radius(&self) -> usize {
        self.ball.radius()
    }
}

fn edge_between(ball: &CoverBall, a: usize, b: usize) -> usize {
    ball.neighbors(a)
        .find(|&(n, _)| n == b)
        .map(|(_, e)| e)
        .expect("square sides are ball edges")
}

/// Whitehead complex: vertex ids are wall ids, labelled `w<id>`.
#[derive(Clone, Debug, Serialize)]
pub struct WhiteheadComplex {
    pub complex: SimplicialComplex,
    /// Radius of the ball in which crossings were searched.
    pub search_radius: usize,
    /// Whether every crossing is already witnessed one level inside the ball.
    pub stabilized: bool,
}

impl WhiteheadComplex {
    pub fn walls(&self) -> Vec<usize> {
        self.complex.vertices().collect()
    }
}

/// Walls dual to edges leaving `y` in the patch.
pub fn bounding_walls_in<P: Patch>(patch: &P, y: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &v in y {
        for (u, w) in patch.labelled_neighbors(v) {
            if !y.contains(&u) {
                out.insert(w);
            }
        }
    }
    out
}

/// Whitehead complex of a vertex set of a patch.
pub fn whitehead_in<P: Patch>(patch: &P, y: &BTreeSet<usize>) -> WhiteheadComplex {
    let bounding = bounding_walls_in(patch, y);
    let mut edges = Vec::new();
    let mut stabilized = true;
    for &w in &bounding {
        for (other, depth) in patch.crossings(w) {
            if other > w && bounding.contains(&other) {
                edges.push((w, other));
                stabilized &= depth < patch.radius();
            }
        }
    }
    let mut complex = flag_complete(bounding.iter().copied(), edges);
    for &w in &bounding {
        complex.set_label(w, format!("w{w}"));
    }
    WhiteheadComplex {
        complex,
        search_radius: patch.radius(),
        stabilized,
    }
}

fn require_margin(y: &ConvexSubcomplex) -> Result<(), WhiteheadError> {
    if y.is_empty() {
        return Err(WhiteheadError::Empty);
    }
    if y.margin < REQUIRED_MARGIN {
        return Err(WhiteheadError::InsufficientMargin {
            margin: y.margin,
            required: REQUIRED_MARGIN,
        });
    }
    Ok(())
}

fn vertex_set(y: &ConvexSubcomplex) -> BTreeSet<usize> {
    y.vertices.iter().copied().collect()
}

/// Walls disjoint from `y` whose carrier meets `y`, increasing.
pub fn bounding_walls(ball: &CoverBall, y: &ConvexSubcomplex) -> Result<Vec<usize>, WhiteheadError> {
    require_margin(y)?;
    Ok(bounding_walls_in(ball, &vertex_set(y)).into_iter().collect())
}

/// Walls with edges inside `y`, increasing.
pub fn crossing_walls(ball: &CoverBall, y: &ConvexSubcomplex) -> Vec<usize> {
    let set = vertex_set(y);
    let mut out = BTreeSet::new();
    for &v in &set {
        for (u, e) in ball.neighbors(v) {
            if set.contains(&u) {
                out.insert(ball.edges()[e].wall);
            }
        }
    }
    out.into_iter().collect()
}

pub fn whitehead_complex(ball: &CoverBall, y: &ConvexSubcomplex) -> Result<WhiteheadComplex, WhiteheadError> {
    require_margin(y)?;
    Ok(whitehead_in(ball, &vertex_set(y)))
}

/// `H_Y`: the edges of a bounding wall `H` touching `Y`, with the side of
/// `H` that contains `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperplaneComponent {
    pub wall: usize,
    /// Ball edges dual to `wall` with an endpoint in `Y`, increasing.
    pub edges: Vec<usize>,
    /// Endpoint in `Y` of each edge, in the same order.
    pub inner_ends: Vec<usize>,
    /// Endpoint outside `Y` of each edge.
    pub outer_ends: Vec<usize>,
    pub orientation: Side,
}

pub fn hyperplane_component(
    ball: &CoverBall,
    y: &ConvexSubcomplex,
    wall: usize,
) -> Result<HyperplaneComponent, WhiteheadError> {
    require_margin(y)?;
    let set = vertex_set(y);
    if !bounding_walls_in(ball, &set).contains(&wall) {
        return Err(WhiteheadError::NotBounding(wall));
    }
    let mut edges = Vec::new();
    let mut inner_ends = Vec::new();
    let mut outer_ends = Vec::new();
    for &e in &ball.walls()[wall].edges {
        let [a, b] = ball.edges()[e].ends;
        if set.contains(&a) {
            edges.push(e);
            inner_ends.push(a);
            outer_ends.push(b);
        } else if set.contains(&b) {
            edges.push(e);
            inner_ends.push(b);
            outer_ends.push(a);
        }
    }
    let orientation = ball.side(wall, inner_ends[0]);
    Ok(HyperplaneComponent {
        wall,
        edges,
        inner_ends,
        outer_ends,
        orientation,
    })
}

/// `Wh_H(K)` computed inside the wall patch of `H`.
pub fn component_whitehead(ball: &CoverBall, k: &HyperplaneComponent) -> WhiteheadComplex {
    let patch = WallPatch::new(ball, k.wall);
    whitehead_in(&patch, &k.edges.iter().copied().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkCheck {
    /// `Lk_{Wh(Y)}(H)`.
    pub link: SimplicialComplex,
    /// `Wh_H(H_Y)`.
    pub component: WhiteheadComplex,
    pub isomorphic: bool,
    pub stabilized: bool,
}

/// Computes `Lk_{Wh(Y)}(H)` and `Wh_H(H_Y)` independently and compares
/// them by a label-preserving isomorphism (`K ↦ H ∩ K` keeps wall ids).
pub fn wh_link_check(ball: &CoverBall, y: &ConvexSubcomplex, wall: usize) -> Result<LinkCheck, WhiteheadError> {
    let wh = whitehead_complex(ball, y)?;
    let k = hyperplane_component(ball, y, wall)?;
    let link = wh.complex.vertex_link(wall);
    let component = component_whitehead(ball, &k);
    let isomorphic = isomorphism(&link, &component.complex, true).is_some();
    Ok(LinkCheck {
        stabilized: wh.stabilized && component.stabilized,
        link,
        component,
        isomorphic,
    })
}

/// Splits `Y` along a wall crossing it into the parts on the
/// basepoint side and the far side.
pub fn cut_subcomplex(
    ball: &CoverBall,
    y: &ConvexSubcomplex,
    wall: usize,
) -> Result<(ConvexSubcomplex, ConvexSubcomplex), WhiteheadError> {
    if !crossing_walls(ball, y).contains(&wall) {
        return Err(WhiteheadError::NotCrossing(wall));
    }
    let (minus, plus): (Vec<usize>, Vec<usize>) =
        y.vertices.iter().partition(|&&v| ball.side(wall, v) == Side::Minus);
    Ok((ball.subcomplex(minus), ball.subcomplex(plus)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectedSumCheck {
    pub whole: WhiteheadComplex,
    pub minus: WhiteheadComplex,
    pub plus: WhiteheadComplex,
    pub sum: SimplicialComplex,
    pub isomorphic: bool,
    pub stabilized: bool,
}

/// Compares `Wh(Y)` with `Wh(Y₁) #_H Wh(Y₂)`, gluing along the identity
/// on wall ids of the two copies of `Lk(H)`.
pub fn connected_sum_check(
    ball: &CoverBall,
    y: &ConvexSubcomplex,
    wall: usize,
) -> Result<ConnectedSumCheck, WhiteheadError> {
    let (y1, y2) = cut_subcomplex(ball, y, wall)?;
    let whole = whitehead_complex(ball, y)?;
    let minus = whitehead_complex(ball, &y1)?;
    let plus = whitehead_complex(ball, &y2)?;
    let phi: BTreeMap<usize, usize> = minus.complex.vertex_link(wall).vertices().map(|v| (v, v)).collect();
    let (sum, _) = SimplicialComplex::connected_sum(&minus.complex, wall, &plus.complex, wall, &phi)?;
    let isomorphic = isomorphism(&sum, &whole.complex, true).is_some();
    Ok(ConnectedSumCheck {
        stabilized: whole.stabilized && minus.stabilized && plus.stabilized,
        whole,
        minus,
        plus,
        sum,
        isomorphic,
    })
}

/// Number of components of the ball minus `Y`, restricted to vertices of
/// depth at most `depth_limit`.
pub fn complement_components(ball: &CoverBall, y: &ConvexSubcomplex, depth_limit: usize) -> usize {
    let set = vertex_set(y);
    let mut seen = vec![false; ball.num_vertices()];
    let mut count = 0;
    for start in 0..ball.num_vertices() {
        if seen[start] || set.contains(&start) || ball.depth(start) > depth_limit {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for (u, _) in ball.neighbors(x) {
                if !seen[u] && !set.contains(&u) && ball.depth(u) <= depth_limit {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    count
}
