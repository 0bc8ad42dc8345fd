//! Small named complexes used in examples and tests.

use crate::cube_complex::{CubeComplex, CubeComplexBuilder, FaceGluing, SignedEdge};

fn fwd(e: usize) -> SignedEdge {
    SignedEdge::new(e, true)
}

fn inv(e: usize) -> SignedEdge {
    SignedEdge::new(e, false)
}

/// Letter names `a, b, c, ...` for generators.
pub fn letter(i: usize) -> String {
    assert!(i < 26, "at most 26 generators have letter names");
    ((b'a' + i as u8) as char).to_string()
}

fn torus_builder() -> (CubeComplexBuilder, usize) {
    let mut b = CubeComplexBuilder::new();
    let v = b.vertex("v");
    let a = b.edge("a", v, v);
    let bb = b.edge("b", v, v);
    b.square("s", [fwd(a), fwd(bb), inv(a), inv(bb)]);
    (b, v)
}

/// One vertex, edges `a`, `b`, square `a b a⁻¹ b⁻¹`.
pub fn torus() -> CubeComplex {
    torus_builder().0.build().expect("torus is valid")
}

/// One vertex, three loops, three commutator squares and one 3-cube.
pub fn three_torus() -> CubeComplex {
    let mut b = CubeComplexBuilder::new();
    let v = b.vertex("v");
    let e: Vec<usize> = (0..3).map(|i| b.edge(letter(i), v, v)).collect();
    let sq = |b: &mut CubeComplexBuilder, x: usize, y: usize| {
        let id = format!("s{}{}", letter(x), letter(y));
        b.square(id, [fwd(e[x]), fwd(e[y]), inv(e[x]), inv(e[y])])
    };
    let bc = sq(&mut b, 1, 2);
    let ac = sq(&mut b, 0, 2);
    let ab = sq(&mut b, 0, 1);
    let face = |square, alignment| FaceGluing { square, alignment };
    b.cube(
        "c",
        [
            face(bc, [2, 3]),
            face(bc, [2, 3]),
            face(ac, [1, 3]),
            face(ac, [1, 3]),
            face(ab, [1, 2]),
            face(ab, [1, 2]),
        ],
    );
    b.build().expect("3-torus is valid")
}

/// One vertex and `n` loops `a, b, ...`.
pub fn rose(n: usize) -> CubeComplex {
    let mut b = CubeComplexBuilder::new();
    let v = b.vertex("v");
    for i in 0..n {
        b.edge(letter(i), v, v);
    }
    b.build().expect("rose is valid")
}

/// Torus with an interval `i` hanging off its vertex.
pub fn torus_wedge_interval() -> CubeComplex {
    let (mut b, v) = torus_builder();
    let u = b.vertex("u");
    b.edge("i", v, u);
    b.build().expect("valid")
}

/// Torus with an extra loop `c` at its vertex.
pub fn torus_wedge_circle() -> CubeComplex {
    let (mut b, v) = torus_builder();
    b.edge("c", v, v);
    b.build().expect("valid")
}

/// Boundary of a 3-cube: every vertex link is a hollow triangle.
pub fn cube_surface() -> CubeComplex {
    let mut b = CubeComplexBuilder::new();
    let vs: Vec<usize> = (0..8).map(|c| b.vertex(format!("{c:03b}"))).collect();
    // edge along `axis` from corner `base` (bit `axis` clear)
    let mut edge = std::collections::BTreeMap::new();
    for axis in 0..3 {
        for base in 0..8usize {
            if base >> axis & 1 == 0 {
                let id = b.edge(format!("e{axis}:{base:03b}"), vs[base], vs[base | 1 << axis]);
                edge.insert((axis, base), id);
            }
        }
    }
    for normal in 0..3 {
        let (x, y) = match normal {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for level in 0..2 {
            let o = level << normal;
            let c10 = o | 1 << x;
            let c01 = o | 1 << y;
            b.square(
                format!("f{normal}:{level}"),
                [
                    fwd(edge[&(x, o)]),
                    fwd(edge[&(y, c10)]),
                    inv(edge[&(x, c01)]),
                    inv(edge[&(y, o)]),
                ],
            );
        }
    }
    b.build().expect("valid")
}

/// Planar `m × n` rectangle of unit squares. Vertex `"x,y"`, horizontal
/// edge `"hx,y"` from `(x,y)` to `(x+1,y)`, vertical edge `"vx,y"` from
/// `(x,y)` to `(x,y+1)`, square `"sx,y"` with lower-left corner `(x,y)`.
pub fn grid(m: usize, n: usize) -> CubeComplex {
    let mut b = CubeComplexBuilder::new();
    let idx = |x: usize, y: usize| y * (m + 1) + x;
    for y in 0..=n {
        for x in 0..=m {
            b.vertex(format!("{x},{y}"));
        }
    }
    let mut h = std::collections::BTreeMap::new();
    let mut v = std::collections::BTreeMap::new();
    for y in 0..=n {
        for x in 0..m {
            h.insert((x, y), b.edge(format!("h{x},{y}"), idx(x, y), idx(x + 1, y)));
        }
    }
    for y in 0..n {
        for x in 0..=m {
            v.insert((x, y), b.edge(format!("v{x},{y}"), idx(x, y), idx(x, y + 1)));
        }
    }
    for y in 0..n {
        for x in 0..m {
            b.square(
                format!("s{x},{y}"),
                [fwd(h[&(x, y)]), fwd(v[&(x + 1, y)]), inv(h[&(x, y + 1)]), inv(v[&(x, y)])],
            );
        }
    }
    b.build().expect("grid is valid")
}

/// Named corpus entries.
pub fn by_name(name: &str) -> Option<CubeComplex> {
    Some(match name {
        "torus" => torus(),
        "three-torus" => three_torus(),
        "rose2" => rose(2),
        "rose3" => rose(3),
        "torus-wedge-interval" => torus_wedge_interval(),
        "torus-wedge-circle" => torus_wedge_circle(),
        "cube-surface" => cube_surface(),
        _ => return None,
    })
}

pub const NAMES: &[&str] = &[
    "torus",
    "three-torus",
    "rose2",
    "rose3",
    "torus-wedge-interval",
    "torus-wedge-circle",
    "cube-surface",
];
