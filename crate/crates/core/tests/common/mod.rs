#![allow(dead_code)]

use cubecut::corpus;
use cubecut::cover::{ConvexSubcomplex, CoverBall};
use cubecut::cube_complex::CubeComplex;
use cubecut::words::{double_complex, mapping_cylinder_complex, CyclicWord};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const W: &str = "ababbabbb";
pub const W_PRIME: &str = "aBaab";

pub fn word(s: &str) -> CyclicWord {
    CyclicWord::parse(s, Some(2)).unwrap()
}

/// NPC corpus entries plus the complexes built from words.
pub fn npc_corpus() -> Vec<(String, CubeComplex)> {
    let mut out: Vec<(String, CubeComplex)> = corpus::NAMES
        .iter()
        .map(|&n| (n.to_string(), corpus::by_name(n).unwrap()))
        .filter(|(_, x)| x.is_npc())
        .collect();
    for w in [W, W_PRIME, "ab"] {
        out.push((format!("double({w})"), double_complex(&word(w))));
        out.push((format!("cylinder({w})"), mapping_cylinder_complex(&word(w))));
    }
    out
}

/// Balls used by the randomized suites, kept small enough for debug builds.
pub fn suite_balls() -> Vec<(String, CoverBall)> {
    let specs: Vec<(String, CubeComplex, usize)> = vec![
        ("torus".into(), corpus::torus(), 6),
        ("three-torus".into(), corpus::three_torus(), 4),
        ("rose2".into(), corpus::rose(2), 4),
        ("torus-wedge-circle".into(), corpus::torus_wedge_circle(), 4),
        ("double(w')".into(), double_complex(&word(W_PRIME)), 3),
        ("cylinder(w')".into(), mapping_cylinder_complex(&word(W_PRIME)), 4),
    ];
    specs
        .into_iter()
        .map(|(n, x, r)| (n, CoverBall::develop(&x, 0, r).unwrap()))
        .collect()
}

pub fn vertices_up_to(ball: &CoverBall, depth: usize) -> Vec<usize> {
    (0..ball.num_vertices()).filter(|&v| ball.depth(v) <= depth).collect()
}

/// Hull of one to three random vertices, keeping margin at least `margin`.
pub fn random_hull(ball: &CoverBall, rng: &mut ChaCha8Rng, margin: usize) -> Option<ConvexSubcomplex> {
    let pool = vertices_up_to(ball, ball.radius().checked_sub(margin)?);
    let n = rng.gen_range(1..=3);
    let gens: Vec<usize> = (0..n).map(|_| *pool.choose(rng).unwrap()).collect();
    let y = ball.convex_hull(&gens).ok()?;
    (y.margin >= margin).then_some(y)
}
