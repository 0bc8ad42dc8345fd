mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cubecut::corpus;
use cubecut::cover::{CoverBall, CoverError};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_hull, suite_balls, vertices_up_to};

/// Closure of `set` under geodesic intervals, by brute force over BFS rows.
fn interval_closure(ball: &CoverBall, set: &[usize]) -> BTreeSet<usize> {
    let mut hull: BTreeSet<usize> = set.iter().copied().collect();
    let mut rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    loop {
        let members: Vec<usize> = hull.iter().copied().collect();
        for &u in &members {
            rows.entry(u).or_insert_with(|| ball.bfs_distances(u));
        }
        let mut grown = hull.clone();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                let d = rows[&u][v];
                grown.extend((0..ball.num_vertices()).filter(|&x| rows[&u][x] + rows[&v][x] == d));
            }
        }
        if grown == hull {
            return hull;
        }
        hull = grown;
    }
}

fn components_without(ball: &CoverBall, keep: &BTreeSet<usize>, cut_edges: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in keep {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for (y, e) in ball.neighbors(x) {
                if keep.contains(&y) && !cut_edges.contains(&e) && seen.insert(y) {
                    comp.insert(y);
                    queue.push_back(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_matches_interval_closure(seed in any::<u64>()) {
        let balls = suite_balls();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, ball) = &balls[(seed % balls.len() as u64) as usize];
        if let Some(y) = random_hull(ball, &mut rng, 1) {
            let oracle: Vec<usize> = interval_closure(ball, &y.vertices).into_iter().collect();
            prop_assert_eq!(&y.vertices, &oracle);
        }
    }

    #[test]
    fn hull_is_a_closure_operator(seed in any::<u64>()) {
        let balls = suite_balls();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, ball) = &balls[(seed % balls.len() as u64) as usize];
        let (Some(y), Some(z)) = (random_hull(ball, &mut rng, 1), random_hull(ball, &mut rng, 1)) else { return Ok(()) };
        prop_assert!(ball.is_convex(&y.vertices));
        prop_assert_eq!(ball.convex_hull(&y.vertices).unwrap(), y.clone());
        let union: Vec<usize> = y.vertices.iter().chain(&z.vertices).copied().collect();
        match ball.convex_hull(&union) {
            Ok(big) => {
                prop_assert!(y.vertices.iter().all(|v| big.contains(*v)));
                prop_assert!(z.vertices.iter().all(|v| big.contains(*v)));
            }
            Err(CoverError::BoundaryTouched(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn distance_counts_separating_walls(seed in any::<u64>()) {
        let balls = suite_balls();
        let (_, ball) = &balls[(seed % balls.len() as u64) as usize];
        let pool = vertices_up_to(ball, ball.radius() - 1);
        let u = pool[(seed / 7) as usize % pool.len()];
        let v = pool[(seed / 1031) as usize % pool.len()];
        let walls = ball.separating_walls(u, v).unwrap();
        prop_assert_eq!(walls.len(), ball.bfs_distances(u)[v]);
        prop_assert_eq!(ball.l1_distance(u, v).unwrap(), walls.len());
        for w in walls {
            prop_assert_ne!(ball.side(w, u), ball.side(w, v));
        }
    }
}

#[test]
fn each_wall_has_two_sides() {
    for (name, ball) in suite_balls() {
        let all: BTreeSet<usize> = (0..ball.num_vertices()).collect();
        let interior: BTreeSet<usize> = (0..ball.num_vertices()).filter(|&v| ball.is_interior(v)).collect();
        for wall in ball.walls() {
            let cut: BTreeSet<usize> = wall.edges.iter().copied().collect();
            assert_eq!(components_without(&ball, &all, &cut).len(), 2, "{name}: wall {}", wall.id);
            let meets_interior =
                wall.edges.iter().any(|&e| ball.edges()[e].ends.iter().all(|&v| ball.is_interior(v)));
            if !meets_interior {
                continue;
            }
            let comps = components_without(&ball, &interior, &cut);
            assert_eq!(comps.len(), 2, "{name}: wall {}", wall.id);
            for comp in comps {
                let sides: BTreeSet<_> = comp.iter().map(|&v| ball.side(wall.id, v)).collect();
                assert_eq!(sides.len(), 1, "{name}: wall {} side not constant", wall.id);
            }
        }
    }
}

#[test]
fn development_is_radius_monotone() {
    for x in [corpus::torus(), corpus::rose(2), corpus::three_torus(), corpus::torus_wedge_circle()] {
        let big = CoverBall::develop(&x, 0, 4).unwrap();
        for r in 0..4 {
            let small = CoverBall::develop(&x, 0, r).unwrap();
            let key = |b: &CoverBall, v: usize| (b.vertex(v).nf.clone(), b.proj(v));
            let a: BTreeSet<_> = (0..small.num_vertices()).map(|v| key(&small, v)).collect();
            let b: BTreeSet<_> = (0..big.num_vertices()).filter(|&v| big.depth(v) <= r).map(|v| key(&big, v)).collect();
            assert_eq!(a, b, "radius {r}");
        }
    }
}

#[test]
fn ball_sizes() {
    assert_eq!(CoverBall::develop(&corpus::torus(), 0, 2).unwrap().num_vertices(), 13);
    assert_eq!(CoverBall::develop(&corpus::rose(2), 0, 2).unwrap().num_vertices(), 17);
    assert_eq!(CoverBall::develop(&corpus::three_torus(), 0, 1).unwrap().num_vertices(), 7);
}

#[test]
fn grid_metric_examples() {
    let ball = CoverBall::develop(&corpus::torus(), 0, 6).unwrap();
    let at = |w: &str| ball.follow(&ball.parse_word(w).unwrap()).unwrap();
    let (o, d, e2) = (at(""), at("ab"), at("aa"));
    assert_eq!(ball.l1_distance(o, d).unwrap(), 2);
    assert_eq!(ball.separating_walls(o, e2).unwrap().len(), 2);
    assert!(ball.separating_walls(o, o).unwrap().is_empty());
    // hull of opposite corners is the unit square
    assert_eq!(ball.convex_hull(&[o, d]).unwrap().len(), 4);
    // a 2x1 and a 1x2 rectangle are convex; their union, an L of three
    // squares, is not and its hull is the 2x2 block
    let wide: Vec<usize> = ["", "a", "aa", "b", "ab", "aab"].iter().map(|w| at(w)).collect();
    let tall: Vec<usize> = ["", "a", "b", "ab", "bb", "abb"].iter().map(|w| at(w)).collect();
    assert!(ball.is_convex(&wide));
    let mut bent = wide.clone();
    bent.extend(tall);
    bent.sort();
    bent.dedup();
    assert!(!ball.is_convex(&bent));
    assert_eq!(ball.convex_hull(&bent).unwrap().len(), 9);
    // two edges turning a corner
    let corner = [at("a"), at(""), at("b")];
    assert!(!ball.is_convex(&corner));
    assert_eq!(ball.convex_hull(&corner).unwrap().len(), 4);
    // far apart at small radius
    let small = CoverBall::develop(&corpus::torus(), 0, 2).unwrap();
    let p = small.follow(&small.parse_word("a").unwrap()).unwrap();
    let q = small.follow(&small.parse_word("b").unwrap()).unwrap();
    let r = small.follow(&small.parse_word("A").unwrap()).unwrap();
    assert!(matches!(small.convex_hull(&[p, q, r]), Err(CoverError::BoundaryTouched(_))));
}
