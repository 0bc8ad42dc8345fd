//! Words in free groups: classical Whitehead graphs, the Shenitzer test,
//! automorphisms and the square complexes built from a word.
//!
//! Letters are nonzero integers: `i + 1` is the `i`-th generator, `-(i + 1)`
//! its inverse. Text uses lowercase for generators and uppercase for
//! inverses (`abAB`), optionally space separated.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::letter;
use crate::cube_complex::{CubeComplex, CubeComplexBuilder, SignedEdge};
use crate::simplicial::SimplicialComplex;

pub type Letter = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("empty word")]
    Empty,
    #[error("invalid letter {0:?}")]
    BadLetter(char),
    #[error("letter {letter} exceeds rank {rank}")]
    RankTooSmall { letter: String, rank: usize },
    #[error("word is not cyclically reduced: {0}")]
    NotReduced(String),
    #[error("image of {0} is missing")]
    MissingImage(String),
    #[error("images do not define an automorphism: {0}")]
    NotAutomorphism(String),
}

fn letter_index(l: Letter) -> usize {
    l.unsigned_abs() as usize - 1
}

fn letter_text(l: Letter) -> String {
    let s = letter(letter_index(l));
    if l > 0 {
        s
    } else {
        s.to_uppercase()
    }
}

/// Free reduction of a letter sequence.
pub fn reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free and then cyclic reduction.
pub fn cyclically_reduce(word: &[Letter]) -> Vec<Letter> {
    let w = reduce(word);
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == -w[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

pub fn inverse(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|l| -l).collect()
}

/// Parses `abAB`, `a b A B` or the empty string into letters.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>, WordError> {
    let mut out = Vec::new();
    for c in text.chars() {
        if c.is_whitespace() {
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(WordError::BadLetter(c));
        }
        let i = (c.to_ascii_lowercase() as u8 - b'a') as Letter + 1;
        out.push(if c.is_ascii_lowercase() { i } else { -i });
    }
    Ok(out)
}

pub fn format_letters(word: &[Letter]) -> String {
    word.iter().map(|&l| letter_text(l)).collect()
}

/// Exponent-sum vector of a word.
pub fn abelianize(word: &[Letter], rank: usize) -> Vec<i64> {
    let mut v = vec![0; rank];
    for &l in word {
        v[letter_index(l)] += l.signum() as i64;
    }
    v
}

/// A nonempty cyclically reduced word over a basis of given rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CyclicWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn new(letters: Vec<Letter>, rank: usize) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        if let Some(&l) = letters.iter().find(|&&l| l == 0 || letter_index(l) >= rank) {
            return Err(WordError::RankTooSmall {
                letter: if l == 0 { "0".into() } else { letter_text(l) },
                rank,
            });
        }
        if cyclically_reduce(&letters) != letters {
            return Err(WordError::NotReduced(format_letters(&letters)));
        }
        Ok(CyclicWord { rank, letters })
    }

    /// Parses a word; the rank defaults to the largest letter used.
    pub fn parse(text: &str, rank: Option<usize>) -> Result<Self, WordError> {
        let letters = parse_letters(text)?;
        let used = letters.iter().map(|&l| letter_index(l) + 1).max().unwrap_or(0);
        Self::new(letters, rank.unwrap_or(used))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn abelianization(&self) -> Vec<i64> {
        abelianize(&self.letters, self.rank)
    }

    /// Same word up to rotation.
    pub fn is_conjugate(&self, other: &CyclicWord) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let n = self.len();
        (0..n).any(|r| (0..n).all(|i| self.letters[(i + r) % n] == other.letters[i]))
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.letters))
    }
}

/// Vertex `2i` is the generator `x_i`, vertex `2i + 1` its inverse.
pub fn vertex_of(l: Letter) -> usize {
    2 * letter_index(l) + usize::from(l < 0)
}

pub fn vertex_label(v: usize) -> String {
    let l = (v / 2 + 1) as Letter;
    letter_text(if v % 2 == 0 { l } else { -l })
}

/// Multigraph on `{x_i, x_i⁻¹}`; loops are not possible for reduced words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multigraph {
    pub rank: usize,
    /// One entry per cyclic position, endpoints in increasing order.
    pub edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn num_vertices(&self) -> usize {
        2 * self.rank
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum()
    }

    /// Edge multiplicities keyed by endpoint pair.
    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for &e in &self.edges {
            *out.entry(e).or_insert(0) += 1;
        }
        out
    }

    /// Edges as labelled pairs, e.g. `("A", "b")`, with multiplicities.
    pub fn labelled_edges(&self) -> Vec<(String, String, usize)> {
        self.multiplicities()
            .into_iter()
            .map(|((a, b), m)| (vertex_label(a), vertex_label(b), m))
            .collect()
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n");
        for v in 0..self.num_vertices() {
            s.push_str(&format!("  {v} [label=\"{}\"];\n", vertex_label(v)));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("  {a} -- {b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// One edge `{x⁻¹, y}` for each cyclically consecutive pair `xy` of `w`.
pub fn whitehead_graph(w: &CyclicWord) -> Multigraph {
    let n = w.len();
    let edges = (0..n)
        .map(|i| {
            let a = vertex_of(-w.letters[i]);
            let b = vertex_of(w.letters[(i + 1) % n]);
            (a.min(b), a.max(b))
        })
        .collect();
    Multigraph { rank: w.rank, edges }
}

/// First subdivision: vertices `0..2n` as in the graph, then one midpoint
/// per edge in edge order.
pub fn subdivide(g: &Multigraph) -> SimplicialComplex {
    let base = g.num_vertices();
    let mut cx = SimplicialComplex::new();
    for v in 0..base {
        cx.add_vertex(v);
        cx.set_label(v, vertex_label(v));
    }
    for (k, &(a, b)) in g.edges.iter().enumerate() {
        let m = base + k;
        cx.add_vertex(m);
        cx.add_simplex(&[a, m]).expect("distinct vertices");
        cx.add_simplex(&[b, m]).expect("distinct vertices");
        cx.set_label(m, format!("m{k}"));
    }
    cx
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ShenitzerVerdict {
    NoFreeSplitting,
    Inconclusive { reason: ShenitzerReason },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShenitzerReason {
    /// Vertex labels of each component of the subdivided graph.
    Disconnected { components: Vec<Vec<String>> },
    /// A cut vertex of the subdivided graph; midpoints stand for bridges.
    CutVertex { vertex: String },
}

pub fn shenitzer_test(w: &CyclicWord) -> ShenitzerVerdict {
    let sd = subdivide(&whitehead_graph(w));
    let label = |v: usize| sd.label(v).unwrap_or_default().to_string();
    if !sd.is_connected() {
        let components = sd
            .components()
            .into_iter()
            .map(|c| c.into_iter().map(label).collect())
            .collect();
        return ShenitzerVerdict::Inconclusive {
            reason: ShenitzerReason::Disconnected { components },
        };
    }
    match sd.cut_sets_of_size(1, true).first() {
        Some(cut) => ShenitzerVerdict::Inconclusive {
            reason: ShenitzerReason::CutVertex { vertex: label(cut[0]) },
        },
        None => ShenitzerVerdict::NoFreeSplitting,
    }
}

/// Images of the basis, indexed by generator.
pub type Images = Vec<Vec<Letter>>;

/// Parses `a=aBB,b=b` style images.
pub fn parse_images(text: &str, rank: usize) -> Result<Images, WordError> {
    let mut images: Vec<Option<Vec<Letter>>> = vec![None; rank];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lhs, rhs) = part.split_once('=').ok_or(WordError::BadLetter('='))?;
        let src = parse_letters(lhs)?;
        let [g] = src[..] else {
            return Err(WordError::NotAutomorphism(format!("bad source {lhs:?}")));
        };
        if g < 0 || letter_index(g) >= rank {
            return Err(WordError::RankTooSmall { letter: letter_text(g), rank });
        }
        images[letter_index(g)] = Some(parse_letters(rhs)?);
    }
    images
        .into_iter()
        .enumerate()
        .map(|(i, im)| im.ok_or_else(|| WordError::MissingImage(letter(i))))
        .collect()
}

fn det(m: &[Vec<i64>]) -> i64 {
    // Bareiss elimination is overkill at these sizes; cofactor expansion.
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// A pair generates F2 iff its commutator is conjugate to `[a, b]^{±1}`.
fn commutator_is_basic(u: &[Letter], v: &[Letter]) -> bool {
    let c = cyclically_reduce(&[u.to_vec(), v.to_vec(), inverse(u), inverse(v)].concat());
    let Ok(c) = CyclicWord::new(c, 2) else { return false };
    [[1, 2, -1, -2], [2, 1, -2, -1]]
        .iter()
        .any(|k| c.is_conjugate(&CyclicWord { rank: 2, letters: k.to_vec() }))
}

/// Checks that `images` define an automorphism of the free group of the
/// given rank. Exact for ranks 1 and 2; higher ranks only get the determinant check.
pub fn check_automorphism(images: &Images, rank: usize) -> Result<(), WordError> {
    if images.len() != rank {
        return Err(WordError::NotAutomorphism(format!("{} images for rank {rank}", images.len())));
    }
    for im in images {
        if reduce(im) != *im {
            return Err(WordError::NotReduced(format_letters(im)));
        }
        if let Some(&l) = im.iter().find(|&&l| letter_index(l) >= rank) {
            return Err(WordError::RankTooSmall { letter: letter_text(l), rank });
        }
    }
    let m: Vec<Vec<i64>> = images.iter().map(|im| abelianize(im, rank)).collect();
    let d = det(&m);
    if d.abs() != 1 {
        return Err(WordError::NotAutomorphism(format!("abelianization has determinant {d}")));
    }
    if rank == 2 && !commutator_is_basic(&images[0], &images[1]) {
        return Err(WordError::NotAutomorphism("commutator of the images is not conjugate to [a,b]^±1".into()));
    }
    Ok(())
}

/// Applies the automorphism and cyclically reduces the result.
pub fn apply_automorphism(w: &CyclicWord, images: &Images) -> Result<CyclicWord, WordError> {
    check_automorphism(images, w.rank)?;
    let mut out = Vec::new();
    for &l in &w.letters {
        let im = &images[letter_index(l)];
        if l > 0 {
            out.extend_from_slice(im);
        } else {
            out.extend(inverse(im));
        }
    }
    CyclicWord::new(cyclically_reduce(&out), w.rank)
}

fn signed(e: usize, l: Letter) -> SignedEdge {
    SignedEdge::new(e, l > 0)
}

/// Two roses `u1`, `u2` joined by a cylinder of `ℓ` squares whose boundary
/// circles read `w` in each rose. Edges `a1, b1, ..`, `a2, b2, ..`, then
/// vertical edges `t0, ..` from `u1` to `u2`; square `s{i}` reads
/// `w_i t_{i+1} w_i⁻¹ t_i⁻¹`.
pub fn double_complex(w: &CyclicWord) -> CubeComplex {
    let mut b = CubeComplexBuilder::new();
    let u1 = b.vertex("u1");
    let u2 = b.vertex("u2");
    let r1: Vec<usize> = (0..w.rank).map(|i| b.edge(format!("{}1", letter(i)), u1, u1)).collect();
    let r2: Vec<usize> = (0..w.rank).map(|i| b.edge(format!("{}2", letter(i)), u2, u2)).collect();
    let n = w.len();
    let t: Vec<usize> = (0..n).map(|i| b.edge(format!("t{i}"), u1, u2)).collect();
    for (i, &l) in w.letters.iter().enumerate() {
        let g = letter_index(l);
        b.square(
            format!("s{i}"),
            [
                signed(r1[g], l),
                SignedEdge::new(t[(i + 1) % n], true),
                signed(r2[g], -l),
                SignedEdge::new(t[i], false),
            ],
        );
    }
    b.build().expect("double complex is valid")
}

/// Mapping cylinder of the immersion of a circle reading `w` into a rose.
/// Rose vertex `u` with loops `a, b, ..`; circle vertices `c0, ..` with
/// edges `e{i}` from `c{i}` to `c{i+1}`; vertical edges `t{i}` from `c{i}`
/// to `u`.
pub fn mapping_cylinder_complex(w: &CyclicWord) -> CubeComplex {
    let mut b = CubeComplexBuilder::new();
    let u = b.vertex("u");
    let rose: Vec<usize> = (0..w.rank).map(|i| b.edge(letter(i), u, u)).collect();
    let n = w.len();
    let c: Vec<usize> = (0..n).map(|i| b.vertex(format!("c{i}"))).collect();
    let e: Vec<usize> = (0..n).map(|i| b.edge(format!("e{i}"), c[i], c[(i + 1) % n])).collect();
    let t: Vec<usize> = (0..n).map(|i| b.edge(format!("t{i}"), c[i], u)).collect();
    for (i, &l) in w.letters.iter().enumerate() {
        b.square(
            format!("s{i}"),
            [
                SignedEdge::new(e[i], true),
                SignedEdge::new(t[(i + 1) % n], true),
                signed(rose[letter_index(l)], -l),
                SignedEdge::new(t[i], false),
            ],
        );
    }
    b.build().expect("mapping cylinder is valid")
}
