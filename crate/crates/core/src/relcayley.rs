//! Paths in the relative Cayley graph `Cayley(G, X u H~)`.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, Factor, GroupSpec, Syllable, XLetter};

/// Label of one edge: an `X`-letter, or a nontrivial element of a peripheral
/// factor used as a letter of `H~`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    X(XLetter),
    H { factor: usize, vector: Vec<i64> },
}

impl EdgeTag {
    pub fn peripheral(factor: usize, vector: Vec<i64>) -> Result<EdgeTag> {
        if vector.iter().all(|&c| c == 0) {
            return Err(Error::InvalidSpec("peripheral edge labels must be nontrivial".into()));
        }
        Ok(EdgeTag::H { factor, vector })
    }

    pub fn syllable(&self, g: &GroupSpec) -> Syllable {
        match self {
            EdgeTag::X(x) => g.letter_syllable(*x),
            EdgeTag::H { factor, vector } => Syllable::Peripheral {
                factor: *factor,
                vector: vector.clone(),
            },
        }
    }

    pub fn element(&self, g: &GroupSpec) -> Element {
        Element::from_syllables([self.syllable(g)])
    }

    pub fn h_factor(&self) -> Option<usize> {
        match self {
            EdgeTag::H { factor, .. } => Some(*factor),
            EdgeTag::X(_) => None,
        }
    }

    /// The peripheral factor this edge moves in, whatever its tag.
    pub fn coset_factor(&self) -> Option<usize> {
        match self {
            EdgeTag::H { factor, .. } => Some(*factor),
            EdgeTag::X(x) => match x.generator.factor {
                Factor::Peripheral(i) => Some(i),
                Factor::Free(_) => None,
            },
        }
    }

    pub fn render(&self, g: &GroupSpec) -> String {
        match self {
            EdgeTag::X(x) => {
                let name = g.generator_name(x.generator);
                if x.inverse {
                    format!("{name}^-1")
                } else {
                    name.to_string()
                }
            }
            EdgeTag::H { factor, vector } => {
                let body: Vec<String> = vector.iter().map(i64::to_string).collect();
                format!("H{}({})", factor + 1, body.join(","))
            }
        }
    }
}

/// An edge path starting at `start`; its length is the number of edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelPath {
    pub start: Element,
    pub edges: Vec<EdgeTag>,
}

impl RelPath {
    pub fn new(start: Element) -> Self {
        RelPath {
            start,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(start: Element, edges: Vec<EdgeTag>) -> Self {
        RelPath { start, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The `len() + 1` vertices visited, in order.
    pub fn vertices(&self, g: &GroupSpec) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut v = self.start.clone();
        out.push(v.clone());
        for e in &self.edges {
            v = v.mul(&e.element(g));
            out.push(v.clone());
        }
        out
    }

    pub fn end(&self, g: &GroupSpec) -> Element {
        self.edges
            .iter()
            .fold(self.start.clone(), |v, e| v.mul(&e.element(g)))
    }

    /// Left translate by `by`.
    pub fn translate(&self, by: &Element) -> RelPath {
        RelPath {
            start: by.mul(&self.start),
            edges: self.edges.clone(),
        }
    }

    /// Appends the edges of `other`; its start vertex is ignored.
    pub fn append(&mut self, other: &RelPath) {
        self.edges.extend(other.edges.iter().cloned());
    }

    pub fn subpath(&self, g: &GroupSpec, from: usize, to: usize) -> RelPath {
        let start = self.edges[..from]
            .iter()
            .fold(self.start.clone(), |v, e| v.mul(&e.element(g)));
        RelPath {
            start,
            edges: self.edges[from..to].to_vec(),
        }
    }

    pub fn render(&self, g: &GroupSpec, components: &[HComponent]) -> String {
        let mut parts = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let mut s = String::new();
            if components.iter().any(|c| c.start == i) {
                s.push('[');
            }
            s.push_str(&e.render(g));
            if components.iter().any(|c| c.end == i + 1) {
                s.push(']');
            }
            parts.push(s);
        }
        if parts.is_empty() {
            format!("({})", g.format(&self.start))
        } else {
            parts.join(" ")
        }
    }
}

/// How H-components are delimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentMode {
    /// Maximal runs of `H~_i`-tagged edges.
    #[default]
    Tagged,
    /// Maximal runs of edges moving inside one coset `gA_i`, whatever the tag,
    /// that contain at least one `H~_i` edge.
    Coset,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HComponent {
    pub factor: usize,
    /// Canonical representative of the coset `s_- A_i`.
    pub coset: Element,
    /// Offsets of the first edge and one past the last edge.
    pub start: usize,
    pub end: usize,
    pub s_minus: Element,
    pub s_plus: Element,
}

impl HComponent {
    pub fn x_length(&self) -> u64 {
        self.s_minus.x_distance(&self.s_plus)
    }
}

pub fn decompose_components(g: &GroupSpec, p: &RelPath) -> Vec<HComponent> {
    decompose_components_with(g, p, ComponentMode::Tagged)
}

pub fn decompose_components_with(g: &GroupSpec, p: &RelPath, mode: ComponentMode) -> Vec<HComponent> {
    let verts = p.vertices(g);
    let key = |e: &EdgeTag| match mode {
        ComponentMode::Tagged => e.h_factor(),
        ComponentMode::Coset => e.coset_factor(),
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < p.edges.len() {
        let Some(f) = key(&p.edges[i]) else {
            i += 1;
            continue;
        };
        let mut j = i + 1;
        while j < p.edges.len() && key(&p.edges[j]) == Some(f) {
            j += 1;
        }
        let has_h = p.edges[i..j].iter().any(|e| e.h_factor().is_some());
        if has_h {
            out.push(HComponent {
                factor: f,
                coset: verts[i].strip_trailing(Factor::Peripheral(f)),
                start: i,
                end: j,
                s_minus: verts[i].clone(),
                s_plus: verts[j].clone(),
            });
        }
        i = j;
    }
    out
}

pub fn connected(c1: &HComponent, c2: &HComponent) -> bool {
    c1.factor == c2.factor && c1.coset == c2.coset
}

/// Components connected to no other component of the same list.
pub fn isolated_flags(components: &[HComponent]) -> Vec<bool> {
    let mut count: HashMap<(usize, &Element), usize> = HashMap::new();
    for c in components {
        *count.entry((c.factor, &c.coset)).or_default() += 1;
    }
    components
        .iter()
        .map(|c| count[&(c.factor, &c.coset)] == 1)
        .collect()
}

pub fn is_without_backtracking(g: &GroupSpec, p: &RelPath) -> bool {
    isolated_flags(&decompose_components(g, p))
        .into_iter()
        .all(|b| b)
}

/// Vertices of `p` that are not inner vertices of an H-component.
pub fn phase_vertices(g: &GroupSpec, p: &RelPath) -> Vec<Element> {
    let verts = p.vertices(g);
    let comps = decompose_components(g, p);
    let mut inner = vec![false; verts.len()];
    for c in &comps {
        for flag in &mut inner[c.start + 1..c.end] {
            *flag = true;
        }
    }
    verts
        .into_iter()
        .zip(inner)
        .filter(|(_, i)| !i)
        .map(|(v, _)| v)
        .collect()
}

/// `max{d_X(p_-, q_-), d_X(p_+, q_+)}`.
pub fn k_similarity(g: &GroupSpec, p: &RelPath, q: &RelPath) -> u64 {
    p.start
        .x_distance(&q.start)
        .max(p.end(g).x_distance(&q.end(g)))
}

/// `dist_{X u H~}(1, x)`: one edge per peripheral syllable, `|e|` per free syllable.
pub fn rel_distance(x: &Element) -> u64 {
    x.syllables()
        .iter()
        .map(|s| match s {
            Syllable::Peripheral { .. } => 1,
            Syllable::Free { exponent, .. } => exponent.unsigned_abs(),
        })
        .sum()
}

pub fn rel_dist(x: &Element, y: &Element) -> u64 {
    rel_distance(&x.inverse().mul(y))
}

fn free_edges(generator: usize, exponent: i64) -> impl Iterator<Item = EdgeTag> {
    let letter = XLetter {
        generator: crate::group::Generator {
            factor: Factor::Free(generator),
            coord: 0,
        },
        inverse: exponent < 0,
    };
    std::iter::repeat_n(EdgeTag::X(letter), exponent.unsigned_abs() as usize)
}

/// The X-letter spelling a norm-one peripheral vector.
fn unit_letter(factor: usize, vector: &[i64]) -> Option<XLetter> {
    if vector.iter().map(|c| c.unsigned_abs()).sum::<u64>() != 1 {
        return None;
    }
    let coord = vector.iter().position(|&c| c != 0)?;
    Some(XLetter {
        generator: crate::group::Generator {
            factor: Factor::Peripheral(factor),
            coord,
        },
        inverse: vector[coord] < 0,
    })
}

/// Edge realisations of one syllable as a geodesic segment, `H~` first.
fn syllable_realisations(s: &Syllable) -> Vec<Vec<EdgeTag>> {
    match s {
        Syllable::Peripheral { factor, vector } => {
            let mut out = vec![vec![EdgeTag::H {
                factor: *factor,
                vector: vector.clone(),
            }]];
            if let Some(x) = unit_letter(*factor, vector) {
                out.push(vec![EdgeTag::X(x)]);
            }
            out
        }
        Syllable::Free {
            generator,
            exponent,
        } => vec![free_edges(*generator, *exponent).collect()],
    }
}

/// Number of geodesics from 1 to `x`.
pub fn geodesic_count(x: &Element) -> u64 {
    x.syllables()
        .iter()
        .map(|s| syllable_realisations(s).len() as u64)
        .product()
}

/// Every geodesic from 1 to `x`, in a fixed order.
pub fn rel_geodesics(x: &Element, cap: usize) -> Result<Vec<RelPath>> {
    let count = geodesic_count(x);
    if count > cap as u64 {
        return Err(Error::CapExceeded {
            what: "geodesics",
            requested: count,
            cap: cap as u64,
        });
    }
    let mut paths = vec![Vec::new()];
    for s in x.syllables() {
        let options = syllable_realisations(s);
        let mut next = Vec::with_capacity(paths.len() * options.len());
        for prefix in &paths {
            for opt in &options {
                let mut p: Vec<EdgeTag> = prefix.clone();
                p.extend(opt.iter().cloned());
                next.push(p);
            }
        }
        paths = next;
    }
    Ok(paths
        .into_iter()
        .map(|edges| RelPath::from_edges(Element::identity(), edges))
        .collect())
}

/// The first geodesic in enumeration order: every peripheral syllable as one `H~` edge.
pub fn first_geodesic(x: &Element) -> RelPath {
    let edges = x
        .syllables()
        .iter()
        .flat_map(|s| syllable_realisations(s).swap_remove(0))
        .collect();
    RelPath::from_edges(Element::identity(), edges)
}

/// The geodesic with the fewest H-components: norm-one syllables as X-edges.
pub fn sparse_geodesic(x: &Element) -> RelPath {
    let edges = x
        .syllables()
        .iter()
        .flat_map(|s| syllable_realisations(s).pop().expect("nonempty"))
        .collect();
    RelPath::from_edges(Element::identity(), edges)
}

/// Outcome of a quasi-geodesic test; `witness` is the first violating subpath
/// as edge offsets `[from, to)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiGeodesicCheck {
    pub holds: bool,
    pub witness: Option<(usize, usize)>,
}

/// Checks `l(q) <= lambda * d(q_-, q_+) + c` for every subpath `q` of `p`.
pub fn is_quasigeodesic(
    g: &GroupSpec,
    p: &RelPath,
    lambda: Ratio<i64>,
    c: Ratio<i64>,
) -> QuasiGeodesicCheck {
    let verts = p.vertices(g);
    let inverses: Vec<Element> = verts.iter().map(Element::inverse).collect();
    for len in 1..verts.len() {
        for from in 0..verts.len() - len {
            let to = from + len;
            let d = rel_distance(&inverses[from].mul(&verts[to])) as i64;
            if Ratio::from_integer(len as i64) > lambda * d + c {
                return QuasiGeodesicCheck {
                    holds: false,
                    witness: Some((from, to)),
                };
            }
        }
    }
    QuasiGeodesicCheck {
        holds: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> GroupSpec {
        GroupSpec::desk()
    }

    fn h(v: &[i64]) -> EdgeTag {
        EdgeTag::H {
            factor: 0,
            vector: v.to_vec(),
        }
    }

    fn x(g: &GroupSpec, name: &str, inverse: bool) -> EdgeTag {
        EdgeTag::X(XLetter {
            generator: g.generator(name).unwrap(),
            inverse,
        })
    }

    #[test]
    fn rel_distance_examples() {
        let g = desk();
        assert_eq!(rel_distance(&g.parse_word("a^5 b^3").unwrap()), 1);
        assert_eq!(rel_distance(&g.parse_word("t^3").unwrap()), 3);
        assert_eq!(rel_distance(&g.parse_word("a t a^5").unwrap()), 3);
    }

    #[test]
    fn geodesic_examples() {
        let g = desk();
        let caps = 4096;
        let a5 = rel_geodesics(&g.parse_word("a^5").unwrap(), caps).unwrap();
        assert_eq!(a5.len(), 1);
        assert_eq!(a5[0].edges, vec![h(&[5, 0])]);
        let a = rel_geodesics(&g.parse_word("a").unwrap(), caps).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].edges, vec![h(&[1, 0])]);
        assert_eq!(a[1].edges, vec![x(&g, "a", false)]);
        assert_eq!(geodesic_count(&g.parse_word("a t").unwrap()), 2);
        let many = g.parse_word("a t a t a t a").unwrap();
        assert!(rel_geodesics(&many, 8).unwrap_err().is_cap());
    }

    #[test]
    fn components_examples() {
        let g = desk();
        let only_x = RelPath::from_edges(Element::identity(), vec![x(&g, "t", false), x(&g, "a", false)]);
        assert!(decompose_components(&g, &only_x).is_empty());
        let single = RelPath::from_edges(Element::identity(), vec![h(&[5, 3])]);
        let c = decompose_components(&g, &single);
        assert_eq!(c.len(), 1);
        assert!(c[0].s_minus.is_identity());
        assert_eq!(c[0].s_plus, g.parse_word("a^5 b^3").unwrap());
        let split = RelPath::from_edges(
            Element::identity(),
            vec![h(&[1, 0]), x(&g, "t", false), h(&[0, 1])],
        );
        let c = decompose_components(&g, &split);
        assert_eq!(c.len(), 2);
        assert!(!connected(&c[0], &c[1]));
        let run = RelPath::from_edges(Element::identity(), vec![h(&[1, 0]), h(&[1, 0])]);
        assert_eq!(decompose_components(&g, &run).len(), 1);
        let back = RelPath::from_edges(
            Element::identity(),
            vec![h(&[1, 0]), x(&g, "t", false), x(&g, "t", true), h(&[0, 1])],
        );
        let c = decompose_components(&g, &back);
        assert!(connected(&c[0], &c[1]));
        assert!(!is_without_backtracking(&g, &back));
    }

    #[test]
    fn coset_mode_merges_x_edges() {
        let g = desk();
        let p = RelPath::from_edges(
            Element::identity(),
            vec![x(&g, "a", false), h(&[0, 1]), x(&g, "t", false)],
        );
        assert_eq!(decompose_components(&g, &p).len(), 1);
        let c = decompose_components_with(&g, &p, ComponentMode::Coset);
        assert_eq!((c[0].start, c[0].end), (0, 2));
    }

    #[test]
    fn phase_and_similarity() {
        let g = desk();
        let single = RelPath::from_edges(Element::identity(), vec![h(&[5, 3])]);
        assert_eq!(phase_vertices(&g, &single).len(), 2);
        let run = RelPath::from_edges(Element::identity(), vec![h(&[1, 0]), h(&[0, 1])]);
        assert_eq!(phase_vertices(&g, &run).len(), 2);
        let p = RelPath::from_edges(Element::identity(), vec![x(&g, "t", false)]);
        let q = RelPath::from_edges(
            g.parse_word("a").unwrap(),
            vec![x(&g, "a", true), x(&g, "t", false), x(&g, "a", false)],
        );
        assert_eq!(q.end(&g), g.parse_word("t a").unwrap());
        assert_eq!(k_similarity(&g, &p, &q), 1);
    }

    #[test]
    fn quasigeodesic_examples() {
        let g = desk();
        let one = Ratio::from_integer(1);
        let zero = Ratio::from_integer(0);
        let aaa = RelPath::from_edges(Element::identity(), vec![x(&g, "a", false); 3]);
        let r = is_quasigeodesic(&g, &aaa, one, zero);
        assert!(!r.holds);
        assert_eq!(r.witness, Some((0, 2)));
        assert!(is_quasigeodesic(&g, &aaa, Ratio::from_integer(3), zero).holds);
        for p in rel_geodesics(&g.parse_word("a t^2 b^3 a").unwrap(), 64).unwrap() {
            assert!(is_quasigeodesic(&g, &p, one, zero).holds);
            assert!(is_without_backtracking(&g, &p));
        }
    }

    #[test]
    fn render_brackets_components() {
        let g = desk();
        let p = RelPath::from_edges(
            Element::identity(),
            vec![x(&g, "t", false), h(&[5, 3]), x(&g, "t", true)],
        );
        let c = decompose_components(&g, &p);
        assert_eq!(p.render(&g, &c), "t [H1(5,3)] t^-1");
    }
}
