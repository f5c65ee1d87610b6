//! The path `o` of a normal form, its shortening `p`, and the checks made on `p`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{normal_form, rho, AmalgamSpec, AmalgamWord, Mode};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::relcayley::{
    connected, decompose_components, decompose_components_with, first_geodesic, is_quasigeodesic,
    is_without_backtracking, ComponentMode, EdgeTag, RelPath,
};
use crate::LAMBDA_0;

/// Where an edge of `o` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub letter: usize,
    /// Part of a `v` segment (an `R` letter, or `h^{±1}`).
    pub v: bool,
}

fn push_geodesic(path: &mut RelPath, origins: &mut Vec<Origin>, x: &Element, origin: Origin) {
    let g = first_geodesic(x);
    origins.extend(std::iter::repeat_n(origin, g.len()));
    path.append(&g);
}

/// `o = u_1 v_1 ... u_k v_k` from geodesics of the letters.
pub fn build_path_o(spec: &AmalgamSpec, w: &AmalgamWord) -> (RelPath, Vec<Origin>) {
    let mut path = RelPath::new(Element::identity());
    let mut origins = Vec::new();
    for (i, (side, x)) in w.letters.iter().enumerate() {
        let u = Origin { letter: i, v: false };
        let v = Origin { letter: i, v: true };
        match (spec.mode, side) {
            (Mode::Theorem1, 0) => push_geodesic(&mut path, &mut origins, x, u),
            (Mode::Theorem1, _) => push_geodesic(&mut path, &mut origins, x, v),
            (Mode::Theorem2, 0) => push_geodesic(&mut path, &mut origins, x, u),
            (Mode::Theorem2, _) => {
                push_geodesic(&mut path, &mut origins, &spec.h, v);
                push_geodesic(&mut path, &mut origins, x, u);
                push_geodesic(&mut path, &mut origins, &spec.h.inverse(), v);
            }
        }
    }
    (path, origins)
}

/// Replaces every coset run containing an `H~` edge by one `H~` edge (or
/// nothing when its endpoints agree), until no run has more than one edge.
/// Returns the new path and, per edge, whether it absorbed a `v` edge.
pub fn shorten(g: &GroupSpec, o: &RelPath, origins: &[Origin]) -> (RelPath, Vec<bool>) {
    let mut path = o.clone();
    let mut marks: Vec<bool> = origins.iter().map(|o| o.v).collect();
    loop {
        let runs = decompose_components_with(g, &path, ComponentMode::Coset);
        let dirty = runs.iter().any(|c| {
            c.end - c.start > 1 || c.s_minus == c.s_plus || path.edges[c.start].h_factor().is_none()
        });
        if !dirty {
            return (path, marks);
        }
        let mut edges = Vec::new();
        let mut new_marks = Vec::new();
        let mut i = 0;
        for c in &runs {
            edges.extend_from_slice(&path.edges[i..c.start]);
            new_marks.extend_from_slice(&marks[i..c.start]);
            let step = c.s_minus.inverse().mul(&c.s_plus);
            if !step.is_identity() {
                let vector = step
                    .as_peripheral_vector(c.factor, g.abelian_ranks()[c.factor])
                    .expect("a coset run moves inside one peripheral");
                edges.push(EdgeTag::H {
                    factor: c.factor,
                    vector,
                });
                new_marks.push(marks[c.start..c.end].iter().any(|&m| m));
            }
            i = c.end;
        }
        edges.extend_from_slice(&path.edges[i..]);
        new_marks.extend_from_slice(&marks[i..]);
        path = RelPath::from_edges(path.start.clone(), edges);
        marks = new_marks;
    }
}

/// Result of the checks on the shortened path of one word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCheck {
    pub path: String,
    pub length: usize,
    pub quasigeodesic: bool,
    /// First subpath `[from, to)` breaking the `(3, 0)` bound.
    pub witness: Option<(usize, usize)>,
    pub backtracking_free: bool,
    pub endpoints_distinct: bool,
    /// Consecutive components through `v` edges are not connected.
    pub consecutive_disconnected: bool,
    /// Smallest `d_X(s_-, s_+)` over components through `v` edges.
    pub min_v_component: Option<u64>,
    pub long_components: bool,
}

impl PathCheck {
    pub fn holds(&self) -> bool {
        self.quasigeodesic
            && self.backtracking_free
            && self.endpoints_distinct
            && self.consecutive_disconnected
            && self.long_components
    }

    /// Name of the first failing check.
    pub fn failure(&self) -> Option<&'static str> {
        if !self.endpoints_distinct {
            Some("endpoints")
        } else if !self.quasigeodesic {
            Some("quasigeodesic")
        } else if !self.backtracking_free {
            Some("backtracking")
        } else if !self.consecutive_disconnected {
            Some("connected-components")
        } else if !self.long_components {
            Some("short-component")
        } else {
            None
        }
    }
}

pub(crate) fn check_shortened(g: &GroupSpec, p: &RelPath, marks: &[bool], eta: u64) -> PathCheck {
    let comps = decompose_components(g, p);
    let v_comps: Vec<_> = comps
        .iter()
        .filter(|c| marks[c.start..c.end].iter().any(|&m| m))
        .collect();
    let consecutive_disconnected = v_comps.windows(2).all(|w| !connected(w[0], w[1]));
    let min_v_component = v_comps.iter().map(|c| c.x_length()).min();
    let qg = is_quasigeodesic(g, p, Ratio::from_integer(LAMBDA_0), Ratio::from_integer(0));
    PathCheck {
        path: p.render(g, &comps),
        length: p.len(),
        quasigeodesic: qg.holds,
        witness: qg.witness,
        backtracking_free: is_without_backtracking(g, p),
        endpoints_distinct: p.start != p.end(g),
        consecutive_disconnected,
        min_v_component,
        long_components: min_v_component.is_none_or(|m| m >= eta),
    }
}

/// Checks for one cyclically reduced word.
pub(crate) fn check_word(g: &GroupSpec, spec: &AmalgamSpec, w: &AmalgamWord, eta: u64) -> PathCheck {
    let (o, origins) = build_path_o(spec, w);
    let (p, marks) = shorten(g, &o, &origins);
    check_shortened(g, &p, &marks, eta)
}

/// Conjugates `w` by letters until it is cyclically reduced; returns the new
/// word and `c` with `rho(w) = c rho(w') c^-1`.
pub fn cyclic_reduce(g: &GroupSpec, spec: &AmalgamSpec, w: &AmalgamWord) -> Result<(AmalgamWord, Element)> {
    let mut cur = w.clone();
    let mut conj = Element::identity();
    while cur.len() >= 2 && cur.len() % 2 == 1 {
        let (side, last) = cur.letters.pop().expect("nonempty");
        let mut letters = vec![(side, last.clone())];
        letters.extend(cur.letters.iter().cloned());
        cur = normal_form(g, spec, &letters)?;
        conj = conj.mul(&spec.letter_image(side, &last).inverse());
    }
    Ok((cur, conj))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisReport {
    pub word: String,
    pub reduced: String,
    pub conjugator: String,
    pub translation: String,
    pub power_bound: u32,
    pub window: PathCheck,
    /// Number of H-components on a geodesic for `rho(w)` (theorem-2 mode).
    pub geodesic_components: Option<usize>,
    pub holds: bool,
}

/// The path `... f^-1(o) o f(o) ...` over `|j| <= power_bound`, shortened and
/// checked; `w` must not be conjugate into a factor.
pub fn verify_hyperbolic_translation(
    g: &GroupSpec,
    spec: &AmalgamSpec,
    w: &AmalgamWord,
    power_bound: u32,
    eta: u64,
) -> Result<AxisReport> {
    let (reduced, conj) = cyclic_reduce(g, spec, w)?;
    if reduced.len() <= 1 {
        return Err(Error::Precondition(format!(
            "{} is conjugate into a factor",
            w.render(g)
        )));
    }
    let f = rho(spec, &reduced);
    let (o, origins) = build_path_o(spec, &reduced);
    let fi = f.inverse();
    let mut start = Element::identity();
    for _ in 0..power_bound {
        start = start.mul(&fi);
    }
    let mut window = RelPath::new(start);
    let mut marks = Vec::new();
    for _ in 0..2 * power_bound + 1 {
        window.append(&o);
        marks.extend(origins.iter().copied());
    }
    let (p, pm) = shorten(g, &window, &marks);
    let check = check_shortened(g, &p, &pm, eta);
    let geodesic_components = (spec.mode == Mode::Theorem2)
        .then(|| decompose_components(g, &first_geodesic(&f)).len());
    let holds = check.quasigeodesic
        && check.backtracking_free
        && check.endpoints_distinct
        && geodesic_components.is_none_or(|n| n >= 2);
    Ok(AxisReport {
        word: w.render(g),
        reduced: reduced.render(g),
        conjugator: g.format(&conj),
        translation: g.format(&f),
        power_bound,
        window: check,
        geodesic_components,
        holds,
    })
}
