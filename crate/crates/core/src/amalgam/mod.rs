//! Amalgams `Q *_{Q∩R} R` and `Q1 *_R h Q2 h^-1` of subgroups of `G`: normal
//! forms, the map to `G`, the path construction and the constant `C`.

mod corollaries;
mod paths;
mod verify;

use serde::{Deserialize, Serialize};

use crate::constants::ConstantsLedger;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Syllable};
use crate::lattice::Lattice;
use crate::quasiconvex::{compute_m, MReport, SubgroupSpec};
use crate::caps::Caps;

pub use corollaries::{
    build_double, build_fully_quasiconvex, DoubleReport, DoubleStage, FullyQcReport, FullyQcStep,
    TreeEdge, TreeOfGroups,
};
pub use paths::{build_path_o, shorten, verify_hyperbolic_translation, AxisReport, Origin, PathCheck};
pub use verify::{
    assemble, check_hypotheses, classify_parabolics, combined_subgroup, run_pipeline, verify_combined_quasiconvexity,
    verify_injectivity, CombineReport, Counterexample, HypothesisReport, InjectivityReport, ParabolicCheck,
    PipelineConfig, QcReport, WordClass,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[serde(rename = "theorem-1")]
    Theorem1,
    #[serde(rename = "theorem-2")]
    Theorem2,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem-1" => Ok(Mode::Theorem1),
            "theorem-2" => Ok(Mode::Theorem2),
            _ => Err(Error::parse(s, "expected theorem-1 or theorem-2")),
        }
    }
}

/// Left factor `Q` (or `Q1`) is side 0, right factor `R` (or `Q2`) is side 1.
pub type Side = u8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamSpec {
    pub mode: Mode,
    pub left: SubgroupSpec,
    /// `R` in theorem-1 mode; `Q2` (before conjugation by `h`) in theorem-2 mode.
    pub right: SubgroupSpec,
    /// Peripheral index of `P`.
    pub peripheral: usize,
    /// Edge group as a lattice in `A_peripheral`.
    pub edge: Lattice,
    /// Identity in theorem-1 mode.
    pub h: Element,
    pub c: u64,
}

impl AmalgamSpec {
    /// `Q *_{Q∩R} R` with `R` a lattice in `A_i`.
    pub fn theorem1(group: &GroupSpec, q: SubgroupSpec, r: SubgroupSpec, c: u64) -> Result<Self> {
        let (i, lr) = r
            .as_peripheral_lattice()
            .ok_or_else(|| Error::Unsupported(format!("`{}` is not a lattice in a peripheral", r.name)))?;
        let lq = q
            .peripheral_intersection(group, &Element::identity(), i)?
            .ok_or_else(|| Error::Unsupported(format!("`{}` meets A{} in an unknown subgroup", q.name, i + 1)))?;
        let edge = lq.intersection(lr);
        Ok(AmalgamSpec {
            mode: Mode::Theorem1,
            peripheral: i,
            edge,
            left: q,
            right: r,
            h: Element::identity(),
            c,
        })
    }

    /// `Q1 *_R h Q2 h^-1` with `R = Q1 ∩ A_i = Q2 ∩ A_i` and `h` in `A_i`.
    pub fn theorem2(
        group: &GroupSpec,
        q1: SubgroupSpec,
        q2: SubgroupSpec,
        peripheral: usize,
        h: Element,
        c: u64,
    ) -> Result<Self> {
        let rank = group.rank(peripheral)?;
        if h.as_peripheral_vector(peripheral, rank).is_none() {
            return Err(Error::Precondition(format!(
                "h = {} is not in A{}",
                group.format(&h),
                peripheral + 1
            )));
        }
        let unknown = |s: &SubgroupSpec| {
            Error::Unsupported(format!("`{}` meets A{} in an unknown subgroup", s.name, peripheral + 1))
        };
        let r1 = q1
            .peripheral_intersection(group, &Element::identity(), peripheral)?
            .ok_or_else(|| unknown(&q1))?;
        let r2 = q2
            .peripheral_intersection(group, &Element::identity(), peripheral)?
            .ok_or_else(|| unknown(&q2))?;
        if r1 != r2 {
            return Err(Error::Precondition(format!(
                "{} ∩ A{} and {} ∩ A{} differ",
                q1.name,
                peripheral + 1,
                q2.name,
                peripheral + 1
            )));
        }
        Ok(AmalgamSpec {
            mode: Mode::Theorem2,
            peripheral,
            edge: r1,
            left: q1,
            right: q2,
            h,
            c,
        })
    }

    pub fn factor(&self, side: Side) -> &SubgroupSpec {
        if side == 0 {
            &self.left
        } else {
            &self.right
        }
    }

    /// Image in `G` of a letter.
    pub fn letter_image(&self, side: Side, x: &Element) -> Element {
        if side == 1 && self.mode == Mode::Theorem2 {
            x.conjugate_by(&self.h)
        } else {
            x.clone()
        }
    }

    /// Vector of `x` when it lies in the edge group.
    pub fn edge_vector(&self, group: &GroupSpec, x: &Element) -> Option<Vec<i64>> {
        let rank = group.rank(self.peripheral).ok()?;
        x.as_peripheral_vector(self.peripheral, rank)
            .filter(|v| self.edge.contains(v))
    }

    pub fn in_edge(&self, group: &GroupSpec, x: &Element) -> bool {
        self.edge_vector(group, x).is_some()
    }

    /// `(k, r)` with `x = k r`, `k` in the edge group and `r` the canonical
    /// representative of the coset `K x`.
    pub fn split_left(&self, x: &Element) -> (Element, Element) {
        match x.first() {
            Some(Syllable::Peripheral { factor, vector }) if *factor == self.peripheral => {
                let reduced = self.edge.reduce(vector);
                let k: Vec<i64> = vector.iter().zip(&reduced).map(|(a, b)| a - b).collect();
                let kel = Element::peripheral(self.peripheral, k);
                (kel.clone(), kel.inverse().mul(x))
            }
            _ => (Element::identity(), x.clone()),
        }
    }

    pub fn is_canonical(&self, x: &Element) -> bool {
        self.split_left(x).0.is_identity()
    }
}

/// Alternating sequence of letters; interior letters avoid the edge group and
/// every letter after the first is a canonical coset representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AmalgamWord {
    pub letters: Vec<(Side, Element)>,
}

impl AmalgamWord {
    pub fn identity() -> Self {
        AmalgamWord { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Length one, or even length (first and last letters in different factors).
    pub fn is_cyclically_reduced(&self) -> bool {
        self.len() == 1 || (self.len() >= 2 && self.len().is_multiple_of(2))
    }

    pub fn render(&self, group: &GroupSpec) -> String {
        if self.letters.is_empty() {
            return "()".into();
        }
        self.letters
            .iter()
            .map(|(s, x)| format!("({}:{})", if *s == 0 { "L" } else { "R" }, group.format(x)))
            .collect::<Vec<_>>()
            .join("")
    }
}

fn merge_same_side(letters: Vec<(Side, Element)>) -> Vec<(Side, Element)> {
    let mut out: Vec<(Side, Element)> = Vec::new();
    for (s, x) in letters {
        if x.is_identity() {
            continue;
        }
        match out.last_mut() {
            Some((ls, lx)) if *ls == s => {
                *lx = lx.mul(&x);
                if lx.is_identity() {
                    out.pop();
                }
            }
            _ => out.push((s, x)),
        }
    }
    out
}

/// Canonical form of a product of factor letters.
pub fn normal_form(group: &GroupSpec, spec: &AmalgamSpec, letters: &[(Side, Element)]) -> Result<AmalgamWord> {
    for (s, x) in letters {
        if *s > 1 {
            return Err(Error::Precondition(format!("side {s} is neither 0 nor 1")));
        }
        if !spec.factor(*s).contains(group, x) {
            return Err(Error::NotInFactor {
                factor: *s as usize,
                element: group.format(x),
            });
        }
    }
    let mut w = merge_same_side(letters.to_vec());
    // absorb edge-group letters into a neighbour until none is left inside
    loop {
        if w.len() <= 1 {
            break;
        }
        let Some(pos) = w.iter().position(|(_, x)| spec.in_edge(group, x)) else {
            break;
        };
        let (_, k) = w.remove(pos);
        if pos > 0 {
            w[pos - 1].1 = w[pos - 1].1.mul(&k);
        } else {
            w[0].1 = k.mul(&w[0].1);
        }
        w = merge_same_side(w);
    }
    if w.len() == 1 && spec.in_edge(group, &w[0].1) {
        w[0].0 = 0;
    }
    for i in (1..w.len()).rev() {
        let (k, r) = spec.split_left(&w[i].1);
        w[i].1 = r;
        w[i - 1].1 = w[i - 1].1.mul(&k);
    }
    Ok(AmalgamWord { letters: w })
}

/// The natural map to `G`.
pub fn rho(spec: &AmalgamSpec, w: &AmalgamWord) -> Element {
    w.letters
        .iter()
        .fold(Element::identity(), |acc, (s, x)| acc.mul(&spec.letter_image(*s, x)))
}

/// Elements of a factor reached by products of at most `bound` generators.
pub fn factor_ball(s: &SubgroupSpec, bound: u32) -> Vec<Element> {
    let mut letters = Vec::new();
    for g in &s.generators {
        if !g.is_identity() {
            letters.push(g.clone());
            letters.push(g.inverse());
        }
    }
    let mut seen = std::collections::HashSet::from([Element::identity()]);
    let mut out = vec![Element::identity()];
    let mut frontier = vec![Element::identity()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                let y = w.mul(l);
                if seen.insert(y.clone()) {
                    next.push(y.clone());
                    out.push(y);
                }
            }
        }
        frontier = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CReport {
    pub mode: Mode,
    pub eta: u64,
    pub sigma: u64,
    /// `M(H, Q, sigma)` (theorem-1) or `M(H, Q1, sigma)`, `M(H, Q2, sigma)`.
    pub m: Vec<MReport>,
    pub c: u64,
}

/// `C = eta + 2 M(H,Q,sigma)` or `C = eta + M(H,Q1,sigma) + M(H,Q2,sigma)`.
#[allow(clippy::too_many_arguments)]
pub fn compute_c(
    group: &GroupSpec,
    mode: Mode,
    factors: &[&SubgroupSpec],
    peripheral: usize,
    ledger: &ConstantsLedger,
    sigma: u64,
    radius: u32,
    caps: &Caps,
) -> Result<CReport> {
    let expected = if mode == Mode::Theorem1 { 1 } else { 2 };
    if factors.len() != expected {
        return Err(Error::Precondition(format!(
            "{} factor subgroups given, {expected} needed",
            factors.len()
        )));
    }
    let m: Vec<MReport> = factors
        .iter()
        .map(|q| {
            let meet = q.peripheral_intersection(group, &Element::identity(), peripheral)?;
            m_value(group, q, peripheral, meet.as_ref(), sigma, radius, caps)
        })
        .collect::<Result<_>>()?;
    let c = match mode {
        Mode::Theorem1 => ledger.eta + 2 * m[0].value,
        Mode::Theorem2 => ledger.eta + m[0].value + m[1].value,
    };
    Ok(CReport {
        mode,
        eta: ledger.eta,
        sigma,
        m,
        c,
    })
}

/// `M(A_i, Q, K)`: the ball scan of [`compute_m`] (with `K` clamped to the
/// radius), raised by a scan from the subgroup side when `Q ∩ A_i` is known.
///
/// The second scan takes `r` among products of at most [`SIDE_BOUND`]
/// generators of `Q`. Writing `r = v r'` with `v` in `A_i`, the elements of
/// `A_i` within `K` of `r` are `v + d` with `|r| - |v| + |d|_1 <= K`.
pub(crate) fn m_value(
    group: &GroupSpec,
    q: &SubgroupSpec,
    factor: usize,
    meet: Option<&Lattice>,
    k: u64,
    radius: u32,
    caps: &Caps,
) -> Result<MReport> {
    let h = SubgroupSpec::peripheral(group, factor)?;
    let kk = k.min(radius as u64);
    let mut report = compute_m(group, &h, q, kk, radius.max(kk as u32), caps)?;
    if kk < k {
        report.certified = false;
    }
    let Some(meet) = meet else {
        return Ok(report);
    };
    let rank = group.rank(factor)?;
    for r in factor_ball(q, SIDE_BOUND) {
        let v = match r.first() {
            Some(Syllable::Peripheral { factor: f, vector }) if *f == factor => vector.clone(),
            _ => vec![0; rank],
        };
        let base = r.x_length() - crate::lattice::l1(&v);
        if base > k {
            continue;
        }
        for n in 0..=(k - base) {
            for d in crate::lattice::vectors_of_norm(rank, n) {
                let a: Vec<i64> = v.iter().zip(&d).map(|(x, y)| x + y).collect();
                let (dist, _) = meet.closest_l1(&a);
                if dist > report.value {
                    report.value = dist;
                    report.witness = Some(group.format(&Element::peripheral(factor, a)));
                }
            }
        }
    }
    Ok(report)
}

/// Generator-word length of the subgroup elements used by [`m_value`].
pub const SIDE_BOUND: u32 = 3;

/// `C` from its ingredients.
pub fn c_formula(mode: Mode, eta: u64, m: &[u64]) -> u64 {
    match mode {
        Mode::Theorem1 => eta + 2 * m.first().copied().unwrap_or(0),
        Mode::Theorem2 => eta + m.iter().take(2).sum::<u64>(),
    }
}
