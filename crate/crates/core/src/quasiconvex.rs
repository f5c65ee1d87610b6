//! Subgroups, membership, relative quasiconvexity scans, the intersection
//! bound and maximal parabolic subgroups.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{Element, Factor, GroupSpec, Syllable};
use crate::lattice::{vectors_of_norm, Lattice};
use crate::relcayley::rel_geodesics;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

impl Membership {
    fn and(self, other: Membership) -> Membership {
        match (self, other) {
            (Membership::No, _) | (_, Membership::No) => Membership::No,
            (Membership::Yes, Membership::Yes) => Membership::Yes,
            _ => Membership::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SubgroupKind {
    /// Free product of a lattice `L_i` in every peripheral and `<t_j^{m_j}>`
    /// for every free generator (`m_j = 0` for none).
    FactorProduct {
        lattices: Vec<Lattice>,
        free_multipliers: Vec<i64>,
    },
    /// `<g>` for the single generator.
    Cyclic,
    /// `by * inner * by^-1`.
    Conjugate {
        by: Element,
        inner: Box<SubgroupSpec>,
    },
    Intersection {
        left: Box<SubgroupSpec>,
        right: Box<SubgroupSpec>,
    },
    /// Membership by bounded product search only.
    Generic { budget: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub name: String,
    pub generators: Vec<Element>,
    pub kind: SubgroupKind,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}

impl SubgroupSpec {
    /// Subgroup generated by single-syllable elements.
    pub fn factor_product(group: &GroupSpec, name: &str, generators: Vec<Element>) -> Result<Self> {
        let ranks = group.abelian_ranks();
        let mut vecs: Vec<Vec<Vec<i64>>> = vec![Vec::new(); ranks.len()];
        let mut mult = vec![0i64; group.free_rank()];
        for g in &generators {
            group.validate(g)?;
            match g.syllables() {
                [] => {}
                [Syllable::Peripheral { factor, vector }] => vecs[*factor].push(vector.clone()),
                [Syllable::Free {
                    generator,
                    exponent,
                }] => mult[*generator] = gcd(mult[*generator], *exponent),
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "generator {} of `{name}` is not a single syllable",
                        group.format(g)
                    )))
                }
            }
        }
        let lattices = ranks
            .iter()
            .zip(&vecs)
            .map(|(&r, v)| Lattice::new(r, v))
            .collect::<Result<_>>()?;
        Ok(SubgroupSpec {
            name: name.into(),
            generators,
            kind: SubgroupKind::FactorProduct {
                lattices,
                free_multipliers: mult,
            },
        })
    }

    /// A lattice inside one peripheral.
    pub fn peripheral_lattice(group: &GroupSpec, name: &str, factor: usize, lattice: Lattice) -> Result<Self> {
        let rank = group.rank(factor)?;
        if lattice.dim() != rank {
            return Err(Error::VectorLength {
                factor,
                expected: rank,
                got: lattice.dim(),
            });
        }
        let generators = lattice
            .basis()
            .iter()
            .map(|v| Element::peripheral(factor, v.clone()))
            .collect();
        let mut lattices: Vec<Lattice> = group.abelian_ranks().into_iter().map(Lattice::zero).collect();
        lattices[factor] = lattice;
        Ok(SubgroupSpec {
            name: name.into(),
            generators,
            kind: SubgroupKind::FactorProduct {
                lattices,
                free_multipliers: vec![0; group.free_rank()],
            },
        })
    }

    /// The whole peripheral `A_i`.
    pub fn peripheral(group: &GroupSpec, factor: usize) -> Result<Self> {
        let rank = group.rank(factor)?;
        SubgroupSpec::peripheral_lattice(group, &format!("A{}", factor + 1), factor, Lattice::full(rank))
    }

    pub fn cyclic(name: &str, generator: Element) -> Self {
        SubgroupSpec {
            name: name.into(),
            generators: vec![generator],
            kind: SubgroupKind::Cyclic,
        }
    }

    pub fn generic(name: &str, generators: Vec<Element>, budget: usize) -> Self {
        SubgroupSpec {
            name: name.into(),
            generators,
            kind: SubgroupKind::Generic { budget },
        }
    }

    /// Picks the most exact kind the generators allow.
    pub fn from_generators(group: &GroupSpec, name: &str, generators: Vec<Element>) -> Result<Self> {
        for g in &generators {
            group.validate(g)?;
        }
        if generators.iter().all(|g| g.syllable_len() <= 1) {
            SubgroupSpec::factor_product(group, name, generators)
        } else if generators.len() == 1 {
            Ok(SubgroupSpec::cyclic(name, generators[0].clone()))
        } else {
            Ok(SubgroupSpec::generic(name, generators, 4))
        }
    }

    /// `by * self * by^-1`.
    pub fn conjugate(&self, by: &Element) -> SubgroupSpec {
        if by.is_identity() {
            return self.clone();
        }
        SubgroupSpec {
            name: format!("{}^z", self.name),
            generators: self.generators.iter().map(|g| g.conjugate_by(by)).collect(),
            kind: SubgroupKind::Conjugate {
                by: by.clone(),
                inner: Box::new(self.clone()),
            },
        }
    }

    pub fn intersect(&self, other: &SubgroupSpec) -> SubgroupSpec {
        let name = format!("{}&{}", self.name, other.name);
        if let (
            SubgroupKind::FactorProduct {
                lattices: l1,
                free_multipliers: m1,
            },
            SubgroupKind::FactorProduct {
                lattices: l2,
                free_multipliers: m2,
            },
        ) = (&self.kind, &other.kind)
        {
            let lattices: Vec<Lattice> = l1.iter().zip(l2).map(|(a, b)| a.intersection(b)).collect();
            let mult: Vec<i64> = m1.iter().zip(m2).map(|(&a, &b)| lcm(a, b)).collect();
            let mut generators = Vec::new();
            for (i, l) in lattices.iter().enumerate() {
                generators.extend(l.basis().iter().map(|v| Element::peripheral(i, v.clone())));
            }
            for (j, &m) in mult.iter().enumerate() {
                if m != 0 {
                    generators.push(Element::free(j, m));
                }
            }
            return SubgroupSpec {
                name,
                generators,
                kind: SubgroupKind::FactorProduct {
                    lattices,
                    free_multipliers: mult,
                },
            };
        }
        SubgroupSpec {
            name,
            generators: Vec::new(),
            kind: SubgroupKind::Intersection {
                left: Box::new(self.clone()),
                right: Box::new(other.clone()),
            },
        }
    }

    /// True when membership is decided exactly for every element.
    pub fn is_exact(&self) -> bool {
        match &self.kind {
            SubgroupKind::FactorProduct { .. } | SubgroupKind::Cyclic => true,
            SubgroupKind::Conjugate { inner, .. } => inner.is_exact(),
            SubgroupKind::Intersection { left, right } => left.is_exact() && right.is_exact(),
            SubgroupKind::Generic { .. } => false,
        }
    }

    /// `(i, L)` when the subgroup is the lattice `L` inside `A_i`.
    pub fn as_peripheral_lattice(&self) -> Option<(usize, &Lattice)> {
        match &self.kind {
            SubgroupKind::FactorProduct {
                lattices,
                free_multipliers,
            } if free_multipliers.iter().all(|&m| m == 0) => {
                let nonzero: Vec<usize> = (0..lattices.len()).filter(|&i| !lattices[i].is_zero()).collect();
                match nonzero.as_slice() {
                    [i] => Some((*i, &lattices[*i])),
                    [] if !lattices.is_empty() => Some((0, &lattices[0])),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn membership(&self, group: &GroupSpec, x: &Element) -> Membership {
        match &self.kind {
            SubgroupKind::FactorProduct {
                lattices,
                free_multipliers,
            } => {
                let ok = x.syllables().iter().all(|s| match s {
                    Syllable::Peripheral { factor, vector } => lattices[*factor].contains(vector),
                    Syllable::Free {
                        generator,
                        exponent,
                    } => {
                        let m = free_multipliers[*generator];
                        m != 0 && exponent % m == 0
                    }
                });
                if ok {
                    Membership::Yes
                } else {
                    Membership::No
                }
            }
            SubgroupKind::Cyclic => {
                let g = &self.generators[0];
                if x.is_identity() {
                    return Membership::Yes;
                }
                if g.is_identity() {
                    return Membership::No;
                }
                // |g^n|_X >= |n| - 2|g|_X
                let bound = x.x_length() + 2 * g.x_length();
                let ginv = g.inverse();
                let (mut pos, mut neg) = (g.clone(), ginv.clone());
                for _ in 0..bound {
                    if &pos == x || &neg == x {
                        return Membership::Yes;
                    }
                    pos = pos.mul(g);
                    neg = neg.mul(&ginv);
                }
                Membership::No
            }
            SubgroupKind::Conjugate { by, inner } => inner.membership(group, &by.inverse().mul(x).mul(by)),
            SubgroupKind::Intersection { left, right } => {
                left.membership(group, x).and(right.membership(group, x))
            }
            SubgroupKind::Generic { budget } => {
                if x.is_identity() {
                    return Membership::Yes;
                }
                let mut letters: Vec<Element> = Vec::new();
                for g in &self.generators {
                    letters.push(g.clone());
                    letters.push(g.inverse());
                }
                let mut seen: HashSet<Element> = HashSet::from([Element::identity()]);
                let mut frontier = vec![Element::identity()];
                for _ in 0..*budget {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for l in &letters {
                            let y = w.mul(l);
                            if &y == x {
                                return Membership::Yes;
                            }
                            if seen.insert(y.clone()) {
                                next.push(y);
                            }
                        }
                    }
                    frontier = next;
                }
                Membership::Unknown
            }
        }
    }

    pub fn contains(&self, group: &GroupSpec, x: &Element) -> bool {
        self.membership(group, x) == Membership::Yes
    }

    /// `L` with `Q ∩ z A_i z^-1 = z L z^-1`, when membership is exact.
    pub fn peripheral_intersection(&self, group: &GroupSpec, z: &Element, factor: usize) -> Result<Option<Lattice>> {
        let rank = group.rank(factor)?;
        Ok(match &self.kind {
            SubgroupKind::FactorProduct { lattices, .. } => {
                let q = z.strip_trailing(Factor::Peripheral(factor));
                if self.contains(group, &q) {
                    Some(lattices[factor].clone())
                } else {
                    Some(Lattice::zero(rank))
                }
            }
            SubgroupKind::Cyclic => {
                let (u, core) = self.generators[0].cyclic_decomposition();
                let same_coset = z
                    .inverse()
                    .mul(&u)
                    .as_peripheral_vector(factor, rank)
                    .is_some();
                match core.as_peripheral_vector(factor, rank) {
                    Some(v) if same_coset && !core.is_identity() => Some(Lattice::new(rank, &[v])?),
                    _ => Some(Lattice::zero(rank)),
                }
            }
            SubgroupKind::Conjugate { by, inner } => {
                inner.peripheral_intersection(group, &by.inverse().mul(z), factor)?
            }
            SubgroupKind::Intersection { left, right } => {
                match (
                    left.peripheral_intersection(group, z, factor)?,
                    right.peripheral_intersection(group, z, factor)?,
                ) {
                    (Some(a), Some(b)) => Some(a.intersection(&b)),
                    _ => None,
                }
            }
            SubgroupKind::Generic { .. } => None,
        })
    }

    /// Elements of the subgroup in `ball_X(radius)`, and whether every
    /// membership test was decided.
    pub fn elements_in_ball(&self, group: &GroupSpec, radius: u32, caps: &Caps) -> Result<(Vec<Element>, bool)> {
        let ball = group.ball_x(radius, caps)?;
        let verdicts: Vec<Membership> = ball.par_iter().map(|x| self.membership(group, x)).collect();
        let complete = verdicts.iter().all(|m| *m != Membership::Unknown);
        Ok((
            ball.into_iter()
                .zip(verdicts)
                .filter(|(_, m)| *m == Membership::Yes)
                .map(|(x, _)| x)
                .collect(),
            complete,
        ))
    }
}

/// Spheres of the X-ball, built on demand.
pub(crate) struct Spheres {
    spheres: Vec<Vec<Element>>,
}

impl Spheres {
    pub fn new(group: &GroupSpec, radius: u32, caps: &Caps) -> Result<Self> {
        let ball = group.ball_x(radius, caps)?;
        let mut spheres = vec![Vec::new(); radius as usize + 1];
        for x in ball {
            spheres[x.x_length() as usize].push(x);
        }
        Ok(Spheres { spheres })
    }

    /// `(d_X(v, S), nearest element)` found by expanding balls around `v`.
    pub fn distance_to(
        &self,
        group: &GroupSpec,
        s: &SubgroupSpec,
        v: &Element,
        max: u64,
    ) -> Option<(u64, Element)> {
        for (r, sphere) in self.spheres.iter().enumerate().take(max as usize + 1) {
            for w in sphere {
                let y = v.mul(w);
                if s.contains(group, &y) {
                    return Some((r as u64, y));
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaWitness {
    pub g: String,
    pub vertex: String,
    pub nearest: String,
    pub distance: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaStatus {
    ExhaustiveAtRadius,
    /// Some membership tests returned unknown.
    MembershipIncomplete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub subgroup: String,
    pub sigma: u64,
    pub radius: u32,
    /// Witnesses attaining `sigma`, in ball order.
    pub witnesses: Vec<SigmaWitness>,
    pub elements: usize,
    pub geodesics: u64,
    pub status: SigmaStatus,
    /// `(radius, sigma)` at `radius - 1` and `radius`.
    pub history: Vec<(u32, u64)>,
    pub stable: bool,
}

const MAX_WITNESSES: usize = 32;

fn sigma_at(group: &GroupSpec, q: &SubgroupSpec, radius: u32, caps: &Caps) -> Result<SigmaReport> {
    let (elements, complete) = q.elements_in_ball(group, radius, caps)?;
    let spheres = Spheres::new(group, radius, caps)?;
    type Row = (u64, u64, Vec<SigmaWitness>);
    let rows: Vec<Row> = elements
        .par_iter()
        .map(|g| -> Result<Row> {
            let paths = rel_geodesics(g, caps.geodesics)?;
            let mut verts: Vec<Element> = Vec::new();
            let mut seen = HashSet::new();
            for p in &paths {
                for v in p.vertices(group) {
                    if seen.insert(v.clone()) {
                        verts.push(v);
                    }
                }
            }
            let mut best = 0;
            let mut wit = Vec::new();
            for v in verts {
                let (d, w) = spheres
                    .distance_to(group, q, &v, v.x_length())
                    .unwrap_or((v.x_length(), Element::identity()));
                if d > best {
                    best = d;
                    wit.clear();
                }
                if d == best && wit.len() < MAX_WITNESSES {
                    wit.push(SigmaWitness {
                        g: group.format(g),
                        vertex: group.format(&v),
                        nearest: group.format(&w),
                        distance: d,
                    });
                }
            }
            Ok((best, paths.len() as u64, wit))
        })
        .collect::<Result<_>>()?;
    let sigma = rows.iter().map(|r| r.0).max().unwrap_or(0);
    let geodesics = rows.iter().map(|r| r.1).sum();
    let witnesses = rows
        .into_iter()
        .filter(|r| r.0 == sigma)
        .flat_map(|r| r.2)
        .take(MAX_WITNESSES)
        .collect();
    Ok(SigmaReport {
        subgroup: q.name.clone(),
        sigma,
        radius,
        witnesses,
        elements: elements.len(),
        geodesics,
        status: if complete {
            SigmaStatus::ExhaustiveAtRadius
        } else {
            SigmaStatus::MembershipIncomplete
        },
        history: vec![(radius, sigma)],
        stable: false,
    })
}

/// `sigma` over every relative geodesic from 1 to every `g` in `Q ∩ ball_X(radius)`.
pub fn estimate_sigma(group: &GroupSpec, q: &SubgroupSpec, radius: u32, caps: &Caps) -> Result<SigmaReport> {
    Caps::check("sigma radius", radius as u64, caps.sigma_radius as u64)?;
    let mut report = sigma_at(group, q, radius, caps)?;
    if radius > 0 {
        let prev = sigma_at(group, q, radius - 1, caps)?;
        report.history.insert(0, (radius - 1, prev.sigma));
        report.stable = prev.sigma == report.sigma;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MMethod {
    Lattice,
    Enumeration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MReport {
    pub value: u64,
    pub k: u64,
    pub method: MMethod,
    /// True when the value holds for the whole subgroup, not just the ball.
    pub certified: bool,
    /// An element of `B` attaining the value.
    pub witness: Option<String>,
}

/// Least `M` with `B ∩ N_K(C) ⊂ N_M(B ∩ C)`.
pub fn compute_m(
    group: &GroupSpec,
    b: &SubgroupSpec,
    c: &SubgroupSpec,
    k: u64,
    radius: u32,
    caps: &Caps,
) -> Result<MReport> {
    if let (Some((i, lb)), Some((j, lc))) = (b.as_peripheral_lattice(), c.as_peripheral_lattice()) {
        if i == j {
            return Ok(compute_m_lattice(group, i, lb, lc, k));
        }
    }
    compute_m_enumerated(group, b, c, k, radius, caps)
}

pub(crate) fn compute_m_lattice(group: &GroupSpec, factor: usize, lb: &Lattice, lc: &Lattice, k: u64) -> MReport {
    let dim = lb.dim();
    let meet = lb.intersection(lc);
    let sum = lb.sum(lc);
    let mut gens: Vec<Vec<i64>> = lb.basis().to_vec();
    gens.extend(lc.basis().iter().cloned());
    let nb = lb.basis().len();
    let mut best = (0u64, vec![0i64; dim]);
    for r in 0..=k {
        for h in vectors_of_norm(dim, r) {
            if !sum.contains(&h) {
                continue;
            }
            // B x + C y = h, so b = -B x and c = C y satisfy c - b = h
            let coeffs = Lattice::solve(dim, &gens, &h).expect("h lies in B + C");
            let bx = lb.combination(&coeffs[..nb]);
            let b0: Vec<i64> = bx.iter().map(|x| -x).collect();
            let (d, _) = meet.closest_l1(&b0);
            if d > best.0 {
                best = (d, meet.reduce(&b0));
            }
        }
    }
    MReport {
        value: best.0,
        k,
        method: MMethod::Lattice,
        certified: true,
        witness: Some(group.format(&Element::peripheral(factor, best.1))),
    }
}

fn compute_m_enumerated(
    group: &GroupSpec,
    b: &SubgroupSpec,
    c: &SubgroupSpec,
    k: u64,
    radius: u32,
    caps: &Caps,
) -> Result<MReport> {
    if (radius as u64) < k {
        return Err(Error::Precondition(format!("radius {radius} is below K = {k}")));
    }
    let meet = b.intersect(c);
    let (elements, _) = b.elements_in_ball(group, radius, caps)?;
    let spheres = Spheres::new(group, radius.max(k as u32), caps)?;
    let best = elements
        .par_iter()
        .filter(|x| spheres.distance_to(group, c, x, k).is_some())
        .map(|x| {
            let d = spheres
                .distance_to(group, &meet, x, x.x_length())
                .map_or(x.x_length(), |(d, _)| d);
            (d, x)
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    Ok(MReport {
        value: best.map_or(0, |(d, _)| d),
        k,
        method: MMethod::Enumeration,
        certified: false,
        witness: best.map(|(_, x)| group.format(x)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub sigma: u64,
    pub m: MReport,
    /// `sigma + M`.
    pub bound: u64,
    pub direct: SigmaReport,
    pub holds: bool,
}

/// `sigma + M(Q, R, 2 sigma)`, checked against a direct scan of `Q ∩ R`.
pub fn intersection_sigma(
    group: &GroupSpec,
    q: &SubgroupSpec,
    r: &SubgroupSpec,
    sigma: u64,
    radius: u32,
    caps: &Caps,
) -> Result<IntersectionReport> {
    let m = compute_m(group, q, r, 2 * sigma, radius.max(2 * sigma as u32), caps)?;
    let direct = estimate_sigma(group, &q.intersect(r), radius, caps)?;
    let bound = sigma + m.value;
    Ok(IntersectionReport {
        sigma,
        holds: direct.sigma <= bound,
        bound,
        m,
        direct,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicClass {
    pub conjugator: Element,
    pub factor: usize,
    /// `Q ∩ z A_i z^-1 = z L z^-1`.
    pub lattice: Lattice,
    pub rendered: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicReport {
    pub subgroup: String,
    pub sigma: u64,
    pub classes: Vec<ParabolicClass>,
    /// False when some intersection was found by search rather than exactly.
    pub complete: bool,
}

fn render_class(group: &GroupSpec, z: &Element, factor: usize, l: &Lattice) -> String {
    let gens: Vec<String> = l
        .basis()
        .iter()
        .map(|v| group.format(&Element::peripheral(factor, v.clone()).conjugate_by(z)))
        .collect();
    format!("<{}>", gens.join(", "))
}

/// Conjugacy classes in `Q` of infinite maximal parabolic subgroups `Q ∩ A_i^z`, `|z|_X <= sigma`.
pub fn parabolic_classes(
    group: &GroupSpec,
    q: &SubgroupSpec,
    sigma: u64,
    radius: u32,
    caps: &Caps,
) -> Result<ParabolicReport> {
    let zs = group.ball_x(sigma as u32, caps)?;
    let mut complete = true;
    let mut found: Vec<ParabolicClass> = Vec::new();
    for z in &zs {
        for factor in 0..group.peripheral_count() {
            let rank = group.rank(factor)?;
            // only coset representatives: z A_i is what matters
            if z.last().is_some_and(|s| s.factor() == Factor::Peripheral(factor)) {
                continue;
            }
            let lattice = match q.peripheral_intersection(group, z, factor)? {
                Some(l) => l,
                None => {
                    complete = false;
                    let mut vecs = Vec::new();
                    for n in 1..=radius as u64 {
                        for v in vectors_of_norm(rank, n) {
                            let x = Element::peripheral(factor, v.clone()).conjugate_by(z);
                            if q.contains(group, &x) {
                                vecs.push(v);
                            }
                        }
                    }
                    Lattice::new(rank, &vecs)?
                }
            };
            if lattice.is_zero() {
                continue;
            }
            let duplicate = found.iter().any(|c| {
                c.factor == factor
                    && q_conjugate(group, q, &c.conjugator, z, factor, rank)
            });
            if !duplicate {
                found.push(ParabolicClass {
                    rendered: render_class(group, z, factor, &lattice),
                    conjugator: z.clone(),
                    factor,
                    lattice,
                });
            }
        }
    }
    Ok(ParabolicReport {
        subgroup: q.name.clone(),
        sigma,
        classes: found,
        complete,
    })
}

/// Some `q` in `Q` with `q z A_i = z' A_i`, searched as `z' a z^-1` with `|a|_1 <= |z| + |z'|`.
fn q_conjugate(group: &GroupSpec, q: &SubgroupSpec, z: &Element, z2: &Element, factor: usize, rank: usize) -> bool {
    let bound = z.x_length() + z2.x_length();
    (0..=bound).any(|n| {
        vectors_of_norm(rank, n).into_iter().any(|v| {
            let x = z2.mul(&Element::peripheral(factor, v)).mul(&z.inverse());
            q.contains(group, &x)
        })
    })
}

/// A parabolic element `u v u^-1` of `Q`, `v` in `A_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicElement {
    pub element: Element,
    pub conjugator: Element,
    pub factor: usize,
    pub vector: Vec<i64>,
}

/// Nontrivial parabolic elements of `Q ∩ ball_X(radius)`.
pub fn parabolic_elements(group: &GroupSpec, q: &SubgroupSpec, radius: u32, caps: &Caps) -> Result<Vec<ParabolicElement>> {
    let (elements, _) = q.elements_in_ball(group, radius, caps)?;
    Ok(elements
        .into_iter()
        .filter_map(|x| {
            let (u, core) = x.cyclic_decomposition();
            match core.syllables() {
                [Syllable::Peripheral { factor, vector }] => Some(ParabolicElement {
                    conjugator: u,
                    factor: *factor,
                    vector: vector.clone(),
                    element: x,
                }),
                _ => None,
            }
        })
        .collect())
}

/// Whether `x` lies in a `Q`-conjugate of the class.
pub fn class_contains(group: &GroupSpec, q: &SubgroupSpec, class: &ParabolicClass, x: &ParabolicElement) -> bool {
    if x.factor != class.factor || !class.lattice.contains(&x.vector) {
        return false;
    }
    let rank = class.lattice.dim();
    q_conjugate(group, q, &class.conjugator, &x.conjugator, x.factor, rank)
}

/// Group file: the group spec plus named subgroups.
#[derive(Clone, Debug)]
pub struct GroupFile {
    pub group: GroupSpec,
    pub subgroups: BTreeMap<String, SubgroupSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubgroupDoc {
    generators: Vec<String>,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    conjugator: Option<String>,
    #[serde(default)]
    budget: Option<usize>,
}

#[derive(Deserialize)]
struct GroupFileDoc {
    #[serde(default)]
    subgroups: BTreeMap<String, SubgroupDoc>,
}

impl GroupFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let group = GroupSpec::from_json(text)?;
        let doc: GroupFileDoc =
            serde_json::from_str(text).map_err(|e| Error::parse("group file", e.to_string()))?;
        let mut subgroups = BTreeMap::new();
        for (name, d) in doc.subgroups {
            let gens = d
                .generators
                .iter()
                .map(|w| group.parse_word(w))
                .collect::<Result<Vec<_>>>()?;
            let base = match d.kind.as_deref() {
                None | Some("auto") => SubgroupSpec::from_generators(&group, &name, gens)?,
                Some("free-factor") | Some("peripheral-lattice") | Some("factor-product") => {
                    SubgroupSpec::factor_product(&group, &name, gens)?
                }
                Some("cyclic") if gens.len() == 1 => SubgroupSpec::cyclic(&name, gens[0].clone()),
                Some("generic") => SubgroupSpec::generic(&name, gens, d.budget.unwrap_or(4)),
                Some(other) => {
                    return Err(Error::InvalidSpec(format!(
                        "subgroup `{name}`: unsupported kind `{other}`"
                    )))
                }
            };
            let spec = match d.conjugator {
                Some(w) => {
                    let mut s = base.conjugate(&group.parse_word(&w)?);
                    s.name = name.clone();
                    s
                }
                None => base,
            };
            subgroups.insert(name, spec);
        }
        Ok(GroupFile { group, subgroups })
    }

    pub fn subgroup(&self, name: &str) -> Result<&SubgroupSpec> {
        self.subgroups
            .get(name)
            .ok_or_else(|| Error::InvalidSpec(format!("no subgroup named `{name}`")))
    }
}
