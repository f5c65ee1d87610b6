//! Bounded coset penetration constants by exhaustive path-pair scans.
//!
//! Domain at radius `R`: paths start at 1 (left invariance) and every vertex
//! lies in `ball_X(R)`, except the far vertex of an `H~` loop. A path step is
//! an X-edge, one `H~` edge to another ball vertex of the current coset, or
//! (when `c >= 2`) a two-edge `H~` loop through a generic far vertex. Longer
//! `H~` runs with distinct endpoints give the same endpoints, phase vertices
//! and components as the single edge, so they add nothing to the maximum.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::{BallIndex, Comp};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::relcayley::{rel_distance, EdgeTag, RelPath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStatus {
    ExhaustiveAtRadius,
    Capped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonEstimate {
    pub lambda: Ratio<i64>,
    pub c: Ratio<i64>,
    pub k: u64,
    pub radius: u32,
    /// Max of the three clauses below.
    pub value: u64,
    /// Phase-vertex Hausdorff gap.
    pub clause_i: u64,
    /// Largest `d_X(s_-, s_+)` over components with no connected partner.
    pub clause_ii: u64,
    /// Largest endpoint gap between connected components.
    pub clause_iii: u64,
    pub witness: Option<(RelPath, RelPath)>,
    pub status: ScanStatus,
    pub paths: u64,
}

impl EpsilonEstimate {
    /// The phase-vertex and connected-component part, without clause (ii).
    pub fn phase_value(&self) -> u64 {
        self.clause_i.max(self.clause_iii)
    }
}

/// Parameter triples the proofs consume; `(1, 0, k)` is allowed for any `k`.
pub fn whitelisted(lambda: Ratio<i64>, c: Ratio<i64>, k: u64) -> bool {
    let one = Ratio::from_integer(1);
    let int = |n: i64| Ratio::from_integer(n);
    (lambda == one && c == int(0))
        || (k == 0 && lambda == one && (c == int(2) || c == int(4)))
        || (k == 0 && lambda == int(3) && c == int(0))
}

const BIG: i64 = 1_000_003;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Step {
    X { letter: u8, to: u32 },
    Jump { factor: u8, to: u32 },
    Loop { factor: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Vert {
    base: u32,
    far: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Signature {
    phase: Vec<u32>,
    comps: Vec<Comp>,
}

struct Best {
    value: u64,
    pair: Option<(usize, usize)>,
}

impl Best {
    fn new() -> Self {
        Best {
            value: 0,
            pair: None,
        }
    }

    fn offer(&mut self, value: u64, pair: (usize, usize)) {
        let better = match self.pair {
            None => true,
            Some(cur) => value > self.value || (value == self.value && pair < cur),
        };
        if better {
            self.value = value;
            self.pair = Some(pair);
        }
    }
}

fn far_element(ball: &BallIndex, v: Vert) -> Element {
    let base = &ball.elems[v.base as usize];
    match v.far {
        None => base.clone(),
        Some(f) => {
            let rank = ball.group.rank(f as usize).expect("factor in range");
            base.mul(&Element::peripheral(f as usize, vec![BIG; rank]))
        }
    }
}

struct Enumerator<'a> {
    ball: &'a BallIndex,
    /// `l <= lambda d + c` as `l * ld * cd <= ln * cd * d + cn * ld`.
    l_scale: i64,
    d_scale: i64,
    offset: i64,
    loops: bool,
    cap: u64,
}

#[derive(Default)]
struct Collected {
    /// Per endpoint, signature -> first path found.
    by_end: HashMap<u32, HashMap<Signature, Vec<Step>>>,
    paths: u64,
    capped: bool,
}

struct State {
    verts: Vec<Vert>,
    steps: Vec<Step>,
    comps: Vec<Comp>,
    last_h: Option<u8>,
}

impl Enumerator<'_> {
    fn dist(&self, a: Vert, b: Vert) -> u64 {
        if a.far.is_none() && b.far.is_none() {
            return self.ball.rd(a.base, b.base);
        }
        let x = far_element(self.ball, a);
        let y = far_element(self.ball, b);
        rel_distance(&x.inverse().mul(&y))
    }

    fn admissible(&self, st: &State, next: Vert) -> bool {
        let n = st.verts.len();
        st.verts.iter().enumerate().all(|(i, &v)| {
            let l = (n - i) as i64;
            l * self.l_scale <= self.d_scale * self.dist(v, next) as i64 + self.offset
        })
    }

    fn record(&self, st: &State, out: &mut Collected) {
        out.paths += 1;
        if out.paths > self.cap {
            out.capped = true;
            return;
        }
        let mut phase: Vec<u32> = st
            .verts
            .iter()
            .filter(|v| v.far.is_none())
            .map(|v| v.base)
            .collect();
        phase.sort_unstable();
        phase.dedup();
        let mut comps = st.comps.clone();
        comps.sort_unstable();
        let end = st.verts.last().expect("nonempty").base;
        out.by_end
            .entry(end)
            .or_default()
            .entry(Signature { phase, comps })
            .or_insert_with(|| st.steps.clone());
    }

    fn moves(&self, st: &State) -> Vec<Step> {
        let v = st.verts.last().expect("nonempty").base;
        let mut out: Vec<Step> = self.ball.x_nbrs[v as usize]
            .iter()
            .map(|&(letter, to)| Step::X { letter, to })
            .collect();
        for f in 0..self.ball.members.len() {
            if st.last_h == Some(f as u8) {
                continue;
            }
            let cid = self.ball.coset[f][v as usize];
            if st
                .comps
                .iter()
                .any(|c| c.factor == f as u8 && c.coset == cid)
            {
                continue;
            }
            for &w in &self.ball.members[f][cid as usize] {
                if w != v {
                    out.push(Step::Jump {
                        factor: f as u8,
                        to: w,
                    });
                }
            }
            if self.loops {
                out.push(Step::Loop { factor: f as u8 });
            }
        }
        out
    }

    fn dfs(&self, st: &mut State, out: &mut Collected) {
        self.record(st, out);
        if out.capped {
            return;
        }
        for mv in self.moves(st) {
            self.apply(st, mv, out);
            if out.capped {
                return;
            }
        }
    }

    fn apply(&self, st: &mut State, mv: Step, out: &mut Collected) {
        let v = st.verts.last().expect("nonempty").base;
        match mv {
            Step::X { to, .. } => {
                let next = Vert { base: to, far: None };
                if !self.admissible(st, next) {
                    return;
                }
                let saved = st.last_h.take();
                st.verts.push(next);
                st.steps.push(mv);
                self.dfs(st, out);
                st.verts.pop();
                st.steps.pop();
                st.last_h = saved;
            }
            Step::Jump { factor, to } => {
                let next = Vert { base: to, far: None };
                if !self.admissible(st, next) {
                    return;
                }
                let saved = st.last_h.replace(factor);
                st.verts.push(next);
                st.steps.push(mv);
                st.comps.push(self.ball.comp(factor as usize, v, to));
                self.dfs(st, out);
                st.comps.pop();
                st.verts.pop();
                st.steps.pop();
                st.last_h = saved;
            }
            Step::Loop { factor } => {
                let far = Vert {
                    base: v,
                    far: Some(factor),
                };
                if !self.admissible(st, far) {
                    return;
                }
                st.verts.push(far);
                let back = Vert { base: v, far: None };
                if self.admissible(st, back) {
                    let saved = st.last_h.replace(factor);
                    st.verts.push(back);
                    st.steps.push(mv);
                    st.comps.push(self.ball.comp(factor as usize, v, v));
                    self.dfs(st, out);
                    st.comps.pop();
                    st.verts.pop();
                    st.steps.pop();
                    st.last_h = saved;
                }
                st.verts.pop();
            }
        }
    }
}

fn steps_to_path(ball: &BallIndex, steps: &[Step]) -> RelPath {
    let letters = ball.group.x_letters();
    let mut cur = 0u32;
    let mut edges = Vec::new();
    for s in steps {
        match *s {
            Step::X { letter, to } => {
                edges.push(EdgeTag::X(letters[letter as usize]));
                cur = to;
            }
            Step::Jump { factor, to } => {
                let d = ball.elems[cur as usize]
                    .inverse()
                    .mul(&ball.elems[to as usize]);
                let rank = ball.group.rank(factor as usize).expect("factor in range");
                let vector = d
                    .as_peripheral_vector(factor as usize, rank)
                    .expect("jump stays in the coset");
                edges.push(EdgeTag::H {
                    factor: factor as usize,
                    vector,
                });
                cur = to;
            }
            Step::Loop { factor } => {
                let rank = ball.group.rank(factor as usize).expect("factor in range");
                edges.push(EdgeTag::H {
                    factor: factor as usize,
                    vector: vec![BIG; rank],
                });
                edges.push(EdgeTag::H {
                    factor: factor as usize,
                    vector: vec![-BIG; rank],
                });
            }
        }
    }
    RelPath::from_edges(Element::identity(), edges)
}

fn to_i64(r: Ratio<i64>) -> (i64, i64) {
    (*r.numer(), *r.denom())
}

/// `eps(lambda, c, 0)`: all `(lambda, c)`-quasi-geodesic pairs without
/// backtracking from 1 to a common endpoint.
fn scan_same_endpoints(
    ball: &BallIndex,
    lambda: Ratio<i64>,
    c: Ratio<i64>,
    caps: &Caps,
) -> EpsilonEstimate {
    let (ln, ld) = to_i64(lambda);
    let (cn, cd) = to_i64(c);
    let en = Enumerator {
        ball,
        l_scale: ld * cd,
        d_scale: ln * cd,
        offset: cn * ld,
        loops: c >= Ratio::from_integer(2),
        cap: caps.paths as u64,
    };
    let mut st = State {
        verts: vec![Vert { base: 0, far: None }],
        steps: Vec::new(),
        comps: Vec::new(),
        last_h: None,
    };
    let mut collected = Collected::default();
    en.dfs(&mut st, &mut collected);

    let mut ends: Vec<(u32, Vec<(Signature, Vec<Step>)>)> = collected
        .by_end
        .into_iter()
        .map(|(e, m)| {
            let mut sigs: Vec<(Signature, Vec<Step>)> = m.into_iter().collect();
            sigs.sort();
            (e, sigs)
        })
        .collect();
    ends.sort_by_key(|(e, _)| *e);

    type ClauseBest = (u64, Option<(u32, usize, usize)>);
    let per_end: Vec<[ClauseBest; 3]> = ends
        .par_iter()
        .map(|(end, sigs)| {
            let mut best = [Best::new(), Best::new(), Best::new()];
            // clause (i): max over phase vertices u of some P and signatures Q of d_X(u, Q).
            let mut owner: HashMap<u32, usize> = HashMap::new();
            for (i, (s, _)) in sigs.iter().enumerate() {
                for &u in &s.phase {
                    owner.entry(u).or_insert(i);
                }
            }
            let mut union: Vec<(u32, usize)> = owner.into_iter().collect();
            union.sort_unstable();
            let mut seen_phase: HashSet<&Vec<u32>> = HashSet::new();
            for (qi, (q, _)) in sigs.iter().enumerate() {
                if !seen_phase.insert(&q.phase) {
                    continue;
                }
                for &(u, pi) in &union {
                    let d = q.phase.iter().map(|&w| ball.xd(u, w)).min().unwrap_or(0);
                    best[0].offer(d, (pi, qi));
                }
            }
            // clause (ii): a component s of P and a Q with no component in the coset of s.
            let mut holders: HashMap<(u8, u32), Vec<usize>> = HashMap::new();
            for (i, (s, _)) in sigs.iter().enumerate() {
                let mut keys: Vec<(u8, u32)> = s.comps.iter().map(|c| (c.factor, c.coset)).collect();
                keys.dedup();
                for k in keys {
                    holders.entry(k).or_default().push(i);
                }
            }
            let mut comp_owner: HashMap<Comp, usize> = HashMap::new();
            for (i, (s, _)) in sigs.iter().enumerate() {
                for c in &s.comps {
                    comp_owner.entry(*c).or_insert(i);
                }
            }
            let mut comp_list: Vec<(Comp, usize)> = comp_owner.into_iter().collect();
            comp_list.sort_unstable();
            for &(c, pi) in &comp_list {
                let hold = &holders[&(c.factor, c.coset)];
                if hold.len() < sigs.len() {
                    let qi = (0..sigs.len())
                        .find(|i| hold.binary_search(i).is_err())
                        .expect("some signature lacks the coset");
                    best[1].offer(ball.xd(c.s_minus, c.s_plus), (pi, qi));
                }
            }
            // clause (iii): connected components of P and Q.
            let mut groups: HashMap<(u8, u32), Vec<(Comp, usize)>> = HashMap::new();
            for &(c, pi) in &comp_list {
                groups.entry((c.factor, c.coset)).or_default().push((c, pi));
            }
            for group in groups.values() {
                for &(s, pi) in group {
                    for &(t, qi) in group {
                        let d = ball.xd(s.s_minus, t.s_minus).max(ball.xd(s.s_plus, t.s_plus));
                        best[2].offer(d, (pi, qi));
                    }
                }
            }
            best.map(|b| (b.value, b.pair.map(|(p, q)| (*end, p, q))))
        })
        .collect();

    let mut clauses = [(0u64, None::<(u32, usize, usize)>); 3];
    for row in per_end {
        for (k, (v, w)) in row.into_iter().enumerate() {
            if w.is_some() && (clauses[k].1.is_none() || v > clauses[k].0) {
                clauses[k] = (v, w);
            }
        }
    }
    let value = clauses.iter().map(|c| c.0).max().unwrap_or(0);
    let witness = clauses
        .iter()
        .filter(|c| c.0 == value)
        .find_map(|c| c.1)
        .map(|(end, p, q)| {
            let sigs = &ends
                .iter()
                .find(|(e, _)| *e == end)
                .expect("endpoint present")
                .1;
            (steps_to_path(ball, &sigs[p].1), steps_to_path(ball, &sigs[q].1))
        });
    EpsilonEstimate {
        lambda,
        c,
        k: 0,
        radius: ball.radius,
        value,
        clause_i: clauses[0].0,
        clause_ii: clauses[1].0,
        clause_iii: clauses[2].0,
        witness,
        status: if collected.capped {
            ScanStatus::Capped
        } else {
            ScanStatus::ExhaustiveAtRadius
        },
        paths: collected.paths.min(en.cap),
    }
}

fn geodesic_path(ball: &BallIndex, from: u32, to: u32) -> RelPath {
    let w = ball.elems[from as usize]
        .inverse()
        .mul(&ball.elems[to as usize]);
    crate::relcayley::first_geodesic(&w).translate(&ball.elems[from as usize])
}

/// `eps(1, 0, k)`: geodesics `p` from 1 and `q` from `y`, all endpoints in the
/// ball, with `d_X(1, y) <= k` and `d_X(p_+, q_+) <= k`.
fn scan_geodesics(ball: &BallIndex, k: u64) -> EpsilonEstimate {
    let table = ball.pair_table();
    let n = ball.len() as u32;
    let pg = |u: u32, v: u32| &table[u as usize * n as usize + v as usize];
    let near: Vec<Vec<u32>> = (0..n)
        .map(|u| (0..n).filter(|&v| ball.xd(u, v) <= k).collect())
        .collect();

    type Hit = (u64, (u32, u32, u32));
    let directed = |a: &[u32], b: &[u32]| -> u64 {
        a.iter()
            .map(|&u| b.iter().map(|&w| ball.xd(u, w)).min().unwrap_or(0))
            .max()
            .unwrap_or(0)
    };
    let unmatched = |full: &[Comp], other_sparse: &[Comp]| -> u64 {
        full.iter()
            .filter(|s| {
                !other_sparse
                    .iter()
                    .any(|t| t.factor == s.factor && t.coset == s.coset)
            })
            .map(|s| ball.xd(s.s_minus, s.s_plus))
            .max()
            .unwrap_or(0)
    };
    let gaps = |a: &[Comp], b: &[Comp]| -> u64 {
        let mut m = 0;
        for s in a {
            for t in b {
                if s.factor == t.factor && s.coset == t.coset {
                    m = m.max(ball.xd(s.s_minus, t.s_minus).max(ball.xd(s.s_plus, t.s_plus)));
                }
            }
        }
        m
    };
    let results: Vec<[Option<Hit>; 3]> = (0..n)
        .into_par_iter()
        .map(|x| {
            let p = pg(0, x);
            let mut best: [Option<Hit>; 3] = [None, None, None];
            let mut offer = |slot: usize, v: u64, key: (u32, u32, u32)| {
                let replace = match best[slot] {
                    None => true,
                    Some((bv, bk)) => v > bv || (v == bv && key < bk),
                };
                if replace {
                    best[slot] = Some((v, key));
                }
            };
            for &y in &near[0] {
                for &z in &near[x as usize] {
                    let q = pg(y, z);
                    let key = (x, y, z);
                    offer(0, directed(&p.verts, &q.verts).max(directed(&q.verts, &p.verts)), key);
                    offer(1, unmatched(&p.full, &q.sparse).max(unmatched(&q.full, &p.sparse)), key);
                    offer(2, gaps(&p.full, &q.full), key);
                }
            }
            best
        })
        .collect();
    let mut clauses: [Option<Hit>; 3] = [None, None, None];
    for row in results {
        for (slot, hit) in row.into_iter().enumerate() {
            if let Some((v, key)) = hit {
                let replace = match clauses[slot] {
                    None => true,
                    Some((bv, bk)) => v > bv || (v == bv && key < bk),
                };
                if replace {
                    clauses[slot] = Some((v, key));
                }
            }
        }
    }
    let val = |s: usize| clauses[s].map(|h| h.0).unwrap_or(0);
    let value = val(0).max(val(1)).max(val(2));
    let witness = clauses
        .iter()
        .flatten()
        .find(|h| h.0 == value)
        .map(|&(_, (x, y, z))| (geodesic_path(ball, 0, x), geodesic_path(ball, y, z)));
    EpsilonEstimate {
        lambda: Ratio::from_integer(1),
        c: Ratio::from_integer(0),
        k,
        radius: ball.radius,
        value,
        clause_i: val(0),
        clause_ii: val(1),
        clause_iii: val(2),
        witness,
        status: ScanStatus::ExhaustiveAtRadius,
        paths: (0..n).map(|x| (near[0].len() * near[x as usize].len()) as u64).sum(),
    }
}

pub fn estimate_epsilon(
    group: &GroupSpec,
    lambda: Ratio<i64>,
    c: Ratio<i64>,
    k: u64,
    radius: u32,
    caps: &Caps,
) -> Result<EpsilonEstimate> {
    if !whitelisted(lambda, c, k) {
        return Err(Error::Precondition(format!(
            "epsilon({lambda}, {c}, {k}) is outside the supported parameter set"
        )));
    }
    Caps::check("relative radius", radius as u64, caps.relative_radius as u64)?;
    let ball = BallIndex::new(group, radius, caps)?;
    Ok(estimate_epsilon_on(&ball, lambda, c, k, caps))
}

pub(crate) fn estimate_epsilon_on(
    ball: &BallIndex,
    lambda: Ratio<i64>,
    c: Ratio<i64>,
    k: u64,
    caps: &Caps,
) -> EpsilonEstimate {
    if k > 0 {
        scan_geodesics(ball, k)
    } else {
        scan_same_endpoints(ball, lambda, c, caps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Ratio<i64> {
        Ratio::from_integer(n)
    }

    #[test]
    fn whitelist() {
        assert!(whitelisted(r(1), r(0), 7));
        assert!(whitelisted(r(1), r(4), 0));
        assert!(whitelisted(r(3), r(0), 0));
        assert!(!whitelisted(r(2), r(0), 0));
        assert!(!whitelisted(r(1), r(2), 1));
        let g = GroupSpec::desk();
        assert!(matches!(
            estimate_epsilon(&g, r(2), r(1), 0, 2, &Caps::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn free_group_geodesic_entries_vanish() {
        let g = GroupSpec::from_names(&[], &["x", "y"]).unwrap();
        for (l, c) in [(1, 0), (3, 0)] {
            let e = estimate_epsilon(&g, r(l), r(c), 0, 2, &Caps::default()).unwrap();
            assert_eq!(e.value, 0, "({l},{c})");
        }
        // 1 -> x -> 1 against the empty path: one spare letter per unit of c/2
        let e = estimate_epsilon(&g, r(1), r(2), 0, 2, &Caps::default()).unwrap();
        assert_eq!((e.value, e.clause_i), (1, 1));
        let e = estimate_epsilon(&g, r(1), r(4), 0, 2, &Caps::default()).unwrap();
        assert_eq!((e.value, e.clause_i), (2, 2));
    }

    #[test]
    fn geodesics_share_phase_vertices() {
        let g = GroupSpec::desk();
        let e = estimate_epsilon(&g, r(1), r(0), 0, 2, &Caps::default()).unwrap();
        assert_eq!(e.phase_value(), 0);
        // a norm-one syllable as an H~ edge is unmatched by the X-edge spelling
        assert_eq!(e.clause_ii, 1);
    }

    #[test]
    fn geodesic_scan_agrees_with_general_scan_at_k0() {
        let g = GroupSpec::desk();
        let ball = BallIndex::new(&g, 2, &Caps::default()).unwrap();
        let a = scan_geodesics(&ball, 0);
        let b = scan_same_endpoints(&ball, r(1), r(0), &Caps::default());
        assert_eq!(
            (a.clause_i, a.clause_ii, a.clause_iii),
            (b.clause_i, b.clause_ii, b.clause_iii)
        );
    }
}
