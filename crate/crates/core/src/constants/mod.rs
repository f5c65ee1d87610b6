//! Estimated hyperbolicity and coset-penetration constants, and the derived
//! constant chain `tau`, `eta`.
//!
//! Every estimate is a lower bound stamped with the X-radius of the ball it
//! was computed on, plus a stability flag (unchanged over the last two radii).

mod ball;
mod epsilon;
mod polygon;

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::lattice::{l1, Lattice};
use crate::LAMBDA_0;

pub(crate) use ball::BallIndex;
pub use epsilon::{estimate_epsilon, whitelisted, EpsilonEstimate, ScanStatus};
pub use polygon::{PolygonEstimate, PolygonWitness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub value: u64,
    pub radius: u32,
    pub triangles: u64,
    /// Triangle `(1, x, y)` attaining the value.
    pub witness: Option<[String; 3]>,
}

fn delta_on(ball: &BallIndex) -> DeltaEstimate {
    let n = ball.len() as u32;
    let table = ball.pair_table();
    let verts = |u: u32, v: u32| &table[u as usize * n as usize + v as usize].verts;
    let side_gap = |side: &[u32], others: [&[u32]; 2]| -> u64 {
        side.iter()
            .map(|&u| {
                others
                    .iter()
                    .flat_map(|o| o.iter())
                    .map(|&w| ball.rd(u, w))
                    .min()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    };
    let best = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = (0u64, (0u32, 0u32));
            for y in 0..n {
                let (a, b, c) = (verts(0, x), verts(x, y), verts(y, 0));
                let d = side_gap(a, [b, c])
                    .max(side_gap(b, [a, c]))
                    .max(side_gap(c, [a, b]));
                if d > best.0 {
                    best = (d, (x, y));
                }
            }
            best
        })
        .reduce(
            || (0, (0, 0)),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let name = |v: u32| ball.group.format(&ball.elems[v as usize]);
    DeltaEstimate {
        value: best.0,
        radius: ball.radius,
        triangles: n as u64 * n as u64,
        witness: (best.0 > 0).then(|| ["1".to_string(), name(best.1 .0), name(best.1 .1)]),
    }
}

/// Thinness of geodesic triangles `(1, x, y)` with `x, y` in `ball_X(radius)`:
/// the least `d` with every side in the closed `d`-neighbourhood of the other two.
pub fn estimate_delta(group: &GroupSpec, radius: u32, caps: &Caps) -> Result<DeltaEstimate> {
    Caps::check("relative radius", radius as u64, caps.relative_radius as u64)?;
    Ok(delta_on(&BallIndex::new(group, radius, caps)?))
}

/// Least `D` with `sum_{p in S} d_X(p_-, p_+) <= D n` over the enumerated
/// polygons with `n <= max_n` sides.
pub fn estimate_d(group: &GroupSpec, radius: u32, max_n: u32, caps: &Caps) -> Result<PolygonEstimate> {
    if max_n > 5 {
        return Err(Error::Precondition(format!("polygon size {max_n} exceeds 5")));
    }
    Caps::check("relative radius", radius as u64, caps.relative_radius as u64)?;
    Ok(polygon::scan_polygons(&BallIndex::new(group, radius, caps)?, max_n))
}

/// The seven lower bounds for `eta`, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaReport {
    pub bounds: [u64; 7],
    pub eta: u64,
}

pub const ETA_BOUND_NAMES: [&str; 7] = [
    "e(1,2,0)",
    "3 e(1,4,0)",
    "2 e(1,4,0) + tau",
    "2 e(1,4,0) + e(1,2,0) + 3 tau",
    "2 e(1,2,0) + e(1,0,k)",
    "2 e(1,2,0) + 2 e(1,0,k)",
    "e(3,0,0)",
];

/// `eta = 1 + max` of the bounds; `e10k` is `e(1, 0, e(1,4,0))`.
pub fn compute_eta(e120: u64, e140: u64, e10k: u64, e300: u64, tau: u64) -> EtaReport {
    let bounds = [
        e120,
        3 * e140,
        2 * e140 + tau,
        2 * e140 + e120 + 3 * tau,
        2 * e120 + e10k,
        2 * e120 + 2 * e10k,
        e300,
    ];
    EtaReport {
        bounds,
        eta: 1 + bounds.iter().copied().max().unwrap_or(0),
    }
}

/// Certified `lambda` with `|g|_Y >= lambda |j|` for every `g` in `h^j B`.
///
/// `|h^j b|_1 >= |j| dist_1(h, span_R B)`, and `|g|_1 <= max_y |y|_1 |g|_Y`.
/// The L1 distance to a subspace is attained where as many coordinates vanish
/// as the subspace has dimensions, so it is found by exact vertex enumeration.
pub fn compute_lambda_abelian(b: &Lattice, h: &[i64], y: &[Vec<i64>]) -> Result<Ratio<i64>> {
    let dim = b.dim();
    if h.len() != dim {
        return Err(Error::Precondition(format!(
            "element of length {} in a lattice of dimension {dim}",
            h.len()
        )));
    }
    if b.with_vector(h).rank() <= b.rank() {
        return Err(Error::RankCondition(format!(
            "rank of B is {} and adding h leaves it at {}",
            b.rank(),
            b.with_vector(h).rank()
        )));
    }
    let dist = l1_distance_to_span(b.basis(), h);
    let spread = y.iter().map(|v| l1(v)).max().unwrap_or(0);
    if spread == 0 {
        return Err(Error::Precondition("empty generating set".into()));
    }
    Ok(dist / Ratio::from_integer(spread as i64))
}

fn l1_distance_to_span(basis: &[Vec<i64>], h: &[i64]) -> Ratio<i64> {
    let dim = h.len();
    let r = basis.len();
    let norm = |x: &[Ratio<i64>]| -> Ratio<i64> {
        (0..dim)
            .map(|i| {
                let v = Ratio::from_integer(h[i])
                    + (0..r)
                        .map(|k| x[k] * Ratio::from_integer(basis[k][i]))
                        .sum::<Ratio<i64>>();
                if v < Ratio::from_integer(0) {
                    -v
                } else {
                    v
                }
            })
            .sum()
    };
    if r == 0 {
        return Ratio::from_integer(l1(h) as i64);
    }
    let mut best: Option<Ratio<i64>> = None;
    for coords in subsets(dim, r) {
        // sum_k x_k basis[k][i] = -h[i] for i in coords
        let mut m: Vec<Vec<Ratio<i64>>> = coords
            .iter()
            .map(|&i| {
                let mut row: Vec<Ratio<i64>> =
                    (0..r).map(|k| Ratio::from_integer(basis[k][i])).collect();
                row.push(Ratio::from_integer(-h[i]));
                row
            })
            .collect();
        if let Some(x) = solve_square(&mut m, r) {
            let v = norm(&x);
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    }
    best.unwrap_or_else(|| norm(&vec![Ratio::from_integer(0); r]))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn solve_square(m: &mut [Vec<Ratio<i64>>], r: usize) -> Option<Vec<Ratio<i64>>> {
    let zero = Ratio::from_integer(0);
    for col in 0..r {
        let piv = (col..r).find(|&i| m[i][col] != zero)?;
        m.swap(col, piv);
        for i in 0..r {
            if i != col && m[i][col] != zero {
                let f = m[i][col] / m[col][col];
                for j in col..=r {
                    let t = m[col][j] * f;
                    m[i][j] -= t;
                }
            }
        }
    }
    Some((0..r).map(|i| m[i][r] / m[i][i]).collect())
}

/// Radii used to assemble a ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerConfig {
    /// Increasing radii for `e(1,0,0)`, `e(1,2,0)`, `e(3,0,0)`; stability compares the last two.
    pub epsilon_radii: Vec<u32>,
    /// Radii for the expensive entries `e(1,4,0)` and `e(1,0,e(1,4,0))`.
    pub heavy_radii: Vec<u32>,
    pub delta_radius: u32,
    pub polygon_radius: u32,
    pub polygon_max_n: u32,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        LedgerConfig {
            epsilon_radii: vec![3, 4],
            heavy_radii: vec![2, 3],
            delta_radius: 3,
            polygon_radius: 3,
            polygon_max_n: 3,
        }
    }
}

impl LedgerConfig {
    /// Every scan at the same radius, for quick runs.
    pub fn at_radius(radius: u32) -> Self {
        LedgerConfig {
            epsilon_radii: vec![radius],
            heavy_radii: vec![radius],
            delta_radius: radius,
            polygon_radius: radius,
            polygon_max_n: 3,
        }
    }

    /// Two consecutive radii ending at `radius` for every epsilon entry.
    pub fn up_to(radius: u32) -> Self {
        let radii = if radius > 1 { vec![radius - 1, radius] } else { vec![radius] };
        LedgerConfig {
            epsilon_radii: radii.clone(),
            heavy_radii: radii,
            delta_radius: radius,
            polygon_radius: radius.min(3),
            polygon_max_n: 3,
        }
    }

    fn max_radius(&self) -> u32 {
        self.epsilon_radii
            .iter()
            .chain(&self.heavy_radii)
            .copied()
            .chain([self.delta_radius, self.polygon_radius])
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonEntry {
    pub estimate: EpsilonEstimate,
    /// `(radius, value)` for each scanned radius.
    pub history: Vec<(u32, u64)>,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    pub lambda_0: i64,
    pub delta: DeltaEstimate,
    /// Keyed by `"lambda,c,k"`.
    pub epsilon: BTreeMap<String, EpsilonEntry>,
    pub d_hat: PolygonEstimate,
    pub d_hat_stable: bool,
    pub tau: u64,
    pub eta: u64,
    pub eta_bounds: [u64; 7],
}

pub fn epsilon_key(lambda: Ratio<i64>, c: Ratio<i64>, k: u64) -> String {
    format!("{lambda},{c},{k}")
}

impl ConstantsLedger {
    pub fn epsilon_value(&self, lambda: i64, c: i64, k: u64) -> Result<u64> {
        let key = epsilon_key(Ratio::from_integer(lambda), Ratio::from_integer(c), k);
        self.epsilon
            .get(&key)
            .map(|e| e.estimate.value)
            .ok_or(Error::MissingConstant(format!("epsilon({key})")))
    }

    /// `e(1, 0, e(1,4,0))`.
    pub fn epsilon_geodesic_k(&self) -> Result<u64> {
        let k = self.epsilon_value(1, 4, 0)?;
        self.epsilon_value(1, 0, k)
    }

    /// Recomputes `eta` from the stored table.
    pub fn recompute_eta(&self) -> Result<EtaReport> {
        Ok(compute_eta(
            self.epsilon_value(1, 2, 0)?,
            self.epsilon_value(1, 4, 0)?,
            self.epsilon_geodesic_k()?,
            self.epsilon_value(3, 0, 0)?,
            self.tau,
        ))
    }

    pub fn unstable(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .epsilon
            .iter()
            .filter(|(_, e)| !e.stable)
            .map(|(k, _)| format!("epsilon({k})"))
            .collect();
        if !self.d_hat_stable {
            out.push("D".into());
        }
        out
    }

    pub fn capped(&self) -> bool {
        self.epsilon
            .values()
            .any(|e| e.estimate.status == ScanStatus::Capped)
    }

    /// Builds every constant the combination theorems use.
    pub fn build(group: &GroupSpec, config: &LedgerConfig, caps: &Caps) -> Result<Self> {
        if config.epsilon_radii.is_empty() || config.heavy_radii.is_empty() {
            return Err(Error::Precondition("no epsilon radius given".into()));
        }
        Caps::check(
            "relative radius",
            config.max_radius() as u64,
            caps.relative_radius as u64,
        )?;
        let mut radii: Vec<u32> = config
            .epsilon_radii
            .iter()
            .chain(&config.heavy_radii)
            .copied()
            .collect();
        radii.sort_unstable();
        radii.dedup();
        let balls: Vec<BallIndex> = radii
            .iter()
            .map(|&r| BallIndex::new(group, r, caps))
            .collect::<Result<_>>()?;
        let scan = |lambda: i64, c: i64, k: u64, at: &[u32]| -> EpsilonEntry {
            let (l, c) = (Ratio::from_integer(lambda), Ratio::from_integer(c));
            let mut history = Vec::new();
            let mut last = None;
            for ball in balls.iter().filter(|b| at.contains(&b.radius)) {
                let est = epsilon::estimate_epsilon_on(ball, l, c, k, caps);
                history.push((ball.radius, est.value));
                last = Some(est);
            }
            let stable = history.len() >= 2
                && history[history.len() - 1].1 == history[history.len() - 2].1
                && last.as_ref().is_some_and(|e| e.status == ScanStatus::ExhaustiveAtRadius);
            EpsilonEntry {
                estimate: last.expect("at least one radius"),
                history,
                stable,
            }
        };
        let key = |l: i64, c: i64, k: u64| {
            epsilon_key(Ratio::from_integer(l), Ratio::from_integer(c), k)
        };
        let mut epsilon = BTreeMap::new();
        for (l, c) in [(1, 0), (1, 2), (3, 0)] {
            epsilon.insert(key(l, c, 0), scan(l, c, 0, &config.epsilon_radii));
        }
        epsilon.insert(key(1, 4, 0), scan(1, 4, 0, &config.heavy_radii));
        let k = epsilon[&key(1, 4, 0)].estimate.value;
        epsilon
            .entry(key(1, 0, k))
            .or_insert_with(|| scan(1, 0, k, &config.heavy_radii));

        let delta = if let Some(b) = balls.iter().find(|b| b.radius == config.delta_radius) {
            delta_on(b)
        } else {
            estimate_delta(group, config.delta_radius, caps)?
        };
        let d_hat = estimate_d(group, config.polygon_radius, config.polygon_max_n, caps)?;
        let d_hat_stable = config.polygon_radius > 0
            && estimate_d(group, config.polygon_radius - 1, config.polygon_max_n, caps)?.value
                == d_hat.value;
        let tau = 5 * d_hat.value;
        let mut ledger = ConstantsLedger {
            lambda_0: LAMBDA_0,
            delta,
            epsilon,
            d_hat,
            d_hat_stable,
            tau,
            eta: 0,
            eta_bounds: [0; 7],
        };
        let eta = ledger.recompute_eta()?;
        ledger.eta = eta.eta;
        ledger.eta_bounds = eta.bounds;
        Ok(ledger)
    }
}
