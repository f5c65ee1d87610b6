//! Polygon scan for the isolated-component sum constant `D`.
//!
//! A polygon starts at 1 and has vertices in `ball_X(R)`. Sides in `S` are
//! single `H~` edges; the remaining sides use the realisation with the fewest
//! components (norm-one syllables as X edges), since extra components can only
//! destroy isolation of the sides in `S`. By left invariance and rotation the
//! first side is always in `S`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::{BallIndex, PairGeodesic};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonEstimate {
    pub value: u64,
    pub radius: u32,
    pub max_n: u32,
    /// Vertices of a polygon attaining the value, and the sides in `S`.
    pub witness: Option<PolygonWitness>,
    pub polygons: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonWitness {
    pub vertices: Vec<String>,
    pub isolated_sides: Vec<usize>,
    pub sum: u64,
}

/// Factor `f` with `u^-1 v` a nontrivial element of `A_f`.
fn h_factor(ball: &BallIndex, u: u32, v: u32) -> Option<u8> {
    if u == v {
        return None;
    }
    (0..ball.coset.len())
        .find(|&f| ball.coset[f][u as usize] == ball.coset[f][v as usize])
        .map(|f| f as u8)
}

struct Best {
    ratio_num: u64,
    n: u64,
    verts: Vec<u32>,
    sides: Vec<usize>,
}

impl Best {
    fn value(&self) -> u64 {
        if self.n == 0 {
            0
        } else {
            self.ratio_num.div_ceil(self.n)
        }
    }

    fn better_than(&self, other: &Best) -> bool {
        let (a, b) = (self.value(), other.value());
        a > b || (a == b && (self.n, &self.verts, &self.sides) < (other.n, &other.verts, &other.sides))
    }
}

fn evaluate(
    ball: &BallIndex,
    table: &[PairGeodesic],
    verts: &[u32],
    best: &mut Option<Best>,
    count: &mut u64,
) {
    let n = verts.len();
    let size = ball.len();
    let side = |i: usize| (verts[i], verts[(i + 1) % n]);
    let hf: Vec<Option<u8>> = (0..n).map(|i| h_factor(ball, side(i).0, side(i).1)).collect();
    if hf[0].is_none() {
        return;
    }
    let geo = |i: usize| {
        let (u, v) = side(i);
        &table[u as usize * size + v as usize]
    };
    let candidates: Vec<usize> = (1..n).filter(|&i| hf[i].is_some()).collect();
    for mask in 0u32..(1 << candidates.len()) {
        *count += 1;
        let mut in_s = vec![false; n];
        in_s[0] = true;
        for (b, &i) in candidates.iter().enumerate() {
            if mask & (1 << b) != 0 {
                in_s[i] = true;
            }
        }
        let first_edge = |i: usize| if in_s[i] { hf[i] } else { geo(i).first_h };
        let last_edge = |i: usize| if in_s[i] { hf[i] } else { geo(i).last_h };
        let ok = (0..n).filter(|&i| in_s[i]).all(|i| {
            let f = hf[i].expect("S side is an H edge");
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            if last_edge(prev) == Some(f) || first_edge(next) == Some(f) {
                return false;
            }
            let coset = ball.coset[f as usize][side(i).0 as usize];
            (0..n).filter(|&j| j != i).all(|j| {
                if in_s[j] {
                    !(hf[j] == Some(f) && ball.coset[f as usize][side(j).0 as usize] == coset)
                } else {
                    !geo(j)
                        .sparse
                        .iter()
                        .any(|c| c.factor == f && c.coset == coset)
                }
            })
        });
        if !ok {
            continue;
        }
        let sum: u64 = (0..n)
            .filter(|&i| in_s[i])
            .map(|i| ball.xd(side(i).0, side(i).1))
            .sum();
        let cand = Best {
            ratio_num: sum,
            n: n as u64,
            verts: verts.to_vec(),
            sides: (0..n).filter(|&i| in_s[i]).collect(),
        };
        if best.as_ref().is_none_or(|b| cand.better_than(b)) {
            *best = Some(cand);
        }
    }
}

fn extend(
    ball: &BallIndex,
    table: &[PairGeodesic],
    verts: &mut Vec<u32>,
    target: usize,
    best: &mut Option<Best>,
    count: &mut u64,
) {
    if verts.len() == target {
        if verts[target - 1] != verts[0] {
            evaluate(ball, table, verts, best, count);
        }
        return;
    }
    let last = *verts.last().expect("nonempty");
    for w in 0..ball.len() as u32 {
        if w != last {
            verts.push(w);
            extend(ball, table, verts, target, best, count);
            verts.pop();
        }
    }
}

pub(crate) fn scan_polygons(ball: &BallIndex, max_n: u32) -> PolygonEstimate {
    let table = ball.pair_table();
    let starts: Vec<u32> = (1..ball.len() as u32)
        .filter(|&v| h_factor(ball, 0, v).is_some())
        .collect();
    let results: Vec<(Option<Best>, u64)> = starts
        .par_iter()
        .map(|&v1| {
            let mut best = None;
            let mut count = 0;
            for n in 2..=max_n.max(2) as usize {
                let mut verts = vec![0, v1];
                extend(ball, &table, &mut verts, n, &mut best, &mut count);
            }
            (best, count)
        })
        .collect();
    let mut best: Option<Best> = None;
    let mut polygons = 0;
    for (b, c) in results {
        polygons += c;
        if let Some(b) = b {
            if best.as_ref().is_none_or(|cur| b.better_than(cur)) {
                best = Some(b);
            }
        }
    }
    PolygonEstimate {
        value: best.as_ref().map_or(0, Best::value),
        radius: ball.radius,
        max_n,
        witness: best.map(|b| PolygonWitness {
            vertices: b
                .verts
                .iter()
                .map(|&v| ball.group.format(&ball.elems[v as usize]))
                .collect(),
            isolated_sides: b.sides,
            sum: b.ratio_num,
        }),
        polygons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::group::GroupSpec;

    #[test]
    fn bigon_forces_one() {
        let g = GroupSpec::desk();
        let ball = BallIndex::new(&g, 1, &Caps::default()).unwrap();
        let est = scan_polygons(&ball, 2);
        assert_eq!(est.value, 1);
        let w = est.witness.unwrap();
        assert_eq!(w.vertices.len(), 2);
        assert_eq!(w.sum, 1);
    }

    #[test]
    fn no_peripherals_no_polygons() {
        let g = GroupSpec::from_names(&[], &["x", "y"]).unwrap();
        let ball = BallIndex::new(&g, 2, &Caps::default()).unwrap();
        let est = scan_polygons(&ball, 4);
        assert_eq!(est.value, 0);
        assert!(est.witness.is_none());
    }
}
