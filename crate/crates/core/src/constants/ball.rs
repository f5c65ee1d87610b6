//! Indexed `X`-ball with distance tables, shared by the constant scans.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::caps::Caps;
use crate::error::Result;
use crate::group::{Element, Factor, GroupSpec, Syllable};
use crate::relcayley::rel_distance;

/// A component of a path whose endpoints lie in the ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Comp {
    pub factor: u8,
    pub coset: u32,
    pub s_minus: u32,
    pub s_plus: u32,
}

/// Geodesic data for an ordered pair of ball vertices.
#[derive(Clone, Debug, Default)]
pub(crate) struct PairGeodesic {
    /// Vertex set shared by all geodesics.
    pub verts: Vec<u32>,
    /// Components when every peripheral syllable is one `H~` edge.
    pub full: Vec<Comp>,
    /// Components when norm-one syllables are `X` edges.
    pub sparse: Vec<Comp>,
    /// Factor of the first and last edge of the sparse realisation, if `H~`.
    pub first_h: Option<u8>,
    pub last_h: Option<u8>,
}

pub(crate) struct BallIndex {
    pub group: GroupSpec,
    pub radius: u32,
    pub elems: Vec<Element>,
    pub index: HashMap<Element, u32>,
    /// `coset[f][v]`: id of the coset `v A_f`.
    pub coset: Vec<Vec<u32>>,
    /// `members[f][c]`: ball vertices of coset `c` of factor `f`.
    pub members: Vec<Vec<Vec<u32>>>,
    /// `x_nbrs[v]`: `(letter index, v x)` for X-letters staying in the ball.
    pub x_nbrs: Vec<Vec<(u8, u32)>>,
    xd: Vec<u16>,
    rd: Vec<u16>,
}

impl BallIndex {
    pub fn new(group: &GroupSpec, radius: u32, caps: &Caps) -> Result<Self> {
        let elems = group.ball_x(radius, caps)?;
        let n = elems.len();
        let index: HashMap<Element, u32> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let m = group.peripheral_count();
        let mut coset = vec![vec![0u32; n]; m];
        let mut members = vec![Vec::new(); m];
        for f in 0..m {
            let mut ids: HashMap<Element, u32> = HashMap::new();
            for (v, e) in elems.iter().enumerate() {
                let key = e.strip_trailing(Factor::Peripheral(f));
                let next = ids.len() as u32;
                let id = *ids.entry(key).or_insert(next);
                if id as usize == members[f].len() {
                    members[f].push(Vec::new());
                }
                members[f][id as usize].push(v as u32);
                coset[f][v] = id;
            }
        }
        let letters = group.x_letters();
        let x_nbrs = elems
            .iter()
            .map(|e| {
                letters
                    .iter()
                    .enumerate()
                    .filter_map(|(li, &l)| {
                        index
                            .get(&e.mul(&group.letter_element(l)))
                            .map(|&w| (li as u8, w))
                    })
                    .collect()
            })
            .collect();
        let rows: Vec<(Vec<u16>, Vec<u16>)> = elems
            .par_iter()
            .map(|u| {
                let inv = u.inverse();
                let mut xr = Vec::with_capacity(n);
                let mut rr = Vec::with_capacity(n);
                for w in &elems {
                    let d = inv.mul(w);
                    xr.push(d.x_length() as u16);
                    rr.push(rel_distance(&d) as u16);
                }
                (xr, rr)
            })
            .collect();
        let mut xd = Vec::with_capacity(n * n);
        let mut rd = Vec::with_capacity(n * n);
        for (xr, rr) in rows {
            xd.extend(xr);
            rd.extend(rr);
        }
        Ok(BallIndex {
            group: group.clone(),
            radius,
            elems,
            index,
            coset,
            members,
            x_nbrs,
            xd,
            rd,
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn xd(&self, u: u32, v: u32) -> u64 {
        self.xd[u as usize * self.elems.len() + v as usize] as u64
    }

    pub fn rd(&self, u: u32, v: u32) -> u64 {
        self.rd[u as usize * self.elems.len() + v as usize] as u64
    }

    pub fn comp(&self, factor: usize, from: u32, to: u32) -> Comp {
        Comp {
            factor: factor as u8,
            coset: self.coset[factor][from as usize],
            s_minus: from,
            s_plus: to,
        }
    }

    /// Geodesic data from `u` to `v`; every geodesic vertex lies in the ball.
    pub fn pair_geodesic(&self, u: u32, v: u32) -> PairGeodesic {
        let start = &self.elems[u as usize];
        let w = start.inverse().mul(&self.elems[v as usize]);
        let mut out = PairGeodesic {
            verts: vec![u],
            ..Default::default()
        };
        let mut cur = start.clone();
        let mut cur_id = u;
        let count = w.syllables().len();
        for (k, s) in w.syllables().iter().enumerate() {
            match s {
                Syllable::Peripheral { factor, vector } => {
                    cur = cur.mul(&Element::from_syllables([s.clone()]));
                    let next = self.index[&cur];
                    let c = self.comp(*factor, cur_id, next);
                    out.full.push(c);
                    let norm: u64 = vector.iter().map(|x| x.unsigned_abs()).sum();
                    if norm >= 2 {
                        out.sparse.push(c);
                        if k == 0 {
                            out.first_h = Some(*factor as u8);
                        }
                        if k + 1 == count {
                            out.last_h = Some(*factor as u8);
                        }
                    }
                    out.verts.push(next);
                    cur_id = next;
                }
                Syllable::Free {
                    generator,
                    exponent,
                } => {
                    let step = Element::free(*generator, exponent.signum());
                    for _ in 0..exponent.unsigned_abs() {
                        cur = cur.mul(&step);
                        cur_id = self.index[&cur];
                        out.verts.push(cur_id);
                    }
                }
            }
        }
        out
    }

    /// `pair_geodesic` for every ordered pair, row-major.
    pub fn pair_table(&self) -> Vec<PairGeodesic> {
        let n = self.len() as u32;
        (0..n)
            .into_par_iter()
            .flat_map_iter(|u| (0..n).map(move |v| (u, v)))
            .map(|(u, v)| self.pair_geodesic(u, v))
            .collect()
    }
}
