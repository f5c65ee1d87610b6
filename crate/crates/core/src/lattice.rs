//! Sublattices of `Z^n` in row Hermite normal form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subgroup of `Z^dim`, stored as the nonzero rows of its Hermite normal
/// form (positive pivots, entries above each pivot reduced into `[0, pivot)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<i64>>,
}

/// All vectors of `Z^dim` with L1 norm exactly `k`, ascending lexicographically.
pub fn vectors_of_norm(dim: usize, k: u64) -> Vec<Vec<i64>> {
    fn rec(dim: usize, k: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() + 1 == dim {
            if k == 0 {
                prefix.push(0);
                out.push(prefix.clone());
                prefix.pop();
            } else {
                for x in [-k, k] {
                    prefix.push(x);
                    out.push(prefix.clone());
                    prefix.pop();
                }
            }
            return;
        }
        for x in -k..=k {
            prefix.push(x);
            rec(dim, k - x.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(dim, k as i64, &mut Vec::with_capacity(dim), &mut out);
    out
}

pub fn l1(v: &[i64]) -> u64 {
    v.iter().map(|c| c.unsigned_abs()).sum()
}

fn axpy(y: &mut [i64], a: i64, x: &[i64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Row echelon form `H = U * A` by unimodular row operations, returned with
/// `U` and the pivot columns. Zero rows of `H` come last.
fn echelon(a: &[Vec<i64>], ncols: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<usize>) {
    let m = a.len();
    let mut h: Vec<Vec<i64>> = a.to_vec();
    let mut u: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            let mut row = vec![0; m];
            row[i] = 1;
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| h[i][col] != 0)
                .min_by_key(|&i| h[i][col].unsigned_abs());
            let Some(best) = best else { break };
            h.swap(r, best);
            u.swap(r, best);
            let mut done = true;
            for i in r + 1..m {
                if h[i][col] != 0 {
                    let q = h[i][col].div_euclid(h[r][col]);
                    let (hr, ur) = (h[r].clone(), u[r].clone());
                    axpy(&mut h[i], -q, &hr);
                    axpy(&mut u[i], -q, &ur);
                    if h[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[r][col] == 0 {
            continue;
        }
        if h[r][col] < 0 {
            h[r].iter_mut().for_each(|x| *x = -*x);
            u[r].iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..r {
            let q = h[i][col].div_euclid(h[r][col]);
            if q != 0 {
                let (hr, ur) = (h[r].clone(), u[r].clone());
                axpy(&mut h[i], -q, &hr);
                axpy(&mut u[i], -q, &ur);
            }
        }
        pivots.push(col);
        r += 1;
    }
    (h, u, pivots)
}

impl Lattice {
    pub fn new(dim: usize, generators: &[Vec<i64>]) -> Result<Self> {
        for g in generators {
            if g.len() != dim {
                return Err(Error::InvalidSpec(format!(
                    "lattice generator of length {} in dimension {dim}",
                    g.len()
                )));
            }
        }
        let (h, _, pivots) = echelon(generators, dim);
        Ok(Lattice {
            dim,
            basis: h.into_iter().take(pivots.len()).collect(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        Lattice {
            dim,
            basis: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Lattice::scaled_axes(dim, &vec![1; dim])
    }

    /// `diag(scales)`; a zero scale drops that axis.
    pub fn scaled_axes(dim: usize, scales: &[i64]) -> Self {
        let gens: Vec<Vec<i64>> = scales
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut v = vec![0; dim];
                v[i] = s;
                v
            })
            .collect();
        Lattice::new(dim, &gens).expect("dimensions agree")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn pivot(row: &[i64]) -> usize {
        row.iter().position(|&x| x != 0).expect("basis rows are nonzero")
    }

    /// Canonical representative of `v + L`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut v = v.to_vec();
        for row in &self.basis {
            let p = Lattice::pivot(row);
            let q = v[p].div_euclid(row[p]);
            if q != 0 {
                axpy(&mut v, -q, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.dim && self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let gens: Vec<Vec<i64>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Lattice::new(self.dim, &gens).expect("same dimension")
    }

    pub fn with_vector(&self, v: &[i64]) -> Lattice {
        let mut gens = self.basis.clone();
        gens.push(v.to_vec());
        Lattice::new(self.dim, &gens).expect("same dimension")
    }

    pub fn intersection(&self, other: &Lattice) -> Lattice {
        let k1 = self.basis.len();
        let stacked: Vec<Vec<i64>> = self.basis.iter().chain(&other.basis).cloned().collect();
        if stacked.is_empty() {
            return Lattice::zero(self.dim);
        }
        let (_, u, pivots) = echelon(&stacked, self.dim);
        let gens: Vec<Vec<i64>> = u[pivots.len()..]
            .iter()
            .map(|coeffs| {
                let mut v = vec![0; self.dim];
                for (c, b) in coeffs[..k1].iter().zip(&self.basis) {
                    axpy(&mut v, *c, b);
                }
                v
            })
            .collect();
        Lattice::new(self.dim, &gens).expect("same dimension")
    }

    /// `[Z^dim : L]`, or `None` when the rank is not full.
    pub fn index(&self) -> Option<u64> {
        if self.rank() < self.dim {
            return None;
        }
        Some(
            self.basis
                .iter()
                .map(|r| r[Lattice::pivot(r)] as u64)
                .product(),
        )
    }

    /// Integer coefficients `c` with `sum c_i gens_i = target`, if any.
    pub fn solve(dim: usize, gens: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
        if gens.is_empty() {
            return target.iter().all(|&x| x == 0).then(Vec::new);
        }
        let (h, u, pivots) = echelon(gens, dim);
        let mut t = target.to_vec();
        let mut z = vec![0; gens.len()];
        for (i, &p) in pivots.iter().enumerate() {
            if t[p] % h[i][p] != 0 {
                return None;
            }
            z[i] = t[p] / h[i][p];
            axpy(&mut t, -z[i], &h[i]);
        }
        if t.iter().any(|&x| x != 0) {
            return None;
        }
        let mut coeffs = vec![0; gens.len()];
        for (i, zi) in z.iter().enumerate() {
            axpy(&mut coeffs, *zi, &u[i]);
        }
        Some(coeffs)
    }

    /// `min_{w in L} |v - w|_1` together with a minimiser.
    pub fn closest_l1(&self, v: &[i64]) -> (u64, Vec<i64>) {
        let bound = l1(&self.reduce(v));
        for r in 0..=bound {
            for u in vectors_of_norm(self.dim, r) {
                let w: Vec<i64> = v.iter().zip(&u).map(|(a, b)| a - b).collect();
                if self.contains(&w) {
                    return (r, w);
                }
            }
        }
        unreachable!("the reduced representative gives a lattice point at distance `bound`")
    }

    /// `min |a|_1` over `a` in `self` but not in `sub`, with a minimiser.
    pub fn min_norm_outside(&self, sub: &Lattice) -> Option<(u64, Vec<i64>)> {
        let bound = self
            .basis
            .iter()
            .filter(|b| !sub.contains(b))
            .map(|b| l1(b))
            .min()?;
        for r in 1..=bound {
            for v in vectors_of_norm(self.dim, r) {
                if self.contains(&v) && !sub.contains(&v) {
                    return Some((r, v));
                }
            }
        }
        unreachable!("a basis vector outside `sub` has norm `bound`")
    }

    /// Shortest nonzero vector in the L1 norm.
    pub fn min_norm(&self) -> Option<(u64, Vec<i64>)> {
        self.min_norm_outside(&Lattice::zero(self.dim))
    }

    /// Coordinates of `v` in the stored basis.
    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        Lattice::solve(self.dim, &self.basis, v)
    }

    pub fn combination(&self, coeffs: &[i64]) -> Vec<i64> {
        let mut v = vec![0; self.dim];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            axpy(&mut v, *c, b);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_of_norm_counts() {
        assert_eq!(vectors_of_norm(2, 0), vec![vec![0, 0]]);
        assert_eq!(vectors_of_norm(2, 1).len(), 4);
        assert_eq!(vectors_of_norm(2, 3).len(), 12);
        assert_eq!(vectors_of_norm(3, 2).len(), 18);
        let v = vectors_of_norm(2, 2);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(v, sorted);
    }

    #[test]
    fn hnf_is_canonical() {
        let a = Lattice::new(2, &[vec![2, 0], vec![0, 1]]).unwrap();
        let b = Lattice::new(2, &[vec![2, 1], vec![0, 1], vec![4, 3]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.index(), Some(2));
        assert!(!a.contains(&[1, 0]));
        assert!(a.contains(&[-2, 5]));
    }

    #[test]
    fn reduce_is_a_transversal() {
        let l = Lattice::new(2, &[vec![3, 1], vec![0, 2]]).unwrap();
        for x in -5..5 {
            for y in -5..5 {
                let r = l.reduce(&[x, y]);
                let diff = [x - r[0], y - r[1]];
                assert!(l.contains(&diff));
                assert_eq!(l.reduce(&r), r);
            }
        }
    }

    #[test]
    fn intersection_of_axes_and_diagonal() {
        let a = Lattice::new(2, &[vec![1, 0]]).unwrap();
        let d = Lattice::new(2, &[vec![1, 1]]).unwrap();
        assert!(a.intersection(&d).is_zero());
        let x = Lattice::new(2, &[vec![2, 0], vec![0, 3]]).unwrap();
        let y = Lattice::new(2, &[vec![3, 0], vec![0, 2]]).unwrap();
        assert_eq!(
            x.intersection(&y),
            Lattice::new(2, &[vec![6, 0], vec![0, 6]]).unwrap()
        );
        let z = Lattice::new(3, &[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let w = Lattice::new(3, &[vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(z.intersection(&w), Lattice::new(3, &[vec![1, 0, -1]]).unwrap());
    }

    #[test]
    fn solve_finds_coefficients() {
        let gens = vec![vec![1, 0], vec![1, 1]];
        let c = Lattice::solve(2, &gens, &[0, 3]).unwrap();
        assert_eq!(c, vec![-3, 3]);
        assert!(Lattice::solve(2, &[vec![2, 0]], &[1, 0]).is_none());
    }

    #[test]
    fn closest_and_min_norms() {
        let l = Lattice::new(2, &[vec![5, 0], vec![0, 5]]).unwrap();
        assert_eq!(l.closest_l1(&[3, 1]).0, 3);
        assert_eq!(l.min_norm().unwrap().0, 5);
        let k = Lattice::new(2, &[vec![5, 0]]).unwrap();
        assert_eq!(l.min_norm_outside(&k).unwrap(), (5, vec![0, -5]));
        assert!(k.min_norm_outside(&l).is_none());
    }
}
