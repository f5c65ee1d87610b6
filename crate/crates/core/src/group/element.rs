use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// One free factor of the ambient free product.
///
/// Peripheral factors are the free abelian groups `A_i`; every free generator
/// spans its own infinite cyclic factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Peripheral(usize),
    Free(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Syllable {
    Peripheral { factor: usize, vector: Vec<i64> },
    Free { generator: usize, exponent: i64 },
}

impl Syllable {
    pub fn factor(&self) -> Factor {
        match self {
            Syllable::Peripheral { factor, .. } => Factor::Peripheral(*factor),
            Syllable::Free { generator, .. } => Factor::Free(*generator),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Syllable::Peripheral { vector, .. } => vector.iter().all(|&c| c == 0),
            Syllable::Free { exponent, .. } => *exponent == 0,
        }
    }

    /// Contribution to `|.|_X`: L1 norm of the vector or absolute exponent.
    pub fn x_length(&self) -> u64 {
        match self {
            Syllable::Peripheral { vector, .. } => vector.iter().map(|c| c.unsigned_abs()).sum(),
            Syllable::Free { exponent, .. } => exponent.unsigned_abs(),
        }
    }

    pub fn inverse(&self) -> Syllable {
        match self {
            Syllable::Peripheral { factor, vector } => Syllable::Peripheral {
                factor: *factor,
                vector: vector.iter().map(|c| -c).collect(),
            },
            Syllable::Free {
                generator,
                exponent,
            } => Syllable::Free {
                generator: *generator,
                exponent: -exponent,
            },
        }
    }

    /// Product of two syllables of the same factor; `None` when the factors differ.
    pub fn combine(&self, other: &Syllable) -> Option<Syllable> {
        match (self, other) {
            (
                Syllable::Peripheral { factor: f, vector: u },
                Syllable::Peripheral { factor: g, vector: v },
            ) if f == g => Some(Syllable::Peripheral {
                factor: *f,
                vector: u.iter().zip(v).map(|(a, b)| a + b).collect(),
            }),
            (
                Syllable::Free {
                    generator: f,
                    exponent: a,
                },
                Syllable::Free {
                    generator: g,
                    exponent: b,
                },
            ) if f == g => Some(Syllable::Free {
                generator: *f,
                exponent: a + b,
            }),
            _ => None,
        }
    }

    pub fn peripheral_vector(&self) -> Option<(usize, &[i64])> {
        match self {
            Syllable::Peripheral { factor, vector } => Some((*factor, vector)),
            Syllable::Free { .. } => None,
        }
    }
}

/// A group element in alternating-syllable normal form.
///
/// The constructor functions keep the form canonical: adjacent syllables lie in
/// distinct factors and no syllable is trivial. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element {
    syllables: Vec<Syllable>,
}

impl Element {
    pub fn identity() -> Self {
        Element::default()
    }

    pub fn from_syllables<I: IntoIterator<Item = Syllable>>(syllables: I) -> Self {
        let mut out = Element::identity();
        for s in syllables {
            out.push(s);
        }
        out
    }

    pub fn peripheral(factor: usize, vector: Vec<i64>) -> Self {
        Element::from_syllables([Syllable::Peripheral { factor, vector }])
    }

    pub fn free(generator: usize, exponent: i64) -> Self {
        Element::from_syllables([Syllable::Free {
            generator,
            exponent,
        }])
    }

    /// Append one syllable on the right, merging with the last one if needed.
    pub fn push(&mut self, s: Syllable) {
        if s.is_trivial() {
            return;
        }
        if let Some(last) = self.syllables.last() {
            if let Some(merged) = last.combine(&s) {
                self.syllables.pop();
                if !merged.is_trivial() {
                    self.syllables.push(merged);
                }
                return;
            }
        }
        self.syllables.push(s);
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn syllable_len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn first(&self) -> Option<&Syllable> {
        self.syllables.first()
    }

    pub fn last(&self) -> Option<&Syllable> {
        self.syllables.last()
    }

    pub fn mul(&self, other: &Element) -> Element {
        let mut left = self.syllables.clone();
        let mut rest = other.syllables.iter();
        let mut pending = rest.next();
        while let (Some(l), Some(r)) = (left.last(), pending) {
            match l.combine(r) {
                Some(m) if m.is_trivial() => {
                    left.pop();
                    pending = rest.next();
                }
                Some(m) => {
                    left.pop();
                    left.push(m);
                    pending = rest.next();
                    break;
                }
                None => break,
            }
        }
        if let Some(p) = pending {
            left.push(p.clone());
        }
        left.extend(rest.cloned());
        Element { syllables: left }
    }

    pub fn inverse(&self) -> Element {
        Element {
            syllables: self.syllables.iter().rev().map(Syllable::inverse).collect(),
        }
    }

    /// `g * self * g^-1`.
    pub fn conjugate_by(&self, g: &Element) -> Element {
        g.mul(self).mul(&g.inverse())
    }

    /// Word length `|x|_X` for the standard generating set.
    pub fn x_length(&self) -> u64 {
        self.syllables.iter().map(Syllable::x_length).sum()
    }

    /// `|self^-1 other|_X`.
    pub fn x_distance(&self, other: &Element) -> u64 {
        self.inverse().mul(other).x_length()
    }

    /// The element with its first syllable removed, if that syllable lies in `factor`.
    pub fn strip_leading(&self, factor: Factor) -> Element {
        match self.syllables.first() {
            Some(s) if s.factor() == factor => Element {
                syllables: self.syllables[1..].to_vec(),
            },
            _ => self.clone(),
        }
    }

    /// The element with its last syllable removed, if that syllable lies in `factor`.
    pub fn strip_trailing(&self, factor: Factor) -> Element {
        match self.syllables.last() {
            Some(s) if s.factor() == factor => Element {
                syllables: self.syllables[..self.syllables.len() - 1].to_vec(),
            },
            _ => self.clone(),
        }
    }

    /// Vector of a single-syllable element of peripheral `factor` (zero for the identity).
    pub fn as_peripheral_vector(&self, factor: usize, rank: usize) -> Option<Vec<i64>> {
        match self.syllables.as_slice() {
            [] => Some(vec![0; rank]),
            [Syllable::Peripheral { factor: f, vector }] if *f == factor => Some(vector.clone()),
            _ => None,
        }
    }

    /// Writes `self = u * core * u^-1` with `core` cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (Element, Element) {
        let s = &self.syllables;
        let n = s.len();
        let mut k = 0;
        while n >= 2 * k + 2 && s[k] == s[n - 1 - k].inverse() {
            k += 1;
        }
        let u = Element {
            syllables: s[..k].to_vec(),
        };
        let middle = &s[k..n - k];
        if middle.len() >= 2 && middle[0].factor() == middle[middle.len() - 1].factor() {
            // first and last syllable share a factor: fold the last into the conjugator.
            let last = middle[middle.len() - 1].clone();
            let mut u2 = u.syllables.clone();
            u2.push(last.inverse());
            let u2 = Element::from_syllables(u2);
            let mut core = Element::from_syllables([last]);
            for syl in &middle[..middle.len() - 1] {
                core.push(syl.clone());
            }
            // u2 * core * u2^-1 equals self; core may still need folding.
            let (w, c) = core.cyclic_decomposition();
            return (u2.mul(&w), c);
        }
        (
            u,
            Element {
                syllables: middle.to_vec(),
            },
        )
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.syllables.cmp(&other.syllables)
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Syllable::Peripheral { factor, vector } => {
                write!(f, "H{}(", factor + 1)?;
                for (i, c) in vector.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Syllable::Free {
                generator,
                exponent,
            } => write!(f, "F{}^{}", generator + 1, exponent),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Syllable {
        Syllable::Peripheral {
            factor: 0,
            vector: v.to_vec(),
        }
    }

    fn t(e: i64) -> Syllable {
        Syllable::Free {
            generator: 0,
            exponent: e,
        }
    }

    #[test]
    fn push_merges_and_cancels() {
        let x = Element::from_syllables([p(&[1, 0]), p(&[0, 1]), t(1), t(-1), p(&[1, 1])]);
        assert_eq!(x.syllables(), &[p(&[2, 2])]);
        let y = Element::from_syllables([p(&[1, 0]), p(&[-1, 0])]);
        assert!(y.is_identity());
    }

    #[test]
    fn mul_cancels_through_several_syllables() {
        let x = Element::from_syllables([p(&[1, 0]), t(2), p(&[0, 3])]);
        let y = Element::from_syllables([p(&[0, -3]), t(-2), p(&[0, 1])]);
        assert_eq!(x.mul(&y).syllables(), &[p(&[1, 1])]);
        assert!(x.mul(&x.inverse()).is_identity());
    }

    #[test]
    fn cyclic_decomposition_recovers_element() {
        let u = Element::from_syllables([t(1), p(&[1, 0])]);
        let core = Element::from_syllables([t(1), p(&[0, 2])]);
        let x = core.conjugate_by(&u);
        let (w, c) = x.cyclic_decomposition();
        assert_eq!(c.conjugate_by(&w), x);
        assert_eq!(c.syllable_len(), 2);
        let single = Element::from_syllables([t(1), p(&[2, 0]), t(-1)]);
        let (w, c) = single.cyclic_decomposition();
        assert_eq!(c.syllable_len(), 1);
        assert_eq!(c.conjugate_by(&w), single);
    }

    #[test]
    fn cyclic_decomposition_folds_matching_ends() {
        // a t a^2: first and last syllables share a factor.
        let x = Element::from_syllables([p(&[1, 0]), t(1), p(&[2, 0])]);
        let (w, c) = x.cyclic_decomposition();
        assert_eq!(c.conjugate_by(&w), x);
        assert_eq!(c.syllable_len(), 2);
    }
}
