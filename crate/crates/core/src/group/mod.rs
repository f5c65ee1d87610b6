//! The built-in family `G = A_1 * ... * A_m * F_r` with `A_i = Z^{n_i}`.
//!
//! Elements are kept in alternating-syllable normal form; abelian syllables are
//! integer vectors in the standard basis of their factor, so `|x|_X` is the sum
//! of L1 norms and absolute free exponents.

mod element;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use element::{Element, Factor, Syllable};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::vectors_of_norm;

/// A standard generator of one factor: coordinate `coord` of peripheral
/// factor `i`, or free generator `j` (with `coord == 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub factor: Factor,
    pub coord: usize,
}

/// A letter of the symmetric generating set `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct XLetter {
    pub generator: Generator,
    pub inverse: bool,
}

/// A raw letter over `X` union the peripheral alphabet, before normalisation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawLetter {
    Named { name: String, exponent: i64 },
    Peripheral { factor: usize, vector: Vec<i64> },
}

impl RawLetter {
    pub fn named(name: &str) -> Self {
        RawLetter::Named {
            name: name.to_string(),
            exponent: 1,
        }
    }

    pub fn named_pow(name: &str, exponent: i64) -> Self {
        RawLetter::Named {
            name: name.to_string(),
            exponent,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GroupSpecDoc {
    #[serde(default)]
    abelian_factors: Vec<Vec<String>>,
    #[serde(default)]
    free_generators: Vec<String>,
}

/// The ambient group together with its generating set `X` and peripherals.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecDoc", into = "GroupSpecDoc")]
pub struct GroupSpec {
    abelian_factors: Vec<Vec<String>>,
    free_generators: Vec<String>,
    lookup: HashMap<String, Generator>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.abelian_factors == other.abelian_factors
            && self.free_generators == other.free_generators
    }
}

impl Eq for GroupSpec {}

impl TryFrom<GroupSpecDoc> for GroupSpec {
    type Error = Error;

    fn try_from(doc: GroupSpecDoc) -> Result<Self> {
        GroupSpec::new(doc.abelian_factors, doc.free_generators)
    }
}

impl From<GroupSpec> for GroupSpecDoc {
    fn from(spec: GroupSpec) -> Self {
        GroupSpecDoc {
            abelian_factors: spec.abelian_factors,
            free_generators: spec.free_generators,
        }
    }
}

fn valid_label(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic())
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && !(name.starts_with('H') && name[1..].chars().all(|c| c.is_ascii_digit()) && name.len() > 1)
}

impl GroupSpec {
    pub fn new(abelian_factors: Vec<Vec<String>>, free_generators: Vec<String>) -> Result<Self> {
        if abelian_factors.is_empty() && free_generators.is_empty() {
            return Err(Error::InvalidSpec(
                "group must have a peripheral factor or a free generator".into(),
            ));
        }
        let mut lookup = HashMap::new();
        for (i, names) in abelian_factors.iter().enumerate() {
            if names.is_empty() {
                return Err(Error::InvalidSpec(format!(
                    "peripheral factor {} has rank zero",
                    i + 1
                )));
            }
            for (c, name) in names.iter().enumerate() {
                let g = Generator {
                    factor: Factor::Peripheral(i),
                    coord: c,
                };
                if !valid_label(name) {
                    return Err(Error::InvalidSpec(format!("invalid generator label `{name}`")));
                }
                if lookup.insert(name.clone(), g).is_some() {
                    return Err(Error::InvalidSpec(format!("duplicate generator label `{name}`")));
                }
            }
        }
        for (j, name) in free_generators.iter().enumerate() {
            if !valid_label(name) {
                return Err(Error::InvalidSpec(format!("invalid generator label `{name}`")));
            }
            let g = Generator {
                factor: Factor::Free(j),
                coord: 0,
            };
            if lookup.insert(name.clone(), g).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate generator label `{name}`")));
            }
        }
        Ok(GroupSpec {
            abelian_factors,
            free_generators,
            lookup,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_names(abelian: &[&[&str]], free: &[&str]) -> Result<Self> {
        GroupSpec::new(
            abelian
                .iter()
                .map(|f| f.iter().map(|s| s.to_string()).collect())
                .collect(),
            free.iter().map(|s| s.to_string()).collect(),
        )
    }

    /// `Z^2 * <t>` with `Z^2 = <a, b>`, the desk instance used throughout.
    pub fn desk() -> Self {
        GroupSpec::from_names(&[&["a", "b"]], &["t"]).expect("desk group is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("group spec", e.to_string()))
    }

    pub fn peripheral_count(&self) -> usize {
        self.abelian_factors.len()
    }

    pub fn free_rank(&self) -> usize {
        self.free_generators.len()
    }

    pub fn abelian_ranks(&self) -> Vec<usize> {
        self.abelian_factors.iter().map(Vec::len).collect()
    }

    pub fn rank(&self, factor: usize) -> Result<usize> {
        self.abelian_factors
            .get(factor)
            .map(Vec::len)
            .ok_or(Error::FactorOutOfRange {
                index: factor,
                count: self.abelian_factors.len(),
            })
    }

    pub fn check_factor(&self, factor: usize) -> Result<()> {
        self.rank(factor).map(|_| ())
    }

    pub fn factors(&self) -> Vec<Factor> {
        (0..self.peripheral_count())
            .map(Factor::Peripheral)
            .chain((0..self.free_rank()).map(Factor::Free))
            .collect()
    }

    pub fn generator_name(&self, g: Generator) -> &str {
        match g.factor {
            Factor::Peripheral(i) => &self.abelian_factors[i][g.coord],
            Factor::Free(j) => &self.free_generators[j],
        }
    }

    pub fn generator(&self, name: &str) -> Result<Generator> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// The symmetric generating set `X`, in a fixed order.
    pub fn x_letters(&self) -> Vec<XLetter> {
        let mut out = Vec::new();
        for (i, names) in self.abelian_factors.iter().enumerate() {
            for c in 0..names.len() {
                for inverse in [false, true] {
                    out.push(XLetter {
                        generator: Generator {
                            factor: Factor::Peripheral(i),
                            coord: c,
                        },
                        inverse,
                    });
                }
            }
        }
        for j in 0..self.free_generators.len() {
            for inverse in [false, true] {
                out.push(XLetter {
                    generator: Generator {
                        factor: Factor::Free(j),
                        coord: 0,
                    },
                    inverse,
                });
            }
        }
        out
    }

    pub fn letter_syllable(&self, letter: XLetter) -> Syllable {
        let sign = if letter.inverse { -1 } else { 1 };
        self.generator_syllable(letter.generator, sign)
    }

    fn generator_syllable(&self, g: Generator, exponent: i64) -> Syllable {
        match g.factor {
            Factor::Peripheral(i) => {
                let mut vector = vec![0; self.abelian_factors[i].len()];
                vector[g.coord] = exponent;
                Syllable::Peripheral { factor: i, vector }
            }
            Factor::Free(j) => Syllable::Free {
                generator: j,
                exponent,
            },
        }
    }

    pub fn letter_element(&self, letter: XLetter) -> Element {
        Element::from_syllables([self.letter_syllable(letter)])
    }

    pub fn generator_element(&self, name: &str) -> Result<Element> {
        let g = self.generator(name)?;
        Ok(Element::from_syllables([self.generator_syllable(g, 1)]))
    }

    /// Checks that a syllable names a factor of this group with the right rank.
    pub fn validate_syllable(&self, s: &Syllable) -> Result<()> {
        match s {
            Syllable::Peripheral { factor, vector } => {
                let expected = self.rank(*factor)?;
                if vector.len() != expected {
                    return Err(Error::VectorLength {
                        factor: *factor,
                        expected,
                        got: vector.len(),
                    });
                }
                Ok(())
            }
            Syllable::Free { generator, .. } => {
                if *generator >= self.free_rank() {
                    Err(Error::FreeGeneratorOutOfRange {
                        index: *generator,
                        count: self.free_rank(),
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn validate(&self, x: &Element) -> Result<()> {
        for s in x.syllables() {
            self.validate_syllable(s)
                .map_err(|e| Error::MismatchedSpec(format!("{x}: {e}")))?;
        }
        Ok(())
    }

    /// Collects a raw word into canonical normal form.
    pub fn normalize(&self, raw: &[RawLetter]) -> Result<Element> {
        let mut out = Element::identity();
        for letter in raw {
            let s = match letter {
                RawLetter::Named { name, exponent } => {
                    let g = self.generator(name)?;
                    self.generator_syllable(g, *exponent)
                }
                RawLetter::Peripheral { factor, vector } => {
                    let s = Syllable::Peripheral {
                        factor: *factor,
                        vector: vector.clone(),
                    };
                    self.validate_syllable(&s)?;
                    s
                }
            };
            out.push(s);
        }
        Ok(out)
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(x.mul(y))
    }

    pub fn invert(&self, x: &Element) -> Result<Element> {
        self.validate(x)?;
        Ok(x.inverse())
    }

    pub fn length_x(&self, x: &Element) -> u64 {
        x.x_length()
    }

    /// Canonical representative of the left coset `x A_i`: `x` with a trailing
    /// `A_i`-syllable removed.
    pub fn coset_id(&self, x: &Element, factor: usize) -> Result<Element> {
        self.check_factor(factor)?;
        Ok(x.strip_trailing(Factor::Peripheral(factor)))
    }

    /// Parses words such as `a^2 b t^-1 H1(5,3)`.
    ///
    /// Tokens are separated by whitespace, `*` or `.`; `1` denotes the identity;
    /// `H<i>(v,...)` is a peripheral letter of factor `i` (1-based).
    pub fn parse_word(&self, text: &str) -> Result<Element> {
        self.normalize(&self.parse_letters(text)?)
    }

    pub fn parse_letters(&self, text: &str) -> Result<Vec<RawLetter>> {
        let mut out = Vec::new();
        for token in text
            .split(|c: char| c.is_whitespace() || c == '*' || c == '.')
            .filter(|t| !t.is_empty())
        {
            if token == "1" {
                continue;
            }
            if let Some(rest) = token.strip_prefix('H') {
                if let Some(open) = rest.find('(') {
                    if rest[..open].chars().all(|c| c.is_ascii_digit()) && !rest[..open].is_empty() {
                        let idx: usize = rest[..open]
                            .parse()
                            .map_err(|_| Error::parse(token, "bad factor index"))?;
                        if idx == 0 {
                            return Err(Error::parse(token, "factor indices start at 1"));
                        }
                        let body = rest[open + 1..]
                            .strip_suffix(')')
                            .ok_or_else(|| Error::parse(token, "missing `)`"))?;
                        let vector = body
                            .split(',')
                            .map(|c| c.trim().parse::<i64>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| Error::parse(token, "bad vector entry"))?;
                        out.push(RawLetter::Peripheral {
                            factor: idx - 1,
                            vector,
                        });
                        continue;
                    }
                }
            }
            let (name, exponent) = match token.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| Error::parse(token, "bad exponent"))?,
                ),
                None => (token, 1),
            };
            self.generator(name)?;
            out.push(RawLetter::named_pow(name, exponent));
        }
        Ok(out)
    }

    /// Human-readable rendering with generator labels.
    pub fn format(&self, x: &Element) -> String {
        if x.is_identity() {
            return "1".into();
        }
        let mut out = String::new();
        for s in x.syllables() {
            match s {
                Syllable::Peripheral { factor, vector } => {
                    for (c, &e) in vector.iter().enumerate() {
                        if e == 0 {
                            continue;
                        }
                        if !out.is_empty() {
                            out.push(' ');
                        }
                        push_power(&mut out, &self.abelian_factors[*factor][c], e);
                    }
                }
                Syllable::Free {
                    generator,
                    exponent,
                } => {
                    if !out.is_empty() {
                        out.push(' ');
                    }
                    push_power(&mut out, &self.free_generators[*generator], *exponent);
                }
            }
        }
        out
    }

    /// All nonzero syllables of `factor` with `|s|_X == len`, in ascending order.
    pub fn syllables_of_length(&self, factor: Factor, len: u64) -> Vec<Syllable> {
        if len == 0 {
            return Vec::new();
        }
        match factor {
            Factor::Peripheral(i) => vectors_of_norm(self.abelian_factors[i].len(), len)
                .into_iter()
                .map(|vector| Syllable::Peripheral { factor: i, vector })
                .collect(),
            Factor::Free(j) => [-(len as i64), len as i64]
                .into_iter()
                .map(|exponent| Syllable::Free {
                    generator: j,
                    exponent,
                })
                .collect(),
        }
    }

    /// Every element with `|x|_X <= radius`, ordered by (length, normal form).
    pub fn ball_x(&self, radius: u32, caps: &Caps) -> Result<Vec<Element>> {
        Caps::check("ball radius", radius as u64, caps.ball_radius as u64)?;
        let factors = self.factors();
        let mut by_len: Vec<Vec<(Factor, Vec<Syllable>)>> = Vec::new();
        for len in 0..=radius as u64 {
            by_len.push(
                factors
                    .iter()
                    .map(|&f| (f, self.syllables_of_length(f, len)))
                    .collect(),
            );
        }
        let mut out = Vec::new();
        let mut stack = Vec::new();
        extend_ball(&by_len, None, radius as u64, &mut stack, &mut out, caps.elements)?;
        out.sort_by(|a, b| a.x_length().cmp(&b.x_length()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// Elements with `|x|_X == radius`, in ball order.
    pub fn sphere_x(&self, radius: u32, caps: &Caps) -> Result<Vec<Element>> {
        Ok(self
            .ball_x(radius, caps)?
            .into_iter()
            .filter(|x| x.x_length() == radius as u64)
            .collect())
    }
}

fn push_power(out: &mut String, name: &str, e: i64) {
    if e == 1 {
        out.push_str(name);
    } else {
        let _ = write!(out, "{name}^{e}");
    }
}

fn extend_ball(
    by_len: &[Vec<(Factor, Vec<Syllable>)>],
    last: Option<Factor>,
    remaining: u64,
    stack: &mut Vec<Syllable>,
    out: &mut Vec<Element>,
    cap: usize,
) -> Result<()> {
    out.push(Element::from_syllables(stack.iter().cloned()));
    if out.len() > cap {
        return Err(Error::CapExceeded {
            what: "ball elements",
            requested: out.len() as u64,
            cap: cap as u64,
        });
    }
    for len in 1..=remaining {
        for (factor, syllables) in &by_len[len as usize] {
            if Some(*factor) == last {
                continue;
            }
            for s in syllables {
                stack.push(s.clone());
                extend_ball(by_len, Some(*factor), remaining - len, stack, out, cap)?;
                stack.pop();
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> GroupSpec {
        GroupSpec::desk()
    }

    #[test]
    fn spec_rejects_bad_input() {
        assert!(GroupSpec::from_names(&[], &[]).is_err());
        assert!(GroupSpec::from_names(&[&["a", "b"]], &["a"]).is_err());
        assert!(GroupSpec::from_names(&[&[]], &["t"]).is_err());
        assert!(GroupSpec::from_names(&[&["H1"]], &[]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = GroupSpec::from_json(r#"{"abelian_factors": [["a","b"]], "free_generators": ["t"]}"#)
            .unwrap();
        assert_eq!(spec, desk());
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(GroupSpec::from_json(&text).unwrap(), spec);
        assert!(GroupSpec::from_json(r#"{"abelian_factors": [], "free_generators": []}"#).is_err());
    }

    #[test]
    fn normalize_examples() {
        let g = desk();
        let x = g
            .normalize(&[RawLetter::named("a"), RawLetter::named_pow("a", -1)])
            .unwrap();
        assert!(x.is_identity());
        let x = g.parse_word("a b a").unwrap();
        assert_eq!(x, Element::peripheral(0, vec![2, 1]));
        let x = g.parse_word("a t a a").unwrap();
        assert_eq!(
            x.syllables(),
            &[
                Syllable::Peripheral {
                    factor: 0,
                    vector: vec![1, 0]
                },
                Syllable::Free {
                    generator: 0,
                    exponent: 1
                },
                Syllable::Peripheral {
                    factor: 0,
                    vector: vec![2, 0]
                },
            ]
        );
    }

    #[test]
    fn normalize_errors() {
        let g = desk();
        assert_eq!(
            g.parse_word("a z"),
            Err(Error::UnknownGenerator("z".into()))
        );
        assert!(matches!(
            g.normalize(&[RawLetter::Peripheral {
                factor: 3,
                vector: vec![1, 0]
            }]),
            Err(Error::FactorOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            g.parse_word("H1(1,2,3)"),
            Err(Error::VectorLength { .. })
        ));
    }

    #[test]
    fn multiply_and_invert_examples() {
        let g = desk();
        let t = g.parse_word("t").unwrap();
        assert!(g.multiply(&t, &t.inverse()).unwrap().is_identity());
        let x = g.parse_word("H1(1,2) t").unwrap();
        assert_eq!(g.invert(&x).unwrap(), g.parse_word("t^-1 H1(-1,-2)").unwrap());
        let left = g.parse_word("a t").unwrap();
        let right = g.parse_word("t^-1 b").unwrap();
        assert_eq!(
            g.multiply(&left, &right).unwrap(),
            Element::peripheral(0, vec![1, 1])
        );
        let foreign = Element::free(4, 1);
        assert!(matches!(
            g.multiply(&foreign, &t),
            Err(Error::MismatchedSpec(_))
        ));
    }

    #[test]
    fn length_examples() {
        let g = desk();
        assert_eq!(g.length_x(&Element::identity()), 0);
        assert_eq!(g.length_x(&g.parse_word("a^2 b t").unwrap()), 4);
        assert_eq!(g.length_x(&g.parse_word("a^5").unwrap()), 5);
    }

    #[test]
    fn ball_small_radii() {
        let g = desk();
        let caps = Caps::default();
        assert_eq!(g.ball_x(0, &caps).unwrap(), vec![Element::identity()]);
        let b1 = g.ball_x(1, &caps).unwrap();
        assert_eq!(b1.len(), 7);
        assert!(b1[0].is_identity());
        assert!(b1[1..].iter().all(|x| x.x_length() == 1));
        assert!(g.ball_x(caps.ball_radius + 1, &caps).unwrap_err().is_cap());
    }

    #[test]
    fn coset_id_examples() {
        let g = desk();
        let x = g.parse_word("a^3 b").unwrap();
        assert!(g.coset_id(&x, 0).unwrap().is_identity());
        let x = g.parse_word("t a").unwrap();
        assert_eq!(g.coset_id(&x, 0).unwrap(), g.parse_word("t").unwrap());
        assert!(matches!(
            g.coset_id(&x, 1),
            Err(Error::FactorOutOfRange { index: 1, count: 1 })
        ));
    }

    #[test]
    fn format_uses_labels() {
        let g = desk();
        let x = g.parse_word("a^5 b^3 t^-1 a").unwrap();
        assert_eq!(g.format(&x), "a^5 b^3 t^-1 a");
        assert_eq!(g.format(&Element::identity()), "1");
    }
}
