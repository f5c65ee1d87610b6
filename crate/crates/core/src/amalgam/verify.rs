//! Hypothesis checks and desk-scale verification of injectivity,
//! quasiconvexity and parabolic subgroups of the combined subgroup.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::paths::{check_word, PathCheck};
use super::{compute_c, factor_ball, rho, AmalgamSpec, AmalgamWord, CReport, Mode, Side};
use crate::caps::Caps;
use crate::constants::ConstantsLedger;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::lattice::{vectors_of_norm, Lattice};
use crate::quasiconvex::{estimate_sigma, parabolic_classes, ParabolicClass, SigmaReport, SubgroupKind, SubgroupSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub mode: Mode,
    pub c: u64,
    pub checks: Vec<HypothesisCheck>,
    pub holds: bool,
}

fn check(name: &str, holds: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        name: name.into(),
        holds,
        detail,
    }
}

pub fn check_hypotheses(g: &GroupSpec, spec: &AmalgamSpec) -> Result<HypothesisReport> {
    let i = spec.peripheral;
    let rank = g.rank(i)?;
    let fmt = |v: &[i64]| g.format(&Element::peripheral(i, v.to_vec()));
    let mut checks = Vec::new();
    match spec.mode {
        Mode::Theorem1 => {
            let lq = spec
                .left
                .peripheral_intersection(g, &Element::identity(), i)?
                .ok_or_else(|| Error::Unsupported(format!("{} ∩ A{} is not computable", spec.left.name, i + 1)))?;
            let (_, lr) = spec
                .right
                .as_peripheral_lattice()
                .ok_or_else(|| Error::Unsupported(format!("`{}` is not a peripheral lattice", spec.right.name)))?;
            checks.push(check(
                "Q ∩ P <= R",
                lq.is_subset_of(lr),
                format!("Q ∩ P has rank {}", lq.rank()),
            ));
            match lr.min_norm_outside(&spec.edge) {
                Some((n, v)) => checks.push(check(
                    "|g|_X >= C on R \\ Q",
                    n >= spec.c,
                    format!("minimum {n} at {}", fmt(&v)),
                )),
                None => checks.push(check("|g|_X >= C on R \\ Q", true, "R ⊂ Q".into())),
            }
        }
        Mode::Theorem2 => {
            let hv = spec
                .h
                .as_peripheral_vector(i, rank)
                .ok_or_else(|| Error::Precondition("h is not in P".into()))?;
            let normal = spec.edge.basis().iter().all(|b| {
                let x = Element::peripheral(i, b.clone()).conjugate_by(&spec.h);
                x.as_peripheral_vector(i, rank).is_some_and(|v| spec.edge.contains(&v))
            });
            checks.push(check("h R h^-1 = R", normal, format!("h = {}", g.format(&spec.h))));
            let (n, v) = spec.edge.closest_l1(&hv);
            let diff: Vec<i64> = hv.iter().zip(&v).map(|(a, b)| a - b).collect();
            checks.push(check(
                "|g|_X >= C on R h R",
                n >= spec.c,
                format!("minimum {n} at {}", fmt(&diff)),
            ));
        }
    }
    let holds = checks.iter().all(|c| c.holds);
    Ok(HypothesisReport {
        mode: spec.mode,
        c: spec.c,
        checks,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: String,
    pub word: String,
    /// Second word with the same image, for collisions.
    pub other: Option<String>,
    pub image: String,
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub max_syllables: usize,
    pub letter_bound: u32,
    /// Letters available on each side, and how many are coset representatives.
    pub letters: [usize; 2],
    pub canonical_letters: [usize; 2],
    pub words: usize,
    pub distinct_images: usize,
    pub paths_checked: usize,
    pub path_failures: usize,
    pub classes: Vec<WordClass>,
    pub counterexample: Option<Counterexample>,
    pub pass: bool,
}

/// Counts for the words of one length starting in one factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordClass {
    pub syllables: usize,
    pub first: String,
    pub words: usize,
    pub paths_checked: usize,
    pub path_failures: usize,
}

pub(crate) struct WordSet {
    pub words: Vec<AmalgamWord>,
    pub letters: [usize; 2],
    pub canonical: [usize; 2],
}

/// Normal forms with at most `max_syllables` letters, each letter a product of
/// at most `letter_bound` factor generators.
pub(crate) fn enumerate_words(
    g: &GroupSpec,
    spec: &AmalgamSpec,
    max_syllables: usize,
    letter_bound: u32,
    caps: &Caps,
) -> Result<WordSet> {
    Caps::check("syllables", max_syllables as u64, caps.syllables as u64)?;
    let mut all: [Vec<Element>; 2] = [Vec::new(), Vec::new()];
    let mut canon: [Vec<Element>; 2] = [Vec::new(), Vec::new()];
    let mut edge_letters: Vec<Element> = Vec::new();
    for side in 0..2 {
        for x in factor_ball(spec.factor(side as Side), letter_bound) {
            if x.is_identity() {
                continue;
            }
            if spec.in_edge(g, &x) {
                if !edge_letters.contains(&x) {
                    edge_letters.push(x);
                }
                continue;
            }
            if spec.is_canonical(&x) {
                canon[side].push(x.clone());
            }
            all[side].push(x);
        }
    }
    let mut total: u64 = 1 + edge_letters.len() as u64;
    for start in 0..2 {
        let mut count = all[start].len() as u64;
        for len in 1..=max_syllables {
            if len > 1 {
                count = count.saturating_mul(canon[(start + len - 1) % 2].len() as u64);
            }
            total = total.saturating_add(count);
        }
    }
    Caps::check("amalgam words", total, caps.paths as u64)?;
    let mut words = vec![AmalgamWord::identity()];
    words.extend(edge_letters.into_iter().map(|k| AmalgamWord { letters: vec![(0, k)] }));
    for start in 0..2usize {
        let mut layer: Vec<AmalgamWord> = all[start]
            .iter()
            .map(|x| AmalgamWord {
                letters: vec![(start as Side, x.clone())],
            })
            .collect();
        for len in 1..=max_syllables {
            if len > 1 {
                let side = (start + len - 1) % 2;
                layer = layer
                    .iter()
                    .flat_map(|w| {
                        canon[side].iter().map(move |x| {
                            let mut letters = w.letters.clone();
                            letters.push((side as Side, x.clone()));
                            AmalgamWord { letters }
                        })
                    })
                    .collect();
            }
            words.extend(layer.iter().cloned());
        }
    }
    Ok(WordSet {
        words,
        letters: [all[0].len(), all[1].len()],
        canonical: [canon[0].len(), canon[1].len()],
    })
}

/// Distinct normal forms must have distinct images; every cyclically reduced
/// word must give a shortened path passing [`PathCheck::holds`].
pub fn verify_injectivity(
    g: &GroupSpec,
    spec: &AmalgamSpec,
    eta: u64,
    max_syllables: usize,
    letter_bound: u32,
    caps: &Caps,
) -> Result<InjectivityReport> {
    let set = enumerate_words(g, spec, max_syllables, letter_bound, caps)?;
    let words = &set.words;
    let results: Vec<(Element, Option<PathCheck>)> = words
        .par_iter()
        .map(|w| {
            let image = rho(spec, w);
            let path = (w.is_cyclically_reduced() && !(w.len() == 1 && spec.in_edge(g, &w.letters[0].1)))
                .then(|| check_word(g, spec, w, eta));
            (image, path)
        })
        .collect();
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&a, &b| results[a].0.cmp(&results[b].0).then(a.cmp(&b)));
    let mut distinct = 0;
    let mut collision: Option<(usize, usize)> = None;
    for (n, &idx) in order.iter().enumerate() {
        if n == 0 || results[order[n - 1]].0 != results[idx].0 {
            distinct += 1;
        } else {
            let pair = (order[n - 1].min(idx), order[n - 1].max(idx));
            if collision.is_none_or(|c| pair < c) {
                collision = Some(pair);
            }
        }
    }
    let paths_checked = results.iter().filter(|r| r.1.is_some()).count();
    let failures: Vec<usize> = (0..words.len())
        .filter(|&i| results[i].1.as_ref().is_some_and(|p| !p.holds()))
        .collect();
    let counterexample = if let Some((a, b)) = collision {
        let trivial = words[a].is_empty();
        Some(Counterexample {
            kind: if trivial { "trivial-image" } else { "collision" }.into(),
            word: words[if trivial { b } else { a }].render(g),
            other: (!trivial).then(|| words[b].render(g)),
            image: g.format(&results[a].0),
            path: results[b].1.as_ref().map(|p| p.path.clone()),
        })
    } else {
        failures.first().map(|&i| {
            let p = results[i].1.as_ref().expect("failure has a path");
            Counterexample {
                kind: p.failure().unwrap_or("path").into(),
                word: words[i].render(g),
                other: None,
                image: g.format(&results[i].0),
                path: Some(p.path.clone()),
            }
        })
    };
    let mut classes: Vec<WordClass> = Vec::new();
    for (w, r) in words.iter().zip(&results) {
        let first = match w.letters.first() {
            None => "-",
            Some((0, _)) => "L",
            Some(_) => "R",
        };
        let pos = match classes.iter().position(|c| c.syllables == w.len() && c.first == first) {
            Some(p) => p,
            None => {
                classes.push(WordClass {
                    syllables: w.len(),
                    first: first.into(),
                    words: 0,
                    paths_checked: 0,
                    path_failures: 0,
                });
                classes.len() - 1
            }
        };
        let c = &mut classes[pos];
        c.words += 1;
        if let Some(p) = &r.1 {
            c.paths_checked += 1;
            if !p.holds() {
                c.path_failures += 1;
            }
        }
    }
    classes.sort_by(|a, b| (a.syllables, &a.first).cmp(&(b.syllables, &b.first)));
    Ok(InjectivityReport {
        classes,
        max_syllables,
        letter_bound,
        letters: set.letters,
        canonical_letters: set.canonical,
        words: words.len(),
        distinct_images: distinct,
        paths_checked,
        path_failures: failures.len(),
        pass: counterexample.is_none(),
        counterexample,
    })
}

/// `<Q ∪ R>` or `<Q1 ∪ h Q2 h^-1>`.
pub fn combined_subgroup(g: &GroupSpec, spec: &AmalgamSpec) -> Result<SubgroupSpec> {
    let name = match spec.mode {
        Mode::Theorem1 => format!("<{} ∪ {}>", spec.left.name, spec.right.name),
        Mode::Theorem2 => format!("<{} ∪ h{}h^-1>", spec.left.name, spec.right.name),
    };
    let mut gens = spec.left.generators.clone();
    gens.extend(spec.right.generators.iter().map(|x| spec.letter_image(1, x)));
    let both_products = matches!(spec.left.kind, SubgroupKind::FactorProduct { .. })
        && matches!(spec.right.kind, SubgroupKind::FactorProduct { .. });
    if both_products && gens.iter().all(|x| x.syllable_len() <= 1) {
        SubgroupSpec::factor_product(g, &name, gens)
    } else {
        Ok(SubgroupSpec::generic(&name, gens, 4))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QcReport {
    pub sigma: u64,
    pub epsilon: u64,
    /// `sigma + eps(3,0,0)`, plus `|h|_X` in theorem-2 mode.
    pub bound: u64,
    pub direct: SigmaReport,
    pub holds: bool,
}

pub fn verify_combined_quasiconvexity(
    g: &GroupSpec,
    spec: &AmalgamSpec,
    sigma: u64,
    ledger: &ConstantsLedger,
    radius: u32,
    caps: &Caps,
) -> Result<QcReport> {
    let epsilon = ledger.epsilon_value(3, 0, 0)?;
    let bound = sigma + epsilon + spec.h.x_length();
    let combined = combined_subgroup(g, spec)?;
    let direct = estimate_sigma(g, &combined, radius, caps)?;
    Ok(QcReport {
        sigma,
        epsilon,
        bound,
        holds: direct.sigma <= bound,
        direct,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicCheck {
    pub predicted: Vec<String>,
    pub classes: Vec<ParabolicClass>,
    /// Parabolic images among the enumerated normal forms.
    pub scanned: usize,
    pub unmatched: Vec<String>,
    /// Theorem-2 mode with trivial `R`: nontrivial images found inside `P`.
    pub peripheral_hits: Option<usize>,
    pub holds: bool,
}

fn render_class(g: &GroupSpec, c: &ParabolicClass) -> String {
    let gens: Vec<String> = c
        .lattice
        .basis()
        .iter()
        .map(|v| g.format(&Element::peripheral(c.factor, v.clone()).conjugate_by(&c.conjugator)))
        .collect();
    format!("<{}>", gens.join(", "))
}

/// Some `q` in the subgroup with `q z A_i = z' A_i`, over `|a|_1 <= |z| + |z'|`.
fn same_class(member: &dyn Fn(&Element) -> bool, z: &Element, z2: &Element, factor: usize, rank: usize) -> bool {
    let bound = z.x_length() + z2.x_length();
    (0..=bound).any(|n| {
        vectors_of_norm(rank, n)
            .into_iter()
            .any(|v| member(&z2.mul(&Element::peripheral(factor, v)).mul(&z.inverse())))
    })
}

/// Predicted conjugacy classes of maximal parabolic subgroups of the combined
/// subgroup, checked against the parabolic images of enumerated normal forms.
#[allow(clippy::too_many_arguments)]
pub fn classify_parabolics(
    g: &GroupSpec,
    spec: &AmalgamSpec,
    sigma: u64,
    radius: u32,
    max_syllables: usize,
    letter_bound: u32,
    caps: &Caps,
) -> Result<ParabolicCheck> {
    let i = spec.peripheral;
    let combined = combined_subgroup(g, spec)?;
    let set = enumerate_words(g, spec, max_syllables, letter_bound, caps)?;
    let images: Vec<Element> = set.words.par_iter().map(|w| rho(spec, w)).collect();
    let image_set: HashSet<Element> = images.iter().cloned().collect();
    let member = |x: &Element| image_set.contains(x) || combined.contains(g, x);

    let left = parabolic_classes(g, &spec.left, sigma, radius, caps)?;
    let mut classes: Vec<ParabolicClass> = Vec::new();
    match spec.mode {
        Mode::Theorem1 => {
            let (_, lr) = spec.right.as_peripheral_lattice().expect("checked at construction");
            classes.push(ParabolicClass {
                conjugator: Element::identity(),
                factor: i,
                lattice: lr.clone(),
                rendered: String::new(),
            });
            classes.extend(
                left.classes
                    .into_iter()
                    .filter(|c| !(c.factor == i && c.conjugator.is_identity())),
            );
        }
        Mode::Theorem2 => {
            let right = parabolic_classes(g, &spec.right, sigma, radius, caps)?;
            classes.extend(left.classes);
            for mut c in right.classes {
                c.conjugator = spec.h.mul(&c.conjugator);
                let r = g.rank(c.factor)?;
                let dup = classes
                    .iter()
                    .any(|e| e.factor == c.factor && same_class(&member, &e.conjugator, &c.conjugator, c.factor, r));
                if !dup {
                    classes.push(c);
                }
            }
        }
    }
    for c in &mut classes {
        c.rendered = render_class(g, c);
    }

    let mut scanned = 0;
    let mut unmatched = Vec::new();
    let mut hits = 0;
    for x in &images {
        let (u, core) = x.cyclic_decomposition();
        let [s] = core.syllables() else { continue };
        let Some((factor, vector)) = s.peripheral_vector() else { continue };
        scanned += 1;
        if factor == i && u.is_identity() {
            hits += 1;
        }
        let r = g.rank(factor)?;
        let ok = classes.iter().any(|c| {
            c.factor == factor && c.lattice.contains(vector) && same_class(&member, &c.conjugator, &u, factor, r)
        });
        if !ok {
            unmatched.push(g.format(x));
        }
    }
    unmatched.sort();
    unmatched.dedup();
    let peripheral_hits = (spec.mode == Mode::Theorem2 && spec.edge.is_zero()).then_some(hits);
    Ok(ParabolicCheck {
        predicted: classes.iter().map(|c| c.rendered.clone()).collect(),
        holds: unmatched.is_empty() && peripheral_hits.is_none_or(|h| h == 0),
        classes,
        scanned,
        unmatched,
        peripheral_hits,
    })
}

/// Inputs of a full combination run.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub peripheral: usize,
    /// `R` in theorem-1 mode (default `C * A_i`); `Q2` in theorem-2 mode (default `Q1`).
    pub right: Option<SubgroupSpec>,
    /// Theorem-2 conjugator (default: a multiple of a basis vector outside `R`).
    pub h: Option<Element>,
    pub radius: u32,
    pub max_syllables: usize,
    pub letter_bound: u32,
    /// Skip the combined quasiconvexity scan.
    pub skip_sigma: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombineReport {
    pub sigma: u64,
    pub c: CReport,
    pub spec: AmalgamSpec,
    pub hypotheses: HypothesisReport,
    pub injectivity: InjectivityReport,
    pub quasiconvexity: Option<QcReport>,
    pub parabolics: ParabolicCheck,
    pub pass: bool,
}

/// Least `n h` (a basis vector outside `R`) whose coset `n h + R` avoids the
/// open `C`-ball.
pub(crate) fn default_h(g: &GroupSpec, factor: usize, r: &Lattice, c: u64) -> Result<Element> {
    let rank = g.rank(factor)?;
    let e = (0..rank)
        .map(|j| {
            let mut v = vec![0; rank];
            v[j] = 1;
            v
        })
        .find(|v| r.with_vector(v).rank() > r.rank())
        .ok_or_else(|| Error::RankCondition(format!("R has full rank in A{}", factor + 1)))?;
    for n in 1..=(4 * c as i64 + 4) {
        let v: Vec<i64> = e.iter().map(|x| x * n).collect();
        if r.closest_l1(&v).0 >= c {
            return Ok(Element::peripheral(factor, v));
        }
    }
    Err(Error::Precondition("no multiple of a basis vector clears C".into()))
}

/// The amalgam a pipeline run works on: `(spec, sigma, C report)`.
pub fn assemble(
    g: &GroupSpec,
    q: &SubgroupSpec,
    ledger: &ConstantsLedger,
    cfg: &PipelineConfig,
    caps: &Caps,
) -> Result<(AmalgamSpec, u64, CReport)> {
    let i = cfg.peripheral;
    g.check_factor(i)?;
    let sigma_q = estimate_sigma(g, q, cfg.radius, caps)?.sigma;
    match cfg.mode {
        Mode::Theorem1 => {
            let c = compute_c(g, Mode::Theorem1, &[q], i, ledger, sigma_q, cfg.radius, caps)?;
            let r = match &cfg.right {
                Some(r) => r.clone(),
                None => {
                    let rank = g.rank(i)?;
                    SubgroupSpec::peripheral_lattice(g, "R", i, Lattice::scaled_axes(rank, &vec![c.c as i64; rank]))?
                }
            };
            Ok((AmalgamSpec::theorem1(g, q.clone(), r, c.c)?, sigma_q, c))
        }
        Mode::Theorem2 => {
            let q2 = cfg.right.clone().unwrap_or_else(|| q.clone());
            let sigma = sigma_q.max(estimate_sigma(g, &q2, cfg.radius, caps)?.sigma);
            let c = compute_c(g, Mode::Theorem2, &[q, &q2], i, ledger, sigma, cfg.radius, caps)?;
            let edge = q
                .peripheral_intersection(g, &Element::identity(), i)?
                .ok_or_else(|| Error::Unsupported(format!("{} ∩ A{} is not computable", q.name, i + 1)))?;
            let h = match &cfg.h {
                Some(h) => h.clone(),
                None => default_h(g, i, &edge, c.c)?,
            };
            Ok((AmalgamSpec::theorem2(g, q.clone(), q2, i, h, c.c)?, sigma, c))
        }
    }
}

pub fn run_pipeline(
    g: &GroupSpec,
    q: &SubgroupSpec,
    ledger: &ConstantsLedger,
    cfg: &PipelineConfig,
    caps: &Caps,
) -> Result<CombineReport> {
    let (spec, sigma, c) = assemble(g, q, ledger, cfg, caps)?;
    let hypotheses = check_hypotheses(g, &spec)?;
    let injectivity = verify_injectivity(g, &spec, ledger.eta, cfg.max_syllables, cfg.letter_bound, caps)?;
    let quasiconvexity = if cfg.skip_sigma {
        None
    } else {
        Some(verify_combined_quasiconvexity(g, &spec, sigma, ledger, cfg.radius, caps)?)
    };
    let parabolics = classify_parabolics(g, &spec, sigma, cfg.radius, cfg.max_syllables, cfg.letter_bound, caps)?;
    let pass = hypotheses.holds
        && injectivity.pass
        && quasiconvexity.as_ref().is_none_or(|r| r.holds)
        && parabolics.holds;
    Ok(CombineReport {
        sigma,
        c,
        spec,
        hypotheses,
        injectivity,
        quasiconvexity,
        parabolics,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ConstantsLedger, LedgerConfig};

    fn small_spec(c: i64) -> (GroupSpec, AmalgamSpec) {
        let g = GroupSpec::desk();
        let q = SubgroupSpec::from_generators(&g, "Q", vec![g.parse_word("t").unwrap()]).unwrap();
        let r = SubgroupSpec::peripheral_lattice(&g, "R", 0, Lattice::scaled_axes(2, &[c, c])).unwrap();
        let spec = AmalgamSpec::theorem1(&g, q, r, c as u64).unwrap();
        (g, spec)
    }

    #[test]
    fn hypotheses_follow_c() {
        let (g, spec) = small_spec(6);
        assert!(check_hypotheses(&g, &spec).unwrap().holds);
        let mut bad = spec.clone();
        bad.c = 7;
        assert!(!check_hypotheses(&g, &bad).unwrap().holds);
    }

    #[test]
    fn large_c_is_injective() {
        let (g, spec) = small_spec(9);
        let r = verify_injectivity(&g, &spec, 9, 3, 2, &Caps::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.distinct_images, r.words);
    }

    #[test]
    fn non_injective_amalgam_is_caught() {
        // Q ∩ P = <a> is not inside R = <ab>, so a and ab commute in G only
        let g = GroupSpec::desk();
        let q = SubgroupSpec::from_generators(&g, "Q", vec![g.parse_word("a").unwrap(), g.parse_word("t").unwrap()]).unwrap();
        let r = SubgroupSpec::peripheral_lattice(&g, "R", 0, Lattice::new(2, &[vec![1, 1]]).unwrap()).unwrap();
        let spec = AmalgamSpec::theorem1(&g, q, r, 1).unwrap();
        let rep = verify_injectivity(&g, &spec, 1, 3, 1, &Caps::default()).unwrap();
        assert!(!rep.pass);
        let ce = rep.counterexample.unwrap();
        assert_eq!(ce.kind, "collision");
    }

    #[test]
    fn parabolics_of_desk_amalgam() {
        let (g, spec) = small_spec(3);
        let rep = classify_parabolics(&g, &spec, 0, 2, 3, 2, &Caps::default()).unwrap();
        assert_eq!(rep.predicted, vec!["<a^3, b^3>".to_string()]);
        assert!(rep.scanned > 0);
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn pipeline_on_free_group_peripheral() {
        let g = GroupSpec::desk();
        let ledger = ConstantsLedger::build(&g, &LedgerConfig::at_radius(2), &Caps::default()).unwrap();
        let q = SubgroupSpec::from_generators(&g, "Q", vec![g.parse_word("t").unwrap()]).unwrap();
        let cfg = PipelineConfig {
            mode: Mode::Theorem1,
            peripheral: 0,
            right: None,
            h: None,
            radius: 2,
            max_syllables: 2,
            letter_bound: 1,
            skip_sigma: true,
        };
        let rep = run_pipeline(&g, &q, &ledger, &cfg, &Caps::default()).unwrap();
        assert_eq!(rep.c.c, ledger.eta);
        assert!(rep.pass, "{rep:?}");
    }
}
