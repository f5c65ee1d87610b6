//! Iterated combinations: the double `Q *_R hQh^-1 *_R ...` inside a free
//! abelian peripheral, and the fully quasiconvex overgroup.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::verify::{check_hypotheses, enumerate_words, verify_injectivity, HypothesisReport, InjectivityReport};
use super::{m_value, rho, AmalgamSpec, Mode};
use crate::caps::Caps;
use crate::constants::{compute_lambda_abelian, ConstantsLedger};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::lattice::Lattice;
use crate::quasiconvex::{estimate_sigma, parabolic_classes, SubgroupKind, SubgroupSpec};

fn render_lattice(g: &GroupSpec, factor: usize, l: &Lattice) -> String {
    let gens: Vec<String> = l
        .basis()
        .iter()
        .map(|v| g.format(&Element::peripheral(factor, v.clone())))
        .collect();
    format!("<{}>", gens.join(", "))
}

/// `max{|g|_Y : g in A_i, |g|_X < C}` for the standard basis `Y` of `A_i`.
fn d_bound(c: u64) -> u64 {
    c.saturating_sub(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleStage {
    pub stage: usize,
    /// `sigma` of `R_{j-1}`.
    pub sigma: u64,
    /// `M(H, R_{j-1}, sigma)` and `M(H, Q, sigma)`.
    pub m: [u64; 2],
    pub c: u64,
    pub d: u64,
    pub n: u64,
    pub h_power: String,
    pub hypotheses: HypothesisReport,
    pub injectivity: InjectivityReport,
    /// Every enumerated image inside `P` lies in `Q ∩ P`.
    pub invariant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleReport {
    pub subgroup: String,
    pub peripheral: usize,
    pub k: usize,
    pub intersection: String,
    pub h: String,
    pub lambda: String,
    pub stages: Vec<DoubleStage>,
    pub pass: bool,
}

/// `R_k = <Q, h^{n_2} Q h^{-n_2}, ..., h^{n_k} Q h^{-n_k}>`, each stage a
/// theorem-2 amalgam verified at desk scale.
#[allow(clippy::too_many_arguments)]
pub fn build_double(
    g: &GroupSpec,
    q: &SubgroupSpec,
    peripheral: usize,
    k: usize,
    ledger: &ConstantsLedger,
    radius: u32,
    max_syllables: usize,
    letter_bound: u32,
    caps: &Caps,
) -> Result<DoubleReport> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let rank = g.rank(peripheral)?;
    let b = q
        .peripheral_intersection(g, &Element::identity(), peripheral)?
        .ok_or_else(|| Error::Unsupported(format!("{} ∩ A{} is not computable", q.name, peripheral + 1)))?;
    if b.rank() >= rank {
        return Err(Error::RankCondition(format!(
            "{} ∩ A{} has rank {} = rank A{}",
            q.name,
            peripheral + 1,
            b.rank(),
            peripheral + 1
        )));
    }
    let hv = (0..rank)
        .map(|j| {
            let mut v = vec![0i64; rank];
            v[j] = 1;
            v
        })
        .find(|v| b.with_vector(v).rank() > b.rank())
        .expect("a basis vector leaves a proper sublattice");
    let y: Vec<Vec<i64>> = (0..rank)
        .map(|j| {
            let mut v = vec![0i64; rank];
            v[j] = 1;
            v
        })
        .collect();
    let lambda = compute_lambda_abelian(&b, &hv, &y)?;
    let eps = ledger.epsilon_value(3, 0, 0)?;
    let sigma_q = estimate_sigma(g, q, radius, caps)?.sigma;
    let m_q = m_value(g, q, peripheral, Some(&b), sigma_q, radius, caps)?;

    let mut current = q.clone();
    let mut sigma = sigma_q;
    let mut last_n = 0u64;
    let mut stages = Vec::new();
    for stage in 2..=k {
        let m1 = m_value(g, &current, peripheral, Some(&b), sigma, radius, caps)?.value;
        let m2 = if sigma == sigma_q {
            m_q.value
        } else {
            m_value(g, q, peripheral, Some(&b), sigma, radius, caps)?.value
        };
        let c = ledger.eta + m1 + m2;
        let d = d_bound(c);
        let n_min = (Ratio::from_integer(d as i64) / lambda)
            .floor()
            .to_integer()
            .max(0) as u64
            + 1;
        let n = n_min.max(last_n + 1);
        let hn = Element::peripheral(peripheral, hv.iter().map(|x| x * n as i64).collect());
        let mut q1 = current.clone();
        q1.name = format!("R{}", stage - 1);
        let spec = AmalgamSpec {
            mode: Mode::Theorem2,
            left: q1,
            right: q.clone(),
            peripheral,
            edge: b.clone(),
            h: hn.clone(),
            c,
        };
        let hypotheses = check_hypotheses(g, &spec)?;
        let injectivity = verify_injectivity(g, &spec, ledger.eta, max_syllables, letter_bound, caps)?;
        let words = enumerate_words(g, &spec, max_syllables, letter_bound, caps)?;
        let invariant = words.words.iter().all(|w| {
            rho(&spec, w)
                .as_peripheral_vector(peripheral, rank)
                .is_none_or(|v| b.contains(&v))
        });
        let mut gens = current.generators.clone();
        gens.extend(q.generators.iter().map(|x| x.conjugate_by(&hn)));
        current = SubgroupSpec::generic(&format!("R{stage}"), gens, 4);
        sigma = sigma.max(sigma_q + hn.x_length()) + eps;
        last_n = n;
        stages.push(DoubleStage {
            stage,
            sigma,
            m: [m1, m2],
            c,
            d,
            n,
            h_power: g.format(&hn),
            hypotheses,
            injectivity,
            invariant,
        });
    }
    let pass = stages
        .iter()
        .all(|s| s.hypotheses.holds && s.injectivity.pass && s.invariant);
    Ok(DoubleReport {
        subgroup: q.name.clone(),
        peripheral,
        k,
        intersection: render_lattice(g, peripheral, &b),
        h: g.format(&Element::peripheral(peripheral, hv)),
        lambda: lambda.to_string(),
        stages,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullyQcStep {
    pub class: String,
    pub factor: usize,
    pub conjugator: String,
    pub sigma: u64,
    pub m: u64,
    pub c: u64,
    pub d: u64,
    /// `A = K + N L` with `L` spanned by basis vectors completing `K`.
    pub multiplier: u64,
    pub a: String,
    pub index: u64,
    pub hypotheses: HypothesisReport,
    pub injectivity: InjectivityReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub edge_group: String,
    pub vertex_group: String,
    pub index: u64,
}

/// A star: the centre vertex group with one leaf per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeOfGroups {
    pub center: String,
    pub edges: Vec<TreeEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullyQcReport {
    pub subgroup: String,
    pub classes: Vec<String>,
    pub steps: Vec<FullyQcStep>,
    pub tree: TreeOfGroups,
    pub result: String,
    /// Every infinite maximal parabolic subgroup of the result has finite index.
    pub fully_quasiconvex: bool,
    pub pass: bool,
}

/// Least `N` with `|g|_1 > d` on `(K + N L) \ K`.
fn multiplier(k: &Lattice, l: &[Vec<i64>], d: u64) -> Result<(u64, Lattice)> {
    for n in 1..=(4 * d + 4) {
        let mut gens = k.basis().to_vec();
        gens.extend(l.iter().map(|v| v.iter().map(|x| x * n as i64).collect::<Vec<_>>()));
        let a = Lattice::new(k.dim(), &gens)?;
        if a.min_norm_outside(k).is_none_or(|(m, _)| m > d) {
            return Ok((n, a));
        }
    }
    Err(Error::Precondition(format!("no multiple clears {d}")))
}

/// One theorem-1 amalgam per conjugacy class of infinite, infinite-index
/// maximal parabolic subgroups of `Q`.
#[allow(clippy::too_many_arguments)]
pub fn build_fully_quasiconvex(
    g: &GroupSpec,
    q: &SubgroupSpec,
    ledger: &ConstantsLedger,
    radius: u32,
    max_syllables: usize,
    letter_bound: u32,
    caps: &Caps,
) -> Result<FullyQcReport> {
    let eps = ledger.epsilon_value(3, 0, 0)?;
    let mut sigma = estimate_sigma(g, q, radius, caps)?.sigma;
    let classes = parabolic_classes(g, q, sigma, radius, caps)?;
    let mut current = q.clone();
    let mut steps = Vec::new();
    let mut edges = Vec::new();
    for class in &classes.classes {
        let i = class.factor;
        let rank = g.rank(i)?;
        let kl = &class.lattice;
        if kl.rank() == rank {
            continue;
        }
        let z = &class.conjugator;
        let local = current.conjugate(&z.inverse());
        let meet = local.peripheral_intersection(g, &Element::identity(), i)?;
        let m = m_value(g, &local, i, meet.as_ref(), sigma, radius, caps)?.value;
        let c = ledger.eta + 2 * m;
        let d = d_bound(c);
        let mut l: Vec<Vec<i64>> = Vec::new();
        let mut span = kl.clone();
        for j in 0..rank {
            let mut v = vec![0i64; rank];
            v[j] = 1;
            if span.with_vector(&v).rank() > span.rank() {
                span = span.with_vector(&v);
                l.push(v);
            }
        }
        let (n, a) = multiplier(kl, &l, d)?;
        let index = a.index().expect("A has full rank");
        let r = SubgroupSpec::peripheral_lattice(g, "A", i, a.clone())?;
        let spec = AmalgamSpec::theorem1(g, local, r, c)?;
        let hypotheses = check_hypotheses(g, &spec)?;
        let injectivity = verify_injectivity(g, &spec, ledger.eta, max_syllables, letter_bound, caps)?;
        let a_rendered = render_lattice(g, i, &a);
        edges.push(TreeEdge {
            edge_group: class.rendered.clone(),
            vertex_group: if z.is_identity() {
                a_rendered.clone()
            } else {
                format!("{}^({})", a_rendered, g.format(z))
            },
            index,
        });
        let mut gens = current.generators.clone();
        gens.extend(
            a.basis()
                .iter()
                .map(|v| Element::peripheral(i, v.clone()).conjugate_by(z)),
        );
        let name = format!("{}+{}", current.name, steps.len() + 1);
        current = match (&current.kind, z.is_identity()) {
            (SubgroupKind::FactorProduct { .. }, true) => SubgroupSpec::factor_product(g, &name, gens)?,
            _ => SubgroupSpec::generic(&name, gens, 4),
        };
        steps.push(FullyQcStep {
            class: class.rendered.clone(),
            factor: i,
            conjugator: g.format(z),
            sigma,
            m,
            c,
            d,
            multiplier: n,
            a: a_rendered,
            index,
            hypotheses,
            injectivity,
        });
        sigma += eps;
    }
    let after = parabolic_classes(g, &current, sigma.min(radius as u64), radius, caps)?;
    let fully_quasiconvex = after
        .classes
        .iter()
        .all(|c| g.rank(c.factor).is_ok_and(|r| c.lattice.rank() == r));
    let pass = fully_quasiconvex && steps.iter().all(|s| s.hypotheses.holds && s.injectivity.pass);
    Ok(FullyQcReport {
        subgroup: q.name.clone(),
        classes: classes.classes.iter().map(|c| c.rendered.clone()).collect(),
        steps,
        tree: TreeOfGroups {
            center: q.name.clone(),
            edges,
        },
        result: format!(
            "<{}>",
            current
                .generators
                .iter()
                .map(|x| g.format(x))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        fully_quasiconvex,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::LedgerConfig;

    fn ledger(g: &GroupSpec) -> ConstantsLedger {
        ConstantsLedger::build(g, &LedgerConfig::at_radius(2), &Caps::default()).unwrap()
    }

    #[test]
    fn multiplier_clears_bound() {
        let k = Lattice::new(2, &[vec![1, 0]]).unwrap();
        let (n, a) = multiplier(&k, &[vec![0, 1]], 9).unwrap();
        assert_eq!(n, 10);
        assert_eq!(a.index(), Some(10));
        let k = Lattice::new(2, &[vec![1, 1]]).unwrap();
        let (n, _) = multiplier(&k, &[vec![1, 0]], 4).unwrap();
        assert_eq!(n, 5);
    }

    #[test]
    fn double_rejects_full_rank() {
        let g = GroupSpec::desk();
        let q = SubgroupSpec::peripheral(&g, 0).unwrap();
        let err = build_double(&g, &q, 0, 2, &ledger(&g), 2, 2, 1, &Caps::default()).unwrap_err();
        assert!(matches!(err, Error::RankCondition(_)));
    }

    #[test]
    fn double_of_cyclic_free_subgroup() {
        let g = GroupSpec::desk();
        let q = SubgroupSpec::from_generators(&g, "Q", vec![g.parse_word("t").unwrap()]).unwrap();
        let led = ledger(&g);
        let one = build_double(&g, &q, 0, 1, &led, 2, 3, 2, &Caps::default()).unwrap();
        assert!(one.stages.is_empty() && one.pass);
        let two = build_double(&g, &q, 0, 2, &led, 2, 3, 2, &Caps::default()).unwrap();
        assert_eq!(two.lambda, "1");
        assert_eq!(two.stages[0].n, led.eta);
        assert!(two.pass, "{two:?}");
    }

    #[test]
    fn fully_qc_of_a_and_t() {
        let g = GroupSpec::desk();
        let q = SubgroupSpec::from_generators(&g, "Q", vec![g.parse_word("a").unwrap(), g.parse_word("t").unwrap()]).unwrap();
        let led = ledger(&g);
        let rep = build_fully_quasiconvex(&g, &q, &led, 2, 2, 2, &Caps::default()).unwrap();
        assert_eq!(rep.steps.len(), 1);
        assert_eq!(rep.steps[0].index, led.eta);
        assert!(rep.pass, "{rep:?}");
    }
}
