//! Subcommand bodies: each returns a JSON result, a status and a summary.

use std::cell::OnceCell;
use std::fmt::Write as _;

use relhyp_core::amalgam::{
    assemble, build_double, build_fully_quasiconvex, normal_form, run_pipeline, verify_hyperbolic_translation,
    Mode, PipelineConfig, Side,
};
use relhyp_core::constants::{ConstantsLedger, LedgerConfig};
use relhyp_core::group::XLetter;
use relhyp_core::quasiconvex::{
    class_contains, estimate_sigma, intersection_sigma, parabolic_classes, parabolic_elements, GroupFile,
    SubgroupSpec,
};
use relhyp_core::relcayley::{
    decompose_components_with, is_quasigeodesic, is_without_backtracking, isolated_flags, phase_vertices,
    rel_distance, rel_geodesics, ComponentMode,
};
use relhyp_core::{Caps, EdgeTag, Element, Error, GroupSpec, RawLetter, RelPath, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{ledger_table, to_csv, Status};
use crate::Command;

const DEFAULT_GROUP: &str = r#"{
  "abelian_factors": [["a", "b"]],
  "free_generators": ["t"],
  "subgroups": {
    "Q": { "generators": ["t"] },
    "AT": { "generators": ["a", "t"] },
    "P": { "generators": ["a", "b"] }
  }
}"#;

#[derive(Clone, Copy)]
pub struct Settings {
    pub radius: Option<u32>,
    pub max_syllables: usize,
    pub letter_bound: u32,
    pub mode: Mode,
    pub ledger_radius: Option<u32>,
}

pub struct Context {
    file: GroupFile,
    settings: Settings,
    caps: Caps,
    ledger: OnceCell<ConstantsLedger>,
}

pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub summary: String,
    pub csv: Option<String>,
    pub ledger: Option<ConstantsLedger>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialise")
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Counterexample
    }
}

impl Context {
    pub fn new(group_text: Option<&str>, settings: &Settings, caps: Caps) -> Result<Self> {
        let file = GroupFile::from_json(group_text.unwrap_or(DEFAULT_GROUP))?;
        Ok(Context {
            file,
            settings: *settings,
            caps,
            ledger: OnceCell::new(),
        })
    }

    fn g(&self) -> &GroupSpec {
        &self.file.group
    }

    fn radius(&self, default: u32) -> u32 {
        self.settings.radius.unwrap_or(default)
    }

    fn ledger_config(&self) -> LedgerConfig {
        match self.settings.ledger_radius {
            Some(r) => LedgerConfig::up_to(r),
            None => LedgerConfig::default(),
        }
    }

    fn ledger(&self) -> Result<&ConstantsLedger> {
        if let Some(l) = self.ledger.get() {
            return Ok(l);
        }
        let l = ConstantsLedger::build(self.g(), &self.ledger_config(), &self.caps)?;
        Ok(self.ledger.get_or_init(|| l))
    }

    fn subgroup(&self, name: &str) -> Result<&SubgroupSpec> {
        self.file.subgroup(name)
    }

    fn peripheral(&self, one_based: usize) -> Result<usize> {
        if one_based == 0 {
            return Err(Error::Precondition("peripheral indices start at 1".into()));
        }
        self.g().check_factor(one_based - 1)?;
        Ok(one_based - 1)
    }

    fn pipeline(&self, r: Option<&String>, peripheral: usize, h: Option<&String>, skip_sigma: bool) -> Result<PipelineConfig> {
        Ok(PipelineConfig {
            mode: self.settings.mode,
            peripheral: self.peripheral(peripheral)?,
            right: r.map(|n| self.subgroup(n).cloned()).transpose()?,
            h: h.map(|w| self.g().parse_word(w)).transpose()?,
            radius: self.radius(3),
            max_syllables: self.settings.max_syllables,
            letter_bound: self.settings.letter_bound,
            skip_sigma,
        })
    }
}

fn path_from_letters(g: &GroupSpec, text: &str) -> Result<RelPath> {
    let mut edges = Vec::new();
    for l in g.parse_letters(text)? {
        match l {
            RawLetter::Named { name, exponent } => {
                let generator = g.generator(&name)?;
                for _ in 0..exponent.unsigned_abs() {
                    edges.push(EdgeTag::X(XLetter {
                        generator,
                        inverse: exponent < 0,
                    }));
                }
            }
            RawLetter::Peripheral { factor, vector } => {
                g.check_factor(factor)?;
                edges.push(EdgeTag::peripheral(factor, vector)?);
            }
        }
    }
    Ok(RelPath::from_edges(Element::identity(), edges))
}

/// `L:word | R:word`, with `C` in exponents replaced by `c`.
fn parse_amalgam_letters(g: &GroupSpec, text: &str, c: u64) -> Result<Vec<(Side, Element)>> {
    text.split('|')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (side, word) = item
                .split_once(':')
                .ok_or_else(|| Error::parse(item, "expected L:word or R:word"))?;
            let side = match side.trim() {
                "L" => 0,
                "R" => 1,
                other => return Err(Error::parse(other, "side must be L or R")),
            };
            let word = word.replace("^-C", &format!("^-{c}")).replace("^C", &format!("^{c}"));
            Ok((side, g.parse_word(&word)?))
        })
        .collect()
}

pub fn run(ctx: &Context, cmd: &Command) -> Result<Outcome> {
    let g = ctx.g();
    let caps = &ctx.caps;
    let mut summary = String::new();
    let mut csv = None;
    let mut ledger = None;
    let (status, result) = match cmd {
        Command::Ball { list } => {
            let radius = ctx.radius(3);
            let ball = g.ball_x(radius, caps)?;
            let mut sizes = vec![0usize; radius as usize + 1];
            for x in &ball {
                sizes[x.x_length() as usize] += 1;
            }
            let _ = writeln!(summary, "ball of radius {radius}: {} elements", ball.len());
            let _ = writeln!(summary, "spheres: {sizes:?}");
            let elements: Option<Vec<String>> = list.then(|| ball.iter().map(|x| g.format(x)).collect());
            (
                Status::Pass,
                json!({ "radius": radius, "total": ball.len(), "spheres": sizes, "elements": elements }),
            )
        }
        Command::Geodesics { word } => {
            let x = g.parse_word(word)?;
            let d = rel_distance(&x);
            let paths = rel_geodesics(&x, caps.geodesics)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for p in &paths {
                let comps = decompose_components_with(g, p, ComponentMode::Tagged);
                let good = p.len() as u64 == d && is_without_backtracking(g, p);
                ok &= good;
                rows.push(json!({ "path": p.render(g, &comps), "length": p.len(), "without_backtracking": good }));
            }
            let _ = writeln!(summary, "{} : relative distance {d}, {} geodesics", g.format(&x), paths.len());
            for r in &rows {
                let _ = writeln!(summary, "  {}", r["path"].as_str().unwrap_or_default());
            }
            (
                pass_if(ok),
                json!({ "element": g.format(&x), "x_length": x.x_length(), "rel_distance": d, "geodesics": rows }),
            )
        }
        Command::Components { path, coset, lambda, c } => {
            let p = path_from_letters(g, path)?;
            let mode = if *coset { ComponentMode::Coset } else { ComponentMode::Tagged };
            let comps = decompose_components_with(g, &p, mode);
            let iso = isolated_flags(&comps);
            let qg = is_quasigeodesic(
                g,
                &p,
                num_rational::Ratio::from_integer(*lambda),
                num_rational::Ratio::from_integer(*c),
            );
            let rows: Vec<Value> = comps
                .iter()
                .zip(&iso)
                .map(|(k, i)| {
                    json!({
                        "factor": k.factor + 1,
                        "start": k.start,
                        "end": k.end,
                        "s_minus": g.format(&k.s_minus),
                        "s_plus": g.format(&k.s_plus),
                        "x_length": k.x_length(),
                        "isolated": i,
                    })
                })
                .collect();
            let _ = writeln!(summary, "{}", p.render(g, &comps));
            let _ = writeln!(
                summary,
                "{} components, backtracking: {}, ({lambda},{c})-quasi-geodesic: {}",
                comps.len(),
                !iso.iter().all(|b| *b),
                qg.holds
            );
            (
                Status::Pass,
                json!({
                    "path": p.render(g, &comps),
                    "mode": mode,
                    "components": rows,
                    "without_backtracking": iso.iter().all(|b| *b),
                    "phase_vertices": phase_vertices(g, &p).iter().map(|v| g.format(v)).collect::<Vec<_>>(),
                    "quasigeodesic": qg,
                }),
            )
        }
        Command::Constants => {
            let cfg = match (ctx.settings.radius, ctx.settings.ledger_radius) {
                (_, Some(r)) | (Some(r), None) => LedgerConfig::up_to(r),
                (None, None) => LedgerConfig::default(),
            };
            let l = ConstantsLedger::build(g, &cfg, caps)?;
            let tau_ok = l.tau == 5 * l.d_hat.value;
            let eta_ok = l.eta_bounds.iter().all(|b| l.eta > *b);
            let lambda_ok = l.lambda_0 == relhyp_core::LAMBDA_0 && l.lambda_0 == 3;
            summary.push_str(&ledger_table(&l));
            let unstable = l.unstable();
            if !unstable.is_empty() {
                let _ = writeln!(summary, "unstable at the scanned radii: {}", unstable.join(", "));
            }
            #[derive(Serialize)]
            struct Row {
                constant: String,
                value: u64,
                radius: Option<u32>,
                stable: bool,
            }
            let mut rows = vec![
                Row { constant: "delta".into(), value: l.delta.value, radius: Some(l.delta.radius), stable: true },
            ];
            for (k, e) in &l.epsilon {
                rows.push(Row {
                    constant: format!("eps({k})"),
                    value: e.estimate.value,
                    radius: Some(e.estimate.radius),
                    stable: e.stable,
                });
            }
            rows.push(Row { constant: "D".into(), value: l.d_hat.value, radius: Some(l.d_hat.radius), stable: l.d_hat_stable });
            rows.push(Row { constant: "tau".into(), value: l.tau, radius: None, stable: l.d_hat_stable });
            rows.push(Row { constant: "eta".into(), value: l.eta, radius: None, stable: unstable.is_empty() });
            csv = Some(to_csv(&rows));
            let result = json!({
                "config": cfg,
                "checks": { "tau_is_5D": tau_ok, "eta_exceeds_bounds": eta_ok, "lambda_0_is_3": lambda_ok },
                "unstable": unstable,
                "capped": l.capped(),
            });
            ledger = Some(l);
            (pass_if(tau_ok && eta_ok && lambda_ok), result)
        }
        Command::Sigma { subgroup } => {
            let q = ctx.subgroup(subgroup)?;
            let r = estimate_sigma(g, q, ctx.radius(4), caps)?;
            let _ = writeln!(
                summary,
                "sigma({}) = {} at radius {} ({:?}, stable: {})",
                q.name, r.sigma, r.radius, r.status, r.stable
            );
            (Status::Pass, to_value(&r))
        }
        Command::Intersect { q, r, sigma } => {
            let (q, r) = (ctx.subgroup(q)?, ctx.subgroup(r)?);
            let radius = ctx.radius(4);
            let sigma = match sigma {
                Some(s) => *s,
                None => estimate_sigma(g, q, radius, caps)?
                    .sigma
                    .max(estimate_sigma(g, r, radius, caps)?.sigma),
            };
            let rep = intersection_sigma(g, q, r, sigma, radius, caps)?;
            let _ = writeln!(
                summary,
                "sigma({} ∩ {}) = {} against bound sigma + M = {} + {} = {}: {}",
                q.name,
                r.name,
                rep.direct.sigma,
                rep.sigma,
                rep.m.value,
                rep.bound,
                if rep.holds { "holds" } else { "VIOLATED" }
            );
            (pass_if(rep.holds), to_value(&rep))
        }
        Command::Parabolics { subgroup, sigma } => {
            let q = ctx.subgroup(subgroup)?;
            let radius = ctx.radius(4);
            let sigma = match sigma {
                Some(s) => *s,
                None => estimate_sigma(g, q, radius, caps)?.sigma,
            };
            let rep = parabolic_classes(g, q, sigma, radius, caps)?;
            let elements = parabolic_elements(g, q, radius, caps)?;
            let unmatched: Vec<String> = elements
                .iter()
                .filter(|x| !rep.classes.iter().any(|c| class_contains(g, q, c, x)))
                .map(|x| g.format(&x.element))
                .collect();
            let _ = writeln!(summary, "{} classes of maximal parabolic subgroups of {}:", rep.classes.len(), q.name);
            for c in &rep.classes {
                let _ = writeln!(summary, "  {} (A{}, z = {})", c.rendered, c.factor + 1, g.format(&c.conjugator));
            }
            let _ = writeln!(summary, "{} parabolic elements in the ball, {} unmatched", elements.len(), unmatched.len());
            (
                pass_if(unmatched.is_empty()),
                json!({ "classes": rep, "parabolic_elements": elements.len(), "unmatched": unmatched }),
            )
        }
        Command::Combine { q, r, peripheral, h, skip_sigma } => {
            let l = ctx.ledger()?;
            let qs = ctx.subgroup(q)?;
            let cfg = ctx.pipeline(r.as_ref(), *peripheral, h.as_ref(), *skip_sigma)?;
            let rep = run_pipeline(g, qs, l, &cfg, caps)?;
            let _ = writeln!(summary, "mode {:?}, eta = {}, sigma = {}, C = {}", rep.spec.mode, l.eta, rep.sigma, rep.c.c);
            for chk in &rep.hypotheses.checks {
                let _ = writeln!(summary, "  hypothesis {}: {} ({})", chk.name, chk.holds, chk.detail);
            }
            let inj = &rep.injectivity;
            let _ = writeln!(
                summary,
                "  {} normal forms, {} distinct images, {} paths checked, {} failures",
                inj.words, inj.distinct_images, inj.paths_checked, inj.path_failures
            );
            if let Some(ce) = &inj.counterexample {
                let _ = writeln!(summary, "  counterexample ({}): {} -> {}", ce.kind, ce.word, ce.image);
            }
            if let Some(qc) = &rep.quasiconvexity {
                let _ = writeln!(summary, "  sigma of the combination {} <= {}: {}", qc.direct.sigma, qc.bound, qc.holds);
            }
            let _ = writeln!(summary, "  parabolic classes {:?}, unmatched {}", rep.parabolics.predicted, rep.parabolics.unmatched.len());
            csv = Some(to_csv(&inj.classes));
            ledger = Some(l.clone());
            (pass_if(rep.pass), to_value(&rep))
        }
        Command::Double { q, k, peripheral } => {
            let qs = ctx.subgroup(q)?;
            let i = ctx.peripheral(*peripheral)?;
            let l = ctx.ledger()?;
            let rep = build_double(g, qs, i, *k, l, ctx.radius(3), ctx.settings.max_syllables, ctx.settings.letter_bound, caps)?;
            let _ = writeln!(summary, "double of {} along A{}: h = {}, lambda = {}", rep.subgroup, i + 1, rep.h, rep.lambda);
            for s in &rep.stages {
                let _ = writeln!(
                    summary,
                    "  stage {}: C = {}, D = {}, n = {}, {} words, {} distinct, pass {}",
                    s.stage, s.c, s.d, s.n, s.injectivity.words, s.injectivity.distinct_images,
                    s.hypotheses.holds && s.injectivity.pass && s.invariant
                );
            }
            ledger = Some(l.clone());
            (pass_if(rep.pass), to_value(&rep))
        }
        Command::FullyQc { q } => {
            let qs = ctx.subgroup(q)?;
            let l = ctx.ledger()?;
            let rep = build_fully_quasiconvex(g, qs, l, ctx.radius(3), ctx.settings.max_syllables, ctx.settings.letter_bound, caps)?;
            let _ = writeln!(summary, "{}: {} steps, result {}", rep.subgroup, rep.steps.len(), rep.result);
            for e in &rep.tree.edges {
                let _ = writeln!(summary, "  {} --{}-- {} (index {})", rep.tree.center, e.edge_group, e.vertex_group, e.index);
            }
            let _ = writeln!(summary, "fully quasiconvex: {}", rep.fully_quasiconvex);
            ledger = Some(l.clone());
            (pass_if(rep.pass), to_value(&rep))
        }
        Command::Axis { q, r, peripheral, h, word, power_bound } => {
            let qs = ctx.subgroup(q)?;
            let l = ctx.ledger()?;
            let cfg = ctx.pipeline(r.as_ref(), *peripheral, h.as_ref(), true)?;
            let (spec, _, c) = assemble(g, qs, l, &cfg, caps)?;
            let letters = parse_amalgam_letters(g, word, c.c)?;
            let w = normal_form(g, &spec, &letters)?;
            let rep = verify_hyperbolic_translation(g, &spec, &w, *power_bound, l.eta)?;
            let _ = writeln!(summary, "C = {}, word {} -> {}", c.c, rep.word, rep.translation);
            let _ = writeln!(
                summary,
                "window of {} edges: (3,0)-quasi-geodesic {}, without backtracking {}",
                rep.window.length, rep.window.quasigeodesic, rep.window.backtracking_free
            );
            ledger = Some(l.clone());
            (pass_if(rep.holds), to_value(&rep))
        }
    };
    Ok(Outcome {
        status,
        result,
        summary,
        csv,
        ledger,
    })
}
