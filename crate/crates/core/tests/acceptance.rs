//! Desk-scale acceptance run: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use relhyp_core::amalgam::{
    assemble, build_double, build_fully_quasiconvex, check_hypotheses, verify_combined_quasiconvexity,
    verify_injectivity, AmalgamSpec, Mode, PipelineConfig,
};
use relhyp_core::constants::{ConstantsLedger, LedgerConfig};
use relhyp_core::lattice::vectors_of_norm;
use relhyp_core::quasiconvex::{estimate_sigma, intersection_sigma, parabolic_classes, SubgroupSpec};
use relhyp_core::relcayley::{
    connected, decompose_components, is_quasigeodesic, is_without_backtracking, rel_distance,
    rel_geodesics,
};
use relhyp_core::{Caps, EdgeTag, Element, Error, GroupSpec, Lattice, RelPath, LAMBDA_0};

type Outcome = Result<String, String>;

fn desk() -> &'static GroupSpec {
    static G: OnceLock<GroupSpec> = OnceLock::new();
    G.get_or_init(GroupSpec::desk)
}

fn caps() -> Caps {
    Caps::default()
}

fn ledger() -> &'static ConstantsLedger {
    static L: OnceLock<ConstantsLedger> = OnceLock::new();
    L.get_or_init(|| ConstantsLedger::build(desk(), &LedgerConfig::default(), &caps()).expect("desk ledger"))
}

fn subgroup(name: &str, words: &[&str]) -> SubgroupSpec {
    let g = desk();
    let gens = words.iter().map(|w| g.parse_word(w).unwrap()).collect();
    SubgroupSpec::from_generators(g, name, gens).unwrap()
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(t)
    } else {
        Err(format!("took {t:.1?}, limit {limit:?}"))
    }
}

/// Relative distances by 0-1 BFS over `ball_X(radius)`, each coset `xA_i`
/// compressed to a hub reached at cost 1 and left at cost 0.
fn bfs_oracle(g: &GroupSpec, radius: u32) -> (Vec<Element>, Vec<u64>) {
    let ball = g.ball_x(radius, &caps()).unwrap();
    let index: HashMap<&Element, usize> = ball.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let letters: Vec<Element> = g.x_letters().into_iter().map(|l| g.letter_element(l)).collect();
    let n = ball.len();
    let mut hubs: HashMap<(usize, Element), usize> = HashMap::new();
    let mut hub_of = vec![Vec::new(); n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (v, x) in ball.iter().enumerate() {
        for f in 0..g.peripheral_count() {
            let key = (f, g.coset_id(x, f).unwrap());
            let h = *hubs.entry(key).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[h].push(v);
            hub_of[v].push(n + h);
        }
    }
    let mut dist = vec![u64::MAX; n + members.len()];
    let start = index[&Element::identity()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        if u >= n {
            for &v in &members[u - n] {
                if dist[v] > d {
                    dist[v] = d;
                    queue.push_front(v);
                }
            }
            continue;
        }
        let x = &ball[u];
        let next = letters
            .iter()
            .filter_map(|l| index.get(&x.mul(l)).copied())
            .chain(hub_of[u].iter().copied());
        for v in next {
            if dist[v] > d + 1 {
                dist[v] = d + 1;
                queue.push_back(v);
            }
        }
    }
    dist.truncate(n);
    (ball, dist)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = desk();
    let (ball, oracle) = bfs_oracle(g, 7);
    let mut compared = 0usize;
    let mut mismatches = Vec::new();
    for (x, &d) in ball.iter().zip(&oracle) {
        if d <= 5 {
            compared += 1;
            if rel_distance(x) != d {
                mismatches.push(format!("{}: {} vs oracle {d}", g.format(x), rel_distance(x)));
            }
        }
    }
    let t = within(Duration::from_secs(60), start)?;
    if mismatches.is_empty() {
        Ok(format!("{compared} elements of ball_X(7) with relative distance <= 5 agree with BFS ({t:.1?})"))
    } else {
        Err(format!("{} mismatches, first {}", mismatches.len(), mismatches[0]))
    }
}

fn criterion_2() -> Outcome {
    let g = desk();
    let eps = ledger().epsilon_value(1, 4, 0).map_err(|e| e.to_string())?;
    let ball = g.ball_x(4, &caps()).unwrap();
    let factors = g.peripheral_count();
    // (i, g1 A_i, j, g2 A_j) -> admissible geodesics as (start, end, length)
    type Key = (usize, Element, usize, Element);
    let found: Vec<(Key, Vec<(Element, Element, u64)>)> = ball
        .par_iter()
        .flat_map_iter(|x| {
            let mut out = Vec::new();
            for y in &ball {
                let geos = rel_geodesics(&x.inverse().mul(y), caps().geodesics).unwrap();
                for i in 0..factors {
                    let c1 = g.coset_id(x, i).unwrap();
                    for j in 0..factors {
                        let c2 = g.coset_id(y, j).unwrap();
                        if i == j && c1 == c2 {
                            continue;
                        }
                        let admissible: Vec<_> = geos
                            .iter()
                            .map(|p| p.translate(x))
                            .filter(|p| {
                                let vs = p.vertices(g);
                                let in1 = vs.iter().filter(|v| g.coset_id(v, i).unwrap() == c1).count();
                                let in2 = vs.iter().filter(|v| g.coset_id(v, j).unwrap() == c2).count();
                                in1 == 1 && in2 == 1
                            })
                            .map(|p| (p.start.clone(), p.end(g), p.len() as u64))
                            .collect();
                        if !admissible.is_empty() {
                            out.push(((i, c1.clone(), j, c2), admissible));
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut groups: BTreeMap<Key, Vec<(Element, Element, u64)>> = BTreeMap::new();
    for (k, v) in found {
        groups.entry(k).or_default().extend(v);
    }
    let mut pairs = 0u64;
    let mut geodesics = 0usize;
    let mut worst_len = 0u64;
    let mut worst_sim = 0u64;
    let mut violation = None;
    for (key, ps) in &groups {
        geodesics += ps.len();
        let endpoints: HashSet<_> = ps.iter().collect();
        for p in &endpoints {
            for q in &endpoints {
                pairs += 1;
                let dl = q.2.saturating_sub(p.2);
                let sim = p.0.x_distance(&q.0).max(p.1.x_distance(&q.1));
                worst_len = worst_len.max(dl);
                worst_sim = worst_sim.max(sim);
                if (dl > 2 || sim > eps) && violation.is_none() {
                    violation = Some(format!(
                        "cosets {:?}: lengths {} and {}, similarity {sim}",
                        (key.0, g.format(&key.1), key.2, g.format(&key.3)),
                        p.2,
                        q.2
                    ));
                }
            }
        }
    }
    let detail = format!(
        "{} coset pairs, {geodesics} admissible geodesics, {pairs} endpoint pairs; max l(q) - l(p) = {worst_len}, \
         max similarity = {worst_sim} <= eps(1,4,0) = {eps}",
        groups.len()
    );
    match violation {
        None => Ok(detail),
        Some(v) => Err(format!("{v}; {detail}")),
    }
}

/// Every geodesic from 1 to each element of `ball_X(radius)`.
fn geodesic_pool(g: &GroupSpec, radius: u32) -> Vec<RelPath> {
    g.ball_x(radius, &caps())
        .unwrap()
        .iter()
        .flat_map(|x| rel_geodesics(x, caps().geodesics).unwrap())
        .collect()
}

fn sample_vectors(eta: i64) -> Vec<Vec<i64>> {
    let h = eta / 2;
    vec![
        vec![eta, 0],
        vec![-eta, 0],
        vec![0, eta],
        vec![0, -eta],
        vec![h, eta - h],
        vec![-h, h - eta],
        vec![h, h - eta],
        vec![h - eta, h],
    ]
}

struct PolygonCount {
    generated: usize,
    admissible: usize,
    failure: Option<String>,
}

/// `p = r_1 s_1 ... r_k s_k` over the given pools; admissible paths must pass the three checks.
fn polygon_suite(g: &GroupSpec, k: usize, rs: &[RelPath], ss: &[Vec<i64>], eta: u64) -> PolygonCount {
    let total = (rs.len() * ss.len()).pow(k as u32);
    let results: Vec<(bool, Option<String>)> = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut edges = Vec::new();
            let mut s_pos = Vec::new();
            for _ in 0..k {
                let r = &rs[code % rs.len()];
                code /= rs.len();
                let s = &ss[code % ss.len()];
                code /= ss.len();
                edges.extend(r.edges.iter().cloned());
                s_pos.push(edges.len());
                edges.push(EdgeTag::peripheral(0, s.clone()).unwrap());
            }
            let p = RelPath::from_edges(Element::identity(), edges);
            let comps = decompose_components(g, &p);
            let s_comps: Vec<_> = s_pos
                .iter()
                .filter_map(|&i| comps.iter().find(|c| c.start == i && c.end == i + 1))
                .collect();
            let admissible = s_comps.len() == k
                && s_comps.iter().all(|c| c.x_length() >= eta)
                && s_comps.windows(2).all(|w| !connected(w[0], w[1]));
            if !admissible {
                return (false, None);
            }
            let qg = is_quasigeodesic(g, &p, Ratio::from_integer(LAMBDA_0), Ratio::from_integer(0));
            let bt = is_without_backtracking(g, &p);
            let ends = p.end(g) != p.start;
            let failure = (!(qg.holds && bt && ends)).then(|| {
                format!(
                    "{}: quasigeodesic {} {:?}, without backtracking {bt}, distinct endpoints {ends}",
                    p.render(g, &comps),
                    qg.holds,
                    qg.witness
                )
            });
            (true, failure)
        })
        .collect();
    PolygonCount {
        generated: total,
        admissible: results.iter().filter(|r| r.0).count(),
        failure: results.into_iter().find_map(|r| r.1),
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let g = desk();
    let eta = ledger().eta;
    let mut full: Vec<Vec<i64>> = vectors_of_norm(2, eta);
    full.extend(vectors_of_norm(2, eta + 1));
    let sample = sample_vectors(eta as i64);
    let r2 = geodesic_pool(g, 2);
    let r1 = geodesic_pool(g, 1);
    let runs = [
        (1, &r2, &full, "ball_X(2), all |s| in {eta, eta+1}"),
        (2, &r2, &sample, "ball_X(2), 8 directions"),
        (3, &r1, &sample, "ball_X(1), 8 directions"),
    ];
    let mut parts = Vec::new();
    for (k, rs, ss, label) in runs {
        let c = polygon_suite(g, k, rs, ss, eta);
        if let Some(f) = c.failure {
            return Err(format!("k = {k}: {f}"));
        }
        parts.push(format!("k={k} ({label}): {}/{} admissible", c.admissible, c.generated));
    }
    let t = within(Duration::from_secs(300), start)?;
    Ok(format!("{}; zero violations ({t:.1?})", parts.join("; ")))
}

fn desk_instance() -> (AmalgamSpec, u64) {
    let g = desk();
    let cfg = PipelineConfig {
        mode: Mode::Theorem1,
        peripheral: 0,
        right: None,
        h: None,
        radius: 3,
        max_syllables: 4,
        letter_bound: 3,
        skip_sigma: false,
    };
    let (spec, sigma, _) = assemble(g, &subgroup("Q", &["t"]), ledger(), &cfg, &caps()).unwrap();
    (spec, sigma)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let g = desk();
    let (spec, _) = desk_instance();
    let c = spec.c as i64;
    let expected = Lattice::scaled_axes(2, &[c, c]);
    match spec.right.as_peripheral_lattice() {
        Some((0, l)) if *l == expected => {}
        _ => return Err(format!("R is not <a^{c}, b^{c}>")),
    }
    let hyp = check_hypotheses(g, &spec).map_err(|e| e.to_string())?;
    let inj = verify_injectivity(g, &spec, ledger().eta, 4, 3, &caps()).map_err(|e| e.to_string())?;
    let t = within(Duration::from_secs(600), start)?;
    let detail = format!(
        "C = {c}, R = <a^{c}, b^{c}>: {} normal forms, {} distinct images, {} paths checked ({t:.1?})",
        inj.words, inj.distinct_images, inj.paths_checked
    );
    if hyp.holds && inj.pass && inj.words == inj.distinct_images && inj.path_failures == 0 {
        Ok(detail)
    } else {
        Err(format!("{detail}; hypotheses {}, counterexample {:?}", hyp.holds, inj.counterexample))
    }
}

fn criterion_5() -> Outcome {
    let g = desk();
    let (spec, sigma) = desk_instance();
    let qc = verify_combined_quasiconvexity(g, &spec, sigma, ledger(), 5, &caps()).map_err(|e| e.to_string())?;
    let detail = format!(
        "direct sigma of <Q u R> = {} at radius {} <= sigma + eps(3,0,0) = {} + {} = {}",
        qc.direct.sigma, qc.direct.radius, qc.sigma, qc.epsilon, qc.bound
    );
    if qc.holds && qc.direct.radius == 5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let g = desk();
    let t = g.parse_word("t").unwrap();
    let pairs = [
        (subgroup("AT", &["a", "t"]), subgroup("P", &["a", "b"])),
        (subgroup("AT", &["a", "t"]), subgroup("BT", &["b", "t"])),
        (subgroup("AT", &["a", "t"]), SubgroupSpec::peripheral(g, 0).unwrap().conjugate(&t)),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (q, r) in &pairs {
        let sq = estimate_sigma(g, q, 5, &caps()).map_err(|e| e.to_string())?.sigma;
        let sr = estimate_sigma(g, r, 5, &caps()).map_err(|e| e.to_string())?.sigma;
        let rep = intersection_sigma(g, q, r, sq.max(sr), 5, &caps()).map_err(|e| e.to_string())?;
        ok &= rep.holds;
        parts.push(format!(
            "{} & {}: {} <= {} + {}",
            q.name, r.name, rep.direct.sigma, rep.sigma, rep.m.value
        ));
    }
    if ok {
        Ok(parts.join("; "))
    } else {
        Err(parts.join("; "))
    }
}

fn criterion_7() -> Outcome {
    let g = desk();
    let q = subgroup("AT", &["a", "t"]);
    let sigma = estimate_sigma(g, &q, 4, &caps()).map_err(|e| e.to_string())?.sigma;
    let rep = parabolic_classes(g, &q, sigma, 4, &caps()).map_err(|e| e.to_string())?;
    let a_axis = Lattice::new(2, &[vec![1, 0]]).unwrap();
    let reported_ok = rep.classes.len() == 1 && rep.classes[0].factor == 0 && rep.classes[0].lattice == a_axis;
    // brute force: Q ∩ zAz^-1 from vectors of norm <= 4, classes up to Q-conjugacy
    let ball = g.ball_x(6, &caps()).unwrap();
    let small: Vec<Vec<i64>> = (1..=4).flat_map(|n| vectors_of_norm(2, n)).collect();
    let found: Vec<(Element, Vec<Vec<i64>>)> = ball
        .par_iter()
        .filter(|z| !z.last().is_some_and(|s| s.peripheral_vector().is_some()))
        .filter_map(|z| {
            let vs: Vec<Vec<i64>> = small
                .iter()
                .filter(|v| q.contains(g, &Element::peripheral(0, (*v).clone()).conjugate_by(z)))
                .cloned()
                .collect();
            (!vs.is_empty()).then(|| (z.clone(), vs))
        })
        .collect();
    let bound = 6 + 4;
    let reps: Vec<Vec<i64>> = (0..=bound).flat_map(|n| vectors_of_norm(2, n)).collect();
    let mut bad = Vec::new();
    for (z, vs) in &found {
        let lattice = Lattice::new(2, vs).unwrap();
        // z in Q A_1 makes zAz^-1 ∩ Q conjugate in Q to A_1 ∩ Q
        let same_class = reps
            .iter()
            .any(|v| q.contains(g, &z.mul(&Element::peripheral(0, v.clone()).inverse())));
        if !same_class || lattice != a_axis {
            bad.push(g.format(z));
        }
    }
    let detail = format!(
        "classes {:?}; brute force over ball_X(6): {} conjugators with nontrivial intersection, all Q-conjugate to <a>",
        rep.classes.iter().map(|c| c.rendered.clone()).collect::<Vec<_>>(),
        found.len()
    );
    if reported_ok && bad.is_empty() && !found.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; outside the class: {bad:?}"))
    }
}

fn criterion_8() -> Outcome {
    let g = desk();
    let rep = build_double(g, &subgroup("Q", &["t"]), 0, 2, ledger(), 3, 4, 3, &caps()).map_err(|e| e.to_string())?;
    let stage = rep.stages.first().ok_or("no stages")?;
    let detail = format!(
        "double of <t>: C = {}, n = {}, {} normal forms, {} distinct images",
        stage.c, stage.n, stage.injectivity.words, stage.injectivity.distinct_images
    );
    if !rep.pass || stage.injectivity.max_syllables != 4 {
        return Err(detail);
    }
    match build_double(g, &SubgroupSpec::peripheral(g, 0).unwrap(), 0, 2, ledger(), 3, 4, 3, &caps()) {
        Err(Error::RankCondition(msg)) if msg.contains("rank") => Ok(format!("{detail}; full rank rejected: {msg}")),
        other => Err(format!("{detail}; full-rank double gave {other:?}")),
    }
}

fn criterion_9() -> Outcome {
    let g = desk();
    let q = subgroup("AT", &["a", "t"]);
    let rep = build_fully_quasiconvex(g, &q, ledger(), 3, 4, 3, &caps()).map_err(|e| e.to_string())?;
    if rep.steps.len() != 1 {
        return Err(format!("{} steps", rep.steps.len()));
    }
    let step = &rep.steps[0];
    let mut gens = vec![g.parse_word("a").unwrap(), g.parse_word("t").unwrap()];
    gens.extend(step.a.trim_matches(['<', '>']).split(", ").map(|w| g.parse_word(w).unwrap()));
    let result = SubgroupSpec::from_generators(g, "result", gens).unwrap();
    let meet = result
        .peripheral_intersection(g, &Element::identity(), 0)
        .map_err(|e| e.to_string())?
        .ok_or("intersection not exact")?;
    let index = meet.index();
    let star = rep.tree.edges.len() == 1 && rep.tree.edges[0].edge_group == "<a>" && rep.tree.edges[0].index == step.index;
    let detail = format!(
        "1 step, result {}, result ∩ Z^2 = {:?} of index {:?}, tree {} --{}-- {}",
        rep.result,
        meet.basis(),
        index,
        rep.tree.center,
        rep.tree.edges[0].edge_group,
        rep.tree.edges[0].vertex_group
    );
    if index == Some(step.index) && star && rep.fully_quasiconvex && rep.pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10() -> Outcome {
    let l = ledger();
    let recomputed = l.recompute_eta().map_err(|e| e.to_string())?;
    let tau = l.tau == 5 * l.d_hat.value;
    let eta = l.eta_bounds.iter().all(|b| l.eta > *b) && recomputed.eta == l.eta;
    let lambda = LAMBDA_0 == 3 && l.lambda_0 == 3;
    let detail = format!(
        "tau = {} = 5 * {}, eta = {} > {:?}, lambda_0 = {}",
        l.tau, l.d_hat.value, l.eta, l.eta_bounds, l.lambda_0
    );
    if tau && eta && lambda {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let start = Instant::now();
    ledger();
    println!("ledger built in {:.1?}: eta = {}", start.elapsed(), ledger().eta);
    let mut failed = 0;
    for (n, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(d) => println!("criterion {n}: PASS {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n}: FAIL {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed ({:.1?})", 10 - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
