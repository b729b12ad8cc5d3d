//! Runs every acceptance criterion and prints one PASS/FAIL line for each.

mod common;

use std::time::{Duration, Instant};

use clique_forest::diffeo::{DiffeoExpr, Grid, Manifold};
use clique_forest::obstruct::{
    center_nonabelian_check, find_centralizer_quadruple, heisenberg_ball, heisenberg_elements, remark_counterexample_suite,
    CommutationOracle, UnipotentMatrix,
};
use clique_forest::raag::{
    check_component_completeness, commutation_graph, embeddable_raag, is_clique_forest, normal_form, CommGraphOptions,
    RaagWord, SimpleGraph,
};
use clique_forest::synth::{
    choose_alphas, synthesize_embedding, verify_assignment, GeneratorAssignment, SynthOptions, VerificationReport,
    VerifyOptions,
};
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl FnOnce() -> String, bad: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(ok())
    } else {
        Err(bad())
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let r = f();
    let el = t.elapsed();
    match (r, limit) {
        (Ok(msg), Some(l)) if el > l => Err(format!("{msg}; took {el:.2?}, limit {l:.0?}")),
        (Ok(msg), _) => Ok(format!("{msg}; {el:.2?}")),
        (Err(msg), _) => Err(format!("{msg}; {el:.2?}")),
    }
}

fn criterion_1() -> Outcome {
    let mut graphs = 0u64;
    let mut disagreements = Vec::new();
    for n in 0..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let results: Vec<Option<u64>> = (0..1u64 << pairs.len())
            .into_par_iter()
            .map(|mask| {
                let edges: Vec<(usize, usize)> =
                    pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                let g = SimpleGraph::from_edges(n, edges.iter().copied()).unwrap();
                let mut adj = vec![vec![false; n]; n];
                for &(u, v) in &edges {
                    adj[u][v] = true;
                    adj[v][u] = true;
                }
                let brute = common::brute_clique_forest(n, &adj);
                let lib = is_clique_forest(&g);
                let certified = match &lib {
                    Ok(f) => f.verify(&g),
                    Err(w) => w.verify(&g),
                };
                let decision = embeddable_raag(&g, Manifold::Interval).unwrap().embeddable;
                (brute != lib.is_ok() || !certified || decision != brute).then_some(mask)
            })
            .collect();
        graphs += results.len() as u64;
        disagreements.extend(results.into_iter().flatten().map(|m| (n, m)));
    }
    check(
        disagreements.is_empty(),
        || format!("{graphs} graphs on ≤ 6 vertices agree with the definition"),
        || format!("disagreements (n, edge mask): {:?}", &disagreements[..disagreements.len().min(5)]),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let grid = Grid::unit(1023);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a: f64 = rng.random_range(1.0..std::f64::consts::PI);
        let b: f64 = rng.random_range(1.0..std::f64::consts::PI);
        let composed = DiffeoExpr::compose(&[DiffeoExpr::mobius(a).unwrap(), DiffeoExpr::mobius(b).unwrap()]).unwrap();
        let product = DiffeoExpr::mobius(a * b).unwrap();
        // [[a,0],[a-1,1]]·[[b,0],[b-1,1]] acting by x ↦ (m00 x + m01)/(m10 x + m11).
        let m = [[a * b, 0.0], [(a - 1.0) * b + (b - 1.0), 1.0]];
        let (c, p) = (composed.compile().unwrap(), product.compile().unwrap());
        for x in grid.points() {
            let oracle = (m[0][0] * x + m[0][1]) / (m[1][0] * x + m[1][1]);
            let y = c.eval_lift(x).unwrap();
            worst = worst.max((y - p.eval_lift(x).unwrap()).abs()).max((y - oracle).abs());
        }
    }
    check(
        worst < 1e-12,
        || format!("100 pairs on {} points, worst gap {worst:.2e}", grid.len()),
        || format!("worst gap {worst:e} ≥ 1e-12"),
    )
}

struct Synthesized {
    graph: SimpleGraph,
    assignment: GeneratorAssignment,
    report: VerificationReport,
}

fn criterion_3(out: &mut Option<Synthesized>) -> Outcome {
    let graph = SimpleGraph::complete(2).disjoint_union(&SimpleGraph::complete(3));
    let assignment = synthesize_embedding(&graph, Manifold::Interval, &SynthOptions::default()).map_err(|e| e.to_string())?;
    let report = verify_assignment(&assignment, &graph, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let state = assignment.synthesis.as_ref().ok_or("no construction trail")?;
    let f = assignment.f.as_ref().ok_or("no f")?;

    let intra = report.edges.iter().map(|e| e.residual).fold(0.0, f64::max);
    let a_ok = report.edges.len() == 1 + 3 && intra < 1e-9;

    let fp = report.free_product.as_ref().ok_or("no free-product report")?;
    let d_positive = state.stages.iter().all(|s| s.margin > 0.0);
    let classified = fp.trivial_words + fp.pure_g_words + fp.margins.iter().map(|m| m.words).sum::<usize>();
    let b_ok = fp.pass && fp.min_ratio > 0.5 && d_positive && classified == fp.words_checked;

    let mut min_d = f64::INFINITY;
    for x in Grid::unit(8192).points() {
        min_d = min_d.min(f.derivative(x).map_err(|e| e.to_string())?);
    }
    let c_ok = min_d > 0.4;
    let trail_ok = state.check_invariants().is_ok();
    let summary = format!(
        "(a) intra residual {intra:.1e}; (b) {} words, {} targets, min margin/D {:.6}, {} trivial; (c) min f' {min_d:.6}",
        fp.words_checked, fp.targets, fp.min_ratio, fp.trivial_words
    );
    let pass = a_ok && b_ok && c_ok && trail_ok && report.pass;
    *out = Some(Synthesized { graph, assignment, report });
    check(pass, || summary.clone(), || format!("{summary}; a={a_ok} b={b_ok} c={c_ok} trail={trail_ok}"))
}

fn criterion_4() -> Outcome {
    let g = SimpleGraph::complete(2).disjoint_union(&SimpleGraph::complete(2));
    let forest = is_clique_forest(&g).unwrap();
    let commute = |a: usize, b: usize| a == b || g.has_edge(a, b);
    let mut total = 0u64;
    let mut trivial = 0u64;
    let mut mismatches = Vec::new();
    for len in 0..=8usize {
        let count = 8u64.pow(len as u32);
        let (t, bad): (u64, Vec<u64>) = (0..count)
            .into_par_iter()
            .map(|code| {
                let w = common::decode_word(code, len, 4);
                let oracle = common::pair_cancel_trivial(&w, commute);
                let rw = RaagWord(w.iter().map(|&(v, e)| (v, e as i64)).collect());
                let lib = normal_form(&rw, &forest).unwrap().is_trivial();
                (oracle as u64, if oracle == lib { vec![] } else { vec![code] })
            })
            .reduce(|| (0, vec![]), |mut a, b| {
                a.1.extend(b.1);
                (a.0 + b.0, a.1)
            });
        total += count;
        trivial += t;
        mismatches.extend(bad.into_iter().map(|c| (len, c)));
    }
    check(
        mismatches.is_empty(),
        || format!("{total} words, {trivial} trivial, full agreement"),
        || format!("{} mismatches, first {:?}", mismatches.len(), mismatches.first()),
    )
}

fn criterion_5(s: Option<&Synthesized>) -> Outcome {
    let s = s.ok_or("needs the synthesis from criterion 3")?;
    let f = s.assignment.f.as_ref().ok_or("no f")?;
    let g2 = &s.assignment.g[1];
    let g3 = &s.assignment.g[2];
    let conj = g2.conjugate(f, 1).map_err(|e| e.to_string())?;
    let cg = commutation_graph(&[g2.clone(), g3.clone(), conj], &CommGraphOptions::default()).map_err(|e| e.to_string())?;
    let report = check_component_completeness(&cg.graph);
    let expected = SimpleGraph::from_edges(3, [(0, 1)]).unwrap();
    let alphas = choose_alphas(8, 2).map_err(|e| e.to_string())?;
    let mobius: Vec<DiffeoExpr> = alphas.alphas.iter().map(|&a| DiffeoExpr::mobius(a).unwrap()).collect();
    let mg = commutation_graph(&mobius, &CommGraphOptions::default()).map_err(|e| e.to_string())?;
    let complete = mg.graph == SimpleGraph::complete(8) && check_component_completeness(&mg.graph).pass;
    let worst_edge = cg.pairs.iter().filter(|p| p.edge).map(|p| p.residual).fold(0.0, f64::max);
    let least_non_edge = cg.pairs.iter().filter(|p| !p.edge).map(|p| p.residual).fold(f64::INFINITY, f64::min);
    check(
        report.pass && cg.graph == expected && complete,
        || {
            format!(
                "{{g2, g3, f g2 f^-1}} gives K2 ⊔ K1 (edge {worst_edge:.1e}, non-edges ≥ {least_non_edge:.3e}); 8 Möbius maps give K8"
            )
        },
        || format!("graph {:?}, completeness {}, Möbius complete {complete}", cg.graph.to_edge_list(), report.pass),
    )
}

fn criterion_6() -> Outcome {
    let r = remark_counterexample_suite(1.0, 2.0, 1, 2048).map_err(|e| e.to_string())?;
    let p = &r.powers[0];
    check(
        r.fa_ga < 1e-12 && r.ga_gb < 1e-12 && p.residual > 1e-3,
        || {
            format!(
                "[f1,g1] {:.1e}, [g1,g2] {:.1e}, max |[f1,f2](x) − x| = {:.17} at x = {:.6}",
                r.fa_ga, r.ga_gb, p.residual, p.at
            )
        },
        || format!("residuals {:e} {:e} {:e}", r.fa_ga, r.ga_gb, p.residual),
    )
}

fn criterion_7() -> Outcome {
    let ball = heisenberg_ball(2).map_err(|e| e.to_string())?;
    let cert = find_centralizer_quadruple(&ball).ok_or("no certificate")?;
    // Re-verify with the unipotent group law, independently of the oracle.
    let els = heisenberg_elements(2).map_err(|e| e.to_string())?;
    let m = |i: usize| els[i].0;
    let commute = |a: UnipotentMatrix, b: UnipotentMatrix| a.checked_mul(b) == b.checked_mul(a);
    let (g1, g2, h1, h2) = (m(cert.g1.index), m(cert.g2.index), m(cert.h1.index), m(cert.h2.index));
    let exact = commute(g1, h1) && commute(g2, h1) && commute(g2, h2) && !commute(g1, h2);
    let distinct = [g1, g2, h1, h2].iter().enumerate().all(|(i, a)| *a != UnipotentMatrix::IDENTITY && ![g1, g2, h1, h2][..i].contains(a));
    let center = center_nonabelian_check(&ball);
    let agrees = center.nonabelian_with_center && center.center.iter().any(|e| e.label == "z");
    check(
        exact && distinct && cert.verify(&ball) && agrees,
        || {
            format!(
                "{} elements; g1 = {}, h1 = {}, g2 = {}, h2 = {}; center contains z",
                ball.len(),
                cert.g1.label,
                cert.h1.label,
                cert.g2.label,
                cert.h2.label
            )
        },
        || format!("exact {exact}, distinct {distinct}, center agrees {agrees}"),
    )
}

fn criterion_8(s: Option<&Synthesized>) -> Outcome {
    let s = s.ok_or("needs the synthesis from criterion 3")?;
    let text = s.assignment.to_json();
    let back = GeneratorAssignment::from_json(&text)?;
    let again = verify_assignment(&back, &s.graph, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let a = &s.report;
    let mut worst = 0.0f64;
    let mut pairs = |x: &[clique_forest::synth::PairCheck], y: &[clique_forest::synth::PairCheck]| {
        for (p, q) in x.iter().zip(y) {
            worst = worst.max((p.residual - q.residual).abs());
        }
        x.len() == y.len()
    };
    let same_len = pairs(&a.edges, &again.edges) && pairs(&a.non_edges, &again.non_edges);
    let (fa, fb) = (a.free_product.as_ref().unwrap(), again.free_product.as_ref().unwrap());
    for (p, q) in fa.margins.iter().zip(&fb.margins) {
        worst = worst.max((p.margin - q.margin).abs()).max((p.recorded - q.recorded).abs());
    }
    let (ca, cb) = (a.abelian.as_ref().unwrap(), again.abelian.as_ref().unwrap());
    worst = worst.max((ca.max_commutator - cb.max_commutator).abs());
    check(
        same_len && fa.margins.len() == fb.margins.len() && worst < 1e-12 && again.pass,
        || format!("{} bytes of JSON; largest residual change {worst:.1e}", text.len()),
        || format!("largest residual change {worst:e}"),
    )
}

fn main() {
    let mut synthesized = None;
    let results = [
        ("1 clique-forest decision", timed(Some(Duration::from_secs(30)), criterion_1)),
        ("2 Möbius composition law", timed(None, criterion_2)),
        ("3 synthesis on K2 ⊔ K3", timed(Some(Duration::from_secs(120)), || criterion_3(&mut synthesized))),
        ("4 normal-form oracle", timed(None, criterion_4)),
        ("5 commutation graphs", timed(None, || criterion_5(synthesized.as_ref()))),
        ("6 sine-shear counterexample", timed(None, criterion_6)),
        ("7 Heisenberg obstruction", timed(Some(Duration::from_secs(5)), criterion_7)),
        ("8 serialization round trip", timed(None, || criterion_8(synthesized.as_ref()))),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
