use std::fs;
use std::io::Write as _;
use std::path::Path;

use clique_forest::diffeo::{fixed_points, DiffeoExpr, FixedPointKind, FixedPointSet};
use clique_forest::obstruct::{
    center_nonabelian_check, find_centralizer_quadruple, heisenberg_ball, parse_oracle, remark_counterexample_suite,
    CenterReport, CommutationOracle, MatrixOracle, ObstructionCertificate, RemarkReport,
};
use clique_forest::raag::{
    check_component_completeness, commutation_graph, embeddable_raag, CommGraphOptions, CommutationGraph,
    CompletenessReport, EmbeddingDecision, SimpleGraph,
};
use clique_forest::synth::{
    synthesize_embedding, verify_assignment, GeneratorAssignment, PerturbOptions, SynthError, SynthOptions,
    VerificationReport, VerifyOptions,
};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::{Command, Failure, Format, SchemaName, Status};

/// Commutation graph together with its per-component completeness.
#[derive(Serialize, Deserialize, JsonSchema)]
pub struct CommgraphReport {
    pub commutation: CommutationGraph,
    pub completeness: CompletenessReport,
}

/// Search results over a finite list of matrices.
#[derive(Serialize, Deserialize, JsonSchema)]
pub struct ObstructReport {
    pub elements: usize,
    pub certificate: Option<ObstructionCertificate>,
    pub center: CenterReport,
}

pub fn run(cmd: Command) -> Result<Status, Failure> {
    match cmd {
        Command::Decide { graph, common } => {
            let g = read_graph(&graph)?;
            let d = embeddable_raag(&g, common.manifold.into()).map_err(|e| Failure::input(e.to_string()))?;
            emit_json(common.out.as_deref(), &d)?;
            Ok(if d.embeddable { Status::Pass } else { Status::Finding })
        }
        Command::Synthesize { graph, common, synth, report } => {
            let g = read_graph(&graph)?;
            let manifold = common.manifold.into();
            let decision = embeddable_raag(&g, manifold).map_err(|e| Failure::input(e.to_string()))?;
            if !decision.embeddable {
                emit_json(common.out.as_deref(), &decision)?;
                return Ok(Status::Finding);
            }
            check_positive("grid", common.grid as f64)?;
            check_positive("tol", common.tol)?;
            let opts = SynthOptions {
                word_len: synth.word_len,
                alpha_k: synth.alpha_k,
                perturb: PerturbOptions { basepoint: synth.basepoint, grid: common.grid, ..PerturbOptions::default() },
                ..SynthOptions::default()
            };
            let a = synthesize_embedding(&g, manifold, &opts).map_err(synth_failure)?;
            let vopts = VerifyOptions { word_len: synth.word_len, grid: common.grid, tol: common.tol };
            let r = verify_assignment(&a, &g, &vopts).map_err(synth_failure)?;
            emit_json(common.out.as_deref(), &a)?;
            if let Some(path) = report {
                emit_json(Some(&path), &r)?;
            }
            summarize(&r);
            Ok(if r.pass { Status::Pass } else { Status::Finding })
        }
        Command::Verify { assignment, graph, common, word_len } => {
            let text = read(&assignment)?;
            let a: GeneratorAssignment =
                serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", assignment.display())))?;
            let g = match graph {
                Some(p) => read_graph(&p)?,
                None => a.graph.clone(),
            };
            check_positive("tol", common.tol)?;
            let r = verify_assignment(&a, &g, &VerifyOptions { word_len, grid: common.grid, tol: common.tol })
                .map_err(synth_failure)?;
            emit_json(common.out.as_deref(), &r)?;
            summarize(&r);
            Ok(if r.pass { Status::Pass } else { Status::Finding })
        }
        Command::Fixpoints { expr, common, format } => {
            let e = read_expr(&expr)?;
            check_positive("tol", common.tol)?;
            let set = fixed_points(&e, common.grid, common.tol).map_err(|e| Failure::input(e.to_string()))?;
            match format {
                Format::Json => emit_json(common.out.as_deref(), &set)?,
                Format::Text => emit(common.out.as_deref(), &fixpoint_text(&set))?,
            }
            let flagged = set.degenerate || set.points.iter().any(|p| p.kind == FixedPointKind::TangencySuspect);
            Ok(if flagged { Status::Finding } else { Status::Pass })
        }
        Command::Commgraph { exprs, common, power_bound, report } => {
            let fs = read_expr_list(&exprs)?;
            check_positive("tol", common.tol)?;
            let opts = CommGraphOptions { tol: common.tol, power_bound, grid: common.grid };
            let cg = commutation_graph(&fs, &opts).map_err(|e| Failure::input(e.to_string()))?;
            let completeness = check_component_completeness(&cg.graph);
            emit(common.out.as_deref(), &cg.graph.to_dot())?;
            let pass = completeness.pass;
            if let Some(path) = report {
                emit_json(Some(&path), &CommgraphReport { commutation: cg, completeness })?;
            }
            Ok(if pass { Status::Pass } else { Status::Finding })
        }
        Command::Obstruct { oracle, heisenberg, out } => {
            let o: MatrixOracle = match (oracle, heisenberg) {
                (Some(p), None) => parse_oracle(&read(&p)?).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
                (None, Some(r)) => heisenberg_ball(r).map_err(|e| Failure::input(e.to_string()))?,
                _ => return Err(Failure::input("give an oracle file or --heisenberg R")),
            };
            let certificate = find_centralizer_quadruple(&o);
            let center = center_nonabelian_check(&o);
            let found = certificate.is_some();
            emit_json(out.as_deref(), &ObstructReport { elements: o.len(), certificate, center })?;
            Ok(if found { Status::Finding } else { Status::Pass })
        }
        Command::Remark { a, b, n_max, grid, out } => {
            let r = remark_counterexample_suite(a, b, n_max, grid).map_err(|e| Failure::input(e.to_string()))?;
            emit_json(out.as_deref(), &r)?;
            Ok(Status::Pass)
        }
        Command::Schema { document, out } => {
            let schema = schema_for(document);
            emit(out.as_deref(), &serde_json::to_string_pretty(&schema).expect("schemas serialize"))?;
            Ok(Status::Pass)
        }
    }
}

pub fn schema_for(name: SchemaName) -> schemars::Schema {
    match name {
        SchemaName::Decision => schemars::schema_for!(EmbeddingDecision),
        SchemaName::Assignment => schemars::schema_for!(GeneratorAssignment),
        SchemaName::Verification => schemars::schema_for!(VerificationReport),
        SchemaName::Fixpoints => schemars::schema_for!(FixedPointSet),
        SchemaName::Commgraph => schemars::schema_for!(CommgraphReport),
        SchemaName::Obstruct => schemars::schema_for!(ObstructReport),
        SchemaName::Remark => schemars::schema_for!(RemarkReport),
        SchemaName::Expr => schemars::schema_for!(DiffeoExpr),
        SchemaName::Graph => schemars::schema_for!(SimpleGraph),
    }
}

fn synth_failure(e: SynthError) -> Failure {
    let status = match &e {
        SynthError::StageFailure { .. } | SynthError::EpsilonUnderflow { .. } | SynthError::Dependent { .. } => {
            Status::StageFailure
        }
        SynthError::NotEmbeddable(_) => Status::Finding,
        _ => Status::InputError,
    };
    Failure { status, message: e.to_string() }
}

fn check_positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::input(format!("--{name} must be positive, got {v}")))
    }
}

fn summarize(r: &VerificationReport) {
    let verdict = if r.pass { "pass" } else { "FAIL" };
    let mut line = format!(
        "verification {verdict}: {} edges, {} non-edges",
        r.edges.len(),
        r.non_edges.len()
    );
    if let Some(fp) = &r.free_product {
        line.push_str(&format!(
            ", {} words (≤ {}) over {} targets, min margin/D {:.6}",
            fp.words_checked, fp.word_len, fp.targets, fp.min_ratio
        ));
    }
    eprintln!("{line}");
    eprintln!("scope: {}", r.truncation);
    for f in &r.failures {
        eprintln!("  {f}");
    }
}

fn fixpoint_text(set: &FixedPointSet) -> String {
    if set.degenerate {
        return format!("degenerate: identity within {:e} at all {} grid points", set.residual_tol, set.points.len());
    }
    set.points
        .iter()
        .map(|p| match p.kind {
            FixedPointKind::Transverse => format!("{}", p.x),
            FixedPointKind::TangencySuspect => format!("{} (tangency?)", p.x),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<SimpleGraph, Failure> {
    SimpleGraph::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_expr(text: &str) -> Result<DiffeoExpr, String> {
    if text.trim_start().starts_with('{') {
        DiffeoExpr::from_json(text)
    } else {
        DiffeoExpr::parse(text.trim()).map_err(|e| e.to_string())
    }
}

fn read_expr(path: &Path) -> Result<DiffeoExpr, Failure> {
    parse_expr(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_expr_list(path: &Path) -> Result<Vec<DiffeoExpr>, Failure> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())));
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        out.push(parse_expr(content).map_err(|e| Failure::input(format!("{}:{}: {e}", path.display(), i + 1)))?);
    }
    Ok(out)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    emit(out, &serde_json::to_string_pretty(value).expect("documents serialize"))
}
