//! Command-line front end. Exit status: 0 success/PASS, 1 verification
//! failure, 2 input error.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::adjoint::{adjoint_chain, exp_ad, matrix_json, matrix_text};
use crate::equivalence::{ClosedForm, Decision, Engine, EquivOptions, TargetFamily};
use crate::fixtures;
use crate::invariants::{
    fundamental, fundamental_semi, invariant_basis, semi_invariants, Chart, SearchOptions, StratumNode,
};
use crate::liealg::{format_combination, LieAlgebra};
use crate::optsys::{self, OptimalSystem, SamplerOptions};
use crate::report::{format_float, poly_terms, to_json};
use crate::symkernel::{format_rational, Surd};

#[derive(Parser, Debug)]
#[command(name = "liesym", version, about = "Adjoint invariants and optimal systems of Lie algebras")]
pub struct Cli {
    /// machine-readable output
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraArgs {
    /// builtin algebra: kdv, heat or abelian-N
    #[arg(long, conflicts_with = "algebra")]
    pub builtin: Option<String>,
    /// algebra JSON file
    #[arg(long)]
    pub algebra: Option<PathBuf>,
}

impl AlgebraArgs {
    fn load(&self) -> Result<LieAlgebra> {
        match (&self.builtin, &self.algebra) {
            (Some(b), _) => Ok(fixtures::builtin_algebra(b)?),
            (None, Some(p)) => LieAlgebra::from_path(p).with_context(|| format!("reading algebra {}", p.display())),
            (None, None) => bail!("one of --builtin or --algebra is required"),
        }
    }
}

fn parse_order(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| anyhow!("--order: '{t}' is not an index")))
        .collect()
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Commutator table
    Table {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// One-parameter adjoint matrices and their ordered product
    Adjoint {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// chain order, e.g. 4,5,3,1,2,6
        #[arg(long)]
        order: Option<String>,
    },
    /// Polynomial (or Laurent) invariants and semi-invariants
    Invariants {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// maximal degree (default: dimension)
        #[arg(long)]
        degree: Option<u32>,
        /// restrict to a chart, e.g. a4=0 (repeatable)
        #[arg(long = "constraint")]
        constraints: Vec<String>,
        /// allowed denominator ai:k
        #[arg(long)]
        denominator: Option<String>,
    },
    /// Decide equivalence of two elements
    Equiv {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// source coefficients "a1,...,an"
        #[arg(long, allow_hyphen_values = true)]
        source: String,
        /// target coefficients, a generator name or a representative name
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// optimal system consulted for representative names
        #[arg(long)]
        system: Option<String>,
        #[arg(long, overrides_with = "no_scale")]
        scale: bool,
        /// forbid rescaling
        #[arg(long = "no-scale")]
        no_scale: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        order: Option<String>,
    },
    /// Verify an optimal system (pairwise inequivalence and sampled completeness)
    Verify {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// builtin system (kdv-optsys, heat-optsys) or JSON file
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// also replay closed-form witnesses (builtin name or JSON file)
        #[arg(long)]
        closed_forms: Option<String>,
    },
    /// Case tree of invariant strata
    Stratify {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// maximal degree (default: dimension + 1)
        #[arg(long)]
        degree: Option<u32>,
    },
}

/// Runs a parsed command, writing the report to `out`. `Ok(false)` means a
/// verification failed.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Table { alg } => table(&alg.load()?, cli.json, out),
        Command::Adjoint { alg, order } => {
            let a = alg.load()?;
            let order = match order {
                Some(s) => parse_order(s)?,
                None => fixtures::preferred_order(&a),
            };
            adjoint(&a, &order, cli.json, out)
        }
        Command::Invariants {
            alg,
            degree,
            constraints,
            denominator,
        } => {
            let a = alg.load()?;
            invariants(&a, degree.unwrap_or(a.dim() as u32), constraints, denominator.as_deref(), cli.json, out)
        }
        Command::Equiv {
            alg,
            source,
            target,
            system,
            scale: _,
            no_scale,
            tol,
            restarts,
            seed,
            order,
        } => {
            let a = alg.load()?;
            let opts = EquivOptions {
                allow_scale: !no_scale,
                tol: *tol,
                restarts: *restarts,
                seed: *seed,
            };
            opts.validate()?;
            let order = match order {
                Some(s) => parse_order(s)?,
                None => fixtures::preferred_order(&a),
            };
            equiv(&a, source, target, system.as_deref(), &order, &opts, cli.json, out)
        }
        Command::Verify {
            alg,
            system,
            samples,
            seed,
            tol,
            restarts,
            closed_forms,
        } => {
            let sys = OptimalSystem::load(system).with_context(|| format!("loading system '{system}'"))?;
            if alg.builtin.is_some() || alg.algebra.is_some() {
                let a = alg.load()?;
                if a != sys.algebra {
                    bail!("system '{system}' is defined over {}, not {}", sys.algebra.name(), a.name());
                }
            }
            let opts = EquivOptions {
                allow_scale: true,
                tol: *tol,
                restarts: *restarts,
                seed: *seed,
            };
            opts.validate()?;
            let sampler = SamplerOptions {
                count: *samples,
                seed: *seed,
                range: 5,
            };
            verify(&sys, &opts, &sampler, closed_forms.as_deref(), cli.json, out)
        }
        Command::Stratify { alg, degree } => {
            let a = alg.load()?;
            let tree = optsys::stratify(&a, degree.unwrap_or(a.dim() as u32 + 1))?;
            if cli.json {
                out.write_all(to_json(&tree)?.as_bytes())?;
            } else {
                print_tree(&tree, 0, out)?;
            }
            Ok(true)
        }
    }
}

/// Entry point used by the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn table(alg: &LieAlgebra, json: bool, out: &mut dyn Write) -> Result<bool> {
    let n = alg.dim();
    let names = alg.generator_names();
    let cells: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| format_combination(alg.bracket_basis(i, j), names)).collect())
        .collect();
    if json {
        let exact: Vec<Vec<Vec<String>>> = alg
            .table()
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(format_rational).collect()).collect())
            .collect();
        let v = json!({"algebra": alg.name(), "generators": names, "table": cells, "coefficients": exact});
        out.write_all(to_json(&v)?.as_bytes())?;
        return Ok(true);
    }
    let width = cells.iter().flatten().chain(names).map(String::len).max().unwrap_or(1).max(2);
    write!(out, "{:>w$} |", "[,]", w = width)?;
    for nm in names {
        write!(out, " {nm:>width$}")?;
    }
    writeln!(out)?;
    writeln!(out, "{}", "-".repeat((width + 1) * (n + 1) + 1))?;
    for (i, row) in cells.iter().enumerate() {
        write!(out, "{:>width$} |", names[i])?;
        for c in row {
            write!(out, " {c:>width$}")?;
        }
        writeln!(out)?;
    }
    Ok(true)
}

fn adjoint(alg: &LieAlgebra, order: &[usize], json: bool, out: &mut dyn Write) -> Result<bool> {
    let singles = (1..=alg.dim()).map(|i| exp_ad(alg, i)).collect::<Result<Vec<_>, _>>()?;
    let chain = adjoint_chain(alg, order)?;
    if json {
        let gens: Vec<Value> = singles
            .iter()
            .map(|m| {
                Ok(json!({
                    "generator": m.generator,
                    "matrix": serde_json::to_value(matrix_json(&m.entries))?,
                }))
            })
            .collect::<Result<_, serde_json::Error>>()?;
        let v = json!({
            "algebra": alg.name(),
            "generators": gens,
            "chain": {"order": order, "matrix": serde_json::to_value(matrix_json(&chain.entries))?},
        });
        out.write_all(to_json(&v)?.as_bytes())?;
        return Ok(true);
    }
    for m in &singles {
        writeln!(out, "A{} = exp(-e{} ad v{}):", m.generator, m.generator, m.generator)?;
        out.write_all(matrix_text(&m.entries).as_bytes())?;
        writeln!(out)?;
    }
    let factors: Vec<String> = order.iter().map(|k| format!("A{k}")).collect();
    writeln!(out, "A = {}:", factors.join(" "))?;
    out.write_all(matrix_text(&chain.entries).as_bytes())?;
    Ok(true)
}

fn parse_denominator(s: &str, n: usize) -> Result<(usize, u32)> {
    let (v, k) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("--denominator: expected ai:k, got '{s}'"))?;
    let i: usize = v
        .trim()
        .strip_prefix('a')
        .and_then(|x| x.parse().ok())
        .filter(|&i| i >= 1 && i <= n)
        .ok_or_else(|| anyhow!("--denominator: unknown coordinate '{v}'"))?;
    let k: u32 = k.trim().parse().map_err(|_| anyhow!("--denominator: bad power '{k}'"))?;
    Ok((i - 1, k))
}

const LAURENT_NOTE: &str = "degree of a Laurent invariant is its numerator degree minus the denominator power";

fn invariants(
    alg: &LieAlgebra,
    degree: u32,
    constraints: &[String],
    denominator: Option<&str>,
    json: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    let n = alg.dim();
    let chart = Chart::parse(n, constraints).context("--constraint")?;
    let tangent = chart.is_tangent(alg)?;
    let mut opts = SearchOptions::on(chart.clone(), degree);
    if let Some(d) = denominator {
        let (v, k) = parse_denominator(d, n)?;
        opts = opts.with_denominator(v, k);
    }
    let set = invariant_basis(alg, &opts)?;
    let fund = fundamental(&set);
    let semis = if chart.is_homogeneous() {
        Some(fundamental_semi(&semi_invariants(alg, &opts)?))
    } else {
        None
    };
    if json {
        let entries: Vec<Value> = set
            .entries
            .iter()
            .map(|e| {
                json!({
                    "poly": e.poly.to_string(),
                    "terms": poly_terms(&e.poly),
                    "degree": e.degree,
                    "character": vec!["0"; n],
                    "fundamental": fund.iter().any(|f| f.poly == e.poly),
                })
            })
            .collect();
        let semi: Option<Vec<Value>> = semis.as_ref().map(|list| {
            list.iter()
                .map(|s| {
                    json!({
                        "poly": s.poly.to_string(),
                        "terms": poly_terms(&s.poly),
                        "degree": s.degree,
                        "character": s.character.iter().map(format_rational).collect::<Vec<_>>(),
                    })
                })
                .collect()
        });
        let v = json!({
            "algebra": alg.name(),
            "degree": degree,
            "chart": chart.describe(),
            "chart_tangent": tangent,
            "invariants": entries,
            "semi_invariants": semi,
            "blocks": serde_json::to_value(&set.blocks)?,
            "degree_convention": denominator.map(|_| LAURENT_NOTE),
        });
        out.write_all(to_json(&v)?.as_bytes())?;
        return Ok(true);
    }
    if !chart.is_global() {
        writeln!(out, "chart: {}", chart.describe().join(", "))?;
        if !tangent {
            writeln!(out, "warning: the chart is not preserved by the adjoint action")?;
        }
    }
    writeln!(out, "invariant basis up to degree {degree} ({} elements):", set.len())?;
    for e in &set.entries {
        let mark = if fund.iter().any(|f| f.poly == e.poly) { "*" } else { " " };
        writeln!(out, " {mark} [deg {}] {}", e.degree, e.poly)?;
    }
    match &semis {
        Some(list) => {
            writeln!(out, "fundamental semi-invariants ({}):", list.len())?;
            for s in list {
                let chi: Vec<String> = s.character.iter().map(format_rational).collect();
                writeln!(out, "   [deg {}] {}  character ({})", s.degree, s.poly, chi.join(", "))?;
            }
        }
        None => writeln!(out, "semi-invariants: not searched on a non-homogeneous chart")?,
    }
    writeln!(out, "(* = fundamental)")?;
    if denominator.is_some() {
        writeln!(out, "note: {LAURENT_NOTE}")?;
    }
    Ok(true)
}

/// Resolves a target: coefficient list, generator name, or representative.
fn resolve_target(alg: &LieAlgebra, spec: &str, system: Option<&str>) -> Result<TargetFamily> {
    let n = alg.dim();
    if spec.contains(',') || n == 1 {
        return TargetFamily::parse_vector("target", spec, n).context("--target");
    }
    if let Some(i) = alg.generator_names().iter().position(|g| g == spec) {
        let coeffs: Vec<String> = (0..n).map(|k| if k == i { "1".into() } else { "0".into() }).collect();
        return Ok(TargetFamily::new(spec, &coeffs, &[])?);
    }
    let sys_name = system.map(str::to_string).unwrap_or_else(|| format!("{}-optsys", alg.name()));
    let sys = OptimalSystem::load(&sys_name).with_context(|| format!("--target '{spec}': no system '{sys_name}'"))?;
    sys.reps
        .into_iter()
        .find(|r| r.name == spec)
        .ok_or_else(|| anyhow!("--target: '{spec}' is not a coefficient list, generator or representative of {sys_name}"))
}

#[allow(clippy::too_many_arguments)]
fn equiv(
    alg: &LieAlgebra,
    source: &str,
    target: &str,
    system: Option<&str>,
    order: &[usize],
    opts: &EquivOptions,
    json: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    let src = TargetFamily::parse_vector("source", source, alg.dim()).context("--source")?;
    let a: Vec<Surd> = src.exact(&[]).ok_or_else(|| anyhow!("--source must be numeric"))?;
    let t = resolve_target(alg, target, system)?;
    let engine = Engine::new(alg, order, alg.dim() as u32 + 1)?;
    let d = engine.decide(&a, &t, opts)?;
    if json {
        let v = json!({
            "source": src.coeffs,
            "target": {"name": t.name, "coeffs": t.coeffs, "params": t.params},
            "order": order,
            "allow_scale": opts.allow_scale,
            "decision": serde_json::to_value(&d)?,
        });
        out.write_all(to_json(&v)?.as_bytes())?;
        return Ok(true);
    }
    writeln!(out, "source: ({})", src.coeffs.join(", "))?;
    writeln!(out, "target: {} = ({})", t.name, t.coeffs.join(", "))?;
    print_decision(&d, &t, out)?;
    Ok(true)
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format_float(*x)).collect::<Vec<_>>().join(", ")
}

fn print_decision(d: &Decision, t: &TargetFamily, out: &mut dyn Write) -> Result<()> {
    match d {
        Decision::Equivalent {
            epsilon,
            scale,
            params,
            residual,
            restart,
            chain_copies,
        } => {
            writeln!(out, "decision: equivalent")?;
            writeln!(out, "  epsilon ({chain_copies} chain copies): [{}]", floats(epsilon))?;
            writeln!(out, "  scale c: {}", format_float(*scale))?;
            for (p, v) in t.params.iter().zip(params) {
                writeln!(out, "  {p} = {}", format_float(*v))?;
            }
            writeln!(out, "  residual: {}  (restart {restart})", format_float(*residual))?;
        }
        Decision::Inequivalent { certificate: c } => {
            writeln!(out, "decision: inequivalent ({:?})", c.kind)?;
            writeln!(out, "  level: {}", c.level)?;
            writeln!(out, "  reason: {}", c.reason)?;
            for it in &c.items {
                writeln!(out, "  {} [deg {}]: source {}, target {}", it.poly, it.degree, it.source, it.target)?;
                if let Some(o) = &it.orientation {
                    let e: Vec<String> = o.timelike.iter().map(format_rational).collect();
                    writeln!(out, "    time orientation of {} <= 0, timelike e = ({})", o.form, e.join(", "))?;
                }
            }
            if let Some((s, t)) = c.membership {
                writeln!(out, "  in subset: source {s}, target {t}")?;
            }
        }
        Decision::Unknown { best_residual, restarts } => {
            writeln!(out, "decision: unknown")?;
            writeln!(out, "  best residual {} after {restarts} restarts", format_float(*best_residual))?;
        }
    }
    Ok(())
}

fn verify(
    sys: &OptimalSystem,
    opts: &EquivOptions,
    sampler: &SamplerOptions,
    closed_forms: Option<&str>,
    json: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    let engine = Engine::for_algebra(&sys.algebra)?;
    let pairs = if sys.reps.len() >= 2 {
        Some(optsys::verify_inequivalence(&engine, sys, opts)?)
    } else {
        None
    };
    let cov = optsys::verify_completeness(&engine, sys, sampler, opts)?;
    let forms = match closed_forms {
        Some(name) => {
            let text = match fixtures::builtin_closed_forms_json(name) {
                Some(t) => t.to_string(),
                None => std::fs::read_to_string(name).with_context(|| format!("reading closed forms '{name}'"))?,
            };
            let mut reports = Vec::new();
            for cf in ClosedForm::list_from_json(&text)? {
                let alg = cf.resolve_algebra()?;
                reports.push(cf.check(&alg, 20, sampler.seed, opts.tol)?);
            }
            Some(reports)
        }
        None => None,
    };
    let pass = pairs.as_ref().is_none_or(|p| p.passed)
        && cov.matched == cov.samples
        && forms.as_ref().is_none_or(|f| f.iter().all(|r| r.passed));
    if json {
        let v = json!({
            "algebra": sys.algebra.name(),
            "representatives": sys.names(),
            "inequivalence": serde_json::to_value(&pairs)?,
            "coverage": serde_json::to_value(&cov)?,
            "closed_forms": serde_json::to_value(&forms)?,
            "pass": pass,
        });
        out.write_all(to_json(&v)?.as_bytes())?;
        return Ok(pass);
    }
    writeln!(out, "system over {}: {}", sys.algebra.name(), sys.names().join(", "))?;
    if let Some(p) = &pairs {
        writeln!(out, "pairwise checks:")?;
        for c in &p.cells {
            writeln!(out, "  {:>12} vs {:<12} {}", c.first, c.second, c.verdict)?;
        }
        writeln!(
            out,
            "  {} inequivalent, {} unknown, {} equivalent; {}",
            p.inequivalent,
            p.unknown,
            p.equivalent,
            if p.equivalent == 0 { "no duplicates detected" } else { "DUPLICATES FOUND" }
        )?;
    }
    writeln!(out, "completeness: {}/{} samples matched (coverage {:.4})", cov.matched, cov.samples, cov.coverage)?;
    for (r, h) in &cov.hits {
        writeln!(out, "  {r:<12} {h}")?;
    }
    for f in cov.failures.iter().take(20) {
        writeln!(out, "  unmatched {:?} (best residual {})", f.sample, format_float(f.best_residual))?;
    }
    if let Some(fs) = &forms {
        writeln!(out, "closed forms:")?;
        for r in fs {
            writeln!(
                out,
                "  {:<16} {} max residual {} over {} samples",
                r.name,
                if r.passed { "ok  " } else { "FAIL" },
                format_float(r.max_residual),
                r.evaluated
            )?;
        }
    }
    writeln!(out, "{}", if pass { "PASS" } else { "FAIL" })?;
    Ok(pass)
}

fn print_tree(node: &StratumNode, depth: usize, out: &mut dyn Write) -> Result<()> {
    let pad = "  ".repeat(depth);
    let title = if node.conditions.is_empty() {
        "all elements".to_string()
    } else {
        node.conditions.last().cloned().unwrap_or_default()
    };
    writeln!(out, "{pad}- {title}")?;
    if !node.chart.is_empty() {
        writeln!(out, "{pad}  chart: {}", node.chart.join(", "))?;
    }
    if !node.nonzero.is_empty() {
        writeln!(out, "{pad}  nonzero: {}", node.nonzero.join(", "))?;
    }
    for i in &node.invariants {
        writeln!(out, "{pad}  invariant [deg {}] {}", i.degree, i.poly)?;
    }
    for s in &node.semi_invariants {
        writeln!(out, "{pad}  semi-invariant [deg {}] {} character ({})", s.degree, s.poly, s.character.join(", "))?;
    }
    if !node.cases.is_empty() {
        writeln!(out, "{pad}  cases: {}", node.cases.join(" | "))?;
    }
    if let Some(n) = &node.note {
        writeln!(out, "{pad}  note: {n}")?;
    }
    for c in &node.children {
        print_tree(c, depth + 1, out)?;
    }
    Ok(())
}
