//! Candidate one-dimensional optimal systems: pairwise inequivalence,
//! sampled completeness and the advisory strata report.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equivalence::solver::restart_seed;
use crate::equivalence::{Decision, Engine, EquivOptions, TargetFamily};
use crate::error::Error;
use crate::fixtures;
use crate::invariants::{merge_uniform, stratify_tree, to_surd, StratumNode};
use crate::liealg::LieAlgebra;
use crate::symkernel::{format_rational, Rational};

#[derive(Deserialize)]
struct RepSpec {
    name: String,
    coeffs: Vec<String>,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default)]
    param_domain: Option<BTreeMap<String, [f64; 2]>>,
}

#[derive(Deserialize)]
struct SystemSpec {
    algebra: String,
    reps: Vec<RepSpec>,
}

#[derive(Clone, Debug)]
pub struct OptimalSystem {
    pub algebra: LieAlgebra,
    pub reps: Vec<TargetFamily>,
}

/// Resolves a builtin algebra name or a path to an algebra JSON file.
pub fn resolve_algebra(name_or_path: &str, base: Option<&Path>) -> Result<LieAlgebra, Error> {
    if let Ok(a) = fixtures::builtin_algebra(name_or_path) {
        return Ok(a);
    }
    let p = Path::new(name_or_path);
    let p = match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    };
    if p.exists() {
        LieAlgebra::from_path(&p)
    } else {
        Err(Error::Field {
            field: "algebra".into(),
            message: format!("'{name_or_path}' is neither a builtin algebra nor a readable file"),
        })
    }
}

impl OptimalSystem {
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self, Error> {
        let spec: SystemSpec = serde_json::from_str(text)?;
        let algebra = resolve_algebra(&spec.algebra, base)?;
        let n = algebra.dim();
        if spec.reps.is_empty() {
            return Err(Error::Field {
                field: "reps".into(),
                message: "at least one representative is required".into(),
            });
        }
        let mut reps = Vec::with_capacity(spec.reps.len());
        for (k, r) in spec.reps.iter().enumerate() {
            let field = |m: String| Error::Field {
                field: format!("reps[{k}]"),
                message: m,
            };
            if r.coeffs.len() != n {
                return Err(field(format!("expected {n} coefficients, found {}", r.coeffs.len())));
            }
            let t = TargetFamily::new(&r.name, &r.coeffs, &r.params).map_err(|e| match e {
                Error::Field { field: f, message } => Error::Field {
                    field: format!("reps[{k}].{f}"),
                    message,
                },
                e => field(e.to_string()),
            })?;
            let t = match &r.param_domain {
                Some(d) => t.with_domain(d.clone()).map_err(|e| field(e.to_string()))?,
                None => t,
            };
            if t.is_zero_vector() {
                return Err(field("representative is the zero element".into()));
            }
            reps.push(t);
        }
        Ok(OptimalSystem { algebra, reps })
    }

    /// A builtin system name, or a path to a system JSON file.
    pub fn load(name_or_path: &str) -> Result<Self, Error> {
        if let Some(text) = fixtures::builtin_system_json(name_or_path) {
            return Self::from_json(text, None);
        }
        let p = Path::new(name_or_path);
        let text = std::fs::read_to_string(p)?;
        Self::from_json(&text, p.parent())
    }

    pub fn names(&self) -> Vec<String> {
        self.reps.iter().map(|r| r.name.clone()).collect()
    }

    /// The system with one representative removed.
    pub fn without(&self, name: &str) -> Self {
        OptimalSystem {
            algebra: self.algebra.clone(),
            reps: self.reps.iter().filter(|r| r.name != name).cloned().collect(),
        }
    }
}

/// Sample values used for parametric representatives in pairwise checks.
pub const PARAM_GRID: [i64; 5] = [-2, -1, 0, 1, 2];

/// Fixed instances of a representative: itself, or its parameter grid
/// (full grid for up to two parameters, the diagonal beyond that).
pub fn instances(t: &TargetFamily) -> Result<Vec<TargetFamily>, Error> {
    let m = t.nparams();
    let grid: Vec<Vec<Rational>> = match m {
        0 => vec![vec![]],
        1 => PARAM_GRID.iter().map(|&x| vec![Rational::from_integer(x.into())]).collect(),
        2 => PARAM_GRID
            .iter()
            .flat_map(|&x| PARAM_GRID.iter().map(move |&y| vec![x, y]))
            .map(|v| v.into_iter().map(|x| Rational::from_integer(x.into())).collect())
            .collect(),
        _ => PARAM_GRID
            .iter()
            .map(|&x| vec![Rational::from_integer(x.into()); m])
            .collect(),
    };
    let mut out = Vec::new();
    for p in grid {
        let inside = p.iter().enumerate().all(|(k, v)| {
            let x: f64 = crate::symkernel::rational::to_f64(v);
            let [lo, hi] = t.range(k, [f64::NEG_INFINITY, f64::INFINITY]);
            lo <= x && x <= hi
        });
        if !inside {
            continue;
        }
        let inst = t.instantiate(&p)?;
        if !inst.is_zero_vector() {
            out.push(inst);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub source: String,
    pub target: String,
    pub decision: Decision,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCell {
    pub first: String,
    pub second: String,
    /// `equivalent` if any check found a witness, `inequivalent` if every
    /// check was certified, else `unknown`
    pub verdict: String,
    pub checks: Vec<PairCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequivalenceReport {
    pub names: Vec<String>,
    pub cells: Vec<PairCell>,
    /// distinct parameter values within one family (informational)
    pub within_family: Vec<PairCell>,
    pub inequivalent: usize,
    pub unknown: usize,
    pub equivalent: usize,
    pub passed: bool,
    pub note: String,
}

fn cell(first: &str, second: &str, checks: Vec<PairCheck>) -> PairCell {
    let verdict = if checks.iter().any(|c| c.decision.is_equivalent()) {
        "equivalent"
    } else if checks.iter().all(|c| c.decision.is_inequivalent()) {
        "inequivalent"
    } else {
        "unknown"
    };
    PairCell {
        first: first.into(),
        second: second.into(),
        verdict: verdict.into(),
        checks,
    }
}

fn exact_point(t: &TargetFamily) -> Vec<crate::symkernel::Surd> {
    t.exact(&[]).expect("fixed instance")
}

/// Every unordered pair of representatives: each fixed instance of the
/// first is decided against the whole family of the second.
pub fn verify_inequivalence(engine: &Engine, sys: &OptimalSystem, opts: &EquivOptions) -> Result<InequivalenceReport, Error> {
    opts.validate()?;
    let k = sys.reps.len();
    if k < 2 {
        return Err(Error::InvalidOptions("at least two representatives are required".into()));
    }
    let inst: Vec<Vec<TargetFamily>> = sys.reps.iter().map(instances).collect::<Result<_, _>>()?;
    let mut jobs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for s in &inst[i] {
                jobs.push((i, j, s.clone(), sys.reps[j].clone()));
            }
        }
    }
    let mut family_jobs = Vec::new();
    for (i, list) in inst.iter().enumerate() {
        for x in 0..list.len() {
            for y in x + 1..list.len() {
                family_jobs.push((i, i, list[x].clone(), list[y].clone()));
            }
        }
    }
    let run = |jobs: &[(usize, usize, TargetFamily, TargetFamily)], salt: u64| -> Result<Vec<PairCheck>, Error> {
        jobs.par_iter()
            .enumerate()
            .map(|(idx, (_, _, s, t))| {
                let o = EquivOptions {
                    seed: restart_seed(opts.seed ^ salt, idx as u64),
                    ..opts.clone()
                };
                Ok(PairCheck {
                    source: s.name.clone(),
                    target: t.name.clone(),
                    decision: engine.decide(&exact_point(s), t, &o)?,
                })
            })
            .collect()
    };
    let checks = run(&jobs, 0)?;
    let fchecks = run(&family_jobs, 0x5eed)?;
    let group = |jobs: &[(usize, usize, TargetFamily, TargetFamily)], checks: Vec<PairCheck>| {
        let mut cells: Vec<PairCell> = Vec::new();
        let mut cur: Option<(usize, usize)> = None;
        let mut buf = Vec::new();
        for (job, c) in jobs.iter().zip(checks) {
            if cur.is_some_and(|p| p != (job.0, job.1)) {
                let (i, j) = cur.unwrap();
                cells.push(cell(&sys.reps[i].name, &sys.reps[j].name, std::mem::take(&mut buf)));
            }
            cur = Some((job.0, job.1));
            buf.push(c);
        }
        if let Some((i, j)) = cur {
            cells.push(cell(&sys.reps[i].name, &sys.reps[j].name, buf));
        }
        cells
    };
    let cells = group(&jobs, checks);
    let within_family = group(&family_jobs, fchecks);
    let count = |v: &str| cells.iter().filter(|c| c.verdict == v).count();
    let equivalent = count("equivalent");
    Ok(InequivalenceReport {
        names: sys.names(),
        inequivalent: count("inequivalent"),
        unknown: count("unknown"),
        equivalent,
        passed: equivalent == 0,
        note: "no duplicates detected is not a proof of minimality".into(),
        cells,
        within_family,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleFailure {
    pub sample: Vec<i64>,
    pub best_residual: f64,
    /// representatives excluded by an exact certificate
    pub excluded: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub samples: usize,
    pub matched: usize,
    pub coverage: f64,
    pub hits: BTreeMap<String, usize>,
    pub failures: Vec<SampleFailure>,
    /// solver calls saved by certificate pruning
    pub pruned: usize,
}

#[derive(Clone, Debug)]
pub struct SamplerOptions {
    pub count: usize,
    pub seed: u64,
    /// integer coefficients are drawn from `[-range, range]`
    pub range: i64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            count: 200,
            seed: 1,
            range: 5,
        }
    }
}

/// Nonzero integer vectors, all drawn from one seeded stream.
pub fn sample_vectors(n: usize, opts: &SamplerOptions) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(opts.count);
    while out.len() < opts.count {
        let v: Vec<i64> = (0..n).map(|_| rng.random_range(-opts.range..=opts.range)).collect();
        if v.iter().any(|&x| x != 0) {
            out.push(v);
        }
    }
    out
}

enum Outcome {
    Hit(usize),
    Miss(f64, Vec<usize>),
}

pub fn verify_completeness(
    engine: &Engine,
    sys: &OptimalSystem,
    sampler: &SamplerOptions,
    opts: &EquivOptions,
) -> Result<CoverageReport, Error> {
    opts.validate()?;
    if sampler.count == 0 {
        return Err(Error::InvalidOptions("sample count must be at least 1".into()));
    }
    let vectors = sample_vectors(sys.algebra.dim(), sampler);
    let outcomes: Vec<(Outcome, usize)> = vectors
        .par_iter()
        .enumerate()
        .map(|(idx, v)| {
            let a = to_surd(&v.iter().map(|&x| Rational::from_integer(x.into())).collect::<Vec<_>>());
            // signature-compatible order: certified mismatches are skipped
            let (excluded, candidates): (Vec<usize>, Vec<usize>) =
                (0..sys.reps.len()).partition(|&r| engine.certify(&a, &sys.reps[r], true).is_some());
            let mut best = f64::INFINITY;
            for &r in &candidates {
                let o = EquivOptions {
                    seed: restart_seed(opts.seed, (idx * 1000 + r) as u64),
                    allow_scale: true,
                    ..opts.clone()
                };
                match engine.search(&a, &sys.reps[r], &o) {
                    Ok(Decision::Equivalent { .. }) => return (Outcome::Hit(r), excluded.len()),
                    Ok(Decision::Unknown { best_residual, .. }) => best = best.min(best_residual),
                    _ => {}
                }
            }
            (Outcome::Miss(best, excluded.clone()), excluded.len())
        })
        .collect();
    let mut hits: BTreeMap<String, usize> = sys.reps.iter().map(|r| (r.name.clone(), 0)).collect();
    let mut failures = Vec::new();
    let mut matched = 0;
    let mut pruned = 0;
    for (v, (o, p)) in vectors.iter().zip(outcomes) {
        pruned += p;
        match o {
            Outcome::Hit(r) => {
                matched += 1;
                *hits.get_mut(&sys.reps[r].name).unwrap() += 1;
            }
            Outcome::Miss(best, ex) => failures.push(SampleFailure {
                sample: v.clone(),
                best_residual: best,
                excluded: ex.iter().map(|&r| sys.reps[r].name.clone()).collect(),
            }),
        }
    }
    Ok(CoverageReport {
        samples: vectors.len(),
        matched,
        coverage: matched as f64 / vectors.len() as f64,
        hits,
        failures,
        pruned,
    })
}

/// Advisory case tree of invariant strata.
pub fn stratify(alg: &LieAlgebra, max_degree: u32) -> Result<StratumNode, Error> {
    if max_degree == 0 {
        return Err(Error::InvalidOptions("max degree must be at least 1".into()));
    }
    let mut tree = stratify_tree(alg, max_degree)?;
    merge_uniform(alg, &mut tree)?;
    Ok(tree)
}

/// `name(p=v,...)` label helper shared with reports.
pub fn instance_label(name: &str, params: &[String], values: &[Rational]) -> String {
    if params.is_empty() {
        return name.to_string();
    }
    let parts: Vec<String> = params
        .iter()
        .zip(values)
        .map(|(p, v)| format!("{p}={}", format_rational(v)))
        .collect();
    format!("{name}({})", parts.join(","))
}
