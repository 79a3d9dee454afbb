mod common;

use std::sync::OnceLock;

use common::*;
use liesym::equivalence::{Decision, Engine, EquivOptions, SymPoint, TargetFamily};
use liesym::fixtures;
use liesym::liealg::LieAlgebra;
use liesym::optsys::{
    instances, stratify, verify_completeness, verify_inequivalence, InequivalenceReport, OptimalSystem,
    SamplerOptions,
};
use liesym::report::to_json;
use liesym::Error;

fn engine(name: &str) -> &'static Engine {
    static KDV: OnceLock<Engine> = OnceLock::new();
    static HEAT: OnceLock<Engine> = OnceLock::new();
    let cell = if name == "kdv" { &KDV } else { &HEAT };
    cell.get_or_init(|| Engine::for_algebra(&fixtures::builtin_algebra(name).unwrap()).unwrap())
}

#[test]
fn builtin_systems_load() {
    let kdv = OptimalSystem::load("kdv-optsys").unwrap();
    assert_eq!(kdv.names(), ["v4", "v3+v2", "v3-v2", "v3", "v2", "v1"]);
    let heat = OptimalSystem::load("heat-optsys").unwrap();
    assert_eq!(heat.reps.len(), 8);
    assert_eq!(heat.algebra.name(), "heat");
    let w1 = &heat.reps[0];
    assert_eq!(instances(w1).unwrap().len(), 5);
    assert!(OptimalSystem::load("/nonexistent/system.json").is_err());
}

#[test]
fn parameter_domain_limits_instances() {
    let text = r#"{"algebra": "heat", "reps": [
        {"name": "w", "coeffs": ["0", "0", "alpha", "1", "0", "0"], "params": ["alpha"], "param_domain": {"alpha": [0, 1]}},
        {"name": "x", "coeffs": ["1", "0", "0", "0", "0", "0"], "params": []}]}"#;
    let sys = OptimalSystem::from_json(text, None).unwrap();
    assert_eq!(sys.reps[0].range(0, [-9.0, 9.0]), [0.0, 1.0]);
    let names: Vec<String> = instances(&sys.reps[0]).unwrap().into_iter().map(|t| t.name).collect();
    assert_eq!(names.len(), 2, "{names:?}");
    let bad = text.replace(r#""alpha": [0, 1]"#, r#""beta": [0, 1]"#);
    assert!(OptimalSystem::from_json(&bad, None).is_err());
}

#[test]
fn malformed_systems_name_the_field() {
    let short = r#"{"algebra": "kdv", "reps": [
        {"name": "a", "coeffs": ["0", "0", "0", "1"], "params": []},
        {"name": "b", "coeffs": ["0", "1"], "params": []}]}"#;
    let e = OptimalSystem::from_json(short, None).unwrap_err().to_string();
    assert!(e.contains("reps[1]"), "{e}");
    let zero = r#"{"algebra": "kdv", "reps": [{"name": "z", "coeffs": ["0", "0", "0", "0"], "params": []}]}"#;
    assert!(OptimalSystem::from_json(zero, None).unwrap_err().to_string().contains("reps[0]"));
    let missing = r#"{"reps": []}"#;
    assert!(OptimalSystem::from_json(missing, None).unwrap_err().to_string().contains("algebra"));
    let unknown = r#"{"algebra": "nope", "reps": [{"name": "a", "coeffs": ["1"], "params": []}]}"#;
    assert!(matches!(OptimalSystem::from_json(unknown, None), Err(Error::Field { .. })));
}

#[test]
fn duplicate_representative_is_flagged() {
    let mut sys = OptimalSystem::load("kdv-optsys").unwrap();
    sys.reps.push(TargetFamily::fixed("2v4+v1", &ints(&[1, 0, 0, 2])));
    let r = verify_inequivalence(engine("kdv"), &sys, &EquivOptions::default()).unwrap();
    assert!(!r.passed);
    assert_eq!(r.equivalent, 1);
    let cell = r.cells.iter().find(|c| c.verdict == "equivalent").unwrap();
    assert_eq!((cell.first.as_str(), cell.second.as_str()), ("v4", "2v4+v1"));
}

fn reports() -> &'static [(OptimalSystem, InequivalenceReport)] {
    static R: OnceLock<Vec<(OptimalSystem, InequivalenceReport)>> = OnceLock::new();
    R.get_or_init(|| {
        ["kdv", "heat"]
            .iter()
            .map(|n| {
                let sys = OptimalSystem::load(&format!("{n}-optsys")).unwrap();
                let r = verify_inequivalence(engine(n), &sys, &EquivOptions::default()).unwrap();
                (sys, r)
            })
            .collect()
    })
}

#[test]
fn every_certificate_replays() {
    for (sys, report) in reports() {
        assert!(report.passed && report.unknown == 0, "{}: {} unknown", sys.algebra.name(), report.unknown);
        let mut fixed = std::collections::HashMap::new();
        for r in &sys.reps {
            for inst in instances(r).unwrap() {
                fixed.insert(inst.name.clone(), inst);
            }
        }
        let mut replayed = 0;
        for cell in report.cells.iter().chain(&report.within_family) {
            for check in &cell.checks {
                let Decision::Inequivalent { certificate } = &check.decision else { continue };
                let a = fixed[&check.source].exact(&[]).unwrap();
                let target = sys
                    .reps
                    .iter()
                    .find(|r| r.name == check.target)
                    .cloned()
                    .unwrap_or_else(|| fixed[&check.target].clone());
                let ok = certificate.reverify(&sys.algebra, &SymPoint::fixed(&a), &SymPoint::family(&target)).unwrap();
                assert!(ok, "{} -> {}: {certificate:?}", check.source, check.target);
                replayed += 1;
            }
        }
        assert!(replayed >= report.cells.len());
    }
}

#[test]
fn heat_reports_all_pairs_inequivalent() {
    let (_, heat) = &reports()[1];
    assert_eq!((heat.inequivalent, heat.unknown, heat.equivalent), (28, 0, 0));
    let (_, kdv) = &reports()[0];
    assert_eq!((kdv.inequivalent, kdv.unknown, kdv.equivalent), (15, 0, 0));
    // the omega1 reflection alpha <-> -1 - alpha shows up within the family
    let w1 = heat.within_family.iter().find(|c| c.first == "omega1").unwrap();
    assert_eq!(w1.verdict, "equivalent");
}

#[test]
fn coverage_is_monotone_under_removal() {
    let sys = OptimalSystem::load("kdv-optsys").unwrap();
    let sampler = SamplerOptions { count: 50, ..Default::default() };
    let opts = EquivOptions::default();
    let full = verify_completeness(engine("kdv"), &sys, &sampler, &opts).unwrap();
    assert_eq!(full.coverage, 1.0);
    for name in sys.names() {
        let pruned = verify_completeness(engine("kdv"), &sys.without(&name), &sampler, &opts).unwrap();
        assert!(pruned.matched <= full.matched, "{name}");
        assert!(pruned.hits.values().sum::<usize>() == pruned.matched);
    }
    let zero = SamplerOptions { count: 0, ..Default::default() };
    assert!(verify_completeness(engine("kdv"), &sys, &zero, &opts).is_err());
}

#[test]
fn reports_are_byte_identical_for_a_seed() {
    let sys = OptimalSystem::load("kdv-optsys").unwrap();
    let sampler = SamplerOptions { count: 20, seed: 9, ..Default::default() };
    let opts = EquivOptions { seed: 4, ..Default::default() };
    let run = || {
        let inq = verify_inequivalence(engine("kdv"), &sys, &opts).unwrap();
        let cov = verify_completeness(engine("kdv"), &sys, &sampler, &opts).unwrap();
        (to_json(&inq).unwrap(), to_json(&cov).unwrap())
    };
    assert_eq!(run(), run());
}

#[test]
fn kdv_strata() {
    let tree = stratify(&fixtures::kdv(), 5).unwrap();
    assert!(tree.invariants.iter().any(|i| i.poly == "a4"));
    assert_eq!(tree.branch.as_deref(), Some("a4"));
    let zero = tree.children.iter().find(|c| c.chart.iter().any(|s| s == "a4=0")).expect("a4=0 stratum");
    assert!(zero.invariant_chart);
    let vars = liesym::invariants::coefficient_vars(4);
    let polys: Vec<_> = zero
        .invariants
        .iter()
        .map(|i| liesym::expr::Expr::parse(&i.poly).unwrap().to_laurent(&vars).unwrap())
        .collect();
    assert!(in_span(&polys, &poly("a2^2*a3^3", 4)), "{:?}", zero.invariants);
}

#[test]
fn heat_strata() {
    let tree = stratify(&fixtures::heat(), 7).unwrap();
    let vars = liesym::invariants::coefficient_vars(6);
    let parse = |s: &str| liesym::expr::Expr::parse(s).unwrap().to_laurent(&vars).unwrap();
    let root: Vec<_> = tree.invariants.iter().map(|i| parse(&i.poly)).collect();
    assert!(in_span(&root, &poly("a4^2-4*a2*a6", 6)));
    assert_eq!(tree.cases.len(), 2, "{:?}", tree.cases);
    let delta3 = tree
        .walk()
        .into_iter()
        .flat_map(|n| n.invariants.iter().map(|i| parse(&i.poly)))
        .any(|p| p == poly("4*a3+2*a4+a5^2/a6", 6));
    assert!(delta3);
    assert!(tree.walk().iter().any(|n| n.note.as_deref().is_some_and(|s| s.contains("not preserved"))));
}

#[test]
fn abelian_has_a_single_stratum() {
    let tree = stratify(&LieAlgebra::abelian(3), 2).unwrap();
    assert!(tree.children.is_empty());
    assert!(tree.invariant_chart);
    assert!(matches!(stratify(&fixtures::kdv(), 0), Err(Error::InvalidOptions(_))));
}
