//! Polynomial invariants and semi-invariants of the adjoint action, globally
//! or on a chart given as constraints.
//!
//! `cargo run --release --example invariants -- kdv 5 a4=0`

use liesym::fixtures;
use liesym::invariants::{fundamental, fundamental_semi, invariant_basis, semi_invariants, Chart, SearchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alg = fixtures::builtin_algebra(&args.next().unwrap_or_else(|| "heat".into()))?;
    let degree = args.next().map(|s| s.parse()).transpose()?.unwrap_or(alg.dim() as u32);
    let constraints: Vec<String> = args.collect();
    let chart = Chart::parse(alg.dim(), &constraints)?;
    if !chart.is_tangent(&alg)? {
        println!("warning: chart is not preserved by the adjoint action");
    }
    let opts = SearchOptions::on(chart.clone(), degree);

    let basis = invariant_basis(&alg, &opts)?;
    println!("{} invariants up to degree {degree}; fundamental:", basis.len());
    for e in fundamental(&basis) {
        println!("  [deg {}] {}", e.degree, e.poly);
    }
    if chart.is_homogeneous() {
        println!("semi-invariants:");
        for s in fundamental_semi(&semi_invariants(&alg, &opts)?).iter().filter(|s| !s.is_invariant()) {
            let chi: Vec<String> = s.character.iter().map(|c| c.to_string()).collect();
            println!("  [deg {}] {}  character ({})", s.degree, s.poly, chi.join(", "));
        }
    }
    Ok(())
}
