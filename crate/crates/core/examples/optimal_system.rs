//! Verifies a one-dimensional optimal system: pairwise inequivalence and
//! sampled completeness.
//!
//! `cargo run --release --example optimal_system -- heat-optsys [samples] [seed]`

use liesym::equivalence::{Engine, EquivOptions};
use liesym::optsys::{verify_completeness, verify_inequivalence, OptimalSystem, SamplerOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "kdv-optsys".into());
    let count = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let sys = OptimalSystem::load(&name)?;
    let engine = Engine::for_algebra(&sys.algebra)?;
    let opts = EquivOptions { seed, ..Default::default() };

    let pairs = verify_inequivalence(&engine, &sys, &opts)?;
    for c in &pairs.cells {
        let how = c
            .checks
            .iter()
            .find_map(|k| match &k.decision {
                liesym::equivalence::Decision::Inequivalent { certificate } => {
                    Some(format!("{:?} on {}", certificate.kind, certificate.level))
                }
                _ => None,
            })
            .unwrap_or_default();
        println!("{:>10} vs {:<10} {:<13} {how}", c.first, c.second, c.verdict);
    }
    for c in &pairs.within_family {
        println!("within {:<10} {}", c.first, c.verdict);
    }
    println!(
        "pairs: {} inequivalent, {} unknown, {} equivalent",
        pairs.inequivalent, pairs.unknown, pairs.equivalent
    );

    let sampler = SamplerOptions { count, seed, range: 5 };
    let cov = verify_completeness(&engine, &sys, &sampler, &opts)?;
    println!("coverage {}/{} = {:.3}", cov.matched, cov.samples, cov.coverage);
    for (rep, hits) in &cov.hits {
        println!("  {rep:<10} {hits}");
    }
    for f in cov.failures.iter().take(10) {
        println!("  unmatched {:?} best residual {:.3e}", f.sample, f.best_residual);
    }
    Ok(())
}
