//! Decides whether two elements lie in the same adjoint orbit (up to
//! scaling): an exact certificate, a numeric witness, or unknown.
//!
//! `cargo run --release --example equivalence -- heat 0,0,1/4,0,0,1 0,0,1/4,0,0,-1`

use liesym::equivalence::{Decision, Engine, EquivOptions, TargetFamily};
use liesym::fixtures;
use liesym::invariants::to_surd;
use liesym::symkernel::parse_rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alg = fixtures::builtin_algebra(&args.next().unwrap_or_else(|| "kdv".into()))?;
    let source = args.next().unwrap_or_else(|| "3,-2,5,2".into());
    let target = args.next().unwrap_or_else(|| "0,0,0,1".into());
    let a = source.split(',').map(|x| parse_rational(x.trim())).collect::<Result<Vec<_>, _>>()?;
    let t = TargetFamily::parse_vector("target", &target, alg.dim())?;

    let engine = Engine::for_algebra(&alg)?;
    match engine.decide(&to_surd(&a), &t, &EquivOptions::default())? {
        Decision::Equivalent { epsilon, scale, residual, chain_copies, .. } => {
            println!("equivalent: c = {scale:.6}, residual {residual:.2e}, chain copies {chain_copies}");
            println!("  e = {epsilon:.6?}");
            let check = engine.verify_witness(
                &a.iter().map(liesym::symkernel::rational::to_f64).collect::<Vec<_>>(),
                &t.eval(&[]),
                &epsilon,
                scale,
            );
            println!("  independent replay residual {check:.2e}");
        }
        Decision::Inequivalent { certificate } => {
            println!("inequivalent ({:?} on {}): {}", certificate.kind, certificate.level, certificate.reason);
            for item in &certificate.items {
                println!("  {} : {} vs {}", item.poly, item.source, item.target);
            }
        }
        Decision::Unknown { best_residual, restarts } => {
            println!("unknown after {restarts} restarts, best residual {best_residual:.2e}");
        }
    }
    Ok(())
}
