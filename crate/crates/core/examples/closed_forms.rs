//! Replays every built-in closed-form witness at random admissible points.
//!
//! `cargo run --example closed_forms -- [samples] [seed]`

use liesym::equivalence::ClosedForm;
use liesym::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    for name in ["kdv", "heat"] {
        let text = fixtures::builtin_closed_forms_json(name).expect("builtin");
        for cf in ClosedForm::list_from_json(text)? {
            let alg = cf.resolve_algebra()?;
            let r = cf.check(&alg, samples, seed, 1e-9)?;
            println!(
                "{:<8} {:<16} {} evaluated={} skipped={} max_residual={:.3e}",
                name,
                r.name,
                if r.passed { "ok  " } else { "FAIL" },
                r.evaluated,
                r.skipped,
                r.max_residual
            );
        }
    }
    Ok(())
}
