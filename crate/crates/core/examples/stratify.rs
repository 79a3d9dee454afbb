//! Case tree of invariant strata for a built-in algebra.
//!
//! `cargo run --example stratify -- heat 4`

use liesym::fixtures;
use liesym::invariants::StratumNode;
use liesym::optsys::stratify;

fn show(node: &StratumNode, depth: usize) {
    let pad = "  ".repeat(depth);
    let head = node.conditions.last().cloned().unwrap_or_else(|| "all elements".into());
    println!("{pad}- {head}");
    if !node.invariants.is_empty() {
        let inv: Vec<String> = node.invariants.iter().map(|i| format!("{} (deg {})", i.poly, i.degree)).collect();
        println!("{pad}  invariants: {}", inv.join(", "));
    }
    if !node.semi_invariants.is_empty() {
        let s: Vec<&str> = node.semi_invariants.iter().map(|s| s.poly.as_str()).collect();
        println!("{pad}  semi-invariants: {}", s.join(", "));
    }
    for c in &node.cases {
        println!("{pad}  case {c}");
    }
    if let Some(n) = &node.note {
        println!("{pad}  note: {n}");
    }
    for c in &node.children {
        show(c, depth + 1);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "kdv".into());
    let alg = fixtures::builtin_algebra(&name)?;
    let degree = args.next().map(|s| s.parse()).transpose()?.unwrap_or(alg.dim() as u32 + 1);
    show(&stratify(&alg, degree)?, 0);
    Ok(())
}
