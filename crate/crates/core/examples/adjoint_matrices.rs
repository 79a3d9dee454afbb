//! Exact one-parameter adjoint matrices A_i = exp(-e_i ad_i) and their
//! ordered product, plus a numeric evaluation.
//!
//! `cargo run --example adjoint_matrices -- heat 4,5,3,1,2,6`

use liesym::adjoint::{adjoint_chain, exp_ad};
use liesym::fixtures;
use liesym::symkernel::{Matrix, MultiExpPoly};

fn show(m: &Matrix<MultiExpPoly>) {
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| m[(r, c)].to_string()).collect();
        println!("  [{}]", row.join("; "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alg = fixtures::builtin_algebra(&args.next().unwrap_or_else(|| "kdv".into()))?;
    let order: Vec<usize> = match args.next() {
        Some(s) => s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?,
        None => fixtures::preferred_order(&alg),
    };
    for i in 1..=alg.dim() {
        println!("A{i}:");
        show(&exp_ad(&alg, i)?.entries);
    }
    let chain = adjoint_chain(&alg, &order)?;
    println!("A = product in order {order:?}:");
    show(&chain.entries);

    let eps: Vec<f64> = (1..=alg.dim()).map(|k| 0.1 * k as f64).collect();
    let a: Vec<f64> = vec![1.0; alg.dim()];
    println!("(1,...,1) A at e = {eps:?}:\n  {:?}", chain.apply(&a, &eps)?);
    Ok(())
}
