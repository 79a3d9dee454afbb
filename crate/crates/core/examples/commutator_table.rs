//! Commutator table of a built-in algebra, with the Jacobi identity and the
//! Killing form as sanity checks.
//!
//! `cargo run --example commutator_table -- heat`

use liesym::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "kdv".into());
    let alg = fixtures::builtin_algebra(&name)?;
    let names = alg.generator_names();
    let n = alg.dim();
    let cells: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| alg.format_element(alg.bracket_basis(i, j))).collect())
        .collect();
    let w = cells.iter().flatten().map(String::len).max().unwrap_or(1).max(4);
    print!("{:>6} |", "[,]");
    for g in names {
        print!(" {g:>w$}");
    }
    println!();
    for (i, row) in cells.iter().enumerate() {
        print!("{:>6} |", names[i]);
        for c in row {
            print!(" {c:>w$}");
        }
        println!();
    }
    // the constructor already rejects Jacobi violations; the Killing matrix is extra
    let k = alg.killing_matrix();
    println!("\nKilling form:");
    for r in 0..n {
        let row: Vec<String> = (0..n).map(|c| k[(r, c)].to_string()).collect();
        println!("  [{}]", row.join(", "));
    }
    Ok(())
}
