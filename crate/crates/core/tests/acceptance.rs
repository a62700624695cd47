//! Prints one PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p hyperbolic-cgc --test acceptance -- --nocapture`.

use hyperbolic_cgc::verify::{run_all, verify_report};

#[test]
fn acceptance() {
    let first = run_all();
    let mut failed = Vec::new();
    for r in &first {
        println!("{}", r.line());
        if !r.passed() {
            println!("{}", r.report.render());
            failed.push(r.id);
        }
    }

    // Determinism: a second run from scratch renders to the same bytes.
    let a = verify_report(&first).render();
    let b = verify_report(&run_all()).render();
    let same = a == b;
    println!("{} 15 determinism", if same { "PASS" } else { "FAIL" });
    if !same {
        failed.push(15);
        let line = a.lines().zip(b.lines()).find(|(x, y)| x != y);
        println!("first difference: {line:?}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
