//! The permutation tiling chain for a large block subspace, step by step.
//!
//! For U = B(k, n-k) in M_n the plan builds a verified chain of containments
//! that grows the covered corner block until it swallows the basic block
//! B(m, m) + B(m+1, m+1) at m = (n+1)/2, using only permutation witnesses;
//! the family count stays within 3/eps + 10 for eps = 2k/n.  Each step is
//! re-verified on index sets during construction, and degenerate parameters
//! are refused.
//!
//!     cargo run --example tiling_chain

use addiam::tiling::TilingPlan;

fn main() -> addiam::Result<()> {
    let (n, k) = (30usize, 3usize);
    let plan = TilingPlan::new(n, k, n - k)?;
    println!("n = {n}, k = {k}: {} sigma, {} tau, {} patch swaps", plan.sigmas().len(), plan.taus().len(), plan.patches().len());
    println!("{:<44} {:>10} {:>9}", "step", "corner", "covered");
    for step in plan.steps() {
        println!("{:<44} {:>10} {:>9}", step.label, format!("({}, {})", step.corner.0, step.corner.1), step.covered);
    }
    let last = plan.steps().last().expect("chain is nonempty");
    let m = plan.half();
    assert_eq!(last.corner, (m + 1, m + 1), "the chain ends at the basic block");
    println!(
        "witness count {} within budget {:.1} (eps = {:.3})",
        plan.witness_count(),
        plan.budget(),
        plan.epsilon()
    );

    // k + 2 > n / (n - k) blocks cannot straddle: the degenerate choice
    // n = 12, k = 5 is rejected rather than silently mis-verified.
    match TilingPlan::new(12, 5, 7) {
        Err(e) => println!("n = 12, k = 5 rejected: {e}"),
        Ok(_) => panic!("degenerate plan accepted"),
    }
    Ok(())
}
