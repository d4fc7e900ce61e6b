//! Tate cohomology in degrees 0 and -1, and the flasque/coflasque tests
//! that run them over every subgroup.
//!
//! ```text
//! cargo run --example tate_and_flasque
//! ```

use toricoh::cohomology::{tate_h0, tate_h_minus1};
use toricoh::group::FiniteGroup;
use toricoh::lattice::GLattice;
use toricoh::tori::{is_coflasque, is_flasque, FlasquenessReport, Torus};

fn main() -> toricoh::Result<()> {
    // On the trivial C4-lattice the norm map is multiplication by 4:
    // invariants modulo norms is Z/4, and the norm has no kernel.
    let c4 = FiniteGroup::cyclic(4)?;
    let z = GLattice::trivial(c4.clone(), 1);
    let h0 = tate_h0(&z)?;
    let hm1 = tate_h_minus1(&z)?;
    println!("Tate cohomology of C4 on Z:");
    println!("  H_hat^0  = invariants / norms   = {}", h0.presentation.text());
    println!("  H_hat^-1 = norm kernel / augmentation = {}", hm1.presentation.text());
    assert_eq!(h0.presentation.text(), "Z/4");
    assert!(hm1.presentation.is_trivial());

    // The regular lattice is invisible to Tate cohomology in both degrees.
    let regular = GLattice::regular(c4.clone());
    assert!(tate_h0(&regular)?.presentation.is_trivial());
    assert!(tate_h_minus1(&regular)?.presentation.is_trivial());
    println!("\nZ[C4] has trivial H_hat^0 and H_hat^-1");

    // The character lattice of the full norm-one torus of the Klein
    // four-group: the obstruction sits in degree -1 at the full group.
    let v4 = FiniteGroup::klein_four();
    let qhat = Torus::norm_one("Q", &v4, &v4.trivial_subgroup())?.characters().clone();
    println!("\n{} over V4 (rank {}):", qhat.label(), qhat.rank());
    println!("  H_hat^-1(V4, {}) = {}", qhat.label(), tate_h_minus1(&qhat)?.presentation.text());
    assert_eq!(tate_h_minus1(&qhat)?.presentation.text(), "Z/4");

    // Flasqueness asks H_hat^-1 to vanish for every subgroup;
    // coflasqueness asks the same of H^1. Permutation lattices pass both.
    let perm = GLattice::permutation(v4.clone(), &v4.subgroup_generated(&[1]));
    let flasque = is_flasque(&perm)?;
    let coflasque = is_coflasque(&perm)?;
    println!("\n{} subgroup tables:", perm.label());
    print_report("H_hat^-1", &flasque);
    print_report("H^1", &coflasque);
    assert!(flasque.holds() && coflasque.holds());

    // The norm-one character lattice fails both tests at every
    // nontrivial subgroup.
    let flasque_q = is_flasque(&qhat)?;
    let coflasque_q = is_coflasque(&qhat)?;
    println!("\n{} subgroup tables:", qhat.label());
    print_report("H_hat^-1", &flasque_q);
    print_report("H^1", &coflasque_q);
    assert!(!flasque_q.holds() && !coflasque_q.holds());
    println!(
        "\n{} is neither flasque nor coflasque; its resolution (see the \
         flasque_resolution example) repairs this",
        qhat.label()
    );
    Ok(())
}

fn print_report(what: &str, report: &FlasquenessReport) {
    for check in &report.checks {
        println!("  {what}({}) = {}", check.subgroup, check.group.text());
    }
    println!("  verdict: {}", if report.holds() { "all trivial" } else { "obstruction found" });
}
