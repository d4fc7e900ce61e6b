//! The built-in scenario end to end: the norm-one torus of a biquadratic
//! extension, its flasque resolution, the local-global kernels over the
//! three order-2 decomposition groups, and the comparison with the
//! multinorm torus.
//!
//! ```text
//! cargo run --example norm_one_biquadratic
//! ```

use toricoh::scenario::builtin_paper_biquadratic;
use toricoh::Caps;

fn main() -> toricoh::Result<()> {
    let caps = Caps::default();
    let scenario = builtin_paper_biquadratic();
    let report = scenario.run(&caps, false)?;
    let text = report.text();
    print!("{text}");

    // The headline numbers, asserted so this example doubles as a check:
    // the class that survives every local restriction lives in H^2 of the
    // norm-one characters, equals H^1 of the flasque quotient through the
    // connecting map, and transports to the multinorm torus.
    assert!(text.contains("H^3(G, Z) = Z/2"));
    assert!(text.contains("H_hat^-1(G, Qhat) = Z/4"));
    assert!(text.contains("H^1(G, S_hat) = Z/2"));
    assert!(text.contains("br(Q) = Z/2 (stable under reversing the subgroup cover)"));
    assert!(text.contains("Sha^1_omega3(G, Qhat) = 0"));
    assert!(text.contains("Sha^2_omega3(G, Qhat) = Z/2"));
    assert!(text.contains("Sha^1_omega3(G, Q.S) = Z/2"));
    assert!(text.contains("coverage: complete"));

    // Same input, same bytes: reports carry no timestamps or iteration
    // order surprises.
    let again = builtin_paper_biquadratic().run(&caps, false)?;
    assert_eq!(text, again.text());
    assert_eq!(report.machine(), again.machine());

    println!();
    println!("machine rendering of the same run:");
    print!("{}", report.machine());
    Ok(())
}
