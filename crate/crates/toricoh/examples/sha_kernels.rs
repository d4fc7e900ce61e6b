//! Local-global kernels over a family of decomposition subgroups:
//! computing them, shrinking them by adding places, auditing a family
//! against the cyclic subgroups, and pushing kernels along an exact
//! sequence.
//!
//! ```text
//! cargo run --example sha_kernels
//! ```

use toricoh::group::FiniteGroup;
use toricoh::sha::{chebotarev_coverage, sha_kernel, sha_les_transfer, Place, PlaceFamily};
use toricoh::tori::{flasque_resolution, Torus};
use toricoh::Caps;

fn main() -> toricoh::Result<()> {
    let caps = Caps::default();
    let v4 = FiniteGroup::klein_four();
    let qhat = Torus::norm_one("Q", &v4, &v4.trivial_subgroup())?.characters().clone();

    // Each place contributes its decomposition subgroup; a class of
    // H^i(G, M) lies in the kernel when it dies in every H^i(D_v, M).
    let order_two: Vec<_> = v4.all_subgroups().into_iter().filter(|s| s.order() == 2).collect();
    let omega3 = PlaceFamily::new(
        "omega3",
        order_two.iter().enumerate().map(|(k, d)| Place::new(&format!("v{}", k + 1), d.clone())).collect(),
    );
    let omega1 = PlaceFamily::new("omega1", vec![Place::new("v1", order_two[0].clone())]);

    println!("kernels for {} on V4, family omega3 (three order-2 places):", qhat.label());
    for degree in [1, 2] {
        let sha = sha_kernel(&qhat, degree, &omega3, &caps)?;
        println!(
            "  Sha^{degree} = {} inside H^{degree} = {}",
            sha.presentation.text(),
            sha.ambient().presentation.text()
        );
        for w in sha.witnesses() {
            println!("    witness cocycle with {} entries, re-verified locally trivial", w.len());
        }
    }
    assert!(sha_kernel(&qhat, 1, &omega3, &caps)?.is_trivial());
    assert_eq!(sha_kernel(&qhat, 2, &omega3, &caps)?.presentation.text(), "Z/2");

    // Dropping places can only grow the kernel: with a single place the
    // degree-1 kernel picks up a class that omega3 had excluded.
    let sha1_small = sha_kernel(&qhat, 1, &omega1, &caps)?;
    println!(
        "\nfamily omega1 (one place): Sha^1 = {} inside H^1 = {}",
        sha1_small.presentation.text(),
        sha1_small.ambient().presentation.text()
    );
    assert_eq!(sha1_small.presentation.text(), "Z/2");

    // A family is honest when every cyclic subgroup is conjugate into
    // some decomposition group; omega1 leaves two of them unreached.
    for (family, label) in [(&omega3, "omega3"), (&omega1, "omega1")] {
        let report = chebotarev_coverage(&v4, family)?;
        println!("\ncoverage of {label}:");
        for check in &report.checks {
            match &check.covered_by {
                Some(p) => println!("  {} covered by {p}", check.subgroup),
                None => println!("  {} uncovered", check.subgroup),
            }
        }
        println!(
            "  -> {}",
            if report.covered() { "complete".to_string() } else { format!("incomplete ({} cyclic subgroups unreached)", report.uncovered().len()) }
        );
    }
    assert!(chebotarev_coverage(&v4, &omega3)?.covered());
    assert_eq!(chebotarev_coverage(&v4, &omega1)?.uncovered().len(), 2);

    // Kernels ride along exact sequences. For the flasque resolution of
    // the norm-one torus, the connecting map carries Sha^1 of the flasque
    // quotient isomorphically onto Sha^2 of the characters.
    let q = Torus::norm_one("Q", &v4, &v4.trivial_subgroup())?;
    let resolution = flasque_resolution(&q)?;
    let transfer = sha_les_transfer(&resolution.ses, 1, &omega3, &caps)?;
    println!(
        "\ntransfer along 0 -> {} -> {} -> {} -> 0 in degree 1:",
        resolution.ses.sub().label(),
        resolution.ses.mid().label(),
        resolution.ses.quo().label()
    );
    println!(
        "  Sha^1({}) = {}  -delta->  Sha^2({}) = {}  ->  Sha^2({}) = {}",
        resolution.ses.quo().label(),
        transfer.first.presentation.text(),
        resolution.ses.sub().label(),
        transfer.middle.presentation.text(),
        resolution.ses.mid().label(),
        transfer.last.presentation.text()
    );
    assert!(transfer.connecting_injective && transfer.connecting_surjective);
    assert!(transfer.exact_at_middle);
    println!("  connecting map is an isomorphism; sequence exact at the middle");
    Ok(())
}
