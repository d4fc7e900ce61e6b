//! Group cohomology from the bar complex: H^i(G, M) for the Klein
//! four-group, generating cocycles, and the restriction, corestriction,
//! and inflation maps between groups.
//!
//! ```text
//! cargo run --example cohomology_klein_four
//! ```

use num_bigint::BigInt;
use toricoh::cohomology::{corestriction, inflation, restriction, CochainComplex};
use toricoh::group::FiniteGroup;
use toricoh::lattice::GLattice;
use toricoh::Caps;

fn main() -> toricoh::Result<()> {
    let caps = Caps::default();
    let v4 = FiniteGroup::klein_four();

    // The trivial lattice: cohomology of the group itself.
    let z = GLattice::trivial(v4.clone(), 1);
    let complex = CochainComplex::new(&z, &caps)?;
    println!("H^i(V4, Z) from the bar complex:");
    for i in 0..=3 {
        let h = complex.cohomology(i)?;
        println!("  H^{i} = {}", h.presentation.text());
    }
    assert_eq!(complex.cohomology(0)?.presentation.text(), "Z");
    assert_eq!(complex.cohomology(1)?.presentation.text(), "0");
    assert_eq!(complex.cohomology(2)?.presentation.text(), "Z/2 x Z/2");
    assert_eq!(complex.cohomology(3)?.presentation.text(), "Z/2");

    // The regular lattice Z[G] is induced from nothing: higher cohomology
    // vanishes, invariants are the norm line.
    let regular = GLattice::regular(v4.clone());
    let reg_complex = CochainComplex::new(&regular, &caps)?;
    println!("\nH^i(V4, Z[G]):");
    for i in 0..=3 {
        let h = reg_complex.cohomology(i)?;
        println!("  H^{i} = {}", h.presentation.text());
        if i > 0 {
            assert!(h.presentation.is_trivial());
        }
    }

    // Generating cocycles are actual bar cochains; class_of inverts the
    // presentation on the nose, and doubling a generator kills its class.
    let h2 = complex.cohomology(2)?;
    let gen = &h2.generators()[0];
    println!("\na generating 2-cocycle on V4 x V4 (16 values): {}", short_vec(gen));
    let coords = h2.class_of(gen).expect("generators are cocycles");
    assert_eq!(coords, vec![BigInt::from(1), BigInt::from(0)]);
    let doubled: Vec<BigInt> = gen.iter().map(|v| v * 2).collect();
    let back = h2.class_of(&doubled).expect("still a cocycle");
    assert!(back.iter().all(|v| v == &BigInt::from(0)));
    println!("class_of(generator) = (1, 0); class_of(2 * generator) = 0");

    // Restriction to the subgroup {e, a}: both Z/2 factors survive or die
    // according to where the cocycle lives.
    let sub = v4.subgroup_generated(&[1]);
    let restricted = z.restrict(&sub);
    let h2_sub = CochainComplex::new(&restricted, &caps)?.cohomology(2)?;
    println!("\nH^2({}, Z) = {}", sub.describe(), h2_sub.presentation.text());
    let res = restriction(&h2, &sub, &h2_sub)?;
    println!(
        "restriction H^2(V4, Z) -> H^2({}, Z) sends the generators to {}",
        sub.describe(),
        short_vec(res.matrix.row_slice(0))
    );
    let (kernel, _) = res.kernel();
    println!("kernel of restriction: {}", kernel.text());

    // Corestriction back up composes to multiplication by the index,
    // which on a Z/2 x Z/2 group in degree 2 is the zero map.
    let cor = corestriction(&h2_sub, &sub, &h2)?;
    let round_trip = res.then(&cor)?;
    assert!(round_trip.is_zero());
    println!("cor . res = [V4 : {}] = 2, the zero map here", sub.describe());

    // Inflation from the quotient V4 / {e, a} (cyclic of order 2) is
    // injective in degree 2 on a trivial module.
    let (quotient, proj) = v4.quotient_group(&sub)?;
    let zq = GLattice::trivial(quotient, 1);
    let h2_quot = CochainComplex::new(&zq, &caps)?.cohomology(2)?;
    println!("\nH^2(V4/{}, Z) = {}", sub.describe(), h2_quot.presentation.text());
    let inf = inflation(&h2_quot, &proj, &h2)?;
    let (inf_kernel, _) = inf.kernel();
    assert!(inf_kernel.is_trivial());
    println!("inflation into H^2(V4, Z) has trivial kernel: image is one of the factors");
    Ok(())
}

fn short_vec(v: &[BigInt]) -> String {
    let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", cells.join(", "))
}
