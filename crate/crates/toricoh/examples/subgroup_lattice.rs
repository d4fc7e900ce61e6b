//! Finite groups from multiplication tables: subgroup enumeration,
//! cosets, conjugation, normality, and quotients.
//!
//! ```text
//! cargo run --example subgroup_lattice
//! ```

use toricoh::group::FiniteGroup;

fn main() -> toricoh::Result<()> {
    let v4 = FiniteGroup::klein_four();
    println!("{} (order {})", v4.label(), v4.order());
    for sub in v4.all_subgroups() {
        println!(
            "  {} order {} index {} normal: {}",
            sub.describe(),
            sub.order(),
            sub.index(),
            v4.is_normal(&sub)
        );
    }
    assert_eq!(v4.all_subgroups().len(), 5);

    // Nonabelian example: S3 acting on three points via two generator
    // permutations, a transposition and a 3-cycle.
    let s3 = FiniteGroup::from_generator_permutations("S3", 3, &[
        vec![1, 0, 2],
        vec![1, 2, 0],
    ])?;
    println!("\n{} (order {})", s3.label(), s3.order());
    assert_eq!(s3.order(), 6);

    let subs = s3.all_subgroups();
    println!("{} subgroups:", subs.len());
    for sub in &subs {
        println!(
            "  {} order {} normal: {}",
            sub.describe(),
            sub.order(),
            s3.is_normal(&sub)
        );
    }
    assert_eq!(subs.len(), 6);

    // The three order-2 subgroups are conjugate to one another and none
    // of them is normal; the order-3 subgroup is.
    let order2: Vec<_> = subs.iter().filter(|s| s.order() == 2).collect();
    assert_eq!(order2.len(), 3);
    for pair in order2.windows(2) {
        assert!(s3.is_conjugate_contained(pair[0], pair[1]));
        assert!(!s3.is_normal(pair[0]));
    }
    let a3 = subs.iter().find(|s| s.order() == 3).expect("unique order-3 subgroup");
    assert!(s3.is_normal(a3));
    println!("\norder-2 subgroups form one conjugacy class; {} is normal", a3.describe());

    // Cosets of a non-normal subgroup differ by side.
    let h = order2[0];
    let left = s3.left_cosets(h);
    let right = s3.right_cosets(h);
    println!("\ncosets of {}:", h.describe());
    for (l, r) in left.iter().zip(&right) {
        println!(
            "  left {{{}}}   right {{{}}}",
            label_list(&s3, l),
            label_list(&s3, r)
        );
    }
    assert_ne!(left, right);

    // Quotient by the normal subgroup: S3 / A3 is cyclic of order 2. The
    // projection table sends each element to its coset's index.
    let (quotient, proj) = s3.quotient_group(a3)?;
    println!("\nS3 / {} has order {}", a3.describe(), quotient.order());
    assert_eq!(quotient.order(), 2);
    for g in s3.elements() {
        let image = proj[g as usize];
        assert_eq!(image == quotient.identity(), a3.contains(g));
    }
    println!("projection table verified: kernel is exactly {}", a3.describe());

    // Element orders divide the group order.
    println!("\nelement orders in S3:");
    for g in s3.elements() {
        print!("  {}: {}", s3.element_label(g), s3.element_order(g));
        assert_eq!(s3.order() % s3.element_order(g), 0);
    }
    println!();
    Ok(())
}

fn label_list(group: &FiniteGroup, elements: &[u16]) -> String {
    elements.iter().map(|&g| group.element_label(g)).collect::<Vec<_>>().join(", ")
}
