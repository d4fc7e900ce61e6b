//! Exact linear algebra over ℤ: Smith normal form, integer kernels,
//! solving, and cokernel presentations.
//!
//! ```text
//! cargo run --example smith_normal_form
//! ```

use toricoh::linalg::{
    bi, cokernel_presentation, kernel_basis, smith_normal_form, solve, IntMatrix,
};

fn main() {
    let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
    println!("A =");
    print_matrix(&a);

    let snf = smith_normal_form(&a);
    println!("\nSmith normal form S = U A V:");
    print_matrix(&snf.s);
    assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s);
    let u_inv = solve(&snf.u, &IntMatrix::identity(3)).expect("U is unimodular");
    let v_inv = solve(&snf.v, &IntMatrix::identity(3)).expect("V is unimodular");
    assert!(snf.u.mul(&u_inv).is_identity());
    assert!(snf.v.mul(&v_inv).is_identity());
    println!("transforms verified: U A V = S, with U and V invertible over Z");

    // The diagonal reads off the cokernel: ℤ^3 / colspan(A).
    let coker = cokernel_presentation(&a);
    println!("\ncoker(A) = {}", coker.text());
    assert_eq!(coker.text(), "Z/2 x Z/2 x Z/156");

    // Column relations live in the kernel; a square matrix with trivial
    // kernel has full column rank.
    let b = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
    let kernel = kernel_basis(&b);
    println!("\nB has a rank-{} kernel; basis columns:", kernel.cols());
    print_matrix(&kernel);
    assert!(b.mul(&kernel).is_zero());

    // Exact solving: X with B X = C, or a proof there is none.
    let c = IntMatrix::from_rows(&[vec![6], vec![12], vec![2]]);
    let x = solve(&b, &c).expect("C is in the column span of B");
    println!("\nsolved B X = C with X^T = {:?}", fmt_row(&x.column(0)));
    assert_eq!(b.mul(&x), c);
    let unsolvable = IntMatrix::from_rows(&[vec![1], vec![0], vec![0]]);
    assert!(solve(&b, &unsolvable).is_none());
    println!("and certified that B X = e_1 has no integer solution");

    // Solvability over ℤ is finer than over ℚ: 2x = 1 fails integrally.
    let two = IntMatrix::from_rows(&[vec![2]]);
    let one = IntMatrix::from_rows(&[vec![1]]);
    assert!(solve(&two, &one).is_none());
    assert_eq!(cokernel_presentation(&two).text(), "Z/2");
    println!("\n[2] has cokernel Z/2, so [1] is not in its integer span");

    // Vectors reduce to canonical coordinates modulo the image.
    let reduced = coker.reduce(&[bi(7), bi(100), bi(-5)]);
    println!(
        "class of (7, 100, -5) in coker(A): {:?}",
        reduced.iter().map(|v| v.to_string()).collect::<Vec<_>>()
    );
}

fn print_matrix(m: &IntMatrix) {
    for i in 0..m.rows() {
        println!("  {}", fmt_row(m.row_slice(i)));
    }
}

fn fmt_row(row: &[num_bigint::BigInt]) -> String {
    let cells: Vec<String> = row.iter().map(|v| format!("{v:>4}")).collect();
    format!("[{}]", cells.join(" "))
}
