//! Shared fixtures for the integration suites: an engine-independent
//! cohomology oracle and the standard batteries of groups and
//! coefficient lattices the property criteria run over.

pub mod oracle;

use num_bigint::BigInt;
use num_traits::One;

use toricoh::cohomology::CochainComplex;
use toricoh::group::FiniteGroup;
use toricoh::lattice::GLattice;
use toricoh::linalg::{AbelianPresentation, IntMatrix};
use toricoh::Caps;

/// Bar-complex cohomology through the engine under test.
pub fn engine_h(lat: &GLattice, degree: usize) -> AbelianPresentation {
    let caps = Caps::default().with_max_degree(degree.max(1));
    CochainComplex::new(lat, &caps)
        .unwrap()
        .cohomology(degree)
        .unwrap()
        .presentation
}

/// Rank-1 lattice where a generator acts by -1 exactly when its order is
/// even; for odd orders the sign character does not exist and the factor
/// acts trivially.
pub fn sign_cyclic(group: &FiniteGroup, n: usize) -> GLattice {
    let matrices = (0..group.order())
        .map(|k| {
            let s = if n % 2 == 0 && k % 2 == 1 { -1 } else { 1 };
            IntMatrix::diagonal(&[s])
        })
        .collect();
    GLattice::new("sign", group.clone(), matrices).unwrap()
}

/// Sign lattice of a product of two cyclic factors of orders n and m,
/// element index i*m + j standing for sigma^i tau^j.
pub fn sign_product(group: &FiniteGroup, n: usize, m: usize) -> GLattice {
    let matrices = (0..group.order())
        .map(|x| {
            let (i, j) = (x / m, x % m);
            let mut s = 1;
            if n % 2 == 0 && i % 2 == 1 {
                s = -s;
            }
            if m % 2 == 0 && j % 2 == 1 {
                s = -s;
            }
            IntMatrix::diagonal(&[s])
        })
        .collect();
    GLattice::new("sign", group.clone(), matrices).unwrap()
}

/// Z[G] modulo the invariant ones vector; the character lattice of the
/// full norm-one torus.
pub fn norm_quotient(group: &FiniteGroup) -> GLattice {
    let reg = GLattice::regular(group.clone());
    let ones = IntMatrix::from_fn(reg.rank(), 1, |_, _| BigInt::one());
    reg.quotient_by_saturated("Qhat", &ones).unwrap().0
}

/// Cyclic groups of order 1..=8 paired with the generator element the
/// oracle's periodic complex uses.
pub fn cyclic_battery() -> Vec<(FiniteGroup, u16, usize)> {
    (1..=8)
        .map(|n| {
            let g = FiniteGroup::cyclic(n).unwrap();
            let sigma = if n == 1 { 0 } else { 1 };
            (g, sigma, n)
        })
        .collect()
}

/// Products of two cyclic factors of order <= 4 with the generator pair
/// (sigma, tau) for the oracle's tensor complex.
pub fn product_battery() -> Vec<(FiniteGroup, u16, usize, u16, usize)> {
    let mut out = Vec::new();
    for n in 1..=4usize {
        for m in 1..=4usize {
            if n * m == 1 {
                continue;
            }
            let g = FiniteGroup::product_cyclic(n, m).unwrap();
            let sigma = if n == 1 { 0 } else { m as u16 };
            let tau = if m == 1 { 0 } else { 1 };
            out.push((g, sigma, n, tau, m));
        }
    }
    out
}

/// Small nonabelian checks: the symmetric group on three letters and the
/// dihedral group of the square, both as permutation groups.
pub fn s3() -> FiniteGroup {
    FiniteGroup::from_generator_permutations("S3", 3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
}

pub fn d4() -> FiniteGroup {
    FiniteGroup::from_generator_permutations("D4", 4, &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]])
        .unwrap()
}
