//! Independent cohomology oracle for cyclic groups and internal products
//! of two cyclic subgroups, built from periodic resolutions and their
//! tensor product. Nothing here touches the crate's cohomology module:
//! the complexes are assembled directly from action matrices and handed
//! to the integer linear algebra layer, so a value agreed on by both
//! paths has two genuinely different derivations behind it.
//!
//! Conventions. For sigma of order n acting through S on a lattice M,
//! the periodic resolution ... -> Z[C] -N-> Z[C] -(s-1)-> Z[C] -> Z -> 0
//! induces the cochain complex
//!
//!     M -(S-I)-> M -N(S)-> M -(S-I)-> M -> ...
//!
//! with N(S) = I + S + ... + S^(n-1). For an internal product
//! G = <sigma> x <tau> the tensor product of the two periodic
//! resolutions gives the total complex with C^k a sum of k+1 copies of
//! M indexed by bidegrees (i, j), i + j = k, and the usual sign (-1)^i
//! on the tau-direction differential.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use toricoh::group::FiniteGroup;
use toricoh::lattice::GLattice;
use toricoh::linalg::{
    presented_kernel, solve, subquotient, AbelianPresentation, IntMatrix, Subquotient,
};

fn power(group: &FiniteGroup, g: u16, k: usize) -> u16 {
    let mut x = group.identity();
    for _ in 0..k {
        x = group.mul(x, g);
    }
    x
}

/// S - I for the action of `g`.
fn diff_block(lat: &GLattice, g: u16) -> IntMatrix {
    lat.action(g).sub(&IntMatrix::identity(lat.rank()))
}

/// I + S + S^2 + ... + S^(order-1) for the action of `g`.
fn norm_block(lat: &GLattice, g: u16, order: usize) -> IntMatrix {
    let mut sum = IntMatrix::zero(lat.rank(), lat.rank());
    for k in 0..order {
        sum = sum.add(lat.action(power(lat.group(), g, k)));
    }
    sum
}

fn assemble(rows: usize, cols: usize, blocks: &[(usize, usize, IntMatrix)]) -> IntMatrix {
    let mut buf = vec![BigInt::zero(); rows * cols];
    for (r0, c0, b) in blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                buf[(r0 + r) * cols + (c0 + c)] += &b.row_slice(r)[c];
            }
        }
    }
    IntMatrix::from_fn(rows, cols, |r, c| buf[r * cols + c].clone())
}

/// A cochain complex C^0 -> C^1 -> ... -> C^(max+1) with exact integer
/// differentials, ready for middle homology in degrees 0..=max.
pub struct OracleComplex {
    diffs: Vec<IntMatrix>,
}

impl OracleComplex {
    /// H^k = ker(d^k) / im(d^(k-1)), with generators in C^k coordinates.
    pub fn cohomology(&self, k: usize) -> Subquotient {
        let b = &self.diffs[k];
        let a = if k == 0 {
            IntMatrix::zero(b.cols(), 0)
        } else {
            self.diffs[k - 1].clone()
        };
        subquotient(b, &a).expect("oracle differentials compose to zero")
    }

    pub fn presentation(&self, k: usize) -> AbelianPresentation {
        self.cohomology(k).presentation
    }

    pub fn differential(&self, k: usize) -> &IntMatrix {
        &self.diffs[k]
    }
}

/// Periodic cochain complex for the cyclic group generated by `sigma`
/// of order `n`, acting through the lattice's matrices.
pub fn cyclic_complex(lat: &GLattice, sigma: u16, n: usize, max_degree: usize) -> OracleComplex {
    let a = diff_block(lat, sigma);
    let nm = norm_block(lat, sigma, n);
    let mut diffs = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        diffs.push(if k % 2 == 0 { a.clone() } else { nm.clone() });
    }
    for k in 0..max_degree {
        assert!(diffs[k + 1].mul(&diffs[k]).is_zero(), "periodic complex broken at {k}");
    }
    OracleComplex { diffs }
}

/// Tensor-of-periodic total cochain complex for an internal product
/// G = <sigma> x <tau> of orders n and m. Every element of the group
/// must factor uniquely as sigma^i tau^j; the constructor checks this.
pub fn product_complex(
    lat: &GLattice,
    sigma: u16,
    n: usize,
    tau: u16,
    m: usize,
    max_degree: usize,
) -> OracleComplex {
    let group = lat.group();
    assert_eq!(n * m, group.order(), "orders do not multiply to |G|");
    let mut seen = vec![false; group.order()];
    for i in 0..n {
        for j in 0..m {
            let x = group.mul(power(group, sigma, i), power(group, tau, j));
            assert!(!seen[x as usize], "sigma and tau do not give a direct product");
            seen[x as usize] = true;
        }
    }

    let r = lat.rank();
    let a_s = diff_block(lat, sigma);
    let n_s = norm_block(lat, sigma, n);
    let a_t = diff_block(lat, tau);
    let n_t = norm_block(lat, tau, m);
    let horiz = |i: usize| if i % 2 == 0 { &a_s } else { &n_s };
    let vert = |j: usize| if j % 2 == 0 { &a_t } else { &n_t };

    let mut diffs = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        let mut blocks = Vec::new();
        for i in 0..=k {
            let j = k - i;
            blocks.push(((i + 1) * r, i * r, horiz(i).clone()));
            let signed = if i % 2 == 0 { vert(j).clone() } else { vert(j).neg() };
            blocks.push((i * r, i * r, signed));
        }
        diffs.push(assemble((k + 2) * r, (k + 1) * r, &blocks));
    }
    for k in 0..max_degree {
        assert!(diffs[k + 1].mul(&diffs[k]).is_zero(), "total complex broken at {k}");
    }
    OracleComplex { diffs }
}

/// n x n matrix of left multiplication by `g` on Z[G] with the group
/// elements as basis.
fn left_mult(group: &FiniteGroup, g: u16) -> IntMatrix {
    let n = group.order();
    IntMatrix::from_fn(n, n, |r, c| {
        if group.mul(g, c as u16) == r as u16 {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

fn left_diff(group: &FiniteGroup, g: u16) -> IntMatrix {
    left_mult(group, g).sub(&IntMatrix::identity(group.order()))
}

fn left_norm(group: &FiniteGroup, g: u16, order: usize) -> IntMatrix {
    let mut sum = IntMatrix::zero(group.order(), group.order());
    for k in 0..order {
        sum = sum.add(&left_mult(group, power(group, g, k)));
    }
    sum
}

/// Restriction to the cyclic subgroup generated by `h`, computed as a
/// chain map from the subgroup's periodic resolution into the ambient
/// tensor resolution. `maps[k]` sends C^k coordinates of the product
/// complex to C^k coordinates of the cyclic complex of `h`; the lift is
/// verified to commute with both differentials, so it carries cocycles
/// to cocycles and classes to classes.
pub struct ChainRestriction {
    pub maps: Vec<IntMatrix>,
}

pub fn chain_restriction(
    lat: &GLattice,
    sigma: u16,
    n: usize,
    tau: u16,
    m: usize,
    h: u16,
    h_order: usize,
    max_degree: usize,
) -> ChainRestriction {
    let group = lat.group();
    let gn = group.order();
    let r = lat.rank();

    // Resolution differentials D_k: P_k -> P_(k-1) over the product
    // group, P_k a sum of k+1 copies of Z[G] indexed by (i, j).
    let d_res = |k: usize| -> IntMatrix {
        let mut blocks = Vec::new();
        for i in 0..=k {
            let j = k - i;
            if i >= 1 {
                let b = if i % 2 == 1 { left_diff(group, sigma) } else { left_norm(group, sigma, n) };
                blocks.push(((i - 1) * gn, i * gn, b));
            }
            if j >= 1 {
                let b = if j % 2 == 1 { left_diff(group, tau) } else { left_norm(group, tau, m) };
                blocks.push((i * gn, i * gn, if i % 2 == 0 { b } else { b.neg() }));
            }
        }
        assemble(k * gn, (k + 1) * gn, &blocks)
    };

    // phi_k(1) in P_k coordinates; phi_0 hits the identity basis vector
    // of the (0,0) component, so it lifts the identity of Z.
    let mut phis: Vec<Vec<BigInt>> = Vec::with_capacity(max_degree + 1);
    let mut phi0 = vec![BigInt::zero(); gn];
    phi0[group.identity() as usize] = BigInt::one();
    phis.push(phi0);
    for k in 1..=max_degree {
        let hm = if k % 2 == 1 { left_diff(group, h) } else { left_norm(group, h, h_order) };
        let prev = &phis[k - 1];
        let mut rhs = vec![BigInt::zero(); k * gn];
        for block in 0..k {
            let seg = hm.mul_vec(&prev[block * gn..(block + 1) * gn]);
            rhs[block * gn..(block + 1) * gn].clone_from_slice(&seg);
        }
        let d = d_res(k);
        let rhs_mat = IntMatrix::from_columns(k * gn, &[rhs]);
        let sol = solve(&d, &rhs_mat).expect("comparison lift exists for exact resolutions");
        phis.push(sol.column(0));
    }

    // maps[k] evaluates a product cochain on phi_k(1): the coefficient
    // of basis element g in component c contributes coeff * action(g)
    // against that component's value block.
    let mut maps = Vec::with_capacity(max_degree + 1);
    for (k, phi) in phis.iter().enumerate() {
        let mut blocks = Vec::new();
        for c in 0..=k {
            for g in 0..gn {
                let coeff = &phi[c * gn + g];
                if !coeff.is_zero() {
                    blocks.push((0, c * r, lat.action(g as u16).scale(coeff)));
                }
            }
        }
        maps.push(assemble(r, (k + 1) * r, &blocks));
    }

    let ambient = product_complex(lat, sigma, n, tau, m, max_degree);
    let local = cyclic_complex(lat, h, h_order, max_degree);
    for k in 0..max_degree {
        let lhs = local.differential(k).mul(&maps[k]);
        let rhs = maps[k + 1].mul(ambient.differential(k));
        assert_eq!(lhs, rhs, "chain restriction fails to commute at degree {k}");
    }

    ChainRestriction { maps }
}

/// Kernel of H^degree(G, M) -> prod_v H^degree(<h_v>, M) computed
/// entirely inside the oracle: ambient classes from the tensor complex,
/// local classes from periodic complexes, restriction through chain
/// lifts.
pub fn sha_presentation(
    lat: &GLattice,
    sigma: u16,
    n: usize,
    tau: u16,
    m: usize,
    locals: &[(u16, usize)],
    degree: usize,
) -> AbelianPresentation {
    let ambient = product_complex(lat, sigma, n, tau, m, degree + 1);
    let hq = ambient.cohomology(degree);
    let gens = &hq.generators;

    let mut stacked: Option<IntMatrix> = None;
    let mut local_rels: Vec<IntMatrix> = Vec::new();
    for &(h, h_order) in locals {
        let res = chain_restriction(lat, sigma, n, tau, m, h, h_order, degree + 1);
        let local = cyclic_complex(lat, h, h_order, degree + 1);
        let hq_local = local.cohomology(degree);
        let mut cols = Vec::with_capacity(gens.cols());
        for j in 0..gens.cols() {
            let w = res.maps[degree].mul_vec(&gens.column(j));
            let class = hq_local.class_of(&w).expect("restricted cocycle stays a cocycle");
            cols.push(class);
        }
        let block = IntMatrix::from_columns(hq_local.presentation.coord_len(), &cols);
        stacked = Some(match stacked {
            None => block,
            Some(s) => s.vstack(&block),
        });
        local_rels.push(hq_local.presentation.relations());
    }

    let f = stacked.expect("at least one local place");
    let total_rows: usize = local_rels.iter().map(IntMatrix::rows).sum();
    let total_cols: usize = local_rels.iter().map(IntMatrix::cols).sum();
    let mut blocks = Vec::new();
    let (mut row_off, mut col_off) = (0, 0);
    for rel in &local_rels {
        blocks.push((row_off, col_off, rel.clone()));
        row_off += rel.rows();
        col_off += rel.cols();
    }
    let target_rel = assemble(total_rows, total_cols, &blocks);

    let (pres, _) = presented_kernel(&f, &hq.presentation.relations(), &target_rel);
    pres
}
