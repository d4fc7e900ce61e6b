//! Lattices with an action of a finite group.
//!
//! A `GLattice` is ℤ^rank together with one integer matrix per group
//! element; the constructor checks that the assignment is a genuine left
//! action (identity goes to the identity matrix and composition matches
//! the group table), which also forces every matrix to be invertible over
//! ℤ. Sublattices, quotients, duals, induced/permutation modules, and
//! short exact sequences are all built here, each constructor rejecting
//! inputs that fail its hypotheses instead of repairing them: a
//! non-saturated sublattice is an error, never silently saturated.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::group::{FiniteGroup, Subgroup};
use crate::linalg::{
    cokernel_presentation, is_saturated_basis, kernel_basis, smith_normal_form, solve, IntMatrix,
};
use crate::{Error, Result};

/// A free ℤ-module of finite rank with a left action of a finite group.
#[derive(Clone)]
pub struct GLattice {
    label: String,
    group: FiniteGroup,
    rank: usize,
    action: Vec<IntMatrix>,
}

impl fmt::Debug for GLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GLattice({}, rank {}, over {})", self.label, self.rank, self.group.label())
    }
}

impl GLattice {
    /// Wraps explicit action matrices after verifying they define a left
    /// action: one matrix per element, all rank x rank, identity at the
    /// identity, and action(g) * action(h) = action(gh).
    pub fn new(label: &str, group: FiniteGroup, action: Vec<IntMatrix>) -> Result<GLattice> {
        if action.len() != group.order() {
            return Err(Error::InvalidAction(format!(
                "{} matrices for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        let rank = action.first().map_or(0, |m| m.rows());
        for (g, m) in action.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::InvalidAction(format!(
                    "matrix for element {g} is {}x{}, expected {rank}x{rank}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if !action[group.identity() as usize].is_identity() {
            return Err(Error::InvalidAction("identity element acts nontrivially".into()));
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                if action[g as usize].mul(&action[h as usize]) != action[gh as usize] {
                    return Err(Error::InvalidAction(format!(
                        "action({}) * action({}) differs from action({})",
                        g, h, gh
                    )));
                }
            }
        }
        Ok(GLattice { label: label.to_string(), group, rank, action })
    }

    pub fn with_label(mut self, label: &str) -> GLattice {
        self.label = label.to_string();
        self
    }

    /// ℤ^rank with every element acting as the identity.
    pub fn trivial(group: FiniteGroup, rank: usize) -> GLattice {
        let action = vec![IntMatrix::identity(rank); group.order()];
        let label = if rank == 1 { "Z".to_string() } else { format!("Z^{rank}") };
        GLattice { label, group, rank, action }
    }

    /// The group ring ℤ[G]: basis indexed by elements, g sends e_x to e_{gx}.
    pub fn regular(group: FiniteGroup) -> GLattice {
        let n = group.order();
        let mut action = Vec::with_capacity(n);
        for g in group.elements() {
            let mut m = IntMatrix::zero(n, n);
            for x in group.elements() {
                m[(group.mul(g, x) as usize, x as usize)] = BigInt::from(1);
            }
            action.push(m);
        }
        let label = format!("Z[{}]", group.label());
        GLattice { label, group, rank: n, action }
    }

    /// ℤ[G/H]: basis indexed by left cosets in their minimal-element order,
    /// g sends e_C to e_{gC}.
    pub fn permutation(group: FiniteGroup, sub: &Subgroup) -> GLattice {
        let cosets = group.left_cosets(sub);
        let n = cosets.len();
        let mut coset_of = vec![0usize; group.order()];
        for (c, coset) in cosets.iter().enumerate() {
            for &x in coset {
                coset_of[x as usize] = c;
            }
        }
        let mut action = Vec::with_capacity(group.order());
        for g in group.elements() {
            let mut m = IntMatrix::zero(n, n);
            for (c, coset) in cosets.iter().enumerate() {
                let image = coset_of[group.mul(g, coset[0]) as usize];
                m[(image, c)] = BigInt::from(1);
            }
            action.push(m);
        }
        let label = format!("Z[{}/{}]", group.label(), sub.describe());
        GLattice { label, group, rank: n, action }
    }

    /// Contragredient lattice: g acts by the inverse transpose.
    pub fn dual(&self) -> GLattice {
        let action: Vec<IntMatrix> = self
            .group
            .elements()
            .map(|g| self.action[self.group.inv(g) as usize].transpose())
            .collect();
        GLattice {
            label: format!("{}^", self.label),
            group: self.group.clone(),
            rank: self.rank,
            action,
        }
    }

    /// Block-diagonal direct sum; both lattices must live over one group.
    pub fn direct_sum(&self, other: &GLattice) -> Result<GLattice> {
        if self.group != other.group {
            return Err(Error::InvalidAction("direct sum over different groups".into()));
        }
        let rank = self.rank + other.rank;
        let mut action = Vec::with_capacity(self.group.order());
        for g in self.group.elements() {
            let a = &self.action[g as usize];
            let b = &other.action[g as usize];
            action.push(IntMatrix::from_fn(rank, rank, |i, j| {
                if i < self.rank && j < self.rank {
                    a[(i, j)].clone()
                } else if i >= self.rank && j >= self.rank {
                    b[(i - self.rank, j - self.rank)].clone()
                } else {
                    BigInt::zero()
                }
            }));
        }
        Ok(GLattice {
            label: format!("{}+{}", self.label, other.label),
            group: self.group.clone(),
            rank,
            action,
        })
    }

    /// The same module seen over a subgroup, which becomes the acting
    /// group; matrices are indexed by the subgroup's own element numbering.
    pub fn restrict(&self, sub: &Subgroup) -> GLattice {
        let (h_group, embed) = sub.as_group();
        let action: Vec<IntMatrix> =
            embed.iter().map(|&x| self.action[x as usize].clone()).collect();
        GLattice {
            label: format!("{}|{}", self.label, sub.describe()),
            group: h_group,
            rank: self.rank,
            action,
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn action(&self, g: u16) -> &IntMatrix {
        &self.action[g as usize]
    }

    /// Σ_{h in H} action(h).
    pub fn norm_matrix(&self, sub: &Subgroup) -> IntMatrix {
        let mut n = IntMatrix::zero(self.rank, self.rank);
        for &h in sub.elements() {
            n = n.add(&self.action[h as usize]);
        }
        n
    }

    /// Saturated basis of the fixed sublattice M^H, as matrix columns.
    pub fn invariants_sublattice(&self, sub: &Subgroup) -> IntMatrix {
        let r = self.rank;
        let mut stacked = IntMatrix::zero(0, r);
        for &h in sub.elements() {
            if h == self.group.identity() {
                continue;
            }
            let diff = self.action[h as usize].sub(&IntMatrix::identity(r));
            stacked = stacked.vstack(&diff);
        }
        if stacked.rows() == 0 {
            return IntMatrix::identity(r);
        }
        kernel_basis(&stacked)
    }

    fn check_stable(&self, basis: &IntMatrix) -> Result<Vec<IntMatrix>> {
        let mut induced = Vec::with_capacity(self.group.order());
        for g in self.group.elements() {
            let moved = self.action[g as usize].mul(basis);
            match solve(basis, &moved) {
                Some(x) => induced.push(x),
                None => return Err(Error::NotStable),
            }
        }
        Ok(induced)
    }

    /// Views a stable saturated sublattice as a lattice in its own right,
    /// with the inclusion map. Rejects dependent columns, non-saturated
    /// spans, and spans the group moves.
    pub fn sublattice(&self, label: &str, basis: &IntMatrix) -> Result<(GLattice, LatticeMap)> {
        if basis.rows() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "sublattice basis has {} rows in a rank-{} lattice",
                basis.rows(),
                self.rank
            )));
        }
        if !is_saturated_basis(basis) {
            return Err(Error::NotSaturated);
        }
        let action = self.check_stable(basis)?;
        let sub = GLattice {
            label: label.to_string(),
            group: self.group.clone(),
            rank: basis.cols(),
            action,
        };
        let inj = LatticeMap::new(&sub, self, basis.clone())?;
        Ok((sub, inj))
    }

    /// Quotient by a stable saturated sublattice, with the projection map.
    pub fn quotient_by_saturated(
        &self,
        label: &str,
        basis: &IntMatrix,
    ) -> Result<(GLattice, LatticeMap)> {
        if basis.rows() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "sublattice basis has {} rows in a rank-{} lattice",
                basis.rows(),
                self.rank
            )));
        }
        if !is_saturated_basis(basis) {
            return Err(Error::NotSaturated);
        }
        self.check_stable(basis)?;
        let k = basis.cols();
        let q = self.rank - k;
        // Change coordinates so the sublattice is the first k unit vectors:
        // rows k.. of U are then a basis of coordinates on the quotient.
        let dec = smith_normal_form(basis);
        let proj = IntMatrix::from_fn(q, self.rank, |i, j| dec.u[(k + i, j)].clone());
        // In the new coordinates the action is block triangular; the
        // quotient action is the lower-right block, recovered by solving
        // proj * action(g) = q_action(g) * proj through a section.
        let u_inv = solve(&dec.u, &IntMatrix::identity(self.rank))
            .expect("transform from a verified normal form is unimodular");
        let section = IntMatrix::from_fn(self.rank, q, |i, j| u_inv[(i, k + j)].clone());
        let mut action = Vec::with_capacity(self.group.order());
        for g in self.group.elements() {
            action.push(proj.mul(&self.action[g as usize]).mul(&section));
        }
        let quo =
            GLattice { label: label.to_string(), group: self.group.clone(), rank: q, action };
        let map = LatticeMap::new(self, &quo, proj)?;
        Ok((quo, map))
    }
}

/// A G-equivariant homomorphism of lattices, verified at construction.
#[derive(Clone)]
pub struct LatticeMap {
    source: GLattice,
    target: GLattice,
    matrix: IntMatrix,
}

impl LatticeMap {
    pub fn new(source: &GLattice, target: &GLattice, matrix: IntMatrix) -> Result<LatticeMap> {
        if source.group != target.group {
            return Err(Error::InvalidAction("map between lattices over different groups".into()));
        }
        if matrix.rows() != target.rank || matrix.cols() != source.rank {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank,
                source.rank
            )));
        }
        for g in source.group.elements() {
            let lhs = target.action(g).mul(&matrix);
            let rhs = matrix.mul(source.action(g));
            if lhs != rhs {
                return Err(Error::NotEquivariant);
            }
        }
        Ok(LatticeMap { source: source.clone(), target: target.clone(), matrix })
    }

    pub fn source(&self) -> &GLattice {
        &self.source
    }

    pub fn target(&self) -> &GLattice {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(v)
    }

    pub fn is_injective(&self) -> bool {
        kernel_basis(&self.matrix).cols() == 0
    }

    pub fn is_surjective(&self) -> bool {
        cokernel_presentation(&self.matrix).is_trivial()
    }
}

/// A certified short exact sequence 0 -> A -> B -> C -> 0 of lattices.
pub struct ShortExactSequence {
    pub inj: LatticeMap,
    pub surj: LatticeMap,
}

impl ShortExactSequence {
    /// Verifies injectivity with saturated image, surjectivity, zero
    /// composite, and rank additivity. Together these force exactness in
    /// the middle: the image of `inj` is a saturated sublattice of the
    /// kernel of `surj` of the same rank, hence equal to it.
    pub fn new(inj: LatticeMap, surj: LatticeMap) -> Result<ShortExactSequence> {
        if inj.target.rank != surj.source.rank || inj.target.group != surj.source.group {
            return Err(Error::NotExact("maps do not share the middle lattice".into()));
        }
        if !is_saturated_basis(&inj.matrix) {
            return Err(Error::NotExact(
                "first map is not injective with saturated image".into(),
            ));
        }
        if !surj.is_surjective() {
            return Err(Error::NotExact("second map is not surjective".into()));
        }
        if !surj.matrix.mul(&inj.matrix).is_zero() {
            return Err(Error::NotExact("composite is nonzero".into()));
        }
        if inj.source.rank + surj.target.rank != inj.target.rank {
            return Err(Error::NotExact("ranks do not add up".into()));
        }
        Ok(ShortExactSequence { inj, surj })
    }

    pub fn sub(&self) -> &GLattice {
        &self.inj.source
    }

    pub fn mid(&self) -> &GLattice {
        &self.inj.target
    }

    pub fn quo(&self) -> &GLattice {
        &self.surj.target
    }

    /// The dual sequence 0 -> C^ -> B^ -> A^ -> 0, exact again because the
    /// original quotient is torsion-free.
    pub fn dual(&self) -> Result<ShortExactSequence> {
        let sub_d = self.quo().dual();
        let mid_d = self.mid().dual();
        let quo_d = self.sub().dual();
        let inj = LatticeMap::new(&sub_d, &mid_d, self.surj.matrix.transpose())?;
        let surj = LatticeMap::new(&mid_d, &quo_d, self.inj.matrix.transpose())?;
        ShortExactSequence::new(inj, surj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bi;
    use num_traits::Signed;

    #[test]
    fn regular_action_is_permutation() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let m = GLattice::regular(g);
        assert_eq!(m.rank(), 3);
        for g in m.group().elements() {
            let a = m.action(g);
            for j in 0..3 {
                let ones: usize = (0..3).filter(|&i| !a[(i, j)].is_zero()).count();
                assert_eq!(ones, 1);
            }
        }
    }

    #[test]
    fn invalid_actions_are_rejected() {
        let g = FiniteGroup::cyclic(2).unwrap();
        // wrong count
        assert!(GLattice::new("x", g.clone(), vec![IntMatrix::identity(1)]).is_err());
        // not a homomorphism: order-2 element sent to a matrix of order 3
        let m = IntMatrix::from_rows(&[vec![0, -1], vec![1, -1]]);
        let bad = GLattice::new("x", g.clone(), vec![IntMatrix::identity(2), m]);
        assert!(matches!(bad, Err(Error::InvalidAction(_))));
        // sign action is fine
        let sign = GLattice::new(
            "sign",
            g,
            vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])],
        );
        assert!(sign.is_ok());
    }

    #[test]
    fn dual_of_permutation_lattice_has_same_matrices() {
        let g = FiniteGroup::klein_four();
        let m = GLattice::regular(g);
        let d = m.dual();
        for g in m.group().elements() {
            assert_eq!(m.action(g), d.action(g));
        }
    }

    #[test]
    fn invariants_of_regular_lattice_is_norm_line() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let m = GLattice::regular(g);
        let fixed = m.invariants_sublattice(&m.group().full_subgroup());
        assert_eq!(fixed.cols(), 1);
        let v = fixed.column(0);
        assert!(v.iter().all(|x| x.abs() == v[0].abs()));
        let trivial_fixed = m.invariants_sublattice(&m.group().trivial_subgroup());
        assert_eq!(trivial_fixed.cols(), 4);
    }

    #[test]
    fn permutation_lattice_over_coset_space() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let h = g.subgroup_from_elements(&[0, 2]).unwrap();
        let m = GLattice::permutation(g, &h);
        assert_eq!(m.rank(), 2);
        // the generator swaps the two cosets
        assert_eq!(m.action(1)[(0, 0)], bi(0));
        assert_eq!(m.action(1)[(1, 0)], bi(1));
    }

    #[test]
    fn quotient_by_norm_line() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let m = GLattice::regular(g);
        let norm = IntMatrix::from_rows(&[vec![1], vec![1], vec![1]]);
        let (q, proj) = m.quotient_by_saturated("Q", &norm).unwrap();
        assert_eq!(q.rank(), 2);
        assert!(proj.is_surjective());
        assert!(proj.apply(&[bi(1), bi(1), bi(1)]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn quotient_rejects_unsaturated_and_unstable() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let m = GLattice::regular(g);
        let doubled = IntMatrix::from_rows(&[vec![2], vec![2]]);
        assert!(matches!(
            m.quotient_by_saturated("x", &doubled),
            Err(Error::NotSaturated)
        ));
        let unstable = IntMatrix::from_rows(&[vec![1], vec![0]]);
        assert!(matches!(
            m.quotient_by_saturated("x", &unstable),
            Err(Error::NotStable)
        ));
    }

    #[test]
    fn restriction_reindexes_by_subgroup() {
        let g = FiniteGroup::klein_four();
        let m = GLattice::regular(g);
        let h = m.group().subgroup_from_elements(&[0, 3]).unwrap();
        let r = m.restrict(&h);
        assert_eq!(r.group().order(), 2);
        assert_eq!(r.rank(), 4);
        assert_eq!(r.action(1), m.action(3));
    }

    #[test]
    fn augmentation_sequence_certifies() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let m = GLattice::regular(g.clone());
        let z = GLattice::trivial(g, 1);
        let aug = LatticeMap::new(&m, &z, IntMatrix::from_rows(&[vec![1, 1, 1]])).unwrap();
        let ker = kernel_basis(aug.matrix());
        let (ideal, inj) = m.sublattice("I", &ker).unwrap();
        assert_eq!(ideal.rank(), 2);
        let ses = ShortExactSequence::new(inj, aug).unwrap();
        let dual = ses.dual().unwrap();
        assert_eq!(dual.sub().rank(), 1);
        assert_eq!(dual.quo().rank(), 2);
    }

    #[test]
    fn broken_sequences_are_rejected() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let m = GLattice::regular(g.clone());
        let z = GLattice::trivial(g.clone(), 1);
        let sign = GLattice::new(
            "sign",
            g,
            vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])],
        )
        .unwrap();
        let aug = LatticeMap::new(&m, &z, IntMatrix::from_rows(&[vec![1, 1]])).unwrap();
        // the augmentation ideal of C2 is the sign lattice
        let diag = LatticeMap::new(&sign, &m, IntMatrix::from_rows(&[vec![1], vec![-1]])).unwrap();
        // doubled augmentation is not surjective
        let double = LatticeMap::new(&m, &z, IntMatrix::from_rows(&[vec![2, 2]])).unwrap();
        assert!(ShortExactSequence::new(diag.clone(), double).is_err());
        // composite nonzero: the norm line is not the augmentation kernel
        let norm_in = LatticeMap::new(&z, &m, IntMatrix::from_rows(&[vec![1], vec![1]])).unwrap();
        assert!(matches!(
            ShortExactSequence::new(norm_in, aug.clone()),
            Err(Error::NotExact(_))
        ));
        // good one passes
        assert!(ShortExactSequence::new(diag, aug).is_ok());
    }

    #[test]
    fn direct_sum_blocks() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let sign = GLattice::new(
            "sign",
            g.clone(),
            vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])],
        )
        .unwrap();
        let z = GLattice::trivial(g, 1);
        let s = z.direct_sum(&sign).unwrap();
        assert_eq!(s.rank(), 2);
        assert_eq!(s.action(1)[(0, 0)], bi(1));
        assert_eq!(s.action(1)[(1, 1)], bi(-1));
        assert_eq!(s.action(1)[(0, 1)], bi(0));
    }
}
