//! Algebraic tori through their character lattices.
//!
//! A torus split by a Galois extension with group G is, for everything
//! computed here, its character lattice with the G-action. The module
//! builds the standard examples (quasi-trivial, norm-one, multinorm),
//! decides flasqueness and coflasqueness by running over all subgroups,
//! and constructs flasque resolutions 0 -> T^ -> E^ -> S^ -> 0 with E^ a
//! certified permutation lattice and S^ certified flasque. The resolution
//! comes from a fixed-point cover on the cocharacter side: one coset
//! module Z[G/H] per basis vector of the H-fixed sublattice, summed over
//! every subgroup H, which surjects with coflasque kernel; dualizing
//! gives the resolution. H^1(G, S^) is independent of the choices made,
//! and `br_invariant` both computes it and re-derives it from a second
//! resolution with the cover order reversed as a consistency check.

use num_bigint::BigInt;
use num_traits::One;

use crate::cohomology::{tate_h_minus1, CochainComplex};
use crate::group::{FiniteGroup, Subgroup};
use crate::lattice::{GLattice, LatticeMap, ShortExactSequence};
use crate::linalg::{is_saturated_basis, kernel_basis, solve, AbelianPresentation, IntMatrix};
use crate::{Caps, Error, Result};

/// An algebraic torus, carried by its character lattice; norm-type tori
/// also remember the defining sequence of lattices.
pub struct Torus {
    label: String,
    characters: GLattice,
    kind: TorusKind,
    defining: Option<ShortExactSequence>,
}

enum TorusKind {
    QuasiTrivial,
    NormOne(Subgroup),
    Multinorm(Vec<Subgroup>),
}

impl Torus {
    /// Product of Weil restrictions: the character lattice is the direct
    /// sum of the coset modules Z[G/H_i].
    pub fn quasi_trivial(label: &str, group: &FiniteGroup, subs: &[Subgroup]) -> Result<Torus> {
        let mut characters: Option<GLattice> = None;
        for sub in subs {
            let summand = GLattice::permutation(group.clone(), sub);
            characters = Some(match characters {
                None => summand,
                Some(acc) => acc.direct_sum(&summand)?,
            });
        }
        let characters = characters
            .ok_or_else(|| Error::InvalidAction("quasi-trivial torus needs a summand".into()))?
            .with_label(&format!("{label}.hat"));
        Ok(Torus { label: label.to_string(), characters, kind: TorusKind::QuasiTrivial, defining: None })
    }

    /// Kernel of the norm of the subextension fixed by `sub`: characters
    /// are Z[G/H] modulo the norm line, with the defining sequence
    /// 0 -> Z -> Z[G/H] -> T^ -> 0.
    pub fn norm_one(label: &str, group: &FiniteGroup, sub: &Subgroup) -> Result<Torus> {
        let perm = GLattice::permutation(group.clone(), sub);
        let ses = norm_line_sequence(label, group, perm)?;
        let characters = ses.quo().clone();
        Ok(Torus {
            label: label.to_string(),
            characters,
            kind: TorusKind::NormOne(sub.clone()),
            defining: Some(ses),
        })
    }

    /// Kernel of the product of the norms of several subextensions:
    /// characters are (⊕ Z[G/H_i]) modulo the diagonal norm line.
    pub fn multinorm(label: &str, group: &FiniteGroup, subs: &[Subgroup]) -> Result<Torus> {
        if subs.is_empty() {
            return Err(Error::InvalidAction("multinorm torus needs a subgroup list".into()));
        }
        let mut perm: Option<GLattice> = None;
        for sub in subs {
            let summand = GLattice::permutation(group.clone(), sub);
            perm = Some(match perm {
                None => summand,
                Some(acc) => acc.direct_sum(&summand)?,
            });
        }
        let ses = norm_line_sequence(label, group, perm.expect("nonempty list"))?;
        let characters = ses.quo().clone();
        Ok(Torus {
            label: label.to_string(),
            characters,
            kind: TorusKind::Multinorm(subs.to_vec()),
            defining: Some(ses),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// One-line description of how the torus was built.
    pub fn kind_text(&self) -> String {
        match &self.kind {
            TorusKind::QuasiTrivial => "quasi_trivial".to_string(),
            TorusKind::NormOne(sub) => {
                if sub.is_trivial() {
                    "norm_one".to_string()
                } else {
                    format!("norm_one over {}", sub.describe())
                }
            }
            TorusKind::Multinorm(subs) => {
                let parts: Vec<String> = subs.iter().map(Subgroup::describe).collect();
                format!("multinorm {}", parts.join("; "))
            }
        }
    }

    pub fn splitting_group(&self) -> &FiniteGroup {
        self.characters.group()
    }

    /// True for the norm-one torus of the full extension, the left end of
    /// the multinorm comparison.
    pub fn is_full_norm_one(&self) -> bool {
        matches!(&self.kind, TorusKind::NormOne(sub) if sub.is_trivial())
    }

    pub fn is_multinorm(&self) -> bool {
        matches!(&self.kind, TorusKind::Multinorm(_))
    }

    pub fn characters(&self) -> &GLattice {
        &self.characters
    }

    pub fn cocharacters(&self) -> GLattice {
        self.characters.dual().with_label(&format!("{}.cochar", self.label))
    }

    /// The sequence 0 -> Z -> (permutation) -> T^ -> 0 for norm-type tori.
    pub fn defining_sequence(&self) -> Option<&ShortExactSequence> {
        self.defining.as_ref()
    }
}

/// Quotient of a permutation-style lattice by the line spanned by the sum
/// of its basis vectors, packaged as a short exact sequence with the
/// trivial lattice on the left.
fn norm_line_sequence(
    label: &str,
    group: &FiniteGroup,
    perm: GLattice,
) -> Result<ShortExactSequence> {
    let r = perm.rank();
    let ones = IntMatrix::from_fn(r, 1, |_, _| BigInt::one());
    let (_, proj) = perm.quotient_by_saturated(&format!("{label}.hat"), &ones)?;
    let z = GLattice::trivial(group.clone(), 1);
    let inj = LatticeMap::new(&z, &perm, ones)?;
    ShortExactSequence::new(inj, proj)
}

/// Tate H^{-1} of every subgroup's restriction, the defining test for
/// flasqueness.
pub fn is_flasque(lattice: &GLattice) -> Result<FlasquenessReport> {
    subgroupwise(lattice, |restricted| Ok(tate_h_minus1(restricted)?.presentation))
}

/// H^1 of every subgroup's restriction, the defining test for
/// coflasqueness.
pub fn is_coflasque(lattice: &GLattice) -> Result<FlasquenessReport> {
    let caps = Caps { max_degree: 1, size_cap: u64::MAX };
    subgroupwise(lattice, |restricted| {
        Ok(CochainComplex::new(restricted, &caps)?.cohomology(1)?.presentation)
    })
}

fn subgroupwise(
    lattice: &GLattice,
    check: impl Fn(&GLattice) -> Result<AbelianPresentation>,
) -> Result<FlasquenessReport> {
    let mut checks = Vec::new();
    for sub in lattice.group().all_subgroups() {
        let restricted = lattice.restrict(&sub);
        checks.push(SubgroupCheck { subgroup: sub.describe(), group: check(&restricted)? });
    }
    Ok(FlasquenessReport { checks })
}

/// One line of a flasqueness/coflasqueness report: the subgroup and the
/// obstruction group computed over it.
pub struct SubgroupCheck {
    pub subgroup: String,
    pub group: AbelianPresentation,
}

pub struct FlasquenessReport {
    pub checks: Vec<SubgroupCheck>,
}

impl FlasquenessReport {
    /// True when every obstruction group is trivial.
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.group.is_trivial())
    }
}

/// Certifies that a lattice is a permutation lattice: a unimodular change
/// of basis onto an explicit direct sum of coset modules.
pub struct PermutationCertificate {
    pub summands: Vec<(Subgroup, usize)>,
    pub basis: IntMatrix,
}

impl PermutationCertificate {
    /// Rebuilds the direct sum named by `summands` and checks that
    /// `basis` is unimodular and intertwines the two actions.
    pub fn verify(&self, lattice: &GLattice) -> Result<()> {
        let group = lattice.group().clone();
        let mut block: Option<GLattice> = None;
        for (sub, mult) in &self.summands {
            for _ in 0..*mult {
                let summand = GLattice::permutation(group.clone(), sub);
                block = Some(match block {
                    None => summand,
                    Some(acc) => acc.direct_sum(&summand)?,
                });
            }
        }
        let block =
            block.ok_or_else(|| Error::Internal("empty permutation certificate".into()))?;
        if block.rank() != lattice.rank()
            || self.basis.rows() != block.rank()
            || self.basis.cols() != lattice.rank()
        {
            return Err(Error::DimensionMismatch("certificate basis has wrong shape".into()));
        }
        if !is_saturated_basis(&self.basis) || self.basis.rows() != self.basis.cols() {
            return Err(Error::NotABasis);
        }
        LatticeMap::new(lattice, &block, self.basis.clone())?;
        Ok(())
    }
}

/// A flasque resolution 0 -> T^ -> E^ -> S^ -> 0 with its certificates.
pub struct FlasqueResolution {
    pub ses: ShortExactSequence,
    pub permutation_certificate: PermutationCertificate,
    pub flasque_certificate: FlasquenessReport,
}

impl FlasqueResolution {
    pub fn flasque_lattice(&self) -> &GLattice {
        self.ses.quo()
    }

    pub fn permutation_lattice(&self) -> &GLattice {
        self.ses.mid()
    }
}

/// Flasque resolution with the subgroup cover in its canonical order.
pub fn flasque_resolution(torus: &Torus) -> Result<FlasqueResolution> {
    flasque_resolution_with_cover(torus, &torus.splitting_group().all_subgroups())
}

/// Flasque resolution built from an explicit subgroup cover; the cover
/// must include the trivial subgroup (or enough others) to surject onto
/// the cocharacters.
pub fn flasque_resolution_with_cover(
    torus: &Torus,
    cover: &[Subgroup],
) -> Result<FlasqueResolution> {
    let group = torus.splitting_group().clone();
    let cochar = torus.cocharacters();
    let r = cochar.rank();

    // One Z[G/H] summand per basis vector of the H-fixed sublattice; the
    // coset with representative w maps to w applied to that basis vector.
    // The map is onto because the trivial subgroup contributes a full
    // basis, and its kernel is coflasque because every fixed sublattice
    // is hit by fixed elements upstairs.
    let mut perm: Option<GLattice> = None;
    let mut summands: Vec<(Subgroup, usize)> = Vec::new();
    let mut map_cols: Vec<Vec<BigInt>> = Vec::new();
    for sub in cover {
        let fixed = cochar.invariants_sublattice(sub);
        if fixed.cols() == 0 {
            continue;
        }
        summands.push((sub.clone(), fixed.cols()));
        let cosets = group.left_cosets(sub);
        for j in 0..fixed.cols() {
            let summand = GLattice::permutation(group.clone(), sub);
            perm = Some(match perm {
                None => summand,
                Some(acc) => acc.direct_sum(&summand)?,
            });
            let m_j = fixed.column(j);
            for coset in &cosets {
                map_cols.push(cochar.action(coset[0]).mul_vec(&m_j));
            }
        }
    }
    let perm = perm.ok_or_else(|| {
        Error::InvalidAction("cover produced no summands; include the trivial subgroup".into())
    })?;
    let phi = IntMatrix::from_columns(r, &map_cols);
    let cover_map = LatticeMap::new(&perm, &cochar, phi.clone())?;
    if !cover_map.is_surjective() {
        return Err(Error::InvalidAction(
            "cover does not surject onto the cocharacters; include the trivial subgroup".into(),
        ));
    }
    let kernel = kernel_basis(&phi);
    let (c_lat, c_inj) = perm.sublattice("C", &kernel)?;

    // Dualize 0 -> C -> P -> M -> 0 into 0 -> M^ -> P^ -> C^ -> 0. The
    // middle keeps its matrices (permutation matrices are orthogonal), and
    // M^ is literally the character lattice again.
    let e_hat = perm.dual().with_label(&format!("{}.E", torus.label()));
    let s_hat = c_lat.dual().with_label(&format!("{}.S", torus.label()));
    let inj = LatticeMap::new(torus.characters(), &e_hat, phi.transpose())?;
    let surj = LatticeMap::new(&e_hat, &s_hat, c_inj.matrix().transpose())?;
    let ses = ShortExactSequence::new(inj, surj)?;

    let permutation_certificate =
        PermutationCertificate { summands, basis: IntMatrix::identity(perm.rank()) };
    permutation_certificate.verify(ses.mid())?;

    let flasque_certificate = is_flasque(ses.quo())?;
    if !flasque_certificate.holds() {
        return Err(Error::Internal(
            "resolution produced a non-flasque quotient".into(),
        ));
    }
    Ok(FlasqueResolution { ses, permutation_certificate, flasque_certificate })
}

/// H^1(G, S^) for a flasque resolution of the torus: the obstruction
/// group that vanishes exactly when the torus is stably rational-like
/// from this lattice-theoretic point of view. Computed twice, from two
/// different covers, and required to agree.
pub fn br_invariant(torus: &Torus) -> Result<AbelianPresentation> {
    let caps = Caps { max_degree: 1, size_cap: u64::MAX };
    let forward = flasque_resolution(torus)?;
    let h1 = CochainComplex::new(forward.flasque_lattice(), &caps)?.cohomology(1)?.presentation;
    let mut reversed = torus.splitting_group().all_subgroups();
    reversed.reverse();
    let backward = flasque_resolution_with_cover(torus, &reversed)?;
    let h1_check =
        CochainComplex::new(backward.flasque_lattice(), &caps)?.cohomology(1)?.presentation;
    if h1 != h1_check {
        return Err(Error::Internal(format!(
            "resolution invariant is not stable: {} vs {}",
            h1.text(),
            h1_check.text()
        )));
    }
    Ok(h1)
}

/// The comparison sequence 0 -> Q^ -> T^ -> Z^{k-1} -> 0 between the
/// full norm-one torus Q and a multinorm torus T over subgroups of equal
/// order: the diagonal projection of the group ring descends to the
/// character quotients and its cokernel is free of rank one less than
/// the number of subgroups.
pub fn multinorm_comparison(norm_one: &Torus, multinorm: &Torus) -> Result<ShortExactSequence> {
    let group = norm_one.splitting_group().clone();
    if &group != multinorm.splitting_group() {
        return Err(Error::InvalidAction("tori split by different groups".into()));
    }
    let TorusKind::NormOne(base) = &norm_one.kind else {
        return Err(Error::InvalidAction("first torus must be a norm-one torus".into()));
    };
    if !base.is_trivial() {
        return Err(Error::InvalidAction(
            "comparison needs the norm-one torus of the full extension".into(),
        ));
    }
    let TorusKind::Multinorm(subs) = &multinorm.kind else {
        return Err(Error::InvalidAction("second torus must be a multinorm torus".into()));
    };
    let order = subs[0].order();
    if subs.iter().any(|s| s.order() != order) {
        return Err(Error::NotExact(
            "multinorm comparison needs subgroups of equal order".into(),
        ));
    }
    let q_def = norm_one.defining_sequence().expect("norm-one torus has one");
    let t_def = multinorm.defining_sequence().expect("multinorm torus has one");

    // diagonal of the coset projections Z[G] -> ⊕ Z[G/H_i]
    let n = group.order();
    let mut blocks: Vec<IntMatrix> = Vec::new();
    for sub in subs {
        let cosets = group.left_cosets(sub);
        let mut coset_of = vec![0usize; n];
        for (c, coset) in cosets.iter().enumerate() {
            for &g in coset {
                coset_of[g as usize] = c;
            }
        }
        blocks.push(IntMatrix::from_fn(cosets.len(), n, |i, j| {
            if coset_of[j] == i {
                BigInt::one()
            } else {
                BigInt::from(0)
            }
        }));
    }
    let mut diag = blocks[0].clone();
    for b in &blocks[1..] {
        diag = diag.vstack(b);
    }
    // descend through both quotients: f * proj_Q = proj_T * diag, solved
    // with an integral section of proj_Q and verified exactly afterwards
    let section = solve(q_def.surj.matrix(), &IntMatrix::identity(q_def.quo().rank()))
        .ok_or_else(|| Error::Internal("norm-one projection has no integral section".into()))?;
    let f = t_def.surj.matrix().mul(&diag).mul(&section);
    if f.mul(q_def.surj.matrix()) != t_def.surj.matrix().mul(&diag) {
        return Err(Error::NotExact("comparison map does not descend to the quotients".into()));
    }
    let inj = LatticeMap::new(norm_one.characters(), multinorm.characters(), f.clone())?;
    if !is_saturated_basis(&f) {
        return Err(Error::NotExact("comparison map is not a saturated embedding".into()));
    }
    let (_, proj) = multinorm
        .characters()
        .quotient_by_saturated(&format!("{}/{}", multinorm.label(), norm_one.label()), &f)?;
    ShortExactSequence::new(inj, proj)
}
