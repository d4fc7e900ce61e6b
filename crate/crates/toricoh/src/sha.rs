//! Decomposition-group families and the kernels they cut out of
//! cohomology.
//!
//! A place enters these computations only through its decomposition
//! subgroup, so a family of places is a labeled list of subgroups of the
//! acting group. `sha_kernel` computes the subgroup of H^i(G, M) of
//! classes restricting to zero at every place of the family, together
//! with generating cocycles that are re-verified place by place: each
//! witness restricted to a decomposition group is solved for an explicit
//! cobounding cochain there. `chebotarev_coverage` audits which cyclic
//! subgroups of G the family misses up to conjugacy, and
//! `sha_les_transfer` pushes a short exact sequence of lattices through
//! these kernels in consecutive degrees, reporting exactness.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cohomology::{
    coboundary_matrix, connecting, induced, restriction, tuple_rank, tuple_unrank,
    CochainComplex, CohomologyGroup,
};
use crate::group::{FiniteGroup, Subgroup};
use crate::lattice::{GLattice, ShortExactSequence};
use crate::linalg::{
    cokernel_presentation, presented_kernel, solve, AbelianPresentation, IntMatrix,
};
use crate::{Caps, Error, Result};

/// One place, reduced to the only data that matters here: its
/// decomposition subgroup.
#[derive(Clone)]
pub struct Place {
    pub label: String,
    pub decomposition: Subgroup,
}

impl Place {
    pub fn new(label: &str, decomposition: Subgroup) -> Place {
        Place { label: label.to_string(), decomposition }
    }
}

/// A labeled collection of places; duplicates are harmless.
pub struct PlaceFamily {
    label: String,
    places: Vec<Place>,
}

impl PlaceFamily {
    pub fn new(label: &str, places: Vec<Place>) -> PlaceFamily {
        PlaceFamily { label: label.to_string(), places }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    fn check_group(&self, group: &FiniteGroup) -> Result<()> {
        for p in &self.places {
            if p.decomposition.parent() != group {
                return Err(Error::NotASubgroup(format!(
                    "place {} lives over a different group",
                    p.label
                )));
            }
        }
        Ok(())
    }
}

/// The kernel of all restriction maps out of one cohomology group, with
/// generating cocycles.
pub struct ShaGroup {
    pub degree: usize,
    pub presentation: AbelianPresentation,
    family: String,
    ambient: CohomologyGroup,
    witness_coords: IntMatrix,
    witnesses: Vec<Vec<BigInt>>,
}

impl ShaGroup {
    /// The surrounding H^degree(G, M).
    pub fn ambient(&self) -> &CohomologyGroup {
        &self.ambient
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    /// Cocycles generating the kernel, one per canonical coordinate of
    /// the presentation.
    pub fn witnesses(&self) -> &[Vec<BigInt>] {
        &self.witnesses
    }

    /// The witnesses' classes in the ambient group's coordinates, one
    /// column each.
    pub fn witness_coords(&self) -> &IntMatrix {
        &self.witness_coords
    }

    pub fn is_trivial(&self) -> bool {
        self.presentation.is_trivial()
    }
}

/// Classes of H^degree(G, M) that die in every H^degree(D_v, M) of the
/// family. Every generating witness is re-verified: its restriction to
/// each decomposition group is solved for a cobounding cochain.
pub fn sha_kernel(
    lattice: &GLattice,
    degree: usize,
    family: &PlaceFamily,
    caps: &Caps,
) -> Result<ShaGroup> {
    family.check_group(lattice.group())?;
    let ambient = CochainComplex::new(lattice, caps)?.cohomology(degree)?;
    let src_len = ambient.presentation.coord_len();

    let (presentation, witness_coords) = if family.places.is_empty() {
        (ambient.presentation.clone(), IntMatrix::identity(src_len))
    } else {
        let mut stacked = IntMatrix::zero(0, src_len);
        let mut rel_blocks = Vec::new();
        for place in &family.places {
            let restricted = lattice.restrict(&place.decomposition);
            let local = CochainComplex::new(&restricted, caps)?.cohomology(degree)?;
            let map = restriction(&ambient, &place.decomposition, &local)?;
            stacked = stacked.vstack(&map.matrix);
            rel_blocks.push(local.presentation.relations());
        }
        presented_kernel(&stacked, &ambient.presentation.relations(), &block_diag(&rel_blocks))
    };

    let mut witnesses = Vec::with_capacity(witness_coords.cols());
    for j in 0..witness_coords.cols() {
        let w = ambient.cochain_from_coords(&witness_coords.column(j));
        verify_witness(lattice, degree, &w, family)?;
        witnesses.push(w);
    }
    Ok(ShaGroup {
        degree,
        presentation,
        family: family.label.clone(),
        ambient,
        witness_coords,
        witnesses,
    })
}

/// Checks that the restriction of `w` to every decomposition group is a
/// coboundary there, by solving for the cobounding cochain.
fn verify_witness(
    lattice: &GLattice,
    degree: usize,
    w: &[BigInt],
    family: &PlaceFamily,
) -> Result<()> {
    for place in &family.places {
        let restricted = lattice.restrict(&place.decomposition);
        let local = restrict_cochain(lattice, &place.decomposition, degree, w);
        let dies = if degree == 0 {
            local.iter().all(Zero::is_zero)
        } else {
            let d = coboundary_matrix(&restricted, degree - 1);
            let b = IntMatrix::from_columns(local.len(), &[local]);
            solve(&d, &b).is_some()
        };
        if !dies {
            return Err(Error::Internal(format!(
                "kernel witness does not cobound at place {}",
                place.label
            )));
        }
    }
    Ok(())
}

fn restrict_cochain(
    lattice: &GLattice,
    sub: &Subgroup,
    degree: usize,
    f: &[BigInt],
) -> Vec<BigInt> {
    let r = lattice.rank();
    let n = lattice.group().order();
    let h = sub.order();
    let embed = sub.elements();
    let mut out = vec![BigInt::zero(); h.pow(degree as u32) * r];
    for t in 0..h.pow(degree as u32) {
        let tuple = tuple_unrank(t, h, degree);
        let g_tuple: Vec<u16> = tuple.iter().map(|&x| embed[x as usize]).collect();
        let src = tuple_rank(&g_tuple, n) * r;
        out[t * r..(t + 1) * r].clone_from_slice(&f[src..src + r]);
    }
    out
}

fn block_diag(blocks: &[IntMatrix]) -> IntMatrix {
    let mut row_off = vec![0usize];
    let mut col_off = vec![0usize];
    for b in blocks {
        row_off.push(row_off.last().unwrap() + b.rows());
        col_off.push(col_off.last().unwrap() + b.cols());
    }
    IntMatrix::from_fn(*row_off.last().unwrap(), *col_off.last().unwrap(), |i, j| {
        let k = row_off.partition_point(|&x| x <= i) - 1;
        if j >= col_off[k] && j < col_off[k + 1] {
            blocks[k][(i - row_off[k], j - col_off[k])].clone()
        } else {
            BigInt::zero()
        }
    })
}

/// One cyclic subgroup's coverage status: the label of a place whose
/// decomposition group contains a conjugate of it, if any does.
pub struct CoverageCheck {
    pub subgroup: String,
    pub covered_by: Option<String>,
}

pub struct CoverageReport {
    pub checks: Vec<CoverageCheck>,
}

impl CoverageReport {
    pub fn covered(&self) -> bool {
        self.checks.iter().all(|c| c.covered_by.is_some())
    }

    pub fn uncovered(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.covered_by.is_none())
            .map(|c| c.subgroup.as_str())
            .collect()
    }
}

/// Which cyclic subgroups of G land, up to conjugacy, inside some
/// decomposition group of the family. Families failing this audit are
/// the ones for which the kernels above can be unexpectedly large.
pub fn chebotarev_coverage(group: &FiniteGroup, family: &PlaceFamily) -> Result<CoverageReport> {
    family.check_group(group)?;
    let mut checks = Vec::new();
    for c in group.cyclic_subgroups() {
        let covered_by = family
            .places
            .iter()
            .find(|p| group.is_conjugate_contained(&c, &p.decomposition))
            .map(|p| p.label.clone());
        checks.push(CoverageCheck { subgroup: c.describe(), covered_by });
    }
    Ok(CoverageReport { checks })
}

/// The two-step segment Sha^i(C) -> Sha^{i+1}(A) -> Sha^{i+1}(B) cut out
/// of the long exact sequence of 0 -> A -> B -> C -> 0 by a place family,
/// with exactness bookkeeping.
pub struct TransferReport {
    pub degree: usize,
    pub first: ShaGroup,
    pub middle: ShaGroup,
    pub last: ShaGroup,
    pub connecting_matrix: IntMatrix,
    pub induced_matrix: IntMatrix,
    pub connecting_injective: bool,
    pub connecting_surjective: bool,
    pub induced_injective: bool,
    pub induced_surjective: bool,
    pub exact_at_middle: bool,
}

/// Restricts the degree-raising segment of the long exact sequence to the
/// kernels of a place family. The connecting map and the map induced by
/// the injection both commute with restriction to every subgroup, so they
/// carry kernel classes to kernel classes; the construction verifies this
/// by solving for each image in the target kernel's generators.
pub fn sha_les_transfer(
    ses: &ShortExactSequence,
    degree: usize,
    family: &PlaceFamily,
    caps: &Caps,
) -> Result<TransferReport> {
    let first = sha_kernel(ses.quo(), degree, family, caps)?;
    let middle = sha_kernel(ses.sub(), degree + 1, family, caps)?;
    let last = sha_kernel(ses.mid(), degree + 1, family, caps)?;
    let delta = connecting(ses, first.ambient(), middle.ambient())?;
    let push = induced(&ses.inj, middle.ambient(), last.ambient())?;

    let connecting_matrix = between_kernels(&delta.matrix, &first, &middle)?;
    let induced_matrix = between_kernels(&push.matrix, &middle, &last)?;

    let connecting_injective = injective(&connecting_matrix, &first, &middle);
    let connecting_surjective = surjective(&connecting_matrix, &middle);
    let induced_injective = injective(&induced_matrix, &middle, &last);
    let induced_surjective = surjective(&induced_matrix, &last);

    let composite = induced_matrix.mul(&connecting_matrix);
    let composite_zero = (0..composite.cols())
        .all(|j| last.presentation.reduce(&composite.column(j)).iter().all(Zero::is_zero));
    let (_, ker_gens) = presented_kernel(
        &induced_matrix,
        &middle.presentation.relations(),
        &last.presentation.relations(),
    );
    let hits = connecting_matrix.hstack(&middle.presentation.relations());
    let kernel_inside_image = if hits.cols() == 0 {
        (0..ker_gens.cols())
            .all(|j| middle.presentation.reduce(&ker_gens.column(j)).iter().all(Zero::is_zero))
    } else {
        solve(&hits, &ker_gens).is_some()
    };
    let exact_at_middle = composite_zero && kernel_inside_image;

    Ok(TransferReport {
        degree,
        first,
        middle,
        last,
        connecting_matrix,
        induced_matrix,
        connecting_injective,
        connecting_surjective,
        induced_injective,
        induced_surjective,
        exact_at_middle,
    })
}

/// Rewrites an ambient-coordinate map as a map between two kernel
/// subgroups, erroring if some image falls outside the target kernel.
fn between_kernels(ambient: &IntMatrix, src: &ShaGroup, dst: &ShaGroup) -> Result<IntMatrix> {
    let dst_len = dst.presentation.coord_len();
    if src.presentation.coord_len() == 0 {
        return Ok(IntMatrix::zero(dst_len, 0));
    }
    let images = ambient.mul(src.witness_coords());
    let span = dst.witness_coords().hstack(&dst.ambient.presentation.relations());
    let sol = if span.cols() == 0 {
        if !images.is_zero() {
            None
        } else {
            Some(IntMatrix::zero(0, images.cols()))
        }
    } else {
        solve(&span, &images)
    };
    let sol = sol.ok_or_else(|| {
        Error::Internal("image of a kernel class escapes the target kernel".into())
    })?;
    let cols: Vec<Vec<BigInt>> = (0..sol.cols())
        .map(|j| {
            let full = sol.column(j);
            dst.presentation.reduce(&full[..dst_len])
        })
        .collect();
    Ok(IntMatrix::from_columns(dst_len, &cols))
}

fn injective(m: &IntMatrix, src: &ShaGroup, dst: &ShaGroup) -> bool {
    presented_kernel(m, &src.presentation.relations(), &dst.presentation.relations())
        .0
        .is_trivial()
}

fn surjective(m: &IntMatrix, dst: &ShaGroup) -> bool {
    cokernel_presentation(&m.hstack(&dst.presentation.relations())).is_trivial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeMap;
    use crate::linalg::bi;
    use crate::tori::{flasque_resolution, multinorm_comparison, Torus};

    fn norm_one_chars() -> GLattice {
        let g = FiniteGroup::klein_four();
        Torus::norm_one("Q", &g, &g.trivial_subgroup()).unwrap().characters().clone()
    }

    fn omega3(g: &FiniteGroup) -> PlaceFamily {
        let places = g
            .all_subgroups()
            .into_iter()
            .filter(|s| s.order() == 2)
            .enumerate()
            .map(|(i, s)| Place::new(&format!("v{}", i + 1), s))
            .collect();
        PlaceFamily::new("omega3", places)
    }

    #[test]
    fn empty_family_keeps_the_whole_group() {
        let m = norm_one_chars();
        let sha = sha_kernel(&m, 2, &PlaceFamily::new("nowhere", vec![]), &Caps::default())
            .unwrap();
        assert_eq!(sha.presentation, AbelianPresentation::cyclic(2));
        assert_eq!(sha.presentation, sha.ambient().presentation);
        assert_eq!(sha.witnesses().len(), 1);
    }

    #[test]
    fn a_full_group_place_kills_everything() {
        let m = norm_one_chars();
        let g = m.group().clone();
        let family = PlaceFamily::new("total", vec![Place::new("v", g.full_subgroup())]);
        let sha = sha_kernel(&m, 2, &family, &Caps::default()).unwrap();
        assert!(sha.is_trivial());
        assert_eq!(sha.ambient().presentation, AbelianPresentation::cyclic(2));
    }

    #[test]
    fn three_halfline_places_leave_a_two_torsion_class() {
        // every restriction of H^2 to an order-2 subgroup dies, so the
        // kernel is the whole ambient group
        let m = norm_one_chars();
        let g = m.group().clone();
        let sha = sha_kernel(&m, 2, &omega3(&g), &Caps::default()).unwrap();
        assert_eq!(sha.presentation, AbelianPresentation::cyclic(2));
        let w = &sha.witnesses()[0];
        assert_eq!(sha.ambient().class_of(w), Some(vec![bi(1)]));
    }

    #[test]
    fn degree_one_kernel_vanishes() {
        // H^1 here is Hom(V4, Q/Z) in disguise and no nonzero character
        // dies on all three order-2 subgroups
        let m = norm_one_chars();
        let g = m.group().clone();
        let sha = sha_kernel(&m, 1, &omega3(&g), &Caps::default()).unwrap();
        assert!(sha.is_trivial());
        assert!(!sha.ambient().presentation.is_trivial());
    }

    #[test]
    fn enlarging_the_family_shrinks_the_kernel() {
        let m = norm_one_chars();
        let g = m.group().clone();
        let small = sha_kernel(&m, 2, &omega3(&g), &Caps::default()).unwrap();
        let mut enlarged = omega3(&g).places;
        enlarged.push(Place::new("v4", g.full_subgroup()));
        let big = sha_kernel(&m, 2, &PlaceFamily::new("four", enlarged), &Caps::default()).unwrap();
        let small_order = small.presentation.order().unwrap();
        let big_order = big.presentation.order().unwrap();
        assert_eq!(&small_order % &big_order, bi(0));
        assert!(big_order < small_order);
    }

    #[test]
    fn conjugate_families_give_equal_kernels() {
        let s3 = FiniteGroup::from_generator_permutations(
            "S3",
            3,
            &[vec![1, 0, 2], vec![1, 2, 0]],
        )
        .unwrap();
        let twos: Vec<Subgroup> =
            s3.all_subgroups().into_iter().filter(|s| s.order() == 2).collect();
        assert_eq!(twos.len(), 3);
        let m = GLattice::permutation(s3.clone(), &twos[0]);
        for degree in 1..=2 {
            let a = sha_kernel(
                &m,
                degree,
                &PlaceFamily::new("a", vec![Place::new("v", twos[1].clone())]),
                &Caps::default(),
            )
            .unwrap();
            let b = sha_kernel(
                &m,
                degree,
                &PlaceFamily::new("b", vec![Place::new("v", twos[2].clone())]),
                &Caps::default(),
            )
            .unwrap();
            assert_eq!(a.presentation, b.presentation);
        }
    }

    #[test]
    fn coverage_audit_over_klein_four() {
        let g = FiniteGroup::klein_four();
        let total = PlaceFamily::new("total", vec![Place::new("v", g.full_subgroup())]);
        assert!(chebotarev_coverage(&g, &total).unwrap().covered());

        let report = chebotarev_coverage(&g, &omega3(&g)).unwrap();
        assert!(report.covered());
        assert_eq!(report.checks.len(), 4);

        let one = PlaceFamily::new(
            "one",
            vec![Place::new("v", g.subgroup_from_elements(&[0, 1]).unwrap())],
        );
        let partial = chebotarev_coverage(&g, &one).unwrap();
        assert!(!partial.covered());
        assert_eq!(partial.uncovered().len(), 2);
    }

    #[test]
    fn transfer_across_a_split_sequence() {
        let m = norm_one_chars();
        let g = m.group().clone();
        let z = GLattice::trivial(g.clone(), 1);
        let sum = z.direct_sum(&m).unwrap();
        let inj = LatticeMap::new(
            &z,
            &sum,
            IntMatrix::from_fn(4, 1, |i, _| if i == 0 { bi(1) } else { bi(0) }),
        )
        .unwrap();
        let surj = LatticeMap::new(
            &sum,
            &m,
            IntMatrix::from_fn(3, 4, |i, j| if j == i + 1 { bi(1) } else { bi(0) }),
        )
        .unwrap();
        let ses = ShortExactSequence::new(inj, surj).unwrap();
        let report = sha_les_transfer(&ses, 1, &omega3(&g), &Caps::default()).unwrap();
        assert!(report.first.is_trivial());
        assert!(report.middle.is_trivial());
        assert_eq!(report.last.presentation, AbelianPresentation::cyclic(2));
        assert!(report.connecting_matrix.is_zero());
        assert!(report.exact_at_middle);
        assert!(report.connecting_injective);
        assert!(!report.induced_surjective);
    }

    #[test]
    fn transfer_across_the_flasque_resolution() {
        let g = FiniteGroup::klein_four();
        let q = Torus::norm_one("Q", &g, &g.trivial_subgroup()).unwrap();
        let res = flasque_resolution(&q).unwrap();
        let report = sha_les_transfer(&res.ses, 1, &omega3(&g), &Caps::default()).unwrap();
        // the connecting map carries the degree-one kernel of the flasque
        // quotient isomorphically onto the surviving two-torsion class
        assert_eq!(report.first.presentation, AbelianPresentation::cyclic(2));
        assert_eq!(report.middle.presentation, AbelianPresentation::cyclic(2));
        assert!(report.connecting_injective);
        assert!(report.connecting_surjective);
        assert!(report.exact_at_middle);
    }

    #[test]
    fn transfer_across_the_multinorm_comparison() {
        let g = FiniteGroup::klein_four();
        let q = Torus::norm_one("Q", &g, &g.trivial_subgroup()).unwrap();
        let subs: Vec<Subgroup> =
            g.all_subgroups().into_iter().filter(|s| s.order() == 2).collect();
        let qt = Torus::multinorm("Qt", &g, &subs).unwrap();
        let bridge = multinorm_comparison(&q, &qt).unwrap();
        let report = sha_les_transfer(&bridge, 1, &omega3(&g), &Caps::default()).unwrap();
        assert!(report.first.is_trivial());
        assert_eq!(report.middle.presentation, AbelianPresentation::cyclic(2));
        assert!(report.induced_injective);
        assert!(report.exact_at_middle);
    }

    #[test]
    fn rejects_places_over_the_wrong_group() {
        let m = norm_one_chars();
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let family = PlaceFamily::new("bad", vec![Place::new("v", c2.full_subgroup())]);
        assert!(matches!(
            sha_kernel(&m, 1, &family, &Caps::default()),
            Err(Error::NotASubgroup(_))
        ));
    }
}
