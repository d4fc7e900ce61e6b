//! Group cohomology of lattices through the inhomogeneous cochain complex.
//!
//! Cochains in degree i are functions G^i -> M, stored as vectors indexed
//! by (tuple, basis) pairs with the first tuple slot most significant. The
//! coboundary is
//!
//!   (df)(g_1,..,g_{i+1}) = g_1 f(g_2,..,g_{i+1})
//!                        + sum_j (-1)^j f(g_1,..,g_j g_{j+1},..,g_{i+1})
//!                        + (-1)^{i+1} f(g_1,..,g_i),
//!
//! kept as a sparse matrix per degree and double-checked to square to
//! zero. H^0 is the fixed sublattice, read off the kernel of d^0. In
//! positive degree the group is finite, and that finiteness is what makes
//! big computations tractable: H^i embeds in coker(d^{i-1}) as exactly its
//! torsion subgroup (the next cochain group is torsion free, so torsion
//! classes are automatically cocycle classes). So H^i comes out of the
//! sparse cokernel engine without ever forming d^i as a matrix; each
//! reported generator is still re-verified to be a cocycle by applying
//! the coboundary formula directly.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::group::{FiniteGroup, Subgroup};
use crate::lattice::{GLattice, LatticeMap, ShortExactSequence};
use crate::linalg::sparse::{coker_torsion, product_is_zero, SparseMat, TorsionCoker};
use crate::linalg::{
    cokernel_presentation, presented_kernel, smith_ext, subquotient, AbelianPresentation,
    IntMatrix, SmithExt, Subquotient,
};
use crate::{Caps, Error, Result};

pub(crate) fn tuple_rank(tuple: &[u16], n: usize) -> usize {
    tuple.iter().fold(0usize, |acc, &g| acc * n + g as usize)
}

pub(crate) fn tuple_unrank(mut idx: usize, n: usize, len: usize) -> Vec<u16> {
    let mut out = vec![0u16; len];
    for slot in (0..len).rev() {
        out[slot] = (idx % n) as u16;
        idx /= n;
    }
    out
}

fn pow_checked(n: usize, e: usize) -> u128 {
    (n as u128).pow(e as u32)
}

/// Nonzero entries of each action matrix as (row, col, value) lists; the
/// tight inner loops below iterate these instead of scanning full blocks.
fn action_nonzeros(lattice: &GLattice) -> Vec<Vec<(usize, usize, BigInt)>> {
    let r = lattice.rank();
    lattice
        .group()
        .elements()
        .map(|g| {
            let a = lattice.action(g);
            let mut nz = Vec::new();
            for row in 0..r {
                for col in 0..r {
                    if !a[(row, col)].is_zero() {
                        nz.push((row, col, a[(row, col)].clone()));
                    }
                }
            }
            nz
        })
        .collect()
}

/// The coboundary C^degree -> C^{degree+1} as a sparse matrix.
pub(crate) fn coboundary_sparse(lattice: &GLattice, degree: usize) -> SparseMat {
    let n = lattice.group().order();
    let r = lattice.rank();
    let rows = n.pow((degree + 1) as u32) * r;
    let cols = n.pow(degree as u32) * r;
    let nz = action_nonzeros(lattice);
    let mut d = SparseMat::zero(rows, cols);
    for t in 0..n.pow((degree + 1) as u32) {
        let tuple = tuple_unrank(t, n, degree + 1);
        let g1 = tuple[0];
        let head = tuple_rank(&tuple[1..], n);
        for &(row, col, ref v) in &nz[g1 as usize] {
            d.add_to(t * r + row, head * r + col, v.clone());
        }
        let mut sign = -1i64;
        for j in 0..degree {
            let mut merged = Vec::with_capacity(degree);
            merged.extend_from_slice(&tuple[..j]);
            merged.push(lattice.group().mul(tuple[j], tuple[j + 1]));
            merged.extend_from_slice(&tuple[j + 2..]);
            let c = tuple_rank(&merged, n);
            for m in 0..r {
                d.add_to(t * r + m, c * r + m, BigInt::from(sign));
            }
            sign = -sign;
        }
        let tail = tuple_rank(&tuple[..degree], n);
        for m in 0..r {
            d.add_to(t * r + m, tail * r + m, BigInt::from(sign));
        }
    }
    d
}

/// Dense coboundary matrix, for inspection of small complexes.
pub fn coboundary_matrix(lattice: &GLattice, degree: usize) -> IntMatrix {
    coboundary_sparse(lattice, degree).to_dense()
}

/// Applies the degree-`degree` coboundary to a cochain vector without
/// building the matrix; this is how generators are re-verified to be
/// cocycles one degree past the stored differentials.
pub fn apply_coboundary(lattice: &GLattice, degree: usize, f: &[BigInt]) -> Vec<BigInt> {
    let n = lattice.group().order();
    let r = lattice.rank();
    assert_eq!(f.len(), n.pow(degree as u32) * r, "cochain has the wrong length");
    let nz = action_nonzeros(lattice);
    let mut out = vec![BigInt::zero(); n.pow((degree + 1) as u32) * r];
    for t in 0..n.pow((degree + 1) as u32) {
        let tuple = tuple_unrank(t, n, degree + 1);
        let g1 = tuple[0];
        let head = tuple_rank(&tuple[1..], n) * r;
        for &(row, col, ref v) in &nz[g1 as usize] {
            let x = &f[head + col];
            if !x.is_zero() {
                out[t * r + row] += v * x;
            }
        }
        let mut sign = 1i64;
        for j in 0..degree {
            sign = -sign;
            let mut merged = Vec::with_capacity(degree);
            merged.extend_from_slice(&tuple[..j]);
            merged.push(lattice.group().mul(tuple[j], tuple[j + 1]));
            merged.extend_from_slice(&tuple[j + 2..]);
            let c = tuple_rank(&merged, n) * r;
            for m in 0..r {
                if sign > 0 {
                    out[t * r + m] += &f[c + m];
                } else {
                    out[t * r + m] -= &f[c + m];
                }
            }
        }
        sign = -sign;
        let tail = tuple_rank(&tuple[..degree], n) * r;
        for m in 0..r {
            if sign > 0 {
                out[t * r + m] += &f[tail + m];
            } else {
                out[t * r + m] -= &f[tail + m];
            }
        }
    }
    out
}

/// The cochain complex of a lattice up to a chosen degree, with stored
/// sparse differentials d^0, .., d^{max_degree - 1}.
pub struct CochainComplex {
    lattice: GLattice,
    max_degree: usize,
    coboundary: Vec<SparseMat>,
}

impl CochainComplex {
    pub fn new(lattice: &GLattice, caps: &Caps) -> Result<CochainComplex> {
        let n = lattice.group().order();
        let r = lattice.rank();
        let mut coboundary = Vec::with_capacity(caps.max_degree);
        for i in 0..caps.max_degree {
            let rows = pow_checked(n, i + 1) * r as u128;
            let cols = pow_checked(n, i) * r as u128;
            if rows > caps.size_cap as u128 {
                return Err(Error::SizeCapExceeded {
                    degree: i,
                    rows,
                    cols,
                    needed: rows,
                    cap: caps.size_cap,
                });
            }
            coboundary.push(coboundary_sparse(lattice, i));
        }
        for i in 0..coboundary.len().saturating_sub(1) {
            if !product_is_zero(&coboundary[i + 1], &coboundary[i]) {
                return Err(Error::BrokenComplex);
            }
        }
        Ok(CochainComplex { lattice: lattice.clone(), max_degree: caps.max_degree, coboundary })
    }

    pub fn lattice(&self) -> &GLattice {
        &self.lattice
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Dimension of the degree-i cochain group.
    pub fn dim(&self, i: usize) -> usize {
        self.lattice.group().order().pow(i as u32) * self.lattice.rank()
    }

    /// H^i of the complex. Degree 0 is the fixed sublattice; positive
    /// degrees come out of the torsion of coker(d^{i-1}).
    pub fn cohomology(&self, degree: usize) -> Result<CohomologyGroup> {
        if degree > self.max_degree {
            return Err(Error::DegreeOutOfRange { degree, max: self.max_degree });
        }
        if degree == 0 {
            let fixed = self.lattice.invariants_sublattice(&self.lattice.group().full_subgroup());
            let generators: Vec<Vec<BigInt>> =
                (0..fixed.cols()).map(|j| fixed.column(j)).collect();
            let backend = Backend::Kernel(smith_ext(&fixed));
            return Ok(CohomologyGroup {
                degree,
                lattice: self.lattice.clone(),
                presentation: AbelianPresentation::free(fixed.cols()),
                generators,
                backend,
            });
        }
        let torsion = coker_torsion(&self.coboundary[degree - 1]);
        let order = BigInt::from(self.lattice.group().order());
        for d in &torsion.factors {
            if !(&order % d).is_zero() {
                return Err(Error::Internal(format!(
                    "invariant factor {d} does not divide the group order {order}"
                )));
            }
        }
        for g in &torsion.gen_vectors {
            if !apply_coboundary(&self.lattice, degree, g).iter().all(|x| x.is_zero()) {
                return Err(Error::Internal(
                    "torsion generator failed the cocycle re-check".into(),
                ));
            }
        }
        let presentation =
            AbelianPresentation { free_rank: 0, invariant_factors: torsion.factors.clone() };
        let generators = torsion.gen_vectors.clone();
        Ok(CohomologyGroup {
            degree,
            lattice: self.lattice.clone(),
            presentation,
            generators,
            backend: Backend::Torsion(torsion),
        })
    }
}

enum Backend {
    Kernel(SmithExt),
    Torsion(TorsionCoker),
}

/// A computed H^degree(G, M): the abstract group, generating cocycles,
/// and the data needed to locate the class of any further cocycle.
pub struct CohomologyGroup {
    degree: usize,
    lattice: GLattice,
    pub presentation: AbelianPresentation,
    generators: Vec<Vec<BigInt>>,
    backend: Backend,
}

impl CohomologyGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn lattice(&self) -> &GLattice {
        &self.lattice
    }

    /// Generating cocycles, one per canonical coordinate of the
    /// presentation (torsion generators first, then free ones).
    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    /// Canonical coordinates of a cocycle's class; `None` when the vector
    /// is not a cocycle at all.
    pub fn class_of(&self, cochain: &[BigInt]) -> Option<Vec<BigInt>> {
        if !apply_coboundary(&self.lattice, self.degree, cochain).iter().all(|x| x.is_zero()) {
            return None;
        }
        match &self.backend {
            Backend::Kernel(ext) => ext.solve_vec(cochain),
            Backend::Torsion(t) => t.torsion_class_of(cochain),
        }
    }

    /// The cochain representing the class with the given canonical
    /// coordinates.
    pub fn cochain_from_coords(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.generators.len());
        let len = self.generators.first().map_or(
            self.lattice.group().order().pow(self.degree as u32) * self.lattice.rank(),
            Vec::len,
        );
        let mut out = vec![BigInt::zero(); len];
        for (c, g) in coords.iter().zip(&self.generators) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(g) {
                *o += c * x;
            }
        }
        out
    }

    fn same_lattice(&self, other: &GLattice) -> bool {
        self.lattice.group() == other.group()
            && self.lattice.rank() == other.rank()
            && self
                .lattice
                .group()
                .elements()
                .all(|g| self.lattice.action(g) == other.action(g))
    }
}

/// Tate H^0: fixed points modulo norms, M^G / N_G(M).
pub fn tate_h0(lattice: &GLattice) -> Result<Subquotient> {
    let r = lattice.rank();
    let group = lattice.group();
    let mut stacked = IntMatrix::zero(0, r);
    for g in group.elements() {
        if g == group.identity() {
            continue;
        }
        stacked = stacked.vstack(&lattice.action(g).sub(&IntMatrix::identity(r)));
    }
    if stacked.rows() == 0 {
        stacked = IntMatrix::zero(1, r);
    }
    subquotient(&stacked, &lattice.norm_matrix(&group.full_subgroup()))
}

/// Tate H^{-1}: the norm kernel modulo the augmentation submodule
/// generated by all (g - 1)m.
pub fn tate_h_minus1(lattice: &GLattice) -> Result<Subquotient> {
    let r = lattice.rank();
    let group = lattice.group();
    let norm = lattice.norm_matrix(&group.full_subgroup());
    let mut aug = IntMatrix::zero(r, 0);
    for g in group.elements() {
        if g == group.identity() {
            continue;
        }
        aug = aug.hstack(&lattice.action(g).sub(&IntMatrix::identity(r)));
    }
    if aug.cols() == 0 {
        aug = IntMatrix::zero(r, 1);
    }
    subquotient(&norm, &aug)
}

/// A homomorphism between two computed cohomology groups, as a matrix in
/// their canonical coordinates.
pub struct CohomMap {
    pub source: AbelianPresentation,
    pub target: AbelianPresentation,
    pub matrix: IntMatrix,
}

impl CohomMap {
    fn from_generator_images(
        source: &CohomologyGroup,
        target: &CohomologyGroup,
        images: Vec<Vec<BigInt>>,
    ) -> Result<CohomMap> {
        let mut cols = Vec::with_capacity(images.len());
        for img in &images {
            let coords = target.class_of(img).ok_or_else(|| {
                Error::Internal("image of a generator is not a cocycle".into())
            })?;
            cols.push(coords);
        }
        Ok(CohomMap {
            source: source.presentation.clone(),
            target: target.presentation.clone(),
            matrix: IntMatrix::from_columns(target.presentation.coord_len(), &cols),
        })
    }

    /// Kernel subgroup: its presentation and one column of source
    /// coordinates per kernel generator.
    pub fn kernel(&self) -> (AbelianPresentation, IntMatrix) {
        presented_kernel(&self.matrix, &self.source.relations(), &self.target.relations())
    }

    /// Order of the image subgroup; needs a finite target.
    pub fn image_order(&self) -> BigInt {
        crate::linalg::image_order(&self.matrix, &self.target)
    }

    pub fn is_zero(&self) -> bool {
        let (k, _) = self.kernel();
        k == self.source
    }

    pub fn is_isomorphism(&self) -> bool {
        let (k, _) = self.kernel();
        k.is_trivial() && cokernel_presentation(&self.matrix.hstack(&self.target.relations())).is_trivial()
    }

    /// other ∘ self, checking the middle presentations agree.
    pub fn then(&self, other: &CohomMap) -> Result<CohomMap> {
        if self.target != other.source {
            return Err(Error::DimensionMismatch(
                "composition through mismatched presentations".into(),
            ));
        }
        Ok(CohomMap {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: other.matrix.mul(&self.matrix),
        })
    }
}

/// Restriction H^i(G, M) -> H^i(H, M|_H). The target group must have been
/// computed from `source.lattice().restrict(sub)`.
pub fn restriction(
    source: &CohomologyGroup,
    sub: &Subgroup,
    target: &CohomologyGroup,
) -> Result<CohomMap> {
    if source.degree != target.degree {
        return Err(Error::DimensionMismatch("restriction between different degrees".into()));
    }
    if sub.parent() != source.lattice.group() {
        return Err(Error::NotASubgroup("subgroup of a different group".into()));
    }
    if !target.same_lattice(&source.lattice.restrict(sub)) {
        return Err(Error::InvalidAction(
            "target is not the restricted lattice's cohomology".into(),
        ));
    }
    let i = source.degree;
    let r = source.lattice.rank();
    let n = source.lattice.group().order();
    let h = sub.order();
    let embed = sub.elements();
    let mut images = Vec::with_capacity(source.generators.len());
    for f in &source.generators {
        let mut out = vec![BigInt::zero(); h.pow(i as u32) * r];
        for t in 0..h.pow(i as u32) {
            let tuple = tuple_unrank(t, h, i);
            let g_tuple: Vec<u16> = tuple.iter().map(|&x| embed[x as usize]).collect();
            let src = tuple_rank(&g_tuple, n) * r;
            out[t * r..(t + 1) * r].clone_from_slice(&f[src..src + r]);
        }
        images.push(out);
    }
    CohomMap::from_generator_images(source, target, images)
}

/// Corestriction (transfer) H^i(H, M|_H) -> H^i(G, M) along a fixed
/// minimal-element transversal of the right cosets Hg. Composed with
/// restriction it multiplies by the index [G:H] on cohomology.
pub fn corestriction(
    source: &CohomologyGroup,
    sub: &Subgroup,
    target: &CohomologyGroup,
) -> Result<CohomMap> {
    if source.degree != target.degree {
        return Err(Error::DimensionMismatch("corestriction between different degrees".into()));
    }
    if sub.parent() != target.lattice.group() {
        return Err(Error::NotASubgroup("subgroup of a different group".into()));
    }
    if !source.same_lattice(&target.lattice.restrict(sub)) {
        return Err(Error::InvalidAction(
            "source is not the restricted lattice's cohomology".into(),
        ));
    }
    let i = source.degree;
    let r = target.lattice.rank();
    let group = target.lattice.group();
    let n = group.order();
    let cosets = group.right_cosets(sub);
    // rep_of[g] is the minimal element of Hg; pi(g) = g * rep_of[g]^{-1}
    // lies in H and plays the projector role in the transfer sum.
    let mut rep_of = vec![0u16; n];
    for coset in &cosets {
        for &g in coset {
            rep_of[g as usize] = coset[0];
        }
    }
    let pi = |g: u16| group.mul(g, group.inv(rep_of[g as usize]));
    let mut images = Vec::with_capacity(source.generators.len());
    for f in &source.generators {
        let mut out = vec![BigInt::zero(); n.pow(i as u32) * r];
        for t in 0..n.pow(i as u32) {
            let tuple = tuple_unrank(t, n, i);
            for coset in &cosets {
                let w = coset[0];
                // h_j = pi(w x_j) along the path x_0 = e, x_j = x_{j-1} g_j
                let mut x = group.identity();
                let mut hs = Vec::with_capacity(i + 1);
                hs.push(pi(group.mul(w, x)));
                for &g in &tuple {
                    x = group.mul(x, g);
                    hs.push(pi(group.mul(w, x)));
                }
                let h_tuple: Vec<u16> = (0..i)
                    .map(|j| {
                        let step = group.mul(group.inv(hs[j]), hs[j + 1]);
                        sub.position_of(step).expect("transfer steps stay in the subgroup")
                            as u16
                    })
                    .collect();
                let src = tuple_rank(&h_tuple, sub.order()) * r;
                let act = group.mul(group.inv(w), hs[0]);
                let a = target.lattice.action(act);
                for row in 0..r {
                    for col in 0..r {
                        let v = &a[(row, col)];
                        if !v.is_zero() && !f[src + col].is_zero() {
                            out[t * r + row] += v * &f[src + col];
                        }
                    }
                }
            }
        }
        images.push(out);
    }
    CohomMap::from_generator_images(source, target, images)
}

/// Inflation H^i(G/N, M) -> H^i(G, M) along a quotient projection table,
/// for a lattice on which N acts trivially (so that the same matrices
/// serve both groups).
pub fn inflation(
    source: &CohomologyGroup,
    proj: &[u16],
    target: &CohomologyGroup,
) -> Result<CohomMap> {
    if source.degree != target.degree {
        return Err(Error::DimensionMismatch("inflation between different degrees".into()));
    }
    let g_n = target.lattice.group().order();
    let q_n = source.lattice.group().order();
    let r = target.lattice.rank();
    if proj.len() != g_n || source.lattice.rank() != r {
        return Err(Error::DimensionMismatch("projection table does not fit".into()));
    }
    for g in target.lattice.group().elements() {
        if proj[g as usize] as usize >= q_n {
            return Err(Error::InvalidAction("projection table escapes the quotient".into()));
        }
        if target.lattice.action(g) != source.lattice.action(proj[g as usize]) {
            return Err(Error::InvalidAction(
                "lattice action does not factor through the quotient".into(),
            ));
        }
    }
    let i = source.degree;
    let mut images = Vec::with_capacity(source.generators.len());
    for f in &source.generators {
        let mut out = vec![BigInt::zero(); g_n.pow(i as u32) * r];
        for t in 0..g_n.pow(i as u32) {
            let tuple = tuple_unrank(t, g_n, i);
            let q_tuple: Vec<u16> = tuple.iter().map(|&g| proj[g as usize]).collect();
            let src = tuple_rank(&q_tuple, q_n) * r;
            out[t * r..(t + 1) * r].clone_from_slice(&f[src..src + r]);
        }
        images.push(out);
    }
    CohomMap::from_generator_images(source, target, images)
}

/// Map H^i(G, M) -> H^i(G, N) induced by an equivariant lattice map,
/// applied to representing cocycles value by value.
pub fn induced(
    map: &LatticeMap,
    source: &CohomologyGroup,
    target: &CohomologyGroup,
) -> Result<CohomMap> {
    if source.degree != target.degree {
        return Err(Error::DimensionMismatch("induced map between different degrees".into()));
    }
    if !source.same_lattice(map.source()) || !target.same_lattice(map.target()) {
        return Err(Error::InvalidAction(
            "cohomology groups do not match the map's end lattices".into(),
        ));
    }
    let i = source.degree;
    let n = source.lattice.group().order();
    let r = source.lattice.rank();
    let s = target.lattice.rank();
    let mut images = Vec::with_capacity(source.generators.len());
    for f in &source.generators {
        let mut out = vec![BigInt::zero(); n.pow(i as u32) * s];
        for t in 0..n.pow(i as u32) {
            let img = map.matrix().mul_vec(&f[t * r..(t + 1) * r]);
            out[t * s..(t + 1) * s].clone_from_slice(&img);
        }
        images.push(out);
    }
    CohomMap::from_generator_images(source, target, images)
}

/// Connecting map H^i(G, C) -> H^{i+1}(G, A) of a short exact sequence
/// 0 -> A -> B -> C -> 0: lift a cocycle through the surjection, take its
/// coboundary in B, and pull the result back through the injection.
pub fn connecting(
    ses: &ShortExactSequence,
    source: &CohomologyGroup,
    target: &CohomologyGroup,
) -> Result<CohomMap> {
    if target.degree != source.degree + 1 {
        return Err(Error::DimensionMismatch(
            "connecting map must raise the degree by one".into(),
        ));
    }
    if !source.same_lattice(ses.quo()) || !target.same_lattice(ses.sub()) {
        return Err(Error::InvalidAction(
            "cohomology groups do not match the sequence's end lattices".into(),
        ));
    }
    let i = source.degree;
    let n = ses.mid().group().order();
    let a_rank = ses.sub().rank();
    let b_rank = ses.mid().rank();
    let surj_ext = smith_ext(ses.surj.matrix());
    let inj_ext = smith_ext(ses.inj.matrix());
    let mut images = Vec::with_capacity(source.generators.len());
    for f in &source.generators {
        let mut lifted = vec![BigInt::zero(); n.pow(i as u32) * b_rank];
        for t in 0..n.pow(i as u32) {
            let block = &f[t * ses.quo().rank()..(t + 1) * ses.quo().rank()];
            let sol = surj_ext
                .solve_vec(block)
                .ok_or_else(|| Error::Internal("surjection failed to lift a block".into()))?;
            lifted[t * b_rank..(t + 1) * b_rank].clone_from_slice(&sol);
        }
        let boundary = apply_coboundary(ses.mid(), i, &lifted);
        let mut pulled = vec![BigInt::zero(); n.pow((i + 1) as u32) * a_rank];
        for t in 0..n.pow((i + 1) as u32) {
            let block = &boundary[t * b_rank..(t + 1) * b_rank];
            let sol = inj_ext.solve_vec(block).ok_or_else(|| {
                Error::Internal("coboundary of a lift escaped the injected sublattice".into())
            })?;
            pulled[t * a_rank..(t + 1) * a_rank].clone_from_slice(&sol);
        }
        images.push(pulled);
    }
    CohomMap::from_generator_images(source, target, images)
}

/// Compares H^degree(G, Z[G/H]) with H^degree(H, Z): the two must agree
/// because the coset module is induced from the trivial module.
pub fn shapiro_check(
    group: &FiniteGroup,
    sub: &Subgroup,
    degree: usize,
    caps: &Caps,
) -> Result<bool> {
    let induced = GLattice::permutation(group.clone(), sub);
    let big = CochainComplex::new(&induced, caps)?.cohomology(degree)?;
    let (h_group, _) = sub.as_group();
    let small = CochainComplex::new(&GLattice::trivial(h_group, 1), caps)?.cohomology(degree)?;
    Ok(big.presentation == small.presentation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bi;
    use num_integer::Integer;
    use num_traits::Signed;

    fn h(lattice: &GLattice, degree: usize) -> AbelianPresentation {
        let caps = Caps::default().with_max_degree(degree.max(1));
        CochainComplex::new(lattice, &caps).unwrap().cohomology(degree).unwrap().presentation
    }

    #[test]
    fn trivial_module_over_cyclic_groups() {
        // For cyclic G and trivial coefficients: H^0 = Z, H^1 = Hom(G, Z)
        // = 0, H^2 = Z/|G| (classified by central extensions), H^3 = 0.
        for n in [2usize, 3, 4, 5] {
            let g = FiniteGroup::cyclic(n).unwrap();
            let z = GLattice::trivial(g, 1);
            assert_eq!(h(&z, 0), AbelianPresentation::free(1));
            assert_eq!(h(&z, 1), AbelianPresentation::trivial());
            assert_eq!(h(&z, 2), AbelianPresentation::cyclic(n as i64));
            assert_eq!(h(&z, 3), AbelianPresentation::trivial());
        }
    }

    #[test]
    fn regular_module_is_acyclic() {
        // Z[G] is induced from the trivial subgroup, so positive-degree
        // cohomology vanishes.
        for g in [
            FiniteGroup::cyclic(4).unwrap(),
            FiniteGroup::klein_four(),
        ] {
            let m = GLattice::regular(g);
            assert_eq!(h(&m, 0), AbelianPresentation::free(1));
            assert_eq!(h(&m, 1), AbelianPresentation::trivial());
            assert_eq!(h(&m, 2), AbelianPresentation::trivial());
        }
    }

    #[test]
    fn sign_module_over_c2() {
        // With the generator acting by -1: no invariants; the norm is zero
        // so the Tate groups have period 2 and equal Z/2 in odd degrees.
        let g = FiniteGroup::cyclic(2).unwrap();
        let sign = GLattice::new(
            "sign",
            g,
            vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])],
        )
        .unwrap();
        assert_eq!(h(&sign, 0), AbelianPresentation::trivial());
        assert_eq!(h(&sign, 1), AbelianPresentation::cyclic(2));
        assert_eq!(h(&sign, 2), AbelianPresentation::trivial());
        assert_eq!(h(&sign, 3), AbelianPresentation::cyclic(2));
    }

    #[test]
    fn klein_four_trivial_module_has_z2_in_degree_3() {
        // H^1(V4, Z) = 0, H^2(V4, Z) = Hom(V4, Q/Z) = (Z/2)^2, and
        // H^3(V4, Z) = Z/2, the class responsible for everything this
        // crate cares about downstream.
        let z = GLattice::trivial(FiniteGroup::klein_four(), 1);
        assert_eq!(h(&z, 1), AbelianPresentation::trivial());
        assert_eq!(
            h(&z, 2),
            AbelianPresentation { free_rank: 0, invariant_factors: vec![bi(2), bi(2)] }
        );
        assert_eq!(h(&z, 3), AbelianPresentation::cyclic(2));
    }

    #[test]
    fn generators_read_back_as_unit_coordinates() {
        let z = GLattice::trivial(FiniteGroup::klein_four(), 1);
        let cx = CochainComplex::new(&z, &Caps::default()).unwrap();
        for degree in [0usize, 2, 3] {
            let hh = cx.cohomology(degree).unwrap();
            for (j, gen) in hh.generators().iter().enumerate() {
                let coords = hh.class_of(gen).expect("generators are cocycles");
                for (k, c) in coords.iter().enumerate() {
                    assert_eq!(*c, if k == j { bi(1) } else { bi(0) });
                }
            }
        }
    }

    #[test]
    fn class_of_rejects_non_cocycles() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let z = GLattice::trivial(g, 1);
        let cx = CochainComplex::new(&z, &Caps::default()).unwrap();
        let h1 = cx.cohomology(1).unwrap();
        // f(e) = 1, f(g) = 0 is not a cocycle for trivial coefficients:
        // (df)(g, g) = f(g) - f(e) + f(g) = -1
        assert_eq!(h1.class_of(&[bi(1), bi(0)]), None);
        // cocycles for the trivial action in degree 1 are homomorphisms,
        // which must kill the identity and satisfy 2 f(g) = f(g^2) = 0
        assert!(h1.class_of(&[bi(0), bi(0)]).is_some());
    }

    #[test]
    fn degree_and_cap_errors() {
        let z = GLattice::trivial(FiniteGroup::cyclic(2).unwrap(), 1);
        let cx = CochainComplex::new(&z, &Caps::default()).unwrap();
        assert!(matches!(cx.cohomology(9), Err(Error::DegreeOutOfRange { degree: 9, .. })));
        let tight = Caps::default().with_size_cap(3);
        assert!(matches!(
            CochainComplex::new(&z, &tight),
            Err(Error::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn tate_groups_of_small_modules() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let z = GLattice::trivial(c2.clone(), 1);
        assert_eq!(tate_h0(&z).unwrap().presentation, AbelianPresentation::cyclic(2));
        assert_eq!(tate_h_minus1(&z).unwrap().presentation, AbelianPresentation::trivial());
        let sign = GLattice::new(
            "sign",
            c2,
            vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])],
        )
        .unwrap();
        assert_eq!(tate_h0(&sign).unwrap().presentation, AbelianPresentation::trivial());
        assert_eq!(tate_h_minus1(&sign).unwrap().presentation, AbelianPresentation::cyclic(2));
        // regular module: both Tate groups vanish
        let reg = GLattice::regular(FiniteGroup::cyclic(3).unwrap());
        assert!(tate_h0(&reg).unwrap().presentation.is_trivial());
        assert!(tate_h_minus1(&reg).unwrap().presentation.is_trivial());
    }

    #[test]
    fn restriction_from_c4_to_c2() {
        // H^2(C4, Z) = Z/4 restricts onto H^2(C2, Z) = Z/2 (both are Tate
        // H^0 of the trivial module, where restriction is the natural
        // projection Z/4 -> Z/2).
        let g = FiniteGroup::cyclic(4).unwrap();
        let z = GLattice::trivial(g.clone(), 1);
        let sub = g.subgroup_from_elements(&[0, 2]).unwrap();
        let caps = Caps::default();
        let big = CochainComplex::new(&z, &caps).unwrap().cohomology(2).unwrap();
        let small =
            CochainComplex::new(&z.restrict(&sub), &caps).unwrap().cohomology(2).unwrap();
        let res = restriction(&big, &sub, &small).unwrap();
        assert_eq!(res.image_order(), bi(2));
        let (ker, _) = res.kernel();
        assert_eq!(ker, AbelianPresentation::cyclic(2));
    }

    #[test]
    fn corestriction_after_restriction_multiplies_by_index() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let z = GLattice::trivial(g.clone(), 1);
        let sub = g.subgroup_from_elements(&[0, 2]).unwrap();
        let caps = Caps::default();
        let big = CochainComplex::new(&z, &caps).unwrap().cohomology(2).unwrap();
        let small =
            CochainComplex::new(&z.restrict(&sub), &caps).unwrap().cohomology(2).unwrap();
        let res = restriction(&big, &sub, &small).unwrap();
        let cor = corestriction(&small, &sub, &big).unwrap();
        let round = res.then(&cor).unwrap();
        // multiplication by [G:H] = 2 on Z/4
        assert_eq!(round.matrix.rows(), 1);
        assert_eq!(round.matrix[(0, 0)].mod_floor(&bi(4)), bi(2));
        assert_eq!(round.image_order(), bi(2));
    }

    #[test]
    fn corestriction_on_h0_is_the_transversal_norm() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let m = GLattice::regular(g.clone());
        let sub = g.trivial_subgroup();
        let caps = Caps::default();
        let big = CochainComplex::new(&m, &caps).unwrap().cohomology(0).unwrap();
        let small =
            CochainComplex::new(&m.restrict(&sub), &caps).unwrap().cohomology(0).unwrap();
        let cor = corestriction(&small, &sub, &big).unwrap();
        // H^0 over the trivial subgroup is all of Z[G] = Z^2; over G it is
        // the norm line. The transfer sums over both cosets, so each basis
        // vector maps to the norm generator.
        assert_eq!(cor.source, AbelianPresentation::free(2));
        assert_eq!(cor.target, AbelianPresentation::free(1));
        for j in 0..2 {
            assert_eq!(cor.matrix[(0, j)].abs(), bi(1));
        }
    }

    #[test]
    fn inflation_from_c2_quotient_of_c4() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let n = g.subgroup_from_elements(&[0, 2]).unwrap();
        let (q, proj) = g.quotient_group(&n).unwrap();
        let caps = Caps::default();
        let z_g = GLattice::trivial(g, 1);
        let z_q = GLattice::trivial(q, 1);
        let up = CochainComplex::new(&z_q, &caps).unwrap().cohomology(2).unwrap();
        let down = CochainComplex::new(&z_g, &caps).unwrap().cohomology(2).unwrap();
        let inf = inflation(&up, &proj, &down).unwrap();
        // H^1(N, Z) = 0, so inflation is injective in degree 2: the image
        // of Z/2 inside Z/4 has order 2.
        assert_eq!(inf.image_order(), bi(2));
        let (ker, _) = inf.kernel();
        assert!(ker.is_trivial());
    }

    #[test]
    fn connecting_map_of_the_augmentation_sequence() {
        // 0 -> sign -> Z[C2] -> Z -> 0. The long exact sequence reads
        // Z --x2--> Z -> H^1(sign) -> H^1(Z[C2]) = 0, so the connecting
        // map H^0(Z) -> H^1(sign) = Z/2 is onto with kernel 2Z.
        let g = FiniteGroup::cyclic(2).unwrap();
        let m = GLattice::regular(g.clone());
        let z = GLattice::trivial(g.clone(), 1);
        let sign = GLattice::new(
            "sign",
            g,
            vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])],
        )
        .unwrap();
        let inj =
            crate::lattice::LatticeMap::new(&sign, &m, IntMatrix::from_rows(&[vec![1], vec![-1]]))
                .unwrap();
        let surj =
            crate::lattice::LatticeMap::new(&m, &z, IntMatrix::from_rows(&[vec![1, 1]])).unwrap();
        let ses = ShortExactSequence::new(inj, surj).unwrap();
        let caps = Caps::default();
        let src = CochainComplex::new(&z, &caps).unwrap().cohomology(0).unwrap();
        let tgt = CochainComplex::new(&sign, &caps).unwrap().cohomology(1).unwrap();
        let delta = connecting(&ses, &src, &tgt).unwrap();
        assert_eq!(delta.image_order(), bi(2));
        let (ker, _) = delta.kernel();
        assert_eq!(ker, AbelianPresentation::free(1));
    }

    #[test]
    fn shapiro_agreement() {
        let caps = Caps::default();
        let c6 = FiniteGroup::cyclic(6).unwrap();
        let c2_in_c6 = c6.subgroup_from_elements(&[0, 3]).unwrap();
        for degree in 0..=3 {
            assert!(shapiro_check(&c6, &c2_in_c6, degree, &caps).unwrap());
        }
        let v4 = FiniteGroup::klein_four();
        let sub = v4.subgroup_from_elements(&[0, 1]).unwrap();
        for degree in 0..=3 {
            assert!(shapiro_check(&v4, &sub, degree, &caps).unwrap());
        }
    }
}
