//! Exact linear algebra over the integers.
//!
//! The engine under every cohomology computation in this crate: dense
//! matrices with arbitrary-precision entries, Smith normal form with
//! recorded (and inverted) transformations, saturated kernel bases,
//! cokernel presentations, and subquotient presentations ker(B)/im(A)
//! with lift data. No floating point, no modular shortcuts; fixed-width
//! arithmetic is deliberately avoided because intermediate entries in
//! normal-form reductions grow past machine words.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub(crate) mod sparse;

/// Shorthand used throughout the crate for building integer constants.
pub fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Dense matrix over ℤ, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zero(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = bi(*e);
        }
        m
    }

    /// Builds a matrix from rows of machine integers; rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = bi(*e);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = IntMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() }
                })
            })
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if !a.is_zero() && !v[k].is_zero() {
                    out[i] += a * &v[k];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * c)
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        IntMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols { self[(i, j)].clone() } else { other[(i, j - self.cols)].clone() }
        })
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "vstack col mismatch");
        IntMatrix::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows { self[(i, j)].clone() } else { other[(i - self.rows, j)].clone() }
        })
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self, indices: &[usize]) -> IntMatrix {
        IntMatrix::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])].clone())
    }

    pub fn row_slice(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> IntMatrix {
        IntMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<usize> = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].to_string().len()).max().unwrap_or(1))
            .collect();
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", self[(i, j)].to_string(), width = widths[j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// U * A * V = S with U, V unimodular and S diagonal, d1 | d2 | ... >= 0.
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

/// Smith data with the inverse transformations kept alongside; everything
/// downstream (kernels, solving, lift data) reads off this.
pub(crate) struct SmithExt {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub s: IntMatrix,
    pub rank: usize,
}

impl SmithExt {
    pub fn diag(&self, i: usize) -> &BigInt {
        &self.s[(i, i)]
    }

    /// Solves A x = b for one column, exactly over ℤ. `None` when no
    /// integer solution exists.
    pub fn solve_vec(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let m = self.u.rows();
        let n = self.v.rows();
        assert_eq!(b.len(), m);
        let y = self.u.mul_vec(b);
        let mut x_hat = vec![BigInt::zero(); n];
        for (i, yi) in y.iter().enumerate() {
            if i < self.rank.min(n) {
                let d = self.diag(i);
                let (q, r) = yi.div_rem(d);
                if !r.is_zero() {
                    return None;
                }
                x_hat[i] = q;
            } else if !yi.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&x_hat))
    }
}

/// Division with remainder of minimal absolute value: a = q*b + r, |r| <= |b|/2.
fn nearest_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (mut q, r) = a.div_mod_floor(b);
    // div_mod_floor leaves r with the sign of b; stepping q up flips the
    // remainder to the other side when that side is closer to zero.
    if r.abs() * bi(2) > b.abs() {
        q += 1;
    }
    q
}

pub(crate) fn smith_ext(a: &IntMatrix) -> SmithExt {
    let m = a.rows();
    let n = a.cols();
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    macro_rules! row_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            let (dst, src, c) = ($dst, $src, $c);
            for j in 0..n {
                let t = &s[(src, j)] * &c;
                s[(dst, j)] += t;
            }
            for j in 0..m {
                let t = &u[(src, j)] * &c;
                u[(dst, j)] += t;
                let t = &u_inv[(j, dst)] * &c;
                u_inv[(j, src)] -= t;
            }
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            let (dst, src, c) = ($dst, $src, $c);
            for i in 0..m {
                let t = &s[(i, src)] * &c;
                s[(i, dst)] += t;
            }
            for i in 0..n {
                let t = &v[(i, src)] * &c;
                v[(i, dst)] += t;
                let t = &v_inv[(dst, i)] * &c;
                v_inv[(src, i)] -= t;
            }
        }};
    }
    macro_rules! swap_rows {
        ($i:expr, $k:expr) => {{
            let (i, k) = ($i, $k);
            if i != k {
                for j in 0..n {
                    s.data.swap(i * n + j, k * n + j);
                }
                for j in 0..m {
                    u.data.swap(i * m + j, k * m + j);
                    u_inv.data.swap(j * m + i, j * m + k);
                }
            }
        }};
    }
    macro_rules! swap_cols {
        ($j:expr, $k:expr) => {{
            let (j, k) = ($j, $k);
            if j != k {
                for i in 0..m {
                    s.data.swap(i * n + j, i * n + k);
                }
                for i in 0..n {
                    v.data.swap(i * n + j, i * n + k);
                    v_inv.data.swap(j * n + i, k * n + i);
                }
            }
        }};
    }

    let mut t = 0;
    while t < m.min(n) {
        // Minimal-absolute-value pivot in the active submatrix keeps entry
        // growth down.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !s[(i, j)].is_zero()
                    && pivot.is_none_or(|(pi, pj)| s[(i, j)].abs() < s[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        swap_rows!(t, pi);
        swap_cols!(t, pj);

        'reduce: loop {
            for i in t + 1..m {
                if !s[(i, t)].is_zero() {
                    let q = nearest_div(&s[(i, t)], &s[(t, t)]);
                    if !q.is_zero() {
                        row_add!(i, t, -q);
                    }
                    if !s[(i, t)].is_zero() {
                        // Remainder is strictly smaller than the pivot:
                        // promote it and start over.
                        swap_rows!(t, i);
                        continue 'reduce;
                    }
                }
            }
            for j in t + 1..n {
                if !s[(t, j)].is_zero() {
                    let q = nearest_div(&s[(t, j)], &s[(t, t)]);
                    if !q.is_zero() {
                        col_add!(j, t, -q);
                    }
                    if !s[(t, j)].is_zero() {
                        swap_cols!(t, j);
                        continue 'reduce;
                    }
                }
            }
            // Pivot row and column are clear; enforce that the pivot divides
            // the rest of the submatrix so the diagonal comes out in chain order.
            let mut offender = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    row_add!(t, i, BigInt::one());
                    continue 'reduce;
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            for j in 0..n {
                let e = -s[(t, j)].clone();
                s[(t, j)] = e;
            }
            for j in 0..m {
                let e = -u[(t, j)].clone();
                u[(t, j)] = e;
                let e = -u_inv[(j, t)].clone();
                u_inv[(j, t)] = e;
            }
        }
        t += 1;
    }

    let rank = (0..m.min(n)).take_while(|&i| !s[(i, i)].is_zero()).count();
    SmithExt { u, u_inv, v, v_inv, s, rank }
}

/// Smith normal form with verified recomposition U * A * V = S.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let ext = smith_ext(a);
    let recomposed = ext.u.mul(a).mul(&ext.v);
    assert_eq!(recomposed, ext.s, "Smith recomposition failed");
    debug_assert!(ext.u.mul(&ext.u_inv).is_identity());
    debug_assert!(ext.v.mul(&ext.v_inv).is_identity());
    SmithDecomposition { u: ext.u, s: ext.s, v: ext.v }
}

/// Basis of {x : A x = 0} as matrix columns. The basis is saturated:
/// ℤ^cols / kernel is torsion-free, because the kernel is spanned by
/// columns of a unimodular matrix.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let ext = smith_ext(a);
    let free: Vec<usize> = (ext.rank..a.cols()).collect();
    ext.v.columns(&free)
}

/// Solves A X = B column by column; `None` when some column has no
/// integer solution.
pub fn solve(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows(), b.rows(), "solve dimension mismatch");
    let ext = smith_ext(a);
    let mut cols = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        cols.push(ext.solve_vec(&b.column(j))?);
    }
    Some(IntMatrix::from_columns(a.cols(), &cols))
}

/// Finitely generated abelian group in invariant-factor form.
///
/// Canonical coordinates for elements are `factors.len() + free_rank`
/// integers: first one coordinate per invariant factor (read mod that
/// factor), then the free coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianPresentation {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl AbelianPresentation {
    pub fn trivial() -> Self {
        AbelianPresentation { free_rank: 0, invariant_factors: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        AbelianPresentation { free_rank: rank, invariant_factors: vec![] }
    }

    pub fn cyclic(n: i64) -> Self {
        if n == 1 {
            Self::trivial()
        } else {
            AbelianPresentation { free_rank: 0, invariant_factors: vec![bi(n)] }
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// `None` means infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.invariant_factors.iter().product())
        }
    }

    pub fn coord_len(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    /// Columns d_j * e_j presenting the torsion relations inside ℤ^coord_len.
    pub fn relations(&self) -> IntMatrix {
        let k = self.coord_len();
        let t = self.invariant_factors.len();
        let mut rel = IntMatrix::zero(k, t);
        for (j, d) in self.invariant_factors.iter().enumerate() {
            rel[(j, j)] = d.clone();
        }
        rel
    }

    /// Reduces a coordinate vector into the canonical range: torsion
    /// coordinates into [0, d), free coordinates untouched.
    pub fn reduce(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.coord_len());
        let mut out = coords.to_vec();
        for (j, d) in self.invariant_factors.iter().enumerate() {
            out[j] = out[j].mod_floor(d);
        }
        out
    }

    /// Canonical display form, e.g. "Z^2 x Z/2 x Z/4" or "0".
    pub fn text(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" x ")
        }
    }

    /// Machine form `rank:r;factors:d1,d2,...`.
    pub fn machine(&self) -> String {
        let factors: Vec<String> = self.invariant_factors.iter().map(|d| d.to_string()).collect();
        format!("rank:{};factors:{}", self.free_rank, factors.join(","))
    }

    pub fn from_machine(text: &str) -> Option<Self> {
        let (rank_part, factor_part) = text.split_once(';')?;
        let rank = rank_part.strip_prefix("rank:")?.parse::<usize>().ok()?;
        let factor_body = factor_part.strip_prefix("factors:")?;
        let mut factors = Vec::new();
        if !factor_body.is_empty() {
            for f in factor_body.split(',') {
                factors.push(f.parse::<BigInt>().ok()?);
            }
        }
        Some(AbelianPresentation { free_rank: rank, invariant_factors: factors })
    }
}

impl fmt::Display for AbelianPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}

fn presentation_from_diag(rows: usize, ext: &SmithExt) -> AbelianPresentation {
    let factors: Vec<BigInt> =
        (0..ext.rank).map(|i| ext.diag(i).clone()).filter(|d| !d.is_one()).collect();
    AbelianPresentation { free_rank: rows - ext.rank, invariant_factors: factors }
}

/// Presents ℤ^rows / column-span(A).
pub fn cokernel_presentation(a: &IntMatrix) -> AbelianPresentation {
    presentation_from_diag(a.rows(), &smith_ext(a))
}

/// ker(B)/im(A) with generators and coordinate lift data.
pub struct Subquotient {
    pub presentation: AbelianPresentation,
    /// Ambient representatives (columns, in ℤ^n where B is m x n): torsion
    /// generators first, in factor order, then free generators.
    pub generators: IntMatrix,
    kernel: IntMatrix,
    kernel_ext: SmithExt,
    x_ext: SmithExt,
    torsion_slots: Vec<usize>,
    free_slots: Vec<usize>,
}

impl Subquotient {
    /// Coordinates of an element of ker(B) in the presentation; `None` when
    /// the vector is not in the kernel lattice.
    pub fn class_of(&self, z: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.kernel_ext.solve_vec(z)?;
        let y = self.x_ext.u.mul_vec(&c);
        let mut coords = Vec::with_capacity(self.presentation.coord_len());
        for (&slot, d) in self.torsion_slots.iter().zip(&self.presentation.invariant_factors) {
            coords.push(y[slot].mod_floor(d));
        }
        for &slot in &self.free_slots {
            coords.push(y[slot].clone());
        }
        Some(coords)
    }

    pub fn kernel(&self) -> &IntMatrix {
        &self.kernel
    }
}

/// Homology of ℤ^a --A--> ℤ^n --B--> ℤ^m at the middle: requires B·A = 0.
pub fn subquotient(b: &IntMatrix, a: &IntMatrix) -> Result<Subquotient> {
    if a.rows() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "subquotient: B is {}x{} but A is {}x{}",
            b.rows(),
            b.cols(),
            a.rows(),
            a.cols()
        )));
    }
    if !b.mul(a).is_zero() {
        return Err(Error::BrokenComplex);
    }
    let kernel = kernel_basis(b);
    let kernel_ext = smith_ext(&kernel);
    // Columns of A lie in the kernel lattice and the kernel basis is
    // saturated, so the integer solve cannot fail.
    let mut x_cols = Vec::with_capacity(a.cols());
    for j in 0..a.cols() {
        let col = kernel_ext
            .solve_vec(&a.column(j))
            .ok_or_else(|| Error::Internal("image escapes the kernel lattice".into()))?;
        x_cols.push(col);
    }
    let x = IntMatrix::from_columns(kernel.cols(), &x_cols);
    let x_ext = smith_ext(&x);
    let presentation = presentation_from_diag(kernel.cols(), &x_ext);

    let mut torsion_slots = Vec::new();
    for i in 0..x_ext.rank {
        if !x_ext.diag(i).is_one() {
            torsion_slots.push(i);
        }
    }
    let free_slots: Vec<usize> = (x_ext.rank..kernel.cols()).collect();

    let mut gen_cols = Vec::new();
    for &slot in torsion_slots.iter().chain(&free_slots) {
        // Generator of the coker slot: kernel-basis image of U^-1 e_slot.
        let coeffs = x_ext.u_inv.column(slot);
        gen_cols.push(kernel.mul_vec(&coeffs));
    }
    let generators = IntMatrix::from_columns(b.cols(), &gen_cols);

    Ok(Subquotient {
        presentation,
        generators,
        kernel,
        kernel_ext,
        x_ext,
        torsion_slots,
        free_slots,
    })
}

/// Saturation of the column span: the smallest direct summand of ℤ^rows
/// containing it, returned as a basis.
pub fn saturate(a: &IntMatrix) -> IntMatrix {
    let ext = smith_ext(a);
    let lead: Vec<usize> = (0..ext.rank).collect();
    ext.u_inv.columns(&lead)
}

/// True when the columns are independent and span a saturated sublattice
/// (equivalently, all Smith invariant factors are 1).
pub fn is_saturated_basis(a: &IntMatrix) -> bool {
    let ext = smith_ext(a);
    ext.rank == a.cols() && (0..ext.rank).all(|i| ext.diag(i).is_one())
}

/// Kernel of a map between presented abelian groups, as a presented
/// subgroup of the source.
///
/// `f` has one column per source canonical generator, written in target
/// canonical coordinates; `source_rel` and `target_rel` are the relation
/// matrices. Returns the kernel presentation together with one column per
/// kernel generator, in source coordinates.
pub fn presented_kernel(
    f: &IntMatrix,
    source_rel: &IntMatrix,
    target_rel: &IntMatrix,
) -> (AbelianPresentation, IntMatrix) {
    let s_k = f.cols();
    // x with f x = 0 mod target relations: project ker [f | target_rel].
    let stacked = f.hstack(target_rel);
    let big_kernel = kernel_basis(&stacked);
    let x = IntMatrix::from_fn(s_k, big_kernel.cols(), |i, j| big_kernel[(i, j)].clone());
    // Generators of the kernel subgroup are the columns of x together with
    // the source relations; present the subgroup they generate.
    let gens = x.hstack(source_rel);
    let rel_kernel = kernel_basis(&gens.hstack(source_rel));
    let q = gens.cols();
    let w = IntMatrix::from_fn(q, rel_kernel.cols(), |i, j| rel_kernel[(i, j)].clone());
    let w_ext = smith_ext(&w);
    let presentation = presentation_from_diag(q, &w_ext);
    let mut slots = Vec::new();
    for i in 0..w_ext.rank {
        if !w_ext.diag(i).is_one() {
            slots.push(i);
        }
    }
    slots.extend(w_ext.rank..q);
    let mut out_cols = Vec::new();
    for &slot in &slots {
        let coeffs = w_ext.u_inv.column(slot);
        out_cols.push(gens.mul_vec(&coeffs));
    }
    (presentation, IntMatrix::from_columns(f.cols(), &out_cols))
}

/// Order of the subgroup of the (finite) presented target generated by the
/// columns of `f`.
pub fn image_order(f: &IntMatrix, target: &AbelianPresentation) -> BigInt {
    assert_eq!(target.free_rank, 0, "image_order needs a finite target");
    assert_eq!(f.rows(), target.coord_len());
    let with_rel = f.hstack(&target.relations());
    let coker = cokernel_presentation(&with_rel);
    let total = target.order().expect("finite");
    let residual = coker.order().expect("finite since relations are included");
    total / residual
}
