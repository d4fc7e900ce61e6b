//! Exact-arithmetic workbench for Galois-module computations on algebraic tori.
//!
//! Everything here happens over ℤ, exactly: finite groups given by
//! multiplication tables act on free ℤ-modules (lattices), and the crate
//! computes group cohomology of those lattices, Tate cohomology in degrees
//! -1 and 0, flasque resolutions of torus character modules, and
//! Tate-Shafarevich-style kernels cut out by families of decomposition
//! subgroups.
//!
//! The primary interface is the `examples/` directory; each example is a
//! self-contained tour of one capability:
//!
//! ```text
//! cargo run --example smith_normal_form      exact linear algebra over ℤ
//! cargo run --example subgroup_lattice       finite groups, subgroups, cosets
//! cargo run --example cohomology_klein_four  bar-resolution cohomology H^i(G, M)
//! cargo run --example tate_and_flasque       Tate cohomology, flasque/coflasque tests
//! cargo run --example flasque_resolution     resolutions 0 -> Q^ -> R^ -> S^ -> 0
//! cargo run --example sha_kernels            local-global kernels and coverage audits
//! cargo run --example norm_one_biquadratic   the built-in biquadratic scenario end to end
//! ```
//!
//! A thin CLI (`cargo run -- scenario paper-biquadratic`) runs scenario files
//! and prints deterministic reports; see the README for the file grammar.
//!
//! Module map:
//!
//! * [`linalg`]: integer matrices, Smith normal form, kernels, cokernels,
//!   subquotient presentations with lift data.
//! * [`group`]: finite groups by Cayley table, subgroup enumeration, cosets.
//! * [`lattice`]: G-lattices, equivariant maps, certified short exact
//!   sequences, permutation and dual lattices.
//! * [`cohomology`]: the bar complex, H^i and Tate cohomology, restriction,
//!   corestriction, inflation, connecting maps, Shapiro checks.
//! * [`tori`]: tori as character lattices, norm-one and multinorm
//!   constructors, flasque resolutions, the resolution invariant H^1(G, S^).
//! * [`sha`]: place families as decomposition subgroups, Sha kernels with
//!   verified witnesses, Chebotarev coverage, exact-sequence transfer.
//! * [`scenario`]: scenario file parsing, execution, deterministic reports.

pub mod cohomology;
pub mod group;
pub mod lattice;
pub mod linalg;
pub mod scenario;
pub mod sha;
pub mod tori;

use thiserror::Error;

/// Size limits threaded through every cohomology computation.
///
/// `max_degree` bounds the cohomological degree; `size_cap` bounds
/// `|G|^(i+1) * rank(M)`, the number of rows of the largest coboundary
/// matrix a degree-`i` computation may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_degree: usize,
    pub size_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_degree: 3, size_cap: 1 << 20 }
    }
}

impl Caps {
    pub fn with_max_degree(self, max_degree: usize) -> Self {
        Caps { max_degree, ..self }
    }

    pub fn with_size_cap(self, size_cap: u64) -> Self {
        Caps { size_cap, ..self }
    }
}

/// One error type for the whole crate; the CLI maps `Parse` to exit code 2
/// and everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a group table: {0}")]
    NotAGroup(String),
    #[error("group order {order} exceeds cap {cap}")]
    GroupCapExceeded { order: usize, cap: usize },
    #[error("{0} is not a subgroup")]
    NotASubgroup(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("map is not equivariant")]
    NotEquivariant,
    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),
    #[error("sublattice is not saturated (quotient would have torsion)")]
    NotSaturated,
    #[error("sublattice is not stable under the group action")]
    NotStable,
    #[error("columns do not form a basis of a sublattice")]
    NotABasis,
    #[error("not exact: {0}")]
    NotExact(String),
    #[error("B*A != 0: not a complex")]
    BrokenComplex,
    #[error("degree {degree} exceeds the configured maximum {max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error(
        "size cap exceeded: degree {degree} needs a {rows} x {cols} coboundary matrix \
         ({needed} rows > cap {cap}); raise the size cap to proceed"
    )]
    SizeCapExceeded { degree: usize, rows: u128, cols: u128, needed: u128, cap: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("directive {index} ({text}): {source}")]
    Directive { index: usize, text: String, source: Box<Error> },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
