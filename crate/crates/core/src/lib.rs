//! Exact symbolic tangent-category engine over polynomial maps.
//!
//! The crate models the tangent structure of Cartesian spaces `ℝⁿ` with
//! polynomial maps and exact rational coefficients, and uses it to build and
//! verify differential bundles, Whitney sums, partial bundles and connections.
//! Every check is an exact identity between composites of polynomial maps,
//! decided by comparing canonical forms.
//!
//! Composition is diagrammatic: `f.then(&g)` runs `f` first.
//!
//! ```
//! use tangentcat::{check_tangent_axioms, Space};
//!
//! let report = check_tangent_axioms(&Space::euclidean(2));
//! assert!(report.passed());
//! ```

pub mod cone;
pub mod connection;
pub mod dbundle;
mod error;
pub mod json;
pub mod polycore;
pub mod report;
pub mod tangent;
pub mod whitney;

pub use cone::SelectionCone;
pub use connection::{
    canonical_connection, check_connection, check_effective, check_horizontal, check_pair,
    check_vertical, christoffel_connection, decompose_point, derive_horizontal,
    derive_horizontal_from, equivalence_legs, equivalence_suite, recompose_point, total_bundle,
    ChristoffelTable, Connection, Decomposition,
};
pub use dbundle::{
    is_linear_morphism, mu_map, pullback_bundle, tangent_bundle, tangent_of_bundle, trivial_bundle,
    verify_bundle, BundleMorphism, DiffBundle,
};
pub use error::{Error, Result};
pub use polycore::{compose, map_equal, Monomial, PolyMap, Polynomial, Rational};
pub use report::{Overall, Record, Report, Verdict};
pub use tangent::{check_tangent_axioms, t_map, t_obj, Space};
pub use whitney::{biproduct, hom_add, hom_zero, partial_add, partial_bundle, BiproductBundle};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/tangent.md")]
    mod tangent {}
    #[doc = include_str!("../../../book/src/bundles.md")]
    mod bundles {}
    #[doc = include_str!("../../../book/src/whitney.md")]
    mod whitney {}
    #[doc = include_str!("../../../book/src/connections.md")]
    mod connections {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
