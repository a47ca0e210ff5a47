//! Exact enumeration and statistics for Weil `q`-polynomials.
//!
//! A Weil polynomial of genus `g` over `F_q` is determined by its
//! coefficient vector `(a_1, ..., a_g)`:
//!
//! ```text
//! P(T) = T^(2g) + a_1 T^(2g-1) + ... + a_g T^g + ... + a_1 q^(g-1) T + q^g
//! ```
//!
//! and it is a genuine Weil polynomial exactly when the real polynomial `h`
//! with `P(T) = T^g h(T + q/T)` has all of its roots in
//! `[-2 sqrt(q), 2 sqrt(q)]`. This crate decides that condition exactly,
//! enumerates all such vectors, counts them by residue class modulo a prime
//! `ell`, and estimates the volume of the normalized region by Monte Carlo.
//!
//! ```
//! use weil_core::{run_census, PrimePower};
//!
//! let q = PrimePower::new(5, 1).unwrap();
//! let c = run_census(1, &q, 3).unwrap();
//! assert_eq!((c.total, c.ordinary, c.congruence_total), (9, 8, 3));
//! ```

pub mod census;
pub mod error;
mod kernel;
pub mod lattice;
pub mod numeric;
pub mod poly;
pub mod real_rooted;
pub mod volume;
pub mod weil;

pub use census::{
    bound_report, count_residue_class, point_count_congruence, run_census, run_census_with, sweep,
    BoundReport, CensusCounts, ClassCount, ResidueClass, SweepRow,
};
pub use error::{Result, WeilError};
pub use lattice::{
    coefficient_box, enumerate_members, in_lambda_double_prime, is_ordinary, prune_interval,
    CoefficientBox, EnumerationOptions, Enumerator, Feasibility, LatticeKind, LatticeSpec,
    ENUMERATION_ORDER_VERSION,
};
pub use numeric::{numeric_is_member, numeric_roots, NumericVerdict, RootApproximation};
pub use poly::IntPolynomial;
pub use real_rooted::{
    count_real_roots_in_closed_interval, is_member, is_squarefree, squarefree_part, MemberTester,
    RealWeilPoly, SturmChain, SurdValue,
};
pub use volume::{
    estimate_volume, estimate_volume_with, is_in_vg, NormalizedPoint, VolumeEstimate, VolumeOptions,
};
pub use weil::{
    chebyshev_like, eval_p, make_prime_power, p_at_one_mod, residue_vector, to_real_weil,
    weil_polynomial, PrimePower, WeilCoefficients,
};
