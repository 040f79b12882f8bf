//! Exact equivariant localization toolkit for toric and spherical varieties.
//!
//! Everything is computed symbolically over the representation ring
//! `R(T) = Z[e^{±u_1}, …, e^{±u_n}]` of a split torus, its localization at the
//! multiplicative set generated by `1 − e^{−λ}`, and the completed Chow ring
//! modeled as truncated rational power series.  No floating point anywhere.
//!
//! The main pieces:
//!
//! - [`ring`]: sparse Laurent polynomials with `BigInt` coefficients, exact
//!   division by `1 − e^{−λ}`, localized classes, Adams operations `ψ^j`,
//!   Bott elements `θ^j`, the top exterior class `λ_{−1}`, and character
//!   restriction along lattice maps.
//! - [`series`]: truncated multivariate power series over `BigRational`, the
//!   Chern character, and Todd-type expansions.
//! - [`fan`]: rational polyhedral fans — validation, faces, walls,
//!   smoothness and multiplicity, stellar subdivision and resolution,
//!   divisor polytopes and lattice points.
//! - [`mult`]: equivariant multiplicities at fixed points (smooth closed
//!   form, resolution summation for singular cones, orbit closures).
//! - [`localize`]: fixed-point integration, equivariant Euler
//!   characteristics with the lattice-point oracle, GKM and
//!   piecewise-exponential membership checks, dual bases.
//! - [`rr`]: Riemann-Roch identity verification at fixed points (Todd,
//!   Adams, and pushforward identities).
//! - [`spherical`]: the rank-one surface catalogue (ℙ(V), ℙ¹×ℙ¹, 𝔽_n, P_n,
//!   𝒦_n), congruence systems, membership decision, and skeleton assembly.
//! - [`corpus`]: the built-in regression corpus of fans and divisors.
//! - [`suite`]: the acceptance suite run by `cargo test` and the CLI.

pub mod corpus;
pub mod fan;
pub mod lin;
pub mod localize;
pub mod mult;
pub mod ring;
pub mod rr;
pub mod series;
pub mod spherical;
pub mod suite;

pub use fan::{Cone, ConeId, Fan, FanError, TDivisor, Wall};
pub use localize::{FixedPointTuple, PExpClass};
pub use mult::MultiplicityTable;
pub use ring::{Character, Fraction, LaurentPoly, LocalizedClass};
pub use rr::RRReport;
pub use series::{LocalizedSeries, TruncatedSeries};
pub use spherical::{SphericalSkeleton, SurfaceData, SurfaceKind};
