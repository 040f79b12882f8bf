//! Benchmark fixtures shared by the criterion targets: a few corpus fans
//! and prebuilt tuples, re-exported so the benches stay small.

pub use torloc::corpus::{corpus, cube, p112, p3, CorpusFan};
pub use torloc::fan::{Fan, PivotPolicy, TDivisor};
pub use torloc::localize::{euler_char, gkm_check, FixedPointTuple};
pub use torloc::mult::{em_point_with_policy, multiplicity_table};
pub use torloc::ring::{divide_exact, parse_poly, Character, LaurentPoly};
pub use torloc::spherical::{membership, surface_data, SurfaceKind};

/// A moderately large divisibility instance for the exact-division bench.
pub fn division_instance() -> (LaurentPoly, Character) {
    let lam = Character(vec![3, -2]);
    let mut f = LaurentPoly::one(2);
    for k in 1..6i64 {
        let factor = parse_poly(&format!("1 + {k}*e^{{u1}} - e^{{-{k}*u2}}"), 2).unwrap();
        f = &f * &factor;
    }
    (
        &f * &torloc::ring::one_minus_exp_neg(&lam),
        lam,
    )
}

/// A batch of surface tuples exercising both outcomes of membership.
pub fn membership_batch() -> Vec<Vec<LaurentPoly>> {
    let data = surface_data(SurfaceKind::Fn(3)).unwrap();
    let mut out = Vec::new();
    for shift in -4..=4i64 {
        let g = parse_poly(&format!("2 - e^{{{shift}*t}}"), 1).unwrap();
        // A member: g times the fiber basis tuple.
        out.push(data.basis[1].iter().map(|b| &g * b).collect());
        // Usually not a member: the raw constant-plus-shift tuple.
        out.push(vec![
            g.clone(),
            parse_poly("1", 1).unwrap(),
            g.clone(),
            parse_poly("e^{t}", 1).unwrap(),
        ]);
    }
    out
}
