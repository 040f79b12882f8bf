//! Riemann-Roch identity verification at fixed points: the Todd-class
//! identity, the Adams ratio identity, and the pushforward identity on
//! smooth complete fans.  All comparisons are exact rational arithmetic;
//! reports carry the first mismatching coefficient when a check fails.

use crate::fan::{ConeId, Fan, PivotPolicy, TDivisor};
use crate::lin;
use crate::localize::{euler_char, LocalizeError};
use crate::mult::{em_chow, em_point, em_point_with_policy, MultError};
use crate::ring::{adams_localized, bott, lambda_minus_one, Character, Fraction};
use crate::series::{chern_character, todd_of_weight, LeadingTerm, TruncatedSeries};
use num::BigRational;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RRError {
    #[error("weights of a nondegenerate point must be nonzero")]
    ZeroWeight,
    #[error("pushforward check needs a smooth complete fan")]
    NotSmoothComplete,
    #[error(transparent)]
    Mult(#[from] MultError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
}

/// Outcome of one identity check at one fixed point (or for a whole fan in
/// the pushforward case).
#[derive(Clone, Debug)]
pub struct RRReport {
    pub cone: Option<ConeId>,
    pub check: String,
    pub degree: u32,
    pub pass: bool,
    pub detail: String,
}

impl RRReport {
    fn pass(cone: Option<ConeId>, check: &str, degree: u32) -> Self {
        RRReport {
            cone,
            check: check.to_string(),
            degree,
            pass: true,
            detail: String::new(),
        }
    }

    fn fail(cone: Option<ConeId>, check: &str, degree: u32, detail: String) -> Self {
        RRReport {
            cone,
            check: check.to_string(),
            degree,
            pass: false,
            detail,
        }
    }
}

fn mismatch_detail(lhs: &TruncatedSeries, rhs: &TruncatedSeries) -> String {
    match lhs.first_difference(rhs) {
        Some((mono, a, b)) => format!("first mismatch at {mono:?}: {a} vs {b}"),
        None => String::new(),
    }
}

/// `∏ λ_i / (1 − e^{−λ_i})` to the requested degree, by exact series
/// division of each univariate factor.
pub fn todd_smooth(weights: &[Character], trunc: u32) -> Result<TruncatedSeries, RRError> {
    if weights.iter().any(|w| w.is_zero()) {
        return Err(RRError::ZeroWeight);
    }
    let rank = weights.first().map_or(0, |w| w.rank());
    let mut out = TruncatedSeries::one(rank, trunc);
    for w in weights {
        out = &out * &todd_of_weight(w, trunc);
    }
    Ok(out)
}

/// Checks `td|_p = ch(em^K_p) / em^A_p` at the fixed point of a maximal
/// cone.  At smooth points both sides are expanded to the full degree and
/// compared coefficientwise (cross-multiplied to avoid series division);
/// at singular points the leading-term statement is checked: the leading
/// term of `ch(em^K)` is `em^A`, whose numerator for a simplicial cone is
/// the normalized volume of the dual cone.
pub fn verify_todd_identity(fan: &Fan, id: ConeId, trunc: u32) -> Result<RRReport, RRError> {
    let name = "todd";
    if fan.is_smooth_cone(id) {
        let weights = fan.tangent_weights(id).map_err(MultError::Fan)?;
        let n = weights.len() as u32;
        let work = trunc + n;
        // td(λ)·ch(∏(1−e^{−λ})) == ∏λ, both to degree trunc+n.
        let lhs = &todd_smooth(&weights, work)?
            * &chern_character(&lambda_minus_one(&weights, fan.rank()), work);
        let mut rhs = TruncatedSeries::one(fan.rank(), work);
        for w in &weights {
            rhs = &rhs * &TruncatedSeries::linear(w, work);
        }
        return Ok(if lhs == rhs {
            RRReport::pass(Some(id), name, trunc)
        } else {
            RRReport::fail(Some(id), name, trunc, mismatch_detail(&lhs, &rhs))
        });
    }

    // Singular point: leading term of ch(em^K) equals em^A.
    let em = em_point(fan, id)?;
    let lt = em_chow(&em)?;
    let n = fan.rank() as i64;
    if lt.degree() != Some(-n) {
        return Ok(RRReport::fail(
            Some(id),
            name,
            trunc,
            format!("leading term has degree {:?}, expected {}", lt.degree(), -n),
        ));
    }
    if fan.is_simplicial(id) {
        // Independent oracle: em^A = vol(σ^∨) / ∏ λ_i° over the primitive
        // dual generators (negated), where vol is the index of the lattice
        // they generate.
        let duals = primitive_duals(fan, id);
        let volume = lin::det(&duals.iter().map(|c| c.0.clone()).collect::<Vec<_>>()).abs();
        let oracle = LeadingTerm {
            num: TruncatedSeries::constant(fan.rank(), 4, BigRational::from_integer(volume.into())),
            denominator_weights: duals.iter().map(|m| -m).collect(),
        };
        if lt != oracle {
            return Ok(RRReport::fail(
                Some(id),
                name,
                trunc,
                "leading term disagrees with dual-cone volume".to_string(),
            ));
        }
    } else {
        // No closed form: cross-check the leading term through a second
        // resolution route.
        let other = em_point_with_policy(fan, id, PivotPolicy::MinSumRevLex)?;
        if em_chow(&other)? != lt {
            return Ok(RRReport::fail(
                Some(id),
                name,
                trunc,
                "leading term depends on the resolution route".to_string(),
            ));
        }
    }
    Ok(RRReport::pass(Some(id), name, trunc))
}

/// Primitive inward normals of the facets of a full-dimensional simplicial
/// cone: `⟨m_i, v_j⟩ = 0` for `j ≠ i` and `> 0` for `j = i`.
fn primitive_duals(fan: &Fan, id: ConeId) -> Vec<Character> {
    let cone = fan.cone(id);
    let mut out = Vec::new();
    for (i, _) in cone.rays.iter().enumerate() {
        let others: Vec<Vec<i64>> = cone
            .rays
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &r)| fan.ray(r).to_vec())
            .collect();
        let kernel = lin::integer_kernel(&others, fan.rank());
        assert_eq!(kernel.len(), 1);
        let mut m = lin::primitivize(&kernel[0]);
        if lin::dot(&m, fan.ray(cone.rays[i])) < 0 {
            m = lin::neg(&m);
        }
        out.push(Character(m));
    }
    out
}

fn em_ratio(j: i64, em: &crate::ring::LocalizedClass) -> Fraction {
    let psi = adams_localized(j, em);
    Fraction::new(
        em.numerator() * &psi.denominator_poly(),
        &em.denominator_poly() * psi.numerator(),
    )
}

/// Checks `θ^j(X)|_p = em^K_p / ψ^j(em^K_p)`.  At smooth points the Bott
/// element of the dual generators gives the independent closed form
/// `∏ (1 − e^{−jλ_i})/(1 − e^{−λ_i})`; at singular points the ratio is
/// checked to be well-defined across resolution routes.  All equalities
/// are exact, by cross-multiplication.
pub fn verify_adams_rr_point(fan: &Fan, id: ConeId, j: i64) -> Result<RRReport, RRError> {
    let name = "adams-rr";
    let em = em_point(fan, id)?;
    let ratio = em_ratio(j, &em);
    if fan.is_smooth_cone(id) {
        let duals = fan.dual_generators(id).map_err(MultError::Fan)?;
        let weights: Vec<(Character, i64)> = duals.into_iter().map(|m| (m, 1)).collect();
        let theta = bott(j, &weights, fan.rank());
        return Ok(if theta == ratio {
            RRReport::pass(Some(id), name, 0)
        } else {
            RRReport::fail(Some(id), name, 0, format!("θ^{j} differs from em/ψ^{j}(em)"))
        });
    }
    // Singular: the ratio must not depend on the resolution route, and for
    // j = 1 it must be 1.
    let other = em_point_with_policy(fan, id, PivotPolicy::MinSumRevLex)?;
    let consistent = ratio == em_ratio(j, &other);
    let unit_at_one =
        j != 1 || ratio == Fraction::from_poly(crate::ring::LaurentPoly::one(fan.rank()));
    Ok(if consistent && unit_at_one {
        RRReport::pass(Some(id), name, 0)
    } else {
        RRReport::fail(
            Some(id),
            name,
            0,
            "em/ψ^j(em) differs across resolution routes".to_string(),
        )
    })
}

/// Checks the pushforward identity to the point on a smooth complete fan:
/// `ch(χ(O(D))) = Σ_σ ch(e^{m_σ}) · td(σ) / ∏ λ_i(σ)` to the requested
/// degree.  Both sides are multiplied by the product of the distinct
/// normalized weight directions, turning the comparison into an equality
/// of truncated polynomials.
pub fn verify_grr_pushforward(fan: &Fan, d: &TDivisor, trunc: u32) -> Result<RRReport, RRError> {
    let name = "grr-pushforward";
    if !fan.is_complete() || !fan.is_smooth() {
        return Err(RRError::NotSmoothComplete);
    }
    let rank = fan.rank();

    // Distinct normalized denominator directions with per-cone maximal
    // multiplicity.
    let mut per_cone: Vec<(ConeId, Vec<Character>, Vec<Character>, i64)> = Vec::new();
    let mut common: Vec<Character> = Vec::new();
    for &m in fan.maximal_cones() {
        let weights = fan.tangent_weights(m).map_err(MultError::Fan)?;
        let mut dirs = Vec::new();
        let mut sign = 1i64;
        for w in &weights {
            if lin::first_nonzero_positive(&w.0) {
                dirs.push(w.clone());
            } else {
                dirs.push(-w);
                sign = -sign;
            }
        }
        dirs.sort();
        common = multiset_union(&common, &dirs);
        per_cone.push((m, weights, dirs, sign));
    }
    let dp = common.len() as u32;
    let work = trunc + dp;

    let chi = euler_char(fan, d)?;
    let mut lhs = chern_character(&chi, work);
    for w in &common {
        lhs = &lhs * &TruncatedSeries::linear(w, work);
    }

    let mut rhs = TruncatedSeries::zero(rank, work);
    for (m, weights, dirs, sign) in &per_cone {
        let vertex = fan.divisor_vertex(d, *m).map_err(MultError::Fan)?;
        let mut term = chern_character(&crate::ring::LaurentPoly::exp(&vertex), work);
        for w in weights {
            term = &term * &todd_of_weight(w, work);
        }
        for w in multiset_diff(&common, dirs) {
            term = &term * &TruncatedSeries::linear(&w, work);
        }
        if *sign < 0 {
            term = -&term;
        }
        rhs = &rhs + &term;
    }

    Ok(if lhs == rhs {
        RRReport::pass(None, name, trunc)
    } else {
        RRReport::fail(None, name, trunc, mismatch_detail(&lhs, &rhs))
    })
}

fn multiset_union(a: &[Character], b: &[Character]) -> Vec<Character> {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<&Character, (usize, usize)> = BTreeMap::new();
    for w in a {
        counts.entry(w).or_default().0 += 1;
    }
    for w in b {
        counts.entry(w).or_default().1 += 1;
    }
    let mut out = Vec::new();
    for (w, (ca, cb)) in counts {
        for _ in 0..ca.max(cb) {
            out.push(w.clone());
        }
    }
    out
}

fn multiset_diff(a: &[Character], b: &[Character]) -> Vec<Character> {
    let mut out = a.to_vec();
    for w in b {
        if let Some(pos) = out.iter().position(|x| x == w) {
            out.remove(pos);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::parse_fan;
    use num::{BigInt, BigRational};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn p112() -> Fan {
        parse_fan(
            "rank 2\nray 1 0\nray 0 1\nray -1 -2\ncone 0 1\ncone 1 2\ncone 0 2\ndivisor ample 0 1 0",
        )
        .unwrap()
    }

    fn p1() -> Fan {
        parse_fan("rank 1\nray 1\nray -1\ncone 0\ncone 1\ndivisor d1 0 1").unwrap()
    }

    #[test]
    fn todd_single_weight_series() {
        let t = todd_smooth(&[Character(vec![1])], 2).unwrap();
        assert_eq!(t.coeff(&[0]), q(1, 1));
        assert_eq!(t.coeff(&[1]), q(1, 2));
        assert_eq!(t.coeff(&[2]), q(1, 12));
        assert!(matches!(
            todd_smooth(&[Character(vec![0])], 3),
            Err(RRError::ZeroWeight)
        ));
    }

    #[test]
    fn todd_multiplicativity() {
        let a = Character(vec![1, 0]);
        let b = Character(vec![0, 1]);
        let joint = todd_smooth(&[a.clone(), b.clone()], 6).unwrap();
        let split = &todd_smooth(&[a], 6).unwrap() * &todd_smooth(&[b], 6).unwrap();
        assert_eq!(joint, split);
    }

    #[test]
    fn todd_identity_on_p112() {
        let fan = p112();
        for &m in fan.maximal_cones() {
            let report = verify_todd_identity(&fan, m, 10).unwrap();
            assert!(report.pass, "cone {m}: {}", report.detail);
        }
    }

    #[test]
    fn adams_rr_on_p112() {
        let fan = p112();
        for &m in fan.maximal_cones() {
            for j in [1, 2, 3, 5] {
                let report = verify_adams_rr_point(&fan, m, j).unwrap();
                assert!(report.pass, "cone {m}, j={j}: {}", report.detail);
            }
        }
    }

    #[test]
    fn grr_on_p1() {
        let fan = p1();
        let d = fan.divisor("d1").unwrap().clone();
        let report = verify_grr_pushforward(&fan, &d, 6).unwrap();
        assert!(report.pass, "{}", report.detail);
        let zero = TDivisor(vec![0, 0]);
        let report = verify_grr_pushforward(&fan, &zero, 6).unwrap();
        assert!(report.pass, "{}", report.detail);
    }

    #[test]
    fn grr_rejects_singular_fans() {
        let fan = p112();
        let d = fan.divisor("ample").unwrap().clone();
        assert!(matches!(
            verify_grr_pushforward(&fan, &d, 6),
            Err(RRError::NotSmoothComplete)
        ));
    }
}
