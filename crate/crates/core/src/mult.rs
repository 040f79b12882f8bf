//! Equivariant multiplicities at torus fixed points.
//!
//! At a smooth fixed point with tangent weights `λ_1, …, λ_n` the
//! K-multiplicity is `1 / ∏ (1 − e^{−λ_i})`; for the distinguished point of
//! a maximal cone `σ` the tangent weights are the negatives of the dual
//! generators of `σ`.  Singular points are handled by resolving the cone
//! and summing the smooth contributions of the fibers, which is independent
//! of the chosen resolution.  The Chow multiplicity is the leading term of
//! the Chern character of the K-multiplicity.

use crate::fan::{resolve, ConeId, Fan, FanError, PivotPolicy};
use crate::lin;
use crate::ring::{Character, LaurentPoly, LocalizedClass};
use crate::series::{ch_localized, LeadingTerm};
use num::BigInt;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MultError {
    #[error("degenerate fixed point: zero tangent weight")]
    DegenerateFixedPoint,
    #[error("equivariant multiplicity requires a full-dimensional cone")]
    NotFullDimensional,
    #[error("cone {0} is not in the fan")]
    NoSuchCone(usize),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("truncation degree {0} cannot resolve the leading term")]
    TruncationInsufficient(u32),
}

/// `1 / ∏ (1 − e^{−λ_i})` for nonzero tangent weights.
pub fn em_smooth(weights: &[Character], rank: usize) -> Result<LocalizedClass, MultError> {
    if weights.iter().any(|w| w.is_zero()) {
        return Err(MultError::DegenerateFixedPoint);
    }
    Ok(LocalizedClass::inverse_product(rank, weights))
}

/// The K-theoretic multiplicity of the fixed point of a full-dimensional
/// cone, by the smooth closed form or by resolution summation.
pub fn em_point(fan: &Fan, id: ConeId) -> Result<LocalizedClass, MultError> {
    em_point_with_policy(fan, id, PivotPolicy::MinSum)
}

pub fn em_point_with_policy(
    fan: &Fan,
    id: ConeId,
    policy: PivotPolicy,
) -> Result<LocalizedClass, MultError> {
    if id >= fan.cones().len() {
        return Err(MultError::NoSuchCone(id));
    }
    let cone = fan.cone(id);
    if cone.dim != fan.rank() {
        return Err(MultError::NotFullDimensional);
    }
    if fan.is_smooth_cone(id) {
        return em_smooth(&fan.tangent_weights(id)?, fan.rank());
    }
    // Resolve the cone on its own and sum the smooth fiber contributions.
    let rays: Vec<Vec<i64>> = cone.rays.iter().map(|&r| fan.ray(r).to_vec()).collect();
    let local = Fan::new(fan.rank(), rays, vec![(0..cone.rays.len()).collect()])?;
    let (smooth, _) = resolve(&local, policy);
    let mut total = LocalizedClass::zero(fan.rank());
    for &m in smooth.maximal_cones() {
        let weights = smooth.tangent_weights(m)?;
        total = &total + &em_smooth(&weights, fan.rank())?;
    }
    Ok(total)
}

/// Equivariant multiplicities of an orbit closure `V(τ)`: one localized
/// class per maximal cone, zero at fixed points whose cone does not contain
/// `τ`.  Characters of the star quotient are embedded back into the full
/// character lattice through the dual of the quotient projection (computed
/// by Smith normal form), so all entries live over the full torus.
pub fn em_orbit_closure(
    fan: &Fan,
    tau: ConeId,
) -> Result<BTreeMap<ConeId, LocalizedClass>, MultError> {
    if tau >= fan.cones().len() {
        return Err(MultError::NoSuchCone(tau));
    }
    let rank = fan.rank();
    let tau_cone = fan.cone(tau).clone();
    let span: Vec<Vec<i64>> = tau_cone.rays.iter().map(|&r| fan.ray(r).to_vec()).collect();
    let proj = lin::quotient_projection(rank, &span);
    let qrank = proj.len();

    let mut out = BTreeMap::new();
    for &m in fan.maximal_cones() {
        let mc = fan.cone(m);
        let contains_tau = tau_cone.rays.iter().all(|r| mc.rays.contains(r));
        if !contains_tau {
            out.insert(m, LocalizedClass::zero(rank));
            continue;
        }
        if qrank == 0 {
            // τ is itself maximal: the orbit closure is the point.
            out.insert(m, LocalizedClass::one(rank));
            continue;
        }
        // Image of σ in the star quotient.
        let mut qrays: Vec<Vec<i64>> = Vec::new();
        for &r in &mc.rays {
            if tau_cone.rays.contains(&r) {
                continue;
            }
            let img: Vec<i64> = proj.iter().map(|row| lin::dot(row, fan.ray(r))).collect();
            if img.iter().all(|&x| x == 0) {
                continue;
            }
            let img = lin::primitivize(&img);
            if !qrays.contains(&img) {
                qrays.push(img);
            }
        }
        let local = Fan::new(qrank, qrays.clone(), vec![(0..qrays.len()).collect()])?;
        let star_id = local
            .maximal_cones()
            .first()
            .copied()
            .expect("single-cone fan");
        let em_quotient = em_point(&local, star_id)?;
        // Pull characters back along the transpose of the projection.
        let lift = |c: &Character| -> Character {
            let mut v = vec![0i64; rank];
            for (k, row) in proj.iter().enumerate() {
                for (i, &x) in row.iter().enumerate() {
                    v[i] += c.0[k] * x;
                }
            }
            Character(v)
        };
        let num = LaurentPoly::from_terms(
            rank,
            em_quotient
                .numerator()
                .terms()
                .map(|(e, c)| (lift(e), c.clone())),
        );
        let dens: Vec<Character> = em_quotient
            .denominator_weights()
            .iter()
            .map(&lift)
            .collect();
        out.insert(m, LocalizedClass::new(num, dens));
    }
    Ok(out)
}

/// Leading term of the Chern character of a localized class: the Chow-side
/// multiplicity.  For `1/∏(1−e^{−λ_i})` this is `1/∏λ_i`.
pub fn em_chow(x: &LocalizedClass) -> Result<LeadingTerm, MultError> {
    let k = x.denominator_weights().len() as u32;
    let mut trunc = k + 4;
    loop {
        if let Some(lt) = ch_localized(x, trunc).leading_term() {
            return Ok(lt);
        }
        if x.numerator().is_zero() || trunc > 64 {
            return Err(MultError::TruncationInsufficient(trunc));
        }
        trunc *= 2;
    }
}

/// Full multiplicity table of a complete fan: `em^K` and `em^A` at every
/// fixed point.
#[derive(Clone, Debug)]
pub struct MultiplicityTable {
    pub em_k: BTreeMap<ConeId, LocalizedClass>,
    pub em_a: BTreeMap<ConeId, LeadingTerm>,
}

pub fn multiplicity_table(fan: &Fan) -> Result<MultiplicityTable, MultError> {
    let mut em_k = BTreeMap::new();
    let mut em_a = BTreeMap::new();
    for &m in fan.maximal_cones() {
        let k = em_point(fan, m)?;
        em_a.insert(m, em_chow(&k)?);
        em_k.insert(m, k);
    }
    Ok(MultiplicityTable { em_k, em_a })
}

/// Expands a localized class as a Laurent series in the window
/// `⟨·, ξ⟩ ≤ bound` for a functional `ξ` that is nonzero on every
/// denominator weight.  Used to compare multiplicities against brute-force
/// Hilbert-series enumeration.
pub fn expand_window(x: &LocalizedClass, xi: &Character, bound: i64) -> LaurentPoly {
    let rank = x.rank();
    let mut acc = x.numerator().clone();
    for w in x.denominator_weights() {
        let pairing = w.dot(xi);
        assert!(pairing != 0, "window functional degenerate on weight");
        // 1/(1−e^{−w}): expand along e^{−w} when ⟨−w,ξ⟩ > 0, else flip to
        // −Σ_{k≥1} e^{kw} along +w.
        let (dir, start, sign) = if -pairing > 0 {
            (-w, 0i64, BigInt::from(1))
        } else {
            (w.clone(), 1i64, BigInt::from(-1))
        };
        let step = dir.dot(xi);
        debug_assert!(step > 0);
        let base = acc.terms().map(|(e, _)| e.dot(xi)).min().unwrap_or(0);
        let mut expansion = LaurentPoly::zero(rank);
        let mut k = start;
        while base + k * step <= bound {
            expansion = &expansion + &LaurentPoly::exp(&dir.scaled(k)).scale(&sign);
            k += 1;
        }
        acc = &acc * &expansion;
        acc = truncate_window(&acc, xi, bound);
    }
    acc
}

fn truncate_window(f: &LaurentPoly, xi: &Character, bound: i64) -> LaurentPoly {
    LaurentPoly::from_terms(
        f.rank(),
        f.terms()
            .filter(|(e, _)| e.dot(xi) <= bound)
            .map(|(e, c)| (e.clone(), c.clone())),
    )
}

/// Brute-force enumeration of the dual semigroup `σ^∨ ∩ M` inside the same
/// window; the independent oracle for `em_point` of an affine patch.
pub fn dual_semigroup_window(fan: &Fan, id: ConeId, xi: &Character, bound: i64) -> LaurentPoly {
    let cone = fan.cone(id);
    let rays: Vec<&[i64]> = cone.rays.iter().map(|&r| fan.ray(r)).collect();
    let rank = fan.rank();
    // Bounding box for {m : ⟨m, v⟩ ≥ 0 ∀v, ⟨m, ξ⟩ ≤ bound}: exact
    // per-coordinate bounds via vertex enumeration of the region.
    let mut constraints: Vec<(Vec<i64>, i64)> = rays.iter().map(|v| (v.to_vec(), 0)).collect();
    constraints.push((lin::neg(&xi.0), -bound));
    let vertices = vertices_of(&constraints, rank);
    assert!(
        !vertices.is_empty(),
        "window region must have vertices (is the cone full-dimensional?)"
    );
    let mut lo = vec![i64::MAX; rank];
    let mut hi = vec![i64::MIN; rank];
    for v in &vertices {
        for k in 0..rank {
            let f = v[k].floor().to_integer();
            let c = v[k].ceil().to_integer();
            lo[k] = lo[k].min(i64::try_from(&f).unwrap());
            hi[k] = hi[k].max(i64::try_from(&c).unwrap());
        }
    }
    let mut out = LaurentPoly::zero(rank);
    let mut cursor = lo.clone();
    'outer: loop {
        let ok = constraints
            .iter()
            .all(|(row, rhs)| lin::dot(row, &cursor) >= *rhs);
        if ok {
            out = &out + &LaurentPoly::exp(&Character(cursor.clone()));
        }
        for k in 0..rank {
            if cursor[k] < hi[k] {
                cursor[k] += 1;
                continue 'outer;
            }
            cursor[k] = lo[k];
        }
        break;
    }
    out
}

/// Vertices of `{x : row·x ≥ rhs}` by exhaustive subset solving; exact and
/// adequate for the handful of constraints used here.
fn vertices_of(constraints: &[(Vec<i64>, i64)], rank: usize) -> Vec<Vec<num::BigRational>> {
    use num::BigRational;
    let n = constraints.len();
    let mut out: Vec<Vec<BigRational>> = Vec::new();
    for subset in subsets(n, rank) {
        let a: Vec<Vec<i64>> = subset.iter().map(|&i| constraints[i].0.clone()).collect();
        let b: Vec<i64> = subset.iter().map(|&i| constraints[i].1).collect();
        if let Some(x) = lin::solve_rational(&a, &b) {
            let feasible = constraints.iter().all(|(row, rhs)| {
                let mut acc = BigRational::from_integer(0.into());
                for (c, xi) in row.iter().zip(&x) {
                    acc += BigRational::from_integer((*c).into()) * xi;
                }
                acc >= BigRational::from_integer((*rhs).into())
            });
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, i + 1, k, cur, out);
            cur.pop();
        }
    }
    rec(n, 0, k, &mut cur, &mut out);
    out
}
