//! Fixed-point localization: integration against equivariant
//! multiplicities, Euler characteristics with the lattice-point oracle,
//! GKM and piecewise-exponential membership checks, and dual bases.

use crate::fan::{ConeId, Fan, FanError, TDivisor, Wall};
use crate::mult::{em_orbit_closure, em_point, multiplicity_table, MultError};
use crate::ring::{
    adams, divide_exact, lambda_minus_one, restrict_characters, try_div, Character, LaurentPoly,
    LocalizedClass,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LocalizeError {
    #[error("tuple key set does not match the fixed points: missing cone {0}")]
    MissingEntry(ConeId),
    #[error("tuple has an entry for cone {0}, which is not a maximal cone")]
    ExtraEntry(ConeId),
    #[error("integration did not land in R(T): residue {residue:?}")]
    NonIntegralResult { residue: Box<LocalizedClass> },
    #[error("pairing matrix is singular: basis is not dual-feasible")]
    SingularPairing,
    #[error("dual tuple entry is not integral over R(T)")]
    DualNotIntegral,
    #[error("need one basis cone per fixed point ({points}), got {given}")]
    BasisSize { points: usize, given: usize },
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Mult(#[from] MultError),
}

/// An assignment of a ring element to every fixed point (maximal cone).
/// A missing key is an error, never an implicit zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointTuple {
    entries: BTreeMap<ConeId, LaurentPoly>,
}

impl FixedPointTuple {
    pub fn new(
        fan: &Fan,
        entries: BTreeMap<ConeId, LaurentPoly>,
    ) -> Result<Self, LocalizeError> {
        for &m in fan.maximal_cones() {
            if !entries.contains_key(&m) {
                return Err(LocalizeError::MissingEntry(m));
            }
        }
        for &k in entries.keys() {
            if !fan.maximal_cones().contains(&k) {
                return Err(LocalizeError::ExtraEntry(k));
            }
        }
        Ok(FixedPointTuple { entries })
    }

    pub fn constant(fan: &Fan, value: LaurentPoly) -> Self {
        FixedPointTuple {
            entries: fan
                .maximal_cones()
                .iter()
                .map(|&m| (m, value.clone()))
                .collect(),
        }
    }

    /// The restriction tuple of the line bundle `O(D)`: `σ ↦ e^{m_σ}`.
    pub fn from_divisor(fan: &Fan, d: &TDivisor) -> Result<Self, FanError> {
        let mut entries = BTreeMap::new();
        for &m in fan.maximal_cones() {
            let v = fan.divisor_vertex(d, m)?;
            entries.insert(m, LaurentPoly::exp(&v));
        }
        Ok(FixedPointTuple { entries })
    }

    /// Parses the tuple file format: one line per maximal cone,
    /// `cone <id>: <laurent poly expression>`, `#` comments allowed.
    /// Ids index into the fan's maximal-cone list.
    pub fn parse(fan: &Fan, text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| format!("tuple file, line {}: {}", lineno + 1, msg);
            let rest = line
                .strip_prefix("cone")
                .ok_or_else(|| err("expected 'cone <id>: <expression>'"))?;
            let (id_str, expr) = rest
                .split_once(':')
                .ok_or_else(|| err("missing ':' after cone id"))?;
            let idx: usize = id_str
                .trim()
                .parse()
                .map_err(|_| err("bad cone id"))?;
            let &cone = fan
                .maximal_cones()
                .get(idx)
                .ok_or_else(|| err(&format!("cone index {idx} out of range")))?;
            let poly = crate::ring::parse_poly(expr.trim(), fan.rank())
                .map_err(|e| err(&e.to_string()))?;
            entries.insert(cone, poly);
        }
        FixedPointTuple::new(fan, entries).map_err(|e| e.to_string())
    }

    pub fn get(&self, id: ConeId) -> &LaurentPoly {
        &self.entries[&id]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ConeId, &LaurentPoly)> {
        self.entries.iter()
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        FixedPointTuple {
            entries: self.entries.iter().map(|(&k, v)| (k, f(v))).collect(),
        }
    }
}

/// Σ_p em_p · f_p, normalized; must land in `R(T)`.  A surviving
/// denominator signals that the tuple is not the restriction of a genuine
/// class and is reported as a structured error.
pub fn integrate(fan: &Fan, tuple: &FixedPointTuple) -> Result<LaurentPoly, LocalizeError> {
    let table = multiplicity_table(fan)?;
    integrate_with_table(fan, &table.em_k, tuple)
}

pub fn integrate_with_table(
    fan: &Fan,
    em: &BTreeMap<ConeId, LocalizedClass>,
    tuple: &FixedPointTuple,
) -> Result<LaurentPoly, LocalizeError> {
    let mut acc = LocalizedClass::zero(fan.rank());
    for &m in fan.maximal_cones() {
        acc = &acc + &em[&m].mul_poly(tuple.get(m));
    }
    match acc.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(LocalizeError::NonIntegralResult {
            residue: Box::new(acc),
        }),
    }
}

/// The equivariant Euler characteristic of `O(D)` by fixed-point summation.
/// For nef `D` this equals the lattice-point generating function of the
/// divisor polytope, which `euler_char_with_oracle` checks.
pub fn euler_char(fan: &Fan, d: &TDivisor) -> Result<LaurentPoly, LocalizeError> {
    let tuple = FixedPointTuple::from_divisor(fan, d)?;
    integrate(fan, &tuple)
}

/// Runs `euler_char` and diffs it against the Brion-style lattice-point
/// enumeration.  Returns `(value, oracle, agree)`.
pub fn euler_char_with_oracle(
    fan: &Fan,
    d: &TDivisor,
) -> Result<(LaurentPoly, LaurentPoly, bool), LocalizeError> {
    let value = euler_char(fan, d)?;
    let mut oracle = LaurentPoly::zero(fan.rank());
    for m in fan.lattice_points(d)? {
        oracle = &oracle + &LaurentPoly::exp(&m);
    }
    let agree = value == oracle;
    Ok((value, oracle, agree))
}

/// A wall whose divisibility condition fails, with the offending remainder.
#[derive(Clone, Debug)]
pub struct GkmViolation {
    pub wall: Wall,
    pub remainder: LaurentPoly,
}

/// Checks the wall congruences `f_σ − f_σ' ≡ 0 mod (1 − e^{−χ})`.
/// An empty violation list means the tuple passes.
pub fn gkm_check(fan: &Fan, tuple: &FixedPointTuple) -> Result<Vec<GkmViolation>, LocalizeError> {
    let mut violations = Vec::new();
    for wall in fan.walls()? {
        let (a, b) = wall.sides;
        let diff = &tuple.get(a).clone() - tuple.get(b);
        if let Err(crate::ring::RingError::NotDivisible { remainder }) =
            divide_exact(&diff, &wall.weight)
        {
            violations.push(GkmViolation {
                wall,
                remainder,
            });
        }
    }
    Ok(violations)
}

/// A shared face on which two entries restrict differently.
#[derive(Clone, Debug)]
pub struct FaceViolation {
    pub cones: (ConeId, ConeId),
    pub face_rays: Vec<usize>,
}

/// Piecewise-exponential check: on every shared face `τ` of two maximal
/// cones, the entries must agree after pushing exponents to the quotient
/// `M / (τ^⊥ ∩ M)`.  Pairing against the rays of `τ` realizes that
/// quotient injectively.  On walls this is the GKM condition.
pub fn pexp_check(
    fan: &Fan,
    tuple: &FixedPointTuple,
) -> Result<Vec<FaceViolation>, LocalizeError> {
    if !fan.is_complete() {
        return Err(LocalizeError::Fan(FanError::RequiresComplete));
    }
    let mut violations = Vec::new();
    let maximal = fan.maximal_cones();
    for (i, &a) in maximal.iter().enumerate() {
        for &b in maximal.iter().skip(i + 1) {
            let common: Vec<usize> = fan
                .cone(a)
                .rays
                .iter()
                .copied()
                .filter(|r| fan.cone(b).rays.contains(r))
                .collect();
            let q: Vec<Vec<i64>> = common.iter().map(|&r| fan.ray(r).to_vec()).collect();
            let fa = restrict_characters(tuple.get(a), &q);
            let fb = restrict_characters(tuple.get(b), &q);
            if fa != fb {
                violations.push(FaceViolation {
                    cones: (a, b),
                    face_rays: common,
                });
            }
        }
    }
    Ok(violations)
}

/// A fixed-point tuple that passes the face-agreement check; the membership
/// model for operational classes.
#[derive(Clone, Debug)]
pub struct PExpClass {
    tuple: FixedPointTuple,
}

impl PExpClass {
    pub fn new(fan: &Fan, tuple: FixedPointTuple) -> Result<Self, Vec<FaceViolation>> {
        match pexp_check(fan, &tuple) {
            Ok(v) if v.is_empty() => Ok(PExpClass { tuple }),
            Ok(v) => Err(v),
            Err(_) => Err(Vec::new()),
        }
    }

    pub fn tuple(&self) -> &FixedPointTuple {
        &self.tuple
    }
}

/// Verifies that the entrywise Adams image of a valid class is again a
/// valid class.  Returns face violations of the image (empty = pass).
pub fn adams_pullback_check(
    fan: &Fan,
    j: i64,
    class: &PExpClass,
) -> Result<Vec<FaceViolation>, LocalizeError> {
    let image = class.tuple().map(|f| adams(j, f));
    pexp_check(fan, &image)
}

/// The output of `dual_basis`: tuples biorthogonal to the chosen
/// orbit-closure classes, the image matrix of the canonical map on the
/// structure sheaf, and its determinant.
#[derive(Clone, Debug)]
pub struct DualBasis {
    pub duals: Vec<FixedPointTuple>,
    pub image_matrix: Vec<Vec<LaurentPoly>>,
    pub determinant: LaurentPoly,
}

/// Computes the dual basis of the orbit-closure classes `[O_{V(τ_j)}]`
/// under the integration pairing, by exact fraction-free elimination: the
/// pairing matrix is cleared to a Laurent-polynomial matrix row by row and
/// inverted through cofactors.
pub fn dual_basis(fan: &Fan, basis: &[ConeId]) -> Result<DualBasis, LocalizeError> {
    let points = fan.maximal_cones().to_vec();
    let k = points.len();
    if basis.len() != k {
        return Err(LocalizeError::BasisSize {
            points: k,
            given: basis.len(),
        });
    }
    let rank = fan.rank();

    // Pairing matrix G[p][j] = em_p(V(τ_j)).
    let mut pairing: Vec<Vec<LocalizedClass>> = Vec::with_capacity(k);
    let columns: Vec<BTreeMap<ConeId, LocalizedClass>> = basis
        .iter()
        .map(|&tau| em_orbit_closure(fan, tau))
        .collect::<Result<_, _>>()?;
    for &p in &points {
        pairing.push(columns.iter().map(|col| col[&p].clone()).collect());
    }

    // Clear denominators per row: G = diag(1/d_p) · H.
    let mut h: Vec<Vec<LaurentPoly>> = Vec::with_capacity(k);
    let mut row_dens: Vec<LaurentPoly> = Vec::with_capacity(k);
    for row in &pairing {
        let mut union: Vec<Character> = Vec::new();
        for x in row {
            union = multiset_union(&union, x.denominator_weights());
        }
        let d_p = lambda_minus_one(&union, rank);
        let cleared: Vec<LaurentPoly> = row
            .iter()
            .map(|x| {
                let extra = multiset_diff(&union, x.denominator_weights());
                x.numerator() * &lambda_minus_one(&extra, rank)
            })
            .collect();
        h.push(cleared);
        row_dens.push(d_p);
    }

    let det_h = det_poly(&h);
    if det_h.is_zero() {
        return Err(LocalizeError::SingularPairing);
    }

    // f^{(i)}_p = cofactor(H)_{p,i} · d_p / det(H), exactly.
    let mut duals = Vec::with_capacity(k);
    for i in 0..k {
        let mut entries = BTreeMap::new();
        for (pi, &p) in points.iter().enumerate() {
            let cof = cofactor(&h, pi, i);
            let num = &cof * &row_dens[pi];
            let value = try_div(&num, &det_h).ok_or(LocalizeError::DualNotIntegral)?;
            entries.insert(p, value);
        }
        duals.push(FixedPointTuple { entries });
    }

    // Image matrix: A[i][j] = Σ_p f^i_p f^j_p em_p(X) = ∫ f^i·f^j.
    let em = multiplicity_table(fan)?.em_k;
    let mut image = vec![vec![LaurentPoly::zero(rank); k]; k];
    for i in 0..k {
        for j in i..k {
            let prod = FixedPointTuple {
                entries: points
                    .iter()
                    .map(|&p| (p, duals[i].get(p) * duals[j].get(p)))
                    .collect(),
            };
            let value = integrate_with_table(fan, &em, &prod)?;
            image[i][j] = value.clone();
            image[j][i] = value;
        }
    }
    let determinant = det_poly(&image);
    Ok(DualBasis {
        duals,
        image_matrix: image,
        determinant,
    })
}

/// Determinant of a Laurent-polynomial matrix by cofactor expansion along
/// the first column (fine at dual-basis sizes).
fn det_poly(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let k = m.len();
    match k {
        0 => panic!("empty matrix"),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = LaurentPoly::zero(m[0][0].rank());
            for i in 0..k {
                if m[i][0].is_zero() {
                    continue;
                }
                let sub = minor(m, i, 0);
                let term = &m[i][0] * &det_poly(&sub);
                if i % 2 == 0 {
                    acc = &acc + &term;
                } else {
                    acc = &acc - &term;
                }
            }
            acc
        }
    }
}

fn minor(m: &[Vec<LaurentPoly>], row: usize, col: usize) -> Vec<Vec<LaurentPoly>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|&(j, _)| j != col)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Signed cofactor `C_{row,col} = (−1)^{row+col} · det(minor)`.
fn cofactor(m: &[Vec<LaurentPoly>], row: usize, col: usize) -> LaurentPoly {
    if m.len() == 1 {
        return LaurentPoly::one(m[0][0].rank());
    }
    let d = det_poly(&minor(m, row, col));
    if (row + col).is_multiple_of(2) {
        d
    } else {
        -&d
    }
}

fn multiset_union(a: &[Character], b: &[Character]) -> Vec<Character> {
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

/// Pairing of a tuple against a single orbit-closure class, as used by the
/// biorthogonality tests: `Σ_p f_p · em_p(V(τ))`.
pub fn pair_with_orbit(
    fan: &Fan,
    tuple: &FixedPointTuple,
    tau: ConeId,
) -> Result<LocalizedClass, LocalizeError> {
    let col = em_orbit_closure(fan, tau)?;
    let mut acc = LocalizedClass::zero(fan.rank());
    for &m in fan.maximal_cones() {
        acc = &acc + &col[&m].mul_poly(tuple.get(m));
    }
    Ok(acc)
}

/// Convenience: Σ_p em_p over a complete fan (must be 1).
pub fn multiplicity_sum(fan: &Fan) -> Result<LaurentPoly, LocalizeError> {
    integrate(fan, &FixedPointTuple::constant(fan, LaurentPoly::one(fan.rank())))
}

/// Re-exported for callers that need per-point multiplicities alongside
/// integration.
pub fn em_at(fan: &Fan, id: ConeId) -> Result<LocalizedClass, LocalizeError> {
    Ok(em_point(fan, id)?)
}
