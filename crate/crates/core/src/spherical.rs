//! The rank-one surface catalogue and its congruence systems.
//!
//! A one-dimensional torus acting on one of the catalogued surfaces —
//! the projective plane of binary quadrics ℙ(V), the diagonal ℙ¹×ℙ¹, a
//! Hirzebruch surface 𝔽_n, the contraction P_n of its negative section, or
//! the double-curve surface 𝒦_n obtained by gluing the two sections — has
//! its restriction image in `⊕_points Z[e^{±t}]` cut out by explicit
//! divisibility relations.  This module catalogues the fixed-point data,
//! the relations, a triangular basis of restriction tuples, a membership
//! decision procedure by sequential subtraction, and the assembly of the
//! global relation system of a skeleton (fixed points, invariant curves,
//! surface components) over a higher-rank lattice.
//!
//! Signs in the multi-term relations are certified rather than assumed:
//! the catalogue uses the coefficients for which the constant tuple and
//! the structure-sheaf restrictions satisfy every relation, and the test
//! suite enforces this by integrating against the catalogued
//! multiplicities (a wrong sign breaks integrality).

use crate::ring::{divide_exact, try_div, Character, LaurentPoly, LocalizedClass, RingError};
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SphericalError {
    #[error("surface parameter must satisfy n ≥ 1, got {0}")]
    InvalidParameter(i64),
    #[error("odd parameter requires the half of the root weight to be integral; root {root:?}")]
    HalfWeightNotIntegral { root: Character },
    #[error("expected {expected} tuple entries, got {got}")]
    TupleLength { expected: usize, got: usize },
    #[error("surface component expects {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("unknown point label {0}")]
    UnknownLabel(String),
    #[error("root weight must be nonzero")]
    ZeroRoot,
    #[error("skeleton file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown surface kind {0}")]
    UnknownKind(String),
}

/// The classification tags of the rank-one surface catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Point,
    P1,
    PV,
    P1xP1,
    Fn(i64),
    Pn(i64),
    Kn(i64),
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Point => write!(f, "point"),
            SurfaceKind::P1 => write!(f, "p1"),
            SurfaceKind::PV => write!(f, "pv"),
            SurfaceKind::P1xP1 => write!(f, "p1p1"),
            SurfaceKind::Fn(n) => write!(f, "fn:{n}"),
            SurfaceKind::Pn(n) => write!(f, "pn:{n}"),
            SurfaceKind::Kn(n) => write!(f, "kn:{n}"),
        }
    }
}

impl SurfaceKind {
    pub fn parse(s: &str) -> Result<Self, SphericalError> {
        let parse_n = |rest: &str| -> Result<i64, SphericalError> {
            rest.parse()
                .map_err(|_| SphericalError::UnknownKind(s.to_string()))
        };
        match s {
            "point" => Ok(SurfaceKind::Point),
            "p1" => Ok(SurfaceKind::P1),
            "pv" => Ok(SurfaceKind::PV),
            "p1p1" => Ok(SurfaceKind::P1xP1),
            _ => {
                if let Some(rest) = s.strip_prefix("fn:") {
                    Ok(SurfaceKind::Fn(parse_n(rest)?))
                } else if let Some(rest) = s.strip_prefix("pn:") {
                    Ok(SurfaceKind::Pn(parse_n(rest)?))
                } else if let Some(rest) = s.strip_prefix("kn:") {
                    Ok(SurfaceKind::Kn(parse_n(rest)?))
                } else {
                    Err(SphericalError::UnknownKind(s.to_string()))
                }
            }
        }
    }
}

/// One divisibility condition: `Σ coeffs_p · f_p ≡ 0` modulo the product
/// of the factors `1 − e^{−χ}` over the listed moduli, checked by
/// sequential exact division.
#[derive(Clone, Debug)]
pub struct CongruenceRelation {
    pub coeffs: Vec<LaurentPoly>,
    pub moduli: Vec<Character>,
    pub label: String,
}

impl CongruenceRelation {
    /// Evaluates the relation; `Ok(())` on success, the stuck remainder on
    /// failure.
    pub fn check(&self, tuple: &[LaurentPoly]) -> Result<(), LaurentPoly> {
        let rank = self.moduli.first().map_or(1, Character::rank);
        let mut acc = LaurentPoly::zero(rank);
        for (c, f) in self.coeffs.iter().zip(tuple) {
            acc = &acc + &(c * f);
        }
        for m in &self.moduli {
            match divide_exact(&acc, m) {
                Ok(q) => acc = q,
                Err(RingError::NotDivisible { remainder }) => return Err(remainder),
                Err(RingError::ZeroWeight) => unreachable!("moduli are nonzero"),
            }
        }
        Ok(())
    }
}

/// Fixed-point data of one catalogued surface: labels in normative order,
/// tangent weights, fixed-point multiplicities, the relation list, and a
/// triangular basis of restriction tuples with their pivot points.
#[derive(Clone, Debug)]
pub struct SurfaceData {
    pub kind: SurfaceKind,
    pub points: Vec<&'static str>,
    pub tangent_weights: Vec<Vec<Character>>,
    pub em: Vec<LocalizedClass>,
    pub relations: Vec<CongruenceRelation>,
    pub basis: Vec<Vec<LaurentPoly>>,
    pub pivots: Vec<usize>,
}

fn t(k: i64) -> Character {
    Character(vec![k])
}

/// `e^{kt}`
fn xp(k: i64) -> LaurentPoly {
    LaurentPoly::exp(&t(k))
}

/// `1 − e^{−kt}`
fn d(k: i64) -> LaurentPoly {
    crate::ring::one_minus_exp_neg(&t(k))
}

fn one() -> LaurentPoly {
    LaurentPoly::one(1)
}

fn zero() -> LaurentPoly {
    LaurentPoly::zero(1)
}

fn em_weights(weights: &[i64]) -> LocalizedClass {
    LocalizedClass::inverse_product(1, &weights.iter().map(|&k| t(k)).collect::<Vec<_>>())
}

fn rel(coeffs: Vec<LaurentPoly>, moduli: Vec<i64>, label: &str) -> CongruenceRelation {
    CongruenceRelation {
        coeffs,
        moduli: moduli.into_iter().map(t).collect(),
        label: label.to_string(),
    }
}

/// The full catalogue entry for a surface kind.
pub fn surface_data(kind: SurfaceKind) -> Result<SurfaceData, SphericalError> {
    match kind {
        SurfaceKind::Fn(n) | SurfaceKind::Pn(n) | SurfaceKind::Kn(n) if n < 1 => {
            return Err(SphericalError::InvalidParameter(n))
        }
        _ => {}
    }
    let data = match kind {
        SurfaceKind::Point => SurfaceData {
            kind,
            points: vec!["x"],
            tangent_weights: vec![vec![]],
            em: vec![LocalizedClass::one(1)],
            relations: vec![],
            basis: vec![vec![one()]],
            pivots: vec![0],
        },
        SurfaceKind::P1 => SurfaceData {
            kind,
            points: vec!["x", "y"],
            tangent_weights: vec![vec![t(2)], vec![t(-2)]],
            em: vec![em_weights(&[2]), em_weights(&[-2])],
            relations: vec![rel(vec![one(), -&one()], vec![2], "f_x - f_y")],
            basis: vec![vec![one(), one()], vec![zero(), d(2)]],
            pivots: vec![0, 1],
        },
        SurfaceKind::PV => SurfaceData {
            kind,
            points: vec!["x", "y", "z"],
            tangent_weights: vec![vec![t(2), t(4)], vec![t(2), t(-2)], vec![t(-2), t(-4)]],
            em: vec![em_weights(&[2, 4]), em_weights(&[2, -2]), em_weights(&[-2, -4])],
            relations: vec![
                rel(vec![one(), -&one(), zero()], vec![2], "f_x - f_y"),
                rel(vec![zero(), one(), -&one()], vec![2], "f_y - f_z"),
                rel(vec![one(), zero(), -&one()], vec![4], "f_x - f_z"),
                rel(
                    vec![one(), -&(&xp(-2) + &xp(-4)), xp(-6)],
                    vec![2, 4],
                    "f_x - e^{-2t}(1+e^{-2t}) f_y + e^{-6t} f_z",
                ),
            ],
            basis: vec![
                vec![one(), one(), one()],
                vec![zero(), d(2), d(4)],
                vec![zero(), zero(), &d(2) * &d(4)],
            ],
            pivots: vec![0, 1, 2],
        },
        SurfaceKind::P1xP1 => SurfaceData {
            kind,
            points: vec!["x", "y", "z", "w"],
            tangent_weights: vec![
                vec![t(2), t(2)],
                vec![t(-2), t(2)],
                vec![t(2), t(-2)],
                vec![t(-2), t(-2)],
            ],
            em: vec![
                em_weights(&[2, 2]),
                em_weights(&[-2, 2]),
                em_weights(&[2, -2]),
                em_weights(&[-2, -2]),
            ],
            relations: vec![
                rel(vec![one(), -&one(), zero(), zero()], vec![2], "f_x - f_y"),
                rel(vec![one(), zero(), -&one(), zero()], vec![2], "f_x - f_z"),
                rel(vec![zero(), one(), zero(), -&one()], vec![2], "f_y - f_w"),
                rel(vec![zero(), zero(), one(), -&one()], vec![2], "f_z - f_w"),
                rel(
                    vec![one(), -&xp(-2), -&xp(-2), xp(-4)],
                    vec![2, 2],
                    "f_x - e^{-2t} f_y - e^{-2t} f_z + e^{-4t} f_w",
                ),
            ],
            basis: vec![
                vec![one(), one(), one(), one()],
                vec![zero(), d(2), zero(), d(2)],
                vec![zero(), zero(), d(2), d(2)],
                vec![zero(), zero(), zero(), &d(2) * &d(2)],
            ],
            pivots: vec![0, 1, 2, 3],
        },
        SurfaceKind::Fn(n) => SurfaceData {
            kind,
            points: vec!["x", "y", "z", "w"],
            tangent_weights: vec![
                vec![t(2), t(n)],
                vec![t(-2), t(-n)],
                vec![t(2), t(-n)],
                vec![t(-2), t(n)],
            ],
            em: vec![
                em_weights(&[2, n]),
                em_weights(&[-2, -n]),
                em_weights(&[2, -n]),
                em_weights(&[-2, n]),
            ],
            relations: vec![
                rel(vec![one(), -&one(), zero(), zero()], vec![2], "f_x - f_y"),
                rel(vec![zero(), zero(), one(), -&one()], vec![2], "f_z - f_w"),
                rel(vec![one(), zero(), -&one(), zero()], vec![n], "f_x - f_z"),
                rel(vec![zero(), one(), zero(), -&one()], vec![n], "f_y - f_w"),
                // The w-coefficient is −e^{-2t}: with +e^{-2t} the constant
                // tuple (the restriction of the structure sheaf) would fail.
                rel(
                    vec![one(), xp(-(n + 2)), -&xp(-n), -&xp(-2)],
                    vec![2, n],
                    "f_x + e^{-(n+2)t} f_y - e^{-nt} f_z - e^{-2t} f_w",
                ),
            ],
            basis: vec![
                vec![one(), one(), one(), one()],
                vec![zero(), d(2), zero(), d(2)],
                vec![zero(), zero(), d(n), -&(&xp(-n) * &d(n))],
                vec![zero(), zero(), zero(), &d(2) * &d(n)],
            ],
            pivots: vec![0, 1, 2, 3],
        },
        SurfaceKind::Pn(n) => {
            // Multiplicity at the contracted point, by resolution summation:
            // em_z = -(e^{-2t} + e^{-nt}) / ((1-e^{-2t})(1-e^{-nt})).
            let em_z = LocalizedClass::new(-&(&xp(-2) + &xp(-n)), [t(2), t(n)]);
            // The y-entry unit of the second basis tuple depends on the
            // parity of n (the step ideal is principal either way).
            let u = if n % 2 == 0 { &one() + &one() } else { &one() + &xp(-1) };
            SurfaceData {
                kind,
                points: vec!["x", "y", "z"],
                tangent_weights: vec![vec![t(2), t(n)], vec![t(-2), t(-n)], vec![t(2), t(n)]],
                em: vec![em_weights(&[2, n]), em_weights(&[-2, -n]), em_z],
                relations: vec![
                    rel(vec![one(), -&one(), zero()], vec![2], "f_x - f_y"),
                    rel(vec![one(), zero(), -&one()], vec![n], "f_x - f_z"),
                    rel(vec![zero(), one(), -&one()], vec![n], "f_y - f_z"),
                    // The z-coefficient is -(e^{-2t} + e^{-nt}): this is the
                    // reduction of the 4-term relation under f_z' = f_w',
                    // and the only sign for which the constant tuple passes.
                    rel(
                        vec![one(), xp(-(n + 2)), -&(&xp(-2) + &xp(-n))],
                        vec![n, 2],
                        "f_x + e^{-(n+2)t} f_y - (e^{-2t}+e^{-nt}) f_z",
                    ),
                ],
                basis: vec![
                    vec![one(), one(), one()],
                    vec![zero(), &u * &d(n), d(n)],
                    vec![zero(), &d(2) * &d(n), zero()],
                ],
                pivots: vec![0, 2, 1],
            }
        }
        SurfaceKind::Kn(_) => SurfaceData {
            kind,
            points: vec!["x", "y"],
            // The fixed points sit on the double curve; the localized
            // multiplicities of the structure sheaf vanish there.
            tangent_weights: vec![vec![], vec![]],
            em: vec![LocalizedClass::zero(1), LocalizedClass::zero(1)],
            relations: vec![rel(vec![one(), -&one()], vec![2], "f_x - f_y")],
            basis: vec![vec![one(), one()], vec![zero(), d(2)]],
            pivots: vec![0, 1],
        },
    };
    // Unused parameter guard for Kn: the relation system does not depend
    // on n, but n still must be ≥ 1 (checked above).
    Ok(data)
}

/// A violated relation: its index in the catalogue and the remainder after
/// the failing division.
#[derive(Clone, Debug)]
pub struct RelationViolation {
    pub index: usize,
    pub label: String,
    pub remainder: LaurentPoly,
}

/// Evaluates every congruence relation of the surface on the tuple.
pub fn check_relations(
    kind: SurfaceKind,
    tuple: &[LaurentPoly],
) -> Result<Vec<RelationViolation>, SphericalError> {
    let data = surface_data(kind)?;
    if tuple.len() != data.points.len() {
        return Err(SphericalError::TupleLength {
            expected: data.points.len(),
            got: tuple.len(),
        });
    }
    Ok(check_relation_list(&data.relations, tuple))
}

pub fn check_relation_list(
    relations: &[CongruenceRelation],
    tuple: &[LaurentPoly],
) -> Vec<RelationViolation> {
    let mut out = Vec::new();
    for (index, r) in relations.iter().enumerate() {
        if let Err(remainder) = r.check(tuple) {
            out.push(RelationViolation {
                index,
                label: r.label.clone(),
                remainder,
            });
        }
    }
    out
}

/// A failed membership decision: the point at which the subtraction got
/// stuck and the residual tuple.
#[derive(Clone, Debug)]
pub struct NotMember {
    pub stuck_at: usize,
    pub residual: Vec<LaurentPoly>,
}

/// Decides membership in the span of the standard basis by sequential
/// subtraction: entries are zeroed one fixed point at a time using the
/// triangular basis, and each step requires an exact division.  Returns
/// the basis coefficients.  Membership succeeds exactly when the
/// congruence relations hold.
pub fn membership(
    kind: SurfaceKind,
    tuple: &[LaurentPoly],
) -> Result<Result<Vec<LaurentPoly>, NotMember>, SphericalError> {
    let data = surface_data(kind)?;
    if tuple.len() != data.points.len() {
        return Err(SphericalError::TupleLength {
            expected: data.points.len(),
            got: tuple.len(),
        });
    }
    let mut residual: Vec<LaurentPoly> = tuple.to_vec();
    let mut coeffs = Vec::with_capacity(data.basis.len());
    for (b, pivot) in data.basis.iter().zip(&data.pivots) {
        let c = match try_div(&residual[*pivot], &b[*pivot]) {
            Some(c) => c,
            None => {
                return Ok(Err(NotMember {
                    stuck_at: *pivot,
                    residual,
                }))
            }
        };
        for (r, basis_entry) in residual.iter_mut().zip(b) {
            *r = &*r - &(&c * basis_entry);
        }
        coeffs.push(c);
    }
    if residual.iter().any(|r| !r.is_zero()) {
        return Ok(Err(NotMember {
            stuck_at: data.points.len(),
            residual,
        }));
    }
    Ok(Ok(coeffs))
}

/// Σ_p f_p · em_p for the catalogued multiplicities; tuples satisfying the
/// relations integrate into `Z[e^{±t}]`.
pub fn abbv_sum(kind: SurfaceKind, tuple: &[LaurentPoly]) -> Result<LocalizedClass, SphericalError> {
    let data = surface_data(kind)?;
    if tuple.len() != data.points.len() {
        return Err(SphericalError::TupleLength {
            expected: data.points.len(),
            got: tuple.len(),
        });
    }
    let mut acc = LocalizedClass::zero(1);
    for (em, f) in data.em.iter().zip(tuple) {
        acc = &acc + &em.mul_poly(f);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Skeletons: global relation systems over a higher-rank lattice.
// ---------------------------------------------------------------------------

/// Fixed-point skeleton of a variety with finitely many fixed points and
/// invariant curves, plus rank-one surface components: the input to the
/// global relation assembly.
#[derive(Clone, Debug)]
pub struct SphericalSkeleton {
    pub rank: usize,
    pub points: Vec<String>,
    pub curves: Vec<(usize, usize, Character)>,
    pub surfaces: Vec<(SurfaceKind, Character, Vec<usize>)>,
}

impl SphericalSkeleton {
    pub fn point_index(&self, label: &str) -> Result<usize, SphericalError> {
        self.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| SphericalError::UnknownLabel(label.to_string()))
    }
}

/// Substitutes `t ↦ χ/2` into a rank-one Laurent polynomial: the exponent
/// `k·t` becomes `(k/2)·χ`, which for odd `k` requires `χ/2` to be a
/// lattice character.
fn substitute_root(f: &LaurentPoly, root: &Character) -> Result<LaurentPoly, SphericalError> {
    let rank = root.rank();
    let mut out = LaurentPoly::zero(rank);
    for (e, c) in f.terms() {
        let k = e.0[0];
        let img = scaled_half(root, k)?;
        out = &out + &LaurentPoly::exp(&img).scale(c);
    }
    Ok(out)
}

fn scaled_half(root: &Character, k: i64) -> Result<Character, SphericalError> {
    if k % 2 == 0 {
        Ok(root.scaled(k / 2))
    } else if root.0.iter().all(|&x| x % 2 == 0) {
        let half = Character(root.0.iter().map(|&x| x / 2).collect());
        Ok(half.scaled(k))
    } else {
        Err(SphericalError::HalfWeightNotIntegral { root: root.clone() })
    }
}

/// Expands a skeleton into its global relation list: one two-term relation
/// per curve, and the surface systems with `e^{−t} ↦ e^{−χ/2}` substituted.
/// Component intersections are glued by shared point labels.
pub fn assemble_system(
    sk: &SphericalSkeleton,
) -> Result<Vec<CongruenceRelation>, SphericalError> {
    let n = sk.points.len();
    let rank = sk.rank;
    let mut out = Vec::new();
    for (i, (p, q, chi)) in sk.curves.iter().enumerate() {
        if chi.is_zero() {
            return Err(SphericalError::ZeroRoot);
        }
        let mut coeffs = vec![LaurentPoly::zero(rank); n];
        coeffs[*p] = LaurentPoly::one(rank);
        coeffs[*q] = -&LaurentPoly::one(rank);
        out.push(CongruenceRelation {
            coeffs,
            moduli: vec![chi.clone()],
            label: format!("curve {i}: f_{} - f_{}", sk.points[*p], sk.points[*q]),
        });
    }
    for (kind, root, assignment) in &sk.surfaces {
        if root.is_zero() {
            return Err(SphericalError::ZeroRoot);
        }
        let data = surface_data(*kind)?;
        if assignment.len() != data.points.len() {
            return Err(SphericalError::PointCount {
                expected: data.points.len(),
                got: assignment.len(),
            });
        }
        for r in &data.relations {
            let mut coeffs = vec![LaurentPoly::zero(rank); n];
            for (local, &global) in assignment.iter().enumerate() {
                let c = substitute_root(&r.coeffs[local], root)?;
                coeffs[global] = &coeffs[global] + &c;
            }
            let moduli = r
                .moduli
                .iter()
                .map(|m| scaled_half(root, m.0[0]))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(CongruenceRelation {
                coeffs,
                moduli,
                label: format!("{kind}: {}", r.label),
            });
        }
    }
    Ok(out)
}

/// Assembles the skeleton's system and evaluates it on the tuple.
pub fn check_skeleton(
    sk: &SphericalSkeleton,
    tuple: &[LaurentPoly],
) -> Result<Vec<RelationViolation>, SphericalError> {
    if tuple.len() != sk.points.len() {
        return Err(SphericalError::TupleLength {
            expected: sk.points.len(),
            got: tuple.len(),
        });
    }
    let system = assemble_system(sk)?;
    Ok(check_relation_list(&system, tuple))
}

/// Parses the skeleton file format:
///
/// ```text
/// rank n
/// point <label>
/// curve <p> <q> weight <character>
/// surface <kind> root <character> points <labels…>
/// ```
pub fn parse_skeleton(text: &str) -> Result<SphericalSkeleton, SphericalError> {
    let mut rank: Option<usize> = None;
    let mut points: Vec<String> = Vec::new();
    let mut curve_lines: Vec<(usize, String, String, String)> = Vec::new();
    let mut surface_lines: Vec<(usize, String, String, Vec<String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| SphericalError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[0] {
            "rank" => {
                rank = Some(
                    parts
                        .get(1)
                        .ok_or_else(|| err("missing rank"))?
                        .parse()
                        .map_err(|_| err("bad rank"))?,
                );
            }
            "point" => {
                let label = parts.get(1).ok_or_else(|| err("missing label"))?;
                points.push(label.to_string());
            }
            "curve" => {
                if parts.len() != 5 || parts[3] != "weight" {
                    return Err(err("expected: curve <p> <q> weight <character>"));
                }
                curve_lines.push((
                    lineno + 1,
                    parts[1].to_string(),
                    parts[2].to_string(),
                    parts[4].to_string(),
                ));
            }
            "surface" => {
                if parts.len() < 6 || parts[2] != "root" || parts[4] != "points" {
                    return Err(err(
                        "expected: surface <kind> root <character> points <labels…>",
                    ));
                }
                surface_lines.push((
                    lineno + 1,
                    parts[1].to_string(),
                    parts[3].to_string(),
                    parts[5..].iter().map(|s| s.to_string()).collect(),
                ));
            }
            other => return Err(err(&format!("unknown directive '{other}'"))),
        }
    }
    let rank = rank.ok_or(SphericalError::Parse {
        line: 0,
        msg: "missing 'rank' line".into(),
    })?;
    let mut sk = SphericalSkeleton {
        rank,
        points,
        curves: Vec::new(),
        surfaces: Vec::new(),
    };
    for (line, p, q, chi) in curve_lines {
        let p = sk.point_index(&p)?;
        let q = sk.point_index(&q)?;
        let chi = crate::ring::parse_character(&chi, rank).map_err(|e| SphericalError::Parse {
            line,
            msg: e.to_string(),
        })?;
        sk.curves.push((p, q, chi));
    }
    for (line, kind, root, labels) in surface_lines {
        let kind = SurfaceKind::parse(&kind)?;
        let root = crate::ring::parse_character(&root, rank).map_err(|e| SphericalError::Parse {
            line,
            msg: e.to_string(),
        })?;
        let assignment = labels
            .iter()
            .map(|l| sk.point_index(l))
            .collect::<Result<Vec<_>, _>>()?;
        sk.surfaces.push((kind, root, assignment));
    }
    Ok(sk)
}

/// Convenience for tests: a tuple from expression strings over `t`.
pub fn tuple_from_strs(entries: &[&str]) -> Vec<LaurentPoly> {
    entries
        .iter()
        .map(|s| crate::ring::parse_poly(s, 1).unwrap())
        .collect()
}

/// Parses a labelled tuple file, `point <label>: <expression>`, against a
/// list of point labels; every label must be assigned exactly once.
pub fn parse_labelled_tuple(
    labels: &[&str],
    rank: usize,
    text: &str,
) -> Result<Vec<LaurentPoly>, SphericalError> {
    let mut out: Vec<Option<LaurentPoly>> = vec![None; labels.len()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| SphericalError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let rest = line
            .strip_prefix("point")
            .ok_or_else(|| err("expected 'point <label>: <expression>'"))?;
        let (label, expr) = rest
            .split_once(':')
            .ok_or_else(|| err("missing ':' after label"))?;
        let label = label.trim();
        let idx = labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| SphericalError::UnknownLabel(label.to_string()))?;
        let poly = crate::ring::parse_poly(expr.trim(), rank)
            .map_err(|e| err(&e.to_string()))?;
        out[idx] = Some(poly);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| SphericalError::UnknownLabel(labels[i].to_string())))
        .collect()
}

/// Like [`parse_labelled_tuple`] for owned label lists (skeleton points).
pub fn parse_labelled_tuple_owned(
    labels: &[String],
    rank: usize,
    text: &str,
) -> Result<Vec<LaurentPoly>, SphericalError> {
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    parse_labelled_tuple(&refs, rank, text)
}

/// True when every exponent is even, i.e. the polynomial lies in the
/// subring `Z[e^{±2t}]` (the character ring of the quotient torus in the
/// double-cover case).
pub fn in_even_subring(f: &LaurentPoly) -> bool {
    f.terms().all(|(e, _)| e.0[0] % 2 == 0)
}

/// Membership for the double-cover case: the image over the smaller torus
/// is cut out by the same divisibility conditions, taken in the subring
/// `Z[e^{±2t}]`.  A tuple belongs exactly when every entry is even and it
/// satisfies the relations; the returned decomposition coefficients live
/// over the covering ring `Z[e^{±t}]`.
pub fn membership_even_subring(
    kind: SurfaceKind,
    tuple: &[LaurentPoly],
) -> Result<Result<Vec<LaurentPoly>, NotMember>, SphericalError> {
    if let Some(stuck_at) = tuple.iter().position(|f| !in_even_subring(f)) {
        return Ok(Err(NotMember {
            stuck_at,
            residual: tuple.to_vec(),
        }));
    }
    membership(kind, tuple)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn p(s: &str) -> LaurentPoly {
        parse_poly(s, 1).unwrap()
    }

    fn passes(kind: SurfaceKind, tuple: &[LaurentPoly]) -> bool {
        check_relations(kind, tuple).unwrap().is_empty()
    }

    fn member(kind: SurfaceKind, tuple: &[LaurentPoly]) -> bool {
        membership(kind, tuple).unwrap().is_ok()
    }

    #[test]
    fn fn_weight_table() {
        let data = surface_data(SurfaceKind::Fn(1)).unwrap();
        assert_eq!(data.points, vec!["x", "y", "z", "w"]);
        assert_eq!(data.tangent_weights[0], vec![t(2), t(1)]);
        assert_eq!(data.tangent_weights[1], vec![t(-2), t(-1)]);
        assert_eq!(data.tangent_weights[2], vec![t(2), t(-1)]);
        assert_eq!(data.tangent_weights[3], vec![t(-2), t(1)]);
        assert!(matches!(
            surface_data(SurfaceKind::Fn(0)),
            Err(SphericalError::InvalidParameter(0))
        ));
    }

    #[test]
    fn pv_basis_triples_pass() {
        let triples = [
            tuple_from_strs(&["1", "1", "1"]),
            tuple_from_strs(&["0", "1 - e^{-2*t}", "1 - e^{-4*t}"]),
            tuple_from_strs(&["0", "0", "(1 - e^{-2*t})*(1 - e^{-4*t})"]),
        ];
        for (i, tr) in triples.iter().enumerate() {
            assert!(passes(SurfaceKind::PV, tr), "triple {i}");
            let coeffs = membership(SurfaceKind::PV, tr).unwrap().unwrap();
            // Unit coordinate vectors.
            for (j, c) in coeffs.iter().enumerate() {
                if j == i {
                    assert!(c.is_one());
                } else {
                    assert!(c.is_zero());
                }
            }
        }
    }

    #[test]
    fn pv_outlier_fails_exactly_the_three_term_relation() {
        let triple = tuple_from_strs(&["0", "0", "1 - e^{-4*t}"]);
        let violations = check_relations(SurfaceKind::PV, &triple).unwrap();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].index, 3);
        assert!(!member(SurfaceKind::PV, &triple));
    }

    #[test]
    fn standard_bases_pass_and_give_unit_vectors() {
        let kinds = [
            SurfaceKind::Point,
            SurfaceKind::P1,
            SurfaceKind::PV,
            SurfaceKind::P1xP1,
            SurfaceKind::Fn(1),
            SurfaceKind::Fn(2),
            SurfaceKind::Fn(3),
            SurfaceKind::Pn(1),
            SurfaceKind::Pn(2),
            SurfaceKind::Pn(3),
            SurfaceKind::Kn(1),
            SurfaceKind::Kn(2),
        ];
        for kind in kinds {
            let data = surface_data(kind).unwrap();
            for (i, b) in data.basis.iter().enumerate() {
                assert!(
                    check_relation_list(&data.relations, b).is_empty(),
                    "{kind} basis {i} fails relations"
                );
                let coeffs = membership(kind, b).unwrap().unwrap_or_else(|nm| {
                    panic!("{kind} basis {i} not a member: {nm:?}")
                });
                for (j, c) in coeffs.iter().enumerate() {
                    assert_eq!(j == i, c.is_one(), "{kind} basis {i} coeff {j}");
                }
            }
        }
    }

    #[test]
    fn fn_fiber_class_example() {
        // (0, (1-e^{-2t}) g, 0, (1-e^{-2t}) g) is g·(second basis tuple).
        let g = p("3 - e^{t}");
        let f = &d(2) * &g;
        let tuple = vec![zero(), f.clone(), zero(), f];
        let coeffs = membership(SurfaceKind::Fn(2), &tuple).unwrap().unwrap();
        assert!(coeffs[0].is_zero());
        assert_eq!(coeffs[1], g);
        assert!(coeffs[2].is_zero());
        assert!(coeffs[3].is_zero());
    }

    #[test]
    fn constant_tuples_pass_everywhere() {
        // This is the check that pins the contested signs: the constant
        // tuple restricts the structure sheaf and must satisfy everything.
        let g = p("e^{-2*t} + 5");
        for kind in [
            SurfaceKind::P1,
            SurfaceKind::PV,
            SurfaceKind::P1xP1,
            SurfaceKind::Fn(1),
            SurfaceKind::Fn(2),
            SurfaceKind::Fn(5),
            SurfaceKind::Pn(1),
            SurfaceKind::Pn(2),
            SurfaceKind::Pn(5),
            SurfaceKind::Kn(3),
        ] {
            let n = surface_data(kind).unwrap().points.len();
            let tuple = vec![g.clone(); n];
            assert!(passes(kind, &tuple), "{kind}");
            assert!(member(kind, &tuple), "{kind}");
        }
    }

    #[test]
    fn abbv_integrality_on_members() {
        for kind in [
            SurfaceKind::PV,
            SurfaceKind::P1xP1,
            SurfaceKind::Fn(1),
            SurfaceKind::Fn(2),
            SurfaceKind::Pn(2),
            SurfaceKind::Pn(3),
        ] {
            let data = surface_data(kind).unwrap();
            for b in &data.basis {
                let s = abbv_sum(kind, b).unwrap();
                assert!(s.as_poly().is_some(), "{kind}: {s:?}");
            }
        }
    }

    #[test]
    fn pn_matches_fn_with_identified_entries() {
        // Membership for the contracted surface agrees with the ruled
        // surface after duplicating the z-entry into the w-slot.
        for n in [1, 2, 3, 4] {
            let samples = [
                tuple_from_strs(&["1", "1", "1"]),
                tuple_from_strs(&["0", "(1-e^{-2*t})*(1-e^{-4*t})", "0"]),
                tuple_from_strs(&["1", "e^{-2*t}", "e^{-4*t}"]),
                tuple_from_strs(&["0", "1 - e^{-2*t}", "1 - e^{-2*t}"]),
            ];
            for s in samples {
                let lifted = vec![s[0].clone(), s[1].clone(), s[2].clone(), s[2].clone()];
                let pn = member(SurfaceKind::Pn(n), &s);
                let fnm = member(SurfaceKind::Fn(n), &lifted);
                assert_eq!(pn, fnm, "n={n}, tuple {s:?}");
                let pn_rel = passes(SurfaceKind::Pn(n), &s);
                assert_eq!(pn, pn_rel, "membership vs relations, n={n}");
            }
        }
    }

    #[test]
    fn skeleton_curve_only() {
        let sk = SphericalSkeleton {
            rank: 2,
            points: vec!["a".into(), "b".into()],
            curves: vec![(0, 1, Character(vec![1, 0]))],
            surfaces: vec![],
        };
        let good = vec![
            parse_poly("1", 2).unwrap(),
            parse_poly("e^{u1}", 2).unwrap(),
        ];
        assert!(check_skeleton(&sk, &good).unwrap().is_empty());
        let bad = vec![
            parse_poly("1", 2).unwrap(),
            parse_poly("e^{u2}", 2).unwrap(),
        ];
        assert!(!check_skeleton(&sk, &bad).unwrap().is_empty());
    }

    #[test]
    fn skeleton_surface_substitution() {
        // One ℙ(V) component with root χ = u1 on a rank-2 lattice.
        let sk = SphericalSkeleton {
            rank: 2,
            points: vec!["x".into(), "y".into(), "z".into()],
            curves: vec![],
            surfaces: vec![(SurfaceKind::PV, Character(vec![1, 0]), vec![0, 1, 2])],
        };
        let system = assemble_system(&sk).unwrap();
        assert_eq!(system.len(), 4);
        // The 3-term relation has moduli (1-e^{-u1})(1-e^{-2u1}).
        let three_term = &system[3];
        assert_eq!(
            three_term.moduli,
            vec![Character(vec![1, 0]), Character(vec![2, 0])]
        );
        // Substituted basis tuples still pass.
        let lift = |s: &str| {
            let f = parse_poly(s, 1).unwrap();
            substitute_root(&f, &Character(vec![1, 0])).unwrap()
        };
        let b2 = vec![lift("0"), lift("1 - e^{-2*t}"), lift("1 - e^{-4*t}")];
        assert!(check_relation_list(&system, &b2).is_empty());
        let bad = vec![lift("0"), lift("0"), lift("1 - e^{-4*t}")];
        let violations = check_relation_list(&system, &bad);
        assert_eq!(violations.len(), 1);
    }

    #[test]
    fn skeleton_with_shared_points_glues_components() {
        // A surface component and a curve sharing the point z: the tuple
        // must satisfy both systems through the single shared value.
        let sk = SphericalSkeleton {
            rank: 2,
            points: vec!["x".into(), "y".into(), "z".into(), "w".into()],
            curves: vec![(2, 3, Character(vec![0, 1]))],
            surfaces: vec![(SurfaceKind::PV, Character(vec![2, 0]), vec![0, 1, 2])],
        };
        let lift = |s: &str| {
            let f = parse_poly(s, 1).unwrap();
            substitute_root(&f, &Character(vec![2, 0])).unwrap()
        };
        // Basis triple on the surface, constant along the curve.
        let good = vec![
            lift("0"),
            lift("1 - e^{-2*t}"),
            lift("1 - e^{-4*t}"),
            lift("1 - e^{-4*t}"),
        ];
        assert!(check_skeleton(&sk, &good).unwrap().is_empty());
        // Break only the curve condition: the surface relations still hold.
        let bad = vec![
            lift("0"),
            lift("1 - e^{-2*t}"),
            lift("1 - e^{-4*t}"),
            parse_poly("e^{u1}", 2).unwrap(),
        ];
        let violations = check_skeleton(&sk, &bad).unwrap();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].label.starts_with("curve"));
    }

    #[test]
    fn odd_parameter_needs_half_integral_root() {
        let sk = SphericalSkeleton {
            rank: 2,
            points: (0..4).map(|i| format!("p{i}")).collect(),
            curves: vec![],
            surfaces: vec![(SurfaceKind::Fn(3), Character(vec![1, 0]), vec![0, 1, 2, 3])],
        };
        assert!(matches!(
            assemble_system(&sk),
            Err(SphericalError::HalfWeightNotIntegral { .. })
        ));
        let sk_even = SphericalSkeleton {
            rank: 2,
            points: (0..4).map(|i| format!("p{i}")).collect(),
            curves: vec![],
            surfaces: vec![(SurfaceKind::Fn(3), Character(vec![2, 0]), vec![0, 1, 2, 3])],
        };
        assert!(assemble_system(&sk_even).is_ok());
    }

    #[test]
    fn parse_skeleton_round_trip() {
        let text = "rank 2\npoint x\npoint y\npoint z\n\
                    curve x y weight u1\n\
                    surface pv root 2*u1 points x y z\n";
        let sk = parse_skeleton(text).unwrap();
        assert_eq!(sk.points.len(), 3);
        assert_eq!(sk.curves.len(), 1);
        assert_eq!(sk.surfaces.len(), 1);
        assert_eq!(sk.surfaces[0].1, Character(vec![2, 0]));
        assert!(parse_skeleton("point x").is_err());
        assert!(parse_skeleton("rank 1\nsurface pv root t points a b c").is_err());
    }

    #[test]
    fn even_subring_test() {
        assert!(in_even_subring(&p("1 + e^{-2*t} - 3*e^{4*t}")));
        assert!(!in_even_subring(&p("e^{t}")));
    }

    #[test]
    fn even_subring_membership() {
        // Even tuples decide as over the covering ring; odd entries are
        // rejected outright.
        let even = tuple_from_strs(&["0", "1 - e^{-2*t}", "1 - e^{-4*t}"]);
        assert!(membership_even_subring(SurfaceKind::PV, &even)
            .unwrap()
            .is_ok());
        let odd = tuple_from_strs(&["0", "1 - e^{-t}", "1 - e^{-4*t}"]);
        assert!(membership_even_subring(SurfaceKind::PV, &odd)
            .unwrap()
            .is_err());
        // Quotients of even tuples by even pivots stay even for even kinds.
        let data = surface_data(SurfaceKind::Fn(2)).unwrap();
        let g = p("1 + e^{-2*t}");
        let tuple: Vec<LaurentPoly> = data.basis[1].iter().map(|b| &g * b).collect();
        let coeffs = membership_even_subring(SurfaceKind::Fn(2), &tuple)
            .unwrap()
            .unwrap();
        assert!(coeffs.iter().all(in_even_subring));
    }
}
