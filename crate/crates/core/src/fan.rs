//! Rational polyhedral fans: cones, faces, walls, smoothness and
//! multiplicity, stellar subdivision and resolution of singularities,
//! T-Cartier divisors and their polytopes.
//!
//! Sign conventions are pinned once and for all by the lattice-point
//! identity: for a nef divisor `D = Σ a_ρ D_ρ`, the vertex character of a
//! maximal cone `σ` solves `⟨m_σ, v_ρ⟩ = −a_ρ` on the rays of `σ`, the
//! polytope is `{m : ⟨m, v_ρ⟩ ≥ −a_ρ}`, and summing `e^{m_σ}` against the
//! fixed-point multiplicities reproduces `Σ_{m ∈ P ∩ M} e^m` exactly.

use crate::lin;
use crate::ring::Character;
use num::{BigRational, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

pub type ConeId = usize;

/// A cone in the fan, stored as a sorted list of ray indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cone {
    pub rays: Vec<usize>,
    pub dim: usize,
}

/// A codimension-one cone shared by exactly two maximal cones, with the
/// primitive character spanning its orthogonal, sign-normalized so the
/// first nonzero coordinate is positive.
#[derive(Clone, Debug)]
pub struct Wall {
    pub face: ConeId,
    pub sides: (ConeId, ConeId),
    pub weight: Character,
}

/// A torus-invariant divisor: one integer per ray, in ray order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TDivisor(pub Vec<i64>);

/// An H-representation `{m : ⟨normal_i, m⟩ ≥ offset_i}`.
#[derive(Clone, Debug)]
pub struct HPolytope {
    pub normals: Vec<Vec<i64>>,
    pub offsets: Vec<i64>,
}

impl HPolytope {
    pub fn contains(&self, m: &Character) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, &o)| lin::dot(n, &m.0) >= o)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("rank must be positive")]
    ZeroRank,
    #[error("ray {index} has wrong dimension (expected {rank})")]
    RayRank { index: usize, rank: usize },
    #[error("ray {index} is not primitive: {ray:?}")]
    NonPrimitiveRay { index: usize, ray: Vec<i64> },
    #[error("ray {index} is zero")]
    ZeroRay { index: usize },
    #[error("duplicate ray {index}")]
    DuplicateRay { index: usize },
    #[error("cone {rays:?} references ray {index} out of range")]
    RayIndexOutOfRange { rays: Vec<usize>, index: usize },
    #[error("cone {rays:?} is not pointed")]
    NotPointed { rays: Vec<usize> },
    #[error("cone {rays:?} has a non-extremal generator (ray {index})")]
    NonExtremalRay { rays: Vec<usize>, index: usize },
    #[error("cones {a:?} and {b:?} overlap: intersection is not a common face")]
    Overlap { a: Vec<usize>, b: Vec<usize> },
    #[error("no cones declared")]
    Empty,
    #[error("fan is not complete (facet of {cone:?} lies on the boundary)")]
    NotComplete { cone: Vec<usize> },
    #[error("operation requires a complete fan")]
    RequiresComplete,
    #[error("multiplicity is only defined for simplicial cones")]
    NotSimplicial,
    #[error("dual generators require a smooth full-dimensional cone")]
    NotSmoothFullDim,
    #[error("divisor is not Cartier on cone {cone:?}")]
    NotCartier { cone: Vec<usize> },
    #[error("divisor has wrong number of coefficients")]
    DivisorLength,
    #[error("unknown divisor {0}")]
    UnknownDivisor(String),
    #[error("fan file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A validated fan: primitive rays, pointed cones with extremal generators,
/// pairwise intersections in common faces, full face closure.
#[derive(Clone, Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Cone>,
    maximal: Vec<ConeId>,
    complete: bool,
    divisors: BTreeMap<String, TDivisor>,
}

impl Fan {
    /// Builds and validates a fan from ray vectors and maximal cones
    /// (faces are generated automatically).
    pub fn new(
        rank: usize,
        rays: Vec<Vec<i64>>,
        maximal_rays: Vec<Vec<usize>>,
    ) -> Result<Fan, FanError> {
        Self::build(rank, rays, maximal_rays, true)
    }

    /// Constructor for fans produced by subdivision, which are non-
    /// overlapping by construction: skips the quadratic pairwise
    /// intersection checks but keeps all per-cone validation.
    pub(crate) fn new_refinement(
        rank: usize,
        rays: Vec<Vec<i64>>,
        maximal_rays: Vec<Vec<usize>>,
    ) -> Result<Fan, FanError> {
        Self::build(rank, rays, maximal_rays, false)
    }

    fn build(
        rank: usize,
        rays: Vec<Vec<i64>>,
        maximal_rays: Vec<Vec<usize>>,
        check_overlaps: bool,
    ) -> Result<Fan, FanError> {
        if rank == 0 {
            return Err(FanError::ZeroRank);
        }
        for (index, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(FanError::RayRank { index, rank });
            }
            if r.iter().all(|&x| x == 0) {
                return Err(FanError::ZeroRay { index });
            }
            if !lin::is_primitive(r) {
                return Err(FanError::NonPrimitiveRay {
                    index,
                    ray: r.clone(),
                });
            }
        }
        for (index, r) in rays.iter().enumerate() {
            if rays[..index].contains(r) {
                return Err(FanError::DuplicateRay { index });
            }
        }
        if maximal_rays.is_empty() {
            return Err(FanError::Empty);
        }

        let mut maximal_cones = Vec::new();
        for mut c in maximal_rays {
            c.sort_unstable();
            c.dedup();
            for &i in &c {
                if i >= rays.len() {
                    return Err(FanError::RayIndexOutOfRange { rays: c.clone(), index: i });
                }
            }
            let vecs: Vec<&[i64]> = c.iter().map(|&i| rays[i].as_slice()).collect();
            if !is_pointed(&vecs, rank) {
                return Err(FanError::NotPointed { rays: c });
            }
            for (pos, &i) in c.iter().enumerate() {
                if !is_extremal(&vecs, pos) {
                    return Err(FanError::NonExtremalRay { rays: c.clone(), index: i });
                }
            }
            maximal_cones.push(c);
        }
        maximal_cones.sort();
        maximal_cones.dedup();
        // Drop maximal cones contained in others.
        let contained: Vec<bool> = maximal_cones
            .iter()
            .map(|c| {
                maximal_cones
                    .iter()
                    .any(|d| d != c && c.iter().all(|i| d.contains(i)))
            })
            .collect();
        let maximal_cones: Vec<Vec<usize>> = maximal_cones
            .into_iter()
            .zip(contained)
            .filter_map(|(c, inside)| (!inside).then_some(c))
            .collect();

        // Pairwise intersection must be a common face.
        if check_overlaps {
            for (i, a) in maximal_cones.iter().enumerate() {
                for b in maximal_cones.iter().skip(i + 1) {
                    if !intersection_is_common_face(&rays, a, b, rank) {
                        return Err(FanError::Overlap {
                            a: a.clone(),
                            b: b.clone(),
                        });
                    }
                }
            }
        }

        // Face closure.
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &maximal_cones {
            for f in faces_of(&rays, c, rank) {
                all.insert(f);
            }
        }
        let cones: Vec<Cone> = all
            .into_iter()
            .map(|rayset| {
                let dim = cone_dim(&rays, &rayset);
                Cone { rays: rayset, dim }
            })
            .collect();
        let maximal: Vec<ConeId> = maximal_cones
            .iter()
            .map(|c| cones.iter().position(|x| &x.rays == c).unwrap())
            .collect();

        let mut fan = Fan {
            rank,
            rays,
            cones,
            maximal,
            complete: false,
            divisors: BTreeMap::new(),
        };
        fan.complete = fan.compute_complete();
        Ok(fan)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: ConeId) -> &Cone {
        &self.cones[id]
    }

    pub fn maximal_cones(&self) -> &[ConeId] {
        &self.maximal
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn divisors(&self) -> &BTreeMap<String, TDivisor> {
        &self.divisors
    }

    pub fn divisor(&self, name: &str) -> Result<&TDivisor, FanError> {
        self.divisors
            .get(name)
            .ok_or_else(|| FanError::UnknownDivisor(name.to_string()))
    }

    pub fn add_divisor(&mut self, name: &str, d: TDivisor) -> Result<(), FanError> {
        if d.0.len() != self.rays.len() {
            return Err(FanError::DivisorLength);
        }
        self.divisors.insert(name.to_string(), d);
        Ok(())
    }

    pub fn find_cone(&self, rayset: &[usize]) -> Option<ConeId> {
        let mut sorted = rayset.to_vec();
        sorted.sort_unstable();
        self.cones.iter().position(|c| c.rays == sorted)
    }

    /// A fan is complete when every facet of every maximal cone is shared
    /// with exactly one other maximal cone (and all maximal cones are
    /// full-dimensional).
    fn compute_complete(&self) -> bool {
        if self.maximal.iter().any(|&m| self.cones[m].dim != self.rank) {
            return false;
        }
        for &m in &self.maximal {
            for facet in self.facets_of_cone(m) {
                let count = self
                    .maximal
                    .iter()
                    .filter(|&&other| {
                        facet.iter().all(|i| self.cones[other].rays.contains(i))
                    })
                    .count();
                if count != 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Ray-index sets of the facets (codimension-one faces) of a cone.
    pub fn facets_of_cone(&self, id: ConeId) -> Vec<Vec<usize>> {
        let c = &self.cones[id];
        faces_of(&self.rays, &c.rays, self.rank)
            .into_iter()
            .filter(|f| cone_dim(&self.rays, f) + 1 == c.dim)
            .collect()
    }

    pub fn is_simplicial(&self, id: ConeId) -> bool {
        let c = &self.cones[id];
        c.rays.len() == c.dim
    }

    /// Index of the sublattice generated by the rays within the lattice of
    /// the cone's span.  Only defined for simplicial cones.
    pub fn multiplicity(&self, id: ConeId) -> Result<i64, FanError> {
        let c = &self.cones[id];
        if !self.is_simplicial(id) {
            return Err(FanError::NotSimplicial);
        }
        if c.rays.is_empty() {
            return Ok(1);
        }
        let m: Vec<Vec<i64>> = c.rays.iter().map(|&i| self.rays[i].clone()).collect();
        let (_, d, _) = lin::smith_normal_form(&m);
        Ok(d.iter().take(c.dim).map(|&x| x.abs()).product())
    }

    pub fn is_smooth_cone(&self, id: ConeId) -> bool {
        self.is_simplicial(id) && self.multiplicity(id) == Ok(1)
    }

    pub fn is_smooth(&self) -> bool {
        self.maximal.iter().all(|&m| self.is_smooth_cone(m))
    }

    /// The basis of `M` dual to the ray basis of a smooth full-dimensional
    /// cone: `⟨m_i, v_j⟩ = δ_ij`.
    pub fn dual_generators(&self, id: ConeId) -> Result<Vec<Character>, FanError> {
        let c = &self.cones[id];
        if c.dim != self.rank || !self.is_smooth_cone(id) {
            return Err(FanError::NotSmoothFullDim);
        }
        let n = self.rank;
        let mut duals = Vec::with_capacity(n);
        for i in 0..n {
            // Rows of the system are the rays: ⟨m, v_j⟩ = δ_ij.
            let a: Vec<Vec<i64>> = c.rays.iter().map(|&r| self.rays[r].clone()).collect();
            let b: Vec<i64> = (0..n).map(|j| i64::from(j == i)).collect();
            let sol = lin::solve_rational(&a, &b).expect("smooth cone is a basis");
            let m: Vec<i64> = sol
                .iter()
                .map(|x| {
                    assert!(x.is_integer(), "dual of unimodular basis is integral");
                    x.to_integer().to_i64().expect("dual generator overflow")
                })
                .collect();
            duals.push(Character(m));
        }
        Ok(duals)
    }

    /// Tangent weights of the distinguished fixed point of a smooth maximal
    /// cone: the negatives of the dual generators.
    pub fn tangent_weights(&self, id: ConeId) -> Result<Vec<Character>, FanError> {
        Ok(self.dual_generators(id)?.iter().map(|m| -m).collect())
    }

    /// All walls of a complete fan, each with its normalized weight.
    pub fn walls(&self) -> Result<Vec<Wall>, FanError> {
        if !self.complete {
            return Err(FanError::RequiresComplete);
        }
        let mut out = Vec::new();
        for (face_id, c) in self.cones.iter().enumerate() {
            if c.dim + 1 != self.rank {
                continue;
            }
            let adj: Vec<ConeId> = self
                .maximal
                .iter()
                .copied()
                .filter(|&m| c.rays.iter().all(|i| self.cones[m].rays.contains(i)))
                .filter(|&m| self.facets_of_cone(m).contains(&c.rays))
                .collect();
            if adj.len() != 2 {
                continue;
            }
            let mat: Vec<Vec<i64>> = c.rays.iter().map(|&i| self.rays[i].clone()).collect();
            let kernel = lin::integer_kernel(&mat, self.rank);
            assert_eq!(kernel.len(), 1, "wall orthogonal must be rank one");
            let mut w = lin::primitivize(&kernel[0]);
            if !lin::first_nonzero_positive(&w) {
                w = lin::neg(&w);
            }
            out.push(Wall {
                face: face_id,
                sides: (adj[0], adj[1]),
                weight: Character(w),
            });
        }
        Ok(out)
    }

    /// The vertex character of a Cartier divisor on a maximal cone:
    /// the integral solution of `⟨m, v_ρ⟩ = −a_ρ` over the cone's rays.
    pub fn divisor_vertex(&self, d: &TDivisor, id: ConeId) -> Result<Character, FanError> {
        if d.0.len() != self.rays.len() {
            return Err(FanError::DivisorLength);
        }
        let c = &self.cones[id];
        let a: Vec<Vec<i64>> = c.rays.iter().map(|&i| self.rays[i].clone()).collect();
        let b: Vec<i64> = c.rays.iter().map(|&i| -d.0[i]).collect();
        let not_cartier = || FanError::NotCartier { cone: c.rays.clone() };
        let sol = lin::solve_rational(&a, &b).ok_or_else(not_cartier)?;
        // The solution must be exact on all rays of the cone and integral.
        let mut m = Vec::with_capacity(self.rank);
        for x in &sol {
            if !x.is_integer() {
                return Err(not_cartier());
            }
            m.push(x.to_integer().to_i64().expect("vertex overflow"));
        }
        for (&i, &rhs) in c.rays.iter().zip(&b) {
            if lin::dot(&m, &self.rays[i]) != rhs {
                return Err(not_cartier());
            }
        }
        Ok(Character(m))
    }

    /// Nef test by vertex consistency: Cartier on every maximal cone and
    /// every vertex character satisfies all defining inequalities.
    pub fn is_nef(&self, d: &TDivisor) -> bool {
        if !self.complete {
            return false;
        }
        for &m in &self.maximal {
            let Ok(v) = self.divisor_vertex(d, m) else {
                return false;
            };
            for (i, ray) in self.rays.iter().enumerate() {
                if lin::dot(&v.0, ray) < -d.0[i] {
                    return false;
                }
            }
        }
        true
    }

    /// The divisor polytope `P_D = {m : ⟨m, v_ρ⟩ ≥ −a_ρ for all ρ}` as an
    /// exact H-representation.
    pub fn divisor_polytope(&self, d: &TDivisor) -> Result<HPolytope, FanError> {
        if d.0.len() != self.rays.len() {
            return Err(FanError::DivisorLength);
        }
        Ok(HPolytope {
            normals: self.rays.clone(),
            offsets: d.0.iter().map(|&a| -a).collect(),
        })
    }

    /// Exact lattice points of the divisor polytope, enumerated by bounding
    /// box plus membership test.  Requires a complete fan (bounded
    /// polytope).
    pub fn lattice_points(&self, d: &TDivisor) -> Result<Vec<Character>, FanError> {
        if !self.complete {
            return Err(FanError::RequiresComplete);
        }
        if d.0.len() != self.rays.len() {
            return Err(FanError::DivisorLength);
        }
        // Vertices of P_D are among the (rational) solutions on maximal cones.
        let mut lo = vec![BigRational::zero(); self.rank];
        let mut hi = vec![BigRational::zero(); self.rank];
        let mut any = false;
        for &mid in &self.maximal {
            let c = &self.cones[mid];
            let a: Vec<Vec<i64>> = c.rays.iter().map(|&i| self.rays[i].clone()).collect();
            let b: Vec<i64> = c.rays.iter().map(|&i| -d.0[i]).collect();
            if let Some(sol) = lin::solve_rational(&a, &b) {
                if !any {
                    lo = sol.clone();
                    hi = sol.clone();
                    any = true;
                } else {
                    for k in 0..self.rank {
                        if sol[k] < lo[k] {
                            lo[k] = sol[k].clone();
                        }
                        if sol[k] > hi[k] {
                            hi[k] = sol[k].clone();
                        }
                    }
                }
            }
        }
        if !any {
            return Ok(Vec::new()); // empty polytope
        }
        let lo: Vec<i64> = lo.iter().map(|x| x.ceil().to_integer().to_i64().unwrap()).collect();
        let hi: Vec<i64> = hi.iter().map(|x| x.floor().to_integer().to_i64().unwrap()).collect();
        let mut out = Vec::new();
        let mut cursor = lo.clone();
        'outer: loop {
            let inside = self
                .rays
                .iter()
                .enumerate()
                .all(|(i, ray)| lin::dot(&cursor, ray) >= -d.0[i]);
            if inside {
                out.push(Character(cursor.clone()));
            }
            for k in 0..self.rank {
                if cursor[k] < hi[k] {
                    cursor[k] += 1;
                    continue 'outer;
                }
                cursor[k] = lo[k];
            }
            break;
        }
        out.sort();
        Ok(out)
    }
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j]).collect())
        .collect()
}

/// Dimension of the span of the listed rays.
fn cone_dim(rays: &[Vec<i64>], rayset: &[usize]) -> usize {
    if rayset.is_empty() {
        return 0;
    }
    let m: Vec<Vec<i64>> = rayset.iter().map(|&i| rays[i].clone()).collect();
    let (_, d, _) = lin::smith_normal_form(&m);
    d.iter().filter(|&&x| x != 0).count()
}

/// Pointedness: no nonzero nonnegative combination of the generators is
/// zero; equivalently `Σ a_i v_i = 0, a_i ≥ 1` is infeasible.
#[allow(clippy::needless_range_loop)]
fn is_pointed(vecs: &[&[i64]], rank: usize) -> bool {
    if vecs.is_empty() {
        return true;
    }
    let n = vecs.len();
    let mut sys = Vec::new();
    for coord in 0..rank {
        let row: Vec<i64> = (0..n).map(|i| vecs[i][coord]).collect();
        sys.push(lin::Constraint::from_ints(&row, 0));
        sys.push(lin::Constraint::from_ints(&lin::neg(&row), 0));
    }
    for i in 0..n {
        let mut row = vec![0i64; n];
        row[i] = 1;
        sys.push(lin::Constraint::from_ints(&row, -1));
    }
    !lin::feasible(sys, n)
}

/// Is generator `pos` extremal, i.e. not a nonnegative combination of the
/// others?
fn is_extremal(vecs: &[&[i64]], pos: usize) -> bool {
    let rank = vecs[pos].len();
    let others: Vec<&[i64]> = vecs
        .iter()
        .enumerate()
        .filter_map(|(i, v)| (i != pos).then_some(*v))
        .collect();
    if others.is_empty() {
        return true;
    }
    let n = others.len();
    let mut sys = Vec::new();
    for coord in 0..rank {
        let row: Vec<i64> = (0..n).map(|i| others[i][coord]).collect();
        sys.push(lin::Constraint::from_ints(&row, -vecs[pos][coord]));
        sys.push(lin::Constraint::from_ints(&lin::neg(&row), vecs[pos][coord]));
    }
    for i in 0..n {
        let mut row = vec![0i64; n];
        row[i] = 1;
        sys.push(lin::Constraint::from_ints(&row, 0));
    }
    !lin::feasible(sys, n)
}

/// All faces of the cone on the given rays (including itself and `{0}`),
/// as sorted ray-index lists.  A face is the zero set of a supporting
/// functional; candidates come from kernels of subsets of the generators.
fn faces_of(rays: &[Vec<i64>], rayset: &[usize], rank: usize) -> Vec<Vec<usize>> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut sorted = rayset.to_vec();
    sorted.sort_unstable();
    found.insert(sorted.clone());
    found.insert(Vec::new());
    // Breadth-first through facets of faces.
    let mut queue = vec![sorted];
    while let Some(face) = queue.pop() {
        for facet in facets_of_rayset(rays, &face, rank) {
            if found.insert(facet.clone()) {
                queue.push(facet);
            }
        }
    }
    found.into_iter().collect()
}

/// Facets of the cone spanned by `rayset`, i.e. maximal proper faces.
fn facets_of_rayset(rays: &[Vec<i64>], rayset: &[usize], rank: usize) -> Vec<Vec<usize>> {
    let d = cone_dim(rays, rayset);
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![Vec::new()]; // the only facet of a ray is {0}
    }
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    // Work inside the span: a supporting functional vanishing on a
    // (d−1)-subset and nonnegative on the rest.
    let k = rayset.len();
    for subset in subsets_of_size(k, d - 1) {
        let m: Vec<Vec<i64>> = subset.iter().map(|&i| rays[rayset[i]].clone()).collect();
        let kernel = lin::integer_kernel(&m, rank);
        // Candidate functionals: kernel basis vectors that vanish on the
        // subset; also require them not to vanish on the whole cone span.
        for cand in &kernel {
            for sign in [1i64, -1] {
                let f: Vec<i64> = cand.iter().map(|&x| sign * x).collect();
                let vals: Vec<i64> = rayset.iter().map(|&r| lin::dot(&f, &rays[r])).collect();
                if vals.iter().all(|&v| v >= 0) && vals.iter().any(|&v| v > 0) {
                    let face: Vec<usize> = rayset
                        .iter()
                        .zip(&vals)
                        .filter_map(|(&r, &v)| (v == 0).then_some(r))
                        .collect();
                    if cone_dim(rays, &face) == d - 1 {
                        out.insert(face);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Do two validated pointed cones intersect in a common face?  Checks that
/// the face of `a` cut out by the constraints tight on `a ∩ b` is exactly
/// the cone on the common rays, and symmetrically.
fn intersection_is_common_face(
    rays: &[Vec<i64>],
    a: &[usize],
    b: &[usize],
    rank: usize,
) -> bool {
    let common: Vec<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
    tight_face_equals(rays, a, b, &common, rank) && tight_face_equals(rays, b, a, &common, rank)
}

/// The smallest face of `a` containing `a ∩ b` must have ray set `common`.
#[allow(clippy::needless_range_loop)]
fn tight_face_equals(
    rays: &[Vec<i64>],
    a: &[usize],
    b: &[usize],
    common: &[usize],
    rank: usize,
) -> bool {
    // Functionals supporting a: for each facet normal f of cone(a) with
    // f ≥ 0 on a, test whether a ∩ b ⊆ f⊥ via infeasibility of
    // { x ∈ a, x ∈ b, ⟨f, x⟩ ≥ 1 }.
    let na = a.len();
    let nb = b.len();
    let nvars = na + nb;
    let d = cone_dim(rays, a);
    let mut tight_rays: BTreeSet<usize> = a.iter().copied().collect();

    let mut normals: Vec<Vec<i64>> = Vec::new();
    if d >= 2 {
        for subset in subsets_of_size(a.len(), d - 1) {
            let m: Vec<Vec<i64>> = subset.iter().map(|&i| rays[a[i]].clone()).collect();
            for cand in lin::integer_kernel(&m, rank) {
                for sign in [1i64, -1] {
                    let f: Vec<i64> = cand.iter().map(|&x| sign * x).collect();
                    if a.iter().all(|&r| lin::dot(&f, &rays[r]) >= 0)
                        && a.iter().any(|&r| lin::dot(&f, &rays[r]) > 0)
                    {
                        normals.push(f);
                    }
                }
            }
        }
    }
    // Ray-dual functionals handle the {0}-face of one-dimensional cones.
    for &r in a {
        let f = rays[r].clone();
        if a.iter().all(|&s| lin::dot(&f, &rays[s]) >= 0) {
            normals.push(f);
        }
    }
    // Also functionals vanishing on all of span(a) (needed when a ∩ b is
    // reached only through span constraints).
    let ma: Vec<Vec<i64>> = a.iter().map(|&i| rays[i].clone()).collect();
    for cand in lin::integer_kernel(&ma, rank) {
        normals.push(cand.clone());
        normals.push(lin::neg(&cand));
    }

    for f in &normals {
        // x = Σ s_i v_i (i in a) = Σ t_j w_j (j in b); ⟨f, x⟩ ≥ 1 feasible?
        let mut sys = Vec::new();
        for coord in 0..rank {
            let mut row = vec![0i64; nvars];
            for (i, &r) in a.iter().enumerate() {
                row[i] = rays[r][coord];
            }
            for (j, &r) in b.iter().enumerate() {
                row[na + j] -= rays[r][coord];
            }
            sys.push(lin::Constraint::from_ints(&row, 0));
            sys.push(lin::Constraint::from_ints(&lin::neg(&row), 0));
        }
        for v in 0..nvars {
            let mut row = vec![0i64; nvars];
            row[v] = 1;
            sys.push(lin::Constraint::from_ints(&row, 0));
        }
        // ⟨f, Σ s_i v_i⟩ ≥ 1
        let mut frow = vec![0i64; nvars];
        for (i, &r) in a.iter().enumerate() {
            frow[i] = lin::dot(f, &rays[r]);
        }
        sys.push(lin::Constraint::from_ints(&frow, -1));
        if !lin::feasible(sys, nvars) {
            // f is tight on a ∩ b: rays of a off f⊥ cannot be in the face.
            tight_rays.retain(|&r| lin::dot(f, &rays[r]) == 0);
        }
    }
    let mut tight: Vec<usize> = tight_rays.into_iter().collect();
    tight.sort_unstable();
    let mut want = common.to_vec();
    want.sort_unstable();
    tight == want
}

// ---------------------------------------------------------------------------
// Stellar subdivision and resolution.
// ---------------------------------------------------------------------------

/// Pivot selection policy for the resolution loop; two policies are exposed
/// so resolution independence can be tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotPolicy {
    /// Box point with minimal coordinate sum, ties lexicographically.
    #[default]
    MinSum,
    /// Box point with minimal coordinate sum, ties anti-lexicographically.
    MinSumRevLex,
}

/// Stellar subdivision of a simplicial fan at a new primitive ray.
/// Every maximal cone containing the ray is replaced by the cones over its
/// facets not containing the ray.  The fiber map composes.
fn stellar_at(fan: &Fan, pivot: &[i64], fiber: &mut Vec<ConeId>) -> Fan {
    let mut rays = fan.rays.clone();
    let ray_index = match rays.iter().position(|r| r == pivot) {
        Some(i) => i,
        None => {
            rays.push(pivot.to_vec());
            rays.len() - 1
        }
    };
    let mut new_maximal: Vec<Vec<usize>> = Vec::new();
    let mut label: BTreeMap<Vec<usize>, ConeId> = BTreeMap::new();
    for (pos, &m) in fan.maximal.iter().enumerate() {
        let c = &fan.cones[m];
        debug_assert_eq!(c.rays.len(), c.dim, "stellar_at requires simplicial fans");
        let mat: Vec<Vec<i64>> = c.rays.iter().map(|&i| fan.rays[i].clone()).collect();
        let coords = lin::solve_rational(&transpose(&mat), pivot);
        let inside = coords
            .as_ref()
            .is_some_and(|x| x.iter().all(|v| !v.is_negative()));
        if !inside {
            new_maximal.push(c.rays.clone());
            label.insert(c.rays.clone(), fiber[pos]);
            continue;
        }
        let coords = coords.unwrap();
        for (k, coord) in coords.iter().enumerate() {
            if coord.is_zero() {
                continue; // pivot lies in the facet omitting k: cone survives there
            }
            // Replace generator k by the pivot.
            let mut next: Vec<usize> = c
                .rays
                .iter()
                .enumerate()
                .filter_map(|(i, &r)| (i != k).then_some(r))
                .collect();
            next.push(ray_index);
            next.sort_unstable();
            label.insert(next.clone(), fiber[pos]);
            new_maximal.push(next);
        }
    }
    let out =
        Fan::new_refinement(fan.rank, rays, new_maximal).expect("stellar subdivision stays valid");
    // Fan::new sorts the maximal cones; realign the fiber labels.
    *fiber = out
        .maximal
        .iter()
        .map(|&mc| label[&out.cones[mc].rays])
        .collect();
    out
}

/// Nonzero lattice points of the fundamental parallelepiped
/// `{Σ t_i v_i : 0 ≤ t_i < 1}` of a simplicial cone, with their coordinate
/// vectors `t` (rationals with denominator dividing the multiplicity).
fn box_points(fan: &Fan, id: ConeId) -> Vec<(Vec<i64>, Vec<BigRational>)> {
    let c = &fan.cones[id];
    let vecs: Vec<Vec<i64>> = c.rays.iter().map(|&i| fan.rays[i].clone()).collect();
    let n = vecs.len();
    let rank = fan.rank;
    // Enumerate integer points of the half-open box via the bounding box of
    // the parallelepiped corners.
    let mut lo = vec![0i64; rank];
    let mut hi = vec![0i64; rank];
    for mask in 0..(1usize << n) {
        let mut corner = vec![0i64; rank];
        for (i, v) in vecs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for k in 0..rank {
                    corner[k] += v[k];
                }
            }
        }
        for k in 0..rank {
            lo[k] = lo[k].min(corner[k]);
            hi[k] = hi[k].max(corner[k]);
        }
    }
    let tm = transpose(&vecs);
    let mut out = Vec::new();
    let mut cursor = lo.clone();
    'outer: loop {
        if cursor.iter().any(|&x| x != 0) {
            if let Some(t) = lin::solve_rational(&tm, &cursor) {
                let consistent = (0..rank).all(|k| {
                    let mut acc = BigRational::zero();
                    for (i, v) in vecs.iter().enumerate() {
                        acc += &t[i] * BigRational::from_integer(v[k].into());
                    }
                    acc == BigRational::from_integer(cursor[k].into())
                });
                let in_box = t
                    .iter()
                    .all(|x| !x.is_negative() && *x < BigRational::from_integer(1.into()));
                if consistent && in_box {
                    out.push((cursor.clone(), t));
                }
            }
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

fn total_multiplicity(fan: &Fan) -> i64 {
    fan.maximal
        .iter()
        .map(|&m| fan.multiplicity(m).expect("simplicial") - 1)
        .sum()
}

/// Smooth refinement of a simplicial fan by repeated stellar subdivision,
/// together with the map sending each maximal cone of the refinement to the
/// maximal cone of the input containing it.  Non-simplicial input is
/// triangulated first.
pub fn resolve(fan: &Fan, policy: PivotPolicy) -> (Fan, Vec<ConeId>) {
    let (mut current, mut fiber) = stellar_triangulate_with_map(fan);
    loop {
        let worst = current
            .maximal
            .iter()
            .copied()
            .filter(|&m| !current.is_smooth_cone(m))
            .max_by_key(|&m| (current.multiplicity(m).unwrap(), std::cmp::Reverse(current.cones[m].rays.clone())));
        let Some(worst) = worst else {
            return (current, fiber);
        };
        let mut candidates: Vec<(Vec<i64>, Vec<BigRational>)> = box_points(&current, worst);
        assert!(!candidates.is_empty(), "singular simplicial cone has a box point");
        candidates.sort_by(|(pa, ta), (pb, tb)| {
            let sa: BigRational = ta.iter().sum();
            let sb: BigRational = tb.iter().sum();
            sa.cmp(&sb).then_with(|| match policy {
                PivotPolicy::MinSum => pa.cmp(pb),
                PivotPolicy::MinSumRevLex => pb.cmp(pa),
            })
        });
        let before = total_multiplicity(&current);
        let mut accepted = None;
        for (point, _) in &candidates {
            let pivot = lin::primitivize(point);
            let mut trial_fiber = fiber.clone();
            let trial = stellar_at(&current, &pivot, &mut trial_fiber);
            if total_multiplicity(&trial) < before {
                accepted = Some((trial, trial_fiber));
                break;
            }
        }
        let (next, next_fiber) =
            accepted.expect("some box point strictly decreases total multiplicity");
        current = next;
        fiber = next_fiber;
    }
}

/// Simplicial refinement using only the existing rays (a pulling
/// triangulation in deterministic ray order).  Simplicial fans are
/// returned unchanged.
pub fn stellar_triangulate(fan: &Fan) -> Fan {
    stellar_triangulate_with_map(fan).0
}

fn stellar_triangulate_with_map(fan: &Fan) -> (Fan, Vec<ConeId>) {
    let mut new_maximal = Vec::new();
    let mut fiber = Vec::new();
    for (pos, &m) in fan.maximal.iter().enumerate() {
        for simplex in triangulate_rayset(&fan.rays, &fan.cones[m].rays, fan.rank) {
            new_maximal.push(simplex);
            fiber.push(pos);
        }
    }
    let out = Fan::new_refinement(fan.rank, fan.rays.clone(), new_maximal)
        .expect("triangulation of a valid fan is valid");
    // Fan::new sorts and dedups maximal cones; rebuild the map accordingly.
    let mut mapped = vec![0; out.maximal.len()];
    for (i, &mc) in out.maximal.iter().enumerate() {
        let rays = &out.cones[mc].rays;
        let mut found = None;
        for (pos, &m) in fan.maximal.iter().enumerate() {
            for simplex in triangulate_rayset(&fan.rays, &fan.cones[m].rays, fan.rank) {
                if &simplex == rays {
                    found = Some(pos);
                }
            }
        }
        mapped[i] = found.expect("triangulated cone traces back");
    }
    (out, mapped)
}

/// Pulling triangulation of a single pointed cone: recursively cone the
/// first ray over the triangulated facets not containing it.
fn triangulate_rayset(rays: &[Vec<i64>], rayset: &[usize], rank: usize) -> Vec<Vec<usize>> {
    let d = cone_dim(rays, rayset);
    if rayset.len() == d {
        return vec![rayset.to_vec()];
    }
    let apex = rayset[0];
    let mut out = Vec::new();
    for facet in facets_of_rayset(rays, rayset, rank) {
        if facet.contains(&apex) {
            continue;
        }
        for sub in triangulate_rayset(rays, &facet, rank) {
            let mut simplex = sub;
            simplex.push(apex);
            simplex.sort_unstable();
            out.push(simplex);
        }
    }
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Fan file format.
// ---------------------------------------------------------------------------

/// Parses the line-oriented fan format:
///
/// ```text
/// rank n
/// ray <n integers>            # index = order of appearance, from 0
/// cone <ray indices>          # maximal cones only
/// divisor <name> <one integer per ray>
/// ```
pub fn parse_fan(text: &str) -> Result<Fan, FanError> {
    let mut rank: Option<usize> = None;
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut cones: Vec<Vec<usize>> = Vec::new();
    let mut divisors: Vec<(String, Vec<i64>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| FanError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("rank") => {
                let n: usize = parts
                    .next()
                    .ok_or_else(|| err("missing rank"))?
                    .parse()
                    .map_err(|_| err("bad rank"))?;
                rank = Some(n);
            }
            Some("ray") => {
                let v: Result<Vec<i64>, _> = parts.map(str::parse).collect();
                let v = v.map_err(|_| err("bad ray coordinates"))?;
                if let Some(n) = rank {
                    if v.len() != n {
                        return Err(err(&format!("ray needs {n} coordinates")));
                    }
                }
                rays.push(v);
            }
            Some("cone") => {
                let v: Result<Vec<usize>, _> = parts.map(str::parse).collect();
                cones.push(v.map_err(|_| err("bad ray index"))?);
            }
            Some("divisor") => {
                let name = parts.next().ok_or_else(|| err("missing divisor name"))?;
                let v: Result<Vec<i64>, _> = parts.map(str::parse).collect();
                let v = v.map_err(|_| err("bad divisor coefficients"))?;
                divisors.push((name.to_string(), v));
            }
            Some(other) => return Err(err(&format!("unknown directive '{other}'"))),
            None => unreachable!(),
        }
    }
    let rank = rank.ok_or(FanError::Parse {
        line: 0,
        msg: "missing 'rank' line".into(),
    })?;
    let mut fan = Fan::new(rank, rays, cones)?;
    for (name, coeffs) in divisors {
        fan.add_divisor(&name, TDivisor(coeffs))?;
    }
    Ok(fan)
}

/// Renders a fan back into the file format (used by `resolve` output).
pub fn render_fan(fan: &Fan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rank {}", fan.rank);
    for r in &fan.rays {
        let coords: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "ray {}", coords.join(" "));
    }
    for &m in &fan.maximal {
        let idx: Vec<String> = fan.cones[m].rays.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "cone {}", idx.join(" "));
    }
    for (name, d) in &fan.divisors {
        let coords: Vec<String> = d.0.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "divisor {name} {}", coords.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn p112() -> Fan {
        parse_fan(
            "rank 2\nray 1 0\nray 0 1\nray -1 -2\ncone 0 1\ncone 1 2\ncone 0 2\n\
             divisor ample 0 1 0\ndivisor zero 0 0 0",
        )
        .unwrap()
    }

    fn p1() -> Fan {
        parse_fan("rank 1\nray 1\nray -1\ncone 0\ncone 1\ndivisor d2 0 2").unwrap()
    }

    #[allow(clippy::needless_range_loop)]
    fn cube() -> Fan {
        // Fan over the faces of the cube with vertices (±1, ±1, ±1).
        let mut rays = Vec::new();
        for x in [-1i64, 1] {
            for y in [-1i64, 1] {
                for z in [-1i64, 1] {
                    rays.push(vec![x, y, z]);
                }
            }
        }
        let mut cones = Vec::new();
        for axis in 0..3 {
            for side in [-1i64, 1] {
                let c: Vec<usize> = (0..8).filter(|&i| rays[i][axis] == side).collect();
                cones.push(c);
            }
        }
        Fan::new(3, rays, cones).unwrap()
    }

    #[test]
    fn p112_validates_and_is_complete() {
        let fan = p112();
        assert_eq!(fan.rank(), 2);
        assert!(fan.is_complete());
        assert_eq!(fan.maximal_cones().len(), 3);
    }

    #[test]
    fn p1_is_complete_rank_one() {
        let fan = p1();
        assert!(fan.is_complete());
        assert_eq!(fan.walls().unwrap().len(), 1);
        assert_eq!(fan.walls().unwrap()[0].weight, Character(vec![1]));
    }

    #[test]
    fn cube_fan_is_complete_and_non_simplicial() {
        let fan = cube();
        assert!(fan.is_complete());
        assert!(fan.maximal_cones().iter().all(|&m| !fan.is_simplicial(m)));
        assert_eq!(fan.rays().len(), 8);
        assert_eq!(fan.maximal_cones().len(), 6);
    }

    #[test]
    fn diagnostics_for_bad_input() {
        assert!(matches!(
            parse_fan("rank 2\nray 2 0\nray 0 1\ncone 0 1"),
            Err(FanError::NonPrimitiveRay { .. })
        ));
        assert!(matches!(
            parse_fan("rank 2\nray 1 0\nray -1 0\ncone 0 1"),
            Err(FanError::NotPointed { .. })
        ));
        // Overlapping cones: ⟨e1, e1+e2⟩ inside ⟨e1, e2⟩.
        assert!(matches!(
            parse_fan("rank 2\nray 1 0\nray 0 1\nray 1 1\ncone 0 1\ncone 0 2"),
            Err(FanError::Overlap { .. })
        ));
        assert!(matches!(
            parse_fan("rank 2\nray 1 0\ncone 0 1"),
            Err(FanError::RayIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn smoothness_and_multiplicity() {
        let fan = p112();
        let smooth = fan.find_cone(&[0, 1]).unwrap();
        assert!(fan.is_smooth_cone(smooth));
        assert_eq!(fan.multiplicity(smooth).unwrap(), 1);
        let singular = fan.find_cone(&[0, 2]).unwrap();
        assert!(fan.is_simplicial(singular));
        assert!(!fan.is_smooth_cone(singular));
        assert_eq!(fan.multiplicity(singular).unwrap(), 2);
        let cube = cube();
        let m = cube.maximal_cones()[0];
        assert!(matches!(cube.multiplicity(m), Err(FanError::NotSimplicial)));
    }

    #[test]
    fn dual_generators_match_hand_computation() {
        let fan = p112();
        let c01 = fan.find_cone(&[0, 1]).unwrap();
        assert_eq!(
            fan.dual_generators(c01).unwrap(),
            vec![Character(vec![1, 0]), Character(vec![0, 1])]
        );
        let c12 = fan.find_cone(&[1, 2]).unwrap();
        // rays e2, -e1-2e2 : duals -2u1+u2 (for e2) and -u1 (for the other).
        let duals = fan.dual_generators(c12).unwrap();
        assert!(duals.contains(&Character(vec![-2, 1])));
        assert!(duals.contains(&Character(vec![-1, 0])));
        let sing = fan.find_cone(&[0, 2]).unwrap();
        assert!(fan.dual_generators(sing).is_err());
    }

    #[test]
    fn walls_of_p112() {
        let fan = p112();
        let walls = fan.walls().unwrap();
        assert_eq!(walls.len(), 3);
        let weights: BTreeSet<Character> = walls.into_iter().map(|w| w.weight).collect();
        let expected: BTreeSet<Character> = [
            Character(vec![1, 0]),
            Character(vec![0, 1]),
            Character(vec![2, -1]),
        ]
        .into_iter()
        .collect();
        assert_eq!(weights, expected);
    }

    #[test]
    fn product_fan_has_four_walls() {
        let fan = parse_fan(
            "rank 2\nray 1 0\nray 0 1\nray -1 0\nray 0 -1\ncone 0 1\ncone 1 2\ncone 2 3\ncone 0 3",
        )
        .unwrap();
        assert_eq!(fan.walls().unwrap().len(), 4);
    }

    #[test]
    fn resolve_p112_adds_minus_e2() {
        let fan = p112();
        let (res, fiber) = resolve(&fan, PivotPolicy::MinSum);
        assert!(res.is_smooth());
        assert!(res.rays().contains(&vec![0, -1]));
        assert_eq!(res.maximal_cones().len(), 4);
        // Two of the new maximal cones sit over the singular cone.
        let sing_pos = fan
            .maximal_cones()
            .iter()
            .position(|&m| fan.cones()[m].rays == vec![0, 2])
            .unwrap();
        assert_eq!(fiber.iter().filter(|&&f| f == sing_pos).count(), 2);
        // Refinement: each new maximal cone has its rays inside the old cone.
        for (i, &mc) in res.maximal_cones().iter().enumerate() {
            let old = fan.cones()[fan.maximal_cones()[fiber[i]]].rays.clone();
            let old_vecs: Vec<&[i64]> = old.iter().map(|&r| fan.ray(r)).collect();
            for &r in &res.cones()[mc].rays {
                let v = res.ray(r);
                let m: Vec<Vec<i64>> = old_vecs.iter().map(|x| x.to_vec()).collect();
                let sol = lin::solve_rational(&transpose(&m), v).unwrap();
                assert!(sol.iter().all(|x| !x.is_negative()));
            }
        }
    }

    #[test]
    fn resolve_smooth_fan_is_identity() {
        let fan = p1();
        let (res, fiber) = resolve(&fan, PivotPolicy::MinSum);
        assert_eq!(res.maximal_cones().len(), fan.maximal_cones().len());
        assert_eq!(fiber, vec![0, 1]);
    }

    #[test]
    fn resolve_multiplicity_three_cone() {
        // ⟨e1, e1+3e2⟩ has multiplicity 3; a smooth refinement needs 2 new rays.
        let fan = Fan::new(2, vec![vec![1, 0], vec![1, 3]], vec![vec![0, 1]]).unwrap();
        let (res, _) = resolve(&fan, PivotPolicy::MinSum);
        assert!(res.is_smooth());
        assert_eq!(res.maximal_cones().len(), 3);
        assert_eq!(res.rays().len(), 4);
    }

    #[test]
    fn triangulate_cube_fan() {
        let fan = cube();
        let tri = stellar_triangulate(&fan);
        assert!(tri.maximal_cones().iter().all(|&m| tri.is_simplicial(m)));
        assert_eq!(tri.maximal_cones().len(), 12);
        assert!(tri.is_complete());
        // A simplicial fan is unchanged.
        let fan = p112();
        let tri = stellar_triangulate(&fan);
        assert_eq!(tri.maximal_cones().len(), 3);
    }

    #[test]
    fn resolve_cube_fan_to_smooth() {
        let fan = cube();
        let (res, fiber) = resolve(&fan, PivotPolicy::MinSum);
        assert!(res.is_smooth());
        assert!(res.is_complete());
        assert_eq!(fiber.len(), res.maximal_cones().len());
        // Every new maximal cone lies over one of the six original cones.
        assert!(fiber.iter().all(|&f| f < 6));
    }

    #[test]
    fn divisor_vertices_and_polytope_on_p1() {
        let fan = p1();
        let d = fan.divisor("d2").unwrap().clone();
        let c0 = fan.find_cone(&[0]).unwrap();
        let c1 = fan.find_cone(&[1]).unwrap();
        assert_eq!(fan.divisor_vertex(&d, c0).unwrap(), Character(vec![0]));
        assert_eq!(fan.divisor_vertex(&d, c1).unwrap(), Character(vec![2]));
        let pts = fan.lattice_points(&d).unwrap();
        assert_eq!(
            pts,
            vec![Character(vec![0]), Character(vec![1]), Character(vec![2])]
        );
        assert!(fan.is_nef(&d));
    }

    #[test]
    fn zero_divisor_polytope_is_origin() {
        for fan in [p1(), p112(), cube()] {
            let d = TDivisor(vec![0; fan.rays().len()]);
            assert_eq!(
                fan.lattice_points(&d).unwrap(),
                vec![Character::zero(fan.rank())]
            );
        }
    }

    #[test]
    fn h_representation_membership_agrees_with_enumeration() {
        let fan = p112();
        let d = fan.divisor("ample").unwrap().clone();
        let poly = fan.divisor_polytope(&d).unwrap();
        let pts = fan.lattice_points(&d).unwrap();
        for m in &pts {
            assert!(poly.contains(m));
        }
        assert!(!poly.contains(&Character(vec![5, 5])));
    }

    #[test]
    fn p112_ample_divisor() {
        let fan = p112();
        let d = fan.divisor("ample").unwrap().clone();
        assert!(fan.is_nef(&d));
        let pts = fan.lattice_points(&d).unwrap();
        assert_eq!(pts.len(), 4);
        // Vertex on the singular cone is the origin.
        let sing = fan.find_cone(&[0, 2]).unwrap();
        assert_eq!(fan.divisor_vertex(&d, sing).unwrap(), Character(vec![0, 0]));
        // Non-Cartier divisor is rejected with a diagnostic.
        let weil = TDivisor(vec![1, 0, 0]);
        assert!(matches!(
            fan.divisor_vertex(&weil, sing),
            Err(FanError::NotCartier { .. })
        ));
    }

    #[test]
    fn cube_octahedron_count() {
        let fan = cube();
        let d = TDivisor(vec![1; 8]);
        assert!(fan.is_nef(&d));
        // Octahedron |x|+|y|+|z| ≤ 1: 6 vertices plus the origin.
        assert_eq!(fan.lattice_points(&d).unwrap().len(), 7);
    }

    #[test]
    fn dual_pairing_is_identity() {
        let fan = p112();
        for &m in fan.maximal_cones() {
            if !fan.is_smooth_cone(m) {
                continue;
            }
            let duals = fan.dual_generators(m).unwrap();
            for (i, d) in duals.iter().enumerate() {
                for (j, &r) in fan.cones()[m].rays.iter().enumerate() {
                    assert_eq!(lin::dot(&d.0, fan.ray(r)), i64::from(i == j));
                }
            }
        }
    }

    #[test]
    fn render_parses_back() {
        let fan = p112();
        let text = render_fan(&fan);
        let back = parse_fan(&text).unwrap();
        assert_eq!(back.rays(), fan.rays());
        assert_eq!(back.maximal_cones().len(), fan.maximal_cones().len());
        assert!(back.divisors().contains_key("ample"));
    }
}
