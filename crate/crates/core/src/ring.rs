//! Exact arithmetic in the representation ring `R(T) = Z[M]` and its
//! localization at the multiplicative set generated by `1 − e^{−λ}`.
//!
//! A [`Character`] is a lattice exponent; a [`LaurentPoly`] is a finite
//! integer combination of formal exponentials `e^λ` in canonical sparse
//! form; a [`LocalizedClass`] is a Laurent polynomial numerator over a
//! multiset of denominator factors `1 − e^{−λ}` stored in a session-wide
//! canonical direction (first nonzero coordinate of the weight positive,
//! with the unit correction absorbed into the numerator).  Equality of
//! localized classes is always decided by cross-multiplication.

use crate::lin;
use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// A lattice character: an integer exponent vector of fixed rank.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Character(pub Vec<i64>);

impl Character {
    pub fn zero(rank: usize) -> Self {
        Character(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Character(self.0.iter().map(|&x| x * k).collect())
    }

    pub fn dot(&self, other: &Character) -> i64 {
        lin::dot(&self.0, &other.0)
    }
}

impl Add<&Character> for &Character {
    type Output = Character;
    fn add(self, rhs: &Character) -> Character {
        debug_assert_eq!(self.rank(), rhs.rank());
        Character(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Character> for &Character {
    type Output = Character;
    fn sub(self, rhs: &Character) -> Character {
        debug_assert_eq!(self.rank(), rhs.rank());
        Character(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Character {
    type Output = Character;
    fn neg(self) -> Character {
        Character(lin::neg(&self.0))
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("division by 1 - e^{{-λ}} requires λ ≠ 0")]
    ZeroWeight,
    #[error("not divisible; remainder {remainder}")]
    NotDivisible { remainder: LaurentPoly },
}

/// A Laurent polynomial: finite map from characters to nonzero `BigInt`
/// coefficients.  The zero polynomial has an empty term map.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<Character, BigInt>,
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::monomial(Character::zero(rank), BigInt::one())
    }

    pub fn constant(rank: usize, c: i64) -> Self {
        Self::monomial(Character::zero(rank), BigInt::from(c))
    }

    pub fn monomial(exp: Character, coeff: BigInt) -> Self {
        let rank = exp.rank();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { rank, terms }
    }

    /// e^λ
    pub fn exp(lambda: &Character) -> Self {
        Self::monomial(lambda.clone(), BigInt::one())
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (Character, BigInt)>) -> Self {
        let mut p = Self::zero(rank);
        for (e, c) in terms {
            p.add_term(&e, &c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Character::zero(self.rank))
                .is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Character, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Character) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Sum of all coefficients (the augmentation e^λ ↦ 1).
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    fn add_term(&mut self, exp: &Character, coeff: &BigInt) {
        if coeff.is_zero() {
            return;
        }
        debug_assert_eq!(exp.rank(), self.rank);
        match self.terms.get_mut(exp) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(exp);
                }
            }
            None => {
                self.terms.insert(exp.clone(), coeff.clone());
            }
        }
    }

    /// Multiplication by the monomial `c·e^λ`.
    pub fn mul_monomial(&self, lambda: &Character, c: &BigInt) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.rank);
        if c.is_zero() {
            return out;
        }
        for (e, k) in &self.terms {
            out.terms.insert(e + lambda, k * c);
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        self.mul_monomial(&Character::zero(self.rank), c)
    }

    /// Leading term w.r.t. lexicographic order on exponents.
    pub fn leading(&self) -> Option<(&Character, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Componentwise bounding box of the support.
    fn support_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for e in it {
            for (i, &x) in e.0.iter().enumerate() {
                lo[i] = lo[i].min(x);
                hi[i] = hi[i].max(x);
            }
        }
        Some((lo, hi))
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.rank, rhs.rank, "rank mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.rank, rhs.rank, "rank mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e, &(-c));
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.rank);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c);
        }
        out
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.rank, rhs.rank, "rank mismatch");
        let mut out = LaurentPoly::zero(self.rank);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(&(e1 + e2), &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&VarStyle::default()))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&VarStyle::default()))
    }
}

/// Exact division of `f` by `1 − e^{−λ}`.
///
/// The numerator is graded along an integral functional positive on `λ`
/// (we pair with `λ` itself) and quotient terms are peeled from the top
/// grade down; the candidate quotient is then verified by multiplication,
/// so the answer is exact in both directions.
pub fn divide_exact(f: &LaurentPoly, lambda: &Character) -> Result<LaurentPoly, RingError> {
    if lambda.is_zero() {
        return Err(RingError::ZeroWeight);
    }
    if f.is_zero() {
        return Ok(LaurentPoly::zero(f.rank()));
    }
    let d = lambda.dot(lambda);
    let grade = |e: &Character| e.dot(lambda);
    let gmin = f.terms.keys().map(&grade).min().unwrap();

    // q_g = f_g + e^{-λ}·q_{g+d}, built from the top grade down.
    let mut pending: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
    for (e, c) in &f.terms {
        pending
            .entry(grade(e))
            .or_insert_with(|| LaurentPoly::zero(f.rank()))
            .add_term(e, c);
    }
    let mut q = LaurentPoly::zero(f.rank());
    while let Some((&g, _)) = pending.iter().next_back() {
        let part = pending.remove(&g).unwrap();
        if part.is_zero() {
            continue;
        }
        if g <= gmin {
            break; // quotient support must stay above the bottom grade
        }
        q = &q + &part;
        let shifted = part.mul_monomial(&-lambda, &BigInt::one());
        match pending.get_mut(&(g - d)) {
            Some(p) => *p = &*p + &shifted,
            None => {
                pending.insert(g - d, shifted);
            }
        }
    }
    let check = &q * &one_minus_exp_neg(lambda);
    if check == *f {
        Ok(q)
    } else {
        Err(RingError::NotDivisible {
            remainder: f - &check,
        })
    }
}

/// `1 − e^{−λ}` as a Laurent polynomial.
pub fn one_minus_exp_neg(lambda: &Character) -> LaurentPoly {
    &LaurentPoly::one(lambda.rank()) - &LaurentPoly::exp(&-lambda)
}

/// Exact division of `f` by an arbitrary nonzero `g`, peeling lexicographic
/// leading terms.  Returns `None` when the division is not exact in `Z[M]`.
pub fn try_div(f: &LaurentPoly, g: &LaurentPoly) -> Option<LaurentPoly> {
    assert!(!g.is_zero(), "division by zero polynomial");
    if f.is_zero() {
        return Some(LaurentPoly::zero(f.rank()));
    }
    let (flo, fhi) = f.support_box().unwrap();
    let (glo, ghi) = g.support_box().unwrap();
    let (gt, gc) = g.leading().map(|(e, c)| (e.clone(), c.clone())).unwrap();
    let mut r = f.clone();
    let mut q = LaurentPoly::zero(f.rank());
    while let Some((rt, rc)) = r.leading().map(|(e, c)| (e.clone(), c.clone())) {
        if (&rc % &gc) != BigInt::zero() {
            return None;
        }
        let m = &rt - &gt;
        // In an exact division the quotient support lies in the Minkowski
        // difference of the supports, hence inside this box.
        for i in 0..f.rank() {
            if m.0[i] + glo[i] < flo[i] || m.0[i] + ghi[i] > fhi[i] {
                return None;
            }
        }
        let c = &rc / &gc;
        q.add_term(&m, &c);
        r = &r - &g.mul_monomial(&m, &c);
    }
    Some(q)
}

/// The Adams operation `ψ^j`: the ring endomorphism `e^λ ↦ e^{jλ}`.
pub fn adams(j: i64, f: &LaurentPoly) -> LaurentPoly {
    assert!(j >= 1, "adams requires j ≥ 1");
    LaurentPoly::from_terms(
        f.rank(),
        f.terms().map(|(e, c)| (e.scaled(j), c.clone())),
    )
}

/// `λ_{−1}` of the dual of a weight list: `∏ (1 − e^{−λ_i})`, expanded.
pub fn lambda_minus_one(weights: &[Character], rank: usize) -> LaurentPoly {
    let mut out = LaurentPoly::one(rank);
    for w in weights {
        out = &out * &one_minus_exp_neg(w);
    }
    out
}

/// Pushes each exponent through an integer-linear lattice map and collects
/// coefficients.  Rows of `map` are the coordinates of the target lattice.
pub fn restrict_characters(f: &LaurentPoly, map: &[Vec<i64>]) -> LaurentPoly {
    let out_rank = map.len();
    for row in map {
        assert_eq!(row.len(), f.rank(), "lattice map dimension mismatch");
    }
    LaurentPoly::from_terms(
        out_rank,
        f.terms().map(|(e, c)| {
            let img = Character(map.iter().map(|row| lin::dot(row, &e.0)).collect());
            (img, c.clone())
        }),
    )
}

/// A localized class: numerator over a multiset of denominator weights,
/// each weight `λ` standing for the factor `1 − e^{−λ}`.  Kept normalized:
/// weights are in canonical direction and no factor exactly divides the
/// numerator.
#[derive(Clone)]
pub struct LocalizedClass {
    num: LaurentPoly,
    den: Vec<Character>, // sorted multiset, canonical direction
}

impl LocalizedClass {
    pub fn from_poly(num: LaurentPoly) -> Self {
        LocalizedClass {
            num,
            den: Vec::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::from_poly(LaurentPoly::one(rank))
    }

    pub fn zero(rank: usize) -> Self {
        Self::from_poly(LaurentPoly::zero(rank))
    }

    /// Builds `num / ∏ (1 − e^{−λ})`, canonicalizing each factor and
    /// absorbing unit corrections into the numerator, then normalizes.
    pub fn new(num: LaurentPoly, den: impl IntoIterator<Item = Character>) -> Self {
        let mut out = LocalizedClass {
            num,
            den: Vec::new(),
        };
        for w in den {
            out.push_factor(&w);
        }
        out.normalize();
        out
    }

    /// `1 / ∏ (1 − e^{−λ_i})`.
    pub fn inverse_product(rank: usize, weights: &[Character]) -> Self {
        Self::new(LaurentPoly::one(rank), weights.iter().cloned())
    }

    fn push_factor(&mut self, w: &Character) {
        assert!(!w.is_zero(), "denominator weight must be nonzero");
        if lin::first_nonzero_positive(&w.0) {
            self.den.push(w.clone());
        } else {
            // 1 − e^{−w} = −e^{−w}(1 − e^{w}); canonical weight is −w and
            // the numerator picks up the unit −e^{w}.
            self.num = self.num.mul_monomial(w, &BigInt::from(-1));
            self.den.push(-w);
        }
        self.den.sort();
    }

    pub fn rank(&self) -> usize {
        self.num.rank()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator_weights(&self) -> &[Character] {
        &self.den
    }

    pub fn denominator_poly(&self) -> LaurentPoly {
        lambda_minus_one(&self.den, self.rank())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// A genuine element of `R(T)` (empty denominator after normalization)?
    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        self.den.is_empty().then_some(&self.num)
    }

    /// Greedy cancellation: repeatedly strike denominator factors that
    /// exactly divide the numerator.
    pub fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        loop {
            let mut progress = false;
            let mut i = 0;
            while i < self.den.len() {
                let w = self.den[i].clone();
                if let Ok(q) = divide_exact(&self.num, &w) {
                    self.num = q;
                    self.den.remove(i);
                    progress = true;
                } else {
                    i += 1;
                }
            }
            if !progress {
                break;
            }
        }
    }

    pub fn mul_poly(&self, f: &LaurentPoly) -> LocalizedClass {
        let mut out = LocalizedClass {
            num: &self.num * f,
            den: self.den.clone(),
        };
        out.normalize();
        out
    }

    /// Converts to a plain fraction of Laurent polynomials.
    pub fn to_fraction(&self) -> Fraction {
        Fraction::new(self.num.clone(), self.denominator_poly())
    }
}

impl Add<&LocalizedClass> for &LocalizedClass {
    type Output = LocalizedClass;
    fn add(self, rhs: &LocalizedClass) -> LocalizedClass {
        // Common denominator: multiset union with per-weight max multiplicity.
        let union = multiset_union(&self.den, &rhs.den);
        let a = &self.num * &lambda_minus_one(&multiset_diff(&union, &self.den), self.rank());
        let b = &rhs.num * &lambda_minus_one(&multiset_diff(&union, &rhs.den), self.rank());
        let mut out = LocalizedClass {
            num: &a + &b,
            den: union,
        };
        out.normalize();
        out
    }
}

impl Mul<&LocalizedClass> for &LocalizedClass {
    type Output = LocalizedClass;
    fn mul(self, rhs: &LocalizedClass) -> LocalizedClass {
        let mut den = self.den.clone();
        den.extend(rhs.den.iter().cloned());
        den.sort();
        let mut out = LocalizedClass {
            num: &self.num * &rhs.num,
            den,
        };
        out.normalize();
        out
    }
}

impl Neg for &LocalizedClass {
    type Output = LocalizedClass;
    fn neg(self) -> LocalizedClass {
        LocalizedClass {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl PartialEq for LocalizedClass {
    /// Semantic equality by cross-multiplication of numerators against
    /// denominators, never by comparing normal forms.
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.denominator_poly() == &other.num * &self.denominator_poly()
    }
}

impl Eq for LocalizedClass {}

impl fmt::Debug for LocalizedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&VarStyle::default()))
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

/// A plain fraction of Laurent polynomials, for values that may leave
/// `S^{-1}R(T)` (Bott elements of virtual classes, Adams-Riemann-Roch
/// ratios at singular points).  Equality is by cross-multiplication.
#[derive(Clone)]
pub struct Fraction {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl Fraction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "fraction with zero denominator");
        Fraction { num, den }
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        let rank = num.rank();
        Fraction {
            num,
            den: LaurentPoly::one(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.num.rank()
    }

    pub fn mul(&self, other: &Fraction) -> Fraction {
        Fraction::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn inv(&self) -> Fraction {
        assert!(!self.num.is_zero(), "inverting zero fraction");
        Fraction::new(self.den.clone(), self.num.clone())
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for Fraction {}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

/// The Bott element `θ^j` of a virtual weight list: the monoid homomorphism
/// with `θ^j(e^λ) = 1 + e^λ + ⋯ + e^{(j−1)λ}` on line classes, extended
/// multiplicatively; negative multiplicities land in the denominator.
/// Zero weights contribute the integer factor `j` per multiplicity.
pub fn bott(j: i64, weights: &[(Character, i64)], rank: usize) -> Fraction {
    assert!(j >= 1, "bott requires j ≥ 1 (θ^0 has no consistent unit)");
    let theta = |lambda: &Character| -> LaurentPoly {
        if lambda.is_zero() {
            return LaurentPoly::constant(rank, j);
        }
        let mut p = LaurentPoly::zero(rank);
        for k in 0..j {
            p.add_term(&lambda.scaled(k), &BigInt::one());
        }
        p
    };
    let mut num = LaurentPoly::one(rank);
    let mut den = LaurentPoly::one(rank);
    for (lambda, mult) in weights {
        let factor = theta(lambda);
        for _ in 0..mult.unsigned_abs() {
            if *mult >= 0 {
                num = &num * &factor;
            } else {
                den = &den * &factor;
            }
        }
    }
    Fraction::new(num, den)
}

/// The Adams operation on a localized class: `ψ^j` on the numerator, and
/// `1 − e^{−λ} ↦ 1 − e^{−jλ}` on each denominator factor.
pub fn adams_localized(j: i64, x: &LocalizedClass) -> LocalizedClass {
    LocalizedClass::new(
        adams(j, x.numerator()),
        x.denominator_weights().iter().map(|w| w.scaled(j)),
    )
}

// ---------------------------------------------------------------------------
// Text rendering and parsing.
// ---------------------------------------------------------------------------

/// Variable naming for rendering: `u1, u2, …` by default, or `t` for the
/// rank-one ring of the surface catalogue.
#[derive(Clone, Debug, Default)]
pub enum VarStyle {
    #[default]
    Indexed,
    T,
}

impl VarStyle {
    pub fn var_name(&self, i: usize) -> String {
        match self {
            VarStyle::Indexed => format!("u{}", i + 1),
            VarStyle::T => "t".to_string(),
        }
    }
}

pub fn render_character(c: &Character, style: &VarStyle) -> String {
    if c.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, &k) in c.0.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !s.is_empty() && k > 0 {
            s.push('+');
        }
        if k == -1 {
            s.push('-');
        } else if k != 1 {
            s.push_str(&format!("{k}*"));
        }
        s.push_str(&style.var_name(i));
    }
    s
}

impl LaurentPoly {
    pub fn render(&self, style: &VarStyle) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            if e.is_zero() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&format!("{abs}*"));
                }
                s.push_str(&format!("e^{{{}}}", render_character(e, style)));
            }
        }
        s
    }
}

impl LocalizedClass {
    /// Renders the class, flipping denominator factors
    /// `1 − e^{−w} = −e^{−w}(1 − e^{w})` where that makes the displayed
    /// numerator positive and short (the multiplicity tables then print in
    /// the usual Hilbert-series shape).  Flips only change the displayed
    /// representative, never the class.
    pub fn render(&self, style: &VarStyle) -> String {
        if self.den.is_empty() {
            return self.num.render(style);
        }
        let k = self.den.len();
        let mut best: Option<(i64, usize, i64, String)> = None;
        for mask in 0..(1usize << k) {
            let mut num = self.num.clone();
            let mut dens = Vec::with_capacity(k);
            for (i, w) in self.den.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    // 1/(1−e^{−w}) = −e^{w} / (1−e^{w})
                    num = num.mul_monomial(w, &BigInt::from(-1));
                    dens.push(format!("(1 - e^{{{}}})", render_character(w, style)));
                } else {
                    dens.push(format!("(1 - e^{{{}}})", render_character(&-w, style)));
                }
            }
            let positive = num.terms.values().all(|c| !c.is_negative());
            let terms = num.terms.len();
            let spread: i64 = num
                .terms
                .keys()
                .map(|e| e.0.iter().map(|x| x.abs()).sum::<i64>())
                .sum();
            let nums = num.render(style);
            let rendered = if terms > 1 {
                format!("({nums}) / {}", dens.join(""))
            } else {
                format!("{nums} / {}", dens.join(""))
            };
            let score = (i64::from(!positive), terms, spread, rendered);
            if best.as_ref().is_none_or(|b| score < *b) {
                best = Some(score);
            }
        }
        best.unwrap().3
    }
}

impl LaurentPoly {
    /// Machine serialization: `(coefficient,(e1,…,en))` pairs joined by
    /// `;`, in ascending lexicographic exponent order.  The zero
    /// polynomial serializes as `0`.
    pub fn to_pairs(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                let coords: Vec<String> = e.0.iter().map(|x| x.to_string()).collect();
                format!("({c},({}))", coords.join(","))
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl LocalizedClass {
    /// Machine serialization: numerator pairs and the denominator weight
    /// list, e.g. `num=(1,(0,0)) den=(1,0),(0,1)`.
    pub fn to_pairs(&self) -> String {
        let den: Vec<String> = self
            .den
            .iter()
            .map(|w| {
                let coords: Vec<String> = w.0.iter().map(|x| x.to_string()).collect();
                format!("({})", coords.join(","))
            })
            .collect();
        if den.is_empty() {
            format!("num={}", self.num.to_pairs())
        } else {
            format!("num={} den={}", self.num.to_pairs(), den.join(","))
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("parse error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable {var} exceeds rank {rank}")]
    Rank { var: String, rank: usize },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError::Syntax {
                pos: start,
                msg: "integer out of range".into(),
            })
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    // term := factor (('*')? factor)*
    fn term(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            let save = self.pos;
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
                continue;
            }
            match self.peek() {
                Some(b'e') | Some(b'(') | Some(b'0'..=b'9') => {
                    acc = &acc * &self.factor()?;
                }
                Some(b't') | Some(b'u') => {
                    self.pos = save;
                    return self.err("bare variables are not ring elements; use e^{...}");
                }
                _ => {
                    self.pos = save;
                    return Ok(acc);
                }
            }
        }
    }

    fn factor(&mut self) -> Result<LaurentPoly, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(b'e') => {
                self.pos += 1;
                if !self.eat(b'^') {
                    return self.err("expected '^' after e");
                }
                if !self.eat(b'{') {
                    return self.err("expected '{' after e^");
                }
                let c = self.linear_form()?;
                if !self.eat(b'}') {
                    return self.err("expected '}' closing exponent");
                }
                Ok(LaurentPoly::exp(&c))
            }
            Some(b'0'..=b'9') => {
                let n = self.integer()?;
                Ok(LaurentPoly::constant(self.rank, n))
            }
            _ => self.err("expected factor"),
        }
    }

    // linear_form := lterm (('+'|'-') lterm)*    (exponent of e)
    fn linear_form(&mut self) -> Result<Character, ParseError> {
        let mut acc = Character::zero(self.rank);
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        }
        loop {
            let t = self.linear_term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            if self.eat(b'+') {
                negate = false;
            } else if self.eat(b'-') {
                negate = true;
            } else {
                return Ok(acc);
            }
        }
    }

    // lterm := INT ['*'? var] | var       ('0' alone is the zero character)
    fn linear_term(&mut self) -> Result<Character, ParseError> {
        let coeff = match self.peek() {
            Some(b'0'..=b'9') => {
                let n = self.integer()?;
                self.eat(b'*');
                match self.peek() {
                    Some(b'u') | Some(b't') => n,
                    _ if n == 0 => return Ok(Character::zero(self.rank)),
                    _ => return self.err("nonzero constant in exponent"),
                }
            }
            _ => 1,
        };
        let idx = self.variable()?;
        let mut c = Character::zero(self.rank);
        c.0[idx] = coeff;
        Ok(c)
    }

    fn variable(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(b't') => {
                self.pos += 1;
                if self.rank != 1 {
                    return Err(ParseError::Rank {
                        var: "t".into(),
                        rank: self.rank,
                    });
                }
                Ok(0)
            }
            Some(b'u') => {
                self.pos += 1;
                let n = self.integer()? as usize;
                if n == 0 || n > self.rank {
                    return Err(ParseError::Rank {
                        var: format!("u{n}"),
                        rank: self.rank,
                    });
                }
                Ok(n - 1)
            }
            _ => self.err("expected variable"),
        }
    }
}

/// Parses a Laurent polynomial expression such as
/// `1 + e^{u1-u2}` or `(1-e^{-t})*(1-e^{-2*t})`.
pub fn parse_poly(src: &str, rank: usize) -> Result<LaurentPoly, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        rank,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Parses a bare linear form such as `2*u1-u2` into a character.
pub fn parse_character(src: &str, rank: usize) -> Result<Character, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        rank,
    };
    let out = p.linear_form()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(out)
}
