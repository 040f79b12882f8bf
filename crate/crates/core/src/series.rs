//! Truncated multivariate power series over exact rationals, the Chern
//! character, and Todd-type expansions.
//!
//! A [`TruncatedSeries`] keeps monomials of total degree at most `trunc`;
//! arithmetic silently discards higher degrees, so ring identities hold
//! modulo the truncation.  This is the working image of the completed Chow
//! ring — the completion itself is never materialized.

use crate::ring::{Character, LaurentPoly};
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

type Mono = Vec<u32>;

fn mono_degree(m: &Mono) -> u32 {
    m.iter().sum()
}

/// A polynomial truncated at a fixed total degree, with `BigRational`
/// coefficients and deterministic (lexicographic) monomial order.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    rank: usize,
    trunc: u32,
    terms: BTreeMap<Mono, BigRational>,
}

impl TruncatedSeries {
    pub fn zero(rank: usize, trunc: u32) -> Self {
        TruncatedSeries {
            rank,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize, trunc: u32) -> Self {
        Self::constant(rank, trunc, BigRational::one())
    }

    pub fn constant(rank: usize, trunc: u32, c: BigRational) -> Self {
        let mut s = Self::zero(rank, trunc);
        s.add_term(vec![0; rank], c);
        s
    }

    /// The linear form `Σ coords_i · u_i` as a degree-1 series.
    pub fn linear(c: &Character, trunc: u32) -> Self {
        let mut s = Self::zero(c.rank(), trunc);
        if trunc == 0 {
            return s;
        }
        for (i, &k) in c.0.iter().enumerate() {
            if k != 0 {
                let mut m = vec![0u32; c.rank()];
                m[i] = 1;
                s.add_term(m, BigRational::from_integer(BigInt::from(k)));
            }
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &[u32]) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() || mono_degree(&m) > self.trunc {
            return;
        }
        debug_assert_eq!(m.len(), self.rank);
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Re-truncates to a (possibly smaller) degree.
    pub fn truncated(&self, trunc: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.rank, trunc);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(mono_degree).min()
    }

    /// The homogeneous part of the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.rank, self.trunc);
        for (m, c) in &self.terms {
            if mono_degree(m) == degree {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Scales the degree-k part by `j^k` (the Chow-side Adams operation).
    pub fn adams_scale(&self, j: i64) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.rank, self.trunc);
        for (m, c) in &self.terms {
            let factor = BigInt::from(j).pow(mono_degree(m));
            out.add_term(m.clone(), c * BigRational::from_integer(factor));
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.rank, self.trunc);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    /// First monomial (in lexicographic order) where the two series differ,
    /// together with both coefficients.
    pub fn first_difference(
        &self,
        other: &TruncatedSeries,
    ) -> Option<(Mono, BigRational, BigRational)> {
        let monos: std::collections::BTreeSet<&Mono> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for m in monos {
            let a = self.coeff(m);
            let b = other.coeff(m);
            if a != b {
                return Some((m.clone(), a, b));
            }
        }
        None
    }
}

impl Add<&TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.rank, rhs.rank);
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = self.truncated(trunc);
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.rank, self.trunc);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c);
        }
        out
    }
}

impl Mul<&TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.rank, rhs.rank);
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = TruncatedSeries::zero(self.rank, trunc);
        for (m1, c1) in &self.terms {
            let d1 = mono_degree(m1);
            if d1 > trunc {
                continue;
            }
            for (m2, c2) in &rhs.terms {
                if d1 + mono_degree(m2) > trunc {
                    continue;
                }
                let m: Mono = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            format!("u{}", i + 1)
                        } else {
                            format!("u{}^{}", i + 1, k)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}·{}", vars.join("·"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The Chern character: the ring homomorphism with `e^λ ↦ exp(λ)`,
/// truncated at total degree `trunc`.
pub fn chern_character(f: &LaurentPoly, trunc: u32) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(f.rank(), trunc);
    for (e, c) in f.terms() {
        let e_series = exp_of_linear(e, trunc).scale(&BigRational::from_integer(c.clone()));
        out = &out + &e_series;
    }
    out
}

/// `exp(λ) = Σ_k λ^k / k!` for a degree-1 form `λ`.
pub fn exp_of_linear(c: &Character, trunc: u32) -> TruncatedSeries {
    let lin = TruncatedSeries::linear(c, trunc);
    let mut out = TruncatedSeries::one(c.rank(), trunc);
    let mut power = TruncatedSeries::one(c.rank(), trunc);
    let mut factorial = BigInt::one();
    for k in 1..=trunc {
        power = &power * &lin;
        if power.is_zero() {
            break;
        }
        factorial *= BigInt::from(k);
        out = &out + &power.scale(&BigRational::new(BigInt::one(), factorial.clone()));
    }
    out
}

/// Coefficients of the univariate Todd series `t / (1 − e^{−t})` up to the
/// requested degree, computed by inverting `(1 − e^{−t})/t` term by term.
pub fn todd_coefficients(trunc: u32) -> Vec<BigRational> {
    // s_k = (−1)^k / (k+1)!  are the coefficients of (1 − e^{−t})/t.
    let mut s = Vec::with_capacity(trunc as usize + 1);
    let mut factorial = BigInt::one();
    for k in 0..=trunc {
        factorial *= BigInt::from(k + 1);
        let mut c = BigRational::new(BigInt::one(), factorial.clone());
        if k % 2 == 1 {
            c = -c;
        }
        s.push(c);
    }
    // Invert the unit power series s (s_0 = 1): b_0 = 1,
    // b_k = −Σ_{i=1..k} s_i b_{k−i}.
    let mut b = vec![BigRational::one()];
    for k in 1..=trunc as usize {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            acc += &s[i] * &b[k - i];
        }
        b.push(-acc);
    }
    b
}

/// The Todd factor `λ / (1 − e^{−λ})` of a single weight, to degree `trunc`.
pub fn todd_of_weight(lambda: &Character, trunc: u32) -> TruncatedSeries {
    let coeffs = todd_coefficients(trunc);
    let lin = TruncatedSeries::linear(lambda, trunc);
    let mut out = TruncatedSeries::zero(lambda.rank(), trunc);
    let mut power = TruncatedSeries::one(lambda.rank(), trunc);
    for c in coeffs {
        out = &out + &power.scale(&c);
        power = &power * &lin;
        if power.is_zero() {
            break;
        }
    }
    out
}

/// A localized series: a truncated numerator over a multiset of degree-1
/// denominator forms.  The effective valuation can be negative.
#[derive(Clone, Debug)]
pub struct LocalizedSeries {
    pub num: TruncatedSeries,
    pub denominator_weights: Vec<Character>,
}

/// The Chern character of a localized class: `ch` of the numerator over
/// the denominator weights as degree-1 forms (each factor `1 − e^{−λ}`
/// contributes its leading form `λ`).
pub fn ch_localized(x: &crate::ring::LocalizedClass, trunc: u32) -> LocalizedSeries {
    LocalizedSeries {
        num: chern_character(x.numerator(), trunc),
        denominator_weights: x.denominator_weights().to_vec(),
    }
}

impl LocalizedSeries {
    /// Lowest effective degree: valuation of the numerator minus the number
    /// of denominator factors.  `None` when the numerator vanishes to the
    /// truncation degree.
    pub fn valuation(&self) -> Option<i64> {
        self.num
            .valuation()
            .map(|v| v as i64 - self.denominator_weights.len() as i64)
    }

    /// The leading term as a pair (homogeneous numerator, denominator
    /// weights).  Fails when the truncation cannot resolve it.
    pub fn leading_term(&self) -> Option<LeadingTerm> {
        let v = self.num.valuation()?;
        Some(LeadingTerm {
            num: self.num.homogeneous_part(v),
            denominator_weights: self.denominator_weights.clone(),
        })
    }
}

/// A homogeneous numerator over a product of degree-1 forms; equality is by
/// cross-multiplication, so different unit normalizations compare equal.
#[derive(Clone, Debug)]
pub struct LeadingTerm {
    pub num: TruncatedSeries,
    pub denominator_weights: Vec<Character>,
}

impl LeadingTerm {
    pub fn degree(&self) -> Option<i64> {
        self.num
            .valuation()
            .map(|v| v as i64 - self.denominator_weights.len() as i64)
    }

    pub fn render(&self, style: &crate::ring::VarStyle) -> String {
        use num::Signed;
        // Prefer a positive numerator: negating one denominator weight is a
        // display-only unit move.
        let mut shown = self.clone();
        if !shown.denominator_weights.is_empty()
            && shown.num.terms().all(|(_, c)| c.is_negative())
        {
            shown.num = -&shown.num;
            let flipped = -&shown.denominator_weights[0];
            shown.denominator_weights[0] = flipped;
        }
        let this = &shown;
        let mut num = String::new();
        for (mono, coeff) in this.num.terms() {
            if !num.is_empty() {
                num.push_str(" + ");
            }
            let vars: Vec<String> = mono
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let name = style.var_name(i);
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                num.push_str(&coeff.to_string());
            } else if coeff.is_one() {
                num.push_str(&vars.join("*"));
            } else {
                num.push_str(&format!("{coeff}*{}", vars.join("*")));
            }
        }
        if num.is_empty() {
            num.push('0');
        }
        if this.denominator_weights.is_empty() {
            num
        } else {
            let den: Vec<String> = this
                .denominator_weights
                .iter()
                .map(|w| format!("({})", crate::ring::render_character(w, style)))
                .collect();
            format!("({num}) / {}", den.join(""))
        }
    }
}

impl PartialEq for LeadingTerm {
    fn eq(&self, other: &Self) -> bool {
        let trunc = (self.num.trunc() + other.denominator_weights.len() as u32)
            .max(other.num.trunc() + self.denominator_weights.len() as u32);
        let lhs = product_with_forms(&self.num, &other.denominator_weights, trunc);
        let rhs = product_with_forms(&other.num, &self.denominator_weights, trunc);
        lhs == rhs
    }
}

impl Eq for LeadingTerm {}

fn product_with_forms(s: &TruncatedSeries, forms: &[Character], trunc: u32) -> TruncatedSeries {
    let mut out = s.truncated(trunc);
    for f in forms {
        out = &out * &TruncatedSeries::linear(f, trunc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn ch(src: &str, rank: usize, trunc: u32) -> TruncatedSeries {
        chern_character(&parse_poly(src, rank).unwrap(), trunc)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ch_of_exponential_to_degree_two() {
        let s = ch("e^{u1+2*u2}", 2, 2);
        assert_eq!(s.coeff(&[0, 0]), q(1, 1));
        assert_eq!(s.coeff(&[1, 0]), q(1, 1));
        assert_eq!(s.coeff(&[0, 1]), q(2, 1));
        assert_eq!(s.coeff(&[2, 0]), q(1, 2));
        assert_eq!(s.coeff(&[1, 1]), q(2, 1));
        assert_eq!(s.coeff(&[0, 2]), q(2, 1));
    }

    #[test]
    fn ch_is_ring_homomorphism() {
        let f = parse_poly("1 - e^{-u1} + 2*e^{u1+u2}", 2).unwrap();
        let g = parse_poly("e^{-u2} - 3", 2).unwrap();
        let lhs = chern_character(&(&f * &g), 8);
        let rhs = &chern_character(&f, 8) * &chern_character(&g, 8);
        assert_eq!(lhs, rhs);
        assert_eq!(ch("1", 2, 5), TruncatedSeries::one(2, 5));
    }

    #[test]
    fn ch_intertwines_adams_with_degree_scaling() {
        let f = parse_poly("2 - e^{u1-3*u2} + e^{-u1}", 2).unwrap();
        let lhs = chern_character(&crate::ring::adams(3, &f), 6);
        let rhs = chern_character(&f, 6).adams_scale(3);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn todd_univariate_matches_known_coefficients() {
        // t/(1-e^{-t}) = 1 + t/2 + t²/12 − t⁴/720 + …
        let b = todd_coefficients(6);
        assert_eq!(b[0], q(1, 1));
        assert_eq!(b[1], q(1, 2));
        assert_eq!(b[2], q(1, 12));
        assert_eq!(b[3], q(0, 1));
        assert_eq!(b[4], q(-1, 720));
        assert_eq!(b[5], q(0, 1));
        assert_eq!(b[6], q(1, 30240));
    }

    #[test]
    fn todd_times_inverse_is_one() {
        // todd(λ) · (1−e^{−λ})/λ = 1 up to truncation.  The second factor is
        // computed by an independent route: ch(1−e^{−λ}) divided by λ via
        // cross-multiplication against λ·1.
        let lam = Character(vec![1, -2]);
        let trunc = 9;
        let todd = todd_of_weight(&lam, trunc);
        let chf = chern_character(&crate::ring::one_minus_exp_neg(&lam), trunc + 1);
        // todd·chf should equal the linear form λ (up to degree trunc).
        let prod = &todd * &chf;
        let lin = TruncatedSeries::linear(&lam, trunc);
        assert_eq!(prod.truncated(trunc), lin);
    }

    #[test]
    fn first_difference_reports_lex_first_mismatch() {
        let a = ch("1 + e^{u1}", 2, 3);
        let b = ch("1 + e^{u2}", 2, 3);
        let (mono, ca, cb) = a.first_difference(&b).unwrap();
        assert_eq!(mono, vec![0, 1]);
        assert_eq!(ca, q(0, 1));
        assert_eq!(cb, q(1, 1));
        assert!(a.first_difference(&a).is_none());
    }

    #[test]
    fn ch_localized_valuation_of_geometric_factor() {
        // 1/(1−e^{−u1}) has leading term 1/u1, valuation −1.
        let x = crate::ring::LocalizedClass::inverse_product(2, &[Character(vec![1, 0])]);
        let s = ch_localized(&x, 4);
        assert_eq!(s.valuation(), Some(-1));
        let lt = s.leading_term().unwrap();
        assert_eq!(
            lt,
            LeadingTerm {
                num: TruncatedSeries::one(2, 4),
                denominator_weights: vec![Character(vec![1, 0])],
            }
        );
    }

    #[test]
    fn leading_terms_compare_by_cross_multiplication() {
        // 1/u1 equals (-1)/(-u1).
        let a = LeadingTerm {
            num: TruncatedSeries::one(2, 4),
            denominator_weights: vec![Character(vec![1, 0])],
        };
        let b = LeadingTerm {
            num: TruncatedSeries::constant(2, 4, q(-1, 1)),
            denominator_weights: vec![Character(vec![-1, 0])],
        };
        assert_eq!(a, b);
        assert_eq!(a.degree(), Some(-1));
    }
}
