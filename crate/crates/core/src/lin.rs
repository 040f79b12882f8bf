//! Small exact linear algebra over the integers and rationals.
//!
//! Everything here works on the desk-scale matrices that show up in fan
//! combinatorics (rank ≤ 4, a dozen rays), so the implementations favor
//! clarity over asymptotics: Bareiss-style determinants, textbook Smith
//! normal form, Gaussian elimination over `BigRational`, and
//! Fourier-Motzkin feasibility for cone overlap tests.

use num::{BigInt, BigRational, Signed, Zero};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Divides a vector by the gcd of its entries.  The zero vector is returned
/// unchanged.
pub fn primitivize(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| gcd(acc, x));
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|&x| x / g).collect()
}

pub fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |acc, &x| gcd(acc, x)) == 1
}

/// True if the first nonzero entry is positive.  The all-zero vector counts
/// as non-canonical.
pub fn first_nonzero_positive(v: &[i64]) -> bool {
    for &x in v {
        if x != 0 {
            return x > 0;
        }
    }
    false
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|&x| -x).collect()
}

/// Exact determinant of a square integer matrix (rows of equal length),
/// by fraction-free Bareiss elimination in `i128`.
pub fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let d = sign * a[n - 1][n - 1];
    i64::try_from(d).expect("determinant overflow")
}

/// Smith normal form: returns `(u, d, v)` with `u * m * v = diag(d)`,
/// `u` and `v` unimodular.  `d` has length `min(rows, cols)`.
pub fn smith_normal_form(m: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<i64>, Vec<Vec<i64>>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<i64>> = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let lim = rows.min(cols);
    for t in 0..lim {
        // Find a pivot with minimal absolute value in the remaining block.
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0
                        && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                let d = (0..lim).map(|k| a[k][k]).collect();
                return (u, d, v);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    row_sub(&mut a, i, t, q);
                    row_sub(&mut u, i, t, q);
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    col_sub(&mut a, j, t, q);
                    col_sub(&mut v, j, t, q);
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[t][t] < 0 {
            for x in a.iter_mut() {
                x[t] = -x[t];
            }
            for x in v.iter_mut() {
                x[t] = -x[t];
            }
        }
    }
    // Divisibility chain is not needed by the callers; diagonal form suffices.
    let d = (0..lim).map(|k| a[k][k]).collect();
    (u, d, v)
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn swap_cols(a: &mut [Vec<i64>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn row_sub(a: &mut [Vec<i64>], i: usize, t: usize, q: i64) {
    let trow = a[t].clone();
    for (x, y) in a[i].iter_mut().zip(&trow) {
        *x -= q * y;
    }
}

fn col_sub(a: &mut [Vec<i64>], j: usize, t: usize, q: i64) {
    for row in a.iter_mut() {
        row[j] -= q * row[t];
    }
}

/// Basis of the integer kernel `{x ∈ Z^cols : m·x = 0}` of an integer
/// matrix with `cols` columns (passed explicitly so empty systems work).
pub fn integer_kernel(m: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    if m.is_empty() {
        return identity(cols);
    }
    let (_, d, v) = smith_normal_form(m);
    let rank = d.iter().filter(|&&x| x != 0).count();
    // Kernel = span of columns of v past the rank.
    (rank..cols)
        .map(|j| (0..cols).map(|i| v[i][j]).collect())
        .collect()
}

/// Projection `N -> N / sat(span of the given vectors)` presented as an
/// integer matrix with `rank - r` rows, where `r` is the rank of the span.
/// The kernel of the returned map is exactly the saturated span.
pub fn quotient_projection(rank: usize, span: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if span.is_empty() {
        return identity(rank);
    }
    // Columns are the spanning vectors.
    let a: Vec<Vec<i64>> = (0..rank)
        .map(|i| span.iter().map(|v| v[i]).collect())
        .collect();
    let (u, d, _) = smith_normal_form(&a);
    let r = d.iter().filter(|&&x| x != 0).count();
    // Rows r.. of u give coordinates that vanish exactly on the saturation.
    (r..rank).map(|i| u[i].clone()).collect()
}

fn br(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Solves `A x = b` exactly over the rationals.  Returns `None` if the
/// system is inconsistent; under-determined systems get one solution with
/// free variables set to zero.
pub fn solve_rational(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, &rhs)| {
            r.iter()
                .map(|&x| br(x))
                .chain(std::iter::once(br(rhs)))
                .collect()
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut prow = 0;
    for col in 0..cols {
        let Some(p) = (prow..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(prow, p);
        let inv = m[prow][col].clone();
        for x in m[prow].iter_mut() {
            *x /= inv.clone();
        }
        for i in 0..rows {
            if i != prow && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let prow_copy = m[prow].clone();
                for (x, y) in m[i].iter_mut().zip(&prow_copy) {
                    *x -= f.clone() * y;
                }
            }
        }
        pivot_of_col[col] = prow;
        prow += 1;
        if prow == rows {
            break;
        }
    }
    for row in m.iter().skip(prow) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for col in 0..cols {
        if pivot_of_col[col] != usize::MAX {
            x[col] = m[pivot_of_col[col]][cols].clone();
        }
    }
    Some(x)
}

/// A linear constraint `coeffs · x + constant ≥ 0`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
}

impl Constraint {
    pub fn from_ints(coeffs: &[i64], constant: i64) -> Self {
        Constraint {
            coeffs: coeffs.iter().map(|&c| br(c)).collect(),
            constant: br(constant),
        }
    }
}

/// Fourier-Motzkin feasibility for a system of `≥ 0` constraints.
/// Exact, and fine at the handful-of-variables scale used by cone checks.
pub fn feasible(mut sys: Vec<Constraint>, nvars: usize) -> bool {
    for var in (0..nvars).rev() {
        let mut lower = Vec::new(); // coeff > 0: gives x >= ...
        let mut upper = Vec::new(); // coeff < 0: gives x <= ...
        let mut rest = Vec::new();
        for c in sys {
            match c.coeffs[var].cmp(&BigRational::zero()) {
                std::cmp::Ordering::Greater => lower.push(c),
                std::cmp::Ordering::Less => upper.push(c),
                std::cmp::Ordering::Equal => rest.push(c),
            }
        }
        for lo in &lower {
            for hi in &upper {
                // lo: a x + p >= 0 (a > 0), hi: b x + q >= 0 (b < 0)
                // combined: a*q - b*p >= 0 ... scaled sum eliminating x.
                let a = lo.coeffs[var].clone();
                let b = hi.coeffs[var].clone();
                let mut coeffs = Vec::with_capacity(var);
                for k in 0..var {
                    coeffs.push(a.clone() * &hi.coeffs[k] - b.clone() * &lo.coeffs[k]);
                }
                let constant = a.clone() * &hi.constant - b.clone() * &lo.constant;
                rest.push(Constraint { coeffs, constant });
            }
        }
        for c in rest.iter_mut() {
            c.coeffs.truncate(var);
        }
        sys = rest;
    }
    sys.iter().all(|c| !c.constant.is_negative())
}
