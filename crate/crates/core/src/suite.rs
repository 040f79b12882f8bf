//! The acceptance suite: every regression criterion as a callable check,
//! shared by the `acceptance` integration test target and the CLI `corpus`
//! subcommand.  All comparisons are exact; the reports carry timings and a
//! short diagnostic for failures.

use crate::corpus::{corpus, p112};
use crate::fan::PivotPolicy;
use crate::localize::{dual_basis, euler_char_with_oracle, multiplicity_sum};
use crate::mult::{em_orbit_closure, em_point, em_point_with_policy, multiplicity_table};
use crate::ring::{adams, bott, parse_poly, Character, Fraction, LaurentPoly};
use crate::rr::{verify_adams_rr_point, verify_grr_pushforward, verify_todd_identity};
use crate::spherical::{
    check_relations, membership, surface_data, tuple_from_strs, SurfaceKind,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} ({:.2}s){}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            if self.details.is_empty() {
                String::new()
            } else {
                format!(" — {}", self.details)
            }
        )
    }
}

fn run(id: usize, name: &'static str, body: impl FnOnce() -> Result<String, String>) -> CriterionReport {
    let start = Instant::now();
    let outcome = body();
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(details) => CriterionReport {
            id,
            name,
            passed: true,
            details,
            seconds,
        },
        Err(details) => CriterionReport {
            id,
            name,
            passed: false,
            details,
            seconds,
        },
    }
}

fn frac(num: &str, den: &str) -> Fraction {
    Fraction::new(parse_poly(num, 2).unwrap(), parse_poly(den, 2).unwrap())
}

/// Criterion 1: the multiplicity table of the weighted projective plane
/// ℙ(1,1,2) — all nine entries, exactly.
pub fn criterion_p112_table() -> CriterionReport {
    run(1, "p112-multiplicity-table", || {
        let start = Instant::now();
        let cf = p112();
        let fan = &cf.fan;
        let c01 = fan.find_cone(&[0, 1]).unwrap();
        let c12 = fan.find_cone(&[1, 2]).unwrap();
        let c02 = fan.find_cone(&[0, 2]).unwrap();

        let check = |got: &crate::ring::LocalizedClass, want: &Fraction, what: &str| {
            if got.to_fraction() == *want {
                Ok(())
            } else {
                Err(format!("{what}: got {got:?}"))
            }
        };

        // em(X) at the three fixed points.
        check(&em_point(fan, c01).unwrap(), &frac("1", "(1-e^{u1})*(1-e^{u2})"), "X at <e1,e2>")?;
        check(
            &em_point(fan, c12).unwrap(),
            &frac("1", "(1-e^{-u1})*(1-e^{-2*u1+u2})"),
            "X at <e2,-e1-2e2>",
        )?;
        check(
            &em_point(fan, c02).unwrap(),
            &frac("1+e^{u1-u2}", "(1-e^{2*u1-u2})*(1-e^{-u2})"),
            "X at the singular cone",
        )?;

        // em(D) for the divisor on the third ray.
        let d_table = em_orbit_closure(fan, fan.find_cone(&[2]).unwrap()).unwrap();
        check(&d_table[&c01], &frac("0", "1"), "D at <e1,e2>")?;
        check(&d_table[&c12], &frac("1", "1-e^{-2*u1+u2}"), "D at <e2,-e1-2e2>")?;
        check(&d_table[&c02], &frac("1", "1-e^{2*u1-u2}"), "D at the singular cone")?;

        // em(p) for the singular fixed point.
        let p_table = em_orbit_closure(fan, c02).unwrap();
        check(&p_table[&c01], &frac("0", "1"), "p at <e1,e2>")?;
        check(&p_table[&c12], &frac("0", "1"), "p at <e2,-e1-2e2>")?;
        check(&p_table[&c02], &frac("1", "1"), "p at itself")?;

        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 1.0 {
            return Err(format!("nine entries exact, but took {elapsed:.2}s (limit 1s)"));
        }
        Ok(format!("nine entries exact in {elapsed:.3}s"))
    })
}

/// Criterion 2: the dual basis of `([O_X], [O_D], [O_p])` on ℙ(1,1,2) — the
/// three image expansions and the determinant, exactly.  The image matrix
/// is symmetric and its determinant is −(e^{−u1+2u2} + e^{u2}), a non-unit.
pub fn criterion_p112_dual_basis() -> CriterionReport {
    run(2, "p112-dual-basis", || {
        let start = Instant::now();
        let cf = p112();
        let fan = &cf.fan;
        let x = fan.find_cone(&[]).unwrap();
        let d = fan.find_cone(&[2]).unwrap();
        let p = fan.find_cone(&[0, 2]).unwrap();
        let db = dual_basis(fan, &[x, d, p]).map_err(|e| e.to_string())?;

        let expected: [[&str; 3]; 3] = [
            ["(1-e^{u1})*(1-e^{u2})", "e^{u1}-e^{u1+u2}", "e^{u2}"],
            [
                "e^{u1}-e^{u1+u2}",
                "e^{-u1+u2}+e^{u1+u2}+e^{u2}-e^{u1}",
                "-(e^{u2}+e^{-u1+u2})",
            ],
            ["e^{u2}", "-(e^{u2}+e^{-u1+u2})", "e^{-u1+u2}"],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, src) in row.iter().enumerate() {
                let want = parse_poly(src, 2).unwrap();
                if db.image_matrix[i][j] != want {
                    return Err(format!(
                        "image matrix ({i},{j}): got {:?}, want {:?}",
                        db.image_matrix[i][j], want
                    ));
                }
            }
        }
        let want_det = parse_poly("-(e^{-u1+2*u2}+e^{u2})", 2).unwrap();
        if db.determinant != want_det {
            return Err(format!("determinant: got {:?}", db.determinant));
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 1.0 {
            return Err(format!("exact, but took {elapsed:.2}s (limit 1s)"));
        }
        Ok(format!(
            "matrix and determinant exact in {elapsed:.3}s (det = −(e^{{-u1+2u2}}+e^{{u2}}))"
        ))
    })
}

/// Criterion 3: the lattice-point identity χ(O(D)) = Σ_{m ∈ P_D} e^m for
/// every corpus fan and every registered nef divisor.
pub fn criterion_euler_oracle() -> CriterionReport {
    run(3, "euler-lattice-oracle", || {
        let start = Instant::now();
        let mut fans = 0usize;
        let mut checks = 0usize;
        for cf in corpus() {
            fans += 1;
            if cf.divisor_names.len() < 3 {
                return Err(format!("{} has fewer than 3 divisors", cf.name));
            }
            for dn in &cf.divisor_names {
                let d = cf.fan.divisor(dn).unwrap().clone();
                let (value, oracle, agree) =
                    euler_char_with_oracle(&cf.fan, &d).map_err(|e| format!("{}/{dn}: {e}", cf.name))?;
                if !agree {
                    return Err(format!(
                        "{}/{dn}: fixed-point sum {value:?} != lattice sum {oracle:?}",
                        cf.name
                    ));
                }
                checks += 1;
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if fans < 20 {
            return Err(format!("only {fans} corpus fans"));
        }
        if elapsed >= 60.0 {
            return Err(format!("{checks} checks took {elapsed:.1}s (limit 60s)"));
        }
        Ok(format!("{checks} divisor checks across {fans} fans in {elapsed:.2}s"))
    })
}

/// Criterion 4: Σ_p em_p = 1 on every corpus fan.
pub fn criterion_multiplicity_sum() -> CriterionReport {
    run(4, "multiplicity-sum", || {
        for cf in corpus() {
            let s = multiplicity_sum(&cf.fan).map_err(|e| format!("{}: {e}", cf.name))?;
            if !s.is_one() {
                return Err(format!("{}: Σ em = {s:?}", cf.name));
            }
        }
        Ok(format!("{} fans", corpus().len()))
    })
}

/// Criterion 5: the Todd identity to degree 10 at every smooth fixed point,
/// and the leading-term identity at every singular one.
pub fn criterion_todd() -> CriterionReport {
    run(5, "todd-identity", || {
        let mut points = 0usize;
        for cf in corpus() {
            for &m in cf.fan.maximal_cones() {
                let report =
                    verify_todd_identity(&cf.fan, m, 10).map_err(|e| format!("{}: {e}", cf.name))?;
                if !report.pass {
                    return Err(format!("{} cone {m}: {}", cf.name, report.detail));
                }
                points += 1;
            }
        }
        Ok(format!("{points} fixed points"))
    })
}

/// Criterion 6: the Adams ratio identity for j ∈ {1,2,3,5} at every corpus
/// fixed point, plus the randomized θ^j(n) = j^n and ψ^j∘ψ^k = ψ^{jk}
/// properties.
pub fn criterion_adams() -> CriterionReport {
    run(6, "adams-riemann-roch", || {
        let mut points = 0usize;
        for cf in corpus() {
            for &m in cf.fan.maximal_cones() {
                for j in [1, 2, 3, 5] {
                    let report = verify_adams_rr_point(&cf.fan, m, j)
                        .map_err(|e| format!("{}: {e}", cf.name))?;
                    if !report.pass {
                        return Err(format!("{} cone {m} j={j}: {}", cf.name, report.detail));
                    }
                }
                points += 1;
            }
        }

        let mut rng = StdRng::seed_from_u64(0xada5);
        for trial in 0..1000 {
            // θ^j(n) = j^n on trivial weights.
            let j = rng.random_range(1..=6);
            let n = rng.random_range(0..=8);
            let theta = bott(j, &[(Character::zero(2), n)], 2);
            let want = Fraction::from_poly(LaurentPoly::constant(2, j.pow(n as u32)));
            if theta != want {
                return Err(format!("trial {trial}: θ^{j}({n}) != {j}^{n}"));
            }
            // ψ^j ∘ ψ^k = ψ^{jk} on random polynomials.
            let f = random_poly(&mut rng, 2);
            let (a, b) = (rng.random_range(1..=5), rng.random_range(1..=5));
            if adams(a, &adams(b, &f)) != adams(a * b, &f) {
                return Err(format!("trial {trial}: ψ^{a}ψ^{b} != ψ^{}", a * b));
            }
        }
        Ok(format!("{points} fixed points × j ∈ {{1,2,3,5}}; 1000 randomized trials"))
    })
}

fn random_poly(rng: &mut StdRng, rank: usize) -> LaurentPoly {
    let terms = rng.random_range(1..=3);
    let mut f = LaurentPoly::zero(rank);
    for _ in 0..terms {
        let exp = Character((0..rank).map(|_| rng.random_range(-4..=4)).collect());
        let coeff = num::BigInt::from(rng.random_range(-3..=3i64));
        f = &f + &LaurentPoly::monomial(exp, coeff);
    }
    f
}

/// Criterion 7: the pushforward identity to degree 8 on every smooth
/// complete corpus fan, for every registered nef divisor.
pub fn criterion_grr() -> CriterionReport {
    run(7, "grr-pushforward", || {
        let start = Instant::now();
        let mut checks = 0usize;
        for cf in corpus() {
            if !cf.fan.is_smooth() {
                continue;
            }
            for dn in &cf.divisor_names {
                let d = cf.fan.divisor(dn).unwrap().clone();
                let report = verify_grr_pushforward(&cf.fan, &d, 8)
                    .map_err(|e| format!("{}/{dn}: {e}", cf.name))?;
                if !report.pass {
                    return Err(format!("{}/{dn}: {}", cf.name, report.detail));
                }
                checks += 1;
            }
        }
        Ok(format!("{checks} checks in {:.2}s", start.elapsed().as_secs_f64()))
    })
}

/// Criterion 8: the surface catalogue — the standard basis triples, the
/// outlier that fails exactly the three-term relation, the standard-basis
/// suites, and the membership ⟺ relations equivalence on a sampled window
/// grid of at least 10⁴ tuples.
pub fn criterion_surfaces() -> CriterionReport {
    run(8, "surface-congruences", || {
        let start = Instant::now();

        // Displayed basis triples.
        let triples = [
            tuple_from_strs(&["1", "1", "1"]),
            tuple_from_strs(&["0", "1 - e^{-2*t}", "1 - e^{-4*t}"]),
            tuple_from_strs(&["0", "0", "(1 - e^{-2*t})*(1 - e^{-4*t})"]),
        ];
        for (i, tr) in triples.iter().enumerate() {
            if !check_relations(SurfaceKind::PV, tr).unwrap().is_empty() {
                return Err(format!("basis triple {i} fails"));
            }
        }
        let outlier = tuple_from_strs(&["0", "0", "1 - e^{-4*t}"]);
        let violations = check_relations(SurfaceKind::PV, &outlier).unwrap();
        if violations.len() != 1 || violations[0].index != 3 {
            return Err(format!(
                "outlier should fail exactly the 3-term relation, got {violations:?}"
            ));
        }

        // Standard-basis suites for all catalogued kinds.
        let all_kinds = [
            SurfaceKind::Point,
            SurfaceKind::P1,
            SurfaceKind::PV,
            SurfaceKind::P1xP1,
            SurfaceKind::Fn(1),
            SurfaceKind::Fn(2),
            SurfaceKind::Fn(3),
            SurfaceKind::Pn(1),
            SurfaceKind::Pn(2),
            SurfaceKind::Kn(1),
        ];
        for kind in all_kinds {
            let data = surface_data(kind).unwrap();
            for (i, b) in data.basis.iter().enumerate() {
                if !check_relations(kind, b).unwrap().is_empty() {
                    return Err(format!("{kind}: basis {i} fails relations"));
                }
                match membership(kind, b).unwrap() {
                    Ok(coeffs) => {
                        let unit = coeffs
                            .iter()
                            .enumerate()
                            .all(|(j, c)| if j == i { c.is_one() } else { c.is_zero() });
                        if !unit {
                            return Err(format!("{kind}: basis {i} is not a unit vector"));
                        }
                    }
                    Err(_) => return Err(format!("{kind}: basis {i} not a member")),
                }
            }
        }

        // Membership ⟺ relations on a sampled window grid.
        let oracle_kinds = [
            SurfaceKind::PV,
            SurfaceKind::P1xP1,
            SurfaceKind::Fn(1),
            SurfaceKind::Fn(2),
            SurfaceKind::Fn(3),
        ];
        let mut rng = StdRng::seed_from_u64(0x04ac1e);
        let mut total = 0usize;
        let mut members = 0usize;
        for kind in oracle_kinds {
            let data = surface_data(kind).unwrap();
            let npts = data.points.len();
            // Positive samples: windowed combinations of the standard basis.
            for _ in 0..1050 {
                let mut tuple = vec![LaurentPoly::zero(1); npts];
                for b in &data.basis {
                    let c = random_window_poly(&mut rng, 2, 2);
                    for (t, be) in tuple.iter_mut().zip(b) {
                        *t = &*t + &(&c * be);
                    }
                }
                let is_member = membership(kind, &tuple).unwrap().is_ok();
                let passes = check_relations(kind, &tuple).unwrap().is_empty();
                if !is_member || !passes {
                    return Err(format!("{kind}: constructed member rejected"));
                }
                total += 1;
                members += 1;
            }
            // Window grid samples: exponents in [−8, 8], coefficients in
            // {−2,…,2}; mostly non-members.
            for _ in 0..1150 {
                let tuple: Vec<LaurentPoly> = (0..npts)
                    .map(|_| random_window_poly(&mut rng, 8, 2))
                    .collect();
                let is_member = membership(kind, &tuple).unwrap().is_ok();
                let passes = check_relations(kind, &tuple).unwrap().is_empty();
                if is_member != passes {
                    return Err(format!(
                        "{kind}: membership={is_member} but relations={passes} on {tuple:?}"
                    ));
                }
                total += 1;
                members += usize::from(is_member);
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if total < 10_000 {
            return Err(format!("only {total} sampled tuples"));
        }
        if elapsed >= 120.0 {
            return Err(format!("took {elapsed:.1}s (limit 120s)"));
        }
        Ok(format!(
            "{total} tuples ({members} members) in {elapsed:.2}s"
        ))
    })
}

fn random_window_poly(rng: &mut StdRng, window: i64, max_coeff: i64) -> LaurentPoly {
    let terms = rng.random_range(0..=2);
    let mut f = LaurentPoly::zero(1);
    for _ in 0..terms {
        let e = Character(vec![rng.random_range(-window..=window)]);
        let c = num::BigInt::from(rng.random_range(-max_coeff..=max_coeff));
        f = &f + &LaurentPoly::monomial(e, c);
    }
    f
}

/// Criterion 9: resolution independence — the multiplicity of every
/// singular corpus cone is the same under both stellar pivot policies.
pub fn criterion_resolution_independence() -> CriterionReport {
    run(9, "resolution-independence", || {
        let mut cones = 0usize;
        for cf in corpus() {
            for &m in cf.fan.maximal_cones() {
                if cf.fan.is_smooth_cone(m) {
                    continue;
                }
                let a = em_point_with_policy(&cf.fan, m, PivotPolicy::MinSum)
                    .map_err(|e| format!("{}: {e}", cf.name))?;
                let b = em_point_with_policy(&cf.fan, m, PivotPolicy::MinSumRevLex)
                    .map_err(|e| format!("{}: {e}", cf.name))?;
                if a != b {
                    return Err(format!("{} cone {m}: policies disagree", cf.name));
                }
                cones += 1;
            }
        }
        if cones == 0 {
            return Err("corpus has no singular cones".to_string());
        }
        Ok(format!("{cones} singular cones"))
    })
}

/// Criterion 10: items intentionally not checked — conclusions that rest on
/// external inputs (the non-surjectivity of the forgetful map for the cube
/// fan needs an independently computed Chow ring) and abstract existence
/// statements with no finite certificate.  Recorded here so the exclusion
/// is explicit.
pub fn criterion_exclusions() -> CriterionReport {
    run(10, "documented-exclusions", || {
        // Sanity: the ingredients we do compute for the cube fan exist.
        let cube = corpus()
            .iter()
            .find(|cf| cf.name == "cube")
            .ok_or("cube fan missing from corpus")?;
        multiplicity_table(&cube.fan).map_err(|e| e.to_string())?;
        Ok("non-surjectivity and existence statements excluded by design".to_string())
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_p112_table(),
        criterion_p112_dual_basis(),
        criterion_euler_oracle(),
        criterion_multiplicity_sum(),
        criterion_todd(),
        criterion_adams(),
        criterion_grr(),
        criterion_surfaces(),
        criterion_resolution_independence(),
        criterion_exclusions(),
    ]
}
