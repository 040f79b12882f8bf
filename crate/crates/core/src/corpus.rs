//! The built-in regression corpus: a couple dozen complete fans of rank at
//! most three, each carrying several nef divisors.  Projective spaces and
//! their products, Hirzebruch surfaces, weighted projective planes with
//! multiplicity-2 and -3 singularities, the non-simplicial fan over the
//! faces of the cube, and seeded random smooth refinements of the rank-two
//! fans.  Every divisor is validated as nef at construction time.

use crate::fan::{Fan, TDivisor};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::OnceLock;

#[derive(Clone, Debug)]
pub struct CorpusFan {
    pub name: String,
    pub fan: Fan,
    pub divisor_names: Vec<String>,
}

impl CorpusFan {
    fn new(name: &str, mut fan: Fan, divisors: Vec<(&str, Vec<i64>)>) -> Self {
        let mut divisor_names = Vec::new();
        for (dname, coeffs) in divisors {
            let d = TDivisor(coeffs);
            assert!(
                fan.is_nef(&d),
                "corpus divisor {name}/{dname} must be nef"
            );
            fan.add_divisor(dname, d).expect("divisor length");
            divisor_names.push(dname.to_string());
        }
        CorpusFan {
            name: name.to_string(),
            fan,
            divisor_names,
        }
    }
}

fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
    Fan::new(
        rank,
        rays.iter().map(|r| r.to_vec()).collect(),
        cones.iter().map(|c| c.to_vec()).collect(),
    )
    .expect("corpus fan is valid")
}

pub fn p1() -> CorpusFan {
    CorpusFan::new(
        "p1",
        fan(1, &[&[1], &[-1]], &[&[0], &[1]]),
        vec![
            ("d0", vec![0, 0]),
            ("d1", vec![0, 1]),
            ("d2", vec![0, 2]),
            ("d3", vec![1, 2]),
        ],
    )
}

pub fn p2() -> CorpusFan {
    CorpusFan::new(
        "p2",
        fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]),
        vec![
            ("d0", vec![0, 0, 0]),
            ("d1", vec![0, 0, 1]),
            ("d2", vec![0, 0, 2]),
            ("d3", vec![1, 1, 1]),
        ],
    )
}

pub fn p1xp1() -> CorpusFan {
    CorpusFan::new(
        "p1xp1",
        fan(
            2,
            &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        ),
        vec![
            ("d0", vec![0, 0, 0, 0]),
            ("d1", vec![0, 0, 1, 0]),
            ("d2", vec![0, 0, 0, 1]),
            ("d3", vec![0, 0, 1, 1]),
        ],
    )
}

pub fn p112() -> CorpusFan {
    CorpusFan::new(
        "p112",
        fan(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[1, 2], &[0, 2]]),
        vec![
            ("d0", vec![0, 0, 0]),
            ("d1", vec![0, 1, 0]),
            ("d2", vec![0, 2, 0]),
            ("d3", vec![1, 1, 1]),
        ],
    )
}

pub fn p113() -> CorpusFan {
    CorpusFan::new(
        "p113",
        fan(2, &[&[1, 0], &[0, 1], &[-1, -3]], &[&[0, 1], &[1, 2], &[0, 2]]),
        vec![
            ("d0", vec![0, 0, 0]),
            ("d1", vec![0, 1, 0]),
            ("d2", vec![0, 2, 0]),
        ],
    )
}

pub fn p123() -> CorpusFan {
    CorpusFan::new(
        "p123",
        fan(2, &[&[1, 0], &[0, 1], &[-2, -3]], &[&[0, 1], &[1, 2], &[0, 2]]),
        vec![
            ("d0", vec![0, 0, 0]),
            ("d1", vec![0, 0, 6]),
            ("d2", vec![1, 1, 1]),
        ],
    )
}

pub fn hirzebruch(n: i64) -> CorpusFan {
    CorpusFan::new(
        &format!("f{n}"),
        fan(
            2,
            &[&[1, 0], &[0, 1], &[-1, n], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        ),
        vec![
            ("d0", vec![0, 0, 0, 0]),
            ("d1", vec![1, 0, 0, 0]),
            ("d2", vec![0, 0, 0, 1]),
            ("d3", vec![1, 0, 0, 1]),
        ],
    )
}

pub fn p3() -> CorpusFan {
    CorpusFan::new(
        "p3",
        fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        ),
        vec![
            ("d0", vec![0, 0, 0, 0]),
            ("d1", vec![0, 0, 0, 1]),
            ("d2", vec![0, 0, 0, 2]),
            ("d3", vec![1, 1, 1, 1]),
        ],
    )
}

pub fn p1_cubed() -> CorpusFan {
    CorpusFan::new(
        "p1xp1xp1",
        fan(
            3,
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[-1, 0, 0],
                &[0, -1, 0],
                &[0, 0, -1],
            ],
            &[
                &[0, 1, 2],
                &[0, 1, 5],
                &[0, 4, 2],
                &[0, 4, 5],
                &[3, 1, 2],
                &[3, 1, 5],
                &[3, 4, 2],
                &[3, 4, 5],
            ],
        ),
        vec![
            ("d0", vec![0; 6]),
            ("d1", vec![0, 0, 0, 1, 1, 1]),
            ("d2", vec![0, 0, 0, 1, 0, 0]),
            ("d3", vec![0, 0, 0, 1, 1, 0]),
        ],
    )
}

pub fn p2xp1() -> CorpusFan {
    CorpusFan::new(
        "p2xp1",
        fan(
            3,
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[-1, -1, 0],
                &[0, 0, 1],
                &[0, 0, -1],
            ],
            &[
                &[0, 1, 3],
                &[1, 2, 3],
                &[0, 2, 3],
                &[0, 1, 4],
                &[1, 2, 4],
                &[0, 2, 4],
            ],
        ),
        vec![
            ("d0", vec![0; 5]),
            ("d1", vec![0, 0, 1, 0, 0]),
            ("d2", vec![0, 0, 0, 0, 1]),
            ("d3", vec![0, 0, 1, 0, 1]),
        ],
    )
}

/// ℙ¹ × ℙ(1,1,2): a rank-three fan with two singular simplicial maximal
/// cones of multiplicity two.
pub fn p1xp112() -> CorpusFan {
    CorpusFan::new(
        "p1xp112",
        fan(
            3,
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[-1, -2, 0],
                &[0, 0, 1],
                &[0, 0, -1],
            ],
            &[
                &[0, 1, 3],
                &[1, 2, 3],
                &[0, 2, 3],
                &[0, 1, 4],
                &[1, 2, 4],
                &[0, 2, 4],
            ],
        ),
        vec![
            ("d0", vec![0; 5]),
            ("d1", vec![0, 1, 0, 0, 0]),
            ("d2", vec![0, 0, 0, 0, 1]),
            ("d3", vec![0, 1, 0, 0, 1]),
        ],
    )
}

#[allow(clippy::needless_range_loop)]
pub fn cube() -> CorpusFan {
    let mut rays: Vec<Vec<i64>> = Vec::new();
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
            cones.push((0..8).filter(|&i| rays[i][axis] == side).collect::<Vec<_>>());
        }
    }
    CorpusFan::new(
        "cube",
        Fan::new(3, rays, cones).expect("cube fan is valid"),
        vec![
            ("d0", vec![0; 8]),
            ("d1", vec![1; 8]),
            ("d2", vec![2; 8]),
        ],
    )
}

/// Smooth complete rank-2 fans as cyclic ray sequences; refinement inserts
/// the sum of an adjacent pair, which keeps every consecutive determinant
/// equal to one.
fn cyclic_refinement(mut cycle: Vec<Vec<i64>>, steps: usize, rng: &mut StdRng) -> Vec<Vec<i64>> {
    for _ in 0..steps {
        let i = rng.random_range(0..cycle.len());
        let j = (i + 1) % cycle.len();
        let sum: Vec<i64> = cycle[i].iter().zip(&cycle[j]).map(|(a, b)| a + b).collect();
        cycle.insert(j, sum);
    }
    cycle
}

fn fan_from_cycle(cycle: &[Vec<i64>]) -> Fan {
    let n = cycle.len();
    let cones: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    Fan::new(2, cycle.to_vec(), cones).expect("cyclic fan is valid")
}

/// Pulls a nef divisor back along a refinement: the support function is
/// unchanged, so each ray evaluates against the vertex of a containing
/// parent cone.
fn pullback_divisor(parent: &Fan, name: &str, refined: &Fan) -> Vec<i64> {
    let d = parent.divisor(name).expect("parent divisor").clone();
    refined
        .rays()
        .iter()
        .map(|v| {
            for &m in parent.maximal_cones() {
                let cone = parent.cone(m);
                let mat: Vec<Vec<i64>> = (0..parent.rank())
                    .map(|k| cone.rays.iter().map(|&r| parent.ray(r)[k]).collect())
                    .collect();
                if let Some(sol) = crate::lin::solve_rational(&mat, v) {
                    if sol.iter().all(|x| !num::Signed::is_negative(x)) {
                        let vertex = parent.divisor_vertex(&d, m).expect("nef is Cartier");
                        return -crate::lin::dot(&vertex.0, v);
                    }
                }
            }
            unreachable!("complete parent fan covers every ray")
        })
        .collect()
}

type ParentSpec = (&'static str, Vec<Vec<i64>>, fn() -> CorpusFan);

fn random_refinements() -> Vec<CorpusFan> {
    let mut rng = StdRng::seed_from_u64(0x5eed_70c1);
    let mut out = Vec::new();
    let parents: [ParentSpec; 2] = [
        (
            "p2",
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            p2 as fn() -> CorpusFan,
        ),
        (
            "p1xp1",
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            p1xp1 as fn() -> CorpusFan,
        ),
    ];
    for round in 0..3 {
        for (pname, cycle, parent_fn) in &parents {
            let parent = parent_fn();
            let steps = 1 + round;
            let cycle = cyclic_refinement(cycle.clone(), steps, &mut rng);
            let refined = fan_from_cycle(&cycle);
            assert!(refined.is_smooth() && refined.is_complete());
            let divisors: Vec<(&str, Vec<i64>)> = parent
                .divisor_names
                .iter()
                .map(|dn| {
                    (
                        dn.as_str(),
                        pullback_divisor(&parent.fan, dn, &refined),
                    )
                })
                .collect();
            out.push(CorpusFan::new(
                &format!("{pname}-refined-{round}"),
                refined,
                divisors,
            ));
        }
    }
    out
}

/// A one-step refinement of the second Hirzebruch surface (blowup of a
/// fixed point).
pub fn blown_up_f2() -> CorpusFan {
    let parent = hirzebruch(2);
    let cycle = vec![
        vec![1, 0],
        vec![1, 1],
        vec![0, 1],
        vec![-1, 2],
        vec![0, -1],
    ];
    let refined = fan_from_cycle(&cycle);
    let divisors: Vec<(&str, Vec<i64>)> = parent
        .divisor_names
        .iter()
        .map(|dn| (dn.as_str(), pullback_divisor(&parent.fan, dn, &refined)))
        .collect();
    CorpusFan::new("f2-blowup", refined, divisors)
}

fn build() -> Vec<CorpusFan> {
    let mut out = vec![
        p1(),
        p2(),
        p1xp1(),
        p112(),
        p113(),
        p123(),
        hirzebruch(1),
        hirzebruch(2),
        hirzebruch(3),
        hirzebruch(4),
        p3(),
        p1_cubed(),
        p2xp1(),
        p1xp112(),
        cube(),
        blown_up_f2(),
    ];
    out.extend(random_refinements());
    out
}

/// The shared corpus, built once.
pub fn corpus() -> &'static [CorpusFan] {
    static CORPUS: OnceLock<Vec<CorpusFan>> = OnceLock::new();
    CORPUS.get_or_init(build)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_large_enough() {
        let c = corpus();
        assert!(c.len() >= 20, "corpus has {} fans", c.len());
        for cf in c {
            assert!(cf.fan.is_complete(), "{} must be complete", cf.name);
            assert!(cf.fan.rank() <= 3);
            assert!(
                cf.divisor_names.len() >= 3,
                "{} has {} divisors",
                cf.name,
                cf.divisor_names.len()
            );
        }
        // Names are unique.
        let mut names: Vec<&str> = c.iter().map(|cf| cf.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn corpus_has_singular_and_non_simplicial_members() {
        let c = corpus();
        let singular = c.iter().any(|cf| {
            cf.fan
                .maximal_cones()
                .iter()
                .any(|&m| cf.fan.is_simplicial(m) && !cf.fan.is_smooth_cone(m))
        });
        let non_simplicial = c.iter().any(|cf| {
            cf.fan
                .maximal_cones()
                .iter()
                .any(|&m| !cf.fan.is_simplicial(m))
        });
        assert!(singular && non_simplicial);
    }
}
