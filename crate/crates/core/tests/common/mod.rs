//! Generators and randomized property suites shared by the test targets.

#![allow(dead_code)]

use pac_implicit::feasibility::{check_feasible, concretize, fm_feasible};
use pac_implicit::linarith::{Assignment, ConjunctiveFormula, LinearAtom, LinearExpr, Relation, Vocabulary};
use pac_implicit::optimise::{optimise_pac, Goal};
use pac_implicit::pac::{
    blur, decide_pac, decide_with, failure_budget, ground, BlurConfig, Interval, PartialInterval, SampleOutcome,
};
use pac_implicit::rational::{int, pow2, ratio, Rational};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RELATIONS: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];

pub fn vocab(n: usize) -> Vocabulary {
    Vocabulary::from_names((0..n).map(|i| format!("x{i}")))
}

pub fn runner(cases: u32, seed: u64) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

/// Raw atom data over `nvars` variables: coefficients, constant, relation.
fn atom_parts(nvars: usize) -> impl Strategy<Value = (Vec<i64>, i64, usize)> {
    (prop::collection::vec(-3i64..=3, nvars), -6i64..=6, 0..RELATIONS.len())
}

pub fn build_atom(v: &Vocabulary, coeffs: &[i64], constant: i64, rel: usize) -> LinearAtom {
    let expr = LinearExpr::from_terms(
        v.vars().iter().zip(coeffs).map(|(x, c)| (int(*c), x.clone())),
        int(constant),
    );
    LinearAtom::new(expr, RELATIONS[rel])
}

/// Conjunctions over at most 4 variables with at most 8 atoms.
pub fn system() -> impl Strategy<Value = (Vocabulary, ConjunctiveFormula)> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(atom_parts(n), 1..=8).prop_map(move |parts| {
            let v = vocab(n);
            let mut f = ConjunctiveFormula::new();
            for (c, k, r) in &parts {
                f.push(build_atom(&v, c, *k, *r));
            }
            (v, f)
        })
    })
}

/// Systems built to stress pivoting: many duplicated and scaled rows
/// through one shared vertex.
pub fn degenerate_system() -> impl Strategy<Value = (Vocabulary, ConjunctiveFormula)> {
    (
        2usize..=4,
        prop::collection::vec(
            (prop::collection::vec(-2i64..=2, 4), 1i64..=3, 0..RELATIONS.len()),
            2..=8,
        ),
    )
        .prop_map(|(n, rows)| {
            let v = vocab(n);
            let mut f = ConjunctiveFormula::new();
            for (coeffs, scale, rel) in rows {
                let scaled: Vec<i64> = coeffs[..n].iter().map(|c| c * scale).collect();
                f.push(build_atom(&v, &scaled, 0, rel));
            }
            (v, f)
        })
}

/// Checks `check_feasible` against Fourier–Motzkin and validates the model.
pub fn agrees_with_fm(f: &ConjunctiveFormula) -> Result<(), String> {
    let verdict = check_feasible(f).map_err(|e| e.to_string())?;
    let oracle = fm_feasible(f).map_err(|e| e.to_string())?;
    if verdict.is_sat() != oracle {
        return Err(format!("simplex {} but FM {oracle} on {f:?}", verdict.is_sat()));
    }
    if let Some(model) = verdict.model() {
        let point = concretize(model, f);
        if !f.satisfies(&point).unwrap_or(false) {
            return Err(format!("model {point:?} violates {f:?}"));
        }
    }
    Ok(())
}

fn bound() -> impl Strategy<Value = Option<Rational>> {
    prop_oneof![1 => Just(None), 3 => small_rational().prop_map(Some)]
}

/// A partial interval over `v`, a point inside it, and a point with one
/// coordinate pushed outside a finite bound (when one exists).
fn interval_case() -> impl Strategy<Value = (Vocabulary, PartialInterval, Assignment, Option<Assignment>)> {
    (
        1usize..=4,
        prop::collection::vec((bound(), bound(), 0u32..=8), 4),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(n, raw, pick)| {
            let v = vocab(n);
            let mut phi = PartialInterval::new();
            let mut inside = Assignment::new();
            for (x, (a, b, t)) in v.vars().iter().zip(raw) {
                let (lo, hi) = match (a, b) {
                    (Some(a), Some(b)) if a > b => (Some(b), Some(a)),
                    other => other,
                };
                let value = match (&lo, &hi) {
                    (Some(l), Some(h)) => l + (h - l) * ratio(t as i64, 8),
                    (Some(l), None) => l + int(t as i64),
                    (None, Some(h)) => h - int(t as i64),
                    (None, None) => int(t as i64 - 4),
                };
                phi.set(x, Interval::new(lo, hi).unwrap());
                inside.insert(x.clone(), value);
            }
            let finite: Vec<_> = v
                .vars()
                .iter()
                .flat_map(|x| {
                    let iv = phi.get(x);
                    let mut out = Vec::new();
                    if let Some(l) = iv.lower() {
                        out.push((x.clone(), l - ratio(1, 7)));
                    }
                    if let Some(h) = iv.upper() {
                        out.push((x.clone(), h + ratio(1, 7)));
                    }
                    out
                })
                .collect();
            let outside = (!finite.is_empty()).then(|| {
                let (x, value) = finite[pick.index(finite.len())].clone();
                let mut p = inside.clone();
                p.insert(x, value);
                p
            });
            (v, phi, inside, outside)
        })
}

pub fn grounding_soundness(runner: &mut TestRunner) -> Result<(), TestError<String>> {
    runner
        .run(&interval_case(), |(_, phi, inside, outside)| {
            let g = ground(&phi);
            prop_assert!(phi.contains(&inside));
            prop_assert!(g.satisfies(&inside).unwrap());
            if let Some(p) = outside {
                prop_assert!(!g.satisfies(&p).unwrap());
            }
            Ok(())
        })
        .map_err(map_err)
}

/// Point samples on one variable `x`, a query `x ≤ b`, and two epsilons.
fn budget_case() -> impl Strategy<Value = (Vec<i64>, i64, (u32, u32, u32))> {
    (
        prop::collection::vec(-10i64..=10, 1..=30),
        -10i64..=10,
        (0u32..=20, 0u32..=20, 1u32..=20),
    )
}

pub fn budget_monotonicity(runner: &mut TestRunner) -> Result<(), TestError<String>> {
    runner
        .run(&budget_case(), |(xs, b, (p, q, d))| {
            let d = d.max(p.max(q));
            let (e1, e2) = (ratio(p.min(q) as i64, d as i64), ratio(p.max(q) as i64, d as i64));
            prop_assert!(failure_budget(&e1, xs.len()) <= failure_budget(&e2, xs.len()));
            let v = vocab(1);
            let x = &v.vars()[0];
            let samples: Vec<PartialInterval> = xs
                .iter()
                .map(|n| PartialInterval::new().with(x, Interval::point(int(*n))))
                .collect();
            let query = [LinearAtom::compare(
                LinearExpr::var(x),
                Relation::Le,
                LinearExpr::constant(int(b)),
            )];
            let kb = ConjunctiveFormula::new();
            let lo = decide_pac(&kb, &query, &e1, &samples).unwrap();
            let hi = decide_pac(&kb, &query, &e2, &samples).unwrap();
            prop_assert!(!lo.accepted() || hi.accepted());
            let failures = xs.iter().filter(|n| **n > b).count();
            prop_assert_eq!(lo.accepted(), failures <= failure_budget(&e1, xs.len()));
            let full = decide_with(&e1, xs.len(), true, |k| {
                Ok(if xs[k] > b {
                    SampleOutcome::NotEntailed
                } else {
                    SampleOutcome::Entailed
                })
            })
            .unwrap();
            prop_assert_eq!(full.failed_count, failures);
            prop_assert_eq!(full.accepted(), lo.accepted());
            Ok(())
        })
        .map_err(map_err)
}

/// Point samples over 1–3 variables with a random objective.
pub fn optimise_case() -> impl Strategy<Value = (Vocabulary, Vec<Assignment>, LinearExpr, bool, u32)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(small_rational(), n), 1..=6),
            prop::collection::vec(-3i64..=3, n),
            -4i64..=4,
            any::<bool>(),
            1u32..=24,
        )
            .prop_map(move |(points, coeffs, c, maximise, a)| {
                let v = vocab(n);
                let pts = points
                    .into_iter()
                    .map(|p| v.vars().iter().cloned().zip(p).collect::<Assignment>())
                    .collect();
                let f = LinearExpr::from_terms(v.vars().iter().zip(&coeffs).map(|(x, c)| (int(*c), x.clone())), int(c));
                (v, pts, f, maximise, a)
            })
    })
}

/// The best objective value over the points, in the objective's own frame.
pub fn brute_force(points: &[Assignment], f: &LinearExpr, goal: Goal) -> Rational {
    let values = points.iter().map(|p| f.evaluate(p).unwrap());
    match goal {
        Goal::Maximise => values.max().unwrap(),
        Goal::Minimise => values.min().unwrap(),
    }
}

pub fn bracket_invariant(runner: &mut TestRunner) -> Result<(), TestError<String>> {
    runner
        .run(&optimise_case(), |(_, points, f, maximise, a)| {
            let goal = if maximise { Goal::Maximise } else { Goal::Minimise };
            let samples: Vec<PartialInterval> = points.iter().map(PartialInterval::from_point).collect();
            let kb = ConjunctiveFormula::new();
            let r = optimise_pac(&kb, &f, &int(0), a, &samples, goal).unwrap();
            let internal = match goal {
                Goal::Maximise => f.clone(),
                Goal::Minimise => -f.clone(),
            };
            let accepts = |b: &Rational| {
                let q = [LinearAtom::compare(
                    LinearExpr::constant(b.clone()),
                    Relation::Ge,
                    internal.clone(),
                )];
                decide_pac(&kb, &q, &int(0), &samples).unwrap().accepted()
            };
            prop_assert!(r.initial_low <= r.bracket_low && r.bracket_high <= r.initial_high);
            prop_assert!(r.bracket_low < r.bracket_high);
            prop_assert!(accepts(&r.bracket_high) && !accepts(&r.bracket_low));
            prop_assert!(accepts(&r.initial_high) && !accepts(&r.initial_low));
            // Every binary-search step keeps the same two-sided picture.
            let search = &r.probes[r.probes.len() - a as usize..];
            let (mut l, mut u) = (r.initial_low.clone(), r.initial_high.clone());
            for probe in search {
                prop_assert_eq!(&probe.bound, &((&l + &u) / int(2)));
                prop_assert_eq!(probe.accepted, accepts(&probe.bound));
                if probe.accepted {
                    u = probe.bound.clone();
                } else {
                    l = probe.bound.clone();
                }
            }
            prop_assert_eq!((l, u), (r.bracket_low.clone(), r.bracket_high.clone()));
            Ok(())
        })
        .map_err(map_err)
}

pub fn width_contraction(runner: &mut TestRunner) -> Result<(), TestError<String>> {
    runner
        .run(&optimise_case(), |(_, points, f, maximise, a)| {
            let goal = if maximise { Goal::Maximise } else { Goal::Minimise };
            let samples: Vec<PartialInterval> = points.iter().map(PartialInterval::from_point).collect();
            let r = optimise_pac(&ConjunctiveFormula::new(), &f, &int(0), a, &samples, goal).unwrap();
            let initial = &r.initial_high - &r.initial_low;
            prop_assert_eq!(r.width(), &initial * pow2(-(a as i64)));
            let doubling = r.decide_calls - a as usize;
            prop_assert!(r.decide_calls <= doubling + a as usize + 3);
            let best = brute_force(&points, &f, goal);
            let gap = &r.estimate - &best;
            prop_assert!(gap.clone() * gap.clone() <= r.width() * r.width());
            Ok(())
        })
        .map_err(map_err)
}

fn blur_case() -> impl Strategy<Value = (Vec<(i64, i64, i64)>, u8, u64)> {
    (
        prop::collection::vec((-50i64..=50, 0i64..=64, 1i64..=64), 1..=6),
        0u8..=4,
        any::<u64>(),
    )
}

pub fn blur_consistency(runner: &mut TestRunner) -> Result<(), TestError<String>> {
    runner
        .run(&blur_case(), |(coords, mask, seed)| {
            let v = vocab(coords.len());
            let mut point = Assignment::new();
            let mut domain = std::collections::BTreeMap::new();
            for (x, (lo, t, w)) in v.vars().iter().zip(&coords) {
                let lo = int(*lo);
                let hi = &lo + int(*w);
                point.insert(x.clone(), &lo + int(*w) * ratio(*t, 64));
                domain.insert(x.clone(), (lo, hi));
            }
            let config = BlurConfig {
                domain,
                mask_probability: f64::from(mask) / 4.0,
                sigma: 0.0,
            };
            let phi = blur(&point, &config, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            prop_assert!(phi.contains(&point));
            for (x, value) in &point {
                let iv = phi.get(x);
                prop_assert!(iv.is_unbounded() || iv.lower() == Some(value) && iv.upper() == Some(value));
            }
            Ok(())
        })
        .map_err(map_err)
}

pub fn simplex_termination(runner: &mut TestRunner) -> Result<(), TestError<String>> {
    let cases = prop_oneof![system(), degenerate_system()];
    runner
        .run(&cases, |(_, f)| {
            agrees_with_fm(&f).map_err(TestCaseError::fail)?;
            Ok(())
        })
        .map_err(map_err)
}

fn map_err<T: std::fmt::Debug>(e: TestError<T>) -> TestError<String> {
    match e {
        TestError::Abort(r) => TestError::Abort(r),
        TestError::Fail(r, v) => TestError::Fail(r, format!("{v:?}")),
    }
}

pub type Suite = fn(&mut TestRunner) -> Result<(), TestError<String>>;

/// Name, case count and seed of every randomized property suite.
pub const SUITES: [(&str, Suite, u32, u64); 6] = [
    ("grounding soundness", grounding_soundness, 2_000, 11),
    ("budget monotonicity", budget_monotonicity, 1_500, 12),
    ("bracket invariant", bracket_invariant, 300, 13),
    ("width contraction", width_contraction, 500, 14),
    ("blur consistency", blur_consistency, 10_000, 15),
    ("simplex termination", simplex_termination, 2_000, 16),
];
