use divmax_core::baselines::{brute_force_opt, greedy_insertion, local_search};
use divmax_core::geometry::{apply_transforms, certify_negative_type, point_distances, PointMetric, SchoenbergForm};
use divmax_core::lab::{self, MatroidChoice};
use divmax_core::matroid::indicator;
use divmax_core::relaxation::{solve_slice, sweep_slices};
use divmax_core::rounding::Rounder;
use divmax_core::{DistanceMatrix, Instance, Matroid, Problem, RoundOptions, SliceOptions, Transform};
use proptest::collection::vec;
use proptest::prelude::*;

fn quad(d: &DistanceMatrix, x: &[f64]) -> f64 {
    (0..d.n())
        .flat_map(|i| (0..d.n()).map(move |j| (i, j)))
        .map(|(i, j)| x[i] * x[j] * d.get(i, j))
        .sum()
}

fn points(n: std::ops::RangeInclusive<usize>, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    n.prop_flat_map(move |n| vec(vec(-3.0f64..3.0, dim), n))
}

fn metric() -> impl Strategy<Value = PointMetric> {
    prop_oneof![
        Just(PointMetric::L1),
        Just(PointMetric::L2),
        (1.0f64..=2.0).prop_map(PointMetric::Lp),
    ]
}

fn transform() -> impl Strategy<Value = Transform> {
    prop_oneof![
        (0.05f64..=1.0).prop_map(Transform::Power),
        Just(Transform::Ratio),
        Just(Transform::Log1p),
        (0.1f64..5.0).prop_map(Transform::ExpDecay),
        Just(Transform::MetricPower),
    ]
}

/// Small matroids of every kind over 4..=8 elements.
fn matroid() -> impl Strategy<Value = Matroid> {
    prop_oneof![
        (4usize..=8)
            .prop_flat_map(|n| (Just(n), 1..n))
            .prop_map(|(n, k)| Matroid::uniform(n, k).unwrap()),
        (4usize..=8, 1usize..=3, 1usize..=2).prop_map(|(n, b, c)| Matroid::partition_even(n, b, c.min(n / b)).unwrap()),
        vec((0usize..5, 0usize..5), 4..=8).prop_map(|edges| Matroid::graphic(5, edges).unwrap()),
        (4usize..=7, 1usize..=3).prop_map(|(n, k)| {
            // truncated partition, given as a rank table
            let half = n / 2;
            let table = (0u32..1 << n)
                .map(|m| {
                    let lo = (m & ((1 << half) - 1)).count_ones().min(2);
                    let hi = (m >> half).count_ones().min(2);
                    (lo + hi).min(k as u32)
                })
                .collect();
            Matroid::explicit_rank(n, table).unwrap()
        }),
    ]
}

/// A point of the base polytope: a convex combination of bases, lifted.
fn base_point(m: &Matroid, weights: &[Vec<f64>], mix: &[f64]) -> Vec<f64> {
    let n = m.n();
    let total: f64 = mix.iter().sum();
    let mut x = vec![0.0; n];
    for (w, &c) in weights.iter().zip(mix) {
        let w: Vec<f64> = (0..n).map(|i| w[i % w.len()]).collect();
        for e in m.greedy_basis(m.full_rank(), &w).unwrap() {
            x[e] += c / total;
        }
    }
    m.lift_to_base(&x).unwrap()
}

fn in_polytope(m: &Matroid, x: &[f64]) -> bool {
    m.min_slack_exhaustive(x).unwrap() >= -1e-9
}

fn l2_instance(pts: &[Vec<f64>], m: Matroid, scores: Option<Vec<f64>>) -> Instance {
    let n = m.n();
    let pts: Vec<Vec<f64>> = (0..n).map(|i| pts[i % pts.len()].clone()).collect();
    let d = point_distances(&pts, PointMetric::L2).unwrap();
    Instance::new(d, m, scores.map(|s| (0..n).map(|i| s[i % s.len()]).collect())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schoenberg_identity_on_fractional_points(pts in points(2..=10, 3), m in metric(), seed in any::<u64>()) {
        let d = point_distances(&pts, m).unwrap();
        let form = SchoenbergForm::new(&d, (seed % d.n() as u64) as usize).unwrap();
        let x = lab::random_scores(d.n(), 1.0, &mut lab::rng(seed));
        let direct = quad(&d, &x);
        prop_assert!((direct - form.slice_value(&x)).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn negative_type_verdict_matches_definition(pts in points(2..=10, 3), m in metric(), b in vec(-1.0f64..1.0, 10)) {
        let d = point_distances(&pts, m).unwrap();
        prop_assert!(certify_negative_type(&d).is_negative_type());
        let n = d.n();
        let mean = b[..n].iter().sum::<f64>() / n as f64;
        let b: Vec<f64> = b[..n].iter().map(|v| v - mean).collect();
        prop_assert!(quad(&d, &b) <= 1e-9);
    }

    #[test]
    fn transforms_preserve_negative_type(pts in points(2..=10, 2), m in metric(), ts in vec(transform(), 1..3)) {
        let d = point_distances(&pts, m).unwrap();
        let ts: Vec<Transform> = if d.is_metric() { ts } else {
            ts.into_iter().filter(|t| *t != Transform::MetricPower).collect()
        };
        // metric power needs a metric input, which earlier transforms keep
        let out = apply_transforms(&d, &ts).unwrap();
        prop_assert!(certify_negative_type(&out).is_negative_type());
    }

    #[test]
    fn lift_increases_dispersion(m in matroid(), pts in points(8..=8, 2), w in vec(vec(0.0f64..1.0, 8), 1..4), mix in vec(0.1f64..1.0, 3)) {
        let inst = l2_instance(&pts, m.clone(), None);
        let x = base_point(&m, &w, &mix[..w.len()]);
        let shrunk: Vec<f64> = x.iter().map(|v| 0.7 * v).collect();
        let lifted = m.lift_to_base(&shrunk).unwrap();
        prop_assert!(lifted.iter().zip(&shrunk).all(|(a, b)| a >= b));
        prop_assert!((lifted.iter().sum::<f64>() - m.full_rank() as f64).abs() <= 1e-9);
        prop_assert!(inst.value(&lifted) >= inst.value(&shrunk) - 1e-12);
    }

    #[test]
    fn feasible_step_stays_feasible_and_tightens(
        m in matroid(), w in vec(vec(0.0f64..1.0, 8), 1..4), mix in vec(0.1f64..1.0, 3), pick in any::<(usize, usize)>(),
    ) {
        let x = base_point(&m, &w, &mix[..w.len()]);
        let n = m.n();
        let frac: Vec<usize> = (0..n).filter(|&i| x[i] > 1e-7 && x[i] < 1.0 - 1e-7).collect();
        prop_assume!(frac.len() >= 2);
        let i = frac[pick.0 % frac.len()];
        let j = frac[(pick.0 % frac.len() + 1 + pick.1 % (frac.len() - 1)) % frac.len()];
        let all: Vec<usize> = (0..n).collect();
        let step = m.max_feasible_step(&x, &[], &all, i, j).unwrap();
        let mut y = x.clone();
        y[i] += step.eps;
        y[j] -= step.eps;
        prop_assert!(in_polytope(&m, &y));
        let tight_with_i = (0u32..1 << n)
            .filter(|s| s >> i & 1 == 1 && s >> j & 1 == 0)
            .map(|s| {
                let set: Vec<usize> = (0..n).filter(|&e| s >> e & 1 == 1).collect();
                m.rank(&set).unwrap() as f64 - set.iter().map(|&e| y[e]).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!(y[j] <= 1e-9 || tight_with_i <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn slice_solutions_are_feasible_and_consistent(
        m in matroid(), pts in points(8..=8, 2), s in proptest::option::of(vec(0.0f64..1.0, 8)),
    ) {
        let inst = l2_instance(&pts, m.clone(), s);
        let p = Problem::certify(inst.clone()).unwrap();
        let opts = SliceOptions { record_history: true, ..SliceOptions::default() };
        for alpha in 1..=m.full_rank() {
            let sol = solve_slice(&p, alpha, &opts).unwrap();
            prop_assert!((sol.x.iter().sum::<f64>() - alpha as f64).abs() <= 1e-9);
            prop_assert!(in_polytope(&m, &sol.x));
            prop_assert!((inst.value(&sol.x) - sol.value).abs() <= 1e-9 * (1.0 + sol.value.abs()));
            prop_assert!(sol.history.windows(2).all(|h| h[1] >= h[0] - 1e-9 * (1.0 + h[0].abs())));
        }
    }

    #[test]
    fn upper_bound_dominates_exact_optimum(m in matroid(), pts in points(8..=8, 2), s in proptest::option::of(vec(0.0f64..1.0, 8))) {
        let inst = l2_instance(&pts, m, s);
        let opt = brute_force_opt(&inst).unwrap().value;
        let relax = sweep_slices(&Problem::certify(inst).unwrap(), &SliceOptions::default()).unwrap();
        prop_assert!(relax.opt_upper_bound >= opt - 1e-9 * (1.0 + opt));
    }

    #[test]
    fn rounding_keeps_mass_and_feasibility(m in matroid(), pts in points(8..=8, 2), w in vec(vec(0.0f64..1.0, 8), 1..4), mix in vec(0.1f64..1.0, 3)) {
        let inst = l2_instance(&pts, m.clone(), None);
        let p = Problem::certify(inst).unwrap();
        let x = base_point(&m, &w, &mix[..w.len()]);
        let mut r = Rounder::new(&p, &x, &RoundOptions { validate: true }).unwrap();
        while r.step().unwrap().is_some() {
            prop_assert!((r.x().iter().sum::<f64>() - m.full_rank() as f64).abs() <= 1e-9);
            prop_assert!(in_polytope(&m, r.x()));
        }
        let res = r.finish().unwrap();
        prop_assert!(m.is_independent(&res.basis).unwrap());
        prop_assert_eq!(res.basis.len(), m.full_rank());
    }

    #[test]
    fn baselines_return_independent_sets(m in matroid(), pts in points(8..=8, 2), s in proptest::option::of(vec(0.0f64..1.0, 8))) {
        let inst = l2_instance(&pts, m.clone(), s);
        let exact = brute_force_opt(&inst).unwrap();
        prop_assert!(m.is_independent(&exact.set).unwrap());
        prop_assert!((inst.value(&indicator(m.n(), &exact.set)) - exact.value).abs() <= 1e-9 * (1.0 + exact.value));
        // no independent set beats the reported optimum
        for mask in 0u32..1 << m.n() {
            let set: Vec<usize> = (0..m.n()).filter(|&e| mask >> e & 1 == 1).collect();
            if m.is_independent(&set).unwrap() {
                prop_assert!(inst.set_value(&set) <= exact.value + 1e-9 * (1.0 + exact.value));
            }
        }
        for sel in [greedy_insertion(&inst), local_search(&inst, &[]).unwrap()] {
            prop_assert!(m.is_independent(&sel.set).unwrap());
            prop_assert_eq!(sel.set.len(), m.full_rank());
            prop_assert!(sel.value <= exact.value + 1e-9 * (1.0 + exact.value));
        }
    }

    #[test]
    fn generated_instances_certify(seed in any::<u64>(), n in 2usize..=16, k in 1usize..=2) {
        let choice = MatroidChoice::Uniform { k: k.min(n) };
        for g in [
            lab::random_points(n, 3, lab::PointCloud::Gaussian, PointMetric::L2, &choice, seed).unwrap(),
            lab::random_sets(n, 20, 5, divmax_core::geometry::SetMetric::Jaccard, &choice, seed).unwrap(),
        ] {
            prop_assert!(certify_negative_type(&g.distance().unwrap()).is_negative_type());
        }
        let edges = lab::random_graph(n, 0.5, &mut lab::rng(seed));
        let g = lab::dks_reduction(n, &edges, k.min(n)).unwrap();
        prop_assert!(certify_negative_type(&g.distance().unwrap()).is_negative_type());
    }
}
