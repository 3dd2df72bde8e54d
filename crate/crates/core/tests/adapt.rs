//! Dörfler marking and the adaptive loop.

use proptest::prelude::*;
use vvp::adapt::{adaptive_loop, dorfler_mark, AdaptiveOptions};
use vvp::problems::{Problem, ProblemId};
use vvp::scheme::{SchemeKind, SchemeParams};

proptest! {
    /// The marked set reaches the bulk fraction, no smaller set could, and it
    /// consists of the largest indicators.
    #[test]
    fn dorfler_set_is_minimal(values in proptest::collection::vec(0.0f64..10.0, 1..60), theta in 0.05f64..0.95) {
        let marked = dorfler_mark(&values, theta).unwrap();
        let total: f64 = values.iter().sum();
        let target = theta * theta * total;
        let sum: f64 = marked.iter().map(|&c| values[c]).sum();
        prop_assert!(!marked.is_empty());
        prop_assert!(marked.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(sum >= target * (1.0 - 1e-12));
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let best: f64 = sorted[..marked.len() - 1].iter().sum();
        prop_assert!(best < target || marked.len() == 1);
        let smallest = marked.iter().map(|&c| values[c]).fold(f64::INFINITY, f64::min);
        let outside = (0..values.len()).filter(|c| !marked.contains(c)).map(|c| values[c]).fold(0.0, f64::max);
        prop_assert!(smallest >= outside);
    }

    #[test]
    fn marking_grows_with_the_fraction(values in proptest::collection::vec(0.1f64..10.0, 1..40), a in 0.05f64..0.9, d in 0.0f64..0.09) {
        let small = dorfler_mark(&values, a).unwrap();
        let large = dorfler_mark(&values, a + d).unwrap();
        prop_assert!(small.len() <= large.len());
    }
}

#[test]
fn invalid_indicators_are_rejected() {
    assert!(dorfler_mark(&[1.0, f64::NAN], 0.5).is_err());
    assert!(dorfler_mark(&[1.0, -1.0], 0.5).is_err());
}

#[test]
fn loop_refines_until_the_budget_is_exceeded() {
    let problem = Problem::new(ProblemId::LShape, 1.0);
    let params = SchemeParams::new(SchemeKind::Cg, &problem);
    let opts = AdaptiveOptions { max_dofs: 12_000, ..AdaptiveOptions::default() };
    let mut seen = 0;
    let steps = adaptive_loop(&problem, &params, &opts, |_| seen += 1).unwrap();
    assert_eq!(seen, steps.len());
    assert!(steps.len() >= 3);
    for w in steps.windows(2) {
        assert!(w[1].record.dofs_total > w[0].record.dofs_total);
        assert!(w[1].mesh.n_cells() > w[0].mesh.n_cells());
        assert!(!w[0].marked.is_empty());
    }
    let last = steps.last().unwrap();
    assert!(last.record.dofs_total > 12_000 && last.marked.is_empty());
    assert!(steps[..steps.len() - 1].iter().all(|s| s.record.dofs_total <= 12_000));
    assert!(steps.iter().all(|s| s.record.converged && s.indicators.n_cells() == s.mesh.n_cells()));
}

#[test]
fn tiny_budget_gives_a_single_solve() {
    let problem = Problem::new(ProblemId::LShape, 1.0);
    let params = SchemeParams::new(SchemeKind::Dg, &problem);
    let opts = AdaptiveOptions { max_dofs: 1, ..AdaptiveOptions::default() };
    let steps = adaptive_loop(&problem, &params, &opts, |_| {}).unwrap();
    assert_eq!(steps.len(), 1);
    assert!(steps[0].marked.is_empty());
    let capped = AdaptiveOptions { max_iterations: 2, ..AdaptiveOptions::default() };
    assert_eq!(adaptive_loop(&problem, &params, &capped, |_| {}).unwrap().len(), 2);
    let bad = AdaptiveOptions { theta: 1.5, ..AdaptiveOptions::default() };
    assert!(adaptive_loop(&problem, &params, &bad, |_| {}).is_err());
}

/// Marking almost everything is close to uniform refinement, so the estimator
/// decays at the uniform rate.
#[test]
fn bulk_marking_tracks_uniform_refinement() {
    use vvp::optctl::FixedPointOptions;
    use vvp::study::{loglog_slope, run_convergence};
    let problem = Problem::new(ProblemId::Smooth, 1.0);
    let params = SchemeParams::new(SchemeKind::Cg, &problem);
    let uniform = run_convergence(&problem, &params, 4, &FixedPointOptions::default(), |_| {}).unwrap();
    let slope = |r: &[vvp::study::RunRecord]| {
        let x: Vec<f64> = r.iter().map(|r| r.dofs_total as f64).collect();
        let y: Vec<f64> = r.iter().map(|r| r.estimate.eta_total).collect();
        loglog_slope(&x, &y)
    };
    let opts = AdaptiveOptions { theta: 0.9, max_dofs: 21_002, ..AdaptiveOptions::default() };
    let steps = adaptive_loop(&problem, &params, &opts, |_| {}).unwrap();
    let records: Vec<_> = steps.into_iter().map(|s| s.record).collect();
    let (a, u) = (slope(&records), slope(&uniform));
    assert!((a - u).abs() <= 0.2, "adaptive slope {a}, uniform slope {u}");
}
