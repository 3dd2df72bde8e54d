//! Acceptance run: one PASS or FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Run with `cargo test --release --test acceptance`; the layer adaptive run
//! alone takes several minutes.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vvp::adapt::{adaptive_loop, dorfler_mark, AdaptiveOptions, AdaptiveStep};
use vvp::fem::{FeFunction, Space, SpaceKind};
use vvp::mesh::Point;
use vvp::optctl::{fixed_point_solve, gradient_check, project_admissible, vi_residual, FixedPointOptions};
use vvp::problems::{Problem, ProblemId};
use vvp::quadrature::{triangle_rule, MAX_DEGREE};
use vvp::scheme::{SchemeKind, SchemeParams};
use vvp::study::{loglog_slope, rate_table, run_convergence, write_csv, RunRecord};

const U: usize = 0;
const Y: usize = 1;
const W: usize = 2;
const OMEGA: usize = 3;
const P: usize = 5;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, what: &str) {
        if !pass {
            self.failures += 1;
        }
        println!("{} [{id}] {what}", if pass { "PASS" } else { "FAIL" });
    }
}

fn study(kind: SchemeKind, levels: usize, augmentation: Option<(f64, f64)>) -> Vec<RunRecord> {
    let problem = smooth();
    let mut params = SchemeParams::new(kind, &problem);
    if let Some((r1, r2)) = augmentation {
        params.rho1 = r1;
        params.rho2 = r2;
    }
    run_convergence(&problem, &params, levels, &FixedPointOptions::default(), |r| {
        eprintln!("  {} level {} with {} unknowns: {:.1} s", kind, r.level, r.dofs_total, r.seconds)
    })
    .unwrap()
}

fn last_rates(records: &[RunRecord]) -> [f64; 7] {
    *rate_table(records).unwrap().last().unwrap()
}

fn efficiency_spread(records: &[RunRecord]) -> (Vec<f64>, f64) {
    let eff: Vec<f64> = records[records.len() - 3..].iter().map(|r| r.efficiency.unwrap()).collect();
    let max = eff.iter().copied().fold(f64::MIN, f64::max);
    let min = eff.iter().copied().fold(f64::MAX, f64::min);
    (eff, max / min)
}

fn in_range(v: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

fn adaptive(id: ProblemId, opts: AdaptiveOptions) -> Vec<AdaptiveStep> {
    let problem = Problem::new(id, 1.0);
    let params = SchemeParams::new(SchemeKind::Cg, &problem);
    adaptive_loop(&problem, &params, &opts, |s| {
        eprintln!("  {id} step {} with {} unknowns: {:.1} s", s.record.level, s.record.dofs_total, s.record.seconds)
    })
    .unwrap()
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let nu0 = smooth().nu_bounds.0;

    // 1. augmentation study, N = 2..6
    let t = Instant::now();
    let plain = study(SchemeKind::Cg, 5, Some((0.0, 0.0)));
    let augmented = study(SchemeKind::Cg, 5, Some((2.0 * nu0 / 3.0, 0.1 * nu0)));
    let secs = t.elapsed().as_secs_f64();
    let (rp, ra) = (last_rates(&plain), last_rates(&augmented));
    let pass = rp[Y] <= 0.2
        && in_range(ra[OMEGA], 1.6, 2.2)
        && ra[P] >= 1.8
        && in_range(ra[U], 0.65, 1.1)
        && secs <= 600.0;
    report.line(
        "1",
        pass,
        &format!(
            "augmentation study N=2..6: without r(y)={:.3} (<=0.2); with r(omega)={:.3} (in [1.6,2.2]), r(p)={:.3} (>=1.8), r(u)={:.3} (in [0.65,1.1]); {:.0} s (<=600)",
            rp[Y], ra[OMEGA], ra[P], ra[U], secs
        ),
    );

    // 2. control rate, default parameters, averaged over the rates reaching N = 4, 5, 6
    let cg = study(SchemeKind::Cg, 5, None);
    let rates = rate_table(&cg).unwrap();
    let mean = rates[1..].iter().map(|r| r[U]).sum::<f64>() / 3.0;
    report.line(
        "2",
        mean >= 0.7,
        &format!(
            "conforming control rates {:.3}, {:.3}, {:.3}; mean {:.3} (>=0.7)",
            rates[1][U], rates[2][U], rates[3][U], mean
        ),
    );

    // 3. DG k = 0, N = 2..5 (the next level exceeds 1e5 unknowns)
    let t = Instant::now();
    let dg = study(SchemeKind::Dg, 4, None);
    let secs = t.elapsed().as_secs_f64();
    let r = last_rates(&dg);
    let dofs = dg.last().unwrap().dofs_total;
    let pass = in_range(r[Y], 0.8, 1.2) && in_range(r[W], 0.8, 1.2) && r[U] >= 0.7 && dofs <= 100_000 && secs <= 600.0;
    report.line(
        "3",
        pass,
        &format!(
            "DG k=0 N=2..5: r(y)={:.3}, r(w)={:.3} (in [0.8,1.2]), r(u)={:.3} (>=0.7); {} unknowns (<=1e5), {:.0} s (<=600)",
            r[Y], r[W], r[U], dofs, secs
        ),
    );
    if r[U] < 0.7 {
        println!(
            "     note: the exact control switches between its bounds across layers of width ~0.007, below every mesh \
             size reached here; even its best piecewise constant approximation converges at rates 0.56-0.79 on these meshes"
        );
    }

    // 4. estimator to error ratio over the last three uniform levels
    let (ec, sc) = efficiency_spread(&cg);
    let (ed, sd) = efficiency_spread(&dg);
    report.line(
        "4",
        sc <= 2.0 && sd <= 2.0,
        &format!("efficiency max/min: CG {sc:.3} from {ec:.3?}, DG {sd:.3} from {ed:.3?} (<=2)"),
    );

    // 5. adaptive localization and layer slope
    let t = Instant::now();
    let layer = adaptive(ProblemId::Layer, AdaptiveOptions { max_dofs: 200_000, ..AdaptiveOptions::default() });
    let (mut near, mut total) = (0usize, 0usize);
    for step in &layer[..5] {
        total += step.marked.len();
        near += step.marked.iter().filter(|&&c| step.mesh.centroid(c)[0] < 0.1).count();
    }
    // strip {x1 < 0.1} of the unit triangle: area 0.095 of 0.5
    let strip = 0.095 / 0.5;
    let fraction = near as f64 / total as f64;
    let tail = &layer[layer.len() - 6..];
    let slope = loglog_slope(
        &tail.iter().map(|s| s.record.dofs_total as f64).collect::<Vec<_>>(),
        &tail.iter().map(|s| s.record.estimate.eta_total).collect::<Vec<_>>(),
    );
    let lshape = adaptive(ProblemId::LShape, AdaptiveOptions { max_iterations: 6, ..AdaptiveOptions::default() });
    // after five refinements the smallest cells touching the disc of radius 0.1
    // around the corner are strictly smaller than every cell away from it
    let mesh = &lshape[5].mesh;
    let near_corner = |c: usize| mesh.cell_points(c).iter().any(|&p| dist(p, [0.0, 0.0]) <= 0.1);
    let smallest = |near: bool| {
        (0..mesh.n_cells()).filter(|&c| near_corner(c) == near).map(|c| mesh.diameter(c)).fold(f64::MAX, f64::min)
    };
    let (h_near, h_far) = (smallest(true), smallest(false));
    let last = layer.last().unwrap().record.dofs_total;
    report.line(
        "5",
        fraction > strip && h_near < h_far && in_range(slope, -0.7, -0.3),
        &format!(
            "layer: marked fraction near x1=0 {fraction:.3} (>{strip:.3}); eta slope {slope:.3} over the last 6 steps up to {last} unknowns (in [-0.7,-0.3]); \
             lshape: smallest cell within 0.1 of the corner {h_near:.3e} (< {h_far:.3e} elsewhere); {:.0} s",
            t.elapsed().as_secs_f64()
        ),
    );

    // 6. property suite, compact re-checks of the integration tests
    let t = Instant::now();
    let mut quad_err: f64 = 0.0;
    for d in 1..=MAX_DEGREE {
        let rule = triangle_rule(d).unwrap();
        for a in 0..=d as i32 {
            for b in 0..=(d as i32 - a) {
                let fact = |n: i32| (1..=n).map(f64::from).product::<f64>();
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let got: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0].powi(a) * p[1].powi(b)).sum();
                quad_err = quad_err.max((got - exact).abs() / exact);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let space = Space::new(unit_square(4), SpaceKind::PiecewiseConstVector).unwrap();
    let mut projection_ok = true;
    for _ in 0..100 {
        let coeffs: Vec<f64> = (0..space.ndofs()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut u = FeFunction::from_coeffs(space.clone(), coeffs.clone()).unwrap();
        project_admissible(&mut u, (-0.5, 0.5));
        let once = u.coeffs.clone();
        project_admissible(&mut u, (-0.5, 0.5));
        projection_ok &= once == u.coeffs && once.iter().zip(&coeffs).all(|(p, c)| *p == c.clamp(-0.5, 0.5));
    }
    let (mut galerkin, mut vi, mut fd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut coercive = f64::MAX;
    for kind in [SchemeKind::Cg, SchemeKind::Dg] {
        let disc = discretize(&smooth(), kind, unit_square(8));
        let sol = fixed_point_solve(&disc, &FeFunction::zeros(disc.control_space().clone()), &FixedPointOptions::default()).unwrap();
        galerkin = galerkin.max(disc.state_residual(&sol.control, &sol.state));
        galerkin = galerkin.max(disc.adjoint_residual(&sol.state, &sol.costate));
        vi = vi.max(vi_residual(&disc, &sol.costate, &sol.control));
        let coarse = discretize(&smooth(), kind, unit_square(2));
        let mut u = FeFunction::zeros(coarse.control_space().clone());
        u.coeffs.iter_mut().enumerate().for_each(|(i, c)| *c = 0.1 - 0.01 * (i % 7) as f64);
        fd = fd.max(gradient_check(&coarse, &u, 1e-4, 5, 3).unwrap().transposed);
        let strong = smooth().with_sigma(2.0e4);
        for n in [1, 2] {
            coercive = coercive.min(coercivity_constant(&discretize(&strong, kind, unit_square(n))));
        }
    }
    let betas: Vec<f64> = [2, 4, 8].iter().map(|&n| inf_sup(&discretize(&smooth(), SchemeKind::Cg, unit_square(n)))).collect();
    let drift = betas.windows(2).map(|w| (w[0] - w[1]) / w[0]).fold(f64::MIN, f64::max);
    let mut dorfler_ok = true;
    for _ in 0..200 {
        let n = rng.random_range(1..50);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let theta = rng.random_range(0.05..0.95);
        let m = dorfler_mark(&v, theta).unwrap();
        let mut sorted = v.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let target = theta * theta * v.iter().sum::<f64>();
        dorfler_ok &= m.iter().map(|&c| v[c]).sum::<f64>() >= target
            && (m.len() == 1 || sorted[..m.len() - 1].iter().sum::<f64>() < target);
    }
    let csv = |records: &[RunRecord]| {
        let mut buf = Vec::new();
        write_csv(records, &mut buf, false).unwrap();
        buf
    };
    let deterministic = csv(&study(SchemeKind::Dg, 2, None)) == csv(&study(SchemeKind::Dg, 2, None));
    let secs = t.elapsed().as_secs_f64();
    report.line(
        "6",
        quad_err <= 1e-13
            && projection_ok
            && galerkin <= 1e-10
            && coercive > 0.0
            && drift <= 0.1
            && vi <= 1e-6
            && fd <= 1e-5
            && dorfler_ok
            && deterministic
            && secs <= 300.0,
        &format!(
            "quadrature {quad_err:.1e} (<=1e-13), projection {projection_ok}, Galerkin residual {galerkin:.1e} (<=1e-10), \
             coercivity {coercive:.2e} (>0), inf-sup {betas:.4?} worst drop {:.1}% (<=10%), VI residual {vi:.1e} (<=1e-6), \
             gradient mismatch {fd:.1e} (<=1e-5), Dorfler minimal {dorfler_ok}, CSV deterministic {deterministic}; {secs:.0} s (<=300)",
            100.0 * drift.max(0.0)
        ),
    );

    // 7. exclusions: nothing beyond two-dimensional polygonal domains is offered
    let registered = ProblemId::ALL.map(|id| Problem::new(id, 1.0).domain.name());
    report.line("7", registered.len() == 4, &format!("excluded items not implemented; registered domains {registered:?}"));

    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criterion(s) failed", report.failures);
        ExitCode::FAILURE
    }
}
