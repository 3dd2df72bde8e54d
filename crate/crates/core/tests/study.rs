//! Convergence drivers, rates, CSV output and the assumption check.

mod common;

use common::*;
use vvp::estimate::GlobalEstimate;
use vvp::optctl::FixedPointOptions;
use vvp::problems::{Problem, ProblemId};
use vvp::scheme::{SchemeKind, SchemeParams};
use vvp::study::{
    check_assumptions, level_mesh, loglog_slope, observed_rates, rate_table, run_convergence, write_csv, RunRecord,
    CSV_HEADER, ERROR_COLUMNS,
};

fn csv(records: &[RunRecord], timing: bool) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf, timing).unwrap();
    String::from_utf8(buf).unwrap()
}

fn study(kind: SchemeKind) -> Vec<RunRecord> {
    let problem = smooth();
    let params = SchemeParams::new(kind, &problem);
    run_convergence(&problem, &params, 2, &FixedPointOptions::default(), |_| {}).unwrap()
}

#[test]
fn csv_output_is_reproducible() {
    for kind in [SchemeKind::Cg, SchemeKind::Dg] {
        let (a, b) = (csv(&study(kind), false), csv(&study(kind), false));
        assert_eq!(a, b, "{kind}");
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 16 && l.ends_with(",0e0")));
    }
}

#[test]
fn header_lists_the_error_columns_in_order() {
    let cols: Vec<&str> = CSV_HEADER.split(',').collect();
    assert_eq!(cols.len(), 16);
    assert_eq!(&cols[3..10], &ERROR_COLUMNS);
    assert_eq!(cols[..3], ["level", "dofs_total", "h"]);
}

#[test]
fn missing_values_are_written_as_nan() {
    let rec = RunRecord {
        level: 2,
        dofs_total: 10,
        h: 0.5,
        errors: None,
        estimate: GlobalEstimate { eta_y: 1.0, eta_w: 2.0, eta_u: 0.5, eta_total: 3.0, theta_total: 0.0 },
        efficiency: None,
        seconds: 1.25,
        iterations: 3,
        converged: true,
    };
    let text = csv(&[rec.clone()], true);
    assert_eq!(text.lines().nth(1).unwrap(), "2,10,5e-1,NaN,NaN,NaN,NaN,NaN,NaN,NaN,1e0,2e0,5e-1,3e0,NaN,1.25e0");
    assert!(rate_table(&[rec]).is_none());
}

#[test]
fn rates_follow_the_closed_form() {
    let r = observed_rates(&[1.0, 0.25, 0.0625], &[0.4, 0.2, 0.1]);
    assert!(r.iter().all(|r| (r - 2.0).abs() < 1e-14));
    let r = observed_rates(&[3.0, 1.0], &[1.0, 1.0 / 3.0]);
    assert!((r[0] - 1.0).abs() < 1e-14);
    let slope = loglog_slope(&[10.0, 100.0, 1000.0], &[1.0, 0.1, 0.01]);
    assert!((slope + 1.0).abs() < 1e-14);
}

#[test]
fn rate_table_matches_the_records() {
    let records = study(SchemeKind::Cg);
    let table = rate_table(&records).unwrap();
    assert_eq!(table.len(), 1);
    let e: Vec<[f64; 7]> = records.iter().map(|r| r.errors.unwrap().columns()).collect();
    for k in 0..7 {
        let want = (e[0][k] / e[1][k]).log2();
        assert!((table[0][k] - want).abs() < 1e-12);
    }
    assert!(records.iter().all(|r| r.converged && r.efficiency.is_some()));
    assert!(records[1].dofs_total > records[0].dofs_total);
}

#[test]
fn uniform_levels_double_the_subdivisions() {
    let problem = smooth();
    for level in 0..3 {
        let mesh = level_mesh(&problem, level).unwrap();
        let n = problem.initial_subdivisions << level;
        assert_eq!(mesh.n_cells(), 2 * n * n);
        assert!((mesh.mesh_size() - 2f64.sqrt() / n as f64).abs() < 1e-14);
    }
    assert!(level_mesh(&problem, 70).is_err());
}

#[test]
fn problems_without_exact_solution_have_no_convergence_study() {
    let problem = Problem::new(ProblemId::TShape, 1.0);
    let params = SchemeParams::new(SchemeKind::Cg, &problem);
    assert!(run_convergence(&problem, &params, 1, &FixedPointOptions::default(), |_| {}).is_err());
}

#[test]
fn assumption_margins_for_constant_coefficients() {
    let problem = constant_problem([1.0, 0.5]);
    let params = SchemeParams::new(SchemeKind::Cg, &problem);
    let r = check_assumptions(&problem, &params).unwrap();
    assert_eq!((r.nu0, r.sigma_min, r.grad_nu_inf, r.div_beta_l2), (1.0, 1.0, 0.0, 0.0));
    assert_eq!((r.reaction_margin, r.dg_margin), (1.0, 1.0));
    assert!(r.ok() && r.dg_ok());
    let mut weak = params.clone();
    weak.rho2 = 0.1 * problem.nu_bounds.0;
    let r = check_assumptions(&problem, &weak).unwrap();
    assert!(!r.augmentation_ok && !r.ok());
}

#[test]
fn smooth_problem_violates_the_reaction_condition() {
    let problem = smooth();
    let r = check_assumptions(&problem, &SchemeParams::new(SchemeKind::Cg, &problem)).unwrap();
    // 9 |grad nu|^2 / nu0 approaches 9 * 2 * 0.999^2 / 1e-3 at the far corner
    let bound = 100.0 - 9.0 * 2.0 * 0.999f64.powi(2) / 1e-3;
    assert!(r.reaction_margin < 0.0 && r.reaction_margin >= bound && r.reaction_margin < 0.97 * bound);
    assert!(!r.ok());
    assert!(check_assumptions(&problem.with_sigma(2e4), &SchemeParams::new(SchemeKind::Dg, &smooth())).unwrap().dg_ok());
}
