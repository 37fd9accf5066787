use std::ffi::CStr;
use std::ptr;

use mtkcs_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        mtkcs_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn constants_and_thresholds() {
    let mut c = MtkcsConstants::default();
    let st = unsafe { mtkcs_sharp_constants(2, 1, 1.0, 1.0, &mut c) };
    assert_eq!(st, MtkcsStatus::Ok);
    assert!((c.alpha_n - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((c.kappa - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((c.hls_constant - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);

    let st = unsafe { mtkcs_sharp_constants(2, 1, 0.0, f64::NAN, &mut c) };
    assert_eq!(st, MtkcsStatus::Ok);
    assert!(c.hls_constant.is_nan());

    let mut t = 0.0;
    assert_eq!(unsafe { mtkcs_threshold(2, 1, 1.0, true, &mut t) }, MtkcsStatus::Ok);
    assert!((t - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn errors_are_reported() {
    let mut c = MtkcsConstants::default();
    assert_eq!(unsafe { mtkcs_sharp_constants(2, 2, 0.0, f64::NAN, &mut c) }, MtkcsStatus::InvalidParameter);
    assert!(last_error().contains("n >= 2m"));
    assert_eq!(unsafe { mtkcs_sharp_constants(2, 1, 0.0, f64::NAN, ptr::null_mut()) }, MtkcsStatus::NullPointer);
    assert_eq!(last_error(), "out is null");

    let mut grid = ptr::null_mut();
    assert_eq!(unsafe { mtkcs_grid_new(-1.0, 10, 1.05, &mut grid) }, MtkcsStatus::InvalidParameter);
    assert!(grid.is_null());

    // truncation keeps the terminator
    let mut small = [1 as std::ffi::c_char; 4];
    let full = unsafe { mtkcs_last_error_message(small.as_mut_ptr(), small.len()) };
    assert!(full > 3);
    assert_eq!(small[3], 0);
}

#[test]
fn solve_through_handles() {
    unsafe {
        let mut grid = ptr::null_mut();
        assert_eq!(mtkcs_grid_new(1.0, 96, 1.05, &mut grid), MtkcsStatus::Ok);
        let len = mtkcs_grid_len(grid);
        assert_eq!(len, 96);
        let mut nodes = vec![0.0; len];
        assert_eq!(mtkcs_grid_nodes(grid, nodes.as_mut_ptr(), len), MtkcsStatus::Ok);
        assert_eq!(mtkcs_grid_nodes(grid, nodes.as_mut_ptr(), len - 1), MtkcsStatus::GridMismatch);

        let mut op = ptr::null_mut();
        assert_eq!(mtkcs_riesz_new(grid, 1.0, 2, &mut op), MtkcsStatus::Ok);
        let mut bad = ptr::null_mut();
        assert_eq!(mtkcs_riesz_new(grid, 2.5, 2, &mut bad), MtkcsStatus::Domain);
        let ones = vec![1.0; len];
        let mut d = 0.0;
        assert_eq!(mtkcs_riesz_form(op, ones.as_ptr(), ones.as_ptr(), len, &mut d), MtkcsStatus::Ok);
        assert!((d - 16.0 * std::f64::consts::PI / 3.0).abs() < 1e-6 * d);

        let mut prob = ptr::null_mut();
        assert_eq!(mtkcs_problem_new(op, 1.0, 0.0, 0.0, f64::NAN, &mut prob), MtkcsStatus::Ok);
        mtkcs_riesz_free(op);
        mtkcs_grid_free(grid);
        assert_eq!(mtkcs_problem_len(prob), len);

        let init: Vec<f64> = nodes.iter().map(|r| (1.0 - r).powi(2)).collect();
        let mut sol = ptr::null_mut();
        assert_eq!(mtkcs_solve(prob, init.as_ptr(), init.as_ptr(), len, ptr::null(), &mut sol), MtkcsStatus::Ok);
        let mut summary = MtkcsSolveSummary::default();
        assert_eq!(mtkcs_solution_summary(sol, &mut summary), MtkcsStatus::Ok);
        assert!(summary.converged && summary.positive);
        let mut bound = 0.0;
        assert_eq!(mtkcs_problem_level_bound(prob, &mut bound), MtkcsStatus::Ok);
        assert!(summary.energy > 0.0 && summary.energy < bound);

        let (mut u, mut v) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(mtkcs_solution_values(sol, u.as_mut_ptr(), v.as_mut_ptr(), len), MtkcsStatus::Ok);
        let mut e = 0.0;
        assert_eq!(mtkcs_problem_energy(prob, u.as_ptr(), v.as_ptr(), len, &mut e), MtkcsStatus::Ok);
        assert_eq!(e, summary.energy);

        let zero = vec![0.0; len];
        let mut none = ptr::null_mut();
        let st = mtkcs_solve(prob, init.as_ptr(), zero.as_ptr(), len, ptr::null(), &mut none);
        assert_eq!(st, MtkcsStatus::DegenerateRay);
        assert!(none.is_null());

        mtkcs_solution_free(sol);
        mtkcs_problem_free(prob);
    }
}

#[test]
fn blowup_summary() {
    unsafe {
        let mut grid = ptr::null_mut();
        assert_eq!(mtkcs_grid_new(1.0, 512, 1.05, &mut grid), MtkcsStatus::Ok);
        let ks = [4u64, 8, 16, 32, 64, 128, 256];
        let mut s = MtkcsBlowupSummary::default();
        assert_eq!(mtkcs_blowup_sweep(0.25, 0.0, 2, grid, ks.as_ptr(), ks.len(), &mut s), MtkcsStatus::Ok);
        assert!(s.pass && s.fitted_slope >= 0.4);
        mtkcs_grid_free(grid);
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        mtkcs_grid_free(ptr::null_mut());
        mtkcs_riesz_free(ptr::null_mut());
        mtkcs_problem_free(ptr::null_mut());
        mtkcs_solution_free(ptr::null_mut());
        assert_eq!(mtkcs_grid_len(ptr::null()), 0);
        assert_eq!(mtkcs_problem_len(ptr::null()), 0);
    }
}
