//! Closed-form and brute-force reference solutions for tests and the
//! convergence harness.
//!
//! Spatially constant data reduce the system to the scalar ODE
//! v' = -a(u)^s v with u frozen, solved exactly. Decoupled runs (u = 0, or
//! v = 0) reduce one field to the heat equation, whose Neumann
//! eigenfunction decay on a box is explicit. The explicit stepper at a
//! safely refined dt provides an independent trajectory oracle for
//! validating the IMEX scheme.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::ops::FluxScheme;
use crate::scalar::{cst, Real};
use crate::solver::{explicit_dt_limit, run, Mode, ModelParams, SchemeParams, State};
use crate::truncation::Truncation;

/// Initial-data families with known exact solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleSpec<R: Real> {
    /// Spatially constant (u, v).
    Homogeneous { u0: R, v0: R },
    /// u is a decaying Neumann eigenmode, v = 0.
    HeatU { baseline: R, amp: R, k: u32 },
    /// v is a decaying Neumann eigenmode, u = 0.
    HeatV { baseline: R, amp: R, k: u32 },
}

impl<R: Real> OracleSpec<R> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            OracleSpec::Homogeneous { u0, v0 } => {
                if !(u0 >= R::zero() && v0 >= R::zero()) {
                    return Err(Error::InvalidParam("homogeneous oracle needs u0, v0 >= 0".into()));
                }
            }
            OracleSpec::HeatU { baseline, amp, k } | OracleSpec::HeatV { baseline, amp, k } => {
                if !(baseline - amp >= R::zero()) {
                    return Err(Error::InvalidParam(
                        "eigenmode oracle needs baseline - amp >= 0 to keep fields nonnegative".into(),
                    ));
                }
                if k == 0 {
                    return Err(Error::InvalidParam("eigenmode index k must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Exact solution for spatially constant data: u stays u0 and
/// v(t) = v0 exp(-a(u0)^s t).
pub fn homogeneous_solution<R: Real>(u0: R, v0: R, s: R, trunc: Truncation, t: R) -> (R, R) {
    let rate = trunc.eval_a(u0).powf(s);
    (u0, v0 * (-rate * t).exp())
}

/// Neumann eigenmode decay on a box:
/// baseline + amp e^(-lambda t) prod_d cos(k pi (x_d - o_d) / L_d)
/// with lambda = sum_d (k pi / L_d)^2, evaluated at cell centers.
pub fn heat_eigen_solution<R: Real>(grid: &Grid<R>, baseline: R, amp: R, k: u32, t: R) -> Field<R> {
    let pi = R::PI();
    let kpi = cst::<R>(k as f64) * pi;
    let mut lambda = R::zero();
    for d in 0..grid.dim() {
        let f = kpi / grid.extent(d);
        lambda += f * f;
    }
    let decay = amp * (-lambda * t).exp();
    let dim = grid.dim();
    Field::from_fn(grid, |x, y, z| {
        let mut mode = ((x - grid.origin(0)) / grid.extent(0) * kpi).cos();
        if dim > 1 {
            mode *= ((y - grid.origin(1)) / grid.extent(1) * kpi).cos();
        }
        if dim > 2 {
            mode *= ((z - grid.origin(2)) / grid.extent(2) * kpi).cos();
        }
        baseline + decay * mode
    })
}

/// Independent trajectory oracle: the explicit stepper at dt shrunk by 4^r
/// below its stability limit.
pub fn brute_force_reference<R: Real>(
    initial: State<R>,
    mp: &ModelParams<R>,
    flux: FluxScheme,
    t_end: R,
    refinement: u32,
) -> Result<State<R>> {
    if refinement == 0 {
        return Err(Error::InvalidParam("refinement level must be >= 1".into()));
    }
    if !(t_end >= R::zero()) {
        return Err(Error::InvalidParam("t_end must be >= 0".into()));
    }
    if t_end == R::zero() {
        return Ok(initial);
    }
    let limit = explicit_dt_limit(&initial, mp);
    let dt_target = limit / cst::<R>(4f64.powi(refinement as i32));
    // land exactly on t_end with a whole number of steps
    let n = (t_end / dt_target).ceil().max(R::one());
    let dt = t_end / n;
    let sp = SchemeParams {
        dt,
        t_end,
        flux,
        lin_tol: cst(1e-12),
        lin_maxit: 1,
        mode: Mode::Explicit,
    };
    run(initial, mp, &sp, usize::MAX, |_, _| {})
}
