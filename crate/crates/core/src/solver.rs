//! Time integration of the chemotaxis-consumption system.
//!
//! The IMEX Euler step treats diffusion and consumption implicitly and the
//! chemotactic transport explicitly:
//!
//!   (I - dt Lap) u_new = u_old - dt div(a(u_old) grad v_old)
//!   (I - dt Lap + dt diag(a(u_old)^s)) v_new = v_old
//!
//! Both system matrices are symmetric positive definite M-matrices, so the
//! u-solve conserves total mass up to solver tolerance and the v-solve
//! satisfies a discrete maximum principle: max v is nonincreasing and
//! min v decays no faster than (1 + dt (m+1)^s)^-1 per step.
//!
//! A fully explicit forward-Euler stepper with the same spatial operators
//! serves as an independent reference; it enforces a parabolic stability
//! guard on dt.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::ops::{chemo_divergence, laplacian_neumann, FluxScheme};
use crate::scalar::{cst, Real};
use crate::truncation::Truncation;

/// Continuous-model parameters.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams<R: Real> {
    /// Consumption exponent, s >= 1.
    pub s: R,
    /// Truncation level of the regularization.
    pub trunc: Truncation,
    /// Shift in z = sqrt(v + alpha); used only by diagnostics.
    pub alpha: R,
}

impl<R: Real> ModelParams<R> {
    pub fn new(s: R, trunc: Truncation, alpha: R) -> Result<Self> {
        if !(s >= R::one()) {
            return Err(Error::InvalidParam("s must be >= 1".into()));
        }
        if !(alpha >= R::zero()) {
            return Err(Error::InvalidParam("alpha must be >= 0".into()));
        }
        Ok(ModelParams { s, trunc, alpha })
    }
}

/// Time integrator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Imex,
    Explicit,
}

/// Discretization parameters of a run.
#[derive(Debug, Clone, Copy)]
pub struct SchemeParams<R: Real> {
    pub dt: R,
    pub t_end: R,
    pub flux: FluxScheme,
    /// Relative residual tolerance of the conjugate-gradient solves.
    pub lin_tol: R,
    pub lin_maxit: usize,
    pub mode: Mode,
}

impl<R: Real> SchemeParams<R> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > R::zero()) {
            return Err(Error::InvalidParam("dt must be positive".into()));
        }
        if !(self.t_end >= R::zero()) {
            return Err(Error::InvalidParam("t_end must be >= 0".into()));
        }
        if !(self.lin_tol > R::zero()) {
            return Err(Error::InvalidParam("lin_tol must be positive".into()));
        }
        if self.lin_maxit == 0 {
            return Err(Error::InvalidParam("lin_maxit must be >= 1".into()));
        }
        Ok(())
    }
}

/// Simulation state: time plus the paired (u, v) fields on one grid.
#[derive(Debug, Clone)]
pub struct State<R: Real> {
    pub t: R,
    pub u: Field<R>,
    pub v: Field<R>,
}

impl<R: Real> State<R> {
    pub fn new(u: Field<R>, v: Field<R>) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(State { t: R::zero(), u, v })
    }
}

/// Conjugate gradients for a symmetric positive definite operator.
///
/// Stops when the 2-norm residual drops below tol * |b|; deterministic:
/// fixed iteration order, no randomization. Errors when maxit is exceeded.
pub fn solve_spd<R: Real>(
    apply: impl Fn(&Field<R>) -> Field<R>,
    b: &Field<R>,
    tol: R,
    maxit: usize,
) -> Result<Field<R>> {
    let norm_b = dot(b, b).sqrt();
    if norm_b == R::zero() {
        return Ok(Field::zeros(b.grid()));
    }
    let threshold = tol * norm_b;

    // warm start at b: exact for identity-like systems and for constant data
    let mut x = b.clone();
    let ax = apply(&x);
    let mut r = b.clone();
    r.axpy(-R::one(), &ax);
    let mut rs = dot(&r, &r);
    if rs.sqrt() <= threshold {
        return Ok(x);
    }
    let mut p = r.clone();
    for _ in 0..maxit {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > R::zero()) {
            return Err(Error::SolveDiverged {
                iterations: maxit,
                residual: (rs.sqrt() / norm_b).to_f64().unwrap_or(f64::NAN),
            });
        }
        let alpha = rs / pap;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let rs_new = dot(&r, &r);
        if rs_new.sqrt() <= threshold {
            return Ok(x);
        }
        let beta = rs_new / rs;
        rs = rs_new;
        let mut p_next = r.clone();
        p_next.axpy(beta, &p);
        p = p_next;
    }
    Err(Error::SolveDiverged {
        iterations: maxit,
        residual: (rs.sqrt() / norm_b).to_f64().unwrap_or(f64::NAN),
    })
}

fn dot<R: Real>(a: &Field<R>, b: &Field<R>) -> R {
    a.values().iter().zip(b.values()).map(|(x, y)| *x * *y).sum()
}

/// One IMEX Euler step. See the module docs for the two linear systems.
pub fn step_imex<R: Real>(
    st: &State<R>,
    mp: &ModelParams<R>,
    sp: &SchemeParams<R>,
) -> Result<State<R>> {
    let dt = sp.dt;
    let chemo = chemo_divergence(&st.u, &st.v, mp.trunc, sp.flux)?;
    let mut b_u = st.u.clone();
    b_u.axpy(-dt, &chemo);
    let u_new = solve_spd(
        |x| {
            let mut ax = x.clone();
            ax.axpy(-dt, &laplacian_neumann(x));
            ax
        },
        &b_u,
        sp.lin_tol,
        sp.lin_maxit,
    )?;

    // consumption coefficient frozen at u_old keeps the v-system linear and
    // an M-matrix; cells where u undershoots zero carry no consumption
    // (a(u) < 0 would break the M-matrix sign structure, and u >= 0 is the
    // continuum regime)
    let coeff = st.u.map(|u| mp.trunc.eval_a(u).max(R::zero()).powf(mp.s));
    let v_new = solve_spd(
        |x| {
            let mut ax = x.clone();
            ax.axpy(-dt, &laplacian_neumann(x));
            for (a, (xi, ci)) in ax
                .values_mut()
                .iter_mut()
                .zip(x.values().iter().zip(coeff.values()))
            {
                *a += dt * *ci * *xi;
            }
            ax
        },
        &st.v,
        sp.lin_tol,
        sp.lin_maxit,
    )?;

    if !u_new.all_finite() {
        return Err(Error::NonFinite("u after IMEX step"));
    }
    if !v_new.all_finite() {
        return Err(Error::NonFinite("v after IMEX step"));
    }
    Ok(State { t: st.t + dt, u: u_new, v: v_new })
}

/// Parabolic stability limit of the explicit step: h^2 / (2 dim (1 + amax))
/// with amax = m+1, or the observed max of a(u) when untruncated.
pub fn explicit_dt_limit<R: Real>(st: &State<R>, mp: &ModelParams<R>) -> R {
    let amax = match mp.trunc.saturation::<R>() {
        Some(a) => a,
        None => st.u.values().iter().fold(R::zero(), |m, &u| m.max(mp.trunc.eval_a(u))),
    };
    let h = st.u.grid().h_min();
    let dim = cst::<R>(st.u.grid().dim() as f64);
    h * h / (cst::<R>(2.0) * dim * (R::one() + amax))
}

/// One forward-Euler step with the same spatial operators; errors when the
/// stability guard is violated.
pub fn step_explicit<R: Real>(
    st: &State<R>,
    mp: &ModelParams<R>,
    sp: &SchemeParams<R>,
) -> Result<State<R>> {
    let dt = sp.dt;
    let limit = explicit_dt_limit(st, mp);
    if dt > limit {
        return Err(Error::StabilityGuard {
            dt: dt.to_f64().unwrap_or(f64::NAN),
            limit: limit.to_f64().unwrap_or(f64::NAN),
        });
    }
    let chemo = chemo_divergence(&st.u, &st.v, mp.trunc, sp.flux)?;
    let mut u_new = st.u.clone();
    u_new.axpy(dt, &laplacian_neumann(&st.u));
    u_new.axpy(-dt, &chemo);

    let mut v_new = st.v.clone();
    v_new.axpy(dt, &laplacian_neumann(&st.v));
    for (vn, (&u, &v)) in v_new
        .values_mut()
        .iter_mut()
        .zip(st.u.values().iter().zip(st.v.values()))
    {
        *vn -= dt * mp.trunc.eval_a(u).max(R::zero()).powf(mp.s) * v;
    }

    if !u_new.all_finite() || !v_new.all_finite() {
        return Err(Error::NonFinite("explicit step"));
    }
    Ok(State { t: st.t + dt, u: u_new, v: v_new })
}

/// Advance one step according to the configured mode.
pub fn step<R: Real>(st: &State<R>, mp: &ModelParams<R>, sp: &SchemeParams<R>) -> Result<State<R>> {
    match sp.mode {
        Mode::Imex => step_imex(st, mp, sp),
        Mode::Explicit => step_explicit(st, mp, sp),
    }
}

/// Number of steps a run takes: t_end rounded to the nearest multiple of dt.
pub fn step_count<R: Real>(sp: &SchemeParams<R>) -> usize {
    let ratio = (sp.t_end / sp.dt).round();
    ratio.to_f64().map(|r| r.max(0.0) as usize).unwrap_or(0)
}

/// Iterate steps to t_end, invoking the observer with (step index, state)
/// at t = 0, every `every` steps, and at the final step.
///
/// Returns the final state. `every` must be >= 1.
pub fn run<R: Real>(
    initial: State<R>,
    mp: &ModelParams<R>,
    sp: &SchemeParams<R>,
    every: usize,
    mut observe: impl FnMut(usize, &State<R>),
) -> Result<State<R>> {
    sp.validate()?;
    if every == 0 {
        return Err(Error::InvalidParam("observation cadence `every` must be >= 1".into()));
    }
    let n_steps = step_count(sp);
    let mut st = initial;
    observe(0, &st);
    for k in 1..=n_steps {
        st = step(&st, mp, sp)?;
        if k % every == 0 || k == n_steps {
            observe(k, &st);
        }
    }
    Ok(st)
}
