//! Monitored quantities derived from the model's qualitative theory.
//!
//! Every run records, per sampled step: total mass of u, field extrema, the
//! energy E = (s/4) int g(u) + (1/2) int |grad z|^2 with z = sqrt(v + alpha),
//! its dissipation integrands, and the reference lower bound for min v.
//! The recorded series feeds a residual monitor for the energy inequality
//! d/dt E + dissipation <= C int |grad z|^2, where C is fitted (the theory
//! guarantees existence of such a constant, not its value).
//!
//! Two quadrature-verified integral identities on manufactured fields close
//! the loop on the Hessian machinery:
//!   int |Lap z|^2 = int |D2 z|^2 - (1/2) oint grad(|grad z|^2) . eta
//!   int |D2 z|^2 + (1/2) int (|grad z|^2 / z) Lap z
//!       = 4 int z |D2 sqrt(z)|^2 + (1/4) int |grad z|^4 / z^2
//! both for z with vanishing normal derivative.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::ops::{gradient_sq, integrate, laplacian_neumann};
use crate::scalar::{cst, cst_usize, Real};
use crate::solver::{ModelParams, SchemeParams, State};
use crate::truncation::eval_g;

/// One time-stamped record of every monitored invariant.
#[derive(Debug, Clone)]
pub struct DiagnosticsRow<R: Real> {
    pub t: R,
    pub mass_u: R,
    pub min_u: R,
    pub max_u: R,
    pub min_v: R,
    pub max_v: R,
    /// Initial mean of u, constant per run.
    pub u_star: R,
    /// E = (s/4) int g(u) + (1/2) int |grad z|^2.
    pub energy: R,
    /// int |grad z|^2.
    pub grad_z_l2sq: R,
    /// int |grad z|^4 / z^2.
    pub grad_z_l4: R,
    /// int a(u)^s |grad z|^2.
    pub consumption_diss: R,
    /// int g(u).
    pub g_mass: R,
    /// min(v0) * (1 + dt (m+1)^s)^-n; zero when untruncated (no a priori
    /// bound on the consumption coefficient exists in that case).
    pub v_lower_bound_ref: R,
}

/// Quantities fixed at t = 0 that later rows refer back to.
#[derive(Debug, Clone, Copy)]
pub struct RunBaseline<R: Real> {
    pub u_star: R,
    pub min_v0: R,
}

impl<R: Real> RunBaseline<R> {
    pub fn from_state(st: &State<R>) -> Self {
        let volume = st.u.grid().cell_volume() * cst_usize(st.u.grid().len());
        RunBaseline {
            u_star: integrate(&st.u) / volume,
            min_v0: st.v.min(),
        }
    }
}

/// Pointwise sqrt(v + alpha). Errors when alpha <= 0 or v + alpha < 0.
pub fn z_transform<R: Real>(v: &Field<R>, alpha: R) -> Result<Field<R>> {
    if !(alpha > R::zero()) {
        return Err(Error::InvalidParam("z transform requires alpha > 0".into()));
    }
    let min = v.min() + alpha;
    if !(min >= R::zero()) {
        return Err(Error::NegativeRadicand { min: min.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(v.map(|x| (x + alpha).sqrt()))
}

/// The energy E = (s/4) int g(u) + (1/2) int |grad z|^2.
///
/// Cells where u dips below zero (the schemes do not enforce u >= 0; min_u
/// flags undershoot) contribute g(0) = 0.
pub fn energy<R: Real>(st: &State<R>, mp: &ModelParams<R>) -> Result<R> {
    let g_mass = g_mass(st, mp)?;
    let z = z_transform(&st.v, mp.alpha)?;
    let grad = integrate(&gradient_sq(&z));
    Ok(mp.s / cst::<R>(4.0) * g_mass + cst::<R>(0.5) * grad)
}

fn g_mass<R: Real>(st: &State<R>, mp: &ModelParams<R>) -> Result<R> {
    let mut acc = Field::zeros(st.u.grid());
    for (out, &u) in acc.values_mut().iter_mut().zip(st.u.values()) {
        *out = eval_g(u.max(R::zero()), mp.s, mp.trunc)?;
    }
    Ok(integrate(&acc))
}

/// Fill a full diagnostics row from the state after step n.
pub fn collect<R: Real>(
    st: &State<R>,
    mp: &ModelParams<R>,
    sp: &SchemeParams<R>,
    n: usize,
    baseline: &RunBaseline<R>,
) -> Result<DiagnosticsRow<R>> {
    let z = z_transform(&st.v, mp.alpha)?;
    let grad = gradient_sq(&z);
    let grad_z_l2sq = integrate(&grad);

    let mut l4 = Field::zeros(st.u.grid());
    for (out, (&g, &zi)) in l4.values_mut().iter_mut().zip(grad.values().iter().zip(z.values())) {
        *out = g * g / (zi * zi);
    }
    let grad_z_l4 = integrate(&l4);

    // same zero clamp as the solver's consumption coefficient
    let mut diss = Field::zeros(st.u.grid());
    for (out, (&g, &u)) in diss.values_mut().iter_mut().zip(grad.values().iter().zip(st.u.values())) {
        *out = mp.trunc.eval_a(u).max(R::zero()).powf(mp.s) * g;
    }
    let consumption_diss = integrate(&diss);

    let g_mass = g_mass(st, mp)?;
    let energy = mp.s / cst::<R>(4.0) * g_mass + cst::<R>(0.5) * grad_z_l2sq;

    let v_lower_bound_ref = match mp.trunc.saturation::<R>() {
        Some(sat) => {
            let decay = R::one() + sp.dt * sat.powf(mp.s);
            baseline.min_v0 / decay.powi(n as i32)
        }
        None => R::zero(),
    };

    Ok(DiagnosticsRow {
        t: st.t,
        mass_u: integrate(&st.u),
        min_u: st.u.min(),
        max_u: st.u.max(),
        min_v: st.v.min(),
        max_v: st.v.max(),
        u_star: baseline.u_star,
        energy,
        grad_z_l2sq,
        grad_z_l4,
        consumption_diss,
        g_mass,
        v_lower_bound_ref,
    })
}

/// Advance to t_end emitting one diagnostics row per `every` steps (plus
/// t = 0 and the final step) into the sink. Returns the final state.
pub fn run_recorded<R: Real>(
    initial: State<R>,
    mp: &ModelParams<R>,
    sp: &SchemeParams<R>,
    every: usize,
    mut sink: impl FnMut(&DiagnosticsRow<R>),
) -> crate::error::Result<State<R>> {
    let baseline = RunBaseline::from_state(&initial);
    let mut row_err: Option<crate::error::Error> = None;
    let end = crate::solver::run(initial, mp, sp, every, |n, st| {
        if row_err.is_some() {
            return;
        }
        match collect(st, mp, sp, n, &baseline) {
            Ok(row) => sink(&row),
            Err(e) => row_err = Some(e),
        }
    })?;
    match row_err {
        Some(e) => Err(e),
        None => Ok(end),
    }
}

/// Residuals of the energy inequality over a recorded series, plus the
/// fitted constant.
#[derive(Debug, Clone)]
pub struct EnergyResiduals<R: Real> {
    /// r_n = (E_{n+1} - E_n)/dt + diss_n - c_fit * grad_n, one per interval.
    pub residuals: Vec<R>,
    /// Smallest C >= 0 with all residuals <= tol; infinite when no constant
    /// can absorb an interval with vanishing |grad z|^2.
    pub c_fit: R,
}

/// Fit the smallest admissible constant in
/// (E_{n+1} - E_n)/dt + diss_n <= tol + C int |grad z_n|^2
/// and return the per-interval residuals at that constant.
///
/// Requires >= 2 rows on a uniform time cadence.
pub fn energy_residuals<R: Real>(series: &[DiagnosticsRow<R>], tol: R) -> Result<EnergyResiduals<R>> {
    if series.len() < 2 {
        return Err(Error::Diagnostics("energy residuals need at least 2 rows".into()));
    }
    let dt0 = series[1].t - series[0].t;
    if !(dt0 > R::zero()) {
        return Err(Error::Diagnostics("rows must strictly advance in time".into()));
    }
    for w in series.windows(2) {
        let d = w[1].t - w[0].t;
        if ((d - dt0) / dt0).abs() > cst(1e-9) {
            return Err(Error::Diagnostics("energy residuals require a uniform cadence".into()));
        }
    }
    let mut c_fit = R::zero();
    for w in series.windows(2) {
        let demand = (w[1].energy - w[0].energy) / dt0 + w[0].consumption_diss - tol;
        let grad = w[0].grad_z_l2sq;
        if grad > R::zero() {
            c_fit = c_fit.max(demand / grad);
        } else if demand > R::zero() {
            c_fit = R::infinity();
        }
    }
    let residuals = series
        .windows(2)
        .map(|w| (w[1].energy - w[0].energy) / dt0 + w[0].consumption_diss - c_fit * w[0].grad_z_l2sq)
        .collect();
    Ok(EnergyResiduals { residuals, c_fit })
}

/// Two quadrature routes to one integral identity.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport<R: Real> {
    pub lhs: R,
    pub rhs: R,
    pub abs_gap: R,
    pub h: R,
}

impl<R: Real> IdentityReport<R> {
    fn new(lhs: R, rhs: R, h: R) -> Self {
        IdentityReport { lhs, rhs, abs_gap: (lhs - rhs).abs(), h }
    }
}

/// int |Lap z|^2 versus int |D2 z|^2 - (1/2) oint grad(|grad z|^2) . eta
/// on a 2D grid, for z with (approximately) vanishing discrete normal
/// derivative. Both sides by composite midpoint quadrature with centered
/// stencils; the boundary integral uses face-adjacent one-sided differences.
pub fn verify_identity_boundary<R: Real>(z: &Field<R>) -> Result<IdentityReport<R>> {
    require_2d(z)?;
    let lap = laplacian_neumann(z);
    let lhs = integrate(&lap.map(|x| x * x));
    let frob = integrate(&hessian_frob_sq(z));
    let boundary = boundary_normal_flux(&gradient_sq_mirror(z));
    let rhs = frob - cst::<R>(0.5) * boundary;
    Ok(IdentityReport::new(lhs, rhs, z.grid().h_min()))
}

/// int |D2 z|^2 + (1/2) int (|grad z|^2 / z) Lap z versus
/// 4 int z |D2 sqrt(z)|^2 + (1/4) int |grad z|^4 / z^2
/// on a 2D grid, for z bounded below by `floor` > 0. Integrating the
/// left-hand mixed term by parts under a vanishing normal derivative and
/// expanding the Hessian of sqrt(z) shows the two routes agree exactly in
/// the continuum; the discrete gap measures the Hessian machinery's
/// consistency error.
pub fn verify_identity_sqrt_z<R: Real>(z: &Field<R>, floor: R) -> Result<IdentityReport<R>> {
    require_2d(z)?;
    if !(floor > R::zero()) {
        return Err(Error::Diagnostics("sqrt-z identity requires floor > 0".into()));
    }
    if z.min() < floor {
        return Err(Error::Diagnostics(format!(
            "field drops below floor: min = {:e}",
            z.min().to_f64().unwrap_or(f64::NAN)
        )));
    }
    let frob = integrate(&hessian_frob_sq(z));
    let lap = laplacian_neumann(z);
    let grad = gradient_sq_mirror(z);
    let mut mixed = Field::zeros(z.grid());
    for (out, ((&g, &l), &zi)) in mixed
        .values_mut()
        .iter_mut()
        .zip(grad.values().iter().zip(lap.values()).zip(z.values()))
    {
        *out = g / zi * l;
    }
    let lhs = frob + cst::<R>(0.5) * integrate(&mixed);

    let sqrt_z = z.map(|x| x.sqrt());
    let hess_sqrt = hessian_frob_sq(&sqrt_z);
    let mut weighted = Field::zeros(z.grid());
    for (out, (&hs, &zi)) in weighted.values_mut().iter_mut().zip(hess_sqrt.values().iter().zip(z.values())) {
        *out = zi * hs;
    }
    let mut quartic = Field::zeros(z.grid());
    for (out, (&g, &zi)) in quartic.values_mut().iter_mut().zip(grad.values().iter().zip(z.values())) {
        *out = g * g / (zi * zi);
    }
    let rhs = cst::<R>(4.0) * integrate(&weighted) + cst::<R>(0.25) * integrate(&quartic);
    Ok(IdentityReport::new(lhs, rhs, z.grid().h_min()))
}

fn require_2d<R: Real>(z: &Field<R>) -> Result<()> {
    if z.grid().dim() != 2 {
        return Err(Error::Diagnostics("identity verification requires dim=2".into()));
    }
    if z.grid().n(0) < 3 || z.grid().n(1) < 3 {
        return Err(Error::Diagnostics("identity verification needs at least 3 cells per axis".into()));
    }
    Ok(())
}

/// Frobenius norm squared of the discrete Hessian: centered second
/// differences on the diagonal, the 4-point corner stencil for the cross
/// term, mirror ghosts at the boundary.
fn hessian_frob_sq<R: Real>(z: &Field<R>) -> Field<R> {
    let grid = z.grid().clone();
    let (nx, ny) = (grid.n(0), grid.n(1));
    let (hx, hy) = (grid.h(0), grid.h(1));
    let v = z.values();
    let at = |i: isize, j: isize| -> R {
        let i = mirror(i, nx);
        let j = mirror(j, ny);
        v[i + nx * j]
    };
    let two = cst::<R>(2.0);
    let quarter = cst::<R>(0.25);
    let mut out = Field::zeros(&grid);
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let c = at(i, j);
            let zxx = (at(i + 1, j) - two * c + at(i - 1, j)) / (hx * hx);
            let zyy = (at(i, j + 1) - two * c + at(i, j - 1)) / (hy * hy);
            let zxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1)
                + at(i - 1, j - 1))
                * quarter
                / (hx * hy);
            out.values_mut()[i as usize + nx * j as usize] = zxx * zxx + zyy * zyy + two * zxy * zxy;
        }
    }
    out
}

fn mirror(i: isize, n: usize) -> usize {
    if i < 0 {
        (-i - 1) as usize
    } else if i >= n as isize {
        2 * n - 1 - i as usize
    } else {
        i as usize
    }
}

/// |grad z|^2 with centered differences throughout, mirror ghosts at the
/// boundary. The identity verifiers use this instead of the one-sided
/// variant so that the error varies smoothly up to the wall, which keeps
/// the boundary line integral second-order consistent.
fn gradient_sq_mirror<R: Real>(z: &Field<R>) -> Field<R> {
    let grid = z.grid().clone();
    let v = z.values();
    let half = cst::<R>(0.5);
    let mut out = Field::zeros(&grid);
    for d in 0..grid.dim() {
        let h = grid.h(d);
        let stride = grid.stride(d);
        let nd = grid.n(d);
        for idx in 0..grid.len() {
            let i = grid.unravel(idx)[d];
            let plus = if i == nd - 1 { v[idx] } else { v[idx + stride] };
            let minus = if i == 0 { v[idx] } else { v[idx - stride] };
            let g = (plus - minus) / h * half;
            out.values_mut()[idx] += g * g;
        }
    }
    out
}

/// Line integral of the outward normal derivative of w over the boundary.
/// The derivative at each wall comes from the quadratic through the three
/// face-adjacent cells (second order at the face), composite rule along
/// each side.
fn boundary_normal_flux<R: Real>(w: &Field<R>) -> R {
    let grid = w.grid().clone();
    let (nx, ny) = (grid.n(0), grid.n(1));
    let (hx, hy) = (grid.h(0), grid.h(1));
    let v = w.values();
    let at = |i: usize, j: usize| v[i + nx * j];
    // outward derivative at the wall from cells at h/2, 3h/2, 5h/2 inside
    let wall = |w0: R, w1: R, w2: R, h: R| (cst::<R>(2.0) * w0 - cst::<R>(3.0) * w1 + w2) / h;
    let mut total = R::zero();
    // west and east walls
    for j in 0..ny {
        total += wall(at(0, j), at(1, j), at(2, j), hx) * hy;
        total += wall(at(nx - 1, j), at(nx - 2, j), at(nx - 3, j), hx) * hy;
    }
    // south and north walls
    for i in 0..nx {
        total += wall(at(i, 0), at(i, 1), at(i, 2), hy) * hx;
        total += wall(at(i, ny - 1), at(i, ny - 2), at(i, ny - 3), hy) * hx;
    }
    total
}
