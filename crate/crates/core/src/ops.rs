//! Second-order discrete operators on cell-centered fields with zero-flux
//! (Neumann) boundaries.
//!
//! All divergence-type operators are written in flux form: a flux is
//! computed per interior face and its divergence is accumulated into the
//! two adjacent cells with opposite signs, boundary faces carry no flux.
//! Cell sums of these operators therefore telescope to zero, which is what
//! makes total mass exactly conserved by the schemes built on top.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::scalar::{cst, Real};
use crate::truncation::Truncation;

/// Face-value selection for the chemotactic flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxScheme {
    /// Arithmetic mean of the two cell values, then truncate: a((u_L+u_R)/2).
    Centered,
    /// Donor-cell value selected by the sign of the face gradient of v.
    Upwind,
}

/// Zero-flux discrete Laplacian: 2*dim+1-point stencil in flux form.
///
/// Constants are in the kernel, the operator is symmetric w.r.t. the
/// discrete inner product and its cell sum vanishes identically.
pub fn laplacian_neumann<R: Real>(f: &Field<R>) -> Field<R> {
    let grid = f.grid().clone();
    let mut out = Field::zeros(&grid);
    let v = f.values();
    for d in 0..grid.dim() {
        let h = grid.h(d);
        let stride = grid.stride(d);
        let nd = grid.n(d);
        for_each_line(&grid, d, |base| {
            for i in 0..nd - 1 {
                let a = base + i * stride;
                let b = a + stride;
                let flux = (v[b] - v[a]) / h;
                out.values_mut()[a] += flux / h;
                out.values_mut()[b] -= flux / h;
            }
        });
    }
    out
}

/// Divergence of the chemotactic flux, div(a(u) grad v), in flux form with
/// zero-flux boundary faces. The caller subtracts it in the u-equation.
pub fn chemo_divergence<R: Real>(
    u: &Field<R>,
    v: &Field<R>,
    trunc: Truncation,
    scheme: FluxScheme,
) -> Result<Field<R>> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid().clone();
    let mut out = Field::zeros(&grid);
    let uv = u.values();
    let vv = v.values();
    let half = cst::<R>(0.5);
    for d in 0..grid.dim() {
        let h = grid.h(d);
        let stride = grid.stride(d);
        let nd = grid.n(d);
        for_each_line(&grid, d, |base| {
            for i in 0..nd - 1 {
                let a = base + i * stride;
                let b = a + stride;
                let dv = (vv[b] - vv[a]) / h;
                let a_face = match scheme {
                    FluxScheme::Centered => trunc.eval_a((uv[a] + uv[b]) * half),
                    FluxScheme::Upwind => {
                        // u is transported toward higher v: donor is the cell
                        // the flux leaves
                        if dv > R::zero() {
                            trunc.eval_a(uv[a])
                        } else {
                            trunc.eval_a(uv[b])
                        }
                    }
                };
                let flux = a_face * dv;
                out.values_mut()[a] += flux / h;
                out.values_mut()[b] -= flux / h;
            }
        });
    }
    Ok(out)
}

/// Pointwise |grad f|^2: centered differences in the interior, one-sided at
/// boundary cells.
pub fn gradient_sq<R: Real>(f: &Field<R>) -> Field<R> {
    let grid = f.grid().clone();
    let mut out = Field::zeros(&grid);
    let v = f.values();
    let half = cst::<R>(0.5);
    for d in 0..grid.dim() {
        let h = grid.h(d);
        let stride = grid.stride(d);
        let nd = grid.n(d);
        for_each_line(&grid, d, |base| {
            for i in 0..nd {
                let c = base + i * stride;
                let g = if i == 0 {
                    (v[c + stride] - v[c]) / h
                } else if i == nd - 1 {
                    (v[c] - v[c - stride]) / h
                } else {
                    (v[c + stride] - v[c - stride]) / h * half
                };
                out.values_mut()[c] += g * g;
            }
        });
    }
    out
}

/// Midpoint quadrature: h^dim * sum of cell values (compensated summation).
pub fn integrate<R: Real>(f: &Field<R>) -> R {
    f.grid().cell_volume() * kahan_sum(f.values().iter().copied())
}

/// Discrete inner product <f, g> = h^dim * sum f_i g_i.
pub fn inner<R: Real>(f: &Field<R>, g: &Field<R>) -> Result<R> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let s = kahan_sum(f.values().iter().zip(g.values()).map(|(a, b)| *a * *b));
    Ok(f.grid().cell_volume() * s)
}

/// Lp norm for p in {1, 2, 4} and the max norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpNorm {
    L1,
    L2,
    L4,
    LInf,
}

pub fn lp_norm<R: Real>(f: &Field<R>, p: LpNorm) -> R {
    let vol = f.grid().cell_volume();
    match p {
        LpNorm::L1 => vol * kahan_sum(f.values().iter().map(|v| v.abs())),
        LpNorm::L2 => (vol * kahan_sum(f.values().iter().map(|v| *v * *v))).sqrt(),
        LpNorm::L4 => {
            let s = kahan_sum(f.values().iter().map(|v| {
                let v2 = *v * *v;
                v2 * v2
            }));
            (vol * s).powf(cst(0.25))
        }
        LpNorm::LInf => f.values().iter().fold(R::zero(), |m, v| m.max(v.abs())),
    }
}

fn kahan_sum<R: Real>(iter: impl Iterator<Item = R>) -> R {
    let mut sum = R::zero();
    let mut comp = R::zero();
    for x in iter {
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Visit the base linear index of every grid line along axis d.
fn for_each_line<R: Real>(grid: &Grid<R>, d: usize, mut body: impl FnMut(usize)) {
    let n = [grid.n(0), grid.n(1), grid.n(2)];
    let stride = [grid.stride(0), grid.stride(1), grid.stride(2)];
    let (p, q) = match d {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    for jq in 0..n[q] {
        for jp in 0..n[p] {
            body(jp * stride[p] + jq * stride[q]);
        }
    }
}
