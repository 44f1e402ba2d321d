//! q-Bessel Fourier transform on a truncated lattice.
//!
//! ```text
//! F f(q^m) = c_{q,v} (1-q) sum_n q^{n(2v+2)} f(q^n) j_v(q^{m+n}, q^2)
//! ```
//!
//! The kernel depends on `m + n` only, so a plan caches one table of
//! `j_v(q^s, q^2)` over every reachable `s`.

use crate::error::Result;
use crate::qbessel::jv_lattice;
use crate::qcalc::{window_mismatch, LatticeFunction, LatticeWindow, QParams};

#[derive(Debug, Clone)]
pub struct TransformPlan {
    in_window: LatticeWindow,
    out_window: LatticeWindow,
    params: QParams,
    kernel_min: i32,
    kernel: Vec<f64>,
}

impl TransformPlan {
    pub fn new(in_window: LatticeWindow, out_window: LatticeWindow, params: QParams) -> Self {
        let kernel_min = in_window.n_min() + out_window.n_min();
        let kernel_max = in_window.n_max() + out_window.n_max();
        let kernel = (kernel_min..=kernel_max)
            .map(|s| jv_lattice(s, &params))
            .collect();
        Self {
            in_window,
            out_window,
            params,
            kernel_min,
            kernel,
        }
    }

    /// Plan whose output window equals its input window.
    pub fn symmetric(window: LatticeWindow, params: QParams) -> Self {
        Self::new(window, window, params)
    }

    /// Plan mapping `out_window` back to `in_window`. The kernel table is
    /// shared since it only depends on the sum of the window bounds.
    pub fn inverse(&self) -> Self {
        Self {
            in_window: self.out_window,
            out_window: self.in_window,
            ..self.clone()
        }
    }

    pub fn in_window(&self) -> LatticeWindow {
        self.in_window
    }

    pub fn out_window(&self) -> LatticeWindow {
        self.out_window
    }

    pub fn params(&self) -> &QParams {
        &self.params
    }

    /// `j_v(q^s, q^2)`, from the cache when `s` is in range.
    pub fn kernel(&self, s: i32) -> f64 {
        let i = s - self.kernel_min;
        if i >= 0 && (i as usize) < self.kernel.len() {
            self.kernel[i as usize]
        } else {
            jv_lattice(s, &self.params)
        }
    }
}

/// Largest boundary term seen across all output points, next to the size of
/// the output it contributed to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformDiagnostics {
    pub boundary_term: f64,
    pub output_sup: f64,
}

impl TransformDiagnostics {
    pub fn tail_warning(&self, eps: f64) -> bool {
        self.boundary_term > eps * self.output_sup
    }
}

pub fn fqv_transform(f: &LatticeFunction, plan: &TransformPlan) -> Result<LatticeFunction> {
    fqv_transform_with_diagnostics(f, plan).map(|(g, _)| g)
}

pub fn fqv_transform_with_diagnostics(
    f: &LatticeFunction,
    plan: &TransformPlan,
) -> Result<(LatticeFunction, TransformDiagnostics)> {
    if f.window() != plan.in_window {
        return Err(window_mismatch(plan.in_window, f.window()));
    }
    let p = plan.params;
    let c = p.c_qv();
    let (n_min, n_max) = (plan.in_window.n_min(), plan.in_window.n_max());
    let weighted: Vec<f64> = f.iter().map(|(n, x)| c * p.weight(n) * x).collect();
    let mut boundary: f64 = 0.0;
    let g = LatticeFunction::from_exponent_fn(plan.out_window, |m| {
        boundary = boundary
            .max((weighted[0] * plan.kernel(m + n_min)).abs())
            .max((weighted[weighted.len() - 1] * plan.kernel(m + n_max)).abs());
        (n_min..=n_max)
            .zip(&weighted)
            .map(|(n, wf)| wf * plan.kernel(m + n))
            .sum()
    });
    let diagnostics = TransformDiagnostics {
        boundary_term: boundary,
        output_sup: g.sup_norm(),
    };
    Ok((g, diagnostics))
}

/// q-translation `T_{q,x} f(y) = c int F f(t) j_v(xt) j_v(yt) t^{2v+1} d_q t`
/// at `x = q^{x_exp}`, tabulated on the plan's input window.
pub fn translate(x_exp: i32, f: &LatticeFunction, plan: &TransformPlan) -> Result<LatticeFunction> {
    let spectrum = fqv_transform(f, plan)?;
    Ok(translate_spectrum(x_exp, &spectrum, plan))
}

fn translate_spectrum(
    x_exp: i32,
    spectrum: &LatticeFunction,
    plan: &TransformPlan,
) -> LatticeFunction {
    let p = plan.params;
    let c = p.c_qv();
    let weighted: Vec<(i32, f64)> = spectrum
        .iter()
        .map(|(t, s)| (t, c * p.weight(t) * s * plan.kernel(x_exp + t)))
        .collect();
    LatticeFunction::from_exponent_fn(plan.in_window, |y| {
        weighted
            .iter()
            .map(|&(t, ws)| ws * plan.kernel(y + t))
            .sum()
    })
}

/// q-convolution through the spectrum: `f *_q g = F(F f . F g)`.
pub fn convolve(
    f: &LatticeFunction,
    g: &LatticeFunction,
    plan: &TransformPlan,
) -> Result<LatticeFunction> {
    let ff = fqv_transform(f, plan)?;
    let fg = fqv_transform(g, plan)?;
    let product = ff.zip_with(&fg, |a, b| a * b)?;
    fqv_transform(&product, &plan.inverse())
}

/// q-convolution from its definition
/// `f *_q g(x) = c int T_{q,x} f(y) g(y) y^{2v+1} d_q y`. Cubic in the window
/// length; used to cross-check [`convolve`].
pub fn convolve_direct(
    f: &LatticeFunction,
    g: &LatticeFunction,
    plan: &TransformPlan,
) -> Result<LatticeFunction> {
    if g.window() != plan.in_window {
        return Err(window_mismatch(plan.in_window, g.window()));
    }
    let p = plan.params;
    let c = p.c_qv();
    let spectrum = fqv_transform(f, plan)?;
    Ok(LatticeFunction::from_exponent_fn(plan.in_window, |x| {
        let shifted = translate_spectrum(x, &spectrum, plan);
        c * shifted
            .iter()
            .map(|(y, t)| p.weight(y) * t * g.value(y))
            .sum::<f64>()
    }))
}
