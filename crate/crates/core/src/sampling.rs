//! Reconstruction of q-bandlimited functions from their lattice samples.
//!
//! For `f` in the q-Paley-Wiener space `PW_{q,a}^v`,
//!
//! ```text
//! f(z) = (1-q) sum_k q^{2k(v+1)} f(q^k) k_z(q^k)
//! ```
//!
//! where `k_z(x) = k(z, x)` is the reproducing kernel. The sum is truncated to
//! a [`SamplingGrid`].

use crate::error::{Error, Result};
use crate::pswf::{Bandlimit, KernelEvaluator, KernelMode};
use crate::qbessel::{hahn_exton, hahn_exton_lattice, DEGENERACY_THRESHOLD};
use crate::qcalc::{window_mismatch, LatticeFunction, LatticeWindow, QParams};
use crate::qfourier::{
    fqv_transform, fqv_transform_with_diagnostics, TransformDiagnostics, TransformPlan,
};

pub const DEFAULT_GRID: (i32, i32) = (-10, 40);
/// Lower cutoff `x >= q^{delta_exp}` of the convergence study.
pub const DEFAULT_DELTA_EXP: i32 = 10;

/// Sample exponents `k_min..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingGrid {
    k_min: i32,
    k_max: i32,
}

impl SamplingGrid {
    pub fn new(k_min: i32, k_max: i32) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::InvalidParameter(format!(
                "sampling grid needs k_min <= k_max, got [{k_min}, {k_max}]"
            )));
        }
        Ok(Self { k_min, k_max })
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exponents(&self) -> std::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max
    }

    pub fn window(&self) -> LatticeWindow {
        LatticeWindow::new(self.k_min, self.k_max).expect("k_min <= k_max")
    }

    /// `(1-q) q^{2k(v+1)}`.
    pub fn weight(&self, k: i32, p: &QParams) -> f64 {
        p.weight(k)
    }
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self {
            k_min: DEFAULT_GRID.0,
            k_max: DEFAULT_GRID.1,
        }
    }
}

/// `k_z(q^n)` for real `z >= 0`. Closed form, or the Jackson sum over the
/// band when `z^2` is too close to `q^{2n}`.
pub fn sampling_kernel(z: f64, n: i32, b: Bandlimit, p: &QParams) -> f64 {
    let q = p.q();
    let v = p.v();
    let c = p.c_qv();
    let a_exp = b.a_exp();
    let a = p.point(a_exp);
    let (x2, z2) = (p.point(2 * n), z * z);
    if (x2 - z2).abs() <= DEGENERACY_THRESHOLD * x2.max(z2) {
        return c
            * c
            * b.window()
                .exponents()
                .map(|k| {
                    p.weight(k)
                        * hahn_exton(z * p.point(k), v, p).value
                        * hahn_exton_lattice(n + k, v, p).value
                })
                .sum::<f64>();
    }
    let j0 = |s: f64| hahn_exton(s, v, p).value;
    let j1 = |s: f64| hahn_exton(s, v + 1.0, p).value;
    let j0n = |m: i32| hahn_exton_lattice(m, v, p).value;
    let j1n = |m: i32| hahn_exton_lattice(m, v + 1.0, p).value;
    let prefactor = (1.0 - q) * c * c / (1.0 - q.powf(2.0 * v + 2.0)) * a.powf(2.0 * v + 2.0);
    let numerator = x2 * j1n(a_exp + n) * j0(a * z / q) - z2 * j1(a * z) * j0n(a_exp + n - 1);
    prefactor * numerator / (x2 - z2)
}

/// `k(q^j, q^n)` with lattice-exact Bessel factors.
pub fn sampling_kernel_lattice(j: i32, n: i32, b: Bandlimit, p: &QParams) -> f64 {
    let closed = KernelEvaluator::new(b, *p, KernelMode::ClosedForm);
    match closed.kernel_lattice(j, n) {
        Ok(k) => k,
        Err(_) => KernelEvaluator::new(b, *p, KernelMode::DirectSum)
            .kernel_lattice(j, n)
            .expect("direct sum is defined everywhere"),
    }
}

/// Largest `|(1-q) q^{2k(v+1)} f(q^k) k_z(q^k)|` among the two grid ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionDiagnostics {
    pub value: f64,
    pub boundary_term: f64,
}

fn check_samples(samples: &[f64], grid: SamplingGrid) -> Result<()> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    Ok(())
}

fn sum_with_boundary(
    samples: &[f64],
    grid: SamplingGrid,
    p: &QParams,
    kz: impl Fn(i32) -> f64,
) -> ReconstructionDiagnostics {
    let terms: Vec<f64> = grid
        .exponents()
        .zip(samples)
        .map(|(k, f)| {
            if *f == 0.0 {
                0.0
            } else {
                grid.weight(k, p) * f * kz(k)
            }
        })
        .collect();
    ReconstructionDiagnostics {
        value: terms.iter().sum(),
        boundary_term: terms[0].abs().max(terms[terms.len() - 1].abs()),
    }
}

/// `f(z)` from `samples[i] = f(q^{k_min + i})`.
pub fn reconstruct(
    samples: &[f64],
    z: f64,
    grid: SamplingGrid,
    b: Bandlimit,
    p: &QParams,
) -> Result<f64> {
    reconstruct_with_diagnostics(samples, z, grid, b, p).map(|d| d.value)
}

pub fn reconstruct_with_diagnostics(
    samples: &[f64],
    z: f64,
    grid: SamplingGrid,
    b: Bandlimit,
    p: &QParams,
) -> Result<ReconstructionDiagnostics> {
    check_samples(samples, grid)?;
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "z must be a nonnegative real, got {z}"
        )));
    }
    Ok(sum_with_boundary(samples, grid, p, |k| {
        sampling_kernel(z, k, b, p)
    }))
}

/// `f(q^j)` from samples, with every kernel value at lattice arguments.
pub fn reconstruct_lattice(
    samples: &[f64],
    j: i32,
    grid: SamplingGrid,
    b: Bandlimit,
    p: &QParams,
) -> Result<f64> {
    reconstruct_lattice_with_diagnostics(samples, j, grid, b, p).map(|d| d.value)
}

pub fn reconstruct_lattice_with_diagnostics(
    samples: &[f64],
    j: i32,
    grid: SamplingGrid,
    b: Bandlimit,
    p: &QParams,
) -> Result<ReconstructionDiagnostics> {
    check_samples(samples, grid)?;
    Ok(sum_with_boundary(samples, grid, p, |k| {
        sampling_kernel_lattice(j, k, b, p)
    }))
}

/// Projection `f_a = F(1_{[0,a]} F f)` onto `PW_{q,a}^v`, tabulated on the
/// plan's input window. The plan must map `f`'s window to itself.
pub fn project(f: &LatticeFunction, b: Bandlimit, plan: &TransformPlan) -> Result<LatticeFunction> {
    project_with_diagnostics(f, b, plan).map(|(fa, _)| fa)
}

/// [`project`] together with the diagnostics of the forward transform,
/// whose boundary term measures how much of `f` the window cuts off.
pub fn project_with_diagnostics(
    f: &LatticeFunction,
    b: Bandlimit,
    plan: &TransformPlan,
) -> Result<(LatticeFunction, TransformDiagnostics)> {
    if f.window() != plan.in_window() {
        return Err(window_mismatch(plan.in_window(), f.window()));
    }
    let (mut spectrum, diagnostics) = fqv_transform_with_diagnostics(f, plan)?;
    for (k, x) in spectrum.window().exponents().zip(spectrum.values_mut()) {
        if k < b.a_exp() {
            *x = 0.0;
        }
    }
    Ok((fqv_transform(&spectrum, &plan.inverse())?, diagnostics))
}

/// `sup |f(q^n) - g(q^n)|` over `n_lo <= n <= n_hi`.
pub fn sup_error(f: &LatticeFunction, g: &LatticeFunction, n_lo: i32, n_hi: i32) -> f64 {
    (n_lo..=n_hi)
        .map(|n| (f.value(n) - g.value(n)).abs())
        .fold(0.0, f64::max)
}

/// `(a_exp, sup_{x >= q^{delta_exp}} |f(x) - f_a(x)|)` for each band, with
/// the sup taken over the lattice points of `f`'s window. Uses the first
/// band's depth convention of [`crate::pswf::DEFAULT_DEPTH`] points, which
/// only matters for the band's nominal window, not for the projection.
pub fn convergence_study(
    f: &LatticeFunction,
    a_exps: &[i32],
    delta_exp: i32,
    plan: &TransformPlan,
) -> Result<Vec<(i32, f64)>> {
    let n_lo = f.window().n_min();
    a_exps
        .iter()
        .map(|&a_exp| {
            let b = Bandlimit::new(a_exp, crate::pswf::DEFAULT_DEPTH)?;
            let fa = project(f, b, plan)?;
            Ok((a_exp, sup_error(f, &fa, n_lo, delta_exp)))
        })
        .collect()
}
