//! q-prolate spheroidal wave functions.
//!
//! The band-limiting operator
//!
//! ```text
//! T_a u(x) = c_{q,v} int_0^a u(t) j_v(xt, q^2) t^{2v+1} d_q t
//! ```
//!
//! acts on functions sampled at the points `t_m = a q^m` of `[0, a]_q`. Its
//! Jackson discretization `A_km = c w_m j_v(t_k t_m)` is self-adjoint for the
//! weights `w_m`, so we diagonalize the similar symmetric matrix
//! `B = D^{1/2} A D^{-1/2}`, `D = diag(w_m)`, and map eigenvectors back with
//! `psi(t_m) = u_m / sqrt(w_m)`.
//!
//! Each `psi_i` is scaled so that `||psi_i||_{q,2,v} = 1` on the whole
//! lattice, which makes its mass on `[0, a]_q` equal to `lambda_i^2`. Off
//! `[0, a]_q` it is defined by `psi_i(z) = (c / lambda_i) int_0^a psi_i(t) j_v(zt) t^{2v+1} d_q t`.

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, SymMatrix};
use crate::qbessel::{
    hahn_exton_lattice, jv, product_integral_closed, product_integral_closed_lattice,
};
use crate::qcalc::{inner_product, LatticeFunction, LatticeWindow, QParams};

/// Default number of retained lattice points of `[0, a]_q`.
pub const DEFAULT_DEPTH: usize = 60;
/// Default number of retained eigenpairs.
pub const DEFAULT_KEEP: usize = 15;

const SIGN_THRESHOLD: f64 = 1e-12;

/// The band `[0, a]_q` with `a = q^{a_exp}`, truncated to its first `depth`
/// points `a q^m = q^{a_exp + m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bandlimit {
    a_exp: i32,
    depth: usize,
}

impl Bandlimit {
    pub fn new(a_exp: i32, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be at least 1".into()));
        }
        Ok(Self { a_exp, depth })
    }

    pub fn a_exp(&self) -> i32 {
        self.a_exp
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn a(&self, p: &QParams) -> f64 {
        p.point(self.a_exp)
    }

    /// Lattice exponents `[a_exp, a_exp + depth - 1]` of the retained points.
    pub fn window(&self) -> LatticeWindow {
        LatticeWindow::new(self.a_exp, self.a_exp + self.depth as i32 - 1).expect("depth >= 1")
    }

    /// `w_m = (1 - q) a^{2v+2} q^{m(2v+2)}`.
    pub fn weight(&self, m: usize, p: &QParams) -> f64 {
        p.weight(self.a_exp + m as i32)
    }
}

/// The symmetrized operator matrix together with what it was built from.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    bandlimit: Bandlimit,
    params: QParams,
    matrix: SymMatrix,
    sqrt_weights: Vec<f64>,
}

impl OperatorMatrix {
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn bandlimit(&self) -> Bandlimit {
        self.bandlimit
    }

    pub fn params(&self) -> &QParams {
        &self.params
    }

    /// `(T_a u)(a q^k)` for samples `u[m] = u(a q^m)`.
    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = samples
            .iter()
            .zip(&self.sqrt_weights)
            .map(|(u, s)| u * s)
            .collect();
        self.matrix
            .mul_vec(&scaled)
            .into_iter()
            .zip(&self.sqrt_weights)
            .map(|(x, s)| x / s)
            .collect()
    }
}

/// `B_km = c sqrt(w_k w_m) j_v(a^2 q^{k+m}, q^2)`; the Bessel factor is
/// evaluated once per anti-diagonal.
pub fn build_operator_matrix(b: Bandlimit, p: &QParams) -> OperatorMatrix {
    let depth = b.depth();
    let c = p.c_qv();
    let diagonals: Vec<f64> = (0..2 * depth - 1)
        .map(|s| hahn_exton_lattice(2 * b.a_exp() + s as i32, p.v(), p).value)
        .collect();
    let sqrt_weights: Vec<f64> = (0..depth).map(|m| b.weight(m, p).sqrt()).collect();
    let matrix = SymMatrix::from_upper(depth, |k, m| {
        c * sqrt_weights[k] * sqrt_weights[m] * diagonals[k + m]
    });
    OperatorMatrix {
        bandlimit: b,
        params: *p,
        matrix,
        sqrt_weights,
    }
}

/// Eigenvalues and eigenfunction samples of `T_a^v`.
#[derive(Debug, Clone)]
pub struct PswfBasis {
    bandlimit: Bandlimit,
    params: QParams,
    eigenvalues: Vec<f64>,
    samples: Vec<Vec<f64>>,
    sweeps: usize,
}

/// Diagonalizes `op` and keeps the `keep` pairs of largest `|lambda|`.
pub fn eigendecompose(op: &OperatorMatrix, keep: usize) -> Result<PswfBasis> {
    let depth = op.bandlimit.depth();
    if keep == 0 || keep > depth {
        return Err(Error::InvalidParameter(format!(
            "keep must lie in [1, {depth}], got {keep}"
        )));
    }
    let eig = jacobi_eigen(&op.matrix)?;
    let mut order: Vec<usize> = (0..depth).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .abs()
            .total_cmp(&eig.eigenvalues[i].abs())
    });
    order.truncate(keep);

    let mut eigenvalues = Vec::with_capacity(keep);
    let mut samples = Vec::with_capacity(keep);
    for i in order {
        let lambda = eig.eigenvalues[i];
        let u = &eig.eigenvectors[i];
        let mut s: Vec<f64> = u.iter().zip(&op.sqrt_weights).map(|(x, w)| x / w).collect();
        // psi_i(a) > 0, or the first sample above the threshold when psi_i(a)
        // is tiny; decided before the |lambda| scaling.
        let sign = s
            .iter()
            .find(|x| x.abs() > SIGN_THRESHOLD)
            .map_or(1.0, |x| x.signum());
        let scale = sign * lambda.abs();
        s.iter_mut().for_each(|x| *x *= scale);
        samples.push(s);
        eigenvalues.push(lambda);
    }
    Ok(PswfBasis {
        bandlimit: op.bandlimit,
        params: op.params,
        eigenvalues,
        samples,
        sweeps: eig.sweeps,
    })
}

impl PswfBasis {
    pub fn compute(b: Bandlimit, p: &QParams, keep: usize) -> Result<Self> {
        eigendecompose(&build_operator_matrix(b, p), keep)
    }

    pub fn bandlimit(&self) -> Bandlimit {
        self.bandlimit
    }

    pub fn params(&self) -> &QParams {
        &self.params
    }

    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Signed eigenvalues, sorted by decreasing magnitude.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, i: usize) -> Result<f64> {
        self.check(i).map(|_| self.eigenvalues[i])
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `psi_i(a q^m)` for `m = 0..depth`.
    pub fn samples(&self, i: usize) -> Result<&[f64]> {
        self.check(i).map(|_| self.samples[i].as_slice())
    }

    /// The samples of `psi_i` as a function on the band's window.
    pub fn sample_function(&self, i: usize) -> Result<LatticeFunction> {
        LatticeFunction::new(self.bandlimit.window(), self.samples(i)?.to_vec())
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                count: self.count(),
            })
        }
    }

    fn extend(&self, i: usize, kernel: impl Fn(i32) -> f64) -> Result<f64> {
        self.check(i)?;
        let b = self.bandlimit;
        let p = &self.params;
        let s: f64 = self.samples[i]
            .iter()
            .enumerate()
            .map(|(m, x)| b.weight(m, p) * x * kernel(b.a_exp() + m as i32))
            .sum();
        Ok(p.c_qv() * s / self.eigenvalues[i])
    }

    /// `psi_i(z)` for real `z >= 0` through the band-limited integral.
    pub fn eval_at(&self, i: usize, z: f64) -> Result<f64> {
        let p = self.params;
        self.extend(i, |k| jv(z * p.point(k), &p).value)
    }

    /// `psi_i(q^n)`, with every kernel value taken at an exact lattice point.
    pub fn eval_lattice(&self, i: usize, n: i32) -> Result<f64> {
        let p = self.params;
        self.extend(i, |k| hahn_exton_lattice(n + k, p.v(), &p).value)
    }

    /// Smallest window carrying the full-lattice mass of every `psi_i` to
    /// double precision. The extension reaches down to exponents near
    /// `-(a_exp + depth)` and the weight must fall below `1e-20` at the top.
    pub fn lattice_window(&self) -> LatticeWindow {
        let b = self.bandlimit;
        let p = &self.params;
        let n_min = -(b.a_exp() + b.depth() as i32) - 10;
        let top = (1e-20f64.ln() / (p.measure_exponent() * p.q().ln())).ceil() as i32;
        LatticeWindow::new(n_min, top.max(b.window().n_max()) + 1).expect("n_min < n_max")
    }

    /// `psi_i` tabulated on a lattice window through [`Self::eval_lattice`].
    pub fn on_window(&self, i: usize, window: LatticeWindow) -> Result<LatticeFunction> {
        self.check(i)?;
        Ok(LatticeFunction::from_exponent_fn(window, |n| {
            self.eval_lattice(i, n).expect("index checked")
        }))
    }

    /// `||T_a psi_i - lambda_i psi_i||` over `[0, a]_q`.
    pub fn residual(&self, i: usize, op: &OperatorMatrix) -> Result<f64> {
        let s = self.samples(i)?;
        let lambda = self.eigenvalues[i];
        let t = op.apply(s);
        let b = self.bandlimit;
        Ok(t.iter()
            .zip(s)
            .enumerate()
            .map(|(m, (ts, x))| b.weight(m, &self.params) * (ts - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt())
    }
}

pub fn eval_pswf_at(basis: &PswfBasis, i: usize, z: f64) -> Result<f64> {
    basis.eval_at(i, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Product-integral closed form; undefined on the diagonal `x = y`.
    ClosedForm,
    /// Jackson sum over the band's retained points.
    DirectSum,
    /// `sum_{i < terms} psi_i(x) psi_i(y)`.
    EigenSeries { terms: usize },
}

/// Reproducing kernel of the q-Paley-Wiener space
/// `k(x, y) = c^2 int_0^a j_v(xt) j_v(yt) t^{2v+1} d_q t`.
#[derive(Debug, Clone)]
pub struct KernelEvaluator<'a> {
    bandlimit: Bandlimit,
    params: QParams,
    mode: KernelMode,
    basis: Option<&'a PswfBasis>,
}

impl<'a> KernelEvaluator<'a> {
    pub fn new(bandlimit: Bandlimit, params: QParams, mode: KernelMode) -> Self {
        Self {
            bandlimit,
            params,
            mode,
            basis: None,
        }
    }

    pub fn eigen_series(basis: &'a PswfBasis, terms: usize) -> Self {
        Self {
            bandlimit: basis.bandlimit(),
            params: *basis.params(),
            mode: KernelMode::EigenSeries { terms },
            basis: Some(basis),
        }
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    fn basis_terms(&self, terms: usize) -> Result<&'a PswfBasis> {
        let basis = self.basis.ok_or(Error::MissingBasis)?;
        if terms > basis.count() {
            return Err(Error::IndexOutOfRange {
                index: terms,
                count: basis.count(),
            });
        }
        Ok(basis)
    }

    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        let p = &self.params;
        let c2 = p.c_qv() * p.c_qv();
        let b = self.bandlimit;
        match self.mode {
            KernelMode::ClosedForm => Ok(c2 * product_integral_closed(x, y, b.a_exp(), p)?),
            KernelMode::DirectSum => Ok(c2
                * self.direct(
                    |k| jv(x * p.point(k), p).value,
                    |k| jv(y * p.point(k), p).value,
                )),
            KernelMode::EigenSeries { terms } => {
                let basis = self.basis_terms(terms)?;
                (0..terms).try_fold(0.0, |acc, i| {
                    Ok(acc + basis.eval_at(i, x)? * basis.eval_at(i, y)?)
                })
            }
        }
    }

    /// `k(q^nx, q^ny)` with lattice-exact Bessel evaluations.
    pub fn kernel_lattice(&self, nx: i32, ny: i32) -> Result<f64> {
        let p = &self.params;
        let c2 = p.c_qv() * p.c_qv();
        let b = self.bandlimit;
        let j = |n: i32| hahn_exton_lattice(n, p.v(), p).value;
        match self.mode {
            KernelMode::ClosedForm => {
                Ok(c2 * product_integral_closed_lattice(nx, ny, b.a_exp(), p)?)
            }
            KernelMode::DirectSum => Ok(c2 * self.direct(|k| j(nx + k), |k| j(ny + k))),
            KernelMode::EigenSeries { terms } => {
                let basis = self.basis_terms(terms)?;
                (0..terms).try_fold(0.0, |acc, i| {
                    Ok(acc + basis.eval_lattice(i, nx)? * basis.eval_lattice(i, ny)?)
                })
            }
        }
    }

    fn direct(&self, jx: impl Fn(i32) -> f64, jy: impl Fn(i32) -> f64) -> f64 {
        let p = &self.params;
        self.bandlimit
            .window()
            .exponents()
            .map(|k| p.weight(k) * jx(k) * jy(k))
            .sum()
    }

    /// `k_x = k(q^nx, .)` tabulated on a lattice window.
    pub fn section_lattice(&self, nx: i32, window: LatticeWindow) -> Result<LatticeFunction> {
        let values = window
            .exponents()
            .map(|ny| match self.kernel_lattice(nx, ny) {
                Err(Error::DegenerateArguments { .. }) => KernelEvaluator {
                    mode: KernelMode::DirectSum,
                    ..self.clone()
                }
                .kernel_lattice(nx, ny),
                other => other,
            })
            .collect::<Result<Vec<_>>>()?;
        LatticeFunction::new(window, values)
    }
}

pub fn kernel(e: &KernelEvaluator<'_>, x: f64, y: f64) -> Result<f64> {
    e.kernel(x, y)
}

/// Fraction of the weighted energy of `f` on `[0, a]_q`.
pub fn concentration_index(f: &LatticeFunction, b: Bandlimit, p: &QParams) -> Result<f64> {
    let total = inner_product(f, f, p);
    if total.sqrt() <= 1e-300 {
        return Err(Error::ZeroFunction);
    }
    let inside: f64 = f
        .iter()
        .filter(|&(k, _)| k >= b.a_exp())
        .map(|(k, x)| p.weight(k) * x * x)
        .sum();
    Ok(inside / total)
}
