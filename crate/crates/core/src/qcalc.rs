//! q-calculus on the positive lattice `R_q^+ = {q^n : n in Z}`.
//!
//! Every function in this crate is even and lives on the lattice, so it is
//! tabulated on a finite [`LatticeWindow`] of exponents. Values outside a
//! window are exactly zero in every sum.
//!
//! Sums run over ascending lattice exponents, which for `v > -1` is the
//! order of descending measure weight `(1 - q) q^{k(2v+2)}`.

use crate::error::{Error, Result};

/// Default truncation tolerance for series and infinite products.
pub const DEFAULT_EPS: f64 = 1e-14;

/// Default lattice window used by transforms: exponents `[-15, 60]`.
pub const DEFAULT_WINDOW: (i32, i32) = (-15, 60);

/// Global parameters: deformation `q`, order `v` and the transform constant
/// `c_{q,v} = (q^{2v+2}; q^2)_inf / ((1 - q) (q^2; q^2)_inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    q: f64,
    v: f64,
    c_qv: f64,
    eps: f64,
}

impl QParams {
    pub fn new(q: f64, v: f64) -> Result<Self> {
        Self::with_eps(q, v, DEFAULT_EPS)
    }

    pub fn with_eps(q: f64, v: f64, eps: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter("q must lie in (0,1)".into()));
        }
        if !v.is_finite() || v <= -1.0 {
            return Err(Error::InvalidParameter("v must be greater than -1".into()));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidParameter("eps must be positive".into()));
        }
        let q2 = q * q;
        let c_qv = qpochhammer_inf(q.powf(2.0 * v + 2.0), q2, eps)
            / ((1.0 - q) * qpochhammer_inf(q2, q2, eps));
        Ok(Self { q, v, c_qv, eps })
    }

    /// Same `q` and `eps`, different order. `c_{q,v}` is recomputed.
    pub fn with_order(&self, v: f64) -> Result<Self> {
        Self::with_eps(self.q, v, self.eps)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn c_qv(&self) -> f64 {
        self.c_qv
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// The exponent `2v + 2` of the measure `x^{2v+1} d_q x`.
    pub fn measure_exponent(&self) -> f64 {
        2.0 * self.v + 2.0
    }

    /// Lattice point `q^k`.
    pub fn point(&self, k: i32) -> f64 {
        self.q.powi(k)
    }

    /// Mass of the point `q^k` under `x^{2v+1} d_q x`: `(1 - q) q^{k(2v+2)}`.
    pub fn weight(&self, k: i32) -> f64 {
        (1.0 - self.q) * self.q.powf(k as f64 * self.measure_exponent())
    }
}

/// Finite product `(z; q)_n`.
pub fn qpochhammer(z: f64, q: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |prod, i| prod * (1.0 - z * q.powi(i as i32)))
}

/// Infinite product `(z; q)_inf`, truncated at the first factor with
/// `|z| q^i < eps (1 - q)`.
pub fn qpochhammer_inf(z: f64, q: f64, eps: f64) -> f64 {
    let cutoff = eps * (1.0 - q);
    let mut prod = 1.0;
    let mut term = z;
    while term.abs() >= cutoff {
        prod *= 1.0 - term;
        term *= q;
        if prod == 0.0 {
            break;
        }
    }
    prod
}

/// A contiguous range of lattice exponents `n_min..=n_max`. The largest
/// point is `q^{n_min}`, the smallest `q^{n_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeWindow {
    n_min: i32,
    n_max: i32,
}

impl LatticeWindow {
    pub fn new(n_min: i32, n_max: i32) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!(
                "window requires n_min <= n_max, got [{n_min}, {n_max}]"
            )));
        }
        Ok(Self { n_min, n_max })
    }

    pub fn n_min(&self) -> i32 {
        self.n_min
    }

    pub fn n_max(&self) -> i32 {
        self.n_max
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i32) -> bool {
        (self.n_min..=self.n_max).contains(&k)
    }

    pub fn exponents(&self) -> std::ops::RangeInclusive<i32> {
        self.n_min..=self.n_max
    }

    pub fn intersect(&self, other: &LatticeWindow) -> Option<LatticeWindow> {
        let lo = self.n_min.max(other.n_min);
        let hi = self.n_max.min(other.n_max);
        (lo <= hi).then_some(LatticeWindow {
            n_min: lo,
            n_max: hi,
        })
    }

    fn offset(&self, k: i32) -> usize {
        (k - self.n_min) as usize
    }
}

impl Default for LatticeWindow {
    fn default() -> Self {
        Self {
            n_min: DEFAULT_WINDOW.0,
            n_max: DEFAULT_WINDOW.1,
        }
    }
}

/// An even function sampled on a lattice window; `values[i]` is the value at
/// `q^{n_min + i}` (and, by evenness, at `-q^{n_min + i}`).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    window: LatticeWindow,
    values: Vec<f64>,
}

impl LatticeFunction {
    pub fn new(window: LatticeWindow, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::LengthMismatch {
                expected: window.len(),
                got: values.len(),
            });
        }
        Ok(Self { window, values })
    }

    pub fn zeros(window: LatticeWindow) -> Self {
        Self {
            window,
            values: vec![0.0; window.len()],
        }
    }

    /// Tabulates `f(q^k)` for every `k` in the window.
    pub fn from_fn(window: LatticeWindow, p: &QParams, f: impl Fn(f64) -> f64) -> Self {
        let values = window.exponents().map(|k| f(p.point(k))).collect();
        Self { window, values }
    }

    /// Tabulates `f(k)` by lattice exponent.
    pub fn from_exponent_fn(window: LatticeWindow, f: impl FnMut(i32) -> f64) -> Self {
        let values = window.exponents().map(f).collect();
        Self { window, values }
    }

    /// The indicator `e_k` of the single point `q^k`.
    pub fn indicator(window: LatticeWindow, k: i32) -> Result<Self> {
        if !window.contains(k) {
            return Err(Error::WindowTooSmall {
                n_min: window.n_min,
                n_max: window.n_max,
                needed: k,
            });
        }
        let mut f = Self::zeros(window);
        f.values[window.offset(k)] = 1.0;
        Ok(f)
    }

    pub fn window(&self) -> LatticeWindow {
        self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value at `q^k`; zero outside the window.
    pub fn value(&self, k: i32) -> f64 {
        if self.window.contains(k) {
            self.values[self.window.offset(k)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, k: i32, value: f64) -> Result<()> {
        if !self.window.contains(k) {
            return Err(Error::WindowTooSmall {
                n_min: self.window.n_min,
                n_max: self.window.n_max,
                needed: k,
            });
        }
        let i = self.window.offset(k);
        self.values[i] = value;
        Ok(())
    }

    /// `(k, f(q^k))` pairs in ascending exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.window.exponents().zip(self.values.iter().copied())
    }

    /// Copy onto another window, zero-filling and dropping as needed.
    pub fn restricted(&self, window: LatticeWindow) -> Self {
        Self::from_exponent_fn(window, |k| self.value(k))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            window: self.window,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.window != other.window {
            return Err(window_mismatch(self.window, other.window));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            window: self.window,
            values,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub(crate) fn window_mismatch(expected: LatticeWindow, got: LatticeWindow) -> Error {
    Error::WindowMismatch {
        expected_min: expected.n_min,
        expected_max: expected.n_max,
        got_min: got.n_min,
        got_max: got.n_max,
    }
}

/// A truncated lattice sum together with the magnitudes of its two boundary
/// terms, which bound what the truncation discarded when the summand decays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumDiagnostics {
    pub value: f64,
    /// `|term|` at the smallest exponent (largest point) summed.
    pub head_term: f64,
    /// `|term|` at the largest exponent (smallest point) summed.
    pub tail_term: f64,
}

impl SumDiagnostics {
    pub fn boundary_term(&self) -> f64 {
        self.head_term.max(self.tail_term)
    }

    /// True when a boundary term exceeds `eps` times the sum.
    pub fn tail_warning(&self, eps: f64) -> bool {
        self.boundary_term() > eps * self.value.abs()
    }
}

fn lattice_sum(terms: impl Iterator<Item = f64>) -> SumDiagnostics {
    let mut value = 0.0;
    let mut head_term = None;
    let mut tail_term = 0.0;
    for t in terms {
        head_term.get_or_insert(t.abs());
        tail_term = t.abs();
        value += t;
    }
    SumDiagnostics {
        value,
        head_term: head_term.unwrap_or(0.0),
        tail_term,
    }
}

/// Jackson integral over `[0, a]_q` with `a = q^{a_exp}`:
/// `(1 - q) a sum_{m >= 0} q^m f(a q^m)`, truncated at the window's end.
pub fn jackson_integral_0a(f: &LatticeFunction, a_exp: i32, p: &QParams) -> Result<f64> {
    jackson_integral_0a_with_diagnostics(f, a_exp, p).map(|d| d.value)
}

pub fn jackson_integral_0a_with_diagnostics(
    f: &LatticeFunction,
    a_exp: i32,
    p: &QParams,
) -> Result<SumDiagnostics> {
    let w = f.window();
    if !w.contains(a_exp) {
        return Err(Error::WindowTooSmall {
            n_min: w.n_min,
            n_max: w.n_max,
            needed: a_exp,
        });
    }
    let q = p.q();
    Ok(lattice_sum(
        (a_exp..=w.n_max).map(|k| (1.0 - q) * q.powi(k) * f.value(k)),
    ))
}

/// Jackson integral over `[0, inf)`: `(1 - q) sum_n q^n f(q^n)` on the window.
pub fn jackson_integral_0inf(f: &LatticeFunction, p: &QParams) -> f64 {
    jackson_integral_0inf_with_diagnostics(f, p).value
}

pub fn jackson_integral_0inf_with_diagnostics(f: &LatticeFunction, p: &QParams) -> SumDiagnostics {
    let q = p.q();
    lattice_sum(f.iter().map(|(k, x)| (1.0 - q) * q.powi(k) * x))
}

/// `<f, g> = int_0^inf f g t^{2v+1} d_q t` over the intersection of the
/// windows; zero when they are disjoint.
pub fn inner_product(f: &LatticeFunction, g: &LatticeFunction, p: &QParams) -> f64 {
    match f.window().intersect(&g.window()) {
        Some(w) => w
            .exponents()
            .map(|k| p.weight(k) * (f.value(k) * g.value(k)))
            .sum(),
        None => 0.0,
    }
}

/// `||f||_{q,p,v}` for `p >= 1`. For `p = 2` this is exactly
/// `sqrt(inner_product(f, f))`.
pub fn norm_lqpv(f: &LatticeFunction, p_exponent: f64, p: &QParams) -> Result<f64> {
    if p_exponent.is_nan() || p_exponent < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "norm exponent must be >= 1, got {p_exponent}"
        )));
    }
    if p_exponent == 2.0 {
        return Ok(inner_product(f, f, p).sqrt());
    }
    let s: f64 = f
        .iter()
        .map(|(k, x)| p.weight(k) * x.abs().powf(p_exponent))
        .sum();
    Ok(s.powf(1.0 / p_exponent))
}
