//! The normalized Hahn-Exton q-Bessel function
//!
//! ```text
//! j_v(z, q^2) = sum_n (-1)^n q^{n(n+1)} z^{2n} / ((q^2; q^2)_n (q^{2v+2}; q^2)_n)
//! ```
//!
//! With `Q = q^2`, `b = q^{2v+2}` and `x = Q z^2` this is `1phi1(0; b; Q, x)`.
//! The power series is only used for `x <= 1`. For larger arguments its terms
//! grow to many orders of magnitude above the result, so we use the
//! rearrangement
//!
//! ```text
//! (b; Q)_inf 1phi1(0; b; Q, x) = sum_n (-1)^n Q^{n(n-1)/2} b^n (x Q^n; Q)_inf / (Q; Q)_n
//! ```
//!
//! obtained by expanding `(b Q^n; Q)_inf` and swapping the double sum. Its
//! terms shrink by roughly `b / x` per step while `x Q^n > 1`, so there is no
//! cancellation. At lattice points `z = q^{-N}` the products `(x Q^n; Q)_inf`
//! vanish identically for `n < N`; [`hahn_exton_lattice`] drops those terms
//! exactly instead of relying on `1 - x Q^k` rounding to zero.

use crate::error::{Error, Result};
use crate::qcalc::{qpochhammer_inf, QParams};

/// Relative separation below which `y^2` and `z^2` count as equal.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

const CANCELLATION_RATIO: f64 = 1e12;
const MAX_TERMS: usize = 100_000;

/// Result of one series evaluation together with the diagnostics needed to
/// judge its accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEvalReport {
    pub value: f64,
    pub terms_used: usize,
    /// Largest `|term|` summed, on the same scale as `value`.
    pub max_term_magnitude: f64,
    /// Set when `max_term_magnitude > 1e12 |value|`.
    pub cancellation_flag: bool,
}

impl BesselEvalReport {
    fn new(value: f64, terms_used: usize, max_term_magnitude: f64) -> Self {
        Self {
            value,
            terms_used,
            max_term_magnitude,
            cancellation_flag: max_term_magnitude > CANCELLATION_RATIO * value.abs(),
        }
    }
}

fn base_of(order: f64, p: &QParams) -> (f64, f64) {
    let q2 = p.q() * p.q();
    (q2, p.q().powf(2.0 * order + 2.0))
}

/// `j_v(z, q^2)` for the order `v` in `p`.
pub fn jv(z: f64, p: &QParams) -> BesselEvalReport {
    hahn_exton(z, p.v(), p)
}

/// `j_v(q^n, q^2)` at an exact lattice point, for the order in `p`.
pub fn jv_lattice(n: i32, p: &QParams) -> f64 {
    hahn_exton_lattice(n, p.v(), p).value
}

/// `j_order(z, q^2)` for any real `z`; even in `z`.
pub fn hahn_exton(z: f64, order: f64, p: &QParams) -> BesselEvalReport {
    let (q2, b) = base_of(order, p);
    let x = q2 * z * z;
    if x <= 1.0 {
        power_series(x, q2, b, p.eps())
    } else {
        swapped_series(x, q2, b, p.eps())
    }
}

/// `j_order(q^n, q^2)` at the lattice point `q^n`.
pub fn hahn_exton_lattice(n: i32, order: f64, p: &QParams) -> BesselEvalReport {
    let (q2, b) = base_of(order, p);
    if n >= 0 {
        power_series(q2.powi(n + 1), q2, b, p.eps())
    } else {
        lattice_series((-n) as usize, q2, b, p.eps())
    }
}

fn power_series(x: f64, q2: f64, b: f64, eps: f64) -> BesselEvalReport {
    let mut term = 1.0f64;
    let mut sum = 1.0;
    let mut max_term = 1.0f64;
    let mut n = 0usize;
    let mut q2n = 1.0; // Q^n
    while n < MAX_TERMS {
        let prev = term.abs();
        term *= -q2n * x / ((1.0 - q2n * q2) * (1.0 - b * q2n));
        q2n *= q2;
        n += 1;
        sum += term;
        max_term = max_term.max(term.abs());
        if term.abs() < eps * max_term.max(1.0) && term.abs() <= prev {
            break;
        }
    }
    BesselEvalReport::new(sum, n + 1, max_term)
}

/// `ln|(y; Q)_inf|` and its sign.
fn ln_abs_poch_inf(y: f64, q2: f64, eps: f64) -> (f64, f64) {
    let cutoff = eps * (1.0 - q2);
    let mut ln = 0.0;
    let mut sign = 1.0;
    let mut f = y;
    while f.abs() >= cutoff {
        let factor = 1.0 - f;
        if factor == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln += factor.abs().ln();
        if factor < 0.0 {
            sign = -sign;
        }
        f *= q2;
    }
    (ln, sign)
}

/// Sums `(-1)^n Q^{n(n-1)/2} b^n / (Q;Q)_n * P_n` from `n = start`, where
/// `product(n)` returns `(ln|P_n|, sign P_n)`, then divides by `(b;Q)_inf`.
fn rearranged_sum(
    start: usize,
    q2: f64,
    b: f64,
    eps: f64,
    settled: impl Fn(usize) -> bool,
    product: impl Fn(usize) -> (f64, f64),
) -> BesselEvalReport {
    let ln_q2 = q2.ln();
    let ln_b = b.ln();
    // ln |Q^{n(n-1)/2} b^n / (Q;Q)_n| at n = start.
    let mut ln_coef = 0.0;
    for i in 0..start {
        ln_coef += i as f64 * ln_q2 + ln_b - (-q2.powi(i as i32 + 1)).ln_1p();
    }
    let mut sum = 0.0;
    let mut max_term = 0.0f64;
    let mut prev = f64::INFINITY;
    let mut n = start;
    let mut used = 0usize;
    while used < MAX_TERMS {
        let (ln_p, sign_p) = product(n);
        let parity = if n & 1 == 0 { 1.0 } else { -1.0 };
        let term = parity * sign_p * (ln_coef + ln_p).exp();
        sum += term;
        used += 1;
        max_term = max_term.max(term.abs());
        if settled(n) && term.abs() <= prev && term.abs() <= eps * max_term {
            break;
        }
        prev = term.abs();
        ln_coef += n as f64 * ln_q2 + ln_b - (-q2.powi(n as i32 + 1)).ln_1p();
        n += 1;
    }
    let norm = qpochhammer_inf(b, q2, eps);
    BesselEvalReport::new(sum / norm, used, max_term / norm)
}

/// `(y; Q)_inf` as a plain product.
fn poch_inf_linear(y: f64, q2: f64, eps: f64) -> f64 {
    let cutoff = eps * (1.0 - q2);
    let mut prod = 1.0;
    let mut f = y;
    while f.abs() >= cutoff {
        prod *= 1.0 - f;
        f *= q2;
    }
    prod
}

/// Linear-arithmetic version of the swapped sum. Avoids the rounding of
/// `exp(ln ...)` on large logarithms; `None` when an intermediate leaves the
/// normal range.
fn swapped_linear(x: f64, q2: f64, b: f64, eps: f64) -> Option<BesselEvalReport> {
    let mut coef = 1.0f64; // Q^{n(n-1)/2} b^n / (Q;Q)_n
    let mut q2n = 1.0f64;
    let mut sum = 0.0;
    let mut max_term = 0.0f64;
    let mut prev = f64::INFINITY;
    let mut used = 0usize;
    let mut n = 0usize;
    while used < MAX_TERMS {
        let p = poch_inf_linear(x * q2n, q2, eps);
        if !p.is_finite() {
            return None;
        }
        let parity = if n & 1 == 0 { 1.0 } else { -1.0 };
        let term = parity * coef * p;
        sum += term;
        used += 1;
        max_term = max_term.max(term.abs());
        if x * q2n <= 0.5 && term.abs() <= prev && term.abs() <= eps * max_term {
            break;
        }
        prev = term.abs();
        coef *= q2n * b / (1.0 - q2n * q2);
        q2n *= q2;
        n += 1;
        if coef != 0.0 && !coef.is_normal() {
            return None;
        }
    }
    if !(max_term.is_normal() && sum.is_finite()) {
        return None;
    }
    let norm = qpochhammer_inf(b, q2, eps);
    Some(BesselEvalReport::new(sum / norm, used, max_term / norm))
}

fn swapped_series(x: f64, q2: f64, b: f64, eps: f64) -> BesselEvalReport {
    if let Some(r) = swapped_linear(x, q2, b, eps) {
        return r;
    }
    rearranged_sum(
        0,
        q2,
        b,
        eps,
        |n| x * q2.powi(n as i32) <= 0.5,
        |n| ln_abs_poch_inf(x * q2.powi(n as i32), q2, eps),
    )
}

fn lattice_series(big_n: usize, q2: f64, b: f64, eps: f64) -> BesselEvalReport {
    // x = Q^{1-N}; (x Q^n; Q)_inf = (Q^{n+1-N}; Q)_inf vanishes for n < N.
    rearranged_sum(
        big_n,
        q2,
        b,
        eps,
        |_| true,
        |n| {
            let y = q2.powi((n + 1 - big_n) as i32);
            (qpochhammer_inf(y, q2, eps).ln(), 1.0)
        },
    )
}

/// Upper bound for `|j_v(q^n, q^2)|`:
/// `C = (-q^2; q^2)_inf (-q^{2v+2}; q^2)_inf / (q^{2v+2}; q^2)_inf`, times
/// `q^{n^2 + (2v+1) n}` when `n < 0`.
pub fn jv_bound(n: i32, p: &QParams) -> f64 {
    let (q2, b) = base_of(p.v(), p);
    let eps = p.eps();
    let c =
        qpochhammer_inf(-q2, q2, eps) * qpochhammer_inf(-b, q2, eps) / qpochhammer_inf(b, q2, eps);
    if n >= 0 {
        c
    } else {
        let n = n as f64;
        c * p.q().powf(n * n + (2.0 * p.v() + 1.0) * n)
    }
}

fn check_argument(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be a nonnegative real, got {value}"
        )))
    }
}

/// Closed form of `int_0^a j_v(yt) j_v(zt) t^{2v+1} d_q t`, `a = q^{a_exp}`:
///
/// ```text
/// (1-q)/(1-q^{2v+2}) a^{2v+2}
///   [y^2 j_{v+1}(ay) j_v(a z/q) - z^2 j_{v+1}(az) j_v(a y/q)] / (y^2 - z^2)
/// ```
pub fn product_integral_closed(y: f64, z: f64, a_exp: i32, p: &QParams) -> Result<f64> {
    check_argument("y", y)?;
    check_argument("z", z)?;
    let (y2, z2) = (y * y, z * z);
    if (y2 - z2).abs() <= DEGENERACY_THRESHOLD * y2.max(z2) {
        return Err(Error::DegenerateArguments { y, z });
    }
    let q = p.q();
    let v = p.v();
    let a = p.point(a_exp);
    let j0 = |s: f64| hahn_exton(s, v, p).value;
    let j1 = |s: f64| hahn_exton(s, v + 1.0, p).value;
    let prefactor = (1.0 - q) / (1.0 - q.powf(2.0 * v + 2.0)) * a.powf(2.0 * v + 2.0);
    let numerator = y2 * j1(a * y) * j0(a * z / q) - z2 * j1(a * z) * j0(a * y / q);
    Ok(prefactor * numerator / (y2 - z2))
}

/// [`product_integral_closed`] at lattice arguments `y = q^{ny}`,
/// `z = q^{nz}`, with every Bessel factor evaluated at an exact lattice point.
pub fn product_integral_closed_lattice(ny: i32, nz: i32, a_exp: i32, p: &QParams) -> Result<f64> {
    if ny == nz {
        let y = p.point(ny);
        return Err(Error::DegenerateArguments { y, z: y });
    }
    let q = p.q();
    let v = p.v();
    let j0 = |n: i32| hahn_exton_lattice(n, v, p).value;
    let j1 = |n: i32| hahn_exton_lattice(n, v + 1.0, p).value;
    let (y2, z2) = (p.point(2 * ny), p.point(2 * nz));
    let prefactor = (1.0 - q) / (1.0 - q.powf(2.0 * v + 2.0)) * p.point(a_exp).powf(2.0 * v + 2.0);
    let numerator =
        y2 * j1(a_exp + ny) * j0(a_exp + nz - 1) - z2 * j1(a_exp + nz) * j0(a_exp + ny - 1);
    Ok(prefactor * numerator / (y2 - z2))
}

/// Jackson sum `(1-q) a^{2v+2} sum_{m<depth} q^{m(2v+2)} j_v(y a q^m) j_v(z a q^m)`.
/// Valid for every `y`, `z`, including `y = z`.
pub fn product_integral_direct(y: f64, z: f64, a_exp: i32, p: &QParams, depth: usize) -> f64 {
    (0..depth as i32)
        .map(|m| {
            let t = p.point(a_exp + m);
            p.weight(a_exp + m) * jv(y * t, p).value * jv(z * t, p).value
        })
        .sum()
}

// Reference values keep every digit the high-precision oracle printed.
#[allow(clippy::excessive_precision)]
#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn params(q: f64, v: f64) -> QParams {
        QParams::new(q, v).unwrap()
    }

    // Reference values: 400-digit evaluation of the defining power series.
    #[test]
    fn matches_high_precision_series() {
        let cases = [
            (1.0, 0.5, 0.0, 0.58665286961127967697),
            (8.0, 0.5, -0.5, -0.0045841296478146827801),
            (0.3, 0.5, 0.0, 0.96025562861235269471),
            (2.7, 0.5, 0.0, -0.75219831025989306055),
            (10.3, 0.5, 0.0, -70.499980381841482655),
            (100.7, 0.5, 0.0, 56862999413.07163293),
            (1.7, 0.3, 1.5, 0.7202287296654034413),
            (25.0, 0.3, 1.5, 117.01924797256562582),
            (3.3, 0.8, -0.5, -11.633942238401146365),
            (40.0, 0.8, 0.0, 1.0369216987085065764e23),
        ];
        for (z, q, v, expected) in cases {
            let r = jv(z, &params(q, v));
            assert_relative_eq!(r.value, expected, max_relative = 1e-12);
            assert!(!r.cancellation_flag, "z={z} q={q} v={v}");
        }
    }

    #[test]
    fn lattice_points_match_high_precision_series() {
        let cases = [
            (-1, 0.5, 0.0, -0.30420337280768326198),
            (-3, 0.5, -0.5, -0.0045841296478146827801),
            (-10, 0.5, 0.0, 1.1188518365862016749e-33),
            (-20, 0.5, -0.5, 9.2331538061513628664e-121),
            (-6, 0.3, 1.5, 4.2504632342880863623e-32),
            (-6, 0.8, 0.0, 0.00068868876656881796791),
            (-30, 0.5, -0.5, 2.35830928042734736e-139),
        ];
        for (n, q, v, expected) in cases {
            let r = hahn_exton_lattice(n, v, &params(q, v));
            assert_relative_eq!(r.value, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn value_at_zero_is_one() {
        let r = jv(0.0, &params(0.5, 0.3));
        assert_eq!(r.value, 1.0);
        assert!(!r.cancellation_flag);
    }

    #[test]
    fn lattice_and_generic_paths_agree_where_well_conditioned() {
        for &(q, v) in &[(0.3, -0.5), (0.5, 0.0), (0.8, 1.5)] {
            let p = params(q, v);
            for n in -2..25 {
                let lat = jv_lattice(n, &p);
                let gen = jv(p.point(n), &p).value;
                assert!(
                    (lat - gen).abs() <= 1e-12 * (1.0 + lat.abs()),
                    "n={n} {lat} {gen}"
                );
            }
        }
    }

    #[test]
    fn naive_series_loses_the_lattice_values() {
        // The raw power series at z = q^{-10} is dominated by terms ~1e26 and
        // cannot resolve a value of order 1e-33; the report must say so.
        let p = params(0.5, 0.0);
        let naive = power_series(p.q().powi(2) * p.point(-10).powi(2), 0.25, 0.25, p.eps());
        assert!(naive.cancellation_flag);
        assert!(naive.max_term_magnitude > 1e20);
    }

    #[test]
    fn even_in_argument() {
        let p = params(0.5, 0.7);
        for &z in &[0.1, 1.0, 3.7, 55.0] {
            assert_eq!(jv(z, &p), jv(-z, &p));
        }
    }

    #[test]
    fn tighter_truncation_changes_little() {
        for &z in &[0.4, 1.9, 7.5, 130.0] {
            let coarse = jv(z, &QParams::with_eps(0.5, 0.0, 1e-14).unwrap());
            let fine = jv(z, &QParams::with_eps(0.5, 0.0, 1e-24).unwrap());
            assert!(fine.terms_used >= coarse.terms_used);
            assert!((coarse.value - fine.value).abs() <= 10.0 * 1e-14 * fine.value.abs());
        }
    }

    #[test]
    fn bound_examples() {
        let p = params(0.5, 0.0);
        let q2: f64 = 0.25;
        let c = qpochhammer_inf(-q2, q2, 1e-16) * qpochhammer_inf(-q2, q2, 1e-16)
            / qpochhammer_inf(q2, q2, 1e-16);
        assert_relative_eq!(jv_bound(0, &p), c, max_relative = 1e-13);
        assert_eq!(jv_bound(5, &p), jv_bound(0, &p));
        assert_relative_eq!(
            jv_bound(-2, &p),
            0.25 * jv_bound(0, &p),
            max_relative = 1e-15
        );
    }

    #[test]
    fn bound_holds_on_lattice() {
        for &q in &[0.3, 0.5, 0.8] {
            for &v in &[-0.5, 0.0, 1.5] {
                let p = params(q, v);
                for n in -6..=20 {
                    let j = jv_lattice(n, &p).abs();
                    assert!(j <= jv_bound(n, &p) + 1e-12, "q={q} v={v} n={n}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let p = params(0.5, 0.0);
        let closed = product_integral_closed(1.0, 0.5, 0, &p).unwrap();
        let direct = product_integral_direct(1.0, 0.5, 0, &p, 300);
        assert_relative_eq!(closed, direct, max_relative = 1e-9);
        // 60-digit Jackson sum.
        assert_relative_eq!(direct, 0.410108708702517835, max_relative = 1e-13);

        let closed = product_integral_closed(2.0, 0.25, 2, &p).unwrap();
        assert_relative_eq!(closed, 0.037973581581098371008, max_relative = 1e-12);

        assert_eq!(
            product_integral_closed(1.0, 1.0, 0, &p),
            Err(Error::DegenerateArguments { y: 1.0, z: 1.0 })
        );
        assert!(product_integral_closed(1.0, 1.0 + 1e-11, 0, &p).is_err());
        assert!(product_integral_closed(-1.0, 1.0, 0, &p).is_err());
        assert!(product_integral_closed(0.0, 0.0, 0, &p).is_err());
        assert!(product_integral_closed(0.0, 1.0, 0, &p).is_ok());
    }

    #[test]
    fn lattice_closed_form_matches_generic() {
        let p = params(0.5, -0.5);
        for &(ny, nz, a) in &[(0, 1, 0), (-1, 2, 2), (3, -2, -1), (5, 9, 0)] {
            let lat = product_integral_closed_lattice(ny, nz, a, &p).unwrap();
            let gen = product_integral_closed(p.point(ny), p.point(nz), a, &p).unwrap();
            assert!(
                (lat - gen).abs() <= 1e-12 * (1.0 + gen.abs()),
                "{ny} {nz} {a}"
            );
        }
        assert!(product_integral_closed_lattice(2, 2, 0, &p).is_err());
    }

    #[test]
    fn direct_sum_converges_with_depth() {
        let p = params(0.5, 0.0);
        let a = product_integral_direct(1.0, 0.5, 0, &p, 200);
        let b = product_integral_direct(1.0, 0.5, 0, &p, 400);
        assert!((a - b).abs() <= 1e-12 * b.abs());
        let a = product_integral_direct(1.0, 1.0, 0, &p, 100);
        let b = product_integral_direct(1.0, 1.0, 0, &p, 200);
        assert!((a - b).abs() <= 1e-12 * b.abs());
        // a -> 0 kills the prefactor.
        assert!(product_integral_direct(1.0, 0.5, 200, &p, 10).abs() < 1e-50);
    }

    #[test]
    fn closed_form_matches_direct_on_random_pairs() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for &(q, v) in &[(0.3, 0.0), (0.5, -0.5), (0.8, 1.5)] {
            let p = params(q, v);
            let mut done = 0;
            while done < 50 {
                let y = q.powf(rng.gen_range(-3.0..6.0));
                let z = q.powf(rng.gen_range(-3.0..6.0));
                let Ok(closed) = product_integral_closed(y, z, 0, &p) else {
                    continue;
                };
                let direct = product_integral_direct(y, z, 0, &p, 300);
                assert!(
                    (closed - direct).abs() <= 1e-9 * (1.0 + direct.abs()),
                    "{q} {v} {y} {z}"
                );
                done += 1;
            }
        }
    }
}
