//! Wigner small-d rotation matrix elements.
//!
//! `d^j_{a,b}(theta) = <j,a| exp(-i theta J_y) |j,b>` in the standard
//! convention, evaluated through the Jacobi-polynomial representation. The
//! factorial prefactor and the half-angle powers are combined in log space so
//! that large spins neither overflow nor underflow before the final product.
//!
//! A beam splitter `exp(i theta J_x)` has matrix elements
//! `(-i)^(a-b) d^j_{a,b}(theta)`, so the magnitudes coincide.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::spin::{HalfInt, SpinRange};

const LN_FACTORIAL_TABLE: usize = 2 * crate::spin::MAX_PHOTONS as usize + 1;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACTORIAL_TABLE + 1);
        // Kahan-compensated running sum of ln(i).
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        table.push(0.0);
        for i in 1..=LN_FACTORIAL_TABLE {
            let y = (i as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            table.push(sum);
        }
        table
    })
}

/// `ln(n!)`.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut f = 1u64;
        for i in 2..=n {
            f *= i;
        }
        return (f as f64).ln();
    }
    let table = ln_factorial_table();
    if let Some(&v) = table.get(n as usize) {
        return v;
    }
    // Stirling series; the first omitted term is below 1e-20 here.
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

fn log_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// Generalized binomial coefficient `C(top, k)` for any integer `top`.
fn binomial_general(top: i64, k: u64) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (top - i as i64) as f64 / (i + 1) as f64;
    }
    acc
}

fn jacobi_explicit(n: u32, alpha: i32, beta: i32, x: f64) -> f64 {
    let n64 = i64::from(n);
    let lo = (x - 1.0) / 2.0;
    let hi = (x + 1.0) / 2.0;
    (0..=n)
        .map(|s| {
            binomial_general(n64 + i64::from(alpha), u64::from(n - s))
                * binomial_general(n64 + i64::from(beta), u64::from(s))
                * lo.powi(s as i32)
                * hi.powi((n - s) as i32)
        })
        .sum()
}

/// Jacobi polynomial `P_n^{(alpha, beta)}(x)` by the three-term recurrence in `n`.
///
/// Parameter pairs for which the recurrence hits a zero denominator (possible
/// only when `alpha + beta` is negative) fall back to the explicit sum.
pub fn jacobi_poly(n: u32, alpha: i32, beta: i32, x: f64) -> f64 {
    let a = f64::from(alpha);
    let b = f64::from(beta);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = f64::from(k);
        let s = 2.0 * k + a + b;
        let denom = 2.0 * k * (k + a + b) * (s - 2.0);
        if denom == 0.0 {
            return jacobi_explicit(n, alpha, beta, x);
        }
        let next = ((s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * cur
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// A validated request for `d^j_{a,b}(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DElementQuery {
    j: HalfInt,
    a: HalfInt,
    b: HalfInt,
    theta: f64,
}

impl DElementQuery {
    pub fn new(j: HalfInt, a: HalfInt, b: HalfInt, theta: f64) -> Result<Self> {
        let range = SpinRange::new(j)?;
        range.check(a)?;
        range.check(b)?;
        if !theta.is_finite() {
            return Err(Error::NonFiniteAngle(theta));
        }
        Ok(DElementQuery { j, a, b, theta })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn a(&self) -> HalfInt {
        self.a
    }

    pub fn b(&self) -> HalfInt {
        self.b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eval(&self) -> Result<f64> {
        eval_query(self)
    }
}

/// `d^j_{a,b}(theta)`; see [`DElementQuery`] for the argument constraints.
pub fn d_element(j: HalfInt, a: HalfInt, b: HalfInt, theta: f64) -> Result<f64> {
    DElementQuery::new(j, a, b, theta)?.eval()
}

fn eval_query(q: &DElementQuery) -> Result<f64> {
    // Integer offsets from -j: all of these are exact.
    let jp_a = (q.j + q.a).twice() / 2;
    let jm_a = (q.j - q.a).twice() / 2;
    let jp_b = (q.j + q.b).twice() / 2;
    let jm_b = (q.j - q.b).twice() / 2;
    let two_j = q.j.twice();
    let a_minus_b = (q.a - q.b).twice() / 2;

    // Branch on the smallest of the four offsets; it becomes the Jacobi
    // degree and leaves both Jacobi parameters non-negative.
    let degree = jp_a.min(jm_a).min(jp_b).min(jm_b);
    let (sin_pow, sign_flip) = if degree == jp_b || degree == jm_a {
        (a_minus_b, a_minus_b)
    } else {
        (-a_minus_b, 0)
    };
    let cos_pow = two_j - 2 * degree - sin_pow;
    debug_assert!(degree >= 0 && cos_pow >= 0);

    if q.theta == 0.0 {
        return Ok(if q.a == q.b { 1.0 } else { 0.0 });
    }

    let half = q.theta / 2.0;
    let (s, c) = half.sin_cos();
    let x = q.theta.cos().clamp(-1.0, 1.0);

    if (sin_pow > 0 && s == 0.0) || (cos_pow > 0 && c == 0.0) {
        return Ok(0.0);
    }

    let p = jacobi_poly(degree as u32, sin_pow, cos_pow, x);
    if !p.is_finite() {
        return Err(Error::Overflow("Jacobi polynomial"));
    }
    if p == 0.0 {
        return Ok(0.0);
    }

    // The binomial ratio is exactly one when sin_pow vanishes.
    let log_ratio = if sin_pow == 0 {
        0.0
    } else {
        0.5 * (log_binomial((two_j - degree) as u64, (degree + sin_pow) as u64)
            - log_binomial((degree + cos_pow) as u64, cos_pow as u64))
    };
    let mut log_mag = log_ratio + p.abs().ln();
    let mut negative = p < 0.0;
    if sin_pow > 0 {
        log_mag += f64::from(sin_pow) * s.abs().ln();
        negative ^= s < 0.0 && sin_pow % 2 == 1;
    }
    if cos_pow > 0 {
        log_mag += f64::from(cos_pow) * c.abs().ln();
        negative ^= c < 0.0 && cos_pow % 2 == 1;
    }
    negative ^= sign_flip.rem_euclid(2) == 1;

    let mag = log_mag.exp();
    Ok(if negative { -mag } else { mag })
}

/// `d^k_{k,k}(theta) = cos(theta / 2)^{2k}`, the amplitude for every photon of
/// mode `a` surviving the loss beam splitter.
pub fn corner_element(k: HalfInt, theta: f64) -> f64 {
    let c = (theta / 2.0).cos();
    if k.twice() == 0 {
        return 1.0;
    }
    let n = f64::from(k.twice());
    if c == 0.0 {
        return 0.0;
    }
    let mag = (n * c.abs().ln()).exp();
    if c < 0.0 && k.twice() % 2 == 1 {
        -mag
    } else {
        mag
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn hi(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn log_factorial_small() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert_relative_eq!(log_factorial(10), 3_628_800f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn log_factorial_matches_exact_product_to_twenty() {
        let mut f: u64 = 1;
        for n in 1..=20u64 {
            f *= n;
            assert_relative_eq!(log_factorial(n), (f as f64).ln(), max_relative = 1e-14);
        }
    }

    #[test]
    fn log_factorial_table_and_stirling_agree() {
        // Just past the table end the Stirling branch takes over.
        let n = LN_FACTORIAL_TABLE as u64;
        let stepped = log_factorial(n) + ((n + 1) as f64).ln();
        assert_relative_eq!(log_factorial(n + 1), stepped, max_relative = 1e-13);
        // Summation oracle for a mid-size argument.
        let direct: f64 = (1..=500u64).map(|i| (i as f64).ln()).sum();
        assert_relative_eq!(log_factorial(500), direct, max_relative = 1e-12);
    }

    #[test]
    fn jacobi_low_degree() {
        assert_eq!(jacobi_poly(0, 3, -1, 0.3), 1.0);
        for &x in &[-1.0, -0.4, 0.0, 0.77, 1.0] {
            assert_relative_eq!(jacobi_poly(1, 0, 0, x), x, epsilon = 1e-15);
            // Legendre P_2
            assert_relative_eq!(jacobi_poly(2, 0, 0, x), 1.5 * x * x - 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn jacobi_degree_two_hand_value() {
        // P_2^{(1,1)}(x) = (15 x^2 - 3) / 4
        assert_relative_eq!(jacobi_poly(2, 1, 1, 0.0), -0.75, epsilon = 1e-15);
        assert_relative_eq!(jacobi_poly(2, 1, 1, 0.5), (15.0 * 0.25 - 3.0) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_recurrence_matches_explicit_sum() {
        for n in 0..12 {
            for alpha in 0..6 {
                for beta in 0..6 {
                    for &x in &[-0.9, -0.2, 0.35, 0.8] {
                        let r = jacobi_poly(n, alpha, beta, x);
                        let e = jacobi_explicit(n, alpha, beta, x);
                        assert!((r - e).abs() <= 1e-10 * e.abs().max(1.0), "n={n} a={alpha} b={beta}");
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_degenerate_parameters_use_explicit_sum() {
        // alpha + beta = -2 zeroes the n = 2 recurrence denominator.
        let v = jacobi_poly(2, -1, -1, 0.3);
        assert_relative_eq!(v, jacobi_explicit(2, -1, -1, 0.3), epsilon = 1e-15);
        assert!(v.is_finite());
    }

    #[test]
    fn spin_half_elements() {
        let t = PI / 2.0;
        let h = hi(1);
        assert_relative_eq!(d_element(h, h, h, t).unwrap(), (PI / 4.0).cos(), epsilon = 1e-15);
        assert_relative_eq!(d_element(h, -h, h, t).unwrap(), (PI / 4.0).sin(), epsilon = 1e-15);
        assert_relative_eq!(d_element(h, h, -h, t).unwrap(), -(PI / 4.0).sin(), epsilon = 1e-15);
    }

    #[test]
    fn spin_one_closed_forms() {
        let t: f64 = 0.83;
        let (c, s) = (t.cos(), t.sin());
        let one = hi(2);
        let z = HalfInt::ZERO;
        let cases = [
            (one, one, (1.0 + c) / 2.0),
            (one, z, -s / 2f64.sqrt()),
            (one, -one, (1.0 - c) / 2.0),
            (z, z, c),
            (z, one, s / 2f64.sqrt()),
            (-one, one, (1.0 - c) / 2.0),
        ];
        for (a, b, want) in cases {
            assert_relative_eq!(d_element(one, a, b, t).unwrap(), want, epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_rotation() {
        for two_j in 0..=16 {
            let r = SpinRange::new(hi(two_j)).unwrap();
            for a in r.iter() {
                for b in r.iter() {
                    let d = d_element(r.j(), a, b, 0.0).unwrap();
                    assert_eq!(d, if a == b { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn corner_is_power_of_half_angle_cosine() {
        // cos^2(theta/2) = 0.7 at k = 1 gives 0.7.
        let theta = 2.0 * 0.7f64.sqrt().acos();
        assert_relative_eq!(d_element(hi(2), hi(2), hi(2), theta).unwrap(), 0.7, epsilon = 1e-14);
        for two_k in 0..=24 {
            for &t in &[0.1f64, 0.7, 1.9, 3.0] {
                let k = hi(two_k);
                let want = (t / 2.0).cos().powi(two_k);
                assert!((d_element(k, k, k, t).unwrap() - want).abs() <= 1e-12);
                assert!((corner_element(k, t) - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(matches!(
            d_element(hi(2), hi(4), hi(0), 0.3),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            d_element(hi(2), hi(1), hi(0), 0.3),
            Err(Error::IndexParity { .. })
        ));
        assert!(d_element(hi(2), hi(0), hi(0), f64::NAN).is_err());
    }

    #[test]
    fn rows_are_normalized_and_symmetry_holds() {
        for two_j in 0..=24 {
            let r = SpinRange::new(hi(two_j)).unwrap();
            for &t in &[0.1, 0.7, PI / 2.0, 2.5, PI] {
                for a in r.iter() {
                    let mut norm = 0.0;
                    for b in r.iter() {
                        let d = d_element(r.j(), a, b, t).unwrap();
                        norm += d * d;
                        let sign = if ((a - b).twice() / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        let swapped = d_element(r.j(), b, a, t).unwrap();
                        assert!((d - sign * swapped).abs() <= 1e-10);
                    }
                    assert!((norm - 1.0).abs() <= 1e-10, "2j={two_j} a={a} t={t}: {norm}");
                }
            }
        }
    }

    #[test]
    fn negative_angle_is_transpose() {
        let r = SpinRange::new(hi(5)).unwrap();
        for a in r.iter() {
            for b in r.iter() {
                let fwd = d_element(r.j(), a, b, -0.9).unwrap();
                let back = d_element(r.j(), b, a, 0.9).unwrap();
                assert!((fwd - back).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn large_spin_stays_bounded() {
        let j = hi(800);
        let r = SpinRange::new(j).unwrap();
        let mut norm = 0.0;
        for b in r.iter() {
            let d = d_element(j, hi(200), b, 0.4).unwrap();
            assert!(d.is_finite() && d.abs() <= 1.0 + 1e-12);
            norm += d * d;
        }
        assert!((norm - 1.0).abs() < 1e-8, "{norm}");
    }
}
