//! Double-precision special constants and functions for the numeric prefactor
//! route: zeta values, the Euler-Mascheroni constant, digamma/polygamma, and
//! the log-gamma function. Everything is self-contained series/asymptotics;
//! no external dependency.

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bernoulli numbers B_2, B_4, ... B_16 for Euler-Maclaurin tails.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta at integer s >= 2 by direct sum plus Euler-Maclaurin tail.
pub fn zeta(s: u32) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Hurwitz zeta `sum_{n>=0} (n+a)^{-s}` for integer `s >= 2`, `a > 0`.
pub fn hurwitz_zeta(s: u32, a: f64) -> f64 {
    debug_assert!(s >= 2 && a > 0.0);
    let s = s as f64;
    let cut = 24.0f64.max(a);
    let mut sum = 0.0;
    let mut n = a;
    while n < cut {
        sum += n.powf(-s);
        n += 1.0;
    }
    // Euler-Maclaurin tail from the first excluded point upward
    let x0 = n;
    let mut tail = x0.powf(1.0 - s) / (s - 1.0) + 0.5 * x0.powf(-s);
    let mut factor = s * x0.powf(-s - 1.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k2 = 2 * k as u32 + 2;
        tail += b / factorial(k2) as f64 * factor * rising_chunk(s, k2 - 1);
        factor /= x0 * x0;
    }
    sum + tail
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

/// `(s+1)(s+2)...(s+k-1)` correction for the Euler-Maclaurin derivatives.
fn rising_chunk(s: f64, k: u32) -> f64 {
    (1..k).fold(1.0, |acc, j| acc * (s + j as f64))
}

/// Digamma by recurrence lift and the asymptotic series
/// `psi(x) ~ ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k})`.
pub fn digamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = x.ln() - 0.5 * inv;
    let mut p = inv2;
    for (k, b) in BERNOULLI[..6].iter().enumerate() {
        series -= b / (2.0 * (k as f64 + 1.0)) * p;
        p *= inv2;
    }
    acc + series
}

/// Polygamma `psi^{(n)}(x)` for `n >= 1`: `(-1)^{n+1} n! zeta(n+1, x)`.
pub fn polygamma(n: u32, x: f64) -> f64 {
    debug_assert!(n >= 1);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * factorial(n) as f64 * hurwitz_zeta(n + 1, x)
}

/// Log-gamma for positive arguments: recurrence lift plus Stirling series.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut s = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let mut p = inv;
    for (k, b) in BERNOULLI[..6].iter().enumerate() {
        let k2 = 2.0 * (k as f64 + 1.0);
        s += b / (k2 * (k2 - 1.0)) * p;
        p *= inv2;
    }
    acc + s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert!((zeta(2) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta(3) - 1.2020569031595942854).abs() < 1e-14);
        assert!((zeta(4) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(10) - 1.0009945751278180853).abs() < 1e-15);
    }

    #[test]
    fn digamma_known_points() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-14);
        // psi(1/2) = -gamma - 2 ln 2
        assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-13);
        // psi(2) = 1 - gamma
        assert!((digamma(2.0) - (1.0 - EULER_GAMMA)).abs() < 1e-14);
    }

    #[test]
    fn polygamma_known_points() {
        // psi'(1) = zeta(2), psi'(1/2) = pi^2/2
        assert!((polygamma(1, 1.0) - zeta(2)).abs() < 1e-13);
        assert!((polygamma(1, 0.5) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
        // psi''(1) = -2 zeta(3)
        assert!((polygamma(2, 1.0) + 2.0 * zeta(3)).abs() < 1e-12);
    }

    #[test]
    fn ln_gamma_known_points() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(6.0) - 120f64.ln()).abs() < 1e-13);
    }
}
