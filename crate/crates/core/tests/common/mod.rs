//! Reference values computed independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gamma by upward recurrence to x >= 20 followed by the Stirling series.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let mut shift = 1.0;
    let mut y = x;
    while y < 20.0 {
        shift *= y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k (2k-1) y^{2k-1})
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    let ln = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series;
    ln.exp() / shift
}

/// erf by its Maclaurin series (|x| <= 3) or the continued fraction for erfc.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x * x / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return 1.0 - 2.0 / PI.sqrt() * sum;
    }
    // Lentz evaluation of erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..200 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        d = 1.0 / d;
        c = x + a / c;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

/// `E_{1/2}(z) = e^{z^2} erfc(-z)`.
pub fn ml_half(z: f64) -> f64 {
    (z * z).exp() * erfc(-z)
}

/// Analytic solution of `D y = 0.9 y` with sigma = 1, rho = alpha = 1/2: `b0 e^{-t^{1/2}} E_{1/2}(0.9 t^{1/4})`.
pub fn stability_solution(b0: f64, t: f64) -> f64 {
    b0 * (-t.sqrt()).exp() * ml_half(0.9 * t.powf(0.25))
}

/// `Gamma(beta+1)/Gamma(alpha+beta+1) e^{-sigma t^rho} (t^rho - a^rho)^{alpha+beta}`.
pub fn power_integral(sigma: f64, rho: f64, alpha: f64, beta: f64, a: f64, t: f64) -> f64 {
    let u = t.powf(rho);
    let d = u - a.powf(rho);
    gamma(beta + 1.0) / gamma(alpha + beta + 1.0) * (-sigma * u).exp() * d.powf(alpha + beta)
}

/// `Gamma(beta+1)/Gamma(beta-alpha+1) e^{-sigma t^rho} (t^rho - a^rho)^{beta-alpha}`.
pub fn power_derivative(sigma: f64, rho: f64, alpha: f64, beta: f64, a: f64, t: f64) -> f64 {
    let u = t.powf(rho);
    let d = u - a.powf(rho);
    gamma(beta + 1.0) / gamma(beta - alpha + 1.0) * (-sigma * u).exp() * d.powf(beta - alpha)
}

/// Least-squares slope of `ln err` against `ln n`, negated.
pub fn observed_order(ns: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -num / den
}
