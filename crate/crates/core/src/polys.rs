//! Laguerre and Jacobi polynomial evaluation by three-term recurrence, with
//! derivative relations. The explicit binomial sums survive as cross-checks
//! for small degrees; recurrences stay stable to degree ~50.

use crate::special::{ln_gamma, pochhammer};

/// Generalized Laguerre L_n^{(g)}(x) by recurrence.
pub fn laguerre(n: usize, g: f64, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => g + 1.0 - x,
        _ => {
            let mut pm1 = 1.0;
            let mut p = g + 1.0 - x;
            for k in 1..n {
                let kf = k as f64;
                let next = ((2.0 * kf + g + 1.0 - x) * p - (kf + g) * pm1) / (kf + 1.0);
                pm1 = p;
                p = next;
            }
            p
        }
    }
}

/// d/dx L_n^{(g)} = -L_{n-1}^{(g+1)}
pub fn laguerre_deriv(n: usize, g: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre(n - 1, g + 1.0, x)
    }
}

pub fn laguerre_deriv2(n: usize, g: f64, x: f64) -> f64 {
    if n < 2 {
        0.0
    } else {
        laguerre(n - 2, g + 2.0, x)
    }
}

/// Explicit sum L_n^{(g)}(x) = sum_k (-1)^k C(n+g, n-k) x^k / k! (cross-check, small n).
pub fn laguerre_explicit(n: usize, g: f64, x: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..=n {
        // C(n+g, n-k) = Gamma(n+g+1) / (Gamma(g+k+1) (n-k)!)
        let ln_c = ln_gamma(n as f64 + g + 1.0)
            - ln_gamma(g + k as f64 + 1.0)
            - ln_gamma((n - k) as f64 + 1.0);
        let ln_k = ln_gamma(k as f64 + 1.0);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * (ln_c - ln_k).exp() * x.powi(k as i32);
    }
    s
}

/// Standard Jacobi P_n^{(a,b)}(u) on [-1,1] by recurrence.
pub fn jacobi(n: usize, a: f64, b: f64, u: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 0.5 * (a + b + 2.0) * u + 0.5 * (a - b),
        _ => {
            let mut pm1 = 1.0;
            let mut p = 0.5 * (a + b + 2.0) * u + 0.5 * (a - b);
            for k in 2..=n {
                let kf = k as f64;
                let c = 2.0 * kf + a + b;
                let a1 = 2.0 * kf * (kf + a + b) * (c - 2.0);
                let a2 = (c - 1.0) * (a * a - b * b);
                let a3 = (c - 2.0) * (c - 1.0) * c;
                let a4 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * c;
                let next = ((a2 + a3 * u) * p - a4 * pm1) / a1;
                pm1 = p;
                p = next;
            }
            p
        }
    }
}

/// d/du P_n^{(a,b)}(u) = (n+a+b+1)/2 P_{n-1}^{(a+1,b+1)}(u)
pub fn jacobi_deriv(n: usize, a: f64, b: f64, u: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + a + b + 1.0) * jacobi(n - 1, a + 1.0, b + 1.0, u)
    }
}

pub fn jacobi_deriv2(n: usize, a: f64, b: f64, u: f64) -> f64 {
    if n < 2 {
        0.0
    } else {
        0.25 * (n as f64 + a + b + 1.0) * (n as f64 + a + b + 2.0)
            * jacobi(n - 2, a + 2.0, b + 2.0, u)
    }
}

/// Squared L2 norm of P_n^{(a,b)} under (1-u)^a (1+u)^b on [-1,1].
pub fn jacobi_norm_sq(n: usize, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    ((a + b + 1.0) * (2.0f64).ln() + ln_gamma(nf + a + 1.0) + ln_gamma(nf + b + 1.0)
        - ln_gamma(nf + a + b + 1.0)
        - ln_gamma(nf + 1.0))
    .exp()
        / (2.0 * nf + a + b + 1.0)
}

/// The shifted-Jacobi sum of the semigroup literature (families indexed by
/// (l, mu) with weight x^{mu-1}(1-x)^{l-mu-1} on (0,1)), unnormalized:
/// `p_n(x) = sum_k [(-1)^{n+k}/(n-k)!] [(l-1)_{n+k}/(l-1)_n] [(mu)_n/(mu)_k] x^k/k!`.
///
/// Equals `jacobi(n, l-mu-1, mu-1, 2x-1)`; kept as the small-n cross-check.
pub fn jacobi_sum_explicit(n: usize, l: f64, mu: f64, x: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..=n {
        let sign = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
        let t = sign / (ln_gamma((n - k) as f64 + 1.0)).exp()
            * (pochhammer(l - 1.0, n + k) / pochhammer(l - 1.0, n))
            * (pochhammer(mu, n) / pochhammer(mu, k))
            * x.powi(k as i32)
            / (ln_gamma(k as f64 + 1.0)).exp();
        s += t;
    }
    s
}
