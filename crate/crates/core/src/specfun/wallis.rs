use std::f64::consts::PI;

/// `∫₀^π sinⁿθ dθ` by the recurrence `W(n) = (n−1)/n · W(n−2)`.
pub fn wallis(n: usize) -> f64 {
    let mut value = if n % 2 == 0 { PI } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        value *= (k as f64 - 1.0) / k as f64;
        k += 2;
    }
    value
}
