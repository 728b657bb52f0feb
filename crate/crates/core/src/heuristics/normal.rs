use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::HeuristicError;

fn standard() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

pub fn std_cdf(z: f64) -> f64 {
    standard().cdf(z)
}

pub fn std_pdf(z: f64) -> f64 {
    standard().pdf(z)
}

pub fn std_quantile(q: f64) -> Result<f64, HeuristicError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(HeuristicError::InvalidQuantile(q));
    }
    Ok(standard().inverse_cdf(q))
}

/// Inverse CDF of `N(mean, std)`.
pub fn normal_quantile(mean: f64, std: f64, q: f64) -> Result<f64, HeuristicError> {
    Ok(mean + std * std_quantile(q)?)
}

/// Expected shortfall `E[D - s]+` for `D ~ N(mean, std)`.
pub fn normal_loss(mean: f64, std: f64, s: f64) -> f64 {
    if std <= 0.0 {
        return (mean - s).max(0.0);
    }
    let z = (s - mean) / std;
    if z <= 3.0 {
        return std * (std_pdf(z) - z * standard().sf(z));
    }
    // Upper tail: Mills-ratio continued fraction avoids the cancellation.
    let mut t = 0.0;
    for k in (2..=60).rev() {
        t = k as f64 / (z + t);
    }
    let t = 1.0 / (z + t);
    std * std_pdf(z) * t / (z + t)
}

/// Smallest `s` with `normal_loss(mean, std, s) <= y`, by bisection.
pub fn inverse_normal_loss(mean: f64, std: f64, y: f64) -> Result<f64, HeuristicError> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(HeuristicError::InvalidQuantile(y));
    }
    if std <= 0.0 {
        return Ok(mean - y);
    }
    // Q(s) >= mean - s, so the answer is above mean - y; Q decays to 0 upward.
    let mut lo = mean - y - std;
    let mut hi = mean + std;
    while normal_loss(mean, std, hi) > y {
        hi += 2.0 * (hi - mean).abs().max(std);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_loss(mean, std, mid) <= y {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(hi)
}

/// Newsvendor order-up-to level `F^-1(b/(b+h))` for demand over `L + 1`
/// periods with per-period `N(mu, sigma)`.
pub fn analytic_order_up_to(mu: f64, sigma: f64, lead: usize, b: f64, h: f64) -> Result<f64, HeuristicError> {
    if !(sigma > 0.0) {
        return Err(HeuristicError::Params(format!("sigma must be positive, got {sigma}")));
    }
    let ratio = b / (b + h);
    let periods = (lead + 1) as f64;
    normal_quantile(mu * periods, sigma * periods.sqrt(), ratio)
}
