//! Closed-form eigenvalues and critical points for the two-qubit seeds.

use std::f64::consts::FRAC_PI_4;

use crate::error::{check_range, Result};

fn root_term(lambda: f64) -> f64 {
    ((1.0 - lambda) * (1.0 + 3.0 * lambda)).max(0.0).sqrt()
}

/// Round-one PB marginal maxima `(e_A3, e_A1)` for the `|phi+>` seed.
pub fn analytic_maxent_eigs(lambda: f64) -> (f64, f64) {
    let inner = (1.0 - lambda) * (1.0 + lambda + root_term(lambda));
    let e_a3 = 0.5 + std::f64::consts::SQRT_2 / 4.0 * inner.max(0.0).sqrt();
    let e_a1 = 0.5 * (1.0 + lambda);
    (e_a3, e_a1)
}

/// Round-one PB GGM of the `|phi+>` seed: the `A_3` branch below
/// `lambda = 2/3`, the `A_1` branch above.
pub fn analytic_ggm_curve_maxent(lambda: f64) -> f64 {
    let (e3, e1) = analytic_maxent_eigs(lambda);
    if lambda < 2.0 / 3.0 {
        1.0 - e3
    } else {
        1.0 - e1
    }
}

/// Round-one PB marginal maxima `(e_A3, e_A1)` for `cos z|00> + sin z|11>`
/// with auxiliary polar angle `theta1`.
pub fn analytic_nme_eigs(z: f64, lambda: f64, theta1: f64) -> (f64, f64) {
    let (c2, c4) = ((2.0 * z).cos(), (4.0 * z).cos());
    let ct = theta1.cos();
    let denom = 4.0 * (1.0 - lambda * c2 * ct);
    let x_a3 = (1.0 - lambda)
        * ((1.0 + lambda) * (3.0 + c4) + root_term(lambda) * (1.0 - c4) - 8.0 * lambda * c2 * ct);
    let x_a1 = 2.0 + 3.0 * lambda * lambda + (2.0 - lambda * lambda) * c4
        - 2.0 * lambda * c2 * (4.0 * ct - lambda * c2 * (2.0 * theta1).cos());
    (
        0.5 + x_a3.max(0.0).sqrt() / denom,
        0.5 + x_a1.max(0.0).sqrt() / denom,
    )
}

/// Probability of outcome 1 in round one for the NME seed.
pub fn nme_round_one_probability(z: f64, lambda: f64, theta1: f64) -> f64 {
    0.25 * (1.0 - lambda * (2.0 * z).cos() * theta1.cos())
}

/// Sharpness at which the two NME branches meet (auxiliary at `theta1 = 0`).
pub fn analytic_lambda_c_nme(z: f64) -> Result<f64> {
    check_range("z", z, f64::MIN_POSITIVE, FRAC_PI_4 + 1e-15, "(0, pi/4]")?;
    let (s, c) = z.sin_cos();
    let num = 8.0 * (c.powi(4) + (c * c * s.powi(10)).sqrt() / (s * s));
    Ok(num / (7.0 + (4.0 * z).cos()))
}

/// Critical GGM `1 - e_A1` at the analytic critical sharpness.
pub fn analytic_gc_nme(z: f64) -> Result<f64> {
    let l = analytic_lambda_c_nme(z)?;
    Ok(1.0 - analytic_nme_eigs(z, l, 0.0).1)
}

/// Round-one EB two-site marginal maxima `(e_A1A2, e_A2A3)` for `|phi+>` copies.
pub fn analytic_eb_eigs_maxent(lambda: f64) -> (f64, f64) {
    let s = root_term(lambda);
    let inner = ((1.0 - lambda) * (1.0 + lambda + s)).max(0.0).sqrt();
    let e12 = (3.0 - lambda + s + 2.0 * std::f64::consts::SQRT_2 * inner) / 8.0;
    let e23 = (1.0 + 3.0 * lambda) / 4.0;
    (e12, e23)
}
