//! Independent numerical falsifier / corroborator: alternating
//! finite-difference tests for complete monotonicity of functions assembled
//! from specs, plus the monotone gamma-ratio applications.
//!
//! A function f is c.m. exactly when `(-1)^k d^k f / dx^k >= 0` for all k,
//! which the finite world sees as `(-1)^k Delta_h^k f(x) >= 0`. Differences
//! are taken of analytically computed first derivatives wherever possible;
//! a rounding budget of `2^k * eps * max|f|` keeps order-k cancellation
//! from producing spurious violations, so "no violation" is only ever
//! NumericallySupported, never a certificate.

use serde::{Deserialize, Serialize};

use crate::classical::neg_log_v_prime;
use crate::error::{CertError, Result};
use crate::qmonotone::neg_log_wq_prime;
use crate::ratio::RatioSpec;
use crate::specfun::{digamma, ln_gamma};
use crate::verdict::{Status, Verdict, Witness};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffTestConfig {
    pub max_order: u32,
    pub steps: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// Relative violation tolerance, scaled by the local magnitude.
    pub viol_tol: f64,
}

impl Default for DiffTestConfig {
    fn default() -> Self {
        DiffTestConfig {
            max_order: 8,
            steps: vec![0.05, 0.1, 0.25, 0.5],
            x_grid: log_grid(0.05, 50.0, 60),
            viol_tol: 1e-9,
        }
    }
}

impl DiffTestConfig {
    fn validate(&self) -> Result<()> {
        if self.max_order < 1 || self.max_order > 12 {
            return Err(CertError::Input("max_order must be in 1..=12".into()));
        }
        if self.steps.iter().any(|&h| !(h > 0.0)) || self.steps.is_empty() {
            return Err(CertError::Input("steps must be positive".into()));
        }
        if self.x_grid.iter().any(|&x| !(x > 0.0)) || self.x_grid.is_empty() {
            return Err(CertError::Input("x grid must be positive".into()));
        }
        Ok(())
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * ((hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// The alternating difference engine shared by cm_test and the Bernstein
/// variant. `order_shift = 0` tests f itself for complete monotonicity;
/// `order_shift = 1` tests f' (so the stencil statistics pick up one extra
/// sign and one extra order).
fn alt_diff_engine<F>(f: F, cfg: &DiffTestConfig, order_shift: u32) -> Result<Verdict>
where
    F: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    let eps = f64::EPSILON;
    for &x in &cfg.x_grid {
        for &h in &cfg.steps {
            let n = cfg.max_order + order_shift;
            let mut vals = Vec::with_capacity(n as usize + 1);
            for j in 0..=n {
                vals.push(f(x + j as f64 * h)?);
            }
            let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for k in 1..=n {
                // sum_j (-1)^j C(k,j) f(x+jh) = (-1)^k Delta_h^k f(x).
                let mut s = 0.0;
                for j in 0..=k {
                    let term = binomial(k, j) * vals[j as usize];
                    if j % 2 == 0 {
                        s += term;
                    } else {
                        s -= term;
                    }
                }
                // Testing f' instead of f flips the statistic's sign:
                // (-1)^{k-1} Delta^k f = -s.
                let stat = if order_shift == 0 { s } else { -s };
                let budget = 2.0_f64.powi(k as i32) * eps * scale + cfg.viol_tol * scale.max(1.0);
                if stat < -budget {
                    return Ok(Verdict::certified_false(
                        "cm_oracle",
                        format!(
                            "alternating difference of order {k} is {stat:.3e} at x = {x}, h = {h}"
                        ),
                    )
                    .with_witness(Witness::Stencil {
                        x,
                        h,
                        order: k,
                        value: stat,
                    }));
                }
            }
        }
    }
    Ok(Verdict::supported(format!(
        "no alternating-difference violation up to order {} on {} grid points",
        cfg.max_order,
        cfg.x_grid.len()
    )))
}

/// Finite-difference complete-monotonicity test. CertifiedFalse carries
/// the violating stencil; absence of violations is support, not proof.
pub fn cm_test<F>(f: F, cfg: &DiffTestConfig) -> Result<Verdict>
where
    F: Fn(f64) -> Result<f64>,
{
    alt_diff_engine(f, cfg, 0)
}

fn neg_log_prime(spec: &RatioSpec, x: f64) -> Result<f64> {
    if spec.is_classical() {
        neg_log_v_prime(spec, x)
    } else {
        neg_log_wq_prime(spec, x)
    }
}

/// Tests the l.c.m. characterization numerically: g = -(log f)' must be
/// nonnegative and completely monotonic.
pub fn lcm_oracle(spec: &RatioSpec) -> Result<Verdict> {
    lcm_oracle_with(spec, &DiffTestConfig::default())
}

pub fn lcm_oracle_with(spec: &RatioSpec, cfg: &DiffTestConfig) -> Result<Verdict> {
    let g = |x: f64| neg_log_prime(spec, x);
    for &x in &cfg.x_grid {
        let v = g(x)?;
        if v < -cfg.viol_tol * v.abs().max(1.0) {
            return Ok(
                Verdict::certified_false("lcm_oracle", format!("-(log f)'({x}) = {v:.6e} < 0"))
                    .with_witness(Witness::GridPoint { u: x, value: v }),
            );
        }
    }
    let mut v = cm_test(g, cfg)?;
    if v.status == Status::NumericallySupported {
        v = Verdict::supported("-(log f)' is nonnegative and passes the c.m. difference test")
            .with_condition("lcm_oracle");
    }
    Ok(v)
}

/// Tests the Bernstein property of g = (log f)': g >= 0 and g' c.m.,
/// the derivative taken by one extra difference of the analytic g.
pub fn bernstein_oracle(spec: &RatioSpec) -> Result<Verdict> {
    bernstein_oracle_with(spec, &DiffTestConfig::default())
}

pub fn bernstein_oracle_with(spec: &RatioSpec, cfg: &DiffTestConfig) -> Result<Verdict> {
    let g = |x: f64| neg_log_prime(spec, x).map(|v| -v);
    for &x in &cfg.x_grid {
        let v = g(x)?;
        if v < -cfg.viol_tol * v.abs().max(1.0) {
            return Ok(Verdict::certified_false(
                "bernstein_oracle",
                format!("(log f)'({x}) = {v:.6e} < 0"),
            )
            .with_witness(Witness::GridPoint { u: x, value: v }));
        }
    }
    let mut v = alt_diff_engine(g, cfg, 1)?;
    if v.status == Status::NumericallySupported {
        v = Verdict::supported("(log f)' is nonnegative and its derivative passes the c.m. test")
            .with_condition("bernstein_oracle");
    }
    Ok(v)
}

/// Checks the majorization hypotheses on the weight lists (both sorted
/// ascending, numerator partial sums dominated).
fn majorization_ok(alphas: &[f64], betas: &[f64]) -> bool {
    if alphas.len() != betas.len() {
        return false;
    }
    let mut a = alphas.to_vec();
    let mut b = betas.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut sa, mut sb) = (0.0, 0.0);
    a.iter().zip(&b).all(|(&x, &y)| {
        sa += x;
        sb += y;
        sa <= sb
    })
}

/// `F(a) = prod_i Gamma(A_i X + a) Gamma(B_i Y + a)
///               / (Gamma(A_i Y + a) Gamma(B_i X + a))`
/// with A_i = 1/alpha_i, B_i = 1/beta_i, evaluated in log space.
pub fn gamma_ratio_f(a: f64, x: f64, y: f64, alphas: &[f64], betas: &[f64]) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(CertError::Input("gamma_ratio_f needs a >= 1".into()));
    }
    if !(x > 0.0 && y >= x) {
        return Err(CertError::Input("gamma_ratio_f needs Y >= X > 0".into()));
    }
    if alphas.iter().chain(betas.iter()).any(|&w| !(w > 0.0)) {
        return Err(CertError::Input("weights must be positive".into()));
    }
    if !majorization_ok(alphas, betas) {
        return Err(CertError::Input(
            "the weight lists do not satisfy the majorization hypothesis".into(),
        ));
    }
    let mut s = 0.0;
    for (&al, &be) in alphas.iter().zip(betas) {
        let (ai, bi) = (1.0 / al, 1.0 / be);
        s += ln_gamma(ai * x + a)? + ln_gamma(bi * y + a)?;
        s -= ln_gamma(ai * y + a)? + ln_gamma(bi * x + a)?;
    }
    Ok(s.exp())
}

/// Asserts `d/da log F < 0` on a 64-point grid of a in [1, 10], using the
/// analytic digamma form of the derivative.
pub fn gamma_ratio_decreasing(x: f64, y: f64, alphas: &[f64], betas: &[f64]) -> Result<Verdict> {
    // Validate through one evaluation.
    gamma_ratio_f(1.0, x, y, alphas, betas)?;
    if y == x || alphas == betas {
        return Ok(Verdict::supported("F is constant in this degenerate case"));
    }
    let mut strict = true;
    for i in 0..64 {
        let a = 1.0 + 9.0 * i as f64 / 63.0;
        let mut d = 0.0;
        for (&al, &be) in alphas.iter().zip(betas) {
            let (ai, bi) = (1.0 / al, 1.0 / be);
            d += digamma(ai * x + a)? + digamma(bi * y + a)?;
            d -= digamma(ai * y + a)? + digamma(bi * x + a)?;
        }
        if d >= 0.0 {
            return Ok(Verdict::certified_false(
                "gamma_ratio_decreasing",
                format!("d/da log F = {d:.6e} >= 0 at a = {a}"),
            )
            .with_witness(Witness::GridPoint { u: a, value: d }));
        }
        strict &= d < -1e-12 * d.abs().max(1.0);
    }
    Ok(Verdict::certified_true(if strict {
        "d/da log F < 0 strictly across the sampled grid"
    } else {
        "d/da log F <= 0 across the sampled grid"
    })
    .with_condition("gamma_ratio_decreasing"))
}

/// `F(a) = (a + delta m)_m / (a + delta n)_n` via the product of linear
/// factors; defined for a >= 1/2.
pub fn rising_factorial_f(a: f64, delta: f64, m: u32, n: u32) -> Result<f64> {
    if !(n > m && m >= 1) {
        return Err(CertError::Input("needs n > m >= 1".into()));
    }
    if !(delta > 0.0) {
        return Err(CertError::Input("needs delta > 0".into()));
    }
    if !(a >= 0.5) {
        return Err(CertError::Input("needs a >= 1/2".into()));
    }
    let rising = |z: f64, k: u32| -> f64 { (0..k).map(|j| z + j as f64).product() };
    Ok(rising(a + delta * m as f64, m) / rising(a + delta * n as f64, n))
}

/// Samples a in [1/2, 10] and asserts strict decrease of F.
pub fn rising_factorial_decreasing(delta: f64, m: u32, n: u32) -> Result<Verdict> {
    let mut prev = rising_factorial_f(0.5, delta, m, n)?;
    for i in 1..64 {
        let a = 0.5 + 9.5 * i as f64 / 63.0;
        let v = rising_factorial_f(a, delta, m, n)?;
        if v >= prev * (1.0 - 1e-12) {
            return Ok(Verdict::certified_false(
                "rising_factorial_decreasing",
                format!("F({a}) = {v} does not decrease"),
            )
            .with_witness(Witness::GridPoint { u: a, value: v }));
        }
        prev = v;
    }
    Ok(Verdict::certified_true("F decreases strictly on the sampled grid")
        .with_condition("rising_factorial_decreasing"))
}

/// Recovered parameters for a p = 2 eight-gamma ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P2Recovery {
    pub x: f64,
    pub y: f64,
    pub a_scales: [f64; 2],
    pub b_scales: [f64; 2],
}

/// The reparametrized p = 2 condition set (a)-(d): positivity, one common
/// ratio > 1 across mu3/mu1 = mu4/mu2 = nu1/nu3 = nu2/nu4, the orderings
/// mu2 <= mu1 and nu2 <= nu1, and nu1 <= mu3 with
/// 1/mu1 + 1/mu2 <= 1/nu3 + 1/nu4. On success also recovers
/// (X, Y, A, B) with X = 1 and Y the common ratio.
pub fn p2_conditions(mu: &[f64; 4], nu: &[f64; 4]) -> Verdict {
    let pos = mu.iter().chain(nu.iter()).all(|&v| v > 0.0);
    if !pos {
        return Verdict::inconclusive("(a) fails: all parameters must be positive")
            .with_witness(Witness::Conditions(vec![("(a) positivity".into(), false)]));
    }
    let ratios = [mu[2] / mu[0], mu[3] / mu[1], nu[0] / nu[2], nu[1] / nu[3]];
    let r = ratios[0];
    let consistent = ratios
        .iter()
        .all(|&t| (t - r).abs() <= 1e-12 * r.abs().max(t.abs()));
    let cond_b = consistent && r > 1.0 + 1e-12;
    let cond_c = mu[1] <= mu[0] && nu[1] <= nu[0];
    let cond_d = nu[0] <= mu[2] && 1.0 / mu[0] + 1.0 / mu[1] <= 1.0 / nu[2] + 1.0 / nu[3];
    let conditions = vec![
        ("(a) positivity".to_string(), true),
        (
            format!("(b) common ratio > 1 (ratios {ratios:?})"),
            cond_b,
        ),
        ("(c) mu2 <= mu1 and nu2 <= nu1".to_string(), cond_c),
        (
            "(d) nu1 <= mu3 and 1/mu1 + 1/mu2 <= 1/nu3 + 1/nu4".to_string(),
            cond_d,
        ),
    ];
    if cond_b && cond_c && cond_d {
        let rec = P2Recovery {
            x: 1.0,
            y: r,
            a_scales: [1.0 / mu[0], 1.0 / mu[1]],
            b_scales: [1.0 / nu[2], 1.0 / nu[3]],
        };
        Verdict::certified_true(format!(
            "conditions (a)-(d) hold; the ratio is decreasing in a on [1, inf). \
             Recovered X = {}, Y = {}, A = {:?}, B = {:?}",
            rec.x, rec.y, rec.a_scales, rec.b_scales
        ))
        .with_condition("p2_conditions")
        .with_witness(Witness::Conditions(conditions))
    } else {
        Verdict::inconclusive("a condition fails").with_witness(Witness::Conditions(conditions))
    }
}
