//! Scalar evaluation of classical and q-deformed gamma, digamma and
//! polygamma functions, plus the auxiliary kernel `phi`.
//!
//! All q-series are truncated with explicit geometric tail bounds so that
//! the returned value carries the requested relative accuracy, and long
//! sums are accumulated with Kahan compensation.

use serde::{Deserialize, Serialize};

use crate::error::{CertError, Result};

/// Truncation control for series evaluation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EvalConfig {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rel_tol: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(CertError::Input("rel_tol must be positive".into()));
        }
        if self.max_terms == 0 {
            return Err(CertError::Input("max_terms must be at least 1".into()));
        }
        Ok(())
    }
}

/// The deformation parameter, strictly inside (0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(QParam(q))
        } else {
            Err(CertError::Domain(format!("q must lie in (0,1), got {q}")))
        }
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for QParam {
    type Error = CertError;
    fn try_from(q: f64) -> Result<Self> {
        QParam::new(q)
    }
}

impl From<QParam> for f64 {
    fn from(q: QParam) -> f64 {
        q.0
    }
}

/// Compensated accumulator (Kahan-Neumaier).
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

// Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const LN_2PI: f64 = 1.8378770664093453;

fn check_positive(x: f64, who: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CertError::Domain(format!("{who} requires x > 0, got {x}")))
    }
}

/// Classical digamma via argument-raising recurrence and the Bernoulli
/// asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    let mut x = x;
    let mut acc = 0.0;
    while x < 8.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut pow = inv2;
    let mut prev = f64::INFINITY;
    for (n, b) in BERNOULLI.iter().enumerate() {
        let term = b / (2.0 * (n as f64 + 1.0)) * pow;
        if term.abs() >= prev {
            break; // asymptotic series: stop at the smallest term
        }
        series += term;
        prev = term.abs();
        pow *= inv2;
    }
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// Classical polygamma `psi^(k)` for `k >= 1`.
pub fn polygamma(k: u32, x: f64) -> Result<f64> {
    check_positive(x, "polygamma")?;
    if k == 0 {
        return digamma(x);
    }
    let kf = k as f64;
    let fact_k = (1..=k).map(|i| i as f64).product::<f64>();
    let sign_rec = if k % 2 == 0 { 1.0 } else { -1.0 }; // (-1)^k
    let mut x = x;
    let mut acc = 0.0;
    // psi^(k)(x) = psi^(k)(x+1) - (-1)^k k! x^{-k-1}
    while x < 8.0 + 2.0 * kf {
        acc -= sign_rec * fact_k * x.powi(-(k as i32) - 1);
        x += 1.0;
    }
    // Asymptotic: psi^(k)(x) = (-1)^{k-1} [ (k-1)!/x^k + k!/(2 x^{k+1})
    //   + sum_j B_{2j} (2j+k-1)! / ((2j)! x^{2j+k}) ]
    let fact_km1 = fact_k / kf;
    let mut series = fact_km1 * x.powi(-(k as i32)) + fact_k / 2.0 * x.powi(-(k as i32) - 1);
    let mut prev = f64::INFINITY;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j as u32 + 1;
        // (2j + k - 1)! / (2j)!
        let mut coeff = 1.0;
        for m in (2 * j + 1)..=(2 * j + k - 1) {
            coeff *= m as f64;
        }
        let term = b * coeff * x.powi(-((2 * j + k) as i32));
        if term.abs() >= prev {
            break;
        }
        series += term;
        prev = term.abs();
    }
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 }; // (-1)^{k-1}
    Ok(acc + sign * series)
}

/// Log of the classical gamma function, Stirling series with recurrence.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive(x, "ln_gamma")?;
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= x.ln();
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut pow = 1.0 / x;
    let mut prev = f64::INFINITY;
    for (n, b) in BERNOULLI.iter().enumerate() {
        let n2 = 2.0 * (n as f64 + 1.0);
        let term = b / (n2 * (n2 - 1.0)) * pow;
        if term.abs() >= prev {
            break;
        }
        series += term;
        prev = term.abs();
        pow *= inv2;
    }
    Ok(acc + (x - 0.5) * x.ln() - x + 0.5 * LN_2PI + series)
}

/// Log of the q-gamma function.
///
/// `log Gamma_q(x) = (1-x) log(1-q) + sum_{n>=0} [log(1-q^{n+1}) - log(1-q^{x+n})]`,
/// truncated once the geometric tail bound drops below `rel_tol`.
pub fn ln_gamma_q(x: f64, q: QParam, cfg: &EvalConfig) -> Result<f64> {
    check_positive(x, "gamma_q")?;
    cfg.validate()?;
    let q = q.get();
    let mut sum = KahanSum::default();
    let lq = q.ln();
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let qa = ((nf + 1.0) * lq).exp(); // q^{n+1}
        let qb = ((x + nf) * lq).exp(); // q^{x+n}
        let term = (-qa).ln_1p() - (-qb).ln_1p();
        sum.add(term);
        // |log(1-y)| <= y/(1-q) for y <= q; geometric tails in n.
        let tail = (qa * q + qb * q) / ((1.0 - q) * (1.0 - q));
        if tail < cfg.rel_tol * (sum.value().abs() + 1.0) {
            return Ok((1.0 - x) * (1.0 - q).ln() + sum.value());
        }
    }
    Err(CertError::Precision(format!(
        "gamma_q series did not converge within {} terms",
        cfg.max_terms
    )))
}

/// The q-gamma function `Gamma_q(x)` for `x > 0`, `0 < q < 1`.
pub fn gamma_q(x: f64, q: QParam, cfg: &EvalConfig) -> Result<f64> {
    Ok(ln_gamma_q(x, q, cfg)?.exp())
}

/// The q-digamma function via
/// `psi_q(x) = -log(1-q) + log(q) sum_{n>=1} q^{nx} / (1-q^n)`.
pub fn digamma_q(x: f64, q: QParam, cfg: &EvalConfig) -> Result<f64> {
    check_positive(x, "digamma_q")?;
    cfg.validate()?;
    let q = q.get();
    let lq = q.ln();
    let qx = (x * lq).exp(); // q^x
    let mut sum = KahanSum::default();
    for n in 1..=cfg.max_terms {
        let qnx = (n as f64 * x * lq).exp();
        let qn = (n as f64 * lq).exp();
        sum.add(qnx / (1.0 - qn));
        let tail = qnx * qx / ((1.0 - q) * (1.0 - qx));
        if tail < cfg.rel_tol * (sum.value().abs() + 1.0) {
            return Ok(-(1.0 - q).ln() + lq * sum.value());
        }
    }
    Err(CertError::Precision(format!(
        "digamma_q series did not converge within {} terms",
        cfg.max_terms
    )))
}

/// The first series form of the q-digamma,
/// `psi_q(x) = -log(1-q) + log(q) sum_{n>=0} q^{n+x} / (1-q^{n+x})`.
///
/// Kept as an independent evaluation route for cross-checks against
/// [`digamma_q`].
pub fn digamma_q_alt(x: f64, q: QParam, cfg: &EvalConfig) -> Result<f64> {
    check_positive(x, "digamma_q_alt")?;
    cfg.validate()?;
    let q = q.get();
    let lq = q.ln();
    let mut sum = KahanSum::default();
    for n in 0..cfg.max_terms {
        let qnx = ((n as f64 + x) * lq).exp();
        sum.add(qnx / (1.0 - qnx));
        let tail = qnx * q / ((1.0 - q) * (1.0 - q));
        if tail < cfg.rel_tol * (sum.value().abs() + 1.0) {
            return Ok(-(1.0 - q).ln() + lq * sum.value());
        }
    }
    Err(CertError::Precision(
        "digamma_q_alt series did not converge".into(),
    ))
}

/// The k-th q-polygamma,
/// `psi_q^(k)(x) = (log q)^{k+1} sum_{n>=1} n^k q^{nx} / (1-q^n)`, `k >= 1`.
pub fn polygamma_q(k: u32, x: f64, q: QParam, cfg: &EvalConfig) -> Result<f64> {
    if k == 0 {
        return digamma_q(x, q, cfg);
    }
    check_positive(x, "polygamma_q")?;
    cfg.validate()?;
    let q = q.get();
    let lq = q.ln();
    let qx = (x * lq).exp();
    let mut sum = KahanSum::default();
    for n in 1..=cfg.max_terms {
        let nf = n as f64;
        let term = nf.powi(k as i32) * (nf * x * lq).exp() / (1.0 - (nf * lq).exp());
        sum.add(term);
        // Term ratio approaches q^x; past the hump (1+1/n)^k q^x < 1 the
        // tail is geometrically bounded.
        let growth = (1.0 + 1.0 / nf).powi(k as i32) * qx;
        if growth < 1.0 {
            let tail = term.abs() * growth / ((1.0 - growth) * (1.0 - q));
            if tail < cfg.rel_tol * (sum.value().abs() + 1.0) {
                return Ok(lq.powi(k as i32 + 1) * sum.value());
            }
        }
    }
    Err(CertError::Precision(format!(
        "polygamma_q series did not converge within {} terms",
        cfg.max_terms
    )))
}

/// The kernel `phi_{delta,gamma}(t) = t e^{-delta t} / (1 - e^{-gamma t})`
/// with the removable singularity `phi(., ., 0) = 1/gamma`.
pub fn phi(delta: f64, gamma: f64, t: f64) -> Result<f64> {
    if !(delta > 0.0) || !(gamma > 0.0) {
        return Err(CertError::Domain(
            "phi requires delta > 0 and gamma > 0".into(),
        ));
    }
    if t < 0.0 {
        return Err(CertError::Domain("phi requires t >= 0".into()));
    }
    let u = gamma * t;
    if u < 1e-4 {
        // t/(1-e^{-gamma t}) = (1/gamma) * u/(1-e^{-u});
        // u/(1-e^{-u}) = 1 + u/2 + u^2/12 - u^4/720 + ...
        let series = 1.0 + u / 2.0 + u * u / 12.0 - u.powi(4) / 720.0;
        Ok((-delta * t).exp() * series / gamma)
    } else {
        Ok(t * (-delta * t).exp() / (-(-u).exp_m1()))
    }
}
