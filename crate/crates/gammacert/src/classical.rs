//! The classical (q = 1) case: the kernel Q(u), necessary conditions, the
//! entropy constant rho, and the family of sufficient-condition checkers
//! (Sherman engine, majorization, Leblanc-Johnson, and the exact p = 1
//! characterization).
//!
//! Throughout, the ratio under study is
//! `V(x) = theta^{-x} prod_i Gamma(A_i x + a_i)^{alpha_i}
//!                  / prod_j Gamma(B_j x + b_j)^{beta_j}`
//! and `-(log V)'(x) = int_0^inf e^{-xu} Q(u) du + log(theta/rho)` once the
//! balance condition holds.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{CertError, Result};
use crate::exact::{integer_multiple_of, rational_gcd, Rational};
use crate::ratio::{GammaFactor, RatioSpec};
use crate::specfun::{digamma, polygamma};
use crate::verdict::{Status, Verdict, Witness};

const TIE_TOL: f64 = 1e-12;

/// The V-hat structure: p factor pairs with common shift `a`, scales
/// `A_j = 1/alpha_j`, `B_j = 1/beta_j`, and the geometric factor
/// `prod (alpha_j/beta_j)^x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VhatSpec {
    pub a: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl VhatSpec {
    pub fn new(a: f64, alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(CertError::Input("alpha/beta length mismatch".into()));
        }
        if a < 0.0 || alphas.iter().chain(betas.iter()).any(|&w| !(w > 0.0)) {
            return Err(CertError::Input(
                "vhat needs a >= 0 and positive weights".into(),
            ));
        }
        Ok(VhatSpec { a, alphas, betas })
    }
}

/// A nonnegative matrix with unit row sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StochasticMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub entries: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(CertError::Input("matrix shape mismatch".into()));
        }
        let m = StochasticMatrix { rows, cols, entries };
        for j in 0..rows {
            let row = &m.entries[j * cols..(j + 1) * cols];
            if row.iter().any(|&h| h < 0.0) {
                return Err(CertError::Input(format!("row {j} has a negative entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(CertError::Input(format!("row {j} sums to {s}, not 1")));
            }
        }
        Ok(m)
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.entries[j * self.cols + i]
    }
}

/// The kernel
/// `Q(u) = sum_i alpha_i e^{-a_i u/A_i}/(1-e^{-u/A_i})
///       - sum_j beta_j e^{-b_j u/B_j}/(1-e^{-u/B_j})`, u > 0.
pub fn q_kernel(spec: &RatioSpec, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(CertError::Domain("q_kernel needs u > 0".into()));
    }
    let term = |f: &GammaFactor| -> f64 {
        let r = u / f.scale_value;
        f.weight * (-f.shift * r).exp() / -f64::exp_m1(-r)
    };
    let num: f64 = spec.numerator.iter().map(term).sum();
    let den: f64 = spec.denominator.iter().map(term).sum();
    Ok(num - den)
}

/// Magnitude scale of the kernel's individual terms at u, for tolerances.
fn q_kernel_scale(spec: &RatioSpec, u: f64) -> f64 {
    spec.numerator
        .iter()
        .chain(spec.denominator.iter())
        .map(|f| {
            let r = u / f.scale_value;
            f.weight * (-f.shift * r).exp() / -f64::exp_m1(-r)
        })
        .fold(0.0, f64::max)
}

/// The p = 1 kernel in V-hat coordinates:
/// `Q1(u) = alpha e^{-a alpha u}/(1-e^{-alpha u})
///        - beta e^{-a beta u}/(1-e^{-beta u})`.
pub fn q1_kernel(alpha: f64, beta: f64, a: f64, u: f64) -> f64 {
    let piece = |w: f64| w * (-a * w * u).exp() / -f64::exp_m1(-w * u);
    piece(alpha) - piece(beta)
}

/// Laurent data of Q at 0 and the dominant decay at infinity:
/// `Q(u) = leading/u + constant + O(u)` with
/// `leading = sum alpha_i A_i - sum beta_j B_j` and
/// `constant = sum alpha_i (1/2 - a_i) - sum beta_j (1/2 - b_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelAsymptotics {
    pub leading_coeff_at_0: f64,
    pub const_at_0: f64,
    /// (min decay exponent shift/scale, summed weight of the minimizers)
    /// per side; None when the side is empty.
    pub numerator_decay: Option<(f64, f64)>,
    pub denominator_decay: Option<(f64, f64)>,
}

pub fn kernel_asymptotics(spec: &RatioSpec) -> KernelAsymptotics {
    let side_decay = |list: &[GammaFactor]| -> Option<(f64, f64)> {
        let eps = list
            .iter()
            .map(|f| f.shift / f.scale_value)
            .fold(f64::INFINITY, f64::min);
        if !eps.is_finite() {
            return None;
        }
        let coeff: f64 = list
            .iter()
            .filter(|f| (f.shift / f.scale_value - eps).abs() <= TIE_TOL * (1.0 + eps.abs()))
            .map(|f| f.weight)
            .sum();
        Some((eps, coeff))
    };
    KernelAsymptotics {
        leading_coeff_at_0: spec.weighted_scale_sum_num() - spec.weighted_scale_sum_den(),
        const_at_0: spec.numerator.iter().map(|f| f.weight * (0.5 - f.shift)).sum::<f64>()
            - spec.denominator.iter().map(|f| f.weight * (0.5 - f.shift)).sum::<f64>(),
        numerator_decay: side_decay(&spec.numerator),
        denominator_decay: side_decay(&spec.denominator),
    }
}

/// Exact balance check `sum alpha_i A_i = sum beta_j B_j` where possible.
fn balance_holds(spec: &RatioSpec) -> bool {
    if spec.all_scales_rational() {
        let side = |list: &[GammaFactor]| -> BigRational {
            let mut s = BigRational::zero();
            for f in list {
                let r = f.scale_rat.expect("checked rational");
                s += BigRational::from_float(f.weight).expect("finite weight")
                    * BigRational::new(r.num().into(), r.den().into());
            }
            s
        };
        side(&spec.numerator) == side(&spec.denominator)
    } else {
        let lhs = spec.weighted_scale_sum_num();
        let rhs = spec.weighted_scale_sum_den();
        (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1.0)
    }
}

/// Standalone balance verdict (exact when the scales are rational).
pub fn balance_check(spec: &RatioSpec) -> Verdict {
    let w = Witness::Comparison {
        lhs: spec.weighted_scale_sum_num(),
        rhs: spec.weighted_scale_sum_den(),
        relation: "==".into(),
    };
    if balance_holds(spec) {
        Verdict::certified_true("weighted scale sums agree")
            .with_condition("balance")
            .with_witness(w)
    } else {
        Verdict::certified_false("balance", "weighted scale sums differ").with_witness(w)
    }
}

/// The necessary conditions for V to be l.c.m.: balance, the constant term
/// of Q at 0 nonnegative, and denominator-dominant decay at infinity (with
/// the weight comparison in the tied case). Passing these is NOT an l.c.m.
/// certificate.
pub fn necessary_conditions(spec: &RatioSpec) -> Verdict {
    let asym = kernel_asymptotics(spec);
    if !balance_holds(spec) {
        return Verdict::certified_false(
            "balance",
            "weighted scale sums differ, so -(log V)' is unbounded on one end",
        )
        .with_witness(Witness::Comparison {
            lhs: spec.weighted_scale_sum_num(),
            rhs: spec.weighted_scale_sum_den(),
            relation: "==".into(),
        });
    }
    let const_scale: f64 = spec
        .numerator
        .iter()
        .chain(spec.denominator.iter())
        .map(|f| f.weight * (0.5 + f.shift.abs()))
        .sum::<f64>()
        .max(1.0);
    if asym.const_at_0 < -TIE_TOL * const_scale {
        return Verdict::certified_false(
            "(a)",
            "the constant term of Q at u = 0 is negative",
        )
        .with_witness(Witness::Comparison {
            lhs: asym.const_at_0,
            rhs: 0.0,
            relation: ">=".into(),
        });
    }
    if let (Some((en, cn)), Some((ed, cd))) = (asym.numerator_decay, asym.denominator_decay) {
        let tol = TIE_TOL * (1.0 + en.abs().max(ed.abs()));
        if en > ed + tol {
            return Verdict::certified_false(
                "(b)",
                "every numerator term decays faster than the slowest denominator term",
            )
            .with_witness(Witness::Comparison {
                lhs: en,
                rhs: ed,
                relation: "<=".into(),
            });
        }
        if (en - ed).abs() <= tol && cn < cd - TIE_TOL * (cn.abs() + cd.abs() + 1.0) {
            return Verdict::certified_false(
                "(b)",
                "tied slowest decay, but the numerator's weight there is smaller",
            )
            .with_witness(Witness::Comparison {
                lhs: cn,
                rhs: cd,
                relation: ">=".into(),
            });
        }
    }
    Verdict::certified_true("no necessary condition is violated")
        .with_condition("necessary")
}

/// The entropy constant
/// `rho = prod A_i^{alpha_i A_i} prod B_j^{-beta_j B_j}`, in log space.
pub fn entropy_rho(spec: &RatioSpec) -> f64 {
    let mut s = 0.0;
    for f in &spec.numerator {
        s += f.weight * f.scale_value * f.scale_value.ln();
    }
    for f in &spec.denominator {
        s -= f.weight * f.scale_value * f.scale_value.ln();
    }
    s.exp()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridConfig {
    pub u_min: f64,
    /// Upper end; resolved from the kernel decay when absent.
    pub u_max: Option<f64>,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            u_min: 1e-6,
            u_max: None,
            points: 2000,
        }
    }
}

impl GridConfig {
    /// Resolved upper end: 50 divided by the smallest positive decay
    /// exponent, floored at 50.
    pub fn resolve_u_max(&self, spec: &RatioSpec) -> f64 {
        if let Some(u) = self.u_max {
            return u;
        }
        let min_decay = spec
            .numerator
            .iter()
            .chain(spec.denominator.iter())
            .map(|f| f.shift / f.scale_value)
            .filter(|&e| e > 0.0)
            .fold(f64::INFINITY, f64::min);
        if min_decay.is_finite() {
            (50.0 / min_decay).max(50.0)
        } else {
            50.0
        }
    }
}

/// Scans Q on a log-spaced grid. CertifiedFalse with a witness point on a
/// violation; otherwise NumericallySupported when the asymptotics at both
/// ends are consistent with Q >= 0, Inconclusive when they are not decided.
pub fn q_nonneg(spec: &RatioSpec, grid: &GridConfig) -> Result<Verdict> {
    let u_max = grid.resolve_u_max(spec);
    let u_min = grid.u_min;
    if !(u_min > 0.0 && u_max > u_min && grid.points >= 2) {
        return Err(CertError::Input("bad grid configuration".into()));
    }
    let ratio = (u_max / u_min).ln();
    let eval_at = |u: f64| -> Result<Option<Verdict>> {
        let q = q_kernel(spec, u)?;
        if q < -1e-12 * q_kernel_scale(spec, u) {
            return Ok(Some(
                Verdict::certified_false("q_nonneg", format!("Q({u}) < 0"))
                    .with_witness(Witness::GridPoint { u, value: q }),
            ));
        }
        Ok(None)
    };
    for i in 0..grid.points {
        let u = u_min * (ratio * i as f64 / (grid.points - 1) as f64).exp();
        if let Some(v) = eval_at(u)? {
            return Ok(v);
        }
    }

    let asym = kernel_asymptotics(spec);
    let lead_scale = (spec.weighted_scale_sum_num() + spec.weighted_scale_sum_den()).max(1.0);
    let zero_ok = asym.leading_coeff_at_0 > TIE_TOL * lead_scale
        || (asym.leading_coeff_at_0.abs() <= TIE_TOL * lead_scale
            && asym.const_at_0 >= -TIE_TOL * lead_scale);
    let inf_ok = match (asym.numerator_decay, asym.denominator_decay) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some((en, cn)), Some((ed, cd))) => {
            let tol = TIE_TOL * (1.0 + en.abs().max(ed.abs()));
            en < ed - tol || ((en - ed).abs() <= tol && cn >= cd - TIE_TOL * (cn + cd))
        }
    };
    if !inf_ok {
        // The denominator dominates at infinity, so Q is eventually
        // negative; hunt for an explicit point.
        let mut u = u_max;
        while u < 1e7 {
            if let Some(v) = eval_at(u)? {
                return Ok(v);
            }
            u *= 1.5;
        }
    }
    if zero_ok && inf_ok {
        Ok(Verdict::supported(format!(
            "Q >= 0 on {} grid points in [{u_min}, {u_max}] and both asymptotic \
             regimes are consistent",
            grid.points
        ))
        .with_condition("q_nonneg"))
    } else {
        Ok(Verdict::inconclusive(
            "no grid violation, but the asymptotic behavior could not be certified",
        )
        .with_condition("q_nonneg"))
    }
}

/// Detects Q == 0 algebraically: after cancelling identical pairs, each
/// factor of scale S = n*g splits into n pieces of scale g via
/// `e^{-b y}/(1-e^{-y}) = sum_{r<n} e^{-(b+r)y}/(1-e^{-ny})`, y = u/S; the
/// spec is identically zero when the split multisets coincide. Requires
/// rational scales; returns false (not "unknown") otherwise.
pub fn q_identically_zero(spec: &RatioSpec) -> bool {
    let spec = spec.cancel_identical();
    if spec.numerator.is_empty() && spec.denominator.is_empty() {
        return true;
    }
    let all: Vec<&GammaFactor> = spec.numerator.iter().chain(spec.denominator.iter()).collect();
    let rats: Option<Vec<Rational>> = all.iter().map(|f| f.scale_rat).collect();
    let rats = match rats {
        Some(r) => r,
        None => return false,
    };
    let g = match rational_gcd(&rats) {
        Ok(g) => g,
        Err(_) => return false,
    };
    // Net weight per split shift; everything must cancel.
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut add = |shift: f64, w: f64| {
        for p in pieces.iter_mut() {
            if (p.0 - shift).abs() <= TIE_TOL * (1.0 + shift.abs()) {
                p.1 += w;
                return;
            }
        }
        pieces.push((shift, w));
    };
    for (idx, (f, r)) in all.iter().zip(&rats).enumerate() {
        let n = match integer_multiple_of(r, &g) {
            Some(n) if n <= 1 << 20 => n,
            _ => return false,
        };
        let sign = if idx < spec.numerator.len() { 1.0 } else { -1.0 };
        for piece in 0..n {
            add((f.shift + piece as f64) / n as f64, sign * f.weight);
        }
    }
    let total: f64 = all.iter().map(|f| f.weight * f.scale_value).sum();
    pieces.iter().all(|&(_, w)| w.abs() <= 1e-12 * total.max(1.0))
}

/// The two closed-form condition sets of the older sufficiency theorem.
pub fn sufficient_old(spec: &RatioSpec) -> Verdict {
    let balanced = balance_holds(spec);
    let num = &spec.numerator;
    let den = &spec.denominator;
    if num.is_empty() || den.is_empty() {
        return Verdict::inconclusive("needs factors on both sides");
    }
    // (a): balance and max a_i/A_i <= min (b_j - 1)/B_j.
    let max_a = num
        .iter()
        .map(|f| f.shift / f.scale_value)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_b = den
        .iter()
        .map(|f| (f.shift - 1.0) / f.scale_value)
        .fold(f64::INFINITY, f64::min);
    if balanced && max_a <= min_b {
        return Verdict::certified_true(
            "every numerator exponent a_i/A_i is at most every (b_j - 1)/B_j",
        )
        .with_condition("sufficient_old(a)");
    }
    // (b): p = s, balance, alpha_i A_i >= beta_i B_i for i < p, the last
    // denominator exponent dominates, and a_i/A_i <= (b_i - 1)/B_i for
    // all i (pairing as printed, no reordering).
    let p = num.len();
    if p == den.len() && balanced {
        let pairs_dominate = (0..p - 1)
            .all(|i| num[i].weight * num[i].scale_value >= den[i].weight * den[i].scale_value);
        let last = (den[p - 1].shift - 1.0) / den[p - 1].scale_value;
        let heads_below_last = (0..p.saturating_sub(1))
            .all(|j| den[j].shift / den[j].scale_value <= last);
        let shifts_ok = (0..p)
            .all(|i| num[i].shift / num[i].scale_value <= (den[i].shift - 1.0) / den[i].scale_value);
        if pairs_dominate && heads_below_last && shifts_ok {
            return Verdict::certified_true("pairwise condition set (b) holds")
                .with_condition("sufficient_old(b)");
        }
    }
    Verdict::inconclusive("neither condition set applies")
}

/// The Sherman majorization inequality: with H row-stochastic, conditions
/// `y_j >= sum_i x_i h_{ji}` and `c_i >= sum_j d_j h_{ji}` imply
/// `sum_j d_j f(y_j) <= sum_i c_i f(x_i)` for every nonnegative decreasing
/// convex f. Also probes the conclusion on f(x) = e^{-ux}.
pub fn sherman_inequality(
    x: &[f64],
    y: &[f64],
    c: &[f64],
    d: &[f64],
    h: &StochasticMatrix,
) -> Result<Verdict> {
    if x.len() != c.len() || y.len() != d.len() || h.rows != y.len() || h.cols != x.len() {
        return Err(CertError::Input("sherman dimension mismatch".into()));
    }
    if c.iter().chain(d.iter()).any(|&v| v < 0.0) {
        return Err(CertError::Input("sherman weights must be nonnegative".into()));
    }
    let row_ok = (0..y.len()).all(|j| {
        let mix: f64 = (0..x.len()).map(|i| x[i] * h.get(j, i)).sum();
        y[j] >= mix
    });
    let col_ok = (0..x.len()).all(|i| {
        let mix: f64 = (0..y.len()).map(|j| d[j] * h.get(j, i)).sum();
        c[i] >= mix
    });
    if !(row_ok && col_ok) {
        return Ok(Verdict::inconclusive(
            "the majorization conditions do not hold for this matrix",
        )
        .with_witness(Witness::Conditions(vec![
            ("rows".into(), row_ok),
            ("columns".into(), col_ok),
        ])));
    }
    let mut probes = Vec::new();
    for &u in &[0.01, 0.1, 1.0, 10.0] {
        let lhs: f64 = y.iter().zip(d).map(|(&yj, &dj)| dj * (-u * yj).exp()).sum();
        let rhs: f64 = x.iter().zip(c).map(|(&xi, &ci)| ci * (-u * xi).exp()).sum();
        probes.push((format!("probe u = {u}"), lhs <= rhs * (1.0 + 1e-12) + 1e-300));
    }
    Ok(Verdict::certified_true(
        "majorization conditions hold; the weighted convex inequality follows",
    )
    .with_condition("sherman")
    .with_witness(Witness::Conditions(probes)))
}

/// Sherman-based sufficiency for Q >= 0: with H row-stochastic (s x p),
/// `alpha_i A_i >= sum_j beta_j B_j h_{ji}` and
/// `b_j >= B_j sum_i (a_i/A_i) h_{ji} + 1`.
pub fn sherman_sufficient(spec: &RatioSpec, h: &StochasticMatrix) -> Result<Verdict> {
    let p = spec.numerator.len();
    let s = spec.denominator.len();
    if h.rows != s || h.cols != p {
        return Err(CertError::Input(format!(
            "matrix is {}x{}, spec needs {s}x{p}",
            h.rows, h.cols
        )));
    }
    let weights_ok = (0..p).all(|i| {
        let mix: f64 = (0..s)
            .map(|j| spec.denominator[j].weight * spec.denominator[j].scale_value * h.get(j, i))
            .sum();
        spec.numerator[i].weight * spec.numerator[i].scale_value >= mix
    });
    let shifts_ok = (0..s).all(|j| {
        let mix: f64 = (0..p)
            .map(|i| spec.numerator[i].shift / spec.numerator[i].scale_value * h.get(j, i))
            .sum();
        spec.denominator[j].shift >= spec.denominator[j].scale_value * mix + 1.0
    });
    if weights_ok && shifts_ok {
        Ok(Verdict::certified_true("the Sherman transfer conditions hold")
            .with_condition("sherman_sufficient"))
    } else {
        Ok(Verdict::inconclusive(
            "the Sherman conditions fail for this matrix (one-directional test)",
        )
        .with_witness(Witness::Conditions(vec![
            ("weights".into(), weights_ok),
            ("shifts".into(), shifts_ok),
        ])))
    }
}

/// Sherman sufficiency with the canonical matrix
/// `h_{ji} = alpha_i A_i / sum_k alpha_k A_k` (needs balance); the shift
/// condition collapses to
/// `(b_j - 1) sum_k beta_k B_k >= B_j sum_i alpha_i a_i`.
pub fn sherman_sufficient_auto(spec: &RatioSpec) -> Verdict {
    if spec.numerator.is_empty() || spec.denominator.is_empty() {
        return Verdict::inconclusive("needs factors on both sides");
    }
    if !balance_holds(spec) {
        return Verdict::inconclusive("the canonical matrix needs the balance condition");
    }
    let den_sum = spec.weighted_scale_sum_den();
    let shift_mass: f64 = spec.numerator.iter().map(|f| f.weight * f.shift).sum();
    let ok = spec
        .denominator
        .iter()
        .all(|f| (f.shift - 1.0) * den_sum >= f.scale_value * shift_mass);
    if ok {
        Verdict::certified_true(
            "the canonical row-stochastic matrix satisfies the Sherman conditions",
        )
        .with_condition("sherman_auto")
    } else {
        Verdict::inconclusive("the canonical matrix does not satisfy the shift condition")
    }
}

/// Partial-sum majorization check for V-hat: with a >= 1 and both weight
/// lists sorted ascending, `sum_{j<=k} alpha_j <= sum_{j<=k} beta_j` for
/// every k certifies that (log W-hat)' is Bernstein and V-hat is l.c.m.
pub fn vhat_check(spec: &VhatSpec) -> Result<Verdict> {
    if spec.alphas.len() != spec.betas.len() {
        return Err(CertError::Input("alpha/beta length mismatch".into()));
    }
    if spec.a < 1.0 {
        return Ok(Verdict::inconclusive(format!(
            "needs common shift a >= 1, got {}",
            spec.a
        )));
    }
    let mut alphas = spec.alphas.clone();
    let mut betas = spec.betas.clone();
    alphas.sort_by(f64::total_cmp);
    betas.sort_by(f64::total_cmp);
    let mut sa = 0.0;
    let mut sb = 0.0;
    for (k, (&a, &b)) in alphas.iter().zip(&betas).enumerate() {
        sa += a;
        sb += b;
        if sa > sb {
            return Ok(Verdict::inconclusive(format!(
                "partial sums fail at position {}: {sa} > {sb}",
                k + 1
            )));
        }
    }
    Ok(Verdict::certified_true("ascending partial sums are dominated")
        .with_condition("vhat_majorization"))
}

/// Leblanc-Johnson chain conditions for a common shift a >= 1/2:
/// scales descending across numerator then denominator, numerator
/// weighted scales descending, denominator weighted scales ascending,
/// plus balance and theta >= rho.
pub fn leblanc_johnson_check(spec: &RatioSpec) -> Result<Verdict> {
    let all: Vec<&GammaFactor> = spec.numerator.iter().chain(spec.denominator.iter()).collect();
    let a = match all.first() {
        Some(f) => f.shift,
        None => return Err(CertError::Input("empty spec".into())),
    };
    if all.iter().any(|f| f.shift != a) {
        return Err(CertError::Input(
            "the Leblanc-Johnson conditions need one common shift".into(),
        ));
    }
    let mut conditions = vec![("a >= 1/2".to_string(), a >= 0.5)];
    let chain: Vec<f64> = spec
        .numerator
        .iter()
        .chain(spec.denominator.iter())
        .map(|f| f.scale_value)
        .collect();
    conditions.push((
        "scales descending (numerator then denominator)".into(),
        chain.windows(2).all(|w| w[0] >= w[1]),
    ));
    let na: Vec<f64> = spec.numerator.iter().map(|f| f.weight * f.scale_value).collect();
    conditions.push((
        "numerator weighted scales descending".into(),
        na.windows(2).all(|w| w[0] >= w[1]),
    ));
    let db: Vec<f64> = spec.denominator.iter().map(|f| f.weight * f.scale_value).collect();
    conditions.push((
        "denominator weighted scales ascending".into(),
        db.windows(2).all(|w| w[0] <= w[1]),
    ));
    conditions.push(("balance".into(), balance_holds(spec)));
    let rho = entropy_rho(spec);
    conditions.push((
        format!("theta >= rho = {rho}"),
        spec.theta() >= rho * (1.0 - TIE_TOL),
    ));
    if conditions.iter().all(|(_, ok)| *ok) {
        Ok(Verdict::certified_true("all chain conditions hold")
            .with_condition("leblanc_johnson")
            .with_witness(Witness::Conditions(conditions)))
    } else {
        Ok(Verdict::inconclusive("a chain condition fails")
            .with_witness(Witness::Conditions(conditions)))
    }
}

/// Exact characterization of Q1 >= 0 for the p = 1 V-hat kernel:
/// nonnegative iff alpha = beta, or alpha < beta with a >= 1/2, or
/// alpha > beta with a = 0. Both directions are certified.
pub fn p1_exact(alpha: f64, beta: f64, a: f64) -> Verdict {
    let holds = alpha == beta || (alpha < beta && a >= 0.5) || (alpha > beta && a == 0.0);
    if holds {
        let why = if alpha == beta {
            "alpha = beta makes Q1 identically zero"
        } else if alpha < beta {
            "alpha < beta with a >= 1/2"
        } else {
            "alpha > beta with a = 0: s/(1-e^{-su}) is increasing in s"
        };
        Verdict::certified_true(why).with_condition("p1_exact")
    } else if alpha < beta {
        Verdict::certified_false(
            "p1_exact",
            "alpha < beta with a < 1/2: Q1(0+) = (alpha-beta)(1/2-a) < 0",
        )
    } else {
        Verdict::certified_false(
            "p1_exact",
            "alpha > beta with a > 0: the beta term decays slower, so Q1 < 0 for large u",
        )
    }
}

/// Aggregated classical l.c.m. decision with the per-stage evidence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassicalOutcome {
    pub necessary: Verdict,
    pub rho: f64,
    pub theta: f64,
    pub theta_check: Verdict,
    pub q_identically_zero: bool,
    /// (family name, verdict) for every applicable sufficient family.
    pub sufficient_families: Vec<(String, Verdict)>,
    pub q_nonneg: Verdict,
    pub overall: Verdict,
}

/// Recognizes the p = 1 V-hat structure (A = 1/alpha, B = 1/beta, common
/// shift) so the exact characterization applies.
fn p1_parameters(spec: &RatioSpec) -> Option<(f64, f64, f64)> {
    if spec.numerator.len() != 1 || spec.denominator.len() != 1 {
        return None;
    }
    let (n, d) = (&spec.numerator[0], &spec.denominator[0]);
    if n.shift != d.shift {
        return None;
    }
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs());
    if close(n.scale_value * n.weight, 1.0) && close(d.scale_value * d.weight, 1.0) {
        Some((n.weight, d.weight, n.shift))
    } else {
        None
    }
}

/// Full classical pipeline: necessary conditions, theta >= rho, and
/// Q >= 0 via exact cancellation, a sufficient family, or grid evidence.
pub fn check_lcm_classical(spec: &RatioSpec, grid: &GridConfig) -> Result<ClassicalOutcome> {
    if !spec.is_classical() {
        return Err(CertError::Input("classical pipeline needs a classical spec".into()));
    }
    let necessary = necessary_conditions(spec);
    let rho = entropy_rho(spec);
    let theta = spec.theta();
    let theta_check = if theta >= rho * (1.0 - TIE_TOL) {
        Verdict::certified_true("theta meets the entropy threshold")
            .with_condition("theta_rho")
            .with_witness(Witness::Comparison {
                lhs: theta,
                rhs: rho,
                relation: ">=".into(),
            })
    } else {
        Verdict::certified_false("theta_rho", "theta falls below the entropy constant rho")
            .with_witness(Witness::Comparison {
                lhs: theta,
                rhs: rho,
                relation: ">=".into(),
            })
    };
    let q_zero = q_identically_zero(spec);

    let mut families: Vec<(String, Verdict)> = Vec::new();
    families.push(("sufficient_old".into(), sufficient_old(spec)));
    families.push(("sherman_auto".into(), sherman_sufficient_auto(spec)));
    let common_shift = {
        let mut shifts = spec.numerator.iter().chain(spec.denominator.iter()).map(|f| f.shift);
        let first = shifts.next();
        first.is_some() && shifts.all(|s| Some(s) == first)
    };
    if common_shift && !spec.numerator.is_empty() && !spec.denominator.is_empty() {
        families.push(("leblanc_johnson".into(), leblanc_johnson_check(spec)?));
    }
    let p1 = p1_parameters(spec).map(|(al, be, a)| p1_exact(al, be, a));
    if let Some(v) = &p1 {
        families.push(("p1_exact".into(), v.clone()));
    }

    let q_grid = q_nonneg(spec, grid)?;

    let cert_q = q_zero || families.iter().any(|(_, v)| v.is_true());
    let false_q = q_grid.is_false() || p1.as_ref().is_some_and(|v| v.is_false());
    let overall = if necessary.is_false() {
        necessary.clone()
    } else if theta_check.is_false() {
        theta_check.clone()
    } else if false_q {
        if q_grid.is_false() {
            q_grid.clone()
        } else {
            p1.clone().unwrap()
        }
    } else if cert_q {
        let via = if q_zero {
            "exact kernel cancellation (Q == 0)".to_string()
        } else {
            families
                .iter()
                .find(|(_, v)| v.is_true())
                .map(|(n, _)| n.clone())
                .unwrap()
        };
        Verdict::certified_true(format!("certified via {via}; theta >= rho and balance hold"))
            .with_condition("lcm_classical")
    } else if q_grid.status == Status::NumericallySupported {
        Verdict::supported(
            "no certificate applies, but grid evidence and asymptotics support Q >= 0",
        )
        .with_condition("lcm_classical")
    } else {
        Verdict::inconclusive("no certificate applies and the grid evidence is incomplete")
            .with_condition("lcm_classical")
    };

    Ok(ClassicalOutcome {
        necessary,
        rho,
        theta,
        theta_check,
        q_identically_zero: q_zero,
        sufficient_families: families,
        q_nonneg: q_grid,
        overall,
    })
}

/// `-(log V)'(x)` from digamma sums (includes the theta term).
pub fn neg_log_v_prime(spec: &RatioSpec, x: f64) -> Result<f64> {
    let mut s = spec.theta().ln();
    for f in &spec.numerator {
        s -= f.weight * f.scale_value * digamma(f.scale_value * x + f.shift)?;
    }
    for f in &spec.denominator {
        s += f.weight * f.scale_value * digamma(f.scale_value * x + f.shift)?;
    }
    Ok(s)
}

/// `(log V)''(x)` from trigamma sums.
pub fn log_v_2prime(spec: &RatioSpec, x: f64) -> Result<f64> {
    let mut s = 0.0;
    for f in &spec.numerator {
        s += f.weight
            * f.scale_value
            * f.scale_value
            * polygamma(1, f.scale_value * x + f.shift)?;
    }
    for f in &spec.denominator {
        s -= f.weight
            * f.scale_value
            * f.scale_value
            * polygamma(1, f.scale_value * x + f.shift)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_spec;
    use approx::assert_relative_eq;

    fn legendre(theta: f64) -> RatioSpec {
        parse_spec(&format!(
            r#"{{"q": "classical", "theta": {theta},
                "numerator": [{{"A": 1, "a": 0.0}}, {{"A": 1, "a": 0.5}}],
                "denominator": [{{"B": 2, "b": 0.0}}]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn q_kernel_identical_lists_vanishes() {
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0.7, "alpha": 2}],
                "denominator": [{"B": 1, "b": 0.7, "beta": 2}]}"#,
        )
        .unwrap();
        for &u in &[0.01, 0.5, 3.0, 40.0] {
            assert_eq!(q_kernel(&spec, u).unwrap(), 0.0);
        }
    }

    #[test]
    fn q_kernel_small_u_limit() {
        // u*Q(u) -> sum alpha A - sum beta B, here 0.
        let spec = legendre(1.0);
        let u = 1e-6;
        let q = q_kernel(&spec, u).unwrap();
        assert!((u * q).abs() < 1e-4, "u*Q = {}", u * q);
        // The same limit for an unbalanced spec.
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 3, "a": 0.2}],
                "denominator": [{"B": 1, "b": 0.1}]}"#,
        )
        .unwrap();
        assert!((u * q_kernel(&spec, u).unwrap() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn q_kernel_single_pair_is_one() {
        // alpha=beta=1, A=B=1, a=0, b=1: Q(u) = (1 - e^{-u})/(1 - e^{-u}).
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0}],
                "denominator": [{"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        for &u in &[0.1, 1.0, 10.0] {
            assert_relative_eq!(q_kernel(&spec, u).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn q_kernel_rejects_nonpositive_u() {
        assert!(q_kernel(&legendre(1.0), 0.0).is_err());
        assert!(q_kernel(&legendre(1.0), -1.0).is_err());
    }

    #[test]
    fn asymptotics_constants() {
        let asym = kernel_asymptotics(&legendre(1.0));
        assert_relative_eq!(asym.leading_coeff_at_0, 0.0, epsilon = 1e-15);
        assert_relative_eq!(asym.const_at_0, 0.0, epsilon = 1e-15);

        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 1}],
                "denominator": [{"B": 1, "b": 0}]}"#,
        )
        .unwrap();
        assert_relative_eq!(kernel_asymptotics(&spec).const_at_0, -1.0, epsilon = 1e-15);

        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0.2}],
                "denominator": [{"B": 1, "b": 0.1}]}"#,
        )
        .unwrap();
        let asym = kernel_asymptotics(&spec);
        assert_eq!(asym.numerator_decay.unwrap().0, 0.2);
        assert_eq!(asym.denominator_decay.unwrap().0, 0.1);
    }

    #[test]
    fn necessary_conditions_legendre() {
        assert!(necessary_conditions(&legendre(0.25)).is_true());
    }

    #[test]
    fn necessary_conditions_unbalanced() {
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 2, "a": 1}],
                "denominator": [{"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        let v = necessary_conditions(&spec);
        assert!(v.is_false());
        assert_eq!(v.condition.as_deref(), Some("balance"));
    }

    #[test]
    fn necessary_conditions_constant_term() {
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 1}],
                "denominator": [{"B": 1, "b": 0}]}"#,
        )
        .unwrap();
        let v = necessary_conditions(&spec);
        assert!(v.is_false());
        assert_eq!(v.condition.as_deref(), Some("(a)"));
    }

    #[test]
    fn necessary_conditions_decay_comparison() {
        // Balanced, constant term fine, but every numerator term decays
        // faster than the slowest denominator term (0.4 > 0.125).
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0.4, "alpha": 4}],
                "denominator": [{"B": 4, "b": 0.5}]}"#,
        )
        .unwrap();
        let v = necessary_conditions(&spec);
        assert!(v.is_false(), "{v:?}");
        assert_eq!(v.condition.as_deref(), Some("(b)"));
    }

    #[test]
    fn rho_values() {
        let ones = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 1}],
                "denominator": [{"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        assert_eq!(entropy_rho(&ones), 1.0);
        let rho = entropy_rho(&legendre(1.0));
        assert!((rho.ln() - 0.25_f64.ln()).abs() < 1e-14);
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 2, "a": 1}],
                "denominator": [{"B": 1, "b": 1}, {"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        assert_relative_eq!(entropy_rho(&spec), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn q_nonneg_legendre_and_p1() {
        let v = q_nonneg(&legendre(0.25), &GridConfig::default()).unwrap();
        assert_eq!(v.status, Status::NumericallySupported, "{v:?}");

        // p = 1 V-hat form, alpha = 1, beta = 2: A = 1, B = 1/2.
        let p1 = |a: f64| {
            parse_spec(&format!(
                r#"{{"q": "classical",
                    "numerator": [{{"A": 1, "a": {a}, "alpha": 1}}],
                    "denominator": [{{"B": "1/2", "b": {a}, "beta": 2}}]}}"#
            ))
            .unwrap()
        };
        let v = q_nonneg(&p1(0.3), &GridConfig::default()).unwrap();
        assert!(v.is_false(), "{v:?}");
        let v = q_nonneg(&p1(0.5), &GridConfig::default()).unwrap();
        assert!(!v.is_false(), "{v:?}");
    }

    #[test]
    fn q_zero_detection_legendre() {
        assert!(q_identically_zero(&legendre(0.25)));

        let not_zero = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0}],
                "denominator": [{"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        assert!(!q_identically_zero(&not_zero));
    }

    #[test]
    fn check_lcm_classical_legendre_family() {
        let out = check_lcm_classical(&legendre(0.25), &GridConfig::default()).unwrap();
        assert!(out.overall.is_true(), "{:?}", out.overall);
        assert!(out.q_identically_zero);
        assert!((out.rho.ln() - 0.25_f64.ln()).abs() < 1e-14);

        let out = check_lcm_classical(&legendre(0.2), &GridConfig::default()).unwrap();
        assert!(out.overall.is_false());
        assert_eq!(out.overall.condition.as_deref(), Some("theta_rho"));

        let unbalanced = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 2, "a": 1}],
                "denominator": [{"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        let out = check_lcm_classical(&unbalanced, &GridConfig::default()).unwrap();
        assert!(out.overall.is_false());
        assert_eq!(out.overall.condition.as_deref(), Some("balance"));
    }

    #[test]
    fn sufficient_old_cases() {
        let boundary = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0}],
                "denominator": [{"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        assert!(sufficient_old(&boundary).is_true());

        let small_b = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0}],
                "denominator": [{"B": 1, "b": 0.5}]}"#,
        )
        .unwrap();
        assert_eq!(sufficient_old(&small_b).status, Status::Inconclusive);

        let two_pair = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0, "alpha": 2}, {"A": 1, "a": 0, "alpha": 1}],
                "denominator": [{"B": 1, "b": 1, "beta": 1}, {"B": 1, "b": 2, "beta": 2}]}"#,
        )
        .unwrap();
        assert!(sufficient_old(&two_pair).is_true());

        // (a) fails (max a_i/A_i = 1.5 > 0), but the pairwise set (b) holds.
        let only_b = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0, "alpha": 2}, {"A": 1, "a": 1.5, "alpha": 1}],
                "denominator": [{"B": 1, "b": 1, "beta": 2}, {"B": 1, "b": 2.5, "beta": 1}]}"#,
        )
        .unwrap();
        let v = sufficient_old(&only_b);
        assert!(v.is_true(), "{v:?}");
        assert_eq!(v.condition.as_deref(), Some("sufficient_old(b)"));
    }

    #[test]
    fn sherman_inequality_cases() {
        let h = StochasticMatrix::new(1, 1, vec![1.0]).unwrap();
        let v = sherman_inequality(&[0.0], &[1.0], &[2.0], &[1.0], &h).unwrap();
        assert!(v.is_true());

        // The simplified corollary's matrix h_{1i} = c_i / D.
        let h = StochasticMatrix::new(1, 2, vec![0.5, 0.5]).unwrap();
        let v = sherman_inequality(&[0.0, 2.0], &[1.5], &[1.0, 1.0], &[2.0], &h).unwrap();
        assert!(v.is_true(), "{v:?}");

        // y below the mixture: one-directional, so Inconclusive.
        let h = StochasticMatrix::new(1, 2, vec![0.5, 0.5]).unwrap();
        let v = sherman_inequality(&[0.0, 2.0], &[0.5], &[1.0, 1.0], &[2.0], &h).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
    }

    #[test]
    fn stochastic_matrix_validation() {
        assert!(StochasticMatrix::new(1, 2, vec![0.7, 0.4]).is_err());
        assert!(StochasticMatrix::new(1, 2, vec![1.2, -0.2]).is_err());
        assert!(StochasticMatrix::new(2, 1, vec![1.0]).is_err());
    }

    #[test]
    fn sherman_sufficient_cases() {
        let pair = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0}],
                "denominator": [{"B": 1, "b": 1}]}"#,
        )
        .unwrap();
        let h = StochasticMatrix::new(1, 1, vec![1.0]).unwrap();
        assert!(sherman_sufficient(&pair, &h).unwrap().is_true());

        let spec = |b: f64| {
            parse_spec(&format!(
                r#"{{"q": "classical",
                    "numerator": [{{"A": 1, "a": 0}}, {{"A": 1, "a": 1}}],
                    "denominator": [{{"B": 1, "b": {b}, "beta": 2}}]}}"#
            ))
            .unwrap()
        };
        let h = StochasticMatrix::new(1, 2, vec![0.5, 0.5]).unwrap();
        assert!(sherman_sufficient(&spec(2.0), &h).unwrap().is_true());
        assert_eq!(
            sherman_sufficient(&spec(1.2), &h).unwrap().status,
            Status::Inconclusive
        );
        let bad = StochasticMatrix::new(1, 1, vec![1.0]).unwrap();
        assert!(sherman_sufficient(&spec(2.0), &bad).is_err());
    }

    #[test]
    fn sherman_auto_cases() {
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0}, {"A": 1, "a": 1}],
                "denominator": [{"B": 1, "b": 2, "beta": 2}]}"#,
        )
        .unwrap();
        assert!(sherman_sufficient_auto(&spec).is_true());
        assert_eq!(
            sherman_sufficient_auto(&legendre(0.25)).status,
            Status::Inconclusive
        );
    }

    #[test]
    fn vhat_cases() {
        let v = vhat_check(&VhatSpec::new(1.0, vec![1.0, 2.0], vec![1.5, 1.5]).unwrap()).unwrap();
        assert!(v.is_true());
        let v = vhat_check(&VhatSpec::new(3.0, vec![1.0, 2.0], vec![1.0, 2.0]).unwrap()).unwrap();
        assert!(v.is_true());
        let v = vhat_check(&VhatSpec::new(1.0, vec![2.0, 1.0], vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        let v = vhat_check(&VhatSpec::new(0.5, vec![1.0], vec![2.0]).unwrap()).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
    }

    #[test]
    fn leblanc_johnson_cases() {
        let spec = |a: f64, theta: f64| {
            parse_spec(&format!(
                r#"{{"q": "classical", "theta": {theta},
                    "numerator": [{{"A": 3, "a": {a}}}, {{"A": 2, "a": {a}}}],
                    "denominator": [{{"B": 1, "b": {a}, "beta": 2}},
                                    {{"B": 1, "b": {a}, "beta": 3}}]}}"#
            ))
            .unwrap()
        };
        let rho = entropy_rho(&spec(0.5, 1.0));
        assert_relative_eq!(rho, 108.0, epsilon = 1e-10);
        assert!(leblanc_johnson_check(&spec(0.5, 108.0)).unwrap().is_true());
        assert_eq!(
            leblanc_johnson_check(&spec(0.4, 108.0)).unwrap().status,
            Status::Inconclusive
        );

        let singleton = parse_spec(
            r#"{"q": "classical", "theta": 4.0,
                "numerator": [{"A": 2, "a": 0.5}],
                "denominator": [{"B": 1, "b": 0.5, "beta": 2}]}"#,
        )
        .unwrap();
        assert!(leblanc_johnson_check(&singleton).unwrap().is_true());

        let mixed = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0.5}],
                "denominator": [{"B": 1, "b": 0.7}]}"#,
        )
        .unwrap();
        assert!(leblanc_johnson_check(&mixed).is_err());
    }

    #[test]
    fn p1_exact_cases() {
        assert!(p1_exact(1.0, 2.0, 0.5).is_true());
        assert!(p1_exact(1.0, 2.0, 0.3).is_false());
        assert!(p1_exact(2.0, 2.0, 0.0).is_true());
        assert!(p1_exact(2.0, 1.0, 0.0).is_true());
        assert!(p1_exact(2.0, 1.0, 0.3).is_false());
    }

    #[test]
    fn p1_exact_matches_kernel_scan() {
        for &alpha in &[0.5, 1.0, 2.0] {
            for &beta in &[0.5, 1.0, 2.0] {
                for &a in &[0.0, 0.3, 0.49, 0.5, 1.0] {
                    let verdict = p1_exact(alpha, beta, a);
                    let mut found = false;
                    for i in 0..4000 {
                        // log-spaced on [1e-6, 1e4]
                        let u = 1e-6 * (1e10_f64.ln() * i as f64 / 3999.0).exp();
                        if q1_kernel(alpha, beta, a, u) < -1e-10 {
                            found = true;
                            break;
                        }
                    }
                    assert_eq!(
                        verdict.is_false(),
                        found,
                        "alpha={alpha} beta={beta} a={a}: verdict {verdict:?}, scan {found}"
                    );
                }
            }
        }
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn representation_and_laplace_checks() {
        // A certified, balanced, nonzero-Q spec.
        let spec = parse_spec(
            r#"{"q": "classical",
                "numerator": [{"A": 1, "a": 0}, {"A": 1, "a": 1}],
                "denominator": [{"B": 1, "b": 2, "beta": 2}]}"#,
        )
        .unwrap();
        let rho = entropy_rho(&spec);
        for &x in &[0.5, 1.0, 3.0] {
            let direct = neg_log_v_prime(&spec, x).unwrap();
            let integral = simpson(
                |u| {
                    if u == 0.0 {
                        (-x * 0.0_f64).exp() * kernel_asymptotics(&spec).const_at_0
                    } else {
                        (-x * u).exp() * q_kernel(&spec, u).unwrap()
                    }
                },
                0.0,
                60.0 / x.min(1.0),
                100_000,
            );
            let rhs = integral + (spec.theta() / rho).ln();
            assert!((direct - rhs).abs() < 1e-7, "x = {x}: {direct} vs {rhs}");

            let second = log_v_2prime(&spec, x).unwrap();
            let lap = simpson(
                |u| {
                    if u == 0.0 {
                        0.0
                    } else {
                        (-x * u).exp() * u * q_kernel(&spec, u).unwrap()
                    }
                },
                0.0,
                60.0 / x.min(1.0),
                100_000,
            );
            assert!((second - lap).abs() < 1e-7, "x = {x}: {second} vs {lap}");
        }
    }
}
