//! Golden example corpus: the worked ratio families this crate certifies,
//! as programmatic builders plus a batch runner used for cross-validation.

use serde::{Deserialize, Serialize};

use crate::classical::{check_lcm_classical, GridConfig};
use crate::error::Result;
use crate::oracle::{lcm_oracle_with, DiffTestConfig};
use crate::qlattice::default_k_max;
use crate::qmonotone::check_lcm;
use crate::ratio::{parse_spec, RatioSpec};
use crate::verdict::Verdict;

/// Single gamma-pair q-ratio with unit scales:
/// `Gamma_q(x + a)^alpha / Gamma_q(x + b)^beta`.
pub fn example1(q: f64, alpha: f64, beta: f64, a: f64, b: f64) -> RatioSpec {
    parse_spec(&format!(
        r#"{{"q": {q},
            "numerator": [{{"A": 1, "a": {a}, "alpha": {alpha}}}],
            "denominator": [{{"B": 1, "b": {b}, "beta": {beta}}}]}}"#
    ))
    .unwrap()
}

/// Three-factor q-ratio on rational scales 1/6, 1/3, 1/2 with weights
/// (5, 1, 1) and shifts (a, b, c).
pub fn example2(q: f64, a: f64, b: f64, c: f64) -> RatioSpec {
    parse_spec(&format!(
        r#"{{"q": {q},
            "numerator": [{{"A": "1/6", "a": {a}, "alpha": 5.0}}],
            "denominator": [{{"B": "1/3", "b": {b}, "beta": 1.0}},
                            {{"B": "1/2", "b": {c}, "beta": 1.0}}]}}"#
    ))
    .unwrap()
}

/// Four-class q-ratio mixing irrational scale units sqrt(2), sqrt(3), pi
/// and 1; denominator shifts are tied to the first two numerator shifts as
/// (2 a1 + 3, 5 a2 + 5) and beta2 is fixed at 2.
pub fn example3(q: f64, a: [f64; 4], beta1: f64) -> RatioSpec {
    let s2 = std::f64::consts::SQRT_2;
    let s3 = 3.0_f64.sqrt();
    parse_spec(&format!(
        r#"{{"q": {q},
            "numerator": [{{"A": {}, "a": {}, "irr_class": "u"}},
                          {{"A": {}, "a": {}, "irr_class": "v"}},
                          {{"A": {}, "a": {}, "irr_class": "w"}},
                          {{"A": 1, "a": {}, "irr_class": "z"}}],
            "denominator": [{{"B": {}, "b": {}, "beta": {beta1}, "irr_class": "u"}},
                            {{"B": {}, "b": {}, "beta": 2, "irr_class": "v"}}]}}"#,
        s2 / 2.0,
        a[0],
        s3 / 5.0,
        a[1],
        std::f64::consts::PI,
        a[2],
        a[3],
        s2,
        2.0 * a[0] + 3.0,
        s3,
        5.0 * a[1] + 5.0,
    ))
    .unwrap()
}

/// The duplication-formula family
/// `theta^{-x} Gamma(x) Gamma(x + 1/2) / Gamma(2x)`, l.c.m. iff
/// theta >= 1/4.
pub fn legendre(theta: f64) -> RatioSpec {
    parse_spec(&format!(
        r#"{{"q": "classical", "theta": {theta},
            "numerator": [{{"A": 1, "a": 0.0}}, {{"A": 1, "a": 0.5}}],
            "denominator": [{{"B": 2, "b": 0.0}}]}}"#
    ))
    .unwrap()
}

/// The normalized hat-ratio: factors `Gamma(a + x/alpha_j)^{alpha_j}`
/// over `Gamma(a + x/beta_j)^{beta_j}` with the entropy-matching
/// geometric factor theta = prod beta_j / alpha_j.
pub fn vhat_spec(a: f64, alphas: &[f64], betas: &[f64]) -> Result<RatioSpec> {
    if alphas.len() != betas.len() {
        return Err(crate::error::CertError::Input(
            "alpha/beta length mismatch".into(),
        ));
    }
    let theta: f64 = alphas
        .iter()
        .zip(betas)
        .map(|(&al, &be)| be / al)
        .product();
    let factors = |ws: &[f64], key: char| -> String {
        ws.iter()
            .map(|&w| format!(r#"{{"{}": {}, "{}": {a}, "{}": {w}}}"#,
                if key == 'A' { "A" } else { "B" },
                1.0 / w,
                if key == 'A' { "a" } else { "b" },
                if key == 'A' { "alpha" } else { "beta" }))
            .collect::<Vec<_>>()
            .join(", ")
    };
    parse_spec(&format!(
        r#"{{"q": "classical", "theta": {theta},
            "numerator": [{}],
            "denominator": [{}]}}"#,
        factors(alphas, 'A'),
        factors(betas, 'B'),
    ))
}

/// The p = 1 hat-ratio.
pub fn p1_spec(alpha: f64, beta: f64, a: f64) -> RatioSpec {
    vhat_spec(a, &[alpha], &[beta]).unwrap()
}

/// The hat-ratio without its geometric factor (theta = 1); this is the
/// object whose log-derivative is a Bernstein function under the
/// partial-sum condition.
pub fn w_hat_spec(a: f64, alphas: &[f64], betas: &[f64]) -> Result<RatioSpec> {
    let mut spec = vhat_spec(a, alphas, betas)?;
    spec.mode = crate::ratio::Mode::Classical { theta: 1.0 };
    Ok(spec)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub certificate: Verdict,
    pub oracle: Option<Verdict>,
}

/// Runs the golden corpus through the appropriate certification pipeline,
/// optionally cross-validating each entry against the numerical oracle.
pub fn run_corpus(with_oracle: bool) -> Result<Vec<CorpusEntry>> {
    let mut specs: Vec<(String, RatioSpec)> = vec![
        ("example1 q=0.5 boundary".into(), example1(0.5, 1.0, 2.0, 0.0, 1.0)),
        ("example2 q=0.5".into(), example2(0.5, 0.0, 3.0, 2.0)),
        (
            "example3 q=0.5".into(),
            example3(0.5, [0.7, 0.7, 0.7, 0.7], 2.0),
        ),
        ("legendre theta=0.25".into(), legendre(0.25)),
        ("legendre theta=0.2".into(), legendre(0.2)),
    ];
    for &(alpha, beta, a) in &[(1.0, 2.0, 0.5), (1.0, 2.0, 1.0), (1.0, 2.0, 0.3), (2.0, 1.0, 0.0)]
    {
        specs.push((
            format!("p1 alpha={alpha} beta={beta} a={a}"),
            p1_spec(alpha, beta, a),
        ));
    }
    let mut out = Vec::new();
    for (name, spec) in specs {
        let certificate = if spec.is_classical() {
            check_lcm_classical(&spec, &GridConfig::default())?.overall
        } else {
            check_lcm(&spec, default_k_max(&spec)?)?
        };
        let oracle = if with_oracle {
            let cfg = DiffTestConfig {
                max_order: 6,
                steps: vec![0.1, 0.5],
                x_grid: crate::oracle::log_grid(0.1, 20.0, 24),
                viol_tol: 1e-9,
            };
            Some(lcm_oracle_with(&spec, &cfg)?)
        } else {
            None
        };
        out.push(CorpusEntry {
            name,
            certificate,
            oracle,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Status;

    #[test]
    fn builders_produce_valid_specs() {
        assert_eq!(example1(0.5, 1.0, 2.0, 0.3, 1.2).numerator.len(), 1);
        assert_eq!(example2(0.5, 0.0, 3.0, 2.0).denominator.len(), 2);
        let e3 = example3(0.5, [0.7, 0.7, 0.0, 0.0], 2.0);
        assert_eq!(e3.numerator.len(), 4);
        assert_eq!(e3.denominator[0].shift, 4.4);
        assert_eq!(e3.denominator[1].shift, 8.5);
        assert!(legendre(0.25).is_classical());
    }

    #[test]
    fn vhat_spec_is_balanced_with_entropy_theta() {
        let spec = vhat_spec(1.0, &[1.0, 2.0], &[1.5, 1.5]).unwrap();
        let lhs = spec.weighted_scale_sum_num();
        let rhs = spec.weighted_scale_sum_den();
        assert!((lhs - rhs).abs() < 1e-12);
        let rho = crate::classical::entropy_rho(&spec);
        assert!((spec.theta() - rho).abs() < 1e-12 * rho);
    }

    #[test]
    fn corpus_runs_clean_without_oracle() {
        let entries = run_corpus(false).unwrap();
        assert!(entries.len() >= 9);
        let by_name = |n: &str| {
            entries
                .iter()
                .find(|e| e.name == n)
                .unwrap_or_else(|| panic!("missing {n}"))
        };
        assert!(by_name("example2 q=0.5").certificate.is_true());
        assert!(by_name("example3 q=0.5").certificate.is_true());
        assert!(by_name("legendre theta=0.25").certificate.is_true());
        assert!(by_name("legendre theta=0.2").certificate.is_false());
        assert!(by_name("p1 alpha=1 beta=2 a=0.3").certificate.is_false());
    }

    #[test]
    fn corpus_certificates_and_oracle_never_contradict() {
        for e in run_corpus(true).unwrap() {
            let o = e.oracle.as_ref().unwrap();
            assert!(
                !(e.certificate.is_true() && o.is_false()),
                "{}: certificate true but oracle found {o:?}",
                e.name
            );
            if e.certificate.is_false() {
                assert!(o.is_false(), "{}: certificate false but oracle clean", e.name);
            }
        }
    }
}
