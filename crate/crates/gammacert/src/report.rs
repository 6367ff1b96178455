//! Report assembly: one structured record per check run, with a named
//! result for every stage that executed, serializable without loss.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classical::{check_lcm_classical, GridConfig};
use crate::error::Result;
use crate::oracle::{lcm_oracle_with, DiffTestConfig};
use crate::qlattice::{default_k_max, mass_condition, support_inclusion};
use crate::qmonotone::{check_bernstein, check_lcm};
use crate::ratio::RatioSpec;
use crate::verdict::Verdict;

/// One entry in the results map: a verdict, a bare number (rho, theta),
/// or the per-family verdict list.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ResultItem {
    Number(f64),
    Families(Vec<(String, Verdict)>),
    Verdict(Verdict),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub spec_echo: RatioSpec,
    pub results: BTreeMap<String, ResultItem>,
    pub overall: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub k_max: Option<u64>,
    pub grid: GridConfig,
    pub with_oracle: bool,
    pub oracle_max_order: u32,
    pub with_timing: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            k_max: None,
            grid: GridConfig::default(),
            with_oracle: false,
            oracle_max_order: 8,
            with_timing: true,
        }
    }
}

/// Runs every applicable stage for the spec's mode and assembles the
/// report. The overall verdict comes from the certification pipeline;
/// the oracle entry is cross-validation only.
pub fn run_check(spec: &RatioSpec, opts: &CheckOptions) -> Result<CheckReport> {
    let mut results = BTreeMap::new();
    let mut timing = BTreeMap::new();
    let stage = |name: &str,
                     timing: &mut BTreeMap<String, f64>,
                     f: &mut dyn FnMut() -> Result<ResultItem>|
     -> Result<ResultItem> {
        let t0 = Instant::now();
        let out = f()?;
        timing.insert(name.to_string(), t0.elapsed().as_secs_f64());
        Ok(out)
    };

    let overall;
    if spec.is_classical() {
        let t0 = Instant::now();
        let out = check_lcm_classical(spec, &opts.grid)?;
        timing.insert("classical".into(), t0.elapsed().as_secs_f64());
        results.insert("necessary".into(), ResultItem::Verdict(out.necessary.clone()));
        results.insert(
            "balance".into(),
            ResultItem::Verdict(crate::classical::balance_check(spec)),
        );
        results.insert("rho".into(), ResultItem::Number(out.rho));
        results.insert("theta".into(), ResultItem::Number(out.theta));
        results.insert(
            "theta_rho".into(),
            ResultItem::Verdict(out.theta_check.clone()),
        );
        results.insert(
            "sufficient_families".into(),
            ResultItem::Families(out.sufficient_families.clone()),
        );
        results.insert(
            "q_nonneg_grid".into(),
            ResultItem::Verdict(out.q_nonneg.clone()),
        );
        overall = out.overall;
    } else {
        let k_max = match opts.k_max {
            Some(k) => k,
            None => default_k_max(spec)?,
        };
        let si = stage("support_inclusion", &mut timing, &mut || {
            support_inclusion(spec).map(ResultItem::Verdict)
        })?;
        results.insert("support_inclusion".into(), si);
        let mc = stage("mass_condition", &mut timing, &mut || {
            mass_condition(spec, k_max).map(ResultItem::Verdict)
        })?;
        results.insert("mass_condition".into(), mc);
        let t0 = Instant::now();
        let lcm = check_lcm(spec, k_max)?;
        timing.insert("lcm_q".into(), t0.elapsed().as_secs_f64());
        results.insert("lcm_q".into(), ResultItem::Verdict(lcm.clone()));
        // The Bernstein boundary check needs strictly positive shifts.
        match check_bernstein(spec, k_max) {
            Ok(v) => {
                results.insert("bernstein_q".into(), ResultItem::Verdict(v));
            }
            Err(crate::error::CertError::Domain(d)) => {
                results.insert(
                    "bernstein_q".into(),
                    ResultItem::Verdict(Verdict::inconclusive(format!("not applicable: {d}"))),
                );
            }
            Err(e) => return Err(e),
        }
        overall = lcm;
    }

    if opts.with_oracle {
        let cfg = DiffTestConfig {
            max_order: opts.oracle_max_order,
            ..DiffTestConfig::default()
        };
        let t0 = Instant::now();
        let v = lcm_oracle_with(spec, &cfg)?;
        timing.insert("oracle".into(), t0.elapsed().as_secs_f64());
        results.insert("oracle".into(), ResultItem::Verdict(v));
    }

    Ok(CheckReport {
        spec_echo: spec.clone(),
        results,
        overall,
        timing: if opts.with_timing { Some(timing) } else { None },
    })
}

impl CheckReport {
    /// Stable JSON form, timings included only when recorded.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, item) in &self.results {
            match item {
                ResultItem::Number(v) => out.push_str(&format!("{name}: {v}\n")),
                ResultItem::Verdict(v) => {
                    out.push_str(&format!("{name}: {:?} — {}\n", v.status, v.detail))
                }
                ResultItem::Families(fams) => {
                    out.push_str(&format!("{name}:\n"));
                    for (fam, v) in fams {
                        out.push_str(&format!("  {fam}: {:?} — {}\n", v.status, v.detail));
                    }
                }
            }
        }
        out.push_str(&format!(
            "overall: {:?} — {}\n",
            self.overall.status, self.overall.detail
        ));
        if let Some(t) = &self.timing {
            for (name, secs) in t {
                out.push_str(&format!("timing {name}: {secs:.6}s\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::verdict::Status;

    #[test]
    fn q_report_has_expected_keys() {
        let spec = corpus::example2(0.5, 0.0, 3.0, 2.0);
        let rep = run_check(&spec, &CheckOptions::default()).unwrap();
        for key in ["support_inclusion", "mass_condition", "lcm_q", "bernstein_q"] {
            assert!(rep.results.contains_key(key), "missing {key}");
        }
        assert!(rep.overall.is_true());
        assert!(rep.timing.is_some());
    }

    #[test]
    fn classical_report_has_expected_keys() {
        let spec = corpus::legendre(0.25);
        let opts = CheckOptions {
            with_oracle: true,
            oracle_max_order: 4,
            ..CheckOptions::default()
        };
        let rep = run_check(&spec, &opts).unwrap();
        for key in [
            "necessary",
            "balance",
            "rho",
            "theta",
            "theta_rho",
            "sufficient_families",
            "q_nonneg_grid",
            "oracle",
        ] {
            assert!(rep.results.contains_key(key), "missing {key}");
        }
        assert!(rep.overall.is_true());
    }

    #[test]
    fn report_round_trips_losslessly() {
        let spec = corpus::legendre(0.2);
        let mut opts = CheckOptions::default();
        opts.with_timing = false;
        let rep = run_check(&spec, &opts).unwrap();
        let json = rep.to_json();
        let back: CheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(rep, back);
        assert_eq!(json, back.to_json());
    }

    #[test]
    fn bernstein_domain_error_becomes_inconclusive_entry() {
        let spec = corpus::example2(0.5, 0.0, 3.0, 2.0);
        let rep = run_check(&spec, &CheckOptions::default()).unwrap();
        match rep.results.get("bernstein_q") {
            Some(ResultItem::Verdict(v)) => {
                assert_eq!(v.status, Status::Inconclusive, "{v:?}")
            }
            other => panic!("unexpected entry {other:?}"),
        }
    }
}
