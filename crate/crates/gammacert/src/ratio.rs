//! Problem-instance description: ratios of products of (q-)gamma factors
//! with linear arguments, and their grouping into irrationality classes.
//!
//! JSON schema (authoritative for the CLI):
//! ```json
//! {
//!   "q": 0.5,                 // or "classical"
//!   "theta": 1.0,             // classical mode only, default 1
//!   "numerator":   [{"A": "1/6", "a": 0.0, "alpha": 5.0}],
//!   "denominator": [{"B": "1/3", "b": 3.0, "beta": 1.0},
//!                   {"B": "1/2", "b": 2.0, "beta": 1.0}]
//! }
//! ```
//! Scales are exact rationals (`"p/q"` strings or integers). Float scales
//! are accepted in classical mode, or in q-mode only with an `irr_class`
//! declaration; factors in distinct classes are asserted to have mutually
//! irrational scale ratios, so their lattices never intersect.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CertError, Result};
use crate::exact::Rational;
use crate::specfun::QParam;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Q(QParam),
    Classical { theta: f64 },
}

/// One factor `Gamma^weight(scale * x + shift)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    /// Numeric value of the scale (exact when `scale_rat` is present).
    pub scale_value: f64,
    /// Exact rational scale, when the input supplied one.
    pub scale_rat: Option<Rational>,
    pub shift: f64,
    pub weight: f64,
    pub irr_class: Option<String>,
}

impl GammaFactor {
    pub fn rational(scale: Rational, shift: f64, weight: f64) -> Self {
        GammaFactor {
            scale_value: scale.to_f64(),
            scale_rat: Some(scale),
            shift,
            weight,
            irr_class: None,
        }
    }

    pub fn numeric(scale: f64, shift: f64, weight: f64, irr_class: &str) -> Self {
        GammaFactor {
            scale_value: scale,
            scale_rat: None,
            shift,
            weight,
            irr_class: Some(irr_class.to_string()),
        }
    }

    fn validate(&self, side: &str, idx: usize, classical: bool) -> Result<()> {
        if !(self.scale_value > 0.0) || !self.scale_value.is_finite() {
            return Err(CertError::Input(format!(
                "{side} factor {idx}: scale must be positive"
            )));
        }
        if !(self.weight > 0.0) || !self.weight.is_finite() {
            return Err(CertError::Input(format!(
                "{side} factor {idx}: weight must be positive"
            )));
        }
        if self.shift < 0.0 || !self.shift.is_finite() {
            return Err(CertError::Input(format!(
                "{side} factor {idx}: shift must be nonnegative"
            )));
        }
        if !classical && self.scale_rat.is_none() && self.irr_class.is_none() {
            return Err(CertError::Input(format!(
                "{side} factor {idx}: q-mode scales must be exact rationals \
                 unless an irr_class is declared"
            )));
        }
        Ok(())
    }
}

/// A full problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecFile", into = "SpecFile")]
pub struct RatioSpec {
    pub mode: Mode,
    pub numerator: Vec<GammaFactor>,
    pub denominator: Vec<GammaFactor>,
}

impl RatioSpec {
    pub fn new_q(q: QParam, numerator: Vec<GammaFactor>, denominator: Vec<GammaFactor>) -> Result<Self> {
        let spec = RatioSpec {
            mode: Mode::Q(q),
            numerator,
            denominator,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn new_classical(
        theta: f64,
        numerator: Vec<GammaFactor>,
        denominator: Vec<GammaFactor>,
    ) -> Result<Self> {
        let spec = RatioSpec {
            mode: Mode::Classical { theta },
            numerator,
            denominator,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.numerator.is_empty() && self.denominator.is_empty() {
            return Err(CertError::Input("spec has no factors".into()));
        }
        if let Mode::Classical { theta } = self.mode {
            if !(theta > 0.0) || !theta.is_finite() {
                return Err(CertError::Input("theta must be positive".into()));
            }
        }
        let classical = self.is_classical();
        for (i, f) in self.numerator.iter().enumerate() {
            f.validate("numerator", i, classical)?;
        }
        for (j, f) in self.denominator.iter().enumerate() {
            f.validate("denominator", j, classical)?;
        }
        Ok(())
    }

    pub fn is_classical(&self) -> bool {
        matches!(self.mode, Mode::Classical { .. })
    }

    pub fn q(&self) -> Result<QParam> {
        match self.mode {
            Mode::Q(q) => Ok(q),
            Mode::Classical { .. } => Err(CertError::Input("spec is classical, no q".into())),
        }
    }

    pub fn theta(&self) -> f64 {
        match self.mode {
            Mode::Classical { theta } => theta,
            Mode::Q(_) => 1.0,
        }
    }

    /// `sum alpha_i A_i` over the numerator (numeric).
    pub fn weighted_scale_sum_num(&self) -> f64 {
        self.numerator.iter().map(|f| f.weight * f.scale_value).sum()
    }

    /// `sum beta_j B_j` over the denominator (numeric).
    pub fn weighted_scale_sum_den(&self) -> f64 {
        self.denominator.iter().map(|f| f.weight * f.scale_value).sum()
    }

    /// True when every scale was supplied exactly, so weighted-scale
    /// comparisons can be decided in exact arithmetic.
    pub fn all_scales_rational(&self) -> bool {
        self.numerator
            .iter()
            .chain(self.denominator.iter())
            .all(|f| f.scale_rat.is_some())
    }

    /// Cancels factor pairs identical in (scale, shift, class) across
    /// numerator and denominator by weight subtraction.
    pub fn cancel_identical(&self) -> RatioSpec {
        type Key = (u64, u64, Option<String>);
        let key = |f: &GammaFactor| -> Key {
            (f.scale_value.to_bits(), f.shift.to_bits(), f.irr_class.clone())
        };
        let mut den_pool: BTreeMap<Key, Vec<GammaFactor>> = BTreeMap::new();
        for f in &self.denominator {
            den_pool.entry(key(f)).or_default().push(f.clone());
        }
        let mut numerator = Vec::new();
        for f in &self.numerator {
            let mut remaining = f.weight;
            if let Some(pool) = den_pool.get_mut(&key(f)) {
                while remaining > 0.0 {
                    match pool.last_mut() {
                        Some(d) => {
                            let cancel = remaining.min(d.weight);
                            remaining -= cancel;
                            d.weight -= cancel;
                            if d.weight <= 0.0 {
                                pool.pop();
                            }
                            if remaining == 0.0 {
                                break;
                            }
                        }
                        None => break,
                    }
                }
            }
            if remaining > 0.0 {
                let mut f = f.clone();
                f.weight = remaining;
                numerator.push(f);
            }
        }
        let denominator = den_pool
            .into_values()
            .flatten()
            .filter(|f| f.weight > 0.0)
            .collect();
        RatioSpec {
            mode: self.mode,
            numerator,
            denominator,
        }
    }

    /// Groups factors into irrationality classes and computes the rational
    /// multiplier of each scale with respect to the class unit.
    pub fn classes(&self) -> Result<Vec<IrrClass>> {
        let mut map: BTreeMap<String, Vec<(Side, usize)>> = BTreeMap::new();
        for (i, f) in self.numerator.iter().enumerate() {
            map.entry(f.irr_class.clone().unwrap_or_default())
                .or_default()
                .push((Side::Numerator, i));
        }
        for (j, f) in self.denominator.iter().enumerate() {
            map.entry(f.irr_class.clone().unwrap_or_default())
                .or_default()
                .push((Side::Denominator, j));
        }
        let mut out = Vec::new();
        for (label, refs) in map {
            let factors: Vec<&GammaFactor> = refs
                .iter()
                .map(|&(side, idx)| self.factor(side, idx))
                .collect();
            let all_rational = factors.iter().all(|f| f.scale_rat.is_some());
            let (unit_value, mults) = if all_rational {
                (
                    1.0,
                    factors.iter().map(|f| f.scale_rat.unwrap()).collect::<Vec<_>>(),
                )
            } else {
                // Rationalize mutual ratios against the smallest scale.
                let unit = factors
                    .iter()
                    .map(|f| f.scale_value)
                    .fold(f64::INFINITY, f64::min);
                let mut mults = Vec::with_capacity(factors.len());
                for f in &factors {
                    let ratio = f.scale_value / unit;
                    let r = Rational::approx_from_f64(ratio, 1_000_000, 1e-9).ok_or_else(|| {
                        CertError::Input(format!(
                            "class {label:?}: scale ratio {ratio} not recognizably rational; \
                             split the factors into distinct irr_classes"
                        ))
                    })?;
                    mults.push(r);
                }
                (unit, mults)
            };
            let members = refs
                .iter()
                .zip(mults)
                .map(|(&(side, idx), mult)| {
                    let f = self.factor(side, idx);
                    ClassMember {
                        side,
                        index: idx,
                        mult,
                        value: f.scale_value,
                        shift: f.shift,
                        weight: f.weight,
                    }
                })
                .collect();
            out.push(IrrClass {
                label,
                unit_value,
                members,
            });
        }
        Ok(out)
    }

    pub fn factor(&self, side: Side, idx: usize) -> &GammaFactor {
        match side {
            Side::Numerator => &self.numerator[idx],
            Side::Denominator => &self.denominator[idx],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Numerator,
    Denominator,
}

/// One irrationality class: factors whose scales are mutually rational.
#[derive(Clone, Debug)]
pub struct IrrClass {
    pub label: String,
    /// Numeric value of the common (possibly irrational) unit; scale of
    /// member `m` equals `m.mult * unit_value` up to roundoff.
    pub unit_value: f64,
    pub members: Vec<ClassMember>,
}

#[derive(Clone, Debug)]
pub struct ClassMember {
    pub side: Side,
    /// Index into the side's factor list.
    pub index: usize,
    /// Rational multiplier with respect to the class unit.
    pub mult: Rational,
    /// Numeric scale value.
    pub value: f64,
    pub shift: f64,
    pub weight: f64,
}

// ---------------------------------------------------------------------------
// JSON file schema

#[derive(Serialize, Deserialize)]
struct SpecFile {
    q: QField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default)]
    numerator: Vec<FactorFile>,
    #[serde(default)]
    denominator: Vec<FactorFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum QField {
    Number(f64),
    Marker(String),
}

#[derive(Serialize, Deserialize)]
struct FactorFile {
    #[serde(rename = "A", alias = "B")]
    scale: ScaleField,
    #[serde(default, rename = "a", alias = "b")]
    shift: f64,
    #[serde(default = "one", rename = "alpha", alias = "beta")]
    weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    irr_class: Option<String>,
}

fn one() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScaleField {
    Number(f64),
    Rat(String),
}

impl TryFrom<FactorFile> for GammaFactor {
    type Error = CertError;
    fn try_from(f: FactorFile) -> Result<GammaFactor> {
        let (scale_value, scale_rat) = match f.scale {
            ScaleField::Rat(s) => {
                let r: Rational = s.parse()?;
                (r.to_f64(), Some(r))
            }
            ScaleField::Number(x) => {
                if x.fract() == 0.0 && x >= 0.0 && x <= u64::MAX as f64 {
                    let r = Rational::integer(x as u64);
                    (x, Some(r))
                } else {
                    (x, None)
                }
            }
        };
        Ok(GammaFactor {
            scale_value,
            scale_rat,
            shift: f.shift,
            weight: f.weight,
            irr_class: f.irr_class,
        })
    }
}

impl From<GammaFactor> for FactorFile {
    fn from(f: GammaFactor) -> FactorFile {
        let scale = match f.scale_rat {
            Some(r) => ScaleField::Rat(r.to_string()),
            None => ScaleField::Number(f.scale_value),
        };
        FactorFile {
            scale,
            shift: f.shift,
            weight: f.weight,
            irr_class: f.irr_class,
        }
    }
}

impl TryFrom<SpecFile> for RatioSpec {
    type Error = CertError;
    fn try_from(file: SpecFile) -> Result<RatioSpec> {
        let mode = match file.q {
            QField::Marker(s) if s == "classical" => Mode::Classical {
                theta: file.theta.unwrap_or(1.0),
            },
            QField::Marker(s) => {
                return Err(CertError::Input(format!(
                    "field q must be a number in (0,1) or the string \"classical\", got {s:?}"
                )))
            }
            QField::Number(q) => Mode::Q(QParam::new(q)?),
        };
        let numerator = file
            .numerator
            .into_iter()
            .map(GammaFactor::try_from)
            .collect::<Result<Vec<_>>>()?;
        let denominator = file
            .denominator
            .into_iter()
            .map(GammaFactor::try_from)
            .collect::<Result<Vec<_>>>()?;
        let spec = RatioSpec {
            mode,
            numerator,
            denominator,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<RatioSpec> for SpecFile {
    fn from(spec: RatioSpec) -> SpecFile {
        let (q, theta) = match spec.mode {
            Mode::Q(q) => (QField::Number(q.get()), None),
            Mode::Classical { theta } => (QField::Marker("classical".into()), Some(theta)),
        };
        SpecFile {
            q,
            theta,
            numerator: spec.numerator.into_iter().map(FactorFile::from).collect(),
            denominator: spec.denominator.into_iter().map(FactorFile::from).collect(),
        }
    }
}

/// Parses a spec from JSON text.
pub fn parse_spec(json: &str) -> Result<RatioSpec> {
    serde_json::from_str(json).map_err(|e| CertError::Input(format!("malformed spec: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_q_spec_with_rational_scales() {
        let spec = parse_spec(
            r#"{"q": 0.5,
                "numerator": [{"A": "1/6", "a": 0.0, "alpha": 5.0}],
                "denominator": [{"B": "1/3", "b": 3.0, "beta": 1.0},
                                {"B": "1/2", "b": 2.0, "beta": 1.0}]}"#,
        )
        .unwrap();
        assert_eq!(spec.numerator.len(), 1);
        assert_eq!(spec.denominator.len(), 2);
        assert_eq!(
            spec.denominator[0].scale_rat.unwrap(),
            Rational::new(1, 3).unwrap()
        );
        assert!((spec.weighted_scale_sum_num() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn float_scale_rejected_in_q_mode_without_class() {
        let err = parse_spec(
            r#"{"q": 0.5, "numerator": [{"A": 0.7071, "a": 0, "alpha": 1}]}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn float_scale_allowed_with_irr_class() {
        let spec = parse_spec(
            r#"{"q": 0.5,
                "numerator": [{"A": 0.7071067811865476, "a": 0, "alpha": 1, "irr_class": "u"}],
                "denominator": [{"B": 1.4142135623730951, "b": 3, "beta": 2, "irr_class": "u"}]}"#,
        )
        .unwrap();
        let classes = spec.classes().unwrap();
        assert_eq!(classes.len(), 1);
        let c = &classes[0];
        assert_eq!(c.members[0].mult, Rational::integer(1));
        assert_eq!(c.members[1].mult, Rational::integer(2));
    }

    #[test]
    fn classical_spec_parses_with_theta() {
        let spec = parse_spec(
            r#"{"q": "classical", "theta": 0.25,
                "numerator": [{"A": 1, "a": 0.0}, {"A": 1, "a": 0.5}],
                "denominator": [{"B": 2, "b": 0.0}]}"#,
        )
        .unwrap();
        assert!(spec.is_classical());
        assert_eq!(spec.theta(), 0.25);
        assert_eq!(spec.numerator[1].weight, 1.0);
    }

    #[test]
    fn spec_roundtrips_through_json() {
        let text = r#"{"q": 0.5,
            "numerator": [{"A": "1/6", "a": 1.5, "alpha": 5.0}],
            "denominator": [{"B": "1/3", "b": 3.0, "beta": 1.0}]}"#;
        let spec = parse_spec(text).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let again: RatioSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn cancel_identical_removes_matched_pairs() {
        let spec = parse_spec(
            r#"{"q": 0.5,
                "numerator": [{"A": 1, "a": 2.0, "alpha": 1.0}],
                "denominator": [{"B": 1, "b": 2.0, "beta": 1.0}]}"#,
        )
        .unwrap();
        let reduced = spec.cancel_identical();
        assert!(reduced.numerator.is_empty());
        assert!(reduced.denominator.is_empty());
    }

    #[test]
    fn cancel_identical_keeps_residual_weight() {
        let spec = parse_spec(
            r#"{"q": 0.5,
                "numerator": [{"A": 1, "a": 2.0, "alpha": 1.0}],
                "denominator": [{"B": 1, "b": 2.0, "beta": 3.0}]}"#,
        )
        .unwrap();
        let reduced = spec.cancel_identical();
        assert!(reduced.numerator.is_empty());
        assert_eq!(reduced.denominator.len(), 1);
        assert!((reduced.denominator[0].weight - 2.0).abs() < 1e-15);
    }

    #[test]
    fn malformed_spec_is_input_error() {
        assert!(parse_spec(r#"{"q": 1.5, "numerator": []}"#).is_err());
        assert!(parse_spec("not json").is_err());
        assert!(parse_spec(r#"{"q": "classic"}"#).is_err());
    }
}
