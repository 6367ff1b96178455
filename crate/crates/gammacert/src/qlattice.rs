//! Point-mass measures on the q-lattice.
//!
//! For a q-mode spec the second log-derivative is a Laplace transform of a
//! signed point-mass measure `tau = mu - sigma` supported on
//! `{k * g * log(1/q)}`, one lattice per irrationality class. Complete
//! monotonicity is equivalent to `tau >= 0`, which this module decides by a
//! finite scan over lattice indices plus a geometric-domination certificate
//! for the tail. When every shift is an integer the whole comparison runs
//! in exact big-rational arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed, Zero};

use crate::error::{CertError, Result};
use crate::exact::{integer_multiple_of, rational_gcd, Rational};
use crate::ratio::{RatioSpec, Side};
use crate::verdict::{FamilyReport, Verdict, Witness};

/// One irrationality class's lattice: spacing `step * unit * log(1/q)`,
/// members contributing at multiples of their reduced scale `c`.
#[derive(Clone, Debug)]
pub struct LatticeMeasure {
    pub label: String,
    /// Rational gcd of the scale multipliers within the class.
    pub step: Rational,
    /// Numeric value of the class unit (1 for purely rational classes).
    pub unit_value: f64,
    /// Lcm of the reduced scales; the contribution pattern repeats with
    /// this period in k.
    pub period: u64,
    pub members: Vec<LatticeMember>,
}

#[derive(Clone, Debug)]
pub struct LatticeMember {
    pub side: Side,
    /// Index into the spec's factor list for `side`.
    pub index: usize,
    /// Reduced scale: the member contributes at k divisible by `c`.
    pub c: u64,
    /// Numeric scale value A_i (or B_j).
    pub scale: f64,
    /// Scale divided by the class unit, exact.
    pub mult: Rational,
    pub shift: f64,
    pub weight: f64,
}

impl LatticeMember {
    fn sign(&self) -> f64 {
        match self.side {
            Side::Numerator => 1.0,
            Side::Denominator => -1.0,
        }
    }
}

impl LatticeMeasure {
    /// Indices into `members` contributing at lattice index k.
    pub fn contributors(&self, k: u64) -> Vec<usize> {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| k % m.c == 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Signed mass of tau at lattice index k >= 1:
    /// sum over contributing members of
    /// `sign * weight * scale^2 * n * q^{n*shift} / (1 - q^n)`, n = k/c.
    pub fn mass_at(&self, q: f64, k: u64) -> f64 {
        let mut mass = 0.0;
        for m in &self.members {
            if k % m.c == 0 {
                let n = (k / m.c) as f64;
                let term =
                    m.weight * m.scale * m.scale * n * q.powf(n * m.shift) / (1.0 - q.powf(n));
                mass += m.sign() * term;
            }
        }
        mass
    }

    /// Largest single |contribution| at k; anchors the zero tolerance.
    pub fn contribution_bound(&self, q: f64, k: u64) -> f64 {
        let mut bound: f64 = 0.0;
        for m in &self.members {
            if k % m.c == 0 {
                let n = (k / m.c) as f64;
                let term =
                    m.weight * m.scale * m.scale * n * q.powf(n * m.shift) / (1.0 - q.powf(n));
                bound = bound.max(term.abs());
            }
        }
        bound
    }

    /// Decay exponent of a member's contribution in k: shift / c.
    pub fn tail_exponents(&self) -> Vec<(f64, f64)> {
        self.members
            .iter()
            .map(|m| (m.shift / m.c as f64, m.sign() * m.weight * m.scale * m.scale / m.c as f64))
            .collect()
    }

    /// True when the class supports the exact big-rational path: every
    /// contributing shift is a nonnegative integer.
    pub fn exact_capable(&self) -> bool {
        self.members
            .iter()
            .all(|m| m.shift.fract() == 0.0 && m.shift >= 0.0 && m.shift <= (1u64 << 52) as f64)
    }

    /// Exact signed mass at k, with the common positive factor unit^2
    /// removed (multipliers stand in for absolute scales). The sign agrees
    /// with `mass_at`; the value does whenever the class unit is 1.
    fn mass_at_exact(&self, q: &BigRational, k: u64) -> BigRational {
        let mut mass = BigRational::zero();
        for m in &self.members {
            if k % m.c == 0 {
                let n = k / m.c;
                let mult = big_rational(m.mult);
                let w = BigRational::from_float(m.weight).expect("finite weight");
                let qn = pow_u64(q, n);
                let term = w * &mult * &mult * BigRational::from_integer(BigInt::from(n))
                    * pow_u64(q, n * m.shift as u64)
                    / (BigRational::from_integer(BigInt::from(1)) - qn);
                if m.side == Side::Numerator {
                    mass += term;
                } else {
                    mass -= term;
                }
            }
        }
        mass
    }
}

fn big_rational(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(r.num()), BigInt::from(r.den()))
}

fn pow_u64(q: &BigRational, e: u64) -> BigRational {
    assert!(e <= u32::MAX as u64, "exponent out of range");
    q.clone().pow(e as u32)
}

/// Builds one lattice per irrationality class.
pub fn build_lattices(spec: &RatioSpec) -> Result<Vec<LatticeMeasure>> {
    if spec.is_classical() {
        return Err(CertError::Input("lattice analysis needs a q-mode spec".into()));
    }
    let mut out = Vec::new();
    for class in spec.classes()? {
        let mults: Vec<Rational> = class.members.iter().map(|m| m.mult).collect();
        let step = rational_gcd(&mults)?;
        let mut period: u64 = 1;
        let mut members = Vec::with_capacity(class.members.len());
        for m in &class.members {
            let c = integer_multiple_of(&m.mult, &step).ok_or_else(|| {
                CertError::Precision(format!(
                    "class {:?}: scale {} is not an integer multiple of the gcd {}",
                    class.label, m.mult, step
                ))
            })?;
            period = lcm(period, c)?;
            members.push(LatticeMember {
                side: m.side,
                index: m.index,
                c,
                scale: m.value,
                mult: m.mult,
                shift: m.shift,
                weight: m.weight,
            });
        }
        out.push(LatticeMeasure {
            label: class.label,
            step,
            unit_value: class.unit_value,
            period,
            members,
        });
    }
    Ok(out)
}

fn lcm(a: u64, b: u64) -> Result<u64> {
    let g = gcd(a, b);
    let l = (a / g) as u128 * b as u128;
    if l > 1_000_000 {
        return Err(CertError::Input(format!(
            "lattice period {l} too large; reduce the scale denominators"
        )));
    }
    Ok(l as u64)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Default finite-scan horizon: 64 full periods of the largest lattice.
pub fn default_k_max(spec: &RatioSpec) -> Result<u64> {
    let lattices = build_lattices(spec)?;
    Ok(64 * lattices.iter().map(|l| l.period).max().unwrap_or(1))
}

/// Signed mass of tau at lattice index k for a single-class spec.
pub fn tau_mass(spec: &RatioSpec, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(CertError::Input("lattice index k must be positive".into()));
    }
    let q = spec.q()?.get();
    let lattices = build_lattices(spec)?;
    if lattices.len() != 1 {
        return Err(CertError::Input(format!(
            "tau_mass needs a single irrationality class, spec has {}",
            lattices.len()
        )));
    }
    Ok(lattices[0].mass_at(q, k))
}

/// Support inclusion: every denominator scale must be a positive integer
/// multiple of some numerator scale in the same class.
pub fn support_inclusion(spec: &RatioSpec) -> Result<Verdict> {
    let _ = spec.q()?;
    let classes = spec.classes()?;
    let mut multipliers = Vec::new();
    for class in &classes {
        let nums: Vec<_> = class
            .members
            .iter()
            .filter(|m| m.side == Side::Numerator)
            .collect();
        for den in class.members.iter().filter(|m| m.side == Side::Denominator) {
            // Prefer the largest dividing numerator scale (smallest n).
            let mut best: Option<(usize, u64)> = None;
            for num in &nums {
                if let Some(n) = integer_multiple_of(&den.mult, &num.mult) {
                    if best.map_or(true, |(_, b)| n < b) {
                        best = Some((num.index, n));
                    }
                }
            }
            match best {
                Some((i, n)) => multipliers.push((den.index, i, n)),
                None => {
                    return Ok(Verdict::certified_false(
                        "support_inclusion",
                        format!(
                            "denominator factor {} (scale {}, class {:?}) is not an integer \
                             multiple of any numerator scale in its class",
                            den.index, den.value, class.label
                        ),
                    )
                    .with_witness(Witness::FactorIndex {
                        side: "denominator".into(),
                        index: den.index,
                    }))
                }
            }
        }
    }
    multipliers.sort();
    Ok(Verdict::certified_true("every denominator scale is covered")
        .with_condition("support_inclusion")
        .with_witness(Witness::Multipliers(multipliers)))
}

struct ResidueTail {
    family_key: Vec<usize>,
    residue: u64,
    /// Tail indices start at k1 = first index > k_max in this residue.
    k1: u64,
    certified: bool,
    /// Residue needs an extended scan: a denominator decays slower than
    /// every numerator, so the mass eventually goes negative.
    divergent: bool,
}

/// Condition (2): tau >= 0 at every lattice point. Finite scan up to
/// `k_max`, then per-residue tail certificates.
pub fn mass_condition(spec: &RatioSpec, k_max: u64) -> Result<Verdict> {
    let q = spec.q()?.get();
    let q_big = BigRational::from_float(q).expect("finite q");
    // Identical factor pairs contribute zero net mass but defeat the tail
    // certificate (their tie is exact); cancel them first. Indices in the
    // reports refer to the reduced spec.
    let spec = spec.cancel_identical();
    if spec.denominator.is_empty() {
        return Ok(Verdict::certified_true(
            "after cancellation the denominator is empty; tau is a sum of \
             nonnegative point masses",
        )
        .with_condition("mass_condition"));
    }
    let lattices = build_lattices(&spec)?;
    let max_period = lattices.iter().map(|l| l.period).max().unwrap_or(1);
    if k_max < max_period {
        return Err(CertError::Input(format!(
            "k_max = {k_max} does not cover one full period ({max_period})"
        )));
    }

    let mut families: BTreeMap<Vec<usize>, FamilyReport> = BTreeMap::new();
    for lat in &lattices {
        let has_den = lat.members.iter().any(|m| m.side == Side::Denominator);
        if !has_den {
            continue;
        }
        let exact = lat.exact_capable();

        // Finite scan. Indices without a denominator contribution carry
        // strictly positive mass and are skipped.
        for k in 1..=k_max {
            let den_here: Vec<usize> = lat
                .members
                .iter()
                .filter(|m| m.side == Side::Denominator && k % m.c == 0)
                .map(|m| m.index)
                .collect();
            if den_here.is_empty() {
                continue;
            }
            let negative = if exact {
                lat.mass_at_exact(&q_big, k).is_negative()
            } else {
                let tol = 1e-12 * lat.contribution_bound(q, k);
                lat.mass_at(q, k) < -tol
            };
            if negative {
                return Ok(Verdict::certified_false(
                    "mass_condition",
                    format!("tau mass is negative at lattice index {k} (class {:?})", lat.label),
                )
                .with_witness(Witness::LatticeIndex {
                    class: lat.label.clone(),
                    k,
                    mass: lat.mass_at(q, k),
                }));
            }
        }

        // Tail certificates per residue class of k mod period.
        let mut tails = Vec::new();
        for r in 0..lat.period {
            let den_idx: Vec<usize> = lat
                .members
                .iter()
                .filter(|m| m.side == Side::Denominator && r % m.c == 0)
                .map(|m| m.index)
                .collect();
            if den_idx.is_empty() {
                continue;
            }
            let rem = (k_max + 1) % lat.period;
            let k1 = k_max + 1 + (r + lat.period - rem) % lat.period;
            let (certified, divergent) = tail_certified(lat, q, &q_big, exact, r, k1);
            tails.push(ResidueTail {
                family_key: den_idx,
                residue: r,
                k1,
                certified,
                divergent,
            });
        }

        // Extended scan where the tail provably fails eventually.
        for t in tails.iter().filter(|t| t.divergent) {
            let mut k = t.k1;
            for _ in 0..20_000u32 {
                let tol = 1e-12 * lat.contribution_bound(q, k);
                let mass = lat.mass_at(q, k);
                if mass < -tol {
                    return Ok(Verdict::certified_false(
                        "mass_condition",
                        format!(
                            "a denominator term decays slower than every numerator term; \
                             tau mass is negative at lattice index {k} (class {:?})",
                            lat.label
                        ),
                    )
                    .with_witness(Witness::LatticeIndex {
                        class: lat.label.clone(),
                        k,
                        mass,
                    }));
                }
                k += lat.period;
            }
        }

        for t in &tails {
            let report = families.entry(t.family_key.clone()).or_insert_with(|| FamilyReport {
                denominators: t.family_key.clone(),
                residues: Vec::new(),
                first_k: u64::MAX,
                finite_check_ok: true,
                tail_certified: true,
                exact,
            });
            report.residues.push(t.residue);
            let first = if t.residue == 0 { lat.period } else { t.residue };
            report.first_k = report.first_k.min(first);
            report.tail_certified &= t.certified;
            report.exact &= exact;
        }
    }

    let reports: Vec<FamilyReport> = families.into_values().collect();
    if reports.iter().all(|f| f.tail_certified) {
        Ok(Verdict::certified_true(format!(
            "tau >= 0: finite scan to k_max = {k_max} plus tail certificates for {} famil{}",
            reports.len(),
            if reports.len() == 1 { "y" } else { "ies" }
        ))
        .with_condition("mass_condition")
        .with_witness(Witness::Families(reports)))
    } else {
        Ok(Verdict::inconclusive(format!(
            "no mass violation up to k_max = {k_max}, but the tail certificate \
             failed for at least one family"
        ))
        .with_condition("mass_condition")
        .with_witness(Witness::Families(reports)))
    }
}

/// Attempts the geometric-domination tail certificate for one residue
/// class. Returns (certified, divergent). With eps = shift/c the decay
/// exponent per lattice step, and eps_min the smallest numerator exponent:
/// for k >= k1 in the residue class,
///   num mass  >= sum_{i: eps_i = eps_min} w_i s_i^2 / c_i * k q^{k eps_min}
///   den mass  <= sum_j w_j s_j^2 / c_j * k q^{k eps_j} / (1 - q^{k1/c_j})
/// so a sufficient condition, decreasing in k, is
///   LHS >= sum_j K_j w_j s_j^2 / c_j * q^{k1 (eps_j - eps_min)}.
/// Requires every denominator exponent >= eps_min; otherwise the mass is
/// eventually negative (divergent).
fn tail_certified(
    lat: &LatticeMeasure,
    q: f64,
    q_big: &BigRational,
    exact: bool,
    r: u64,
    k1: u64,
) -> (bool, bool) {
    let nums: Vec<&LatticeMember> = lat
        .members
        .iter()
        .filter(|m| m.side == Side::Numerator && r % m.c == 0)
        .collect();
    let dens: Vec<&LatticeMember> = lat
        .members
        .iter()
        .filter(|m| m.side == Side::Denominator && r % m.c == 0)
        .collect();
    if nums.is_empty() {
        return (false, true);
    }
    let eps = |m: &LatticeMember| m.shift / m.c as f64;
    let eps_min = nums.iter().map(|m| eps(m)).fold(f64::INFINITY, f64::min);
    let eps_eq = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
    if dens.iter().any(|m| eps(m) < eps_min && !eps_eq(eps(m), eps_min)) {
        return (false, true);
    }

    if exact {
        // All shifts are integers, c | k1 for every contributor, so every
        // exponent below is a nonnegative integer and the comparison is
        // exact.
        let lead: Vec<&&LatticeMember> = nums
            .iter()
            .filter(|m| m.shift as u64 * (k1 / m.c) == eps_int_min(&nums, k1))
            .collect();
        let mut lhs = BigRational::zero();
        for m in lead {
            let s = big_rational(m.mult);
            lhs += BigRational::from_float(m.weight).unwrap() * &s * &s
                / BigRational::from_integer(BigInt::from(m.c));
        }
        let e_min = eps_int_min(&nums, k1);
        let mut rhs = BigRational::zero();
        for m in &dens {
            let s = big_rational(m.mult);
            let e = m.shift as u64 * (k1 / m.c);
            debug_assert!(e >= e_min);
            let kj = BigRational::from_integer(BigInt::from(1)) - pow_u64(q_big, k1 / m.c);
            rhs += BigRational::from_float(m.weight).unwrap() * &s * &s
                / BigRational::from_integer(BigInt::from(m.c))
                * pow_u64(q_big, e - e_min)
                / kj;
        }
        (lhs >= rhs, false)
    } else {
        let mut lhs = 0.0;
        for m in nums.iter().filter(|m| eps_eq(eps(m), eps_min)) {
            lhs += m.weight * m.scale * m.scale / m.c as f64;
        }
        let mut rhs = 0.0;
        for m in &dens {
            let kj = 1.0 - q.powf(k1 as f64 / m.c as f64);
            rhs += m.weight * m.scale * m.scale / m.c as f64
                * q.powf(k1 as f64 * (eps(m) - eps_min).max(0.0))
                / kj;
        }
        (lhs >= rhs, false)
    }
}

/// Smallest total decay exponent k1 * shift / c over the given members,
/// as an exact integer (valid when shifts are integers and c | k1).
fn eps_int_min(members: &[&LatticeMember], k1: u64) -> u64 {
    members
        .iter()
        .map(|m| m.shift as u64 * (k1 / m.c))
        .min()
        .expect("nonempty")
}

/// Sufficient condition for paired factors: each denominator sits alone in
/// its class with exactly one numerator, B_j = n_j A_j, b_j >= n_j a_j, and
///   alpha_j / beta_j >= n_j q^{b_j - n_j a_j} (1 - q^{n_j}) / (1 - q).
/// The right side is the m = 1 lattice inequality, which is the binding
/// one under these hypotheses.
pub fn abprime_sufficient(spec: &RatioSpec) -> Result<Verdict> {
    let q = spec.q()?.get();
    let lattices = build_lattices(spec)?;
    let mut pairs = Vec::new();
    for lat in &lattices {
        let nums: Vec<&LatticeMember> = lat
            .members
            .iter()
            .filter(|m| m.side == Side::Numerator)
            .collect();
        let dens: Vec<&LatticeMember> = lat
            .members
            .iter()
            .filter(|m| m.side == Side::Denominator)
            .collect();
        match dens.len() {
            0 => continue,
            1 => {
                if nums.len() != 1 {
                    return Ok(Verdict::inconclusive(format!(
                        "class {:?} pairs one denominator with {} numerators; the paired \
                         sufficient condition needs exactly one",
                        lat.label,
                        nums.len()
                    )));
                }
                let (num, den) = (nums[0], dens[0]);
                match integer_multiple_of(&den.mult, &num.mult) {
                    Some(n) => pairs.push((num, den, n)),
                    None => {
                        return Ok(Verdict::inconclusive(format!(
                            "class {:?}: denominator scale is not an integer multiple \
                             of the paired numerator scale",
                            lat.label
                        )))
                    }
                }
            }
            _ => {
                return Ok(Verdict::inconclusive(format!(
                    "class {:?} holds {} denominator factors; the paired sufficient \
                     condition needs pairwise distinct classes",
                    lat.label,
                    dens.len()
                )))
            }
        }
    }
    if pairs.is_empty() {
        return Ok(Verdict::inconclusive("no numerator/denominator pairs to compare"));
    }
    for (num, den, n) in pairs {
        if den.shift < n as f64 * num.shift {
            return Ok(Verdict::inconclusive(format!(
                "pair (numerator {}, denominator {}): needs shift b >= n*a, got b = {} < {}",
                num.index,
                den.index,
                den.shift,
                n as f64 * num.shift
            )));
        }
        let lhs = num.weight / den.weight;
        let rhs = n as f64 * q.powf(den.shift - n as f64 * num.shift) * (1.0 - q.powi(n as i32))
            / (1.0 - q);
        if lhs < rhs {
            return Ok(Verdict::certified_false(
                "abprime",
                format!(
                    "pair (numerator {}, denominator {}): weight ratio {lhs} falls below \
                     the m = 1 lattice requirement {rhs}",
                    num.index, den.index
                ),
            )
            .with_witness(Witness::Comparison {
                lhs,
                rhs,
                relation: "<".into(),
            }));
        }
    }
    Ok(Verdict::certified_true(
        "every paired weight ratio meets the m = 1 lattice inequality",
    )
    .with_condition("abprime"))
}
