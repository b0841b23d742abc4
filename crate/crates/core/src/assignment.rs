//! Assignment rules `S`, the forced continuation `ρ, ρ_2, ...`, the
//! denominator maps `φ_r`, and `Φ(q) = 1/(qψ(q))` with its iterates.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::DigitBudget;
use crate::cf::{ceil_rat, ln_biguint, parse_rat, rat_to_string, Convergents, LogFloat, Word};
use crate::error::{Error, Result};

/// Approximation function `ψ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsiFamily {
    /// `ψ(q) = q^{-τ}`, `τ > 2`.
    Power { tau: BigRational },
    /// `ψ(q) = e^{-q}`.
    Exp,
    /// Piecewise constant, right-continuous, knots sorted by `q`.
    Table(Vec<(BigUint, BigRational)>),
}

/// Assignment of admissible next partial quotients to words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignmentRule {
    /// `S(w) = ℕ ∩ [1/(q²ψ(q)), ∞)`.
    Psi(PsiFamily),
    /// `S(w) = {a_0 + ... + a_n}`.
    SumOfPrevious,
}

impl PsiFamily {
    pub fn power(tau: BigRational) -> Result<Self> {
        if tau <= BigRational::from_integer(2.into()) {
            return Err(Error::InvalidParameter(format!(
                "tau = {} must exceed 2",
                rat_to_string(&tau)
            )));
        }
        Ok(PsiFamily::Power { tau })
    }

    pub fn table(mut points: Vec<(BigUint, BigRational)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("psi table is empty".into()));
        }
        points.sort_by(|a, b| a.0.cmp(&b.0));
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!("duplicate knot q = {}", w[0].0)));
            }
        }
        if points.iter().any(|(q, psi)| q.is_zero() || !psi.is_positive()) {
            return Err(Error::InvalidParameter(
                "psi table needs q >= 1 and psi > 0".into(),
            ));
        }
        Ok(PsiFamily::Table(points))
    }

    /// `ψ(q)` for tables; other families have closed forms and never call this.
    fn table_value(points: &[(BigUint, BigRational)], q: &BigUint) -> Result<BigRational> {
        let first = &points[0].0;
        let last = &points[points.len() - 1].0;
        if q < first || q > last {
            return Err(Error::OutsideTable(q.to_string()));
        }
        let k = points.partition_point(|(knot, _)| knot <= q);
        Ok(points[k - 1].1.clone())
    }

    /// `ln ψ(q)`.
    pub fn ln_psi(&self, q: &BigUint) -> Result<f64> {
        let lq = ln_biguint(q);
        Ok(match self {
            PsiFamily::Power { tau } => -crate::profile::to_f64(tau) * lq,
            PsiFamily::Exp => -q.to_f64().unwrap_or(f64::INFINITY),
            PsiFamily::Table(points) => {
                LogFloat::from_rational(&Self::table_value(points, q)?).ln()
            }
        })
    }

    /// `q²ψ(q)` is nonincreasing along the given evaluation points.
    pub fn q2psi_nonincreasing(&self, points: &[BigUint]) -> Result<bool> {
        let mut prev = f64::INFINITY;
        for q in points {
            let v = 2.0 * ln_biguint(q) + self.ln_psi(q)?;
            if v > prev + 1e-12 * prev.abs().max(1.0) {
                return Ok(false);
            }
            prev = v;
        }
        Ok(true)
    }

    /// Exact test of `m q² ψ(q) >= 1`.
    fn admits(&self, q: &BigUint, m: &BigUint) -> Result<bool> {
        if m.is_zero() {
            return Ok(false);
        }
        match self {
            PsiFamily::Power { tau } => {
                let (e, b) = power_exponent(tau);
                if e <= 0 {
                    return Ok(true);
                }
                check_power_digits(q, e, b)?;
                Ok(num_traits::pow(m.clone(), b) >= num_traits::pow(q.clone(), e as usize))
            }
            PsiFamily::Exp => {
                let q2m = q * q * m;
                exp_compare(q, &q2m).map(|ord| ord != std::cmp::Ordering::Greater)
            }
            PsiFamily::Table(points) => {
                let psi = Self::table_value(points, q)?;
                let lhs = BigRational::from_integer(BigInt::from(q * q * m)) * psi;
                Ok(lhs >= BigRational::one())
            }
        }
    }

    /// `max(1, ceil(1/(q²ψ(q))))`.
    fn threshold_ceil(&self, q: &BigUint) -> Result<BigUint> {
        let one = BigUint::one();
        let v = match self {
            PsiFamily::Power { tau } => {
                let (e, b) = power_exponent(tau);
                if e <= 0 {
                    return Ok(one);
                }
                check_power_digits(q, e, b)?;
                let x = num_traits::pow(q.clone(), e as usize);
                let r = x.nth_root(b as u32);
                if num_traits::pow(r.clone(), b) == x {
                    r
                } else {
                    r + 1u32
                }
            }
            PsiFamily::Exp => {
                let qf = q.to_f64().unwrap_or(f64::INFINITY);
                let digits = (qf - 2.0 * ln_biguint(q).max(0.0)) / std::f64::consts::LN_10;
                DigitBudget::global().check_digits(digits, None)?;
                exp_over_square_ceil(q)
            }
            PsiFamily::Table(points) => {
                let psi = Self::table_value(points, q)?;
                let t = BigRational::from_integer(BigInt::from(q * q)) * psi;
                let c = ceil_rat(&t.recip());
                c.to_biguint().unwrap_or_default()
            }
        };
        Ok(v.max(one))
    }
}

/// `τ - 2 = e / b` in lowest terms.
fn power_exponent(tau: &BigRational) -> (i64, usize) {
    let t = tau - BigRational::from_integer(2.into());
    (
        t.numer().to_i64().unwrap_or(i64::MAX),
        t.denom().to_usize().unwrap_or(usize::MAX),
    )
}

fn check_power_digits(q: &BigUint, e: i64, b: usize) -> Result<()> {
    let digits = DigitBudget::digits_of(q) * e as f64;
    // the b-th power of the root carries the same number of digits
    DigitBudget::global().check_digits(digits.max(digits / b as f64), None)
}

/// Bounds `lo <= e^x 2^prec <= hi` for a nonnegative integer `x`.
fn exp_bounds(x: &BigUint, prec: u64) -> (BigUint, BigUint) {
    let guard = 32 + 2 * x.bits();
    let wp = prec + guard;
    let scale = BigUint::one() << wp;
    // e = sum 1/k!
    let mut term = scale.clone();
    let mut lo_e = BigUint::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        lo_e += &term;
        k += 1;
        term /= k;
    }
    let hi_e = &lo_e + BigUint::from(2 * k + 4);
    let mul_lo = |a: &BigUint, b: &BigUint| (a * b) >> wp;
    let mul_hi = |a: &BigUint, b: &BigUint| {
        let p = a * b;
        let (q, r) = p.div_rem(&scale);
        if r.is_zero() {
            q
        } else {
            q + 1u32
        }
    };
    let (mut rl, mut rh) = (scale.clone(), scale.clone());
    let (mut bl, mut bh) = (lo_e, hi_e);
    let mut n = x.clone();
    while !n.is_zero() {
        if n.is_odd() {
            rl = mul_lo(&rl, &bl);
            rh = mul_hi(&rh, &bh);
        }
        n >>= 1;
        if !n.is_zero() {
            bl = mul_lo(&bl, &bl);
            bh = mul_hi(&bh, &bh);
        }
    }
    let lo = &rl >> guard;
    let hi = (&rh >> guard) + 1u32;
    (lo, hi)
}

/// Compares `e^x` with the integer `y`.
fn exp_compare(x: &BigUint, y: &BigUint) -> Result<std::cmp::Ordering> {
    let mut prec = 64 + y.bits();
    for _ in 0..12 {
        let (lo, hi) = exp_bounds(x, prec);
        let ys = y << prec;
        if hi < ys {
            return Ok(std::cmp::Ordering::Less);
        }
        if lo > ys {
            return Ok(std::cmp::Ordering::Greater);
        }
        prec *= 2;
    }
    Err(Error::CertificationFailed(format!(
        "could not separate e^{x} from {y}"
    )))
}

/// `ceil(e^x / x²)` for `x >= 1`.
fn exp_over_square_ceil(x: &BigUint) -> BigUint {
    let x2 = x * x;
    let approx_bits = (x.to_f64().unwrap_or(0.0) / std::f64::consts::LN_2) as u64;
    let mut prec = 64 + x2.bits();
    loop {
        let (lo, hi) = exp_bounds(x, prec + approx_bits);
        let den = &x2 << (prec + approx_bits);
        let c_lo = ceil_div(&lo, &den);
        let c_hi = ceil_div(&hi, &den);
        if c_lo == c_hi {
            return c_lo;
        }
        prec *= 2;
    }
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Incremental state of a word: convergents plus entry sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordState {
    pub conv: Convergents,
    pub sum: BigUint,
}

impl WordState {
    pub fn start(head: &BigUint) -> Self {
        WordState {
            conv: Convergents::start(head),
            sum: head.clone(),
        }
    }

    pub fn of(w: &Word) -> Self {
        WordState {
            conv: Convergents::of(w),
            sum: w.entry_sum(),
        }
    }

    pub fn push(&mut self, a: &BigUint) {
        self.conv.push(a);
        self.sum += a;
    }

    pub fn q(&self) -> &BigUint {
        &self.conv.q
    }
}

impl AssignmentRule {
    pub fn psi(&self) -> Option<&PsiFamily> {
        match self {
            AssignmentRule::Psi(f) => Some(f),
            AssignmentRule::SumOfPrevious => None,
        }
    }

    /// `ρ` of the word described by `state`.
    pub fn rho_state(&self, state: &WordState) -> Result<BigUint> {
        match self {
            AssignmentRule::Psi(f) => f.threshold_ceil(state.q()),
            AssignmentRule::SumOfPrevious => Ok(state.sum.clone().max(BigUint::one())),
        }
    }

    /// Whether `m ∈ S(w)` for the word described by `state`.
    pub fn member_state(&self, state: &WordState, m: &BigUint) -> Result<bool> {
        match self {
            AssignmentRule::Psi(f) => f.admits(state.q(), m),
            AssignmentRule::SumOfPrevious => Ok(*m == state.sum),
        }
    }

    pub fn rho(&self, w: &Word) -> Result<BigUint> {
        self.rho_state(&WordState::of(w))
    }

    pub fn membership(&self, w: &Word, m: &BigUint) -> Result<bool> {
        self.member_state(&WordState::of(w), m)
    }

    /// Appends `ρ, ρ_2, ..., ρ_len` to `state`, returning the appended entries.
    pub fn extend_forced(&self, state: &mut WordState, len: usize) -> Result<Vec<BigUint>> {
        let budget = DigitBudget::global();
        let mut out = Vec::with_capacity(len);
        for step in 0..len {
            let r = self.rho_state(state).map_err(|e| match e {
                Error::Overflow { digits, budget, .. } => Error::Overflow {
                    digits,
                    budget,
                    at: Some(step + 1),
                },
                other => other,
            })?;
            state.push(&r);
            budget.check_digits(DigitBudget::digits_of(state.q()), Some(step + 1))?;
            out.push(r);
        }
        Ok(out)
    }

    /// `ρ_r(w)`.
    pub fn rho_r(&self, w: &Word, r: usize) -> Result<BigUint> {
        if r == 0 {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        let mut state = WordState::of(w);
        self.extend_forced(&mut state, r - 1)?;
        self.rho_state(&state)
    }

    /// `φ_r(w) = q(w ⌢ ρ ⌢ ... ⌢ ρ_r)`.
    pub fn phi_r(&self, w: &Word, r: usize) -> Result<BigUint> {
        if r == 0 {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        let mut state = WordState::of(w);
        self.extend_forced(&mut state, r)?;
        Ok(state.conv.q)
    }

    /// Maximal-window run scan over the prefix of `w`.
    pub fn count_k_runs(&self, w: &Word, k: usize) -> Result<RunCount> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let mut hits = Vec::with_capacity(w.tail().len());
        let mut state = WordState::start(w.head());
        for a in w.tail() {
            hits.push(self.member_state(&state, a)?);
            state.push(a);
        }
        let positions: Vec<usize> = if hits.len() < k {
            Vec::new()
        } else {
            (0..=hits.len() - k)
                .filter(|&s| hits[s..s + k].iter().all(|&h| h))
                .map(|s| s + 1)
                .collect()
        };
        Ok(RunCount {
            k,
            count: positions.len(),
            positions,
        })
    }

    /// Compares `φ_r(w)` with `Φ^r(2^{r-1} q)` and with `Φ^r(2^r q)`.
    pub fn phir_bound_check(&self, w: &Word, r: usize) -> Result<PhirBound> {
        let psi = self.psi().ok_or_else(|| {
            Error::InvalidParameter("the Φ bound needs a ψ-based rule".into())
        })?;
        let phi = match self.phi_r(w, r) {
            Ok(v) => v,
            Err(Error::Overflow { .. }) => return Ok(PhirBound::skipped(r)),
            Err(e) => return Err(e),
        };
        let lq = ln_biguint(&WordState::of(w).conv.q);
        let ln2 = std::f64::consts::LN_2;
        let literal = phi_iter_ln(psi, lq + (r as f64 - 1.0) * ln2, r);
        let corrected = phi_iter_ln(psi, lq + r as f64 * ln2, r);
        let (literal, corrected) = match (literal, corrected) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(Error::Overflow { .. }), _) | (_, Err(Error::Overflow { .. })) => {
                return Ok(PhirBound::skipped(r))
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let lhs = ln_biguint(&phi);
        let tol = 1e-12 * lhs.abs().max(1.0);
        Ok(PhirBound {
            r,
            ln_phi: lhs,
            ln_bound_literal: literal,
            ln_bound: corrected,
            holds_literal: lhs <= literal + tol,
            holds: lhs <= corrected + tol,
            skipped: false,
        })
    }
}

/// `ln Φ(q)` for `q` given by its logarithm.
fn phi_ln(psi: &PsiFamily, ln_q: f64) -> Result<f64> {
    match psi {
        PsiFamily::Power { tau } => Ok((crate::profile::to_f64(tau) - 1.0) * ln_q),
        PsiFamily::Exp => {
            let q = ln_q.exp();
            if !q.is_finite() {
                return Err(Error::Overflow {
                    digits: f64::INFINITY,
                    budget: DigitBudget::global().0,
                    at: None,
                });
            }
            Ok(q - ln_q)
        }
        PsiFamily::Table(_) => {
            let q = ln_q.exp();
            if !q.is_finite() || q > 1e300 {
                return Err(Error::OutsideTable(format!("e^{ln_q}")));
            }
            let qi = BigUint::from(q.round().max(1.0) as u128);
            Ok(-ln_q - psi.ln_psi(&qi)?)
        }
    }
}

/// `Φ(q) = 1/(qψ(q))`.
#[allow(non_snake_case)]
pub fn Phi(psi: &PsiFamily, q: &BigUint) -> Result<LogFloat> {
    if q.is_zero() {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    let lq = ln_biguint(q);
    let ln = match psi {
        PsiFamily::Table(_) => -lq - psi.ln_psi(q)?,
        _ => phi_ln(psi, lq)?,
    };
    Ok(LogFloat::from_ln(ln))
}

/// `Φ^r(q)`; overflow reports the iteration reached.
#[allow(non_snake_case)]
pub fn Phi_iter(psi: &PsiFamily, q: &BigUint, r: usize) -> Result<LogFloat> {
    if q.is_zero() {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    if r == 0 {
        return Ok(LogFloat::from_biguint(q));
    }
    let first = Phi(psi, q)?.ln();
    phi_iter_ln(psi, first, r - 1).map(LogFloat::from_ln)
}

/// `ln Φ^r(Q)` where `ln Q = ln_q`.
pub fn phi_iter_ln(psi: &PsiFamily, ln_q: f64, r: usize) -> Result<f64> {
    let mut x = ln_q;
    for k in 0..r {
        x = phi_ln(psi, x).map_err(|e| match e {
            Error::Overflow { digits, budget, .. } => Error::Overflow {
                digits,
                budget,
                at: Some(k + 1),
            },
            other => other,
        })?;
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhirBound {
    pub r: usize,
    pub ln_phi: f64,
    /// `ln Φ^r(2^{r-1} q)`.
    pub ln_bound_literal: f64,
    /// `ln Φ^r(2^r q)`.
    pub ln_bound: f64,
    pub holds_literal: bool,
    pub holds: bool,
    /// Set when a value left the digit budget; nothing was compared.
    pub skipped: bool,
}

impl PhirBound {
    fn skipped(r: usize) -> Self {
        PhirBound {
            r,
            ln_phi: f64::NAN,
            ln_bound_literal: f64::NAN,
            ln_bound: f64::NAN,
            holds_literal: false,
            holds: false,
            skipped: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunCount {
    pub k: usize,
    pub count: usize,
    /// 1-based indices of run starts.
    pub positions: Vec<usize>,
}

/// JSON form of a rule.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RuleDoc {
    PsiPower { tau: String },
    PsiExp,
    SumOfPrevious,
    UserTable { points: Vec<[String; 2]> },
}

impl Serialize for AssignmentRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = match self {
            AssignmentRule::SumOfPrevious => RuleDoc::SumOfPrevious,
            AssignmentRule::Psi(PsiFamily::Exp) => RuleDoc::PsiExp,
            AssignmentRule::Psi(PsiFamily::Power { tau }) => RuleDoc::PsiPower {
                tau: rat_str(tau),
            },
            AssignmentRule::Psi(PsiFamily::Table(points)) => RuleDoc::UserTable {
                points: points
                    .iter()
                    .map(|(q, psi)| [q.to_string(), rat_str(psi)])
                    .collect(),
            },
        };
        doc.serialize(s)
    }
}

fn rat_str(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        rat_to_string(x)
    }
}

impl<'de> Deserialize<'de> for AssignmentRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = RuleDoc::deserialize(d)?;
        let rule = match doc {
            RuleDoc::SumOfPrevious => AssignmentRule::SumOfPrevious,
            RuleDoc::PsiExp => AssignmentRule::Psi(PsiFamily::Exp),
            RuleDoc::PsiPower { tau } => {
                let tau = parse_rat(&tau).map_err(D::Error::custom)?;
                AssignmentRule::Psi(PsiFamily::power(tau).map_err(D::Error::custom)?)
            }
            RuleDoc::UserTable { points } => {
                let pts = points
                    .iter()
                    .map(|[q, psi]| {
                        let q: BigUint = q
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad table knot {q:?}")))?;
                        Ok((q, parse_rat(psi)?))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(D::Error::custom)?;
                AssignmentRule::Psi(PsiFamily::table(pts).map_err(D::Error::custom)?)
            }
        };
        Ok(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(d: &[u64]) -> Word {
        Word::from_digits(d).unwrap()
    }

    fn tau(n: i64) -> AssignmentRule {
        AssignmentRule::Psi(PsiFamily::power(BigRational::from_integer(n.into())).unwrap())
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn rho_examples() {
        let sum = AssignmentRule::SumOfPrevious;
        assert_eq!(sum.rho(&w(&[0, 1, 2, 3])).unwrap(), big(6));
        assert_eq!(tau(4).rho(&w(&[0, 2])).unwrap(), big(4));
        // q = 1: 1/(q²ψ) = 1
        assert_eq!(tau(3).rho(&w(&[0])).unwrap(), big(1));
        let flat = AssignmentRule::Psi(
            PsiFamily::table(vec![(big(1), BigRational::from_integer(2.into()))]).unwrap(),
        );
        assert_eq!(flat.rho(&w(&[7])).unwrap(), big(1));
    }

    #[test]
    fn rho_r_examples() {
        let sum = AssignmentRule::SumOfPrevious;
        let base = w(&[0, 1]);
        assert_eq!(sum.rho_r(&base, 1).unwrap(), big(1));
        assert_eq!(sum.rho_r(&base, 2).unwrap(), big(2));
        assert_eq!(sum.rho_r(&base, 3).unwrap(), big(4));
        assert_eq!(tau(3).rho_r(&w(&[0, 2]), 1).unwrap(), big(2));
        assert_eq!(tau(3).rho_r(&w(&[0, 2]), 2).unwrap(), big(5));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(tau(4).phi_r(&w(&[0, 2]), 1).unwrap(), big(9));
        assert_eq!(
            AssignmentRule::SumOfPrevious.phi_r(&w(&[0, 1]), 2).unwrap(),
            big(5)
        );
    }

    #[test]
    fn fractional_tau_uses_exact_roots() {
        // τ = 5/2: ρ = ceil(sqrt(q)); q = K(2,2,2,2) = 29
        let rule =
            AssignmentRule::Psi(PsiFamily::power(BigRational::new(5.into(), 2.into())).unwrap());
        assert_eq!(rule.rho(&w(&[0, 2, 2, 2, 2])).unwrap(), big(6));
        // q = K(3, 3) = 10 vs q = K(4) = 4 (perfect square)
        assert_eq!(rule.rho(&w(&[0, 4])).unwrap(), big(2));
    }

    #[test]
    fn exp_rule_ceilings() {
        let rule = AssignmentRule::Psi(PsiFamily::Exp);
        for q in 1u64..=30 {
            let want = ((q as f64).exp() / (q * q) as f64).ceil().max(1.0);
            let got = PsiFamily::Exp.threshold_ceil(&big(q)).unwrap();
            assert_eq!(got.to_f64().unwrap(), want, "q = {q}");
        }
        // q = K(5) = 5: e^5/25 = 5.93...
        assert_eq!(rule.rho(&w(&[0, 5])).unwrap(), big(6));
        assert!(rule.membership(&w(&[0, 5]), &big(6)).unwrap());
        assert!(!rule.membership(&w(&[0, 5]), &big(5)).unwrap());
    }

    #[test]
    fn big_phi_values() {
        let p3 = PsiFamily::power(BigRational::from_integer(3.into())).unwrap();
        assert!((Phi(&p3, &big(10)).unwrap().ln() - 100f64.ln()).abs() < 1e-12);
        assert!((Phi(&PsiFamily::Exp, &big(5)).unwrap().ln() - (5.0 - 5f64.ln())).abs() < 1e-12);
        assert_eq!(Phi(&p3, &big(1)).unwrap().ln(), 0.0);
        assert_eq!(Phi_iter(&p3, &big(10), 0).unwrap().ln(), 10f64.ln());
        assert!((Phi_iter(&p3, &big(10), 2).unwrap().ln() - 4.0 * 10f64.ln()).abs() < 1e-12);
        let e1 = 3f64.exp() / 3.0;
        let want = e1 - e1.ln();
        let got = Phi_iter(&PsiFamily::Exp, &big(3), 2).unwrap().ln();
        assert!((got - want).abs() < 1e-12);
        assert!(matches!(
            Phi_iter(&PsiFamily::Exp, &big(3), 6),
            Err(Error::Overflow { at: Some(_), .. })
        ));
    }

    #[test]
    fn literal_and_corrected_bounds() {
        let b = tau(4).phir_bound_check(&w(&[0, 2]), 1).unwrap();
        // φ = 9 against Φ(2) = 8 and Φ(4) = 64
        assert!(!b.holds_literal);
        assert!(b.holds);
        let b = tau(3).phir_bound_check(&w(&[0, 2]), 2).unwrap();
        assert!(b.holds);
    }

    #[test]
    fn run_counts() {
        let sum = AssignmentRule::SumOfPrevious;
        let word = w(&[0, 1, 1, 2, 4, 8]);
        let rc = sum.count_k_runs(&word, 2).unwrap();
        assert_eq!(rc.count, 3);
        assert_eq!(rc.positions, vec![2, 3, 4]);
        assert_eq!(sum.count_k_runs(&word, 9).unwrap().count, 0);
        assert_eq!(sum.count_k_runs(&w(&[0, 5, 1, 1]), 1).unwrap().count, 0);
    }

    #[test]
    fn table_lookup_is_right_continuous() {
        let table = PsiFamily::table(vec![
            (big(1), BigRational::new(1.into(), 2.into())),
            (big(4), BigRational::new(1.into(), 64.into())),
            (big(10), BigRational::new(1.into(), 1000.into())),
        ])
        .unwrap();
        let rule = AssignmentRule::Psi(table.clone());
        // q = 3 uses ψ = 1/2: 1/(9/2) -> 1
        assert_eq!(rule.rho_state(&state_with_q(3)).unwrap(), big(1));
        // q = 4 uses ψ = 1/64: 64/16 = 4
        assert_eq!(rule.rho_state(&state_with_q(4)).unwrap(), big(4));
        assert!(matches!(
            rule.rho_state(&state_with_q(11)),
            Err(Error::OutsideTable(_))
        ));
        assert!(table.q2psi_nonincreasing(&[big(1), big(4), big(10)]).unwrap());
    }

    fn state_with_q(q: u64) -> WordState {
        WordState::of(&w(&[0, q]))
    }

    #[test]
    fn rule_json() {
        let cases = [
            r#"{"kind":"psi-power","tau":"3"}"#,
            r#"{"kind":"psi-exp"}"#,
            r#"{"kind":"sum-of-previous"}"#,
            r#"{"kind":"user-table","points":[["1","1/2"],["4","1/64"]]}"#,
        ];
        for c in cases {
            let rule: AssignmentRule = serde_json::from_str(c).unwrap();
            assert_eq!(serde_json::to_string(&rule).unwrap(), c);
        }
        assert!(serde_json::from_str::<AssignmentRule>(r#"{"kind":"psi-power","tau":"2"}"#).is_err());
    }
}
