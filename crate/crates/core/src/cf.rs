//! Finite continued fractions, continuants and cylinder intervals.
//!
//! A [`Word`] is `[a_0; a_1, ..., a_n]`. The integer part `a_0` never enters a
//! denominator: the continuant pair of a word only depends on its tail. Every
//! measure built in this crate fixes `a_0 = 0` so that pushforwards live in
//! `[0, 1]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type ExactRat = BigRational;

/// A finite partial-quotient sequence `[head; tail...]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    head: BigUint,
    tail: Vec<BigUint>,
}

impl Word {
    /// Builds a word, rejecting zero tail entries.
    pub fn new(head: BigUint, tail: Vec<BigUint>) -> Result<Self> {
        if let Some(pos) = tail.iter().position(|a| a.is_zero()) {
            return Err(Error::MalformedWord(format!(
                "tail entry {} is zero; partial quotients must be positive",
                pos + 1
            )));
        }
        Ok(Word { head, tail })
    }

    /// Builds a word from machine integers, head first.
    pub fn from_digits(digits: &[u64]) -> Result<Self> {
        let (head, tail) = digits
            .split_first()
            .ok_or_else(|| Error::MalformedWord("empty word".into()))?;
        Word::new(
            BigUint::from(*head),
            tail.iter().map(|&a| BigUint::from(a)).collect(),
        )
    }

    pub fn head(&self) -> &BigUint {
        &self.head
    }

    pub fn tail(&self) -> &[BigUint] {
        &self.tail
    }

    /// Number of entries including the head.
    pub fn len(&self) -> usize {
        self.tail.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Appends one partial quotient.
    pub fn push(&mut self, a: BigUint) -> Result<()> {
        if a.is_zero() {
            return Err(Error::MalformedWord("appended entry is zero".into()));
        }
        self.tail.push(a);
        Ok(())
    }

    pub fn extended(&self, a: BigUint) -> Result<Self> {
        let mut w = self.clone();
        w.push(a)?;
        Ok(w)
    }

    /// `self ⌢ other`: the head of `other` becomes an ordinary entry.
    pub fn concat(&self, other: &Word) -> Result<Self> {
        if other.head.is_zero() {
            return Err(Error::MalformedWord(
                "cannot join a word whose first entry is zero".into(),
            ));
        }
        let mut tail = self.tail.clone();
        tail.push(other.head.clone());
        tail.extend(other.tail.iter().cloned());
        Ok(Word {
            head: self.head.clone(),
            tail,
        })
    }

    /// Sum of all entries, head included.
    pub fn entry_sum(&self) -> BigUint {
        self.tail.iter().fold(self.head.clone(), |acc, a| acc + a)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for a in &self.tail {
            write!(f, ",{a}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',').map(|t| {
            t.trim()
                .parse::<BigUint>()
                .map_err(|_| Error::Parse(format!("bad word entry {t:?}")))
        });
        let head = parts
            .next()
            .ok_or_else(|| Error::Parse("empty word".into()))??;
        let tail = parts.collect::<Result<Vec<_>>>()?;
        Word::new(head, tail)
    }
}

/// Denominators `(q, q')` of a word and of the word with its last entry dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuantPair {
    pub q: BigUint,
    pub q_prev: BigUint,
}

/// Running state of the convergent recurrence.
///
/// Holds `p_k, p_{k-1}, q_k, q_{k-1}` after `k` tail entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergents {
    pub p: BigUint,
    pub p_prev: BigUint,
    pub q: BigUint,
    pub q_prev: BigUint,
    /// Number of tail entries consumed.
    pub steps: usize,
}

impl Convergents {
    pub fn start(head: &BigUint) -> Self {
        Convergents {
            p: head.clone(),
            p_prev: BigUint::one(),
            q: BigUint::one(),
            q_prev: BigUint::zero(),
            steps: 0,
        }
    }

    pub fn push(&mut self, a: &BigUint) {
        let p = a * &self.p + &self.p_prev;
        let q = a * &self.q + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p);
        self.q_prev = std::mem::replace(&mut self.q, q);
        self.steps += 1;
    }

    pub fn push_small(&mut self, a: u64) {
        self.push(&BigUint::from(a));
    }

    pub fn of(w: &Word) -> Self {
        let mut c = Convergents::start(&w.head);
        for a in &w.tail {
            c.push(a);
        }
        c
    }

    pub fn pair(&self) -> ContinuantPair {
        ContinuantPair {
            q: self.q.clone(),
            q_prev: self.q_prev.clone(),
        }
    }

    /// Cylinder of all infinite extensions; needs at least one tail entry.
    pub fn cylinder(&self) -> Result<CylinderInterval> {
        if self.steps == 0 {
            return Err(Error::EmptyTail);
        }
        let a = BigRational::new(BigInt::from(self.p.clone()), BigInt::from(self.q.clone()));
        let b = BigRational::new(
            BigInt::from(&self.p + &self.p_prev),
            BigInt::from(&self.q + &self.q_prev),
        );
        // p/q sits to the left exactly when the tail length is even
        let parity = if self.steps % 2 == 0 { 1 } else { -1 };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        Ok(CylinderInterval { lo, hi, parity })
    }

    /// Midpoint and width of the cylinder as floats.
    pub fn cylinder_f64(&self) -> (f64, f64) {
        let q2 = &self.q + &self.q_prev;
        let left = ratio_f64(&self.p, &self.q);
        let right = ratio_f64(&(&self.p + &self.p_prev), &q2);
        let width = recip_product_f64(&self.q, &q2);
        (0.5 * (left + right), width)
    }
}

/// Interval of reals whose expansion begins with a given word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderInterval {
    pub lo: ExactRat,
    pub hi: ExactRat,
    /// +1 when `p/q` is the left endpoint, -1 otherwise.
    pub parity: i8,
}

impl CylinderInterval {
    pub fn width(&self) -> ExactRat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &ExactRat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &CylinderInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// True when the interiors do not meet.
    pub fn disjoint_interior(&self, other: &CylinderInterval) -> bool {
        self.hi <= other.lo || other.hi <= self.lo
    }
}

pub fn continuant_pair(w: &Word) -> ContinuantPair {
    Convergents::of(w).pair()
}

/// `g(w)` as a reduced rational.
pub fn evaluate(w: &Word) -> ExactRat {
    let c = Convergents::of(w);
    BigRational::new(BigInt::from(c.p), BigInt::from(c.q))
}

pub fn cylinder_interval(w: &Word) -> Result<CylinderInterval> {
    Convergents::of(w).cylinder()
}

/// Continuant `K(a_1, ..., a_n)`, with `K() = 1`.
pub fn continuant(entries: &[u64]) -> BigUint {
    let (mut prev, mut cur) = (BigUint::zero(), BigUint::one());
    for &a in entries {
        let next = &cur * a + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Continuant in machine arithmetic; `None` on overflow.
pub fn continuant_u128(entries: &[u64]) -> Option<u128> {
    let (mut prev, mut cur) = (0u128, 1u128);
    for &a in entries {
        let next = cur.checked_mul(a as u128)?.checked_add(prev)?;
        prev = cur;
        cur = next;
    }
    Some(cur)
}

/// `C_N = log(2(N + 1))`, the joining constant used throughout.
pub fn joining_constant(n: u64) -> f64 {
    (2.0 * (n as f64 + 1.0)).ln()
}

/// `log q(a⌢b) − log q(a) − log q(b)`.
///
/// The head of `b` is its first joined entry and must lie in `1..=n`.
pub fn joining_defect(a: &Word, b: &Word, n: u64) -> Result<LogFloat> {
    let b0 = b.head();
    if b0.is_zero() || *b0 > BigUint::from(n) {
        return Err(Error::PreconditionViolated(format!(
            "first joined entry {b0} is outside 1..={n}"
        )));
    }
    let joined = continuant_pair(&a.concat(b)?).q;
    let split = continuant_pair(a).q * continuant_pair(b).q;
    let defect = match joined.cmp(&split) {
        Ordering::Equal => 0.0,
        _ => ratio_f64(&joined, &split).ln(),
    };
    Ok(LogFloat::from_ln(defect))
}

/// Checks `K(u⌢v) = K(u)K(v) + K(u⁻)K(v⁻)` exactly.
///
/// `u⁻` drops the last entry of `u`, `v⁻` the first entry of `v`.
pub fn continuant_identity_check(u: &[u64], v: &[u64]) -> bool {
    if u.is_empty() || v.is_empty() {
        return false;
    }
    let joined: Vec<u64> = u.iter().chain(v).copied().collect();
    let u_minus = &u[..u.len() - 1];
    let v_minus = &v[1..];
    match (
        continuant_u128(&joined),
        continuant_u128(u),
        continuant_u128(v),
        continuant_u128(u_minus),
        continuant_u128(v_minus),
    ) {
        (Some(k), Some(ku), Some(kv), Some(kum), Some(kvm)) => {
            ku.checked_mul(kv)
                .and_then(|x| kum.checked_mul(kvm).and_then(|y| x.checked_add(y)))
                == Some(k)
        }
        _ => {
            continuant(&joined)
                == continuant(u) * continuant(v) + continuant(u_minus) * continuant(v_minus)
        }
    }
}

/// Signed magnitude stored as a natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFloat {
    /// -1, 0 or +1.
    pub sign: i8,
    /// `ln |x|`; `-inf` for zero.
    pub ln_abs: f64,
}

impl LogFloat {
    pub const ZERO: LogFloat = LogFloat {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogFloat = LogFloat {
        sign: 1,
        ln_abs: 0.0,
    };

    /// Positive number with the given logarithm.
    pub fn from_ln(ln_abs: f64) -> Self {
        LogFloat { sign: 1, ln_abs }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogFloat {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        if n.is_zero() {
            Self::ZERO
        } else {
            Self::from_ln(ln_biguint(n))
        }
    }

    pub fn from_rational(x: &ExactRat) -> Self {
        if x.is_zero() {
            return Self::ZERO;
        }
        let sign = if x.numer().sign() == x.denom().sign() { 1 } else { -1 };
        let num = x.numer().magnitude();
        let den = x.denom().magnitude();
        LogFloat {
            sign,
            ln_abs: ln_biguint(num) - ln_biguint(den),
        }
    }

    pub fn ln(&self) -> f64 {
        self.ln_abs
    }

    /// Value as a float; may overflow to infinity or underflow to zero.
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn recip(&self) -> Self {
        LogFloat {
            sign: self.sign,
            ln_abs: -self.ln_abs,
        }
    }

    pub fn powf(&self, e: f64) -> Self {
        LogFloat {
            sign: self.sign,
            ln_abs: self.ln_abs * e,
        }
    }
}

impl Mul for LogFloat {
    type Output = LogFloat;

    fn mul(self, rhs: LogFloat) -> LogFloat {
        LogFloat {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}

impl Div for LogFloat {
    type Output = LogFloat;

    fn div(self, rhs: LogFloat) -> LogFloat {
        self * rhs.recip()
    }
}

/// `ln n` for an arbitrary-size positive integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_u64().map(|v| (v as f64).ln()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` rounded to a float, robust to operands beyond `f64` range.
pub fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let n = top_bits(num, 64);
    let d = top_bits(den, 64);
    let shift = (nb - n.1 as i64) - (db - d.1 as i64);
    (n.0 as f64 / d.0 as f64) * 2f64.powi(shift as i32)
}

/// `1 / (a b)` as a float, flushing to zero when unrepresentable.
pub fn recip_product_f64(a: &BigUint, b: &BigUint) -> f64 {
    let ln = ln_biguint(a) + ln_biguint(b);
    (-ln).exp()
}

fn top_bits(n: &BigUint, keep: u64) -> (u64, u64) {
    let bits = n.bits();
    if bits <= keep {
        (n.to_u64().unwrap_or(0), bits)
    } else {
        ((n >> (bits - keep)).to_u64().unwrap_or(u64::MAX), keep)
    }
}

/// Formats a rational as `num/den`.
pub fn rat_to_string(x: &ExactRat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `num/den`, a bare integer, or a terminating decimal.
pub fn parse_rat(s: &str) -> Result<ExactRat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_abs = int.trim_start_matches('-');
        let digits = format!("{int_abs}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10u32), frac.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Exact rational value of a finite float.
pub fn rat_from_f64(x: f64) -> Result<ExactRat> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("{x} is not finite")))
}

/// Ceiling of a nonnegative rational.
pub fn ceil_rat(x: &ExactRat) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}
