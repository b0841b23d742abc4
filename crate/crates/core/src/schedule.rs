//! Exceptional indices `i_n`, run lengths `r_n`, weights `w_n` and the
//! superlacunarity and gap conditions.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::assignment::{phi_iter_ln, AssignmentRule, PsiFamily};
use crate::cf::{ceil_rat, ln_biguint, rat_from_f64};
use crate::error::{Error, Result};
use crate::kaufman::NuMeasure;
use crate::profile::{to_f64, Profile};

/// `w_n = 2^{-floor(log2 n)}`.
pub fn weight(n: u64) -> BigRational {
    assert!(n >= 1, "weights start at n = 1");
    let t = 63 - n.leading_zeros() as usize;
    BigRational::new(BigInt::one(), BigInt::from(BigUint::one() << t))
}

/// Weights `w_1, ..., w_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable(pub Vec<BigRational>);

impl WeightTable {
    pub fn new(len: u64) -> Self {
        WeightTable((1..=len).map(weight).collect())
    }

    pub fn get(&self, n: u64) -> &BigRational {
        &self.0[(n - 1) as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleLists {
    pub i: Vec<u64>,
    pub r: Vec<u64>,
}

/// Validated `i_n`, `r_n` together with the parameters they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    i: Vec<u64>,
    r: Vec<u64>,
    pub p: usize,
    pub sigma: f64,
    pub rule: AssignmentRule,
    pub profile: Profile,
}

impl Schedule {
    pub fn new(
        i: Vec<u64>,
        r: Vec<u64>,
        p: usize,
        sigma: f64,
        rule: AssignmentRule,
        profile: Profile,
    ) -> Result<Self> {
        if i.is_empty() {
            return Err(Error::InvalidParameter("schedule has no stages".into()));
        }
        if r.len() < i.len() {
            return Err(Error::InvalidParameter(format!(
                "{} run lengths for {} stages",
                r.len(),
                i.len()
            )));
        }
        if i[0] < 1 {
            return Err(Error::InvalidParameter("i_1 must be at least 1".into()));
        }
        if r.iter().any(|&x| x == 0) {
            return Err(Error::InvalidParameter("run lengths must be positive".into()));
        }
        if r.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("r is not nondecreasing".into()));
        }
        for n in 0..i.len() - 1 {
            if i[n + 1] <= i[n] + r[n] {
                return Err(Error::InvalidParameter(format!(
                    "i_{} = {} does not exceed i_{} + r_{} = {}",
                    n + 2,
                    i[n + 1],
                    n + 1,
                    n + 1,
                    i[n] + r[n]
                )));
            }
        }
        let mut r = r;
        r.truncate(i.len());
        Ok(Schedule {
            i,
            r,
            p,
            sigma,
            rule,
            profile,
        })
    }

    pub fn from_lists(
        lists: &ScheduleLists,
        nu: &NuMeasure,
        rule: AssignmentRule,
        profile: Profile,
    ) -> Result<Self> {
        Schedule::new(
            lists.i.clone(),
            lists.r.clone(),
            nu.p(),
            nu.sigma(),
            rule,
            profile,
        )
    }

    pub fn lists(&self) -> ScheduleLists {
        ScheduleLists {
            i: self.i.clone(),
            r: self.r.clone(),
        }
    }

    pub fn i(&self) -> &[u64] {
        &self.i
    }

    pub fn r(&self) -> &[u64] {
        &self.r
    }

    /// Number of stages.
    pub fn len(&self) -> usize {
        self.i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i.is_empty()
    }

    /// `i_n` for 1-based `n`.
    pub fn i_n(&self, n: usize) -> u64 {
        self.i[n - 1]
    }

    pub fn r_n(&self, n: usize) -> u64 {
        self.r[n - 1]
    }

    /// First block of the typical segment that ends at `i_n`.
    pub fn segment_start(&self, n: usize) -> u64 {
        if n == 1 {
            0
        } else {
            self.i_n(n - 1) + self.r_n(n - 1)
        }
    }

    /// Copy with `i_n` replaced; validation is skipped on purpose.
    pub fn with_index_unchecked(&self, n: usize, value: u64) -> Self {
        let mut s = self.clone();
        s.i[n - 1] = value;
        s
    }
}

/// Builds `i_1, ..., i_depth` from the growth condition.
///
/// Power `ψ` uses `i_{n+1} = ceil(3 (τ-1)^{p r_n} σ i_n)`, raised if needed to
/// satisfy the growth condition itself; other families use the smallest
/// integer satisfying it.
pub fn make_schedule_psi(
    psi: &PsiFamily,
    nu: &NuMeasure,
    r_list: &[u64],
    i1: u64,
    depth: usize,
    profile: Profile,
) -> Result<Schedule> {
    if i1 < 1 || depth < 1 {
        return Err(Error::InvalidParameter("need i_1 >= 1 and depth >= 1".into()));
    }
    if r_list.len() < depth {
        return Err(Error::InvalidParameter(format!(
            "need {depth} run lengths, got {}",
            r_list.len()
        )));
    }
    let sigma = nu.sigma();
    let p = nu.p() as u64;
    let mut i = vec![i1];
    for n in 0..depth - 1 {
        let (i_n, r_n) = (i[n], r_list[n]);
        let pr = p * r_n;
        let floor_next = i_n + r_n + 1;
        let needed = growth_bound_ln(psi, sigma, i_n, pr).map_err(|e| match e {
            Error::Overflow { digits, budget, .. } => Error::Overflow {
                digits,
                budget,
                at: Some(n + 1),
            },
            other => other,
        })?;
        if !needed.is_finite() || needed > 2f64.powi(62) {
            return Err(Error::Overflow {
                digits: needed / std::f64::consts::LN_10,
                budget: crate::budget::DigitBudget::global().0,
                at: Some(n + 1),
            });
        }
        let needed = needed.ceil() as u64;
        let next = match psi {
            PsiFamily::Power { tau } => {
                let base = tau - BigRational::one();
                let factor = num_traits::pow(base, pr as usize);
                let v = BigRational::from_integer(3.into())
                    * factor
                    * rat_from_f64(sigma)?
                    * BigRational::from_integer(i_n.into());
                ceil_rat(&v)
                    .to_u64()
                    .ok_or(Error::Overflow {
                        digits: 20.0,
                        budget: crate::budget::DigitBudget::global().0,
                        at: Some(n + 1),
                    })?
                    .max(needed)
            }
            _ => needed,
        };
        i.push(next.max(floor_next));
    }
    Schedule::new(
        i,
        r_list[..depth].to_vec(),
        nu.p(),
        sigma,
        AssignmentRule::Psi(psi.clone()),
        profile,
    )
}

/// `ln Φ^{pr}(2^{pr-1} e^{2σ i_n})`.
pub fn growth_bound_ln(psi: &PsiFamily, sigma: f64, i_n: u64, pr: u64) -> Result<f64> {
    let start = (pr as f64 - 1.0) * std::f64::consts::LN_2 + 2.0 * sigma * i_n as f64;
    phi_iter_ln(psi, start, pr as usize)
}

/// Per-stage check of the growth condition `i_{n+1} >= ln Φ^{pr_n}(2^{pr_n-1} e^{2σ i_n})`.
pub fn growth_certificate(s: &Schedule) -> Result<Vec<bool>> {
    let psi = s
        .rule
        .psi()
        .ok_or_else(|| Error::InvalidParameter("growth condition needs a ψ rule".into()))?;
    (1..s.len())
        .map(|n| {
            let need = growth_bound_ln(psi, s.sigma, s.i_n(n), s.p as u64 * s.r_n(n))?;
            Ok(s.i_n(n + 1) as f64 >= need)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperlacunaryReport {
    pub holds: bool,
    /// Smallest `n` from which every ratio clears `R`.
    pub n0: Option<usize>,
    /// Smallest `n` whose ratio falls short.
    pub first_failure: Option<usize>,
    pub ratios: Vec<f64>,
}

/// Condition (A) on the finite schedule: `i_{n+1}/(i_n + r_n) >= R` from some `n_0` on.
pub fn check_superlacunary(s: &Schedule, ratio: &BigRational) -> SuperlacunaryReport {
    let ok: Vec<bool> = (1..s.len())
        .map(|n| {
            let lhs = BigRational::new(
                BigInt::from(s.i_n(n + 1)),
                BigInt::from(s.i_n(n) + s.r_n(n)),
            );
            &lhs >= ratio
        })
        .collect();
    let ratios = (1..s.len())
        .map(|n| s.i_n(n + 1) as f64 / (s.i_n(n) + s.r_n(n)) as f64)
        .collect();
    let first_failure = ok.iter().position(|&b| !b).map(|k| k + 1);
    let n0 = match ok.last() {
        Some(false) => None,
        _ => Some(ok.iter().rposition(|&b| !b).map(|k| k + 2).unwrap_or(1)),
    };
    SuperlacunaryReport {
        holds: n0.is_some(),
        n0,
        first_failure,
        ratios,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMode {
    /// Maximum of `φ_{pr_n}` over the enumerated prefix set.
    Exhaustive,
    /// Upper bound `Φ^{pr_n}(2^{pr_n} e^{2σ i_n})`.
    Certified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub gap: u64,
    pub ln_phi_max: f64,
    pub required: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub mode: GapMode,
    pub constant: f64,
    pub rows: Vec<GapRow>,
    pub holds: bool,
}

/// Condition (B) with `max φ` replaced by the certified bound.
pub fn check_gap_condition(s: &Schedule) -> Result<GapReport> {
    let psi = s.rule.psi().ok_or_else(|| {
        Error::InvalidParameter("certified gap bound needs a ψ rule; use the exhaustive check".into())
    })?;
    let ln_phi = |n: usize| -> Result<f64> {
        let pr = s.p as u64 * s.r_n(n);
        let start = pr as f64 * std::f64::consts::LN_2 + 2.0 * s.sigma * s.i_n(n) as f64;
        phi_iter_ln(psi, start, pr as usize)
    };
    gap_report(s, GapMode::Certified, ln_phi)
}

/// Condition (B) with the maximum taken over explicit prefixes of `X_n^*`.
///
/// `max_phi(n)` must return the largest `φ_{p r_n}` over `X_n^*`.
pub fn check_gap_condition_exhaustive(
    s: &Schedule,
    mut max_phi: impl FnMut(usize) -> Result<BigUint>,
) -> Result<GapReport> {
    gap_report(s, GapMode::Exhaustive, |n| Ok(ln_biguint(&max_phi(n)?)))
}

fn gap_report(
    s: &Schedule,
    mode: GapMode,
    mut ln_phi: impl FnMut(usize) -> Result<f64>,
) -> Result<GapReport> {
    let constant = to_f64(&s.profile.gap_constant()) / s.sigma;
    let mut rows = Vec::new();
    for n in 1..s.len().saturating_sub(1) {
        let gap = s.i_n(n + 2).saturating_sub(s.i_n(n + 1));
        let l = ln_phi(n)?;
        let required = constant * l;
        rows.push(GapRow {
            n,
            gap,
            ln_phi_max: l,
            required,
            holds: gap as f64 >= required,
        });
    }
    let holds = rows.iter().all(|r| r.holds);
    Ok(GapReport {
        mode,
        constant,
        rows,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kaufman::build_nu;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn nu_sigma2() -> NuMeasure {
        build_nu(4, 2, 2.0, 0.16).unwrap()
    }

    fn tau3() -> PsiFamily {
        PsiFamily::power(rat(3, 1)).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(weight(1), rat(1, 1));
        assert_eq!(weight(3), rat(1, 2));
        assert_eq!(weight(4), rat(1, 4));
        assert_eq!(weight(7), rat(1, 4));
        let t = WeightTable::new(15);
        let block: BigRational = (8..16).map(|n| t.get(n).clone()).sum();
        assert_eq!(block, rat(1, 1));
    }

    #[test]
    fn power_schedule_closed_form() {
        let s = make_schedule_psi(&tau3(), &nu_sigma2(), &[1, 2, 3], 4, 3, Profile::Desk).unwrap();
        assert_eq!(s.i(), &[4, 96, 9216]);
        assert!(growth_certificate(&s).unwrap().iter().all(|&b| b));
        let one = make_schedule_psi(&tau3(), &nu_sigma2(), &[1], 4, 1, Profile::Desk).unwrap();
        assert_eq!(one.i(), &[4]);
    }

    #[test]
    fn exp_schedule_overflows() {
        let err = make_schedule_psi(&PsiFamily::Exp, &nu_sigma2(), &[1, 1, 1, 1], 1, 4, Profile::Desk)
            .unwrap_err();
        assert!(matches!(err, Error::Overflow { at: Some(_), .. }), "{err:?}");
    }

    #[test]
    fn superlacunary_examples() {
        let s = make_schedule_psi(&tau3(), &nu_sigma2(), &[1, 2, 3], 4, 3, Profile::Desk).unwrap();
        let rep = check_superlacunary(&s, &rat(10, 1));
        assert!(rep.holds);
        assert_eq!(rep.n0, Some(1));
        let rule = AssignmentRule::Psi(tau3());
        let dyadic = Schedule::new(
            (1..=8).map(|n| 1u64 << n).collect(),
            vec![1; 8],
            1,
            1.0,
            rule.clone(),
            Profile::Desk,
        )
        .unwrap();
        let rep = check_superlacunary(&dyadic, &rat(3, 1));
        assert!(!rep.holds);
        assert_eq!(rep.first_failure, Some(1));
        let single = Schedule::new(vec![5], vec![1], 1, 1.0, rule, Profile::Desk).unwrap();
        assert!(check_superlacunary(&single, &rat(3, 1)).holds);
    }

    #[test]
    fn gap_condition_detects_lowered_index() {
        let s = make_schedule_psi(&tau3(), &nu_sigma2(), &[1, 2, 3], 4, 3, Profile::Desk).unwrap();
        assert!(check_gap_condition(&s).unwrap().holds);
        let bad = Schedule::new(vec![4, 96, 100], vec![1, 2, 3], 2, 2.0, s.rule.clone(), Profile::Desk)
            .unwrap();
        assert!(!check_gap_condition(&bad).unwrap().holds);
    }

    #[test]
    fn invalid_schedules_are_rejected() {
        let rule = AssignmentRule::SumOfPrevious;
        assert!(Schedule::new(vec![4, 5], vec![1, 1], 1, 1.0, rule.clone(), Profile::Desk).is_err());
        assert!(Schedule::new(vec![4, 9], vec![2, 1], 1, 1.0, rule, Profile::Desk).is_err());
    }
}
