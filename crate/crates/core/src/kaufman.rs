//! The block measure `ν`: uniform on `p`-tuples over `{1..N}` whose continuant
//! sits in a relative window around `e^σ`, together with its finite products,
//! top-half splits and ball-mass scans.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::{DEFAULT_CYLINDER_BUDGET, DEFAULT_ENUMERATION_BUDGET};
use crate::cf::{continuant, continuant_u128, joining_constant, ln_biguint, Convergents};
use crate::error::{Error, Result};
use crate::profile::{to_f64, Profile};

/// Uniform measure on the continuant window set.
#[derive(Debug, Clone, PartialEq)]
pub struct NuMeasure {
    n: u64,
    p: usize,
    sigma: f64,
    eps_window: f64,
    /// Support tuples, flattened and in lexicographic order.
    digits: Vec<u64>,
    k_min: u128,
    k_max: u128,
    beta_achieved: f64,
}

fn in_window(k: u128, sigma: f64, eps: f64) -> bool {
    ((k as f64).ln() - sigma).abs() <= eps * sigma
}

fn validate_params(n: u64, p: usize, sigma: f64, eps: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} must be at least 2")));
    }
    if p < 1 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma} must be positive")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps_window = {eps} must lie in (0, 1)"
        )));
    }
    Ok(())
}

fn check_enumeration(n: u64, p: usize, budget: u64) -> Result<()> {
    let requested = (n as f64).powi(p as i32);
    if requested > budget as f64 {
        return Err(Error::BudgetExceeded {
            requested,
            budget: budget as f64,
        });
    }
    Ok(())
}

/// Visits every tuple of `{1..n}^p` in lexicographic order.
fn for_each_tuple(n: u64, p: usize, mut f: impl FnMut(&[u64])) {
    let mut t = vec![1u64; p];
    loop {
        f(&t);
        let mut k = p;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if t[k] < n {
                t[k] += 1;
                break;
            }
            t[k] = 1;
        }
    }
}

/// Builds `ν` with the default enumeration budget.
pub fn build_nu(n: u64, p: usize, sigma: f64, eps_window: f64) -> Result<NuMeasure> {
    build_nu_with_budget(n, p, sigma, eps_window, DEFAULT_ENUMERATION_BUDGET)
}

pub fn build_nu_with_budget(
    n: u64,
    p: usize,
    sigma: f64,
    eps_window: f64,
    budget: u64,
) -> Result<NuMeasure> {
    validate_params(n, p, sigma, eps_window)?;
    check_enumeration(n, p, budget)?;
    let mut digits = Vec::new();
    let (mut k_min, mut k_max) = (u128::MAX, 0u128);
    for_each_tuple(n, p, |t| {
        let k = continuant_u128(t).expect("continuant of an in-budget tuple fits in u128");
        if in_window(k, sigma, eps_window) {
            digits.extend_from_slice(t);
            k_min = k_min.min(k);
            k_max = k_max.max(k);
        }
    });
    if digits.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let size = digits.len() / p;
    let nu = NuMeasure {
        n,
        p,
        sigma,
        eps_window,
        digits,
        k_min,
        k_max,
        beta_achieved: (size as f64).ln() / sigma,
    };
    nu.verify_window()?;
    Ok(nu)
}

/// Lower median of `ln K` over all of `{1..n}^p`.
pub fn median_log_continuant(n: u64, p: usize) -> Result<f64> {
    if n < 1 || p < 1 {
        return Err(Error::InvalidParameter("need N >= 1 and p >= 1".into()));
    }
    check_enumeration(n, p, DEFAULT_ENUMERATION_BUDGET)?;
    let mut ks = Vec::with_capacity((n as usize).pow(p as u32));
    for_each_tuple(n, p, |t| ks.push(continuant_u128(t).unwrap_or(u128::MAX)));
    ks.sort_unstable();
    Ok((ks[(ks.len() - 1) / 2] as f64).ln())
}

impl NuMeasure {
    #[allow(non_snake_case)]
    pub fn N(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eps_window(&self) -> f64 {
        self.eps_window
    }

    pub fn beta_achieved(&self) -> f64 {
        self.beta_achieved
    }

    /// Number of support tuples.
    pub fn len(&self) -> usize {
        self.digits.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn tuple(&self, index: usize) -> &[u64] {
        &self.digits[index * self.p..(index + 1) * self.p]
    }

    pub fn tuples(&self) -> impl ExactSizeIterator<Item = &[u64]> + '_ {
        self.digits.chunks_exact(self.p)
    }

    /// Smallest and largest continuant in the support.
    pub fn continuant_range(&self) -> (u128, u128) {
        (self.k_min, self.k_max)
    }

    pub fn atom_mass(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.len()))
    }

    /// Position of `t` in the support, if present.
    pub fn index_of(&self, t: &[u64]) -> Option<usize> {
        if t.len() != self.p {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.tuple(mid).cmp(t) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Index of a block given as big integers.
    pub fn index_of_big(&self, t: &[BigUint]) -> Option<usize> {
        let small: Option<Vec<u64>> = t.iter().map(|a| a.to_u64()).collect();
        self.index_of(&small?)
    }

    pub fn contains(&self, t: &[u64]) -> bool {
        self.index_of(t).is_some()
    }

    /// Re-derives every support continuant exactly and checks it against the window.
    pub fn verify_window(&self) -> Result<()> {
        let mut prev: Option<&[u64]> = None;
        for (i, t) in self.tuples().enumerate() {
            if t.iter().any(|&a| a == 0 || a > self.n) {
                return Err(Error::NotInSupport { index: i });
            }
            if let Some(prev) = prev {
                if prev >= t {
                    return Err(Error::InvalidParameter(format!(
                        "support is not strictly increasing at tuple {i}"
                    )));
                }
            }
            let k = continuant(t);
            let lnk = ln_biguint(&k);
            if (lnk - self.sigma).abs() > self.eps_window * self.sigma {
                return Err(Error::NotInSupport { index: i });
            }
            prev = Some(t);
        }
        Ok(())
    }

    /// Exact sum of the atoms of `ν^j`.
    pub fn total_mass(&self, j: u32) -> BigRational {
        let size = BigUint::from(self.len());
        let count = num_traits::pow(size.clone(), j as usize);
        BigRational::new(BigInt::from(count), BigInt::from(num_traits::pow(size, j as usize)))
    }

    /// Top half of `supp ν^j` in lexicographic order.
    pub fn top_half_split(&self, j: u32) -> Result<TopHalfSplit> {
        let total = num_traits::pow(BigUint::from(self.len()), j as usize);
        TopHalfSplit::uniform(j, total)
    }

    /// Lexicographic rank of a list of block indices in `supp ν^j`.
    pub fn rank(&self, indices: &[usize]) -> BigUint {
        let base = BigUint::from(self.len());
        indices
            .iter()
            .fold(BigUint::zero(), |acc, &i| acc * &base + BigUint::from(i))
    }

    fn indices(&self, blocks: &[Vec<u64>]) -> Result<Vec<usize>> {
        blocks
            .iter()
            .enumerate()
            .map(|(i, b)| self.index_of(b).ok_or(Error::NotInSupport { index: i }))
            .collect()
    }

    /// `ν^k` mass of a cylinder given by `k` blocks.
    pub fn product_mass(&self, blocks: &[Vec<u64>]) -> Result<BigRational> {
        self.indices(blocks)?;
        let den = num_traits::pow(BigUint::from(self.len()), blocks.len());
        Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
    }

    /// `ln ν^k(blocks) / ln q(0, blocks...)`.
    pub fn qnu_exponent_check(&self, blocks: &[Vec<u64>]) -> Result<QnuRatio> {
        if blocks.is_empty() {
            return Err(Error::PreconditionViolated("block list is empty".into()));
        }
        self.indices(blocks)?;
        let mut c = Convergents::start(&BigUint::zero());
        for b in blocks {
            for &a in b {
                c.push_small(a);
            }
        }
        let log_mass = -(blocks.len() as f64) * (self.len() as f64).ln();
        let log_q = ln_biguint(&c.q);
        Ok(QnuRatio {
            log_mass,
            log_q,
            ratio: log_mass / log_q,
        })
    }

    /// Feasibility of the profile constants at this configuration.
    pub fn feasibility(&self, profile: Profile) -> FeasibilityReport {
        let c_n = joining_constant(self.n);
        let required_sigma = 10_000.0 * c_n;
        let beta_target = to_f64(&profile.nu_beta());
        let window_target = to_f64(&profile.nu_window());
        FeasibilityReport {
            profile,
            beta_achieved: self.beta_achieved,
            beta_target,
            beta_met: self.beta_achieved >= beta_target,
            window: self.eps_window,
            window_target,
            window_met: self.eps_window <= window_target,
            joining_constant: c_n,
            strict_required_sigma: required_sigma,
            strict_required_i1: (required_sigma / self.sigma).ceil() as u64,
            support_size: self.len(),
            max_support_size: (self.n as f64).powi(self.p as i32),
            beta_ceiling: (self.n as f64).powi(self.p as i32).ln() / self.sigma,
        }
    }

    /// Ball-mass scan of `ν^depth` pushed forward through `g` with head 0.
    ///
    /// Each depth-level cylinder is represented by an atom at its midpoint;
    /// `Ω(u)` is the largest atom mass inside a closed interval of length `u`.
    pub fn frostman_scan(&self, depth: u32, widths: &[f64]) -> Result<FrostmanScan> {
        let count = (self.len() as f64).powi(depth as i32);
        if count > DEFAULT_CYLINDER_BUDGET as f64 {
            return Err(Error::BudgetExceeded {
                requested: count,
                budget: DEFAULT_CYLINDER_BUDGET as f64,
            });
        }
        let mut mids: Vec<f64> = Vec::with_capacity(count as usize);
        let mut stack = vec![(Convergents::start(&BigUint::zero()), 0u32)];
        while let Some((c, d)) = stack.pop() {
            if d == depth {
                mids.push(c.cylinder_f64().0);
                continue;
            }
            for t in self.tuples() {
                let mut next = c.clone();
                for &a in t {
                    next.push_small(a);
                }
                stack.push((next, d + 1));
            }
        }
        mids.sort_by(f64::total_cmp);
        let atom = 1.0 / count;
        let omega: Vec<f64> = widths
            .iter()
            .map(|&u| max_window_count(&mids, u) as f64 * atom)
            .map(|w| w.min(1.0))
            .collect();
        let fitted_exponent = least_squares_slope(
            &widths.iter().map(|u| u.ln()).collect::<Vec<_>>(),
            &omega.iter().map(|w| w.ln()).collect::<Vec<_>>(),
        );
        Ok(FrostmanScan {
            depth,
            widths: widths.to_vec(),
            omega,
            fitted_exponent,
        })
    }
}

/// Largest number of sorted points inside some closed window of length `u`.
fn max_window_count(points: &[f64], u: f64) -> usize {
    let mut best = 0;
    let mut j = 0;
    for i in 0..points.len() {
        j = j.max(i);
        while j + 1 < points.len() && points[j + 1] - points[i] <= u {
            j += 1;
        }
        best = best.max(j + 1 - i);
    }
    best
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// The widths `2^{-1}, ..., 2^{-20}`.
pub fn dyadic_widths() -> Vec<f64> {
    (1..=20).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QnuRatio {
    pub log_mass: f64,
    pub log_q: f64,
    pub ratio: f64,
}

impl QnuRatio {
    pub fn passes(&self, beta: f64) -> bool {
        self.ratio <= -beta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub profile: Profile,
    pub beta_achieved: f64,
    pub beta_target: f64,
    pub beta_met: bool,
    pub window: f64,
    pub window_target: f64,
    pub window_met: bool,
    pub joining_constant: f64,
    /// `10000 · C_N`.
    pub strict_required_sigma: f64,
    /// Blocks a typical segment needs before its log-continuant reaches the strict scale.
    pub strict_required_i1: u64,
    pub support_size: usize,
    pub max_support_size: f64,
    /// `ln(N^p) / σ`: no window can do better.
    pub beta_ceiling: f64,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.beta_met && self.window_met
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrostmanScan {
    pub depth: u32,
    pub widths: Vec<f64>,
    pub omega: Vec<f64>,
    pub fitted_exponent: f64,
}

/// Members of a top-half split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitMembers {
    /// The first `count` of `total` equal atoms in lexicographic order.
    LexPrefix { count: BigUint, total: BigUint },
    /// Explicit atom indices.
    Indices(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopHalfSplit {
    pub level: u32,
    pub members: SplitMembers,
    pub mass: BigRational,
    /// Largest single atom of the split product measure.
    pub max_atom: BigRational,
}

impl TopHalfSplit {
    /// Greedy split of `total` equal atoms.
    pub fn uniform(level: u32, total: BigUint) -> Result<Self> {
        if total < BigUint::from(2u32) {
            return Err(Error::AtomTooHeavy {
                atom: format!("1/{total}"),
            });
        }
        // smallest k with k/M >= 1/2 - 1/(2M)
        let count: BigUint = &total / 2u32;
        let mass = BigRational::new(BigInt::from(count.clone()), BigInt::from(total.clone()));
        let max_atom = BigRational::new(BigInt::one(), BigInt::from(total.clone()));
        Ok(TopHalfSplit {
            level,
            members: SplitMembers::LexPrefix { count, total },
            mass,
            max_atom,
        })
    }

    /// Greedy split of arbitrary atoms taken in the given order.
    pub fn from_atoms(atoms: &[BigRational]) -> Result<Self> {
        let half = BigRational::new(1.into(), 2.into());
        let max_atom = atoms
            .iter()
            .max()
            .cloned()
            .ok_or_else(|| Error::InvalidParameter("no atoms".into()))?;
        if max_atom > half {
            return Err(Error::AtomTooHeavy {
                atom: crate::cf::rat_to_string(&max_atom),
            });
        }
        let target = &half - &max_atom / BigRational::from_integer(2.into());
        let mut mass = BigRational::zero();
        let mut members = Vec::new();
        for (i, a) in atoms.iter().enumerate() {
            if mass >= target {
                break;
            }
            mass += a;
            members.push(i);
        }
        Ok(TopHalfSplit {
            level: 1,
            members: SplitMembers::Indices(members),
            mass,
            max_atom,
        })
    }

    /// Whether the atom with lexicographic rank `rank` is in the top half.
    pub fn contains_rank(&self, rank: &BigUint) -> bool {
        match &self.members {
            SplitMembers::LexPrefix { count, .. } => rank < count,
            SplitMembers::Indices(ix) => rank
                .to_usize()
                .map(|r| ix.binary_search(&r).is_ok())
                .unwrap_or(false),
        }
    }

    /// `|mass - 1/2| <= max atom`.
    pub fn is_balanced(&self) -> bool {
        let half = BigRational::new(1.into(), 2.into());
        let dev = &self.mass - &half;
        let dev = if dev < BigRational::zero() { -dev } else { dev };
        dev <= self.max_atom
    }
}

/// On-disk form of [`NuMeasure`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct NuDoc {
    #[serde(rename = "N")]
    n: u64,
    p: usize,
    sigma: f64,
    eps_window: f64,
    support: Vec<Vec<u64>>,
    beta_achieved: f64,
}

impl Serialize for NuMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NuDoc {
            n: self.n,
            p: self.p,
            sigma: self.sigma,
            eps_window: self.eps_window,
            support: self.tuples().map(|t| t.to_vec()).collect(),
            beta_achieved: self.beta_achieved,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NuMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = NuDoc::deserialize(d)?;
        NuMeasure::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<NuDoc> for NuMeasure {
    type Error = Error;

    fn try_from(doc: NuDoc) -> Result<Self> {
        validate_params(doc.n, doc.p, doc.sigma, doc.eps_window)?;
        if doc.support.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let mut digits = Vec::with_capacity(doc.support.len() * doc.p);
        let (mut k_min, mut k_max) = (u128::MAX, 0u128);
        for (i, t) in doc.support.iter().enumerate() {
            if t.len() != doc.p {
                return Err(Error::NotInSupport { index: i });
            }
            let k = continuant_u128(t).ok_or(Error::NotInSupport { index: i })?;
            k_min = k_min.min(k);
            k_max = k_max.max(k);
            digits.extend_from_slice(t);
        }
        let size = doc.support.len();
        let nu = NuMeasure {
            n: doc.n,
            p: doc.p,
            sigma: doc.sigma,
            eps_window: doc.eps_window,
            digits,
            k_min,
            k_max,
            beta_achieved: (size as f64).ln() / doc.sigma,
        };
        nu.verify_window()?;
        if nu.beta_achieved.to_bits() != doc.beta_achieved.to_bits() {
            return Err(Error::Parse(format!(
                "beta_achieved {} does not match the support (expected {})",
                doc.beta_achieved, nu.beta_achieved
            )));
        }
        Ok(nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn small() -> NuMeasure {
        build_nu(3, 2, 5f64.ln(), 0.25).unwrap()
    }

    #[test]
    fn small_window_support() {
        let nu = small();
        let got: Vec<Vec<u64>> = nu.tuples().map(|t| t.to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![1, 3], vec![2, 2], vec![2, 3], vec![3, 1], vec![3, 2]]
        );
        assert_eq!(nu.atom_mass(), rat(1, 5));
        assert_eq!(nu.total_mass(1), rat(1, 1));
        assert_eq!(nu.total_mass(3), rat(1, 1));
    }

    #[test]
    fn window_above_all_continuants_is_empty() {
        // 100 <= K <= 200 with sigma = ln 141.4.., eps ~ 0.0734
        let sigma = 20000f64.sqrt().ln();
        let eps = (200f64.ln() - sigma) / sigma;
        assert_eq!(build_nu(3, 2, sigma, eps), Err(Error::EmptyWindow));
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(
            build_nu(1000, 4, 10.0, 0.25),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn greedy_splits() {
        let quarter = vec![rat(1, 4); 4];
        let s = TopHalfSplit::from_atoms(&quarter).unwrap();
        assert_eq!(s.mass, rat(1, 2));
        let mixed = vec![rat(2, 5), rat(3, 10), rat(1, 5), rat(1, 10)];
        let s = TopHalfSplit::from_atoms(&mixed).unwrap();
        assert_eq!(s.members, SplitMembers::Indices(vec![0]));
        assert_eq!(s.mass, rat(2, 5));
        assert!(s.is_balanced());
        assert!(matches!(
            TopHalfSplit::from_atoms(&[rat(1, 1)]),
            Err(Error::AtomTooHeavy { .. })
        ));
    }

    #[test]
    fn uniform_split_matches_greedy() {
        for total in 2u32..40 {
            let atoms = vec![rat(1, total as i64); total as usize];
            let greedy = TopHalfSplit::from_atoms(&atoms).unwrap();
            let closed = TopHalfSplit::uniform(1, total.into()).unwrap();
            assert_eq!(greedy.mass, closed.mass, "total {total}");
            assert!(closed.is_balanced());
        }
    }

    #[test]
    fn product_masses() {
        let nu = small();
        assert_eq!(nu.product_mass(&[]).unwrap(), rat(1, 1));
        assert_eq!(
            nu.product_mass(&[vec![2, 2], vec![1, 3]]).unwrap(),
            rat(1, 25)
        );
        assert_eq!(
            nu.product_mass(&[vec![2, 2], vec![1, 1]]),
            Err(Error::NotInSupport { index: 1 })
        );
    }

    #[test]
    fn qnu_ratio_example() {
        let nu = small();
        let r = nu.qnu_exponent_check(&[vec![2, 3]]).unwrap();
        assert!((r.ratio + 5f64.ln() / 7f64.ln()).abs() < 1e-15);
        let r3 = nu
            .qnu_exponent_check(&[vec![2, 3], vec![2, 3], vec![2, 3]])
            .unwrap();
        assert!((r3.ratio - r.ratio).abs() <= joining_constant(3) * 3.0 / r3.log_q);
    }

    #[test]
    fn frostman_extremes() {
        let nu = small();
        let scan = nu.frostman_scan(2, &[2.0, 1.0, 1e-12]).unwrap();
        assert_eq!(scan.omega[0], 1.0);
        assert_eq!(scan.omega[1], 1.0);
        assert_eq!(scan.omega[2], 1.0 / 25.0);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let nu = small();
        let text = serde_json::to_string(&nu).unwrap();
        let back: NuMeasure = serde_json::from_str(&text).unwrap();
        assert_eq!(back, nu);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let bad = text.replace("[1,3]", "[1,1]");
        assert!(serde_json::from_str::<NuMeasure>(&bad).is_err());
    }

    #[test]
    fn median_of_small_grid() {
        // K(a,b) = ab + 1 over {1,2}^2: 2, 3, 3, 5
        assert_eq!(median_log_continuant(2, 2).unwrap(), 3f64.ln());
    }
}
