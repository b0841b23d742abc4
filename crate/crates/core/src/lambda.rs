//! The mass distribution `λ` on sequences of `p`-tuples.
//!
//! Blocks are indexed from 0. Blocks outside every exceptional run are drawn
//! from `ν`. A path carries a label `c`, initially 1; when it reaches block
//! `i_c` the label is replaced by `2c` or `2c + 1` according to whether the
//! typical segment `[i_{c-1} + r_{c-1}, i_c)` lies in the top half of its
//! product support, and blocks `i_c .. i_c + r_c` are forced. A path lies in
//! `X_n` exactly when `n` is an ancestor of its label in the binary tree.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{AssignmentRule, WordState};
use crate::budget::DEFAULT_CYLINDER_BUDGET;
use crate::cf::ln_biguint;
use crate::error::{Error, Result};
use crate::kaufman::{build_nu, NuMeasure, TopHalfSplit};
use crate::profile::{to_f64, Profile};
use crate::schedule::{weight, Schedule, ScheduleLists};

/// A `p`-tuple of partial quotients.
pub type Block = Vec<BigUint>;

/// Whether `n` is an ancestor of (or equal to) `label`.
pub fn label_in(label: u64, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut l = label;
    while l > n {
        l >>= 1;
    }
    l == n
}

/// State after walking a prefix of positive mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathState {
    pub word: WordState,
    pub label: u64,
    /// Number of typical blocks so far; the mass is `|supp ν|^{-typical}`.
    pub typical: u64,
    /// Number of blocks walked.
    pub depth: u64,
    seg_rank: BigUint,
    forced_until: u64,
}

impl PathState {
    fn root() -> Self {
        PathState {
            word: WordState::start(&BigUint::zero()),
            label: 1,
            typical: 0,
            depth: 0,
            seg_rank: BigUint::zero(),
            forced_until: 0,
        }
    }
}

/// Compact description of a depth-level cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf {
    pub typical: u64,
    pub mid: f64,
    pub width: f64,
    pub label: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMeasure {
    nu: NuMeasure,
    schedule: Schedule,
    splits: Vec<TopHalfSplit>,
    horizon: usize,
}

impl LambdaMeasure {
    /// Builds `λ` up to `horizon` blocks.
    pub fn build(nu: NuMeasure, schedule: Schedule, horizon: usize) -> Result<Self> {
        if schedule.p != nu.p() {
            return Err(Error::InvalidParameter(format!(
                "schedule block length {} differs from ν block length {}",
                schedule.p,
                nu.p()
            )));
        }
        let base = BigUint::from(nu.len());
        let mut splits = Vec::new();
        for m in 1..=schedule.len() {
            if schedule.i_n(m) > horizon as u64 {
                break;
            }
            let len = schedule.i_n(m) - schedule.segment_start(m);
            let total = num_traits::pow(base.clone(), len as usize);
            splits.push(TopHalfSplit::uniform(len as u32, total)?);
        }
        Ok(LambdaMeasure {
            nu,
            schedule,
            splits,
            horizon,
        })
    }

    pub fn nu(&self) -> &NuMeasure {
        &self.nu
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn rule(&self) -> &AssignmentRule {
        &self.schedule.rule
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of stages whose label assignment falls within the horizon.
    pub fn built_stages(&self) -> usize {
        self.splits.len()
    }

    pub fn split(&self, m: usize) -> Option<&TopHalfSplit> {
        self.splits.get(m.wrapping_sub(1))
    }

    /// `|supp ν|^{-typical}` exactly.
    pub fn mass_of_typical(&self, typical: u64) -> BigRational {
        BigRational::new(
            BigInt::one(),
            BigInt::from(num_traits::pow(BigUint::from(self.nu.len()), typical as usize)),
        )
    }

    pub fn mass_f64(&self, typical: u64) -> f64 {
        (-(typical as f64) * (self.nu.len() as f64).ln()).exp()
    }

    fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.horizon {
            Err(Error::DepthExceeded {
                requested: depth,
                built: self.horizon,
            })
        } else {
            Ok(())
        }
    }

    /// Stage `m` whose segment contains block `k`.
    fn segment_of(&self, k: u64) -> Option<usize> {
        let m = (1..=self.splits.len()).find(|&m| self.schedule.i_n(m) > k)?;
        (k >= self.schedule.segment_start(m)).then_some(m)
    }

    /// Forced continuation of `st`, or `None` when the next block is typical.
    fn forced_step(&self, st: &PathState) -> Result<Option<(Block, PathState)>> {
        if st.depth >= st.forced_until {
            return Ok(None);
        }
        let mut s = st.clone();
        let block = self.rule().extend_forced(&mut s.word, self.nu.p())?;
        s.depth += 1;
        self.settle(&mut s);
        Ok(Some((block, s)))
    }

    /// Relabels a path that has just reached the stage of its label.
    fn settle(&self, s: &mut PathState) {
        let m = s.label as usize;
        if m == 0 || m > self.splits.len() || self.schedule.i_n(m) != s.depth {
            return;
        }
        let top = self.splits[m - 1].contains_rank(&s.seg_rank);
        s.label = 2 * s.label + u64::from(!top);
        s.forced_until = s.depth + self.schedule.r_n(m);
    }

    fn typical_step(&self, st: &PathState, index: usize) -> PathState {
        let mut s = st.clone();
        let k = s.depth;
        for &a in self.nu.tuple(index) {
            s.word.push(&BigUint::from(a));
        }
        if let Some(m) = self.segment_of(k) {
            if k == self.schedule.segment_start(m) {
                s.seg_rank = BigUint::from(index);
            } else {
                s.seg_rank = &s.seg_rank * self.nu.len() + index;
            }
        }
        s.typical += 1;
        s.depth += 1;
        self.settle(&mut s);
        s
    }

    /// One-block extensions of positive mass.
    pub fn children(&self, st: &PathState) -> Result<Vec<(Block, PathState)>> {
        if let Some(f) = self.forced_step(st)? {
            return Ok(vec![f]);
        }
        Ok((0..self.nu.len())
            .map(|ix| {
                let block = self.nu.tuple(ix).iter().map(|&a| BigUint::from(a)).collect();
                (block, self.typical_step(st, ix))
            })
            .collect())
    }

    /// Walks `prefix`; `None` if it has zero mass.
    pub fn walk(&self, prefix: &[Block]) -> Result<Option<PathState>> {
        self.check_depth(prefix.len())?;
        let mut st = PathState::root();
        for (k, block) in prefix.iter().enumerate() {
            if block.len() != self.nu.p() {
                return Err(Error::InvalidParameter(format!(
                    "block {k} has {} entries, expected {}",
                    block.len(),
                    self.nu.p()
                )));
            }
            st = match self.forced_step(&st)? {
                Some((forced, next)) => {
                    if &forced != block {
                        return Ok(None);
                    }
                    next
                }
                None => match self.nu.index_of_big(block) {
                    Some(ix) => self.typical_step(&st, ix),
                    None => return Ok(None),
                },
            };
        }
        Ok(Some(st))
    }

    /// `λ(cyl(prefix))`.
    pub fn cylinder_mass(&self, prefix: &[Block]) -> Result<BigRational> {
        Ok(match self.walk(prefix)? {
            Some(st) => self.mass_of_typical(st.typical),
            None => BigRational::zero(),
        })
    }

    /// Label of a prefix of positive mass.
    pub fn x_label(&self, prefix: &[Block]) -> Result<Option<u64>> {
        Ok(self.walk(prefix)?.map(|s| s.label))
    }

    /// Prefix length needed before membership in `X_n` is decided.
    pub fn classification_depth(&self, n: u64) -> Result<u64> {
        if n <= 1 {
            return Ok(0);
        }
        let m = (n / 2) as usize;
        if m > self.splits.len() {
            let requested = if m <= self.schedule.len() {
                self.schedule.i_n(m) as usize
            } else {
                usize::MAX
            };
            return Err(Error::DepthExceeded {
                requested,
                built: self.horizon,
            });
        }
        Ok(self.schedule.i_n(m))
    }

    /// `λ(X_n^{**})`.
    pub fn xn_mass(&self, n: u64) -> Result<BigRational> {
        if n == 0 {
            return Err(Error::InvalidParameter("X_n is indexed from n = 1".into()));
        }
        self.classification_depth(n)?;
        if n == 1 {
            return Ok(BigRational::one());
        }
        let parent = self.xn_mass(n / 2)?;
        let tau = &self.splits[(n / 2 - 1) as usize].mass;
        Ok(if n % 2 == 0 {
            parent * tau
        } else {
            parent * (BigRational::one() - tau)
        })
    }

    /// Membership of a prefix in `X_n^*`, decided from the definition.
    pub fn x_member_by_definition(&self, prefix: &[Block], n: u64) -> Result<bool> {
        if n == 1 {
            return Ok(true);
        }
        let depth = self.classification_depth(n)? as usize;
        if prefix.len() < depth || self.walk(prefix)?.is_none() {
            return Ok(false);
        }
        let m = (n / 2) as usize;
        if !self.x_member_by_definition(&prefix[..depth], m as u64)? {
            return Ok(false);
        }
        let start = self.schedule.segment_start(m) as usize;
        let mut ix = Vec::with_capacity(depth - start);
        for b in &prefix[start..depth] {
            match self.nu.index_of_big(b) {
                Some(i) => ix.push(i),
                None => return Ok(false),
            }
        }
        let top = self.splits[m - 1].contains_rank(&self.nu.rank(&ix));
        Ok(top == (n % 2 == 0))
    }

    /// Draws a path of `depth` blocks.
    pub fn sample_path(&self, depth: usize, seed: u64) -> Result<Vec<Block>> {
        self.check_depth(depth)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = PathState::root();
        let mut out = Vec::with_capacity(depth);
        for _ in 0..depth {
            let (block, next) = self.sample_step(&st, &mut rng)?;
            out.push(block);
            st = next;
        }
        Ok(out)
    }

    fn sample_step(&self, st: &PathState, rng: &mut ChaCha8Rng) -> Result<(Block, PathState)> {
        if let Some(f) = self.forced_step(st)? {
            return Ok(f);
        }
        let ix = rng.gen_range(0..self.nu.len());
        let block = self.nu.tuple(ix).iter().map(|&a| BigUint::from(a)).collect();
        Ok((block, self.typical_step(st, ix)))
    }

    /// Draws the depth-level cylinder of a random path.
    pub fn sample_leaf(&self, depth: usize, rng: &mut ChaCha8Rng) -> Result<Leaf> {
        self.check_depth(depth)?;
        let mut st = PathState::root();
        for _ in 0..depth {
            st = self.sample_step(&st, rng)?.1;
        }
        Ok(leaf_of(&st))
    }

    /// Largest number of forced blocks on any path of `depth` blocks.
    pub fn max_forced_blocks(&self, depth: u64) -> u64 {
        fn go(lm: &LambdaMeasure, m: u64, depth: u64) -> u64 {
            let mu = m as usize;
            if mu > lm.splits.len() || lm.schedule.i_n(mu) >= depth {
                return 0;
            }
            let start = lm.schedule.i_n(mu);
            let run = lm.schedule.r_n(mu).min(depth - start);
            run + go(lm, 2 * m, depth).max(go(lm, 2 * m + 1, depth))
        }
        go(self, 1, depth)
    }

    /// Upper bound on the number of positive-mass prefixes of `depth` blocks.
    pub fn leaf_count_bound(&self, depth: usize) -> f64 {
        (self.nu.len() as f64).powi(depth as i32)
    }

    /// All positive-mass cylinders of `depth` blocks, in lexicographic order.
    pub fn leaves(&self, depth: usize) -> Result<Vec<Leaf>> {
        self.check_depth(depth)?;
        let bound = self.leaf_count_bound(depth);
        if bound > DEFAULT_CYLINDER_BUDGET as f64 {
            return Err(Error::BudgetExceeded {
                requested: bound,
                budget: DEFAULT_CYLINDER_BUDGET as f64,
            });
        }
        // expand a shallow frontier serially, then the subtrees in parallel
        let mut frontier = vec![PathState::root()];
        while frontier.len() < 256 && frontier.first().map_or(false, |s| (s.depth as usize) < depth) {
            let mut next = Vec::new();
            for st in &frontier {
                next.extend(self.children(st)?.into_iter().map(|(_, s)| s));
            }
            frontier = next;
        }
        let parts: Vec<Result<Vec<Leaf>>> = frontier
            .par_iter()
            .map(|st| {
                let mut out = Vec::new();
                self.collect_leaves(st, depth as u64, &mut out)?;
                Ok(out)
            })
            .collect();
        let mut all = Vec::new();
        for p in parts {
            all.extend(p?);
        }
        Ok(all)
    }

    fn collect_leaves(&self, st: &PathState, depth: u64, out: &mut Vec<Leaf>) -> Result<()> {
        if st.depth == depth {
            out.push(leaf_of(st));
            return Ok(());
        }
        for (_, child) in self.children(st)? {
            self.collect_leaves(&child, depth, out)?;
        }
        Ok(())
    }

    /// Visits every positive-mass prefix of `depth` blocks.
    pub fn for_each_prefix(
        &self,
        depth: usize,
        mut f: impl FnMut(&[Block], &PathState) -> Result<()>,
    ) -> Result<()> {
        self.check_depth(depth)?;
        let mut path = Vec::new();
        self.visit(&PathState::root(), depth as u64, &mut path, &mut f)
    }

    fn visit(
        &self,
        st: &PathState,
        depth: u64,
        path: &mut Vec<Block>,
        f: &mut impl FnMut(&[Block], &PathState) -> Result<()>,
    ) -> Result<()> {
        if st.depth == depth {
            return f(path, st);
        }
        for (block, child) in self.children(st)? {
            path.push(block);
            self.visit(&child, depth, path, f)?;
            path.pop();
        }
        Ok(())
    }

    /// `i = floor(α ln|ξ| / σ)` and the stage `n` with `i_n <= i < i_{n+1}`.
    pub fn scale_index(&self, xi: f64, alpha: &BigRational) -> Result<(u64, usize)> {
        if !xi.is_finite() {
            return Err(Error::InvalidParameter(format!("frequency {xi} is not finite")));
        }
        let a = to_f64(alpha);
        let raw = a * xi.abs().ln() / self.schedule.sigma;
        // absorb rounding just below an integer
        let i = if raw.is_finite() && raw > 0.0 {
            (raw + 1e-9).floor() as u64
        } else {
            0
        };
        if i > self.horizon as u64 {
            return Err(Error::OutOfRange {
                index: i,
                built: self.horizon,
            });
        }
        let n = self
            .schedule
            .i()
            .iter()
            .rposition(|&i_n| i_n <= i)
            .map(|k| k + 1)
            .unwrap_or(1);
        Ok((i, n))
    }

    /// The exceptional part `X_{n-1} ∪ X_n ∪ X_{n+1}` at frequency `ξ`.
    pub fn split_typ_exc(&self, xi: f64, alpha: &BigRational) -> Result<TypExcSplit> {
        let (i, n) = self.scale_index(xi, alpha)?;
        self.split_at_stage(i, n)
    }

    pub fn split_at_stage(&self, i_value: u64, n: usize) -> Result<TypExcSplit> {
        let n = n as u64;
        let candidates: Vec<u64> = [n.saturating_sub(1), n, n + 1]
            .into_iter()
            .filter(|&c| c >= 1)
            .collect();
        let maximal: Vec<u64> = candidates
            .iter()
            .copied()
            .filter(|&c| !candidates.iter().any(|&d| d != c && label_in(c, d)))
            .collect();
        let mut exc = BigRational::zero();
        for &c in &maximal {
            exc += self.xn_mass(c)?;
        }
        let classify_depth = candidates
            .iter()
            .map(|&c| self.classification_depth(c))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        let bound = candidates
            .iter()
            .map(|&c| weight(c))
            .fold(BigRational::zero(), |acc, w| acc + w)
            * BigRational::from_integer(2.into());
        Ok(TypExcSplit {
            n_index: n as usize,
            i_value,
            typ_mass: BigRational::one() - &exc,
            exc_mass: exc,
            exc_labels: maximal,
            classify_depth,
            weight_bound: bound,
        })
    }

    /// Lemma-2 style margins for a typical prefix.
    pub fn lemma2_check(&self, prefix: &[Block], profile: Profile) -> Result<Lemma2Report> {
        let i = prefix.len() as u64;
        let n = self
            .schedule
            .i()
            .iter()
            .rposition(|&i_n| i_n <= i)
            .map(|k| k + 1)
            .ok_or_else(|| {
                Error::PreconditionViolated(format!("prefix length {i} is below i_1"))
            })?;
        let st = self
            .walk(prefix)?
            .ok_or_else(|| Error::PreconditionViolated("prefix has zero mass".into()))?;
        for excluded in [n as u64 - 1, n as u64] {
            if excluded >= 1 && label_in(st.label, excluded) {
                return Err(Error::PreconditionViolated(format!(
                    "prefix lies in X_{excluded}^*"
                )));
            }
        }
        let target = i as f64 * self.schedule.sigma;
        let log_q = ln_biguint(st.word.q());
        let log_mass = -(st.typical as f64) * (self.nu.len() as f64).ln();
        let window = to_f64(&profile.scale_window());
        let beta = to_f64(&profile.scale_beta());
        let window_margin = window * target - (log_q - target).abs();
        let mass_margin = -beta * target - log_mass;
        Ok(Lemma2Report {
            n,
            i,
            log_q,
            target,
            log_mass,
            window_margin,
            mass_margin,
            window_ok: window_margin >= 0.0,
            mass_ok: mass_margin >= 0.0,
        })
    }
}

fn leaf_of(st: &PathState) -> Leaf {
    let (mid, width) = st.word.conv.cylinder_f64();
    Leaf {
        typical: st.typical,
        mid,
        width,
        label: st.label,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypExcSplit {
    pub n_index: usize,
    pub i_value: u64,
    /// `λ(X_{n-1}^{**} ∪ X_n^{**} ∪ X_{n+1}^{**})`.
    pub exc_mass: BigRational,
    pub typ_mass: BigRational,
    /// Maximal labels among `n-1, n, n+1`; a path is exceptional iff one is its ancestor.
    pub exc_labels: Vec<u64>,
    /// Prefix length needed to classify paths.
    pub classify_depth: u64,
    /// `2(w_{n-1} + w_n + w_{n+1})` over existing indices.
    pub weight_bound: BigRational,
}

impl TypExcSplit {
    pub fn is_exceptional(&self, label: u64) -> bool {
        self.exc_labels.iter().any(|&n| label_in(label, n))
    }

    pub fn exc_mass_f64(&self) -> f64 {
        self.exc_mass.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub n: usize,
    pub i: u64,
    pub log_q: f64,
    /// `i σ`.
    pub target: f64,
    pub log_mass: f64,
    pub window_margin: f64,
    pub mass_margin: f64,
    pub window_ok: bool,
    pub mass_ok: bool,
}

/// `ν` as parameters or as a full support listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    Built(NuMeasure),
    Params(NuParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuParams {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: usize,
    pub sigma: f64,
    pub eps_window: f64,
}

impl NuSpec {
    pub fn build(&self) -> Result<NuMeasure> {
        match self {
            NuSpec::Built(nu) => Ok(nu.clone()),
            NuSpec::Params(p) => build_nu(p.n, p.p, p.sigma, p.eps_window),
        }
    }
}

/// Everything needed to rebuild a `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    pub nu: NuSpec,
    pub schedule: ScheduleLists,
    pub rule: AssignmentRule,
    #[serde(default)]
    pub profile: Profile,
    /// Horizon in blocks; defaults to the end of the last exceptional run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl LambdaConfig {
    pub fn build(&self) -> Result<LambdaMeasure> {
        let nu = self.nu.build()?;
        let schedule = Schedule::from_lists(&self.schedule, &nu, self.rule.clone(), self.profile)?;
        let horizon = self.depth.unwrap_or_else(|| {
            let last = schedule.len();
            (schedule.i_n(last) + schedule.r_n(last)) as usize
        });
        LambdaMeasure::build(nu, schedule, horizon)
    }
}
