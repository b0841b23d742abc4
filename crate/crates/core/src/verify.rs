//! Invariant suites shared by the command line and the test targets.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::assignment::{AssignmentRule, PsiFamily};
use crate::budget::DEFAULT_CYLINDER_BUDGET;
use crate::cf::{continuant, continuant_identity_check, cylinder_interval, evaluate, joining_constant, joining_defect, Word};
use crate::error::{Error, Result};
use crate::fourier::audit::{exponent_audit, reference_alpha};
use crate::fourier::lemmas::{
    check_stationary, sweep_integral, sweep_nonstationary, sweep_stationary, AtomMeasure,
    Poly, StationaryCase,
};
use crate::fourier::{LeafSet, Method, ProductMeasure};
use crate::kaufman::{build_nu, NuMeasure};
use crate::lambda::{label_in, LambdaConfig, LambdaMeasure, PathState};
use crate::profile::Profile;
use crate::schedule::{check_gap_condition, check_superlacunary, make_schedule_psi, Schedule};

/// Seed of the randomized lemma sweeps.
pub const SWEEP_SEED: u64 = 0x5eed_cf01;
pub const SWEEP_CASES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Cf,
    Nu,
    Lambda,
    Fourier,
    Lemmas,
    Audit,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Cf,
        Suite::Nu,
        Suite::Lambda,
        Suite::Fourier,
        Suite::Lemmas,
        Suite::Audit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Cf => "cf",
            Suite::Nu => "nu",
            Suite::Lambda => "lambda",
            Suite::Fourier => "fourier",
            Suite::Lemmas => "lemmas",
            Suite::Audit => "audit",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    /// Informational output that never fails the suite.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.suite)?;
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "  {tag} {}: {}", c.name, c.detail)?;
        }
        for n in &self.notes {
            for line in n.lines() {
                writeln!(f, "  | {line}")?;
            }
        }
        Ok(())
    }
}

/// Runs one suite (or all of them).
pub fn run(suite: Suite, profile: Profile) -> Result<Vec<SuiteReport>> {
    match suite {
        Suite::All => Suite::EACH.iter().map(|&s| run_one(s, profile)).collect(),
        s => Ok(vec![run_one(s, profile)?]),
    }
}

fn run_one(suite: Suite, profile: Profile) -> Result<SuiteReport> {
    match suite {
        Suite::Cf => cf_suite(),
        Suite::Nu => nu_suite(profile),
        Suite::Lambda => lambda_suite(profile),
        Suite::Fourier => fourier_suite(),
        Suite::Lemmas => lemmas_suite(),
        Suite::Audit => audit_suite(),
        Suite::All => unreachable!("expanded by run"),
    }
}

/// All digit sequences with entries in `1..=max` and length `0..=len`.
pub fn all_words(max: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 1..=max {
                let mut v: Vec<u64> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContinuantSweep {
    pub pairs: usize,
    pub identity_failures: usize,
    pub defect_failures: usize,
}

/// Splitting identity and joining-defect bounds over all pairs of words
/// with entries `<= max` and lengths `<= len`.
pub fn continuant_sweep(max: u64, len: usize) -> Result<ContinuantSweep> {
    let words = all_words(max, len);
    let c_n = joining_constant(max);
    let heads: Vec<Word> = words
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut d = vec![0];
            d.extend_from_slice(w);
            Word::from_digits(&d)
        })
        .collect::<Result<_>>()?;
    let tails: Vec<Word> = words
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| Word::from_digits(w))
        .collect::<Result<_>>()?;
    use rayon::prelude::*;
    let nonempty: Vec<&Vec<u64>> = words.iter().filter(|w| !w.is_empty()).collect();
    let identity_failures = nonempty
        .par_iter()
        .map(|u| nonempty.iter().filter(|v| !continuant_identity_check(u, v)).count())
        .sum();
    let defect_failures = heads
        .par_iter()
        .map(|a| -> Result<usize> {
            let mut bad = 0;
            for b in &tails {
                let d = joining_defect(a, b, max)?;
                let v = d.ln();
                if !(v >= 0.0 && v <= c_n) {
                    bad += 1;
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(ContinuantSweep {
        pairs: nonempty.len() * nonempty.len(),
        identity_failures,
        defect_failures,
    })
}

fn cf_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new(Suite::Cf);
    let q = continuant(&[7, 15, 1]);
    r.check("continuant (3,7,15,1)", q == BigUint::from(113u32), format!("q = {q}"));
    let w: Word = "3,7,15,1".parse()?;
    let v = evaluate(&w);
    r.check("evaluate (3,7,15,1)", v == BigRational::new(355.into(), 113.into()), format!("{v}"));
    let cyl = cylinder_interval(&"0,2,3".parse()?)?;
    r.check(
        "cylinder (0,2,3)",
        cyl.lo == BigRational::new(3.into(), 7.into())
            && cyl.hi == BigRational::new(4.into(), 9.into()),
        format!("[{}, {}]", cyl.lo, cyl.hi),
    );
    let sweep = continuant_sweep(3, 3)?;
    r.check(
        "splitting identity",
        sweep.identity_failures == 0,
        format!("{} pairs, {} failures", sweep.pairs, sweep.identity_failures),
    );
    r.check(
        "joining defect in [0, C_N]",
        sweep.defect_failures == 0,
        format!("{} failures", sweep.defect_failures),
    );
    let mut nested = true;
    for d in all_words(3, 3).into_iter().filter(|w| w.len() >= 2) {
        let mut parent = vec![0];
        parent.extend_from_slice(&d[..d.len() - 1]);
        let mut child = vec![0];
        child.extend_from_slice(&d);
        let p = cylinder_interval(&Word::from_digits(&parent)?)?;
        let c = cylinder_interval(&Word::from_digits(&child)?)?;
        nested &= p.contains_interval(&c);
    }
    r.check("cylinders nest", nested, "entries <= 3, lengths <= 3");
    Ok(r)
}

/// Exact mass checks on a block measure.
pub fn nu_exact_checks(nu: &NuMeasure, levels: &[u32]) -> Result<Vec<(String, bool, String)>> {
    let mut out = Vec::new();
    out.push((
        "window".to_string(),
        nu.verify_window().is_ok(),
        format!("{} atoms", nu.len()),
    ));
    for &j in levels {
        let total = nu.total_mass(j);
        out.push((format!("total mass ν^{j}"), total.is_one(), format!("{total}")));
        let split = nu.top_half_split(j)?;
        let dev = (&split.mass - BigRational::new(1.into(), 2.into())).abs();
        out.push((
            format!("top half T_{j}"),
            split.is_balanced(),
            format!("|mass - 1/2| = {dev}, max atom {}", split.max_atom),
        ));
    }
    Ok(out)
}

fn nu_suite(profile: Profile) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(Suite::Nu);
    let nu = build_nu(3, 2, 5f64.ln(), 0.3)?;
    let support: Vec<Vec<u64>> = nu.tuples().map(|t| t.to_vec()).collect();
    r.check(
        "support of N=3, p=2, σ=ln 5",
        support == vec![vec![1, 3], vec![2, 2], vec![2, 3], vec![3, 1], vec![3, 2]],
        format!("{support:?}"),
    );
    for (name, ok, detail) in nu_exact_checks(&nu, &[1, 2, 3])? {
        r.check(&name, ok, detail);
    }
    let text = serde_json::to_string(&nu).map_err(|e| Error::Parse(e.to_string()))?;
    let back: NuMeasure = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    r.check("json round trip", back == nu, format!("{} bytes", text.len()));
    r.check(
        "empty window",
        matches!(build_nu(3, 2, 150f64.ln(), 0.1), Err(Error::EmptyWindow)),
        "σ = ln 150",
    );
    let q = nu.qnu_exponent_check(&[vec![2, 3]])?;
    r.check(
        "mass exponent of (2,3)",
        (q.ratio + 5f64.ln() / 7f64.ln()).abs() < 1e-12,
        format!("{:.6}", q.ratio),
    );
    let feas = nu.feasibility(profile);
    r.notes.push(format!(
        "feasibility ({profile}): beta {:.4} vs target {:.4}, strict i_1 >= {}",
        feas.beta_achieved, feas.beta_target, feas.strict_required_i1
    ));
    Ok(r)
}

/// The `p = 2`, `τ = 3` schedule `i = (4, 96)`, `r = (1, 2)` on `ν(4, 2, 2, 0.16)`.
pub fn bookkeeping_config() -> Result<LambdaMeasure> {
    let nu = build_nu(4, 2, 2.0, 0.16)?;
    let rule = AssignmentRule::Psi(PsiFamily::power(BigRational::from_integer(3.into()))?);
    let s = Schedule::new(vec![4, 96], vec![1, 2], 2, nu.sigma(), rule, Profile::Desk)?;
    LambdaMeasure::build(nu, s, 98)
}

/// `ν(3, 2, ln 4, 0.2)` with `i = (1, 3, ..., 11)`, `r_n = 1`, `τ = 3`, 12 blocks.
pub fn desk_config() -> LambdaConfig {
    serde_json::from_str(
        r#"{"nu":{"N":3,"p":2,"sigma":1.3862943611198906,"eps_window":0.2},
            "schedule":{"i":[1,3,5,7,9,11],"r":[1,1,1,1,1,1]},
            "rule":{"kind":"psi-power","tau":"3"},"profile":"desk","depth":12}"#,
    )
    .expect("static config")
}

/// Every node up to `depth`: the children's masses sum to the parent's.
pub fn children_sum_check(lm: &LambdaMeasure, depth: usize) -> Result<(usize, usize)> {
    fn go(lm: &LambdaMeasure, st: &PathState, depth: u64, nodes: &mut usize, bad: &mut usize) -> Result<()> {
        if st.depth == depth {
            return Ok(());
        }
        *nodes += 1;
        let kids = lm.children(st)?;
        let sum = kids
            .iter()
            .fold(BigRational::zero(), |acc, (_, c)| acc + lm.mass_of_typical(c.typical));
        if sum != lm.mass_of_typical(st.typical) {
            *bad += 1;
        }
        for (_, c) in &kids {
            go(lm, c, depth, nodes, bad)?;
        }
        Ok(())
    }
    let count = lm.leaf_count_bound(depth);
    if count > DEFAULT_CYLINDER_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            requested: count,
            budget: DEFAULT_CYLINDER_BUDGET as f64,
        });
    }
    let root = lm.walk(&[])?.expect("root has mass");
    let (mut nodes, mut bad) = (0, 0);
    go(lm, &root, depth as u64, &mut nodes, &mut bad)?;
    Ok((nodes, bad))
}

/// `λ(X_n)` summed over explicit prefixes of the classification depth.
pub fn xn_mass_enumerated(lm: &LambdaMeasure, n: u64) -> Result<BigRational> {
    let depth = lm.classification_depth(n)? as usize;
    let count = lm.leaf_count_bound(depth);
    if count > DEFAULT_CYLINDER_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            requested: count,
            budget: DEFAULT_CYLINDER_BUDGET as f64,
        });
    }
    let mut total = BigRational::zero();
    lm.for_each_prefix(depth, |_, st| {
        if label_in(st.label, n) {
            total += lm.mass_of_typical(st.typical);
        }
        Ok(())
    })?;
    Ok(total)
}

/// Largest `n` whose `X_n` is decided within the built horizon.
pub fn max_label(lm: &LambdaMeasure) -> u64 {
    2 * lm.built_stages() as u64 + 1
}

fn lambda_suite(profile: Profile) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(Suite::Lambda);
    let lm = desk_config().build()?;
    let (nodes, bad) = children_sum_check(&lm, 8)?;
    r.check("children sum to parent", bad == 0, format!("{nodes} nodes to depth 8"));
    let x23 = lm.xn_mass(2)? + lm.xn_mass(3)?;
    r.check("λ(X_2) + λ(X_3) = 1", x23.is_one(), format!("{x23}"));
    let top = max_label(&lm);
    let mut rec = true;
    for n in 1..=top / 2 {
        if 2 * n + 1 > top {
            break;
        }
        rec &= lm.xn_mass(n)? == lm.xn_mass(2 * n)? + lm.xn_mass(2 * n + 1)?;
    }
    r.check("λ(X_n) = λ(X_2n) + λ(X_2n+1)", rec, format!("n <= {}", top / 2));
    let mut enumerated = true;
    for n in 1..=top {
        if lm.classification_depth(n)? <= 7 {
            enumerated &= xn_mass_enumerated(&lm, n)? == lm.xn_mass(n)?;
        }
    }
    r.check("λ(X_n) by enumeration", enumerated, "classification depth <= 7");

    let nu = build_nu(4, 2, 2.0, 0.16)?;
    let psi = PsiFamily::power(BigRational::from_integer(3.into()))?;
    let s = make_schedule_psi(&psi, &nu, &[1, 2, 3], 4, 3, Profile::Desk)?;
    r.check("schedule (4, 96, 9216)", s.i() == [4, 96, 9216], format!("{:?}", s.i()));
    let sl = check_superlacunary(&s, &BigRational::from_integer(10.into()));
    r.check("superlacunary R = 10", sl.holds && sl.n0 == Some(1), format!("n0 = {:?}", sl.n0));
    let gap = check_gap_condition(&s)?;
    let bad = check_gap_condition(&s.with_index_unchecked(3, 100))?;
    r.check(
        "gap condition",
        gap.holds && !bad.holds,
        "holds as built, fails with i_3 = 100",
    );
    let path = lm.sample_path(12, 1)?;
    match lm.lemma2_check(&path[..11], profile) {
        Ok(rep) => r.notes.push(format!(
            "lemma-2 margins ({profile}) on a sampled prefix: window {:.4}, mass {:.4}",
            rep.window_margin, rep.mass_margin
        )),
        Err(e) => r.notes.push(format!("lemma-2 margins on a sampled prefix: {e}")),
    }
    Ok(r)
}

fn fourier_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new(Suite::Fourier);
    let pm = ProductMeasure::new(build_nu(3, 2, 4f64.ln(), 0.2)?);
    let keep = |_: &crate::lambda::Leaf| true;
    let shallow = LeafSet::enumerate(&pm, 3)?;
    let deep = LeafSet::enumerate(&pm, 6)?;
    let zero = shallow.estimate(0.0, &keep, Some(1.0));
    r.check(
        "transform at 0",
        zero.value.re == 1.0 && zero.value.im == 0.0 && zero.err_bound == 0.0,
        format!("{}", zero.value),
    );
    let mut sym = true;
    let mut agree = true;
    let mut bounded = true;
    for k in 0..12 {
        let xi = 2f64.powi(k);
        let a = shallow.estimate(xi, &keep, Some(1.0));
        let b = deep.estimate(xi, &keep, Some(1.0));
        sym &= deep.estimate(-xi, &keep, Some(1.0)).value == b.value.conj();
        agree &= (a.value - b.value).norm() <= a.err_bound + b.err_bound;
        bounded &= b.value.norm() <= 1.0 + b.err_bound;
    }
    r.check("conjugate symmetry", sym, "ξ = ±2^k, k < 12");
    r.check("depths 3 and 6 agree", agree, "within summed error bounds");
    r.check("|μ̂| <= 1 + err", bounded, "depth 6");
    let lm = desk_config().build()?;
    let cyl = LeafSet::enumerate(&lm, 10)?;
    let mc = LeafSet::sample(&lm, 10, 20_000, 7)?;
    let mut cross = true;
    for k in 1..=8 {
        let xi = 2f64.powi(k);
        let a = cyl.estimate(xi, &keep, Some(1.0));
        let b = mc.estimate(xi, &keep, None);
        cross &= (a.value - b.value).norm() <= a.err_bound + b.err_bound;
    }
    r.check("cylinder vs sampled", cross, "desk λ, depth 10, 20000 samples");
    debug_assert_eq!(mc.method, Method::MonteCarlo);
    Ok(r)
}

fn lemmas_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new(Suite::Lemmas);
    let nu = build_nu(3, 2, 4f64.ln(), 0.2)?;
    let atoms = AtomMeasure::nu_tail(&nu, 3)?;
    for s in [
        sweep_integral(SWEEP_SEED, SWEEP_CASES, &atoms, nu.N()),
        sweep_nonstationary(SWEEP_SEED, SWEEP_CASES),
        sweep_stationary(SWEEP_SEED, SWEEP_CASES),
    ] {
        r.check(
            &format!("{} sweep", s.lemma),
            s.clean(),
            format!(
                "{} cases, {} violations, {} uncertified, worst ratio {:.4}",
                s.cases, s.violations, s.certification_failures, s.worst_ratio
            ),
        );
    }
    let degenerate = StationaryCase {
        a1: BigRational::zero(),
        a2: BigRational::one(),
        g: Poly::new(vec![BigRational::one()]),
    };
    r.check(
        "a1 = 0 rejected",
        matches!(check_stationary(&degenerate), Err(Error::CertificationFailed(_))),
        "",
    );
    Ok(r)
}

fn audit_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new(Suite::Audit);
    let a = exponent_audit(&reference_alpha())?;
    let q = BigRational::new((-97).into(), 358.into());
    let get = |n: &str| a.row(n).and_then(|row| row.stated.clone());
    r.check("Σ2 at α = 50/358", get("Σ2") == Some(q.clone()), "-97/358");
    r.check("Σ3 at α = 50/358", get("Σ3") == Some(q), "-97/358");
    r.check("m2 = max Σ", a.m2_consistent(), a.dominant);
    r.notes.push(a.to_table());
    r.notes.push(format!("flagged: {}", a.flagged().join(", ")));
    Ok(r)
}
