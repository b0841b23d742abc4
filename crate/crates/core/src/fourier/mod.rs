//! Fourier transforms of the constructed measures with rigorous error bounds.
//!
//! A measure is represented by its depth-level cylinders. The transform is
//! approximated by putting each cylinder's mass at its midpoint; by the mean
//! value theorem the error per cylinder is at most `mass * π |ξ| * width`.
//! Sums are formed in fixed chunks and reduced pairwise in a fixed order, so
//! results do not depend on the number of worker threads.

pub mod audit;
pub mod lemmas;
pub mod m2;
pub mod quad;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::DEFAULT_CYLINDER_BUDGET;
use crate::cf::Convergents;
use crate::error::{Error, Result};
use crate::kaufman::NuMeasure;
use crate::lambda::{LambdaMeasure, Leaf, TypExcSplit};

const CHUNK: usize = 4096;

/// `e(x) = exp(2πix)`, with the argument reduced mod 1 first.
pub fn e(x: f64) -> Complex64 {
    let frac = x - x.floor();
    let t = 2.0 * PI * frac;
    Complex64::new(t.cos(), t.sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "cylinder")]
    Cylinder,
    #[serde(rename = "montecarlo")]
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cylinder => "cylinder",
            Method::MonteCarlo => "montecarlo",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cylinder" => Ok(Method::Cylinder),
            "mc" | "montecarlo" => Ok(Method::MonteCarlo),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierEstimate {
    pub xi: f64,
    pub value: Complex64,
    pub err_bound: f64,
    pub method: Method,
    pub depth: usize,
    pub samples: usize,
}

/// Measures given by masses on depth-level cylinders of `[0, 1]`.
pub trait CylinderMeasure: Sync {
    /// All positive-mass cylinders at `depth`, in a fixed order.
    fn leaves(&self, depth: usize) -> Result<Vec<Leaf>>;
    fn leaf_mass(&self, leaf: &Leaf) -> f64;
    fn sample_leaf(&self, depth: usize, rng: &mut ChaCha8Rng) -> Result<Leaf>;
    /// Upper bound on the width of every positive-mass cylinder at `depth`.
    fn max_width(&self, depth: usize) -> f64;
    /// Typical/exceptional split at `ξ`, when the measure has one.
    fn typ_exc(&self, xi: f64, alpha: &BigRational) -> Result<Option<TypExcSplit>>;
}

/// Smallest continuant among the support tuples.
fn min_block_continuant(nu: &NuMeasure) -> f64 {
    nu.continuant_range().0 as f64
}

impl CylinderMeasure for LambdaMeasure {
    fn leaves(&self, depth: usize) -> Result<Vec<Leaf>> {
        LambdaMeasure::leaves(self, depth)
    }

    fn leaf_mass(&self, leaf: &Leaf) -> f64 {
        self.mass_f64(leaf.typical)
    }

    fn sample_leaf(&self, depth: usize, rng: &mut ChaCha8Rng) -> Result<Leaf> {
        LambdaMeasure::sample_leaf(self, depth, rng)
    }

    fn max_width(&self, depth: usize) -> f64 {
        // q is supermultiplicative across blocks and forced blocks contribute at least 1
        let typical = (depth as u64).saturating_sub(self.max_forced_blocks(depth as u64));
        min_block_continuant(self.nu()).powf(-2.0 * typical as f64).min(1.0)
    }

    fn typ_exc(&self, xi: f64, alpha: &BigRational) -> Result<Option<TypExcSplit>> {
        self.split_typ_exc(xi, alpha).map(Some)
    }
}

/// The product measure `ν^depth` pushed forward to `[0, 1]` with head 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMeasure {
    pub nu: NuMeasure,
}

impl ProductMeasure {
    pub fn new(nu: NuMeasure) -> Self {
        ProductMeasure { nu }
    }

    fn leaf_of(&self, c: &Convergents, depth: usize) -> Leaf {
        let (mid, width) = c.cylinder_f64();
        Leaf {
            typical: depth as u64,
            mid,
            width,
            label: 1,
        }
    }

    fn collect(&self, c: &Convergents, left: usize, depth: usize, out: &mut Vec<Leaf>) {
        if left == 0 {
            out.push(self.leaf_of(c, depth));
            return;
        }
        for t in self.nu.tuples() {
            let mut next = c.clone();
            for &a in t {
                next.push_small(a);
            }
            self.collect(&next, left - 1, depth, out);
        }
    }
}

impl CylinderMeasure for ProductMeasure {
    fn leaves(&self, depth: usize) -> Result<Vec<Leaf>> {
        let count = (self.nu.len() as f64).powi(depth as i32);
        if count > DEFAULT_CYLINDER_BUDGET as f64 {
            return Err(Error::BudgetExceeded {
                requested: count,
                budget: DEFAULT_CYLINDER_BUDGET as f64,
            });
        }
        let root = Convergents::start(&BigUint::zero());
        if depth == 0 {
            return Ok(vec![self.leaf_of(&root, 0)]);
        }
        let parts: Vec<Vec<Leaf>> = (0..self.nu.len())
            .into_par_iter()
            .map(|k| {
                let mut c = root.clone();
                for &a in self.nu.tuple(k) {
                    c.push_small(a);
                }
                let mut out = Vec::new();
                self.collect(&c, depth - 1, depth, &mut out);
                out
            })
            .collect();
        Ok(parts.into_iter().flatten().collect())
    }

    fn leaf_mass(&self, leaf: &Leaf) -> f64 {
        (-(leaf.typical as f64) * (self.nu.len() as f64).ln()).exp()
    }

    fn sample_leaf(&self, depth: usize, rng: &mut ChaCha8Rng) -> Result<Leaf> {
        let mut c = Convergents::start(&BigUint::zero());
        for _ in 0..depth {
            let k = rng.gen_range(0..self.nu.len());
            for &a in self.nu.tuple(k) {
                c.push_small(a);
            }
        }
        Ok(self.leaf_of(&c, depth))
    }

    fn max_width(&self, depth: usize) -> f64 {
        min_block_continuant(&self.nu).powf(-2.0 * depth as f64).min(1.0)
    }

    fn typ_exc(&self, _xi: f64, _alpha: &BigRational) -> Result<Option<TypExcSplit>> {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    value: Complex64,
    width: f64,
    mass: f64,
    count: usize,
}

impl std::ops::Add for Acc {
    type Output = Acc;
    fn add(self, o: Acc) -> Acc {
        Acc {
            value: self.value + o.value,
            width: self.width + o.width,
            mass: self.mass + o.mass,
            count: self.count + o.count,
        }
    }
}

fn pairwise(mut parts: Vec<Acc>) -> Acc {
    if parts.is_empty() {
        return Acc::default();
    }
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] })
            .collect();
    }
    parts[0]
}

/// Cylinders of one measure at one depth, enumerated or sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafSet {
    pub leaves: Vec<Leaf>,
    /// Per-leaf weight: the cylinder mass, or `1/samples` when sampled.
    pub weights: Vec<f64>,
    pub depth: usize,
    pub method: Method,
    /// Bound on every cylinder width at this depth (used by the sampled method).
    pub max_width: f64,
}

impl LeafSet {
    pub fn enumerate<M: CylinderMeasure + ?Sized>(m: &M, depth: usize) -> Result<Self> {
        let leaves = m.leaves(depth)?;
        let weights = leaves.par_iter().map(|l| m.leaf_mass(l)).collect();
        Ok(LeafSet {
            leaves,
            weights,
            depth,
            method: Method::Cylinder,
            max_width: m.max_width(depth),
        })
    }

    /// Draws `samples` cylinders; chunk `k` uses stream `k` of the seeded generator.
    pub fn sample<M: CylinderMeasure + ?Sized>(
        m: &M,
        depth: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        let chunks = samples.div_ceil(CHUNK);
        let parts: Vec<Result<Vec<Leaf>>> = (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let n = CHUNK.min(samples - k * CHUNK);
                (0..n).map(|_| m.sample_leaf(depth, &mut rng)).collect()
            })
            .collect();
        let mut leaves = Vec::with_capacity(samples);
        for p in parts {
            leaves.extend(p?);
        }
        Ok(LeafSet {
            weights: vec![1.0; leaves.len()],
            leaves,
            depth,
            method: Method::MonteCarlo,
            max_width: m.max_width(depth),
        })
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    fn accumulate(&self, xi_abs: f64, keep: &(dyn Fn(&Leaf) -> bool + Sync)) -> Acc {
        let parts: Vec<Acc> = self
            .leaves
            .par_chunks(CHUNK)
            .zip(self.weights.par_chunks(CHUNK))
            .map(|(ls, ws)| {
                let mut acc = Acc::default();
                for (l, &w) in ls.iter().zip(ws) {
                    if !keep(l) {
                        continue;
                    }
                    acc.value += e(xi_abs * l.mid) * w;
                    acc.width += w * l.width;
                    acc.mass += w;
                    acc.count += 1;
                }
                acc
            })
            .collect();
        pairwise(parts)
    }

    /// Estimate of `∫ e(ξx) dμ` over the leaves accepted by `keep`.
    ///
    /// `exact_mass` is the mass of the accepted part; it is returned as the
    /// value at `ξ = 0` for the enumerated method.
    pub fn estimate(
        &self,
        xi: f64,
        keep: &(dyn Fn(&Leaf) -> bool + Sync),
        exact_mass: Option<f64>,
    ) -> FourierEstimate {
        let xa = xi.abs();
        let mk = |value: Complex64, err_bound: f64| FourierEstimate {
            xi,
            value: if xi < 0.0 { value.conj() } else { value },
            err_bound,
            method: self.method,
            depth: self.depth,
            samples: if self.method == Method::MonteCarlo { self.len() } else { 0 },
        };
        match self.method {
            Method::Cylinder => {
                if xi == 0.0 {
                    if let Some(m) = exact_mass {
                        return mk(Complex64::new(m, 0.0), 0.0);
                    }
                }
                let acc = self.accumulate(xa, keep);
                let slack = rounding_slack(xa, acc.mass, CHUNK.min(acc.count.max(1)));
                let err = PI * xa * acc.width * (1.0 + 1e-12) + slack;
                mk(acc.value, err)
            }
            Method::MonteCarlo => {
                let n = self.len() as f64;
                let acc = self.accumulate(xa, keep);
                let err = 3.0 / n.sqrt()
                    + PI * xa * self.max_width * (1.0 + 1e-12)
                    + rounding_slack(xa, 1.0, CHUNK.min(acc.count.max(1)));
                mk(acc.value / n, err)
            }
        }
    }
}

/// Float slack: phase rounding of `ξ · mid` plus summation rounding.
fn rounding_slack(xi_abs: f64, mass: f64, run: usize) -> f64 {
    let phase = 2.0 * PI * xi_abs * 2f64.powi(-48);
    let sum = (run as f64 + 64.0) * 4.0 * f64::EPSILON;
    (phase + sum) * mass.max(1.0) + 1e-15
}

fn keep_all(_: &Leaf) -> bool {
    true
}

/// Cylinder-sum estimate of `μ̂(ξ)` at `depth`.
pub fn fourier_cylinder_sum<M: CylinderMeasure + ?Sized>(
    m: &M,
    xi: f64,
    depth: usize,
) -> Result<FourierEstimate> {
    if !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("frequency {xi} is not finite")));
    }
    Ok(LeafSet::enumerate(m, depth)?.estimate(xi, &keep_all, Some(1.0)))
}

/// Monte Carlo estimate of `μ̂(ξ)` from `samples` sampled cylinders.
pub fn fourier_monte_carlo<M: CylinderMeasure + ?Sized>(
    m: &M,
    xi: f64,
    samples: usize,
    depth: usize,
    seed: u64,
) -> Result<FourierEstimate> {
    if !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("frequency {xi} is not finite")));
    }
    Ok(LeafSet::sample(m, depth, samples, seed)?.estimate(xi, &keep_all, Some(1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub method: Method,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    /// Exponent in the scale `|ξ|^α` that selects the exceptional stage.
    pub alpha: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub xi: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub err: f64,
    pub n_index: usize,
    pub exc_tv: f64,
    pub typ_re: f64,
    pub typ_im: f64,
    pub typ_abs: f64,
    pub typ_err: f64,
}

impl DecayRow {
    /// `|μ̂| <= exc_tv + |λ̂_typ| + both error bounds`.
    pub fn triangle_holds(&self) -> bool {
        self.abs <= self.exc_tv + self.typ_abs + self.err + self.typ_err
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayTable {
    pub method: Method,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<DecayRow>,
}

pub const CSV_HEADER: &str = "xi,re,im,abs,err,n_index,exc_tv";

impl DecayTable {
    /// CSV with an optional leading `#` comment line.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut s = String::new();
        if let Some(c) = comment {
            let _ = writeln!(s, "# {c}");
        }
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                fmt_g17(r.xi),
                fmt_g17(r.re),
                fmt_g17(r.im),
                fmt_g17(r.abs),
                fmt_g17(r.err),
                r.n_index,
                fmt_g17(r.exc_tv)
            );
        }
        s
    }

    /// Least-squares slope of `ln |μ̂|` against `ln ξ` over rows with `ξ > 0`.
    pub fn log_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.xi > 0.0 && r.abs > 0.0)
            .map(|r| (r.xi.ln(), r.abs.ln()))
            .collect();
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        crate::kaufman::least_squares_slope(&x, &y)
    }
}

/// Estimates `μ̂(ξ)` along `xi_list` together with the typical/exceptional split.
pub fn decay_scan<M: CylinderMeasure + ?Sized>(
    m: &M,
    xi_list: &[f64],
    opts: &ScanOptions,
) -> Result<DecayTable> {
    if xi_list.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter("frequencies must be sorted ascending".into()));
    }
    if let Some(x) = xi_list.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("frequency {x} is not finite")));
    }
    let set = match opts.method {
        Method::Cylinder => LeafSet::enumerate(m, opts.depth)?,
        Method::MonteCarlo => LeafSet::sample(m, opts.depth, opts.samples, opts.seed)?,
    };
    let mut rows = Vec::with_capacity(xi_list.len());
    for &xi in xi_list {
        let full = set.estimate(xi, &keep_all, Some(1.0));
        let (n_index, exc_tv, typ) = match m.typ_exc(xi, &opts.alpha)? {
            None => (0, 0.0, full),
            Some(split) => {
                if split.classify_depth > opts.depth as u64 {
                    return Err(Error::DepthExceeded {
                        requested: split.classify_depth as usize,
                        built: opts.depth,
                    });
                }
                let typ_mass = split.typ_mass.to_f64().unwrap_or(f64::NAN);
                let keep = |l: &Leaf| !split.is_exceptional(l.label);
                let mut typ = set.estimate(xi, &keep, Some(typ_mass));
                if xi == 0.0 && opts.method == Method::Cylinder {
                    // the float of an exact rational is within one ulp
                    typ.err_bound = f64::EPSILON;
                }
                (split.n_index, split.exc_mass_f64(), typ)
            }
        };
        rows.push(DecayRow {
            xi,
            re: full.value.re,
            im: full.value.im,
            abs: full.value.norm(),
            err: full.err_bound,
            n_index,
            exc_tv,
            typ_re: typ.value.re,
            typ_im: typ.value.im,
            typ_abs: typ.value.norm(),
            typ_err: typ.err_bound,
        });
    }
    Ok(DecayTable {
        method: opts.method,
        depth: opts.depth,
        samples: if opts.method == Method::MonteCarlo { opts.samples } else { 0 },
        seed: opts.seed,
        rows,
    })
}

/// The dyadic frequencies `2^lo, ..., 2^hi`.
pub fn dyadic_frequencies(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

/// Formats like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kaufman::build_nu;
    use crate::lambda::LambdaConfig;

    fn desk_lambda() -> LambdaMeasure {
        let cfg: LambdaConfig = serde_json::from_str(
            r#"{"nu":{"N":3,"p":2,"sigma":1.3862943611198906,"eps_window":0.2},
                "schedule":{"i":[1,3,5,7,9,11],"r":[1,1,1,1,1,1]},
                "rule":{"kind":"psi-power","tau":"3"}}"#,
        )
        .unwrap();
        cfg.build().unwrap()
    }

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(1e17), "1e+17");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        for x in [0.3, 1.0 / 3.0, 2f64.powi(25), 7.25e-300, -1e300] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn zero_frequency_is_total_mass() {
        let pm = ProductMeasure::new(build_nu(3, 2, 4f64.ln(), 0.2).unwrap());
        let est = fourier_cylinder_sum(&pm, 0.0, 2).unwrap();
        assert_eq!(est.value, Complex64::new(1.0, 0.0));
        assert_eq!(est.err_bound, 0.0);
    }

    #[test]
    fn single_cylinder() {
        // depth 0 is the whole interval [0, 1]
        let pm = ProductMeasure::new(build_nu(3, 2, 4f64.ln(), 0.2).unwrap());
        let est = fourier_cylinder_sum(&pm, 3.0, 0).unwrap();
        assert!((est.value - e(1.5)).norm() < 1e-15);
        assert!(est.err_bound >= PI * 3.0 && est.err_bound < PI * 3.0 + 1e-9);
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let lm = desk_lambda();
        let set = LeafSet::enumerate(&lm, 6).unwrap();
        let a = set.estimate(37.0, &keep_all, Some(1.0));
        let b = set.estimate(-37.0, &keep_all, Some(1.0));
        assert_eq!(a.value.conj(), b.value);
        assert_eq!(a.err_bound, b.err_bound);
        let mc = LeafSet::sample(&lm, 6, 5000, 7).unwrap();
        assert_eq!(
            mc.estimate(5.0, &keep_all, None).value.conj(),
            mc.estimate(-5.0, &keep_all, None).value
        );
    }

    #[test]
    fn two_depths_agree() {
        let pm = ProductMeasure::new(build_nu(3, 2, 4f64.ln(), 0.2).unwrap());
        for xi in [1.0, 8.0, 64.0, 512.0] {
            let a = fourier_cylinder_sum(&pm, xi, 3).unwrap();
            let b = fourier_cylinder_sum(&pm, xi, 5).unwrap();
            assert!((a.value - b.value).norm() <= a.err_bound + b.err_bound);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let lm = desk_lambda();
        let a = fourier_monte_carlo(&lm, 16.0, 10_000, 8, 42).unwrap();
        let b = fourier_monte_carlo(&lm, 16.0, 10_000, 8, 42).unwrap();
        assert_eq!(a, b);
        let z = fourier_monte_carlo(&lm, 0.0, 10_000, 8, 42).unwrap();
        assert_eq!(z.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unsorted_frequencies_rejected() {
        let lm = desk_lambda();
        let opts = ScanOptions {
            method: Method::Cylinder,
            depth: 4,
            samples: 0,
            seed: 0,
            alpha: BigRational::from_integer(1.into()),
        };
        assert!(matches!(
            decay_scan(&lm, &[2.0, 1.0], &opts),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn scan_records_exceptional_mass() {
        let lm = desk_lambda();
        let opts = ScanOptions {
            method: Method::Cylinder,
            depth: 12,
            samples: 0,
            seed: 0,
            alpha: BigRational::from_integer(1.into()),
        };
        let xs = dyadic_frequencies(4, 10);
        let t = decay_scan(&lm, &xs, &opts).unwrap();
        for (r, &xi) in t.rows.iter().zip(&xs) {
            let split = lm.split_typ_exc(xi, &opts.alpha).unwrap();
            assert_eq!(r.exc_tv, split.exc_mass_f64());
            assert_eq!(r.n_index, split.n_index);
            assert!(r.triangle_holds());
        }
        let csv = t.to_csv(Some("hash=abc"));
        assert!(csv.starts_with("# hash=abc\nxi,re,im,abs,err,n_index,exc_tv\n"));
        assert_eq!(csv.lines().count(), 2 + xs.len());
    }
}
