//! Checkers for the three oscillatory-integral inequalities.
//!
//! Hypotheses are certified on a dense grid: a sup over a grid of spacing `h`
//! is within `h/2 * sup|f'|` of the true sup, and `sup|f'|` is bounded from
//! the coefficients. A check only fails when the violation exceeds the
//! quadrature and rounding budget.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::Convergents;
use crate::error::{Error, Result};
use crate::fourier::e;
use crate::fourier::quad::{integrate, integrate_real};
use crate::kaufman::NuMeasure;

pub const GRID_POINTS: usize = 4096;
const EVAL_SLACK: f64 = 1e-12;

fn f64_of(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
    approx: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let approx = coeffs.iter().map(f64_of).collect();
        Poly { coeffs, approx }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.approx.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Poly {
        let mut out = vec![BigRational::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c / BigRational::from_integer(BigInt::from(k + 1)));
        }
        Poly::new(out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// `sum |c_k| R^k` with `R = max(|lo|, |hi|)`: bounds `|p|` on `[lo, hi]`.
    pub fn sup_bound(&self, lo: f64, hi: f64) -> f64 {
        let r = lo.abs().max(hi.abs());
        self.approx.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs()) * (1.0 + 1e-12)
    }
}

/// `f(t) = sum_k cos_k cos(2π k ω t) + sin_k sin(2π k ω t)`, `k = 0, 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub omega: BigRational,
    pub cos: Vec<BigRational>,
    pub sin: Vec<BigRational>,
}

impl TrigPoly {
    /// `j`-th derivative at `t`.
    pub fn eval(&self, j: u32, t: f64) -> f64 {
        let w = 2.0 * PI * f64_of(&self.omega);
        let terms = self.cos.len().max(self.sin.len());
        let mut s = 0.0;
        for k in 0..terms {
            let c = self.cos.get(k).map(f64_of).unwrap_or(0.0);
            let d = self.sin.get(k).map(f64_of).unwrap_or(0.0);
            let kw = k as f64 * w;
            let x = kw * t;
            // derivatives cycle cos -> -sin -> -cos -> sin
            let (cv, sv) = match j % 4 {
                0 => (x.cos(), x.sin()),
                1 => (-x.sin(), x.cos()),
                2 => (-x.cos(), -x.sin()),
                _ => (x.sin(), -x.cos()),
            };
            s += kw.powi(j as i32) * (c * cv + d * sv);
        }
        s
    }

    /// Coefficient bound on the `j`-th derivative.
    pub fn deriv_bound(&self, j: u32) -> f64 {
        let w = 2.0 * PI * f64_of(&self.omega);
        let terms = self.cos.len().max(self.sin.len());
        let mut s = 0.0;
        for k in 0..terms {
            let c = self.cos.get(k).map(|x| f64_of(&x.abs())).unwrap_or(0.0);
            let d = self.sin.get(k).map(|x| f64_of(&x.abs())).unwrap_or(0.0);
            s += (k as f64 * w).powi(j as i32) * (c + d);
        }
        s * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Trig(TrigPoly),
    Poly(Poly),
}

impl TestFunction {
    pub fn eval(&self, j: u32, t: f64) -> f64 {
        match self {
            TestFunction::Trig(tp) => tp.eval(j, t),
            TestFunction::Poly(p) => {
                let mut q = p.clone();
                for _ in 0..j {
                    q = q.derivative();
                }
                q.eval(t)
            }
        }
    }

    /// Exact bound on `|f|` from the coefficients, where one is available.
    pub fn exact_sup_bound(&self) -> Option<BigRational> {
        match self {
            TestFunction::Trig(tp) => Some(
                tp.cos
                    .iter()
                    .chain(&tp.sin)
                    .fold(BigRational::zero(), |acc, c| acc + c.abs()),
            ),
            TestFunction::Poly(_) => None,
        }
    }

    pub fn deriv_bound(&self, j: u32, lo: f64, hi: f64) -> f64 {
        match self {
            TestFunction::Trig(tp) => tp.deriv_bound(j),
            TestFunction::Poly(p) => {
                let mut q = p.clone();
                for _ in 0..j {
                    q = q.derivative();
                }
                q.sup_bound(lo, hi)
            }
        }
    }
}

/// Certified `(inf |g|, sup |g|)` for `g = f^{(j)}` on `[lo, hi]`.
pub fn certify_range(f: &TestFunction, j: u32, lo: f64, hi: f64) -> (f64, f64) {
    let h = (hi - lo) / (GRID_POINTS - 1) as f64;
    let lip = f.deriv_bound(j + 1, lo, hi);
    let scale = f.deriv_bound(j, lo, hi);
    let (mut mn, mut mx) = (f64::INFINITY, 0.0f64);
    for k in 0..GRID_POINTS {
        let t = if k == GRID_POINTS - 1 { hi } else { lo + k as f64 * h };
        let v = f.eval(j, t).abs();
        mn = mn.min(v);
        mx = mx.max(v);
    }
    let slack = 0.5 * h * lip + EVAL_SLACK * (1.0 + scale);
    ((mn - slack).max(0.0), mx + slack)
}

/// Discrete probability measure on the line.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomMeasure {
    points: Vec<f64>,
    masses: Vec<f64>,
}

impl AtomMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() || atoms.iter().any(|(x, m)| !x.is_finite() || !(*m >= 0.0)) {
            return Err(Error::InvalidParameter("atoms must be finite with nonnegative mass".into()));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (points, masses) = atoms.into_iter().unzip();
        Ok(AtomMeasure { points, masses })
    }

    /// `ν^depth` seen through the tail variable `t = 1/x in [1, N+1]`,
    /// one atom at the image of each cylinder midpoint.
    pub fn nu_tail(nu: &NuMeasure, depth: u32) -> Result<Self> {
        let count = (nu.len() as f64).powi(depth as i32);
        if count > crate::budget::DEFAULT_CYLINDER_BUDGET as f64 {
            return Err(Error::BudgetExceeded {
                requested: count,
                budget: crate::budget::DEFAULT_CYLINDER_BUDGET as f64,
            });
        }
        let mut atoms = Vec::with_capacity(count as usize);
        let mut stack = vec![(Convergents::start(&num_bigint::BigUint::zero()), 0u32)];
        while let Some((c, d)) = stack.pop() {
            if d == depth {
                atoms.push((1.0 / c.cylinder_f64().0, 1.0 / count));
                continue;
            }
            for t in nu.tuples() {
                let mut next = c.clone();
                for &a in t {
                    next.push_small(a);
                }
                stack.push((next, d + 1));
            }
        }
        AtomMeasure::new(atoms)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn support_hull(&self) -> (f64, f64) {
        (self.points[0], *self.points.last().expect("nonempty"))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64 + Sync) -> f64 {
        let parts: Vec<f64> = self
            .points
            .par_chunks(4096)
            .zip(self.masses.par_chunks(4096))
            .map(|(ps, ms)| ps.iter().zip(ms).map(|(&p, &m)| m * f(p)).sum())
            .collect();
        parts.iter().sum()
    }

    /// Largest mass of a closed interval of length `u`.
    pub fn omega(&self, u: f64) -> f64 {
        let mut best = 0.0f64;
        let mut j = 0;
        let mut window = 0.0;
        for i in 0..self.points.len() {
            if j < i {
                j = i;
                window = 0.0;
            }
            while j < self.points.len() && self.points[j] - self.points[i] <= u {
                window += self.masses[j];
                j += 1;
            }
            best = best.max(window);
            window -= self.masses[i];
        }
        best.min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralCase {
    pub f: TestFunction,
    pub lo: BigRational,
    pub hi: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonstationaryCase {
    /// Phase `f` on `[0, 1]`.
    pub phase: Poly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryCase {
    pub a1: BigRational,
    pub a2: BigRational,
    /// `g`, with `h' = (a1 x + a2) g` and `h(0) = 0`.
    pub g: Poly,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OscillatoryTestCase {
    Integral(IntegralCase),
    Nonstationary(NonstationaryCase),
    Stationary(StationaryCase),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralReport {
    pub lhs: f64,
    pub m2: f64,
    pub m2_err: f64,
    pub m_bound: f64,
    pub u: f64,
    pub omega: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatoryReport {
    pub integral_abs: f64,
    pub quad_err: f64,
    pub a: f64,
    pub b: f64,
    pub bound: f64,
    pub holds: bool,
}

impl OscillatoryReport {
    pub fn ratio(&self) -> f64 {
        self.integral_abs / self.bound
    }
}

/// `∫|f| dλ_K <= 2M^{1/10} m2^{3/10} + Ω(M^{-9/10} m2^{3/10})(1 + M^{7/10} m2^{1/10})`.
pub fn check_integral_inequality(case: &IntegralCase, measure: &AtomMeasure) -> Result<IntegralReport> {
    let lo = f64_of(&case.lo);
    let hi = f64_of(&case.hi);
    if !(lo < hi) {
        return Err(Error::InvalidParameter("interval must have lo < hi".into()));
    }
    let (a, b) = measure.support_hull();
    if a < lo || b > hi {
        return Err(Error::PreconditionViolated("measure is not supported on the interval".into()));
    }
    let exact_ok = case
        .f
        .exact_sup_bound()
        .map_or(false, |s| s <= BigRational::from_integer(1.into()));
    let (_, sup_f) = certify_range(&case.f, 0, lo, hi);
    if !exact_ok && sup_f > 1.0 {
        return Err(Error::CertificationFailed(format!(
            "cannot certify |f| <= 1 (grid bound {sup_f})"
        )));
    }
    let (_, m_cert) = certify_range(&case.f, 1, lo, hi);
    let m = m_cert.max(f64::MIN_POSITIVE);
    let q = integrate_real(
        |t| {
            let v = case.f.eval(0, t);
            v * v
        },
        lo,
        hi,
        1e-10 * (hi - lo),
        4000,
    );
    let m2 = q.value.re.max(0.0);
    // the right side is increasing in m2 and u, so round both up
    let m2_hi = m2 + q.err;
    let u = m.powf(-0.9) * m2_hi.powf(0.3) * (1.0 + 1e-12);
    let omega = measure.omega(u);
    let rhs = 2.0 * m.powf(0.1) * m2_hi.powf(0.3) + omega * (1.0 + m.powf(0.7) * m2_hi.powf(0.1));
    let lhs = measure.integrate(|t| case.f.eval(0, t).abs());
    let lhs_lo = lhs * (1.0 - 1e-12) - 1e-15;
    Ok(IntegralReport {
        lhs,
        m2,
        m2_err: q.err,
        m_bound: m,
        u,
        omega,
        rhs,
        holds: lhs_lo <= rhs * (1.0 + 1e-12),
    })
}

fn phase_integral(h: &Poly) -> (f64, f64) {
    let dh = h.derivative();
    let speed = dh.sup_bound(0.0, 1.0);
    let panels = (64.0 + 8.0 * speed).min(20_000.0) as usize;
    let q = integrate(|x| e(h.eval(x)), 0.0, 1.0, 1e-11, panels);
    // phase evaluation error moves e(h) by at most 2π |δh|
    let phase_slack = 2.0 * PI * EVAL_SLACK * (1.0 + h.sup_bound(0.0, 1.0));
    (q.value.norm(), q.err + phase_slack)
}

/// `|∫_0^1 e(f)| < 1/a + b/a^2` when `|f'| >= a > 0` and `|f''| <= b`.
pub fn check_nonstationary(case: &NonstationaryCase) -> Result<OscillatoryReport> {
    let f = TestFunction::Poly(case.phase.clone());
    let (a, _) = certify_range(&f, 1, 0.0, 1.0);
    if a <= 0.0 {
        return Err(Error::CertificationFailed(
            "cannot certify |f'| >= a > 0 on [0, 1]".into(),
        ));
    }
    let (_, b) = certify_range(&f, 2, 0.0, 1.0);
    let (integral_abs, quad_err) = phase_integral(&case.phase);
    let bound = 1.0 / a + b / (a * a);
    Ok(OscillatoryReport {
        integral_abs,
        quad_err,
        a,
        b,
        bound,
        holds: integral_abs - quad_err < bound,
    })
}

/// `|∫_0^1 e(h)| < 6 b a^{-3/2} |a1|^{-1/2}` when `h' = (a1 x + a2) g`,
/// `|g| >= a`, `|g'| <= b`.
pub fn check_stationary(case: &StationaryCase) -> Result<OscillatoryReport> {
    if case.a1.is_zero() {
        return Err(Error::CertificationFailed("a1 must be nonzero".into()));
    }
    let g = TestFunction::Poly(case.g.clone());
    let (a, _) = certify_range(&g, 0, 0.0, 1.0);
    if a <= 0.0 {
        return Err(Error::CertificationFailed("cannot certify |g| >= a > 0 on [0, 1]".into()));
    }
    let (_, b_cert) = certify_range(&g, 1, 0.0, 1.0);
    // any b > 1 is admissible; b = 1 gives the infimum of the bounds
    let b = b_cert.max(1.0);
    let linear = Poly::new(vec![case.a2.clone(), case.a1.clone()]);
    let h = linear.mul(&case.g).integral();
    let (integral_abs, quad_err) = phase_integral(&h);
    let a1 = f64_of(&case.a1.abs());
    let bound = 6.0 * b * a.powf(-1.5) * a1.powf(-0.5);
    Ok(OscillatoryReport {
        integral_abs,
        quad_err,
        a,
        b,
        bound,
        holds: integral_abs - quad_err < bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub lemma: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub violations: usize,
    pub certification_failures: usize,
    /// Largest `lhs / rhs` seen.
    pub worst_ratio: f64,
}

impl SweepSummary {
    pub fn clean(&self) -> bool {
        self.violations == 0 && self.certification_failures == 0
    }
}

fn case_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn rand_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> BigRational {
    rat(rng.gen_range(lo * den..=hi * den), den)
}

/// Random trigonometric polynomial with coefficient sum at most 1.
pub fn random_trig(rng: &mut ChaCha8Rng) -> TrigPoly {
    let omega = rat(rng.gen_range(1..=128), 4);
    let terms = rng.gen_range(2..=5);
    let mut cos: Vec<BigRational> = (0..terms).map(|_| rand_rat(rng, -1, 1, 1000)).collect();
    let mut sin: Vec<BigRational> = (0..terms).map(|_| rand_rat(rng, -1, 1, 1000)).collect();
    sin[0] = BigRational::zero();
    let total = cos.iter().chain(&sin).fold(BigRational::zero(), |acc, c| acc + c.abs());
    if total.is_zero() {
        cos[1] = rat(1, 1);
    } else {
        let scale = rat(rng.gen_range(500..=1000), 1000) / total;
        for c in cos.iter_mut().chain(sin.iter_mut()) {
            *c *= &scale;
        }
    }
    TrigPoly { omega, cos, sin }
}

/// Random cubic phase whose derivative keeps the sign of its linear term.
pub fn random_cubic(rng: &mut ChaCha8Rng) -> Poly {
    let c1 = rand_rat(rng, 1, 60, 64);
    let c1 = if rng.gen_bool(0.5) { -c1 } else { c1 };
    let spread = c1.abs() / rat(6, 1);
    let mut coef = || spread.clone() * rand_rat(rng, -1, 1, 256);
    let c2 = coef();
    let c3 = coef();
    let c0 = rand_rat(rng, -1, 1, 64);
    Poly::new(vec![c0, c1, c2, c3])
}

/// Random stationary case; the critical point `-a2/a1` is often inside `[0, 1]`.
pub fn random_stationary(rng: &mut ChaCha8Rng) -> StationaryCase {
    let mut a1 = rand_rat(rng, -400, 400, 4);
    if a1.abs() < rat(1, 1) {
        a1 = rat(1, 1);
    }
    let x0 = rand_rat(rng, -1, 2, 256) / rat(2, 1) + rat(1, 4);
    let a2 = -(&a1 * x0);
    let g0 = rand_rat(rng, 1, 3, 64);
    let g0 = if rng.gen_bool(0.5) { -g0 } else { g0 };
    let spread = g0.abs() / rat(4, 1);
    let g1 = spread.clone() * rand_rat(rng, -1, 1, 256);
    let g2 = spread * rand_rat(rng, -1, 1, 256);
    StationaryCase {
        a1,
        a2,
        g: Poly::new(vec![g0, g1, g2]),
    }
}

fn summarize(lemma: &'static str, seed: u64, results: Vec<Result<(bool, f64)>>) -> SweepSummary {
    let mut s = SweepSummary {
        lemma,
        seed,
        cases: results.len(),
        violations: 0,
        certification_failures: 0,
        worst_ratio: 0.0,
    };
    for r in results {
        match r {
            Ok((holds, ratio)) => {
                if !holds {
                    s.violations += 1;
                }
                s.worst_ratio = s.worst_ratio.max(ratio);
            }
            Err(_) => s.certification_failures += 1,
        }
    }
    s
}

/// Seeded sweep of the integral inequality over random trigonometric
/// polynomials on `[1, N+1]`.
pub fn sweep_integral(seed: u64, cases: usize, measure: &AtomMeasure, n: u64) -> SweepSummary {
    let lo = rat(1, 1);
    let hi = rat(n as i64 + 1, 1);
    let results = (0..cases)
        .into_par_iter()
        .map(|k| {
            let mut rng = case_rng(seed, k);
            let case = IntegralCase {
                f: TestFunction::Trig(random_trig(&mut rng)),
                lo: lo.clone(),
                hi: hi.clone(),
            };
            check_integral_inequality(&case, measure).map(|r| (r.holds, r.lhs / r.rhs))
        })
        .collect();
    summarize("integral", seed, results)
}

pub fn sweep_nonstationary(seed: u64, cases: usize) -> SweepSummary {
    let results = (0..cases)
        .into_par_iter()
        .map(|k| {
            let case = NonstationaryCase {
                phase: random_cubic(&mut case_rng(seed, k)),
            };
            check_nonstationary(&case).map(|r| (r.holds, r.ratio()))
        })
        .collect();
    summarize("nonstationary", seed, results)
}

pub fn sweep_stationary(seed: u64, cases: usize) -> SweepSummary {
    let results = (0..cases)
        .into_par_iter()
        .map(|k| {
            let case = random_stationary(&mut case_rng(seed, k));
            check_stationary(&case).map(|r| (r.holds, r.ratio()))
        })
        .collect();
    summarize("stationary", seed, results)
}

/// Dispatches on the case kind; the integral inequality needs a measure.
pub fn check_case(case: &OscillatoryTestCase, measure: Option<&AtomMeasure>) -> Result<bool> {
    match case {
        OscillatoryTestCase::Integral(c) => {
            let m = measure.ok_or_else(|| {
                Error::InvalidParameter("the integral inequality needs a measure".into())
            })?;
            Ok(check_integral_inequality(c, m)?.holds)
        }
        OscillatoryTestCase::Nonstationary(c) => Ok(check_nonstationary(c)?.holds),
        OscillatoryTestCase::Stationary(c) => Ok(check_stationary(c)?.holds),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kaufman::build_nu;

    fn ints(v: &[i64]) -> Poly {
        Poly::new(v.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn poly_algebra() {
        let p = ints(&[1, 2, 3]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative(), ints(&[2, 6]));
        assert_eq!(p.integral().derivative(), p);
        assert_eq!(ints(&[1, 1]).mul(&ints(&[-1, 1])), ints(&[-1, 0, 1]));
    }

    #[test]
    fn trig_derivatives() {
        let tp = TrigPoly {
            omega: rat(3, 2),
            cos: vec![rat(1, 4), rat(1, 2)],
            sin: vec![rat(0, 1), rat(1, 4)],
        };
        let h = 1e-5;
        for t in [0.1, 0.7, 1.9] {
            for j in 0..3 {
                let fd = (tp.eval(j, t + h) - tp.eval(j, t - h)) / (2.0 * h);
                assert!((fd - tp.eval(j + 1, t)).abs() < 1e-4 * (1.0 + tp.deriv_bound(j + 2)));
            }
        }
    }

    #[test]
    fn omega_windows() {
        let m = AtomMeasure::new(vec![(0.0, 0.25), (0.1, 0.25), (0.5, 0.25), (1.0, 0.25)]).unwrap();
        assert_eq!(m.omega(0.05), 0.25);
        assert_eq!(m.omega(0.1), 0.5);
        assert_eq!(m.omega(0.5), 0.75);
        assert_eq!(m.omega(2.0), 1.0);
    }

    #[test]
    fn constant_one() {
        let nu = build_nu(3, 2, 4f64.ln(), 0.2).unwrap();
        let atoms = AtomMeasure::nu_tail(&nu, 2).unwrap();
        let case = IntegralCase {
            f: TestFunction::Trig(TrigPoly {
                omega: rat(1, 1),
                cos: vec![rat(1, 1)],
                sin: vec![],
            }),
            lo: rat(1, 1),
            hi: rat(4, 1),
        };
        let r = check_integral_inequality(&case, &atoms).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12);
        assert!((r.m2 - 3.0).abs() < 1e-9);
        assert!(r.holds);
    }

    #[test]
    fn sine_family() {
        let nu = build_nu(3, 2, 4f64.ln(), 0.2).unwrap();
        let atoms = AtomMeasure::nu_tail(&nu, 3).unwrap();
        for c in 1..=32 {
            let case = IntegralCase {
                f: TestFunction::Trig(TrigPoly {
                    omega: rat(c, 1),
                    cos: vec![rat(0, 1)],
                    sin: vec![rat(0, 1), rat(1, 1)],
                }),
                lo: rat(1, 1),
                hi: rat(4, 1),
            };
            let r = check_integral_inequality(&case, &atoms).unwrap();
            assert!(r.holds, "c = {c}: {r:?}");
            assert!((r.m2 - 1.5).abs() < 1e-8);
        }
    }

    #[test]
    fn unbounded_f_is_rejected() {
        let nu = build_nu(3, 2, 4f64.ln(), 0.2).unwrap();
        let atoms = AtomMeasure::nu_tail(&nu, 1).unwrap();
        let case = IntegralCase {
            f: TestFunction::Poly(ints(&[0, 1])),
            lo: rat(1, 1),
            hi: rat(4, 1),
        };
        assert!(matches!(
            check_integral_inequality(&case, &atoms),
            Err(Error::CertificationFailed(_))
        ));
    }

    #[test]
    fn linear_phase() {
        for c in [1i64, 3, 7, 20, 101] {
            let r = check_nonstationary(&NonstationaryCase { phase: ints(&[0, c]) }).unwrap();
            let cf = c as f64;
            assert!((r.a - cf).abs() < 1e-9 && r.b < 1e-9);
            let exact = (PI * cf).sin().abs() / (PI * cf);
            assert!((r.integral_abs - exact).abs() <= r.quad_err + 1e-12);
            assert!(r.holds);
        }
        let r = check_nonstationary(&NonstationaryCase {
            phase: Poly::new(vec![rat(0, 1), rat(5, 2), rat(0, 1)]),
        })
        .unwrap();
        assert!(r.integral_abs <= 1.0 / 2.5 + 1e-12);
    }

    #[test]
    fn quadratic_phase() {
        // f = ct + dt^2/2 with c > |d|
        for (c, d) in [(10, 3), (40, -25), (7, 6)] {
            let phase = Poly::new(vec![rat(0, 1), rat(c, 1), rat(d, 2)]);
            let r = check_nonstationary(&NonstationaryCase { phase }).unwrap();
            assert!(r.holds, "{c} {d}: {r:?}");
            let inf = (c + d.min(0)) as f64;
            assert!(r.a <= inf && r.a > inf - 1e-2);
        }
    }

    #[test]
    fn vanishing_derivative_fails_certification() {
        let phase = Poly::new(vec![rat(0, 1), rat(-1, 1), rat(1, 1)]);
        assert!(matches!(
            check_nonstationary(&NonstationaryCase { phase }),
            Err(Error::CertificationFailed(_))
        ));
    }

    #[test]
    fn fresnel() {
        let mut prev = f64::INFINITY;
        for c in [4i64, 16, 64, 256, 1024] {
            let case = StationaryCase {
                a1: rat(c, 1),
                a2: rat(0, 1),
                g: ints(&[1]),
            };
            let r = check_stationary(&case).unwrap();
            assert!(r.holds);
            assert!((r.bound * (c as f64).sqrt() - 6.0).abs() < 1e-9);
            assert!(r.integral_abs * (c as f64).sqrt() < 6.0);
            assert!(r.bound < prev);
            prev = r.bound;
        }
    }

    #[test]
    fn degenerate_a1() {
        let case = StationaryCase {
            a1: rat(0, 1),
            a2: rat(1, 1),
            g: ints(&[1]),
        };
        assert!(matches!(check_stationary(&case), Err(Error::CertificationFailed(_))));
    }

    #[test]
    fn small_sweeps_are_clean() {
        assert!(sweep_nonstationary(11, 20).clean());
        assert!(sweep_stationary(11, 20).clean());
        let nu = build_nu(3, 2, 4f64.ln(), 0.2).unwrap();
        let atoms = AtomMeasure::nu_tail(&nu, 3).unwrap();
        assert!(sweep_integral(11, 20, &atoms, 3).clean());
    }
}
