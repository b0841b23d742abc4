//! The L² mass `m2 = ∫_1^{N+1} |f(t)|^2 dt` of the rescaled transform,
//! split by how the denominators of the two prefixes compare.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::DEFAULT_CYLINDER_BUDGET;
use crate::error::{Error, Result};
use crate::fourier::e;
use crate::fourier::quad::{integrate, integrate_real};
use crate::lambda::LambdaMeasure;

/// Largest prefix family handled by the pairwise sum.
pub const PREFIX_BUDGET: usize = 2000;

#[derive(Debug, Clone)]
struct Prefix {
    p: f64,
    p_prev: f64,
    q: BigUint,
    q_prev: BigUint,
    qf: f64,
    qf_prev: f64,
    mass: f64,
}

impl Prefix {
    fn phi(&self, t: f64) -> f64 {
        (self.p * t + self.p_prev) / (self.qf * t + self.qf_prev)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct M2Report {
    pub xi: f64,
    pub i_value: u64,
    pub n_index: usize,
    pub prefixes: usize,
    /// Sum of the per-pair integrals, each pair counted in both orders.
    pub m2: f64,
    /// `∫|f|^2` computed directly from `f`.
    pub m2_direct: f64,
    pub quad_err: f64,
    /// `q` equal, `q'` different.
    pub sigma1: f64,
    /// `q` different.
    pub sigma2: f64,
    /// `q` and `q'` both equal.
    pub sigma3: f64,
    pub s1_weight: f64,
    pub s2_weight: f64,
    pub s3_weight: f64,
    /// `sum λ(x)^2` over the family.
    pub sum_sq_mass: f64,
    pub interval_len: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Part {
    sigma: [f64; 3],
    weight: [f64; 3],
    err: f64,
}

impl std::ops::Add for Part {
    type Output = Part;
    fn add(self, o: Part) -> Part {
        let mut r = self;
        for k in 0..3 {
            r.sigma[k] += o.sigma[k];
            r.weight[k] += o.weight[k];
        }
        r.err += o.err;
        r
    }
}

/// Evaluates the pair expansion of `m2` for the prefixes of length
/// `i(|ξ|^α)` that avoid the exceptional sets at `ξ`.
pub fn m2_empirical(lm: &LambdaMeasure, xi: f64, alpha: &BigRational) -> Result<M2Report> {
    let (i, n) = lm.scale_index(xi, alpha)?;
    let split = lm.split_at_stage(i, n)?;
    let bound = lm.leaf_count_bound(i as usize);
    if bound > DEFAULT_CYLINDER_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            requested: bound,
            budget: DEFAULT_CYLINDER_BUDGET as f64,
        });
    }
    let mut family = Vec::new();
    lm.for_each_prefix(i as usize, |_, st| {
        if !split.is_exceptional(st.label) {
            let c = &st.word.conv;
            family.push(Prefix {
                p: c.p.to_f64().unwrap_or(f64::INFINITY),
                p_prev: c.p_prev.to_f64().unwrap_or(f64::INFINITY),
                qf: c.q.to_f64().unwrap_or(f64::INFINITY),
                qf_prev: c.q_prev.to_f64().unwrap_or(f64::INFINITY),
                q: c.q.clone(),
                q_prev: c.q_prev.clone(),
                mass: lm.mass_f64(st.typical),
            });
        }
        Ok(())
    })?;
    if family.len() > PREFIX_BUDGET {
        return Err(Error::BudgetExceeded {
            requested: family.len() as f64,
            budget: PREFIX_BUDGET as f64,
        });
    }
    let lo = 1.0;
    let hi = lm.nu().N() as f64 + 1.0;
    let len = hi - lo;
    let xa = xi.abs();
    let pair_integral = |x: &Prefix, y: &Prefix| {
        integrate(|t| e(xa * (x.phi(t) - y.phi(t))), lo, hi, 1e-10, 2000)
    };
    let parts: Vec<Part> = (0..family.len())
        .into_par_iter()
        .map(|a| {
            let x = &family[a];
            let mut part = Part::default();
            part.sigma[2] += x.mass * x.mass * len;
            part.weight[2] += x.mass * x.mass;
            for y in &family[a + 1..] {
                let class = if x.q != y.q {
                    1
                } else if x.q_prev != y.q_prev {
                    0
                } else {
                    2
                };
                let w = 2.0 * x.mass * y.mass;
                let q = pair_integral(x, y);
                part.sigma[class] += w * q.value.re;
                part.weight[class] += w;
                part.err += w * q.err;
            }
            part
        })
        .collect();
    let total = parts.into_iter().fold(Part::default(), |a, b| a + b);
    let f = |t: f64| {
        family
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, x| acc + e(xa * x.phi(t)) * x.mass)
    };
    let direct = integrate_real(|t| f(t).norm_sqr(), lo, hi, 1e-10, 4000);
    let sum_sq_mass = family.iter().map(|x| x.mass * x.mass).sum();
    Ok(M2Report {
        xi,
        i_value: i,
        n_index: n,
        prefixes: family.len(),
        m2: total.sigma.iter().sum(),
        m2_direct: direct.value.re,
        quad_err: total.err + direct.err,
        sigma1: total.sigma[0],
        sigma2: total.sigma[1],
        sigma3: total.sigma[2],
        s1_weight: total.weight[0],
        s2_weight: total.weight[1],
        s3_weight: total.weight[2],
        sum_sq_mass,
        interval_len: len,
    })
}
