use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use cfraj_core::assignment::{AssignmentRule, PsiFamily};
use cfraj_core::cf::{parse_rat, rat_to_string};
use cfraj_core::fourier::{dyadic_frequencies, ScanOptions};
use cfraj_core::kaufman::median_log_continuant;
use cfraj_core::lambda::{LambdaConfig, NuParams};
use cfraj_core::schedule::{check_gap_condition, check_superlacunary};
use cfraj_core::verify::{self, Check, SuiteReport, Suite};
use cfraj_core::{
    build_nu, decay_scan, exponent_audit, make_schedule_psi, LambdaMeasure, Method, NuMeasure,
    ProductMeasure,
};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use cfraj_cli::config::{file_digest, RunConfig, TOOL, VERSION};
use cfraj_cli::output::emit;
use crate::{
    AuditArgs, AuditCmd, Command, FourierCmd, FourierScanArgs, LambdaCmd, LambdaMassArgs,
    LambdaSampleArgs, NuBuildArgs, NuCmd, ScheduleCmd, ScheduleMakeArgs, VerifyArgs,
};

pub enum Outcome {
    Ok,
    Violation,
}

/// Arguments that parse but do not make sense together.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

pub fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Nu(NuCmd::Build(a)) => nu_build(a),
        Command::Schedule(ScheduleCmd::Make(a)) => schedule_make(a),
        Command::Lambda(LambdaCmd::Mass(a)) => lambda_mass(a),
        Command::Lambda(LambdaCmd::Sample(a)) => lambda_sample(a),
        Command::Fourier(FourierCmd::Scan(a)) => fourier_scan(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Audit(AuditCmd::Exponents(a)) => audit_exponents(a),
    }
}

/// JSON document with the provenance fields first.
fn envelope(cfg: &RunConfig, payload: Value) -> Result<String> {
    let mut doc = serde_json::Map::new();
    doc.insert("tool".into(), json!(TOOL));
    doc.insert("version".into(), json!(VERSION));
    doc.insert("config_hash".into(), json!(cfg.hash()?));
    doc.insert("config".into(), serde_json::to_value(cfg)?);
    match payload {
        Value::Object(m) => doc.extend(m),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
    s.push('\n');
    Ok(s)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

/// A block measure, bare or wrapped in a `nu build` document.
pub fn load_nu(bytes: &[u8], path: &Path) -> Result<NuMeasure> {
    let v: Value =
        serde_json::from_slice(bytes).with_context(|| format!("parsing {}", path.display()))?;
    let inner = match v {
        Value::Object(mut m) if m.contains_key("measure") => m.remove("measure").unwrap_or_default(),
        other => other,
    };
    serde_json::from_value(inner).with_context(|| format!("invalid block measure in {}", path.display()))
}

fn load_lambda(path: &Path) -> Result<(LambdaConfig, String)> {
    let bytes = read(path)?;
    let cfg: LambdaConfig = serde_json::from_slice(&bytes)
        .with_context(|| format!("invalid measure configuration in {}", path.display()))?;
    Ok((cfg, file_digest(&bytes)))
}

fn nu_build(a: &NuBuildArgs) -> Result<Outcome> {
    let sigma = match (a.sigma, a.sigma_log, a.sigma_median) {
        (Some(s), None, false) => s,
        (None, Some(x), false) => {
            if !(x > 1.0) {
                return usage(format!("--sigma-log needs a value above 1, got {x}"));
            }
            x.ln()
        }
        (None, None, true) => median_log_continuant(a.n, a.p)?,
        _ => return usage("give exactly one of --sigma, --sigma-log, --sigma-median"),
    };
    let eps = a.eps.unwrap_or_else(|| cfraj_core::profile::to_f64(&a.profile.nu_window()));
    let params = NuParams {
        n: a.n,
        p: a.p,
        sigma,
        eps_window: eps,
    };
    let mut cfg = RunConfig::new("nu build", a.profile, 0, 0);
    cfg.nu = Some(params);
    cfg.output = a.out.as_ref().map(|p| p.display().to_string());
    let nu = build_nu(a.n, a.p, sigma, eps)?;
    let feas = nu.feasibility(a.profile);
    eprintln!(
        "support size {}, beta {:.6} (target {:.4})",
        nu.len(),
        feas.beta_achieved,
        feas.beta_target
    );
    let text = envelope(&cfg, json!({ "measure": nu, "feasibility": feas }))?;
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn schedule_make(a: &ScheduleMakeArgs) -> Result<Outcome> {
    let psi = match (&a.tau, a.psi_exp) {
        (Some(t), false) => PsiFamily::power(parse_rat(t)?)?,
        (None, true) => PsiFamily::Exp,
        _ => return usage("give exactly one of --tau, --psi-exp"),
    };
    if a.r.is_empty() || a.r.contains(&0) {
        return usage("run lengths must be positive");
    }
    let ratio = parse_rat(&a.ratio)?;
    let bytes = read(&a.nu_file)?;
    let nu = load_nu(&bytes, &a.nu_file)?;
    let mut r = a.r.clone();
    let last = *r.last().unwrap_or(&1);
    r.resize(a.depth.max(r.len()), last);
    let s = make_schedule_psi(&psi, &nu, &r, a.i1, a.depth, a.profile)?;
    let sup = check_superlacunary(&s, &ratio);
    let gap = check_gap_condition(&s)?;
    let rule = AssignmentRule::Psi(psi);
    let mut cfg = RunConfig::new("schedule make", a.profile, 0, 0)
        .param("nu_sha256", file_digest(&bytes))
        .param("i1", a.i1)
        .param("depth", a.depth)
        .param("ratio", rat_to_string(&ratio))
        .param("r", join(&a.r));
    cfg.output = a.out.as_ref().map(|p| p.display().to_string());
    let lambda = LambdaConfig {
        nu: cfraj_core::lambda::NuSpec::Built(nu),
        schedule: s.lists(),
        rule,
        profile: a.profile,
        depth: None,
    };
    let text = envelope(
        &cfg,
        json!({ "schedule": s.lists(), "superlacunary": sup, "gap": gap, "lambda": lambda }),
    )?;
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct LabelMass {
    label: u64,
    mass: String,
    mass_f64: f64,
}

fn lambda_mass(a: &LambdaMassArgs) -> Result<Outcome> {
    let (lc, digest) = load_lambda(&a.config)?;
    let lm = lc.build()?;
    let labels = if a.labels.is_empty() {
        (1..=verify::max_label(&lm)).collect()
    } else {
        a.labels.clone()
    };
    let rows = labels
        .iter()
        .map(|&n| {
            let m = lm.xn_mass(n)?;
            Ok(LabelMass {
                label: n,
                mass: rat_to_string(&m),
                mass_f64: cfraj_core::profile::to_f64(&m),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cfg = RunConfig::new("lambda mass", lc.profile, 0, 0)
        .param("config_sha256", digest)
        .param("labels", join(&labels));
    cfg.lambda = Some(lc);
    cfg.output = a.out.as_ref().map(|p| p.display().to_string());
    emit(a.out.as_deref(), &envelope(&cfg, json!({ "masses": rows }))?)?;
    Ok(Outcome::Ok)
}

fn lambda_sample(a: &LambdaSampleArgs) -> Result<Outcome> {
    let (lc, digest) = load_lambda(&a.config)?;
    let lm = lc.build()?;
    let depth = a.depth.unwrap_or(lm.horizon());
    let paths = (0..a.count as u64)
        .map(|k| {
            let path = lm.sample_path(depth, a.seed.wrapping_add(k))?;
            Ok(path
                .iter()
                .map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cfg = RunConfig::new("lambda sample", lc.profile, a.seed, a.count)
        .param("config_sha256", digest)
        .param("depth", depth);
    cfg.lambda = Some(lc);
    cfg.output = a.out.as_ref().map(|p| p.display().to_string());
    emit(a.out.as_deref(), &envelope(&cfg, json!({ "paths": paths }))?)?;
    Ok(Outcome::Ok)
}

fn parse_dyadic(s: &str) -> Result<Vec<f64>> {
    let parsed = s
        .split_once(':')
        .and_then(|(lo, hi)| Some((lo.trim().parse::<i32>().ok()?, hi.trim().parse::<i32>().ok()?)));
    match parsed {
        Some((lo, hi)) if lo <= hi && hi < 1000 && lo > -1000 => Ok(dyadic_frequencies(lo, hi)),
        _ => usage(format!("--dyadic expects LO:HI with LO <= HI, got {s:?}")),
    }
}

enum Scanned {
    Lambda(LambdaMeasure),
    Product(ProductMeasure),
}

fn fourier_scan(a: &FourierScanArgs) -> Result<Outcome> {
    let mut xi = match &a.dyadic {
        Some(d) => parse_dyadic(d)?,
        None => a.xi.clone(),
    };
    if xi.iter().any(|x| !x.is_finite()) {
        return usage("frequencies must be finite");
    }
    xi.sort_by(f64::total_cmp);
    let alpha = parse_rat(&a.alpha)?;
    if a.method == Method::MonteCarlo && a.samples == 0 {
        return usage("--samples must be positive");
    }

    let (measure, mut cfg, default_depth) = if let Some(path) = &a.config {
        if a.kaufman_only {
            return usage("--kaufman-only scans a block measure file; use --nu-file");
        }
        let (lc, digest) = load_lambda(path)?;
        let lm = lc.build()?;
        let horizon = lm.horizon();
        let mut cfg = RunConfig::new("fourier scan", lc.profile, a.seed, a.samples)
            .param("config_sha256", digest);
        cfg.lambda = Some(lc);
        (Scanned::Lambda(lm), cfg, horizon)
    } else if let Some(path) = &a.nu_file {
        let bytes = read(path)?;
        let nu = load_nu(&bytes, path)?;
        let cfg = RunConfig::new("fourier scan", cfraj_core::Profile::default(), a.seed, a.samples)
            .param("nu_sha256", file_digest(&bytes));
        (Scanned::Product(ProductMeasure::new(nu)), cfg, 6)
    } else {
        return usage("give --config or --nu-file");
    };

    let opts = ScanOptions {
        method: a.method,
        depth: a.depth.unwrap_or(default_depth),
        samples: a.samples,
        seed: a.seed,
        alpha: alpha.clone(),
    };
    cfg = cfg
        .param("method", a.method.as_str())
        .param("depth", opts.depth)
        .param("alpha", rat_to_string(&alpha))
        .param("xi", join(&xi));
    cfg.output = a.out.as_ref().map(|p| p.display().to_string());

    let table = match &measure {
        Scanned::Lambda(m) => decay_scan(m, &xi, &opts)?,
        Scanned::Product(m) => decay_scan(m, &xi, &opts)?,
    };
    let csv = table.to_csv(Some(&cfg.stamp()?));
    emit(a.out.as_deref(), &csv)?;
    Ok(Outcome::Ok)
}

fn measure_report(path: &Path) -> Result<SuiteReport> {
    let bytes = read(path)?;
    let nu = load_nu(&bytes, path)?;
    let checks = verify::nu_exact_checks(&nu, &[1, 2, 3])?
        .into_iter()
        .map(|(name, passed, detail)| Check { name, passed, detail })
        .collect();
    Ok(SuiteReport {
        suite: Suite::Nu,
        checks,
        notes: vec![format!("file {} sha256 {}", path.display(), file_digest(&bytes))],
    })
}

fn verify_cmd(a: &VerifyArgs) -> Result<Outcome> {
    // a bad input file is an operational failure, so check it before the suites run
    let extra = a.measure.as_deref().map(measure_report).transpose()?;
    let mut reports = verify::run(a.suite, a.profile)?;
    reports.extend(extra);
    let passed = reports.iter().all(SuiteReport::passed);
    if a.json {
        let cfg = RunConfig::new("verify", a.profile, verify::SWEEP_SEED, 0)
            .param("suite", a.suite.as_str());
        print!("{}", envelope(&cfg, json!({ "passed": passed, "reports": reports }))?);
    } else {
        for r in &reports {
            print!("{r}");
        }
        println!("{}", if passed { "all checks passed" } else { "violations found" });
    }
    Ok(if passed { Outcome::Ok } else { Outcome::Violation })
}

fn audit_exponents(a: &AuditArgs) -> Result<Outcome> {
    let alpha: BigRational = parse_rat(&a.alpha)?;
    let audit = exponent_audit(&alpha)?;
    if a.json {
        let cfg = RunConfig::new("audit exponents", cfraj_core::Profile::default(), 0, 0)
            .param("alpha", rat_to_string(&alpha));
        print!("{}", envelope(&cfg, serde_json::to_value(&audit)?)?);
    } else {
        print!("{}", audit.to_table());
        let flagged = audit.flagged();
        if !flagged.is_empty() {
            println!("{} row(s) differ between the columns", flagged.len());
        }
    }
    Ok(Outcome::Ok)
}

