use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use maxcorr::closed_forms::{
    bdk_mc, bernoulli_2x2_mc, dksy_mc, gaussian_mc, independent_rj, marshall_olkin_mc, mb_bound, min_window_bound,
    nested_subsets_mc, uniform_nested_tag_mc,
};
use maxcorr::estimators::{binned_empirical_mc, read_pairs_csv, sample, SamplerName};
use maxcorr::io::{joint_from_json, levy_triple_from_json, scheme_from_json, spectral_measure_from_json};
use maxcorr::stable_levy::bdk_tau;
use maxcorr::subsets::{brute_force_subvector_joint, subsample_mc, subset_pair_mc};
use maxcorr::verify::{run_suite, Suite};
use maxcorr::{
    levy_mc, max_corr, opnu_stable, Bernoulli2x2Params, CorrelationReport, LadderFamily, McError, SampleBatch,
    SubsetPairScheme,
};

use crate::{CliError, Output};

/// Agreement required between a formula and its brute-force oracle.
const ORACLE_TOL: f64 = 1e-9;

pub struct Context {
    pub output: Output,
    pub cap: usize,
    /// Print a one-line summary on stderr.
    pub summary: bool,
}

type CliResult = Result<(), CliError>;

/// Writes to stdout; a closed pipe ends output quietly.
fn put(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(ctx: &Context, report: &CorrelationReport) -> CliResult {
    match ctx.output {
        Output::Json => put(&format!(
            "{}\n",
            serde_json::to_string_pretty(report).expect("reports serialize")
        )),
        Output::Table => {
            let mut t = String::new();
            let _ = writeln!(t, "{:<10} {}", "value", report.value);
            let _ = writeln!(t, "{:<10} {}", "method", report.method);
            let _ = writeln!(t, "{:<10} {:e}", "tolerance", report.tolerance);
            if !report.spectrum.is_empty() {
                let s: Vec<String> = report.spectrum.iter().map(|v| format!("{v:.12}")).collect();
                let _ = writeln!(t, "{:<10} {}", "spectrum", s.join(" "));
            }
            for (k, v) in &report.notes {
                let _ = writeln!(t, "{k:<10} {v}");
            }
            put(&t);
        }
    }
    if ctx.summary {
        eprintln!(
            "R = {:.9} ({}, tol {:.1e})",
            report.value, report.method, report.tolerance
        );
    }
    Ok(())
}

pub fn discrete(ctx: &Context, input: &Path) -> CliResult {
    let joint = joint_from_json(&read(input)?)?;
    emit(ctx, &max_corr(&joint)?)
}

pub fn verify(ctx: &Context, suite: Suite) -> CliResult {
    let result = run_suite(suite);
    match ctx.output {
        Output::Json => {
            eprint!("{}", result.table());
            put(&format!(
                "{}\n",
                serde_json::to_string_pretty(&result).expect("results serialize")
            ));
        }
        Output::Table => put(&result.table()),
    }
    if result.all_passed() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} cases failed",
            result.failed,
            result.cases.len()
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormulaName {
    Gaussian,
    Bernoulli2x2,
    Dksy,
    MinWindow,
    MbBound,
    NestedSubsets,
    NestedTag,
    Bdk,
    MarshallOlkin,
    IndependentRj,
}

#[derive(Args, Debug)]
pub struct FormulaArgs {
    name: FormulaName,
    /// Positional parameters, in the order the named flags are listed.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long)]
    l: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    c_minus: Option<f64>,
    #[arg(long)]
    c_plus: Option<f64>,
    #[arg(long)]
    l1: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    l3: Option<f64>,
    #[arg(long)]
    ps: Option<f64>,
    #[arg(long)]
    pt: Option<f64>,
}

impl FormulaArgs {
    fn real(&self, flag: Option<f64>, name: &str, idx: usize) -> Result<f64, CliError> {
        flag.or_else(|| self.params.get(idx).copied())
            .ok_or_else(|| CliError::Usage(format!("{:?} needs --{name}", self.name)))
    }

    fn int(&self, flag: Option<u64>, name: &str, idx: usize) -> Result<u64, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        let v = self.real(None, name, idx)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(CliError::Usage(format!(
                "--{name} must be a nonnegative integer, got {v}"
            )));
        }
        Ok(v as u64)
    }
}

pub fn formula(ctx: &Context, args: &FormulaArgs) -> CliResult {
    use FormulaName::*;
    let value = match args.name {
        Gaussian => gaussian_mc(args.real(args.rho, "rho", 0)?)?,
        Bernoulli2x2 => {
            if args.params.len() != 4 {
                return Err(CliError::Usage(
                    "bernoulli2x2 takes --params p_ac,p_ad,p_bc,p_bd".into(),
                ));
            }
            let p = &args.params;
            bernoulli_2x2_mc(&Bernoulli2x2Params::new(p[0], p[1], p[2], p[3])?)
        }
        Dksy | MinWindow => {
            let (l, m, n) = (
                args.int(args.l, "l", 0)?,
                args.int(args.m, "m", 1)?,
                args.int(args.n, "n", 2)?,
            );
            if args.name == Dksy {
                dksy_mc(l, m, n)?
            } else {
                min_window_bound(l, m, n)?
            }
        }
        MbBound => {
            if args.params.is_empty() {
                return Err(CliError::Usage(
                    "mb-bound takes --params with P(j in T) per index".into(),
                ));
            }
            mb_bound(&args.params)?
        }
        NestedSubsets => nested_subsets_mc(
            args.int(args.n, "n", 0)?,
            args.int(args.m, "m", 1)?,
            args.int(args.k, "k", 2)?,
        )?,
        NestedTag => uniform_nested_tag_mc(args.int(args.a, "a", 0)?, args.int(args.b, "b", 1)?)?,
        Bdk => bdk_mc(
            args.real(args.alpha, "alpha", 0)?,
            args.real(args.lambda, "lambda", 1)?,
            args.real(args.c_minus, "c-minus", 2)?,
            args.real(args.c_plus, "c-plus", 3)?,
        )?,
        MarshallOlkin => marshall_olkin_mc(
            args.real(args.l1, "l1", 0)?,
            args.real(args.l2, "l2", 1)?,
            args.real(args.l3, "l3", 2)?,
        )?,
        IndependentRj => independent_rj(args.real(args.ps, "ps", 0)?, args.real(args.pt, "pt", 1)?)?,
    };
    let name = args.name.to_possible_value().expect("no skipped variants");
    emit(
        ctx,
        &CorrelationReport::closed_form(value).with_note("formula", name.get_name()),
    )
}

/// Parses `bdk(lambda,c_minus,c_plus)`.
fn parse_bdk(spec: &str) -> Option<Result<[f64; 3], CliError>> {
    let inner = spec.trim().strip_prefix("bdk(")?.strip_suffix(')')?;
    let parts: Result<Vec<f64>, _> = inner.split(',').map(|s| s.trim().parse::<f64>()).collect();
    Some(match parts {
        Ok(p) if p.len() == 3 => Ok([p[0], p[1], p[2]]),
        _ => Err(CliError::Usage(format!(
            "expected bdk(lambda,c_minus,c_plus), got {spec}"
        ))),
    })
}

pub fn stable(ctx: &Context, alpha: f64, tau: &str) -> CliResult {
    let (measure, source) = match parse_bdk(tau) {
        Some(params) => {
            let [lambda, cm, cp] = params?;
            (bdk_tau(alpha, lambda, cm, cp)?, tau.to_string())
        }
        None => (spectral_measure_from_json(&read(Path::new(tau))?)?, "file".to_string()),
    };
    emit(ctx, &opnu_stable(&measure, alpha)?.with_note("tau", source))
}

pub fn levy(ctx: &Context, triple: &Path) -> CliResult {
    let triple = levy_triple_from_json(&read(triple)?)?;
    emit(ctx, &levy_mc(&triple)?)
}

#[derive(Args, Debug)]
pub struct SubsetsArgs {
    /// Scheme JSON file.
    #[arg(long, conflicts_with = "nested", required_unless_present = "nested")]
    scheme: Option<PathBuf>,
    /// Uniform nested scheme n,m,k.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    nested: Option<Vec<u32>>,
    /// Cross-check against an explicitly built joint.
    #[arg(long)]
    brute_force: bool,
    /// Bernoulli parameter of the coordinates in the brute-force vector.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
}

fn check_gap(report: CorrelationReport, other: f64, label: &str) -> Result<CorrelationReport, CliError> {
    let gap = (report.value - other).abs();
    if gap > ORACLE_TOL {
        return Err(CliError::Verification(format!(
            "{label} gave {other}, formula {} (gap {gap:e})",
            report.value
        )));
    }
    Ok(report.with_note(label, other).with_note("oracle_gap", gap))
}

pub fn subsets(ctx: &Context, args: &SubsetsArgs) -> CliResult {
    let report = if let Some(nested) = &args.nested {
        let [n, m, k] = nested[..] else {
            return Err(CliError::Usage("--nested takes n,m,k".into()));
        };
        let closed = nested_subsets_mc(n.into(), m.into(), k.into())?;
        let report = CorrelationReport::closed_form(closed).with_note("scheme", format!("uniform-nested({n},{m},{k})"));
        if args.brute_force {
            let scheme = SubsetPairScheme::uniform_nested(n, m, k)?;
            check_gap(report, subset_pair_mc(&scheme)?.value, "brute_force")?
        } else {
            report
        }
    } else {
        let path = args.scheme.as_ref().expect("clap enforces one source");
        let scheme = scheme_from_json(&read(path)?)?;
        let mut report = subset_pair_mc(&scheme)?;
        if let Ok(sub) = subsample_mc(&scheme) {
            report = report.with_note("subsample", sub.value);
            if let Some(rj) = sub.notes.get("r_j") {
                report = report.with_note("r_j", rj.clone());
            }
            if args.brute_force {
                let laws = vec![vec![1.0 - args.p, args.p]; scheme.n() as usize];
                let joint = brute_force_subvector_joint(&scheme, &laws, ctx.cap)?;
                let brute = max_corr(&joint)?.value;
                let gap = (sub.value - brute).abs();
                if gap > ORACLE_TOL {
                    return Err(CliError::Verification(format!(
                        "subsampled vector gave {brute}, formula {} (gap {gap:e})",
                        sub.value
                    )));
                }
                report = report.with_note("brute_force", brute).with_note("oracle_gap", gap);
            }
        } else if args.brute_force {
            return Err(CliError::Mc(McError::OutOfRange(
                "brute force needs a scheme with a defined subsampled-vector value".into(),
            )));
        }
        report
    };
    emit(ctx, &report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    #[value(name = "bivariate_gaussian", alias = "bivariate-gaussian")]
    BivariateGaussian,
    #[value(name = "marshall_olkin", alias = "marshall-olkin")]
    MarshallOlkin,
    #[value(name = "stable_cms", alias = "stable-cms")]
    StableCms,
}

impl From<SamplerArg> for SamplerName {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::BivariateGaussian => SamplerName::BivariateGaussian,
            SamplerArg::MarshallOlkin => SamplerName::MarshallOlkin,
            SamplerArg::StableCms => SamplerName::StableCms,
        }
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    sampler: Option<SamplerArg>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    count: usize,
    #[arg(long, env = "MC_SEED", default_value_t = 0)]
    seed: u64,
    /// Quantile bins per axis.
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Bins on the Y axis when different from --bins.
    #[arg(long)]
    bins_y: Option<usize>,
    /// CSV file of x,y pairs.
    #[arg(long)]
    input: Option<PathBuf>,
}

pub fn estimate(ctx: &Context, args: &EstimateArgs) -> CliResult {
    let batch = match (&args.input, args.sampler) {
        (Some(path), _) => {
            let file = fs::File::open(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            SampleBatch::from_pairs(read_pairs_csv(file)?, &format!("csv({})", path.display()))
        }
        (None, Some(name)) => {
            let sampler = SamplerName::from(name).with_params(&args.params)?;
            sample(&sampler, args.count, args.seed)?
        }
        (None, None) => return Err(CliError::Usage("give --sampler or --input".into())),
    };
    let report = binned_empirical_mc(&batch, args.bins, args.bins_y.unwrap_or(args.bins))?
        .with_note("generator", batch.generator.clone())
        .with_note("count", batch.len());
    emit(ctx, &report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Skellam,
    #[value(alias = "brownian_poisson")]
    BrownianPoisson,
    #[value(alias = "gaussian_grid")]
    GaussianGrid,
}

#[derive(Args, Debug)]
pub struct LadderArgs {
    #[arg(long)]
    family: FamilyArg,
    /// Poisson rate for skellam and brownian-poisson.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Correlation for gaussian-grid.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    levels: Vec<u32>,
}

pub fn ladder(ctx: &Context, args: &LadderArgs) -> CliResult {
    let family = match args.family {
        FamilyArg::Skellam => LadderFamily::Skellam { rate: args.rate },
        FamilyArg::BrownianPoisson => LadderFamily::BrownianPoisson { rate: args.rate },
        FamilyArg::GaussianGrid => LadderFamily::GaussianGrid { rho: args.rho },
    };
    let ladder = family.ladder(&args.levels)?;
    let steps: Vec<serde_json::Value> = ladder
        .levels
        .iter()
        .zip(&ladder.reports)
        .zip(&ladder.tail_mass)
        .map(|((level, r), tail)| serde_json::json!({ "level": level, "value": r.value, "tail_mass": tail }))
        .collect();
    let mut report = ladder.last().expect("levels are required").clone();
    report.spectrum.clear();
    emit(ctx, &report.with_note("ladder", steps))
}
