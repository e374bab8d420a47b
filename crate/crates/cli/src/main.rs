mod out;
mod pert;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cubic_melnikov::abelian::{decompose_melnikov, derivative_iij, generator_vector, melnikov_eval, reduce_monomial};
use cubic_melnikov::analyzer::{scan_all, stretched_grid, region_ceiling};
use cubic_melnikov::charts::{alpha_transforms, family_params, Center, Chart};
use cubic_melnikov::family::{annuli, caption_memberships, classify_region_tol, critical_points, g1_zeros, HamiltonianParams, PeriodAnnulus};
use cubic_melnikov::homoclinic::{design_homoclinic_three, distribution_attempt, loop_constants, mu_zero_c3, saddle_constant, DistributionTuple, DEFAULT_DESIGN_SCALE, DISTRIBUTIONS, LADDERS, PRINTED_A};
use cubic_melnikov::hopf::{design_hopf_three, hopf_coefficients, HopfDelta};
use cubic_melnikov::picard_fuchs::{pf_residual, riccati_residual, PfWhich, RiccatiWhich};
use cubic_melnikov::tracer::{trace_in, TraceOptions};
use cubic_melnikov::Error as CoreError;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

const TOL_ENV: &str = "CUBIC_MELNIKOV_TOL";
const DEFAULT_TOL: f64 = 1e-5;

#[derive(Parser, Debug)]
#[command(name = "cubic-melnikov", version, about = "Abelian integrals and limit-cycle counts for H = x^2 - y^2 + a x^4 + b x^2 y^2 + c y^4")]
#[command(after_help = "All JSON output carries \"schema\": 1 and \"command\"; floats are rounded to 12 significant digits.\nExit codes: 0 ok, 1 invalid input or domain error, 2 numerical failure or failed verification.\nDiagnostics go to stderr as {\"schema\":1,\"error\":{\"kind\",\"message\"}}.")]
struct Cli {
    /// JSON file with defaults: {grid, tol, h_max, q, format, n_min}; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(short = 'a', allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(short = 'b', allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(short = 'c', allow_hyphen_values = true)]
    c: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Region of the parameter plane.
    #[command(after_help = "Output: {params:{a,b,c}, region, a_zero, label, caption_memberships:[..], conflicts:bool}")]
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        /// Snap quantities within this distance of zero onto boundary lines.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Critical points and their levels.
    #[command(after_help = "Output: {params, points:[{x,y,h,kind}], ...}")]
    Critical {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Period annuli with level ranges, seed rays and symmetry flags.
    #[command(after_help = "Output: {params, region, annuli:[{id,name,kind,h_lo,h_hi,seed_point,ray,symmetry,center}]}")]
    Annuli {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Closed orbit at one level, as a polyline.
    #[command(after_help = "Output (json): {params, annulus, h, closure_gap, max_level_error, area, flow_ccw, points:[[x,y]]}\nOutput (csv): '# h=.. annulus=..' then header x,y")]
    Trace {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        annulus: usize,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// The nine generators I_ij and one derivative on an orbit.
    #[command(after_help = "Output: {params, annulus, h, generators:{I01,..}, est_error:{..}, derivative:{i,j,value,fd_value,agree}?}")]
    Abelian {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        annulus: usize,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        /// Also report d/dh I_ij for this monomial, as "i,j".
        #[arg(long)]
        derivative: Option<String>,
    },
    /// Reduction of I_ij to the generator basis.
    #[command(after_help = "Output: {params, target:[i,j], basis:[names], coeffs:[[c0,c1,..] per generator, ascending powers of h], degrees}")]
    Reduce {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short = 'i')]
        i: u32,
        #[arg(short = 'j')]
        j: u32,
    },
    /// Residuals of V = (A h + B) V' on every annulus.
    #[command(after_help = "Output: {params, tol, grid, checks:[{annulus,name,system,levels,excluded,max_residual,pass}], pass}\nExit 2 when any residual exceeds tol.")]
    PfVerify {
        #[command(flatten)]
        params: ParamArgs,
        /// Systems to check (V1..V6); default: every applicable one.
        #[arg(long, value_delimiter = ',')]
        system: Vec<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Relative residuals of the Riccati equations.
    #[command(after_help = "Output: {params, tol, grid, checks:[{annulus,name,which,levels,excluded,max_relative,max_residual,pass}|{annulus,name,which,skipped}], pass}\nExit 2 when any residual exceeds tol.")]
    RiccatiVerify {
        #[command(flatten)]
        params: ParamArgs,
        /// omega1, omega2, omega3, omegabar1, omegabar2; default: all applicable.
        #[arg(long, value_delimiter = ',')]
        which: Vec<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// I(h) = ∮ g dx - f dy at one level or sampled over an annulus.
    #[command(after_help = "Output (json): {params, annulus, values:[{h,value}], decomposition?}\nOutput (csv): header h,I")]
    Melnikov {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        pert: PathBuf,
        #[arg(long)]
        annulus: usize,
        #[arg(long, allow_hyphen_values = true)]
        h: Option<f64>,
        /// Sample this many levels across the annulus instead.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        h_max: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Zeros of I(h) on every annulus, with the region's ceiling.
    #[command(after_help = "Output: {params, region, n, ceiling, total, zeros:[{annulus,h,width,slope}], annuli:[ZeroReport]}")]
    Zeros {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        pert: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        h_max: Option<f64>,
    },
    /// Hopf coefficients at the centers of the (-1,-2,1) family, or a three-zero design.
    #[command(after_help = "Output: {center, delta:{alpha}, coefficients, numeric, max_discrepancy, flagged}\nWith --design: {center, alpha3, delta, coefficients, target_u, window, zeros, scan, attempts}")]
    Hopf {
        /// alpha0,alpha1,alpha2,alpha3
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        delta: Vec<f64>,
        #[arg(long, default_value = "first")]
        center: Center,
        #[arg(long)]
        design: bool,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha3: f64,
    },
    /// A0..A6 at the double homoclinic loop of the (-1,-2,1) family.
    #[command(after_help = "Output: {constants:{A0..A6}, printed:{A0..A6}, relative_difference:{..}, pieces, q, mu_zero_c3:{computed,printed}, method}")]
    HomoclinicConstants,
    /// Three zeros of I1 inside the right loop.
    #[command(after_help = "Output: {constants, design:{alpha, alpha_bar, mu, q, c3}, verification:{window, target_h, zeros, count, outer_count, attempts}}")]
    HomoclinicDesign {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha_bar3: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<f64>,
    },
    /// Realize a distribution (N_M1,N_M2,N_I1,N_I2,N_I3) of small zeros.
    #[command(after_help = "Output: {target, realized, success, alpha, alpha_bar, mu, b1, d1, q, constraints, scale, ladder, attempts, counts:[{boundary,target,count,window,zeros}]}\nWith --all: {rows:[{target,realized,success,attempts,scale}], realized, total}; csv: target,realized,success,attempts,scale\nExit 2 when a target is not realized.")]
    Distributions {
        /// e.g. "(0,0,2,2,1)"
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha3: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<f64>,
        #[arg(long)]
        max_attempts: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

/// Defaults shared by all subcommands, from `--config` and the environment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default)]
    grid: Option<usize>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    h_max: Option<f64>,
    #[serde(default)]
    q: Option<f64>,
    #[serde(default)]
    format: Option<Format>,
    #[serde(default)]
    n_min: Option<usize>,
}

impl RunConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).map_err(|e| Usage(format!("config {}: {e}", p.display())))?
            }
            None => RunConfig { grid: None, tol: None, h_max: None, q: None, format: None, n_min: None },
        };
        if cfg.tol.is_none() {
            if let Ok(v) = std::env::var(TOL_ENV) {
                cfg.tol = Some(v.trim().parse().map_err(|_| Usage(format!("{TOL_ENV}='{v}' is not a number")))?);
            }
        }
        if let Some(t) = cfg.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Usage(format!("tolerance must be positive, got {t}")).into());
            }
        }
        if cfg.grid == Some(0) || cfg.n_min == Some(0) {
            return Err(Usage("grid sizes must be positive".into()).into());
        }
        Ok(cfg)
    }

    fn tol(&self, flag: Option<f64>) -> Result<f64> {
        let t = flag.or(self.tol).unwrap_or(DEFAULT_TOL);
        if !(t > 0.0 && t.is_finite()) {
            return Err(Usage(format!("tolerance must be positive, got {t}")).into());
        }
        Ok(t)
    }
}

/// Invalid command-line input; exit code 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Output was produced but a check failed; exit code 2.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn params(p: &ParamArgs) -> Result<HamiltonianParams> {
    match (p.a, p.b, p.c) {
        (Some(a), Some(b), Some(c)) => Ok(HamiltonianParams::new(a, b, c)?),
        _ => Err(Usage("parameters -a, -b and -c are required".into()).into()),
    }
}

/// Parameters for a perturbation file; the quadratic charts fix `(-1, -2, 1)`.
fn params_for(p: &ParamArgs, file: &pert::PertFile) -> Result<HamiltonianParams> {
    if file.chart.is_none() {
        return params(p);
    }
    let fam = family_params();
    match (p.a, p.b, p.c) {
        (None, None, None) => Ok(fam),
        (Some(a), Some(b), Some(c)) if (a, b, c) == (fam.a, fam.b, fam.c) => Ok(fam),
        _ => Err(CoreError::Domain("chart keys (alpha*, baralpha*, q*) describe the (-1, -2, 1) family only".into()).into()),
    }
}

fn find_annulus(p: &HamiltonianParams, id: usize) -> Result<PeriodAnnulus> {
    let all = annuli(p)?;
    let ids: Vec<usize> = all.iter().map(|a| a.id).collect();
    all.into_iter()
        .find(|a| a.id == id)
        .ok_or_else(|| CoreError::Domain(format!("no annulus {id}; available: {ids:?}")).into())
}

fn levels(an: &PeriodAnnulus, n: usize, h_max: Option<f64>) -> Result<Vec<f64>> {
    let (lo, hi) = cubic_melnikov::analyzer::scan_range(an, h_max)?;
    Ok(stretched_grid(lo, hi, n))
}

fn write_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut o = std::io::stdout().lock();
    match o.write_all(text.as_bytes()).and_then(|_| o.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit<T: Serialize>(command: &str, body: &T) -> Result<()> {
    write_stdout(&format!("{}\n", out::document(command, body)?))
}

/// Interior levels `lo + t (hi - lo)`, `t = k/(n+1)`, skipping a relative
/// margin of 1e-3 around gating zeros inside the annulus.
fn verify_levels(p: &HamiltonianParams, an: &PeriodAnnulus, n: usize, h_max: Option<f64>) -> Result<(Vec<f64>, usize)> {
    let (lo, hi) = an.capped_range(h_max.unwrap_or(3.0));
    let splits: Vec<f64> = if p.a != 0.0 {
        g1_zeros(p)?.iter().filter_map(|z| z.value).filter(|&v| lo < v && v < hi).collect()
    } else {
        Vec::new()
    };
    let margin = 1e-3 * (hi - lo);
    let all: Vec<f64> = (1..=n).map(|k| lo + (k as f64) / (n as f64 + 1.0) * (hi - lo)).collect();
    let kept: Vec<f64> = all.iter().copied().filter(|h| splits.iter().all(|s| (h - s).abs() > margin)).collect();
    let excluded = all.len() - kept.len();
    Ok((kept, excluded))
}

const GENERATORS: [&str; 9] = ["I01", "I03", "I21", "I23", "I12", "I11", "I13", "I02", "I22"];

fn named(values: &[f64; 9]) -> serde_json::Map<String, serde_json::Value> {
    GENERATORS.iter().zip(values).map(|(k, v)| (k.to_string(), json!(v))).collect()
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_ref())?;
    match cli.command {
        Command::Classify { params: pa, tol } => {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Usage(format!("--tol must be non-negative, got {tol}")).into());
            }
            let p = params(&pa)?;
            let label = classify_region_tol(&p, tol)?;
            let captions: Vec<String> = caption_memberships(&p).iter().map(|r| r.to_string()).collect();
            emit("classify", &json!({
                "params": p,
                "region": label.region.to_string(),
                "a_zero": label.a_zero,
                "label": label.to_string(),
                "conflicts": captions.len() != 1,
                "caption_memberships": captions,
            }))
        }
        Command::Critical { params: pa } => {
            let p = params(&pa)?;
            emit("critical", &json!({ "params": p, "critical": critical_points(&p)? }))
        }
        Command::Annuli { params: pa } => {
            let p = params(&pa)?;
            let label = cubic_melnikov::family::classify_region(&p)?;
            emit("annuli", &json!({ "params": p, "region": label.to_string(), "annuli": annuli(&p)? }))
        }
        Command::Trace { params: pa, annulus, h, n_min, format } => {
            let p = params(&pa)?;
            let an = find_annulus(&p, annulus)?;
            let opts = TraceOptions { n_min: n_min.or(cfg.n_min).unwrap_or(TraceOptions::default().n_min), ..Default::default() };
            let orbit = trace_in(&p, &an, h, &opts)?;
            if format.or(cfg.format) == Some(Format::Csv) {
                return write_stdout(&orbit.to_csv());
            }
            emit("trace", &json!({
                "params": p,
                "annulus": an.id,
                "h": h,
                "closure_gap": orbit.closure_gap,
                "max_level_error": orbit.max_level_error(&p),
                "area": orbit.area(),
                "flow_ccw": orbit.flow_ccw,
                "points": orbit.points,
            }))
        }
        Command::Abelian { params: pa, annulus, h, derivative } => {
            let p = params(&pa)?;
            let an = find_annulus(&p, annulus)?;
            let v = generator_vector(&p, &an, h)?;
            let mut body = json!({
                "params": p,
                "annulus": an.id,
                "h": h,
                "generators": named(&v.values),
                "est_error": named(&v.est_error),
            });
            if let Some(d) = derivative {
                let (i, j) = d
                    .split_once(',')
                    .and_then(|(i, j)| Some((i.trim().parse::<u32>().ok()?, j.trim().parse::<u32>().ok()?)))
                    .ok_or_else(|| Usage(format!("--derivative expects 'i,j', got '{d}'")))?;
                body["derivative"] = serde_json::to_value(derivative_iij(&p, &an, h, i, j)?)?;
            }
            emit("abelian", &body)
        }
        Command::Reduce { params: pa, i, j } => {
            let p = params(&pa)?;
            let r = reduce_monomial(&p, i, j)?;
            emit("reduce", &json!({ "params": p, "basis": GENERATORS, "reduction": r }))
        }
        Command::PfVerify { params: pa, system, grid, tol } => {
            let p = params(&pa)?;
            let tol = cfg.tol(tol)?;
            let n = grid.or(cfg.grid).unwrap_or(11);
            let systems: Vec<PfWhich> = if system.is_empty() {
                PfWhich::ALL.iter().copied().filter(|w| w.a_zero() == (p.a == 0.0)).collect()
            } else {
                system.iter().map(|s| PfWhich::parse(s)).collect::<std::result::Result<_, _>>()?
            };
            let mut checks = Vec::new();
            let mut pass = true;
            for an in annuli(&p)? {
                let (hs, excluded) = verify_levels(&p, &an, n, cfg.h_max)?;
                for w in &systems {
                    let mut worst = 0.0f64;
                    for &h in &hs {
                        worst = worst.max(pf_residual(&p, *w, &an, h)?);
                    }
                    pass &= worst < tol;
                    checks.push(json!({ "annulus": an.id, "name": an.name, "system": w, "levels": hs.len(), "excluded": excluded, "max_residual": worst, "pass": worst < tol }));
                }
            }
            emit("pf-verify", &json!({ "params": p, "tol": tol, "grid": n, "checks": checks, "pass": pass }))?;
            if !pass {
                return Err(Failed("Picard-Fuchs residual above tolerance".into()).into());
            }
            Ok(())
        }
        Command::RiccatiVerify { params: pa, which, grid, tol } => {
            let p = params(&pa)?;
            let tol = cfg.tol(tol)?;
            let n = grid.or(cfg.grid).unwrap_or(11);
            let all = [RiccatiWhich::Omega1, RiccatiWhich::Omega2, RiccatiWhich::Omega3, RiccatiWhich::OmegaBar1, RiccatiWhich::OmegaBar2];
            let selected: Vec<RiccatiWhich> = if which.is_empty() {
                all.iter().copied().filter(|w| w.a_zero() == (p.a == 0.0)).collect()
            } else {
                which.iter().map(|s| RiccatiWhich::parse(s)).collect::<std::result::Result<_, _>>()?
            };
            let mut checks = Vec::new();
            let mut pass = true;
            for an in annuli(&p)? {
                let (hs, excluded) = verify_levels(&p, &an, n, cfg.h_max)?;
                for w in &selected {
                    let mut worst = 0.0f64;
                    let mut worst_abs = 0.0f64;
                    let mut skipped = None;
                    for &h in &hs {
                        match riccati_residual(&p, *w, &an, h) {
                            Ok(c) => {
                                worst = worst.max(c.relative);
                                worst_abs = worst_abs.max(c.residual);
                            }
                            Err(CoreError::Domain(m)) => {
                                skipped = Some(m);
                                break;
                            }
                            Err(e) => return Err(e.into()),
                        }
                    }
                    match skipped {
                        Some(m) => checks.push(json!({ "annulus": an.id, "name": an.name, "which": w, "skipped": m })),
                        None => {
                            pass &= worst < tol;
                            checks.push(json!({ "annulus": an.id, "name": an.name, "which": w, "levels": hs.len(), "excluded": excluded, "max_relative": worst, "max_residual": worst_abs, "pass": worst < tol }));
                        }
                    }
                }
            }
            emit("riccati-verify", &json!({ "params": p, "tol": tol, "grid": n, "checks": checks, "pass": pass }))?;
            if !pass {
                return Err(Failed("Riccati residual above tolerance".into()).into());
            }
            Ok(())
        }
        Command::Melnikov { params: pa, pert, annulus, h, grid, h_max, format } => {
            let file = pert::read(&pert)?;
            let p = params_for(&pa, &file)?;
            let an = find_annulus(&p, annulus)?;
            let hs = match (h, grid.or(cfg.grid)) {
                (Some(h), _) => vec![h],
                (None, Some(n)) => levels(&an, n, h_max.or(cfg.h_max))?,
                (None, None) => return Err(Usage("give --h or --grid".into()).into()),
            };
            let mut values = Vec::with_capacity(hs.len());
            for &h in &hs {
                values.push((h, melnikov_eval(&p, &file.pert, &an, h)?));
            }
            if format.or(cfg.format) == Some(Format::Csv) {
                let mut text = String::from("h,I\n");
                for (h, v) in &values {
                    text += &format!("{},{}\n", out::csv_number(*h), out::csv_number(*v));
                }
                return write_stdout(&text);
            }
            let values: Vec<_> = values.iter().map(|(h, v)| json!({ "h": h, "value": v })).collect();
            let chart = file.chart.map(|(c, v)| json!({ "chart": c.to_string(), "coefficients": v, "alpha": alpha_transforms(v, c, Chart::Alpha) }));
            emit("melnikov", &json!({
                "params": p,
                "annulus": an.id,
                "degree": file.pert.n,
                "chart": chart,
                "values": values,
                "decomposition": decompose_melnikov(&p, &file.pert)?,
            }))
        }
        Command::Zeros { params: pa, pert, grid, h_max } => {
            let file = pert::read(&pert)?;
            let p = params_for(&pa, &file)?;
            let n = grid.or(cfg.grid).unwrap_or(400);
            let reports = scan_all(&p, &file.pert, n, h_max.or(cfg.h_max))?;
            let label = cubic_melnikov::family::classify_region(&p)?;
            let ceiling = region_ceiling(&label, file.pert.n.max(1)).ok();
            let zeros: Vec<_> = reports
                .iter()
                .flat_map(|r| r.zeros.iter().map(move |z| json!({ "annulus": r.annulus_id, "h": z.h, "width": z.width, "slope": z.slope })))
                .collect();
            let total = zeros.len();
            emit("zeros", &json!({
                "params": p,
                "region": label.to_string(),
                "n": file.pert.n,
                "ceiling": ceiling,
                "total": total,
                "zeros": zeros,
                "annuli": reports,
            }))
        }
        Command::Hopf { delta, center, design, alpha3 } => {
            if design {
                let d = design_hopf_three(center, alpha3)?;
                return emit("hopf", &d);
            }
            if delta.len() != 4 {
                return Err(Usage("--delta expects alpha0,alpha1,alpha2,alpha3 (or use --design)".into()).into());
            }
            let s = hopf_coefficients(&HopfDelta::new([delta[0], delta[1], delta[2], delta[3]]), center);
            let flagged = s.flagged;
            emit("hopf", &s)?;
            if flagged {
                return Err(Failed("closed form and quadrature disagree".into()).into());
            }
            Ok(())
        }
        Command::HomoclinicConstants => {
            let c = loop_constants()?;
            let q = cfg.q.map(Ok).unwrap_or_else(saddle_constant)?;
            let names = ["A0", "A1", "A2", "A3", "A4", "A5", "A6"];
            let obj = |v: &[f64; 7]| names.iter().zip(v).map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>();
            let mut rel = [0.0; 7];
            for k in 0..7 {
                rel[k] = (c.a[k] - PRINTED_A[k]).abs() / PRINTED_A[k].abs();
            }
            emit("homoclinic-constants", &json!({
                "constants": obj(&c.a),
                "printed": obj(&PRINTED_A),
                "relative_difference": obj(&rel),
                "pieces": { "A4": c.pieces[0], "A5": c.pieces[1], "A6": c.pieces[2] },
                "geometry": c.geometry,
                "q": q,
                "mu_zero_c3": { "computed": mu_zero_c3(&c.a)?, "printed": mu_zero_c3(&PRINTED_A)? },
                "method": c.method,
            }))
        }
        Command::HomoclinicDesign { alpha_bar3, q } => {
            let q = q.or(cfg.q);
            let d = design_homoclinic_three(alpha_bar3, q)?;
            let c = loop_constants()?;
            let zeros: Vec<f64> = d.scan.zeros.iter().map(|z| z.h).collect();
            emit("homoclinic-design", &json!({
                "constants": c.a,
                "design": {
                    "alpha": alpha_transforms(d.alpha_bar, Chart::AlphaBar, Chart::Alpha),
                    "alpha_bar": d.alpha_bar,
                    "mu": d.expansion.mu,
                    "q": d.expansion.q,
                    "c3": d.expansion.c3,
                    "expansion": d.expansion,
                },
                "verification": {
                    "window": d.window,
                    "target_h": d.target_h,
                    "zeros": zeros,
                    "count": d.scan.count(),
                    "outer_count": d.outer_count,
                    "attempts": d.attempts,
                    "warnings": d.scan.warnings,
                },
            }))
        }
        Command::Distributions { target, all, alpha3, q, max_attempts, format } => {
            let q = q.or(cfg.q);
            let attempts = max_attempts.unwrap_or(3 * LADDERS.len());
            if attempts == 0 {
                return Err(Usage("--max-attempts must be positive".into()).into());
            }
            let targets: Vec<DistributionTuple> = match (all, target) {
                (true, None) => DISTRIBUTIONS.iter().map(|t| DistributionTuple(*t)).collect(),
                (false, Some(t)) => vec![t.parse::<DistributionTuple>().map_err(Usage)?],
                _ => return Err(Usage("give exactly one of --target or --all".into()).into()),
            };
            let mut outcomes = Vec::new();
            for t in &targets {
                outcomes.push(distribution_attempt(*t, alpha3, q, DEFAULT_DESIGN_SCALE, attempts)?);
            }
            let failed: Vec<String> = outcomes.iter().filter(|o| !o.success).map(|o| format!("{} realized as {}", o.target, o.realized)).collect();
            if all {
                if format.or(cfg.format) == Some(Format::Csv) {
                    let mut text = String::from("target,realized,success,attempts,scale\n");
                    for o in &outcomes {
                        text += &format!("\"{}\",\"{}\",{},{},{}\n", o.target, o.realized, o.success, o.attempts, out::csv_number(o.scale));
                    }
                    write_stdout(&text)?;
                } else {
                    let rows: Vec<_> = outcomes
                        .iter()
                        .map(|o| json!({ "target": o.target.to_string(), "realized": o.realized.to_string(), "success": o.success, "attempts": o.attempts, "scale": o.scale }))
                        .collect();
                    let ok = outcomes.iter().filter(|o| o.success).count();
                    emit("distributions", &json!({ "alpha3": alpha3, "rows": rows, "realized": ok, "total": outcomes.len() }))?;
                }
            } else {
                let o = &outcomes[0];
                let mut v = serde_json::to_value(o)?;
                v["target"] = json!(o.target.to_string());
                v["realized"] = json!(o.realized.to_string());
                emit("distributions", &v)?;
            }
            if !failed.is_empty() {
                return Err(Failed(failed.join("; ")).into());
            }
            Ok(())
        }
    }
}

fn exit_code(e: &anyhow::Error) -> (u8, &'static str) {
    for cause in e.chain() {
        if let Some(c) = cause.downcast_ref::<CoreError>() {
            return match c {
                CoreError::Domain(_) => (1, "domain"),
                CoreError::Numerical(_) => (2, "numerical"),
            };
        }
        if cause.downcast_ref::<Failed>().is_some() {
            return (2, "verification");
        }
        if cause.downcast_ref::<Usage>().is_some() {
            return (1, "usage");
        }
    }
    (1, "input")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = exit_code(&e);
            eprintln!("{}", json!({ "schema": out::SCHEMA, "error": { "kind": kind, "message": format!("{e:#}") } }));
            ExitCode::from(code)
        }
    }
}
