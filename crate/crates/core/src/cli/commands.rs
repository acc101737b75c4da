use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use super::output::{header_value, read_samples, OutputDir};
use super::{
    CheckArgs, CliError, DerivativeKind, DeriveArgs, Example, OperatorArgs, PerturbArgs,
    PerturbKind, ProblemArgs, SolveArgs,
};
use crate::analysis::{dependence_force, dependence_initial, dependence_order};
use crate::check::{run_checks, CheckOptions, CheckResult};
use crate::grid::{Grid, GridFunction, OperatorParams, PowerExpSpec};
use crate::interp::resample;
use crate::operators::{
    substantial_caputo_derivative, substantial_integral, substantial_rl_derivative, InitialData,
    QuadratureConfig, Scheme,
};
use crate::volterra::{
    existence_h, lipschitz_probe, solve as solve_ivp, HorizonPolicy, Hypotheses, IvpProblem,
    Method, Rhs, Solution, SolverConfig, TubeRegion,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepParam {
    Alpha,
    Rho,
    Sigma,
    Beta,
}

#[derive(Debug, Clone, PartialEq)]
struct Sweep {
    param: SweepParam,
    name: String,
    values: Vec<f64>,
}

fn parse_sweep(s: &str) -> Result<Sweep, CliError> {
    let bad = || CliError::Invalid(format!("sweep `{s}` must look like alpha=0.7:1.0:0.1"));
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let name = name.trim();
    let param = match name {
        "alpha" => SweepParam::Alpha,
        "rho" => SweepParam::Rho,
        "sigma" => SweepParam::Sigma,
        "beta" => SweepParam::Beta,
        other => {
            return Err(CliError::Invalid(format!(
                "cannot sweep `{other}` (use alpha, rho, sigma or beta)"
            )))
        }
    };
    let parts = range
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        return Err(CliError::Invalid(format!(
            "sweep `{s}` needs start <= end and a positive step"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(CliError::Invalid(format!(
            "sweep `{s}` has too many values"
        )));
    }
    let values = (0..count).map(|k| start + k as f64 * step).collect();
    Ok(Sweep {
        param,
        name: name.to_string(),
        values,
    })
}

fn with_sweep_value(args: &OperatorArgs, param: SweepParam, v: f64) -> OperatorArgs {
    let mut a = args.clone();
    match param {
        SweepParam::Alpha => a.alpha = v,
        SweepParam::Rho => a.rho = v,
        SweepParam::Sigma => a.sigma = v,
        SweepParam::Beta => a.beta = v,
    }
    a
}

type Operator =
    fn(&OperatorParams, &GridFunction, &QuadratureConfig) -> crate::Result<GridFunction>;

/// Applies `op` to the input described by `args` on its own grid.
fn apply_operator(
    args: &OperatorArgs,
    t_end: f64,
    samples: Option<&(Vec<f64>, Vec<f64>)>,
    op: Operator,
) -> Result<GridFunction, CliError> {
    let params = OperatorParams::new(args.sigma, args.rho, args.alpha, args.a)?;
    let grid = Arc::new(Grid::for_params(&params, t_end, args.n)?);
    let f = match samples {
        Some((t, v)) => resample(t, v, grid)?,
        None => PowerExpSpec::new(args.beta, params)?.sample(grid)?,
    };
    let cfg = QuadratureConfig::new(Scheme::from_str(&args.scheme)?, 2)?;
    Ok(op(&params, &f, &cfg)?)
}

fn tabulate(
    args: &OperatorArgs,
    op: Operator,
    file: &str,
    command: &str,
    manifest: &impl Serialize,
) -> Result<(), CliError> {
    let samples = args.func.as_deref().map(read_samples).transpose()?;
    let t_end = match (args.t_end, &samples) {
        (Some(t), _) => t,
        (None, Some((t, _))) => *t
            .last()
            .ok_or_else(|| CliError::Invalid("the --func file has no data rows".into()))?,
        (None, None) => 1.0,
    };
    let base = apply_operator(args, t_end, samples.as_ref(), op)?;
    let columns = match args.sweep.as_deref().map(parse_sweep).transpose()? {
        None => vec![("value".to_string(), base.values().to_vec())],
        Some(sweep) => {
            if sweep.param == SweepParam::Beta && samples.is_some() {
                return Err(CliError::Invalid(
                    "beta cannot be swept together with --func".into(),
                ));
            }
            let mut cols = Vec::with_capacity(sweep.values.len());
            for &v in &sweep.values {
                let varied = with_sweep_value(args, sweep.param, v);
                let out = apply_operator(&varied, t_end, samples.as_ref(), op)?;
                // a different rho gives a different u-grid; bring it onto the base grid
                let values = if out.grid().as_ref() == base.grid().as_ref() {
                    out.into_values()
                } else {
                    resample(out.grid().nodes(), out.values(), base.grid().clone())?.into_values()
                };
                cols.push((format!("{}_{}", sweep.name, header_value(v)), values));
            }
            cols
        }
    };
    let mut out = OutputDir::create(&args.out_dir)?;
    out.write_columns(file, base.grid().nodes(), base.grid().u(), &columns)?;
    out.finish(command, manifest)
}

pub(super) fn integrate(args: &OperatorArgs) -> Result<(), CliError> {
    tabulate(
        args,
        substantial_integral,
        "integral.csv",
        "integrate",
        args,
    )
}

pub(super) fn derive(args: &DeriveArgs) -> Result<(), CliError> {
    let op: Operator = match args.kind {
        DerivativeKind::Rl => substantial_rl_derivative,
        DerivativeKind::Caputo => substantial_caputo_derivative,
    };
    tabulate(&args.op, op, "derivative.csv", "derive", args)
}

#[derive(Debug, Clone, Serialize)]
struct ExistenceInfo {
    /// Whether K, M and L were supplied so the horizon could be checked.
    checked: bool,
    h_max: Option<f64>,
    forced: bool,
}

/// A problem assembled from flags together with the horizon and solver settings.
struct Setup {
    problem: IvpProblem,
    h: f64,
    cfg: SolverConfig,
    method: Method,
    existence: ExistenceInfo,
}

fn solver_config(a: &ProblemArgs, horizon: HorizonPolicy) -> SolverConfig {
    SolverConfig {
        n: a.n,
        picard_tol: a.picard_tol,
        picard_max_iters: a.max_iters,
        corrector_iters: a.corrector_iters,
        horizon,
        estimate_error: true,
    }
}

fn setup(a: &ProblemArgs) -> Result<Setup, CliError> {
    let params = OperatorParams::new(a.sigma, a.rho, a.alpha, 0.0)?;
    let rhs = Rhs::from_str(&a.rhs)?;
    let initial = InitialData::new(a.b0.clone())?;
    let method = Method::from_str(&a.method)?;
    let h_flag = a.h.unwrap_or(1.0);

    let (problem, h, existence) = match (a.k, a.m, a.l) {
        (Some(k), Some(m), Some(l)) => {
            let hyp = Hypotheses {
                tube_radius: k,
                h_star: a.h_star.or(a.h).unwrap_or(1.0),
                rhs_bound: m,
                lipschitz: l,
            };
            let problem = IvpProblem::new(params, rhs, initial, hyp)?;
            let h_max = a.h_tilde.map(|ht| existence_h(&problem, ht)).transpose()?;
            let h = if a.auto_h {
                h_max.ok_or_else(|| CliError::Invalid("--auto-h needs --h-tilde".into()))?
            } else {
                h_flag
            };
            let info = ExistenceInfo {
                checked: true,
                h_max,
                forced: a.force_horizon,
            };
            (problem, h, info)
        }
        (None, None, None) => {
            if a.auto_h {
                return Err(CliError::Invalid(
                    "--auto-h needs --K, --M, --L and --h-tilde".into(),
                ));
            }
            // Without constants the horizon is not checked; L only feeds the diagnostics.
            let lipschitz = match rhs.known_lipschitz() {
                Some(l) => l,
                None => {
                    let region = TubeRegion::new(params, initial.clone(), h_flag, 1.0)?;
                    lipschitz_probe(&rhs, &region, 64)?
                }
            };
            let hyp = Hypotheses {
                tube_radius: 1.0,
                h_star: h_flag,
                rhs_bound: 1.0,
                lipschitz: lipschitz.max(f64::MIN_POSITIVE),
            };
            let info = ExistenceInfo {
                checked: false,
                h_max: None,
                forced: a.force_horizon,
            };
            (IvpProblem::new(params, rhs, initial, hyp)?, h_flag, info)
        }
        _ => {
            return Err(CliError::Invalid(
                "--K, --M and --L must be given together".into(),
            ))
        }
    };
    let horizon = if existence.checked && !a.force_horizon {
        HorizonPolicy::Enforce
    } else {
        HorizonPolicy::Allow
    };
    Ok(Setup {
        problem,
        h,
        cfg: solver_config(a, horizon),
        method,
        existence,
    })
}

#[derive(Debug, Serialize)]
struct SolveDiagnostics {
    column: String,
    method: String,
    h: f64,
    n: usize,
    iterations_used: usize,
    contraction_estimate: f64,
    contraction_factor: f64,
    error_estimate: f64,
    ratios: Vec<f64>,
}

fn diagnostics(column: &str, s: &Setup, sol: &Solution) -> Result<SolveDiagnostics, CliError> {
    Ok(SolveDiagnostics {
        column: column.to_string(),
        method: sol.method.to_string(),
        h: s.h,
        n: s.cfg.n,
        iterations_used: sol.iterations_used,
        contraction_estimate: sol.contraction_estimate,
        contraction_factor: s.problem.contraction_factor(s.h)?,
        error_estimate: sol.error_estimate,
        ratios: sol.ratios.clone(),
    })
}

#[derive(Debug, Serialize)]
struct SolveReport {
    existence: ExistenceInfo,
    hypotheses: Hypotheses,
    solves: Vec<SolveDiagnostics>,
}

fn stability_setups(a: &ProblemArgs) -> Result<Vec<(String, Setup)>, CliError> {
    let params = OperatorParams::new(1.0, 0.5, 0.5, 0.0)?;
    let hyp = Hypotheses {
        tube_radius: 10.0,
        h_star: 1.0,
        rhs_bound: 15.0,
        lipschitz: 0.9,
    };
    let method = Method::from_str(&a.method)?;
    [1.0, 1.2, 1.4, 1.6]
        .into_iter()
        .map(|b0| {
            let problem =
                IvpProblem::new(params, Rhs::Linear(0.9), InitialData::new(vec![b0])?, hyp)?;
            let setup = Setup {
                problem,
                h: 1.0,
                // h = 1 lies outside the guaranteed existence interval of this example
                cfg: solver_config(a, HorizonPolicy::Allow),
                method,
                existence: ExistenceInfo {
                    checked: false,
                    h_max: None,
                    forced: true,
                },
            };
            Ok((format!("b0_{}", header_value(b0)), setup))
        })
        .collect()
}

pub(super) fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let setups = match args.example {
        Some(Example::Stability) => stability_setups(&args.problem)?,
        None => vec![("y".to_string(), setup(&args.problem)?)],
    };
    let mut columns = Vec::new();
    let mut solves = Vec::new();
    let mut grid = None;
    for (name, s) in &setups {
        let sol = solve_ivp(&s.problem, s.h, &s.cfg, s.method)?;
        solves.push(diagnostics(name, s, &sol)?);
        grid.get_or_insert_with(|| sol.grid_fn.grid().clone());
        columns.push((name.clone(), sol.grid_fn.into_values()));
    }
    let grid = grid.ok_or_else(|| CliError::Invalid("nothing to solve".into()))?;
    let (_, first) = &setups[0];
    let report = SolveReport {
        existence: first.existence.clone(),
        hypotheses: *first.problem.hypotheses(),
        solves,
    };
    let mut out = OutputDir::create(&args.problem.out_dir)?;
    out.write_columns("solution.csv", grid.nodes(), grid.u(), &columns)?;
    out.write_json("diagnostics.json", &report)?;
    out.finish("solve", args)
}

pub(super) fn perturb(args: &PerturbArgs) -> Result<(), CliError> {
    let s = setup(&args.problem)?;
    let report = match args.kind {
        PerturbKind::Initial => {
            let c = InitialData::new(args.c.clone().unwrap_or_else(|| args.problem.b0.clone()))?;
            dependence_initial(&s.problem, &c, s.h, &s.cfg, s.method)?
        }
        PerturbKind::Force => {
            let spec = args
                .f_tilde
                .as_deref()
                .ok_or_else(|| CliError::Invalid("perturb force needs --f-tilde".into()))?;
            dependence_force(&s.problem, &Rhs::from_str(spec)?, s.h, &s.cfg, s.method)?
        }
        PerturbKind::Order => {
            let alpha_tilde = args
                .alpha_tilde
                .ok_or_else(|| CliError::Invalid("perturb order needs --alpha-tilde".into()))?;
            let extra = args.b_extra.clone().map(InitialData::new).transpose()?;
            dependence_order(
                &s.problem,
                alpha_tilde,
                extra.as_ref(),
                s.h,
                &s.cfg,
                s.method,
            )?
        }
    };
    let mut out = OutputDir::create(&args.problem.out_dir)?;
    out.write_json("report.json", &report)?;
    out.finish("perturb", args)
}

#[derive(Debug, Serialize)]
struct CheckSummary {
    seed: u64,
    total: usize,
    failed: usize,
    results: Vec<CheckResult>,
}

pub(super) fn check(args: &CheckArgs) -> Result<(), CliError> {
    let opts = CheckOptions {
        only: args.only.clone(),
        tolerance_override: args.tolerance_override,
        seed: args.seed,
    };
    let results = run_checks(&opts)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    let summary = CheckSummary {
        seed: args.seed,
        total: results.len(),
        failed,
        results,
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Invalid(format!("cannot encode the summary: {e}")))?;
    println!("{text}");
    if let Some(dir) = &args.out_dir {
        let mut out = OutputDir::create(dir)?;
        out.write_json("check.json", &summary)?;
        out.finish("check", args)?;
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grammar() {
        let s = parse_sweep("alpha=0.7:1.0:0.1").unwrap();
        assert_eq!(s.param, SweepParam::Alpha);
        assert_eq!(s.values.len(), 4);
        let headers: Vec<String> = s.values.iter().map(|v| header_value(*v)).collect();
        assert_eq!(headers, ["0.7", "0.8", "0.9", "1.0"]);
        assert!(parse_sweep("gamma=0:1:0.5").is_err());
        assert!(parse_sweep("alpha=1:0:0.5").is_err());
        assert!(parse_sweep("alpha=0:1").is_err());
        assert!(parse_sweep("alpha=0:1:0").is_err());
    }
}
