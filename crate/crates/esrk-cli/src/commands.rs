use std::fmt;

use esrk::analysis::{energy_decay_fit, stability_region, Window};
use esrk::catalog::{catalog, lookup, solve_esc, MethodDescriptor};
use esrk::coeffs::stage_ratios;
use esrk::error::Error as CoreError;
use esrk::experiments::{
    fdtd_run_to_final, maxwell_fixed_steps, maxwell_run, oscillator_run, pd_run, table_from_study,
    ExperimentRun, StudyOutcome,
};
use esrk::problems::{maxwell, oscillator, peridynamics};

use crate::cli::{Cli, Command, ExperimentArgs, MethodsAction};
use crate::config;
use crate::output::{float, opt_order, Csv};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Numeric(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) | Self::Numeric(msg) | Self::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidSpec(_)
            | CoreError::InvalidCoefficients(_)
            | CoreError::NonDoublingResolutions { .. } => Self::Usage(err.to_string()),
            _ => Self::Numeric(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Problem {
    Oscillator,
    Peridynamics,
    Maxwell,
}

impl Problem {
    fn name(self) -> &'static str {
        match self {
            Self::Oscillator => "oscillator",
            Self::Peridynamics => "peridynamics",
            Self::Maxwell => "maxwell",
        }
    }

    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "oscillator" | "osc" => Ok(Self::Oscillator),
            "peridynamics" | "pd" => Ok(Self::Peridynamics),
            "maxwell" => Ok(Self::Maxwell),
            other => Err(CliError::Usage(format!(
                "unknown problem {other:?}; expected oscillator, peridynamics, or maxwell"
            ))),
        }
    }

    fn default_t_final(self) -> f64 {
        match self {
            Self::Oscillator => 80.0,
            Self::Peridynamics => 5.0,
            Self::Maxwell => 1e-8,
        }
    }
}

fn require_method(name: &str) -> Result<MethodDescriptor, CliError> {
    lookup(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown method {name:?}; run `esrk methods list` for the catalog"
        ))
    })
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Methods { action } => match action {
            MethodsAction::List => cmd_methods_list(),
            MethodsAction::Show { name } => cmd_methods_show(&name),
        },
        Command::Derive { s, p } => cmd_derive(s, p),
        Command::Convergence(mut args) => {
            config::merge(&mut args)?;
            cmd_convergence(&args)
        }
        Command::EnergyHistory(mut args) => {
            config::merge(&mut args)?;
            cmd_energy_history(&args)
        }
        Command::StabilityRegion {
            method,
            window,
            resolution,
            out,
            config: config_path,
        } => cmd_stability_region(method, window, resolution, out, config_path),
        Command::Run { problem, mut args } => {
            config::merge(&mut args)?;
            args.problem = Some(problem);
            cmd_run(&args)
        }
    }
}

fn cmd_methods_list() -> Result<(), CliError> {
    println!(
        "{:<12} {:>2} {:>2} {:>3}  {:<10} {:>13}",
        "name", "s", "p", "r", "lambda", "b_(s-1)"
    );
    for m in catalog() {
        let lambda = m
            .stability_bound()
            .map(|l| format!("{l:.6}"))
            .unwrap_or_else(|| "-".to_string());
        let b = &m.profile().coefficients;
        let b_prev = b[b.len() - 2];
        println!(
            "{:<12} {:>2} {:>2} {:>3}  {:<10} {:>13.6e}",
            m.name(),
            m.stages(),
            m.solution_order(),
            m.energy_order(),
            lambda,
            b_prev
        );
    }
    Ok(())
}

fn cmd_methods_show(name: &str) -> Result<(), CliError> {
    let m = require_method(name)?;
    println!("name: {}", m.name());
    println!("stages: {}", m.stages());
    println!("solution order: {}", m.solution_order());
    println!("energy order: {}", m.energy_order());
    match m.stability_bound() {
        Some(l) => println!("stability bound: {l:.12} (h * ||L|| <= lambda)"),
        None => println!("stability bound: none (not strongly stable)"),
    }
    println!("coefficients a_k:");
    for (k, a) in m.coefficients().coeffs().iter().enumerate() {
        println!("  a_{k} = {}", float(*a));
    }
    println!("energy coefficients b_k:");
    for (k, b) in m.profile().coefficients.iter().enumerate() {
        println!("  b_{} = {}", k + 1, float(*b));
    }
    let ratios = stage_ratios(m.coefficients()).map_err(CliError::from)?;
    println!("stage ratios c_j:");
    for (j, c) in ratios.iter().enumerate() {
        println!("  c_{} = {}", j + 1, float(*c));
    }
    Ok(())
}

fn cmd_derive(s: usize, p: usize) -> Result<(), CliError> {
    let report = solve_esc(s, p, 32)?;
    println!(
        "seeds tried: {}, converged: {}",
        report.seeds_tried, report.seeds_converged
    );
    if report.roots.is_empty() {
        return Err(CliError::Numeric(format!(
            "no root of the interior energy system found for s = {s}, p = {p} \
             ({} of {} seeds converged)",
            report.seeds_converged, report.seeds_tried
        )));
    }
    let reference = catalog();
    for (idx, root) in report.roots.iter().enumerate() {
        let profile = esrk::coeffs::EnergyProfile::of(root).map_err(CliError::from)?;
        println!("root {}:", idx + 1);
        for (k, a) in root.coeffs().iter().enumerate().skip(p + 1) {
            println!("  a_{k} = {}", float(*a));
        }
        println!("  solution order: {}", profile.solution_order);
        println!("  energy order: {}", profile.energy_order);
        match profile.stability_bound {
            Some(l) => println!("  stability bound: {l:.12}"),
            None => println!("  stability bound: -"),
        }
        let matched = reference.iter().find(|m| {
            m.stages() == s
                && m.coefficients()
                    .coeffs()
                    .iter()
                    .zip(root.coeffs())
                    .all(|(a, b)| (a - b).abs() < 1e-9)
        });
        match matched {
            Some(m) => println!("  matches catalog method {}", m.name()),
            None => println!("  no catalog match"),
        }
    }
    Ok(())
}

fn is_instability(err: &CoreError) -> bool {
    matches!(err, CoreError::NonFiniteStage { .. })
}

/// Runs one resolution of a study, keeping instabilities as data.
fn study_step(
    outcomes: &mut Vec<StudyOutcome>,
    n: usize,
    run: Result<ExperimentRun, CoreError>,
) -> Result<(), CliError> {
    match run {
        Ok(r) => {
            let errors = r.resolution_errors().map_err(CliError::from)?;
            outcomes.push((n, Ok(errors)));
            Ok(())
        }
        Err(e) if is_instability(&e) => {
            outcomes.push((n, Err(e)));
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn resolutions_for(problem: Problem, args: &ExperimentArgs) -> Result<Vec<usize>, CliError> {
    let (list, flag) = match problem {
        Problem::Oscillator => (args.nt.clone(), "--nt"),
        Problem::Peridynamics | Problem::Maxwell => (args.nx.clone(), "--nx"),
    };
    let list =
        list.ok_or_else(|| CliError::Usage(format!("{flag} is required for this problem")))?;
    if list.is_empty() || list.contains(&0) {
        return Err(CliError::Usage(format!("{flag} must list positive values")));
    }
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage(format!(
            "{flag} values must be strictly increasing"
        )));
    }
    Ok(list)
}

fn run_at_resolution(
    problem: Problem,
    method_name: &str,
    n: usize,
    t_final: f64,
    courant: Option<f64>,
    record_every: usize,
) -> Result<ExperimentRun, CoreError> {
    match problem {
        Problem::Oscillator => {
            let method = lookup(method_name).expect("validated");
            let spec = oscillator::OscillatorSpec {
                t_final,
                ..Default::default()
            };
            oscillator_run(&method, &spec, n, record_every)
        }
        Problem::Peridynamics => {
            let method = lookup(method_name).expect("validated");
            let mut spec = peridynamics::PeridynamicsSpec::bar(n);
            spec.t_final = t_final;
            pd_run(&method, &spec, record_every)
        }
        Problem::Maxwell => {
            let mut spec = maxwell::MaxwellSpec::pulse_cavity(n);
            spec.t_final = t_final;
            if method_name == "fdtd" {
                fdtd_run_to_final(&spec, courant.unwrap_or(1.0), record_every)
            } else {
                let method = lookup(method_name).expect("validated");
                maxwell_run(&method, &spec, courant, record_every)
            }
        }
    }
}

fn validate_method(problem: Problem, name: &str) -> Result<(), CliError> {
    if name == "fdtd" {
        if problem != Problem::Maxwell {
            return Err(CliError::Usage(
                "the fdtd baseline only exists for the maxwell problem".into(),
            ));
        }
        return Ok(());
    }
    require_method(name).map(|_| ())
}

fn cmd_convergence(args: &ExperimentArgs) -> Result<(), CliError> {
    let problem = Problem::parse(
        args.problem
            .as_deref()
            .ok_or_else(|| CliError::Usage("--problem is required".into()))?,
    )?;
    let method_name = args
        .method
        .as_deref()
        .ok_or_else(|| CliError::Usage("--method is required".into()))?;
    validate_method(problem, method_name)?;
    let resolutions = resolutions_for(problem, args)?;
    if resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(CliError::Usage(
            "convergence studies require resolutions that double".into(),
        ));
    }
    let t_final = args.t_final.unwrap_or(problem.default_t_final());

    let mut outcomes = Vec::new();
    for &n in &resolutions {
        let run = run_at_resolution(problem, method_name, n, t_final, args.courant, usize::MAX);
        study_step(&mut outcomes, n, run)?;
    }
    let (table, unstable) = table_from_study(&outcomes);

    let mut csv = Csv::new("N,eps1,order1,eps2,order2,epsInf,orderInf,epsE,orderE");
    let mut stable_rows = table.rows.iter();
    for &n in &resolutions {
        if unstable.contains(&n) {
            csv.row(&[
                n.to_string(),
                "UNSTABLE".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        } else {
            let row = stable_rows.next().expect("row per stable resolution");
            csv.row(&[
                row.errors.n.to_string(),
                float(row.errors.eps1),
                opt_order(row.order1),
                float(row.errors.eps2),
                opt_order(row.order2),
                float(row.errors.eps_inf),
                opt_order(row.order_inf),
                float(row.errors.eps_e),
                opt_order(row.order_e),
            ]);
        }
    }
    csv.comment(&format!("problem = {}", problem.name()));
    csv.comment(&format!("method = {method_name}"));
    csv.comment(&format!("T = {}", float(t_final)));
    if let Some(c) = args.courant {
        csv.comment(&format!("courant = {}", float(c)));
    }
    csv.write(args.out.as_deref())
}

fn single_resolution(problem: Problem, args: &ExperimentArgs) -> Result<usize, CliError> {
    let list = resolutions_for(problem, args)?;
    if list.len() != 1 {
        return Err(CliError::Usage(
            "this command takes exactly one resolution".into(),
        ));
    }
    Ok(list[0])
}

fn history_run(args: &ExperimentArgs) -> Result<(Problem, String, ExperimentRun), CliError> {
    let problem = Problem::parse(
        args.problem
            .as_deref()
            .ok_or_else(|| CliError::Usage("--problem is required".into()))?,
    )?;
    let method_name = args
        .method
        .as_deref()
        .ok_or_else(|| CliError::Usage("--method is required".into()))?
        .to_string();
    validate_method(problem, &method_name)?;
    let n = single_resolution(problem, args)?;
    let t_final = args.t_final.unwrap_or(problem.default_t_final());
    let record_every = args.record_every.unwrap_or(1).max(1);

    if let Some(iterations) = args.iterations {
        if iterations == 0 {
            return Err(CliError::Usage("--iterations must be >= 1".into()));
        }
        if problem != Problem::Maxwell {
            return Err(CliError::Usage(
                "--iterations only applies to maxwell runs".into(),
            ));
        }
        let mut spec = maxwell::MaxwellSpec::pulse_cavity(n);
        spec.t_final = t_final;
        let run = if method_name == "fdtd" {
            let fdtd =
                maxwell::fdtd_run(&spec, args.courant.unwrap_or(1.0), iterations, record_every)?;
            fdtd_record_to_run(n, fdtd)?
        } else {
            let method = lookup(&method_name).expect("validated");
            maxwell_fixed_steps(
                &method,
                &spec,
                args.courant
                    .unwrap_or_else(|| method.stability_bound().map(|l| l / 2.0).unwrap_or(1.0)),
                iterations,
                record_every,
            )?
        };
        return Ok((problem, method_name, run));
    }

    let run = run_at_resolution(
        problem,
        &method_name,
        n,
        t_final,
        args.courant,
        record_every,
    )?;
    Ok((problem, method_name, run))
}

fn fdtd_record_to_run(n: usize, fdtd: maxwell::FdtdRecord) -> Result<ExperimentRun, CliError> {
    let eps_e = esrk::analysis::relative_energy_deviation(
        fdtd.staggered_energies[0],
        *fdtd.staggered_energies.last().unwrap(),
    )?;
    let n_steps = *fdtd.steps.last().unwrap() as usize;
    let mut final_state = fdtd.final_e.clone();
    final_state.extend_from_slice(&fdtd.final_h);
    Ok(ExperimentRun {
        n,
        n_steps,
        dt: fdtd.dt,
        errors: None,
        eps_e,
        record: esrk::integrate::SimulationRecord {
            steps: fdtd.steps,
            times: fdtd.times,
            energies: fdtd.staggered_energies,
            final_state,
        },
    })
}

fn cmd_energy_history(args: &ExperimentArgs) -> Result<(), CliError> {
    let (_, method_name, run) = history_run(args)?;
    let record = &run.record;
    let e0 = record.initial_energy();

    let mut csv = Csv::new("step,time,energy,eps_E,abs_eps_E");
    for idx in 0..record.steps.len() {
        let dev = (record.energies[idx] - e0) / e0;
        csv.row(&[
            record.steps[idx].to_string(),
            float(record.times[idx]),
            float(record.energies[idx]),
            float(dev),
            float(dev.abs()),
        ]);
    }
    csv.comment(&format!("method = {method_name}"));
    match energy_decay_fit(record) {
        Ok((slope, intercept)) => {
            csv.comment(&format!("fit_slope = {}", float(slope)));
            csv.comment(&format!("fit_intercept = {}", float(intercept)));
        }
        Err(err) => csv.comment(&format!("fit unavailable: {err}")),
    }
    csv.write(args.out.as_deref())
}

fn cmd_stability_region(
    method: Option<String>,
    window: Option<Vec<f64>>,
    resolution: Option<usize>,
    out: Option<String>,
    config_path: Option<String>,
) -> Result<(), CliError> {
    let mut method = method;
    let mut window = window;
    let mut resolution = resolution;
    let mut out = out;
    if let Some(path) = config_path {
        let map = config::parse_file(&path)?;
        if method.is_none() {
            method = map.get("method").cloned();
        }
        if out.is_none() {
            out = map.get("out").cloned();
        }
        if resolution.is_none() {
            if let Some(v) = map.get("resolution") {
                resolution = Some(v.parse().map_err(|_| {
                    CliError::Usage(format!("config resolution: bad integer {v:?}"))
                })?);
            }
        }
        if window.is_none() {
            if let Some(v) = map.get("window") {
                let parts: Result<Vec<f64>, _> =
                    v.split(',').map(|t| t.trim().parse::<f64>()).collect();
                window = Some(parts.map_err(|_| {
                    CliError::Usage(format!("config window: bad float list {v:?}"))
                })?);
            }
        }
    }
    let name = method.ok_or_else(|| CliError::Usage("--method is required".into()))?;
    let m = require_method(&name)?;
    let window = match window {
        None => Window::default(),
        Some(v) if v.len() == 4 => Window {
            re_min: v[0],
            re_max: v[1],
            im_min: v[2],
            im_max: v[3],
        },
        Some(_) => {
            return Err(CliError::Usage(
                "--window takes exactly four values: re_min,re_max,im_min,im_max".into(),
            ))
        }
    };
    let resolution = resolution.unwrap_or(1024);
    let region = stability_region(m.coefficients(), window, resolution)?;

    let mut csv = Csv::new("re,im");
    for (re, im) in &region.boundary {
        csv.row(&[float(*re), float(*im)]);
    }
    csv.comment(&format!("method = {name}"));
    csv.comment(&format!("resolution = {resolution}"));
    csv.write(out.as_deref())
}

fn cmd_run(args: &ExperimentArgs) -> Result<(), CliError> {
    let (problem, method_name, run) = history_run(args)?;
    println!("problem: {}", problem.name());
    println!("method: {method_name}");
    println!("resolution: {}", run.n);
    println!("steps: {}", run.n_steps);
    println!("dt: {}", float(run.dt));
    if let Some((e1, e2, einf)) = run.errors {
        println!("eps1: {}", float(e1));
        println!("eps2: {}", float(e2));
        println!("epsInf: {}", float(einf));
    }
    println!("eps_E: {}", float(run.eps_e));

    if args.out.is_some() {
        let record = &run.record;
        let e0 = record.initial_energy();
        let mut csv = Csv::new("step,time,energy,eps_E,abs_eps_E");
        for idx in 0..record.steps.len() {
            let dev = (record.energies[idx] - e0) / e0;
            csv.row(&[
                record.steps[idx].to_string(),
                float(record.times[idx]),
                float(record.energies[idx]),
                float(dev),
                float(dev.abs()),
            ]);
        }
        csv.comment(&format!("method = {method_name}"));
        csv.write(args.out.as_deref())?;
    }
    Ok(())
}
