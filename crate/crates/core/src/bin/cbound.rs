use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cbound::analysis::{analyze_state, wronskian_diagnostics, density_profile};
use cbound::darboux::{build_family, CoefficientForm, DarbouxParams, SeedSpec};
use cbound::io::{self, AnalysisDocument, ResultDocument, SCHEMA};
use cbound::potentials::{presets, preset, ParamValue, SpecDocument, FAMILIES};
use cbound::reproduce::{render, run_table, TableReport, TablesFile};
use cbound::solver::{solve, KRegion, Method, PhaseRule, RealityTolerance, SolveOptions};
use cbound::{Error, Grid, PotentialSpec};

#[derive(Parser)]
#[command(name = "cbound", version, about = "Bound states of complex-valued 1D potentials")]
struct Cli {
    /// Worker threads for mesh scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, env = "CBOUND_OUT", default_value = "cbound-out")]
    out: PathBuf,

    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Write the per-state analysis CSV (solve and darboux always write CSV).
    #[arg(long, global = true)]
    csv: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List potential families and the reference parameter presets.
    Catalog {
        #[arg(long)]
        preset: Option<String>,
    },
    /// Find bound states of a potential.
    Solve(SolveArgs),
    /// Zeros, Wronskian and density checks on a saved result.
    Analyze(AnalyzeArgs),
    /// Build a complex Darboux partner of the harmonic oscillator.
    Darboux(DarbouxArgs),
    /// Recompute the reference tables and compare.
    Reproduce {
        /// Table id 1-5, or `all`.
        table: String,
        /// Expected-values file (defaults to the built-in copy).
        #[arg(long)]
        tables: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PotentialArgs {
    /// Catalog preset name.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// Spec document: inline JSON or a path to a JSON file.
    #[arg(long)]
    spec: Option<String>,
    /// Parameter override `name=value` or `name=re,im`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Shorthand for `--param kappa=...`.
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
}

impl GridArgs {
    fn grid(&self, default: (f64, f64)) -> Result<Grid, Error> {
        let lo = self.grid_min.unwrap_or(default.0);
        let hi = self.grid_max.unwrap_or(default.1);
        Grid::new(lo, hi, self.grid_points.unwrap_or(2001))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Transfer,
    Shooting,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Energy window `lo,hi` for shooting.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// k-plane rectangle `re_min,re_max,im_min,im_max` for the transfer matrix.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    #[arg(long)]
    x_trunc: Option<f64>,
    /// RK4 step.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// `|Im E|` accepted silently.
    #[arg(long, default_value_t = 1e-6)]
    tol_reality: f64,
    /// `|Im E|` above which roots are rejected.
    #[arg(long, default_value_t = 1e-3)]
    tol_warn: f64,
    /// Residual threshold relative to max|psi|.
    #[arg(long, default_value_t = 1e-4)]
    tol_residual: f64,
    /// peak, symmetry or raw:THETA.
    #[arg(long, default_value = "raw:0")]
    phase: PhaseRule,
    /// Exit 0 even when no state is found.
    #[arg(long)]
    allow_empty: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Result JSON written by `solve` or `darboux`.
    result: PathBuf,
    /// Re-phase the states before analysis.
    #[arg(long)]
    phase: Option<PhaseRule>,
    /// Number of phases for the interlacing sweep (0 disables it).
    #[arg(long, default_value_t = 32)]
    sweep: usize,
}

#[derive(Args)]
struct DarbouxArgs {
    #[arg(long, allow_hyphen_values = true)]
    c0: f64,
    #[arg(long, allow_hyphen_values = true)]
    c1: f64,
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = 5)]
    levels: usize,
    /// Radicand constant: oscillator (c1 + lambda)/c0 or general (c1^2 + lambda)/c0.
    #[arg(long, value_enum, default_value = "oscillator")]
    form: FormArg,
    #[arg(long, default_value_t = 10.0)]
    half_width: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value = "raw:0")]
    phase: PhaseRule,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Oscillator,
    General,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Catalog { preset } => catalog(cli, preset.as_deref()),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Analyze(a) => cmd_analyze(cli, a),
        Command::Darboux(a) => cmd_darboux(cli, a),
        Command::Reproduce { table, tables } => cmd_reproduce(cli, table, tables.as_deref()),
    }
}

fn catalog(cli: &Cli, name: Option<&str>) -> Result<i32, Error> {
    if let Some(name) = name {
        let p = preset(name).ok_or_else(|| Error::InvalidParameter(format!("unknown preset `{name}`")))?;
        if cli.json {
            print!("{}", io::to_json_string(&p.spec)?);
        } else {
            println!("{}: {}", p.name, p.description);
            println!("{}", describe(&p.spec));
        }
        return Ok(0);
    }
    if cli.json {
        let doc = serde_json::json!({
            "schema": SCHEMA,
            "families": FAMILIES.iter().map(|(f, ps)| serde_json::json!({"family": f, "params": ps})).collect::<Vec<_>>(),
            "presets": presets().iter().map(|p| serde_json::json!({"name": p.name, "description": p.description, "spec": p.spec})).collect::<Vec<_>>(),
        });
        print!("{}", io::to_json_string(&doc)?);
        return Ok(0);
    }
    println!("families:");
    for (f, ps) in FAMILIES {
        println!("  {f:<20} {}", if ps.is_empty() { "(no parameters)".to_string() } else { ps.join(", ") });
    }
    println!("  (plus `sampled`: tabulated values on a uniform grid)");
    println!("presets:");
    for p in presets() {
        println!("  {:<18} {}", p.name, p.description);
    }
    Ok(0)
}

fn describe(spec: &PotentialSpec) -> String {
    match spec {
        PotentialSpec::PoschlTeller { kappa } => format!("PoschlTeller(kappa = {kappa})"),
        PotentialSpec::SinusoidalWell { w0, v0 } => format!("SinusoidalWell({w0}, {v0})"),
        PotentialSpec::CubicOscillator => "CubicOscillator".into(),
        PotentialSpec::Levai { nu, mu, epsilon, kappa } => format!("Levai({nu}, {mu}, {epsilon}, {kappa})"),
        PotentialSpec::SquareWell { a, b, v0, vi1, vi2 } => format!("SquareWell({a}, {b}, {v0}, {vi1}, {vi2})"),
        PotentialSpec::DarbouxOscillator(a) => {
            let p = a.params();
            format!("DarbouxOscillator({}, {}, {})", p.c0, p.c1, p.lambda)
        }
        PotentialSpec::Sampled(s) => format!("Sampled({} points on [{}, {}])", s.grid().len(), s.grid().x_min(), s.grid().x_max()),
    }
}

fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<f64>, Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::InvalidParameter(format!("{what}: expected {n} comma-separated numbers, got `{s}`")))?;
    if v.len() != n {
        return Err(Error::InvalidParameter(format!("{what}: expected {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

fn load_spec(a: &PotentialArgs) -> Result<PotentialSpec, Error> {
    let mut doc: SpecDocument = match (&a.preset, &a.spec) {
        (Some(name), _) => {
            let p = preset(name).ok_or_else(|| Error::InvalidParameter(format!("unknown preset `{name}`")))?;
            p.spec.into()
        }
        (None, Some(s)) => {
            let text = if s.trim_start().starts_with('{') { s.clone() } else { std::fs::read_to_string(s)? };
            serde_json::from_str(&text)?
        }
        (None, None) => return Err(Error::InvalidParameter("give --preset or --spec".into())),
    };
    let mut overrides: BTreeMap<String, ParamValue> = BTreeMap::new();
    for p in &a.params {
        let (k, v) = p.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("`{p}` is not NAME=VALUE")))?;
        let value = match v.split_once(',') {
            Some(_) => {
                let c = parse_list(v, 2, k)?;
                ParamValue::Complex([c[0], c[1]])
            }
            None => ParamValue::Real(v.trim().parse().map_err(|_| Error::InvalidParameter(format!("`{v}` is not a number")))?),
        };
        overrides.insert(k.trim().to_string(), value);
    }
    if let Some(k) = a.kappa {
        overrides.insert("kappa".into(), ParamValue::Real(k));
    }
    for (k, v) in overrides {
        if !doc.params.contains_key(&k) {
            return Err(Error::InvalidParameter(format!("family `{}` has no parameter `{k}`", doc.family)));
        }
        doc.params.insert(k, v);
    }
    PotentialSpec::try_from(doc)
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)?;
    Ok(())
}

fn default_grid(spec: &PotentialSpec) -> (f64, f64) {
    match spec.interaction_zone() {
        Some((l, r)) => (l - 2.0, r + 2.0),
        None => (-10.0, 10.0),
    }
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> Result<i32, Error> {
    let spec = load_spec(&a.potential)?;
    let opts = SolveOptions {
        method: a.method.map(|m| match m {
            MethodArg::Transfer => Method::Transfer,
            MethodArg::Shooting => Method::Shooting,
        }),
        window: a.window.as_deref().map(|w| parse_list(w, 2, "--window").map(|v| (v[0], v[1]))).transpose()?,
        region: a
            .region
            .as_deref()
            .map(|r| parse_list(r, 4, "--region").map(|v| KRegion { re_min: v[0], re_max: v[1], im_min: v[2], im_max: v[3] }))
            .transpose()?,
        x_trunc: a.x_trunc,
        h: a.step,
        reality: RealityTolerance { accept: a.tol_reality, warn: a.tol_warn },
        residual_tol: a.tol_residual,
        phase: a.phase,
    };
    let grid = a.grid.grid(default_grid(&spec))?;
    let result = solve(&spec, &opts)?;

    std::fs::create_dir_all(&cli.out)?;
    write(&cli.out.join("potential.csv"), &io::potential_csv(&spec, &grid))?;
    for (i, s) in result.states.iter().enumerate() {
        write(&cli.out.join(format!("state_{i}.csv")), &io::state_csv(s))?;
    }
    for w in &result.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    let doc = ResultDocument::new(spec, result);
    io::write_json(&cli.out.join("result.json"), &doc)?;
    if cli.json {
        print!("{}", io::to_json_string(&doc)?);
    } else {
        println!("{}: {} bound state(s) by {:?}", describe(&doc.spec), doc.result.len(), doc.result.method);
        for (i, (e, r)) in doc.result.energies.iter().zip(&doc.result.residuals).enumerate() {
            println!("  E_{i} = {e:.9}   residual {r:.2e}");
        }
        println!("written to {}", cli.out.display());
    }
    if doc.result.is_empty() && !a.allow_empty {
        eprintln!("error: no bound state found (use --allow-empty to accept)");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<i32, Error> {
    let doc: ResultDocument = io::read_json(&a.result)?;
    let mut states = doc.result.states.clone();
    if let Some(rule) = a.phase {
        states = states.into_iter().map(|s| cbound::solver::fix_phase(s, rule)).collect::<Result<_, _>>()?;
    }
    std::fs::create_dir_all(&cli.out)?;
    let mut report = AnalysisDocument { schema: SCHEMA.into(), spec: doc.spec.clone(), states: vec![] };
    for (i, s) in states.iter().enumerate() {
        report.states.push(analyze_state(&doc.spec, s, i, a.sweep));
        if cli.csv {
            let w = wronskian_diagnostics(s, &doc.spec).w;
            write(&cli.out.join(format!("analysis_{i}.csv")), &io::analysis_csv(s, &density_profile(s), &w))?;
        }
    }
    io::write_json(&cli.out.join("analysis.json"), &report)?;
    if cli.json {
        print!("{}", io::to_json_string(&report)?);
    } else {
        println!("{}", describe(&doc.spec));
        for s in &report.states {
            let z = &s.zeros;
            println!(
                "  psi_{}  E = {:.6}  (n_R, n_I) = ({}, {})  interlaced {}  |n_R - n_I| <= 1 {}  nodeless {}  W {:?}  residual {:.1e}",
                s.index, s.energy, z.n_r, z.n_i, z.interlaced, z.count_law, s.nodeless, s.wronskian_sign, s.residual
            );
            println!("      lambda {:?}", z.lambdas.iter().map(|x| io::round12(*x)).collect::<Vec<_>>());
            println!("      mu     {:?}", z.mus.iter().map(|x| io::round12(*x)).collect::<Vec<_>>());
            if let Some(sw) = &s.sweep {
                println!("      phase sweep: {}/{} interlaced, {}/{} count law", sw.interlaced, sw.phases, sw.count_law, sw.phases);
            }
        }
        println!("written to {}", cli.out.display());
    }
    Ok(0)
}

fn cmd_darboux(cli: &Cli, a: &DarbouxArgs) -> Result<i32, Error> {
    let form = match a.form {
        FormArg::Oscillator => CoefficientForm::Oscillator,
        FormArg::General => CoefficientForm::General,
    };
    let params = DarbouxParams::new(a.c0, a.c1, a.lambda).with_form(form);
    let grid = Grid::symmetric(a.half_width, a.step)?;
    let seed = SeedSpec::HarmonicOscillator;
    let fam = build_family(&seed, params, &grid, a.levels)?;
    let manifest = fam.manifest(&seed);
    let mut result = cbound::solver::BoundStateResult::empty(Method::Analytic);
    for s in &fam.states {
        result.energies.push(s.energy);
        result.residuals.push(cbound::analysis::residual_oracle(&fam.potential, s, s.energy).value);
        result.diagnostics.imag_energies.push(0.0);
    }
    result.states = fam.states.clone();
    let result = result.with_phase(a.phase)?;

    std::fs::create_dir_all(&cli.out)?;
    write(&cli.out.join("potential.csv"), &io::potential_csv(&fam.potential, &grid))?;
    for (i, s) in result.states.iter().enumerate() {
        write(&cli.out.join(format!("state_{i}.csv")), &io::state_csv(s))?;
    }
    io::write_json(&cli.out.join("manifest.json"), &manifest)?;
    let mut doc = ResultDocument::new(fam.potential.clone(), result);
    doc.manifest = Some(manifest);
    io::write_json(&cli.out.join("result.json"), &doc)?;
    if cli.json {
        print!("{}", io::to_json_string(&doc)?);
    } else {
        println!("{}  K = {}  gamma = {:.9}", describe(&doc.spec), params.invariant(), params.strength());
        for (i, (e, r)) in doc.result.energies.iter().zip(&doc.result.residuals).enumerate() {
            println!("  psi_{i}: E = {e}   residual {r:.2e}");
        }
        println!("written to {}", cli.out.display());
    }
    Ok(0)
}

fn cmd_reproduce(cli: &Cli, which: &str, file: Option<&Path>) -> Result<i32, Error> {
    let tables = match file {
        Some(p) => TablesFile::load(p)?,
        None => TablesFile::builtin(),
    };
    let ids: Vec<u32> = if which == "all" {
        tables.tables.iter().map(|t| t.id).collect()
    } else {
        let id: u32 = which.parse().map_err(|_| Error::InvalidParameter(format!("table id must be 1-5 or `all`, got `{which}`")))?;
        if tables.table(id).is_none() {
            return Err(Error::InvalidParameter(format!("no table {id}")));
        }
        vec![id]
    };
    let reports: Vec<TableReport> = ids.iter().map(|&id| run_table(tables.table(id).expect("checked"), tables.zero_tolerance)).collect();
    std::fs::create_dir_all(&cli.out)?;
    io::write_json(&cli.out.join("reproduce.json"), &serde_json::json!({"schema": SCHEMA, "tables": reports}))?;
    let passed = reports.iter().filter(|r| r.passed).count();
    if cli.json {
        print!("{}", io::to_json_string(&serde_json::json!({"schema": SCHEMA, "tables": reports}))?);
    } else {
        for r in &reports {
            print!("{}", render(r));
        }
        println!("summary: {passed}/{} tables reproduced", reports.len());
    }
    Ok(if passed == reports.len() { 0 } else { 1 })
}
