//! `drk` — command-line front end for the de Branges-Rovnyak operator
//! toolkit: extreme-point tests, Pythagorean mates, curvature grids,
//! unitary-equivalence verdicts, angular derivatives, and finite-section
//! verification, with JSON reports and plot-ready CSV grids.

mod spec;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use drk_core::adc::{adc_points, same_adc};
use drk_core::boundary::{extreme_test, extreme_test_sampled, Certainty, ExtremeVerdict};
use drk_core::curvature::{
    curvature_table, decide_equiv_s, decide_equiv_x, CurvatureData, CurvatureSample, DiskGrid,
    EquivalenceReport, EquivalenceVerdict,
};
use drk_core::finsect::build_defect_model;
use drk_core::pythagorean::{mate, space_equality_necessary, PythagoreanPair, SpaceEquality};
use drk_core::{DiskPoint, RationalSymbol, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use spec::{ParsedSymbol, RunConfig, SymbolSpec};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "drk", version, about = "Shift operators on de Branges-Rovnyak spaces: invariants, equivalence, verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Symbol spec: inline JSON or a path ({"num":[...],"den":[...]} or {"samples_file":...})
    #[arg(long, global = true)]
    symbol: Option<String>,

    /// Second symbol for pairwise commands
    #[arg(long, global = true)]
    symbol_b: Option<String>,

    /// Radial grid lines of the evaluation grid
    #[arg(long, global = true, default_value_t = 24)]
    grid_radii: usize,

    /// Angular grid lines of the evaluation grid
    #[arg(long, global = true, default_value_t = 64)]
    grid_angles: usize,

    /// Extra pseudo-random grid points
    #[arg(long, global = true, default_value_t = 200)]
    random_points: usize,

    /// Seed of the pseudo-random grid points (recorded in every report)
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Equality tolerance for equivalence verdicts
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Stencil step of the finite-difference curvature oracle
    #[arg(long, global = true, default_value_t = 1e-3)]
    fd_step: f64,

    /// Truncation orders, comma separated (verify)
    #[arg(long, global = true, value_delimiter = ',', default_values_t = [32usize, 64, 128])]
    trunc: Vec<usize>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    X,
    S,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the symbol is an extreme point of the H-infinity ball
    Extreme,
    /// Construct the Pythagorean mate (a, b) and the ratio Phi = b/a
    Mate,
    /// Tabulate closed-form vs finite-difference curvature over the grid
    Curvature {
        #[arg(long, value_enum)]
        which: Which,
    },
    /// Decide unitary equivalence of X_b or S_b across two symbols
    Equiv {
        #[arg(long, value_enum)]
        which: Which,
    },
    /// Find Caratheodory angular derivative points; with --symbol-b, also
    /// compare the two contact sets
    Adc,
    /// Finite-section verification: reproducing property, adjoint identity,
    /// Fredholm-structure identities, contraction bound
    Verify,
    /// Run the full worked-example pipeline and report every claim
    Example5,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let config = RunConfig {
        tolerances: Tolerances {
            tol_equiv: cli.tol,
            fd_step: cli.fd_step,
            ..Tolerances::default()
        },
        grid: DiskGrid {
            radii: cli.grid_radii,
            angles: cli.grid_angles,
            random_points: cli.random_points,
            random_seed: cli.seed,
            max_radius: 0.95,
        },
        fd_step: cli.fd_step,
        trunc: cli.trunc.clone(),
        format: match cli.format {
            Format::Json => "json".into(),
            Format::Csv => "csv".into(),
        },
    };
    match run(&cli, &config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // input/usage problems exit 2, math failures exit 3
            let msg = format!("{e:#}");
            if msg.contains("computation failed") {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("DRK_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
}

fn run(cli: &Cli, config: &RunConfig) -> anyhow::Result<ExitCode> {
    let tol = &config.tolerances;
    match &cli.command {
        Command::Extreme => {
            let spec = required_symbol(cli)?;
            let result = match spec.parse(tol)? {
                ParsedSymbol::Rational(b) => {
                    let (verdict, certainty) = extreme_test(&b, tol).map_err(math)?;
                    extreme_json(&verdict, certainty)
                }
                ParsedSymbol::Sampled(s) => {
                    let (verdict, certainty) = extreme_test_sampled(&s, tol).map_err(math)?;
                    extreme_json(&verdict, certainty)
                }
            };
            emit(cli, config, "extreme", json!({"symbol": spec}), result)
        }
        Command::Mate => {
            let spec = required_symbol(cli)?;
            let b = spec.parse_rational(tol)?;
            let pair = mate(&b, tol).map_err(math)?;
            emit(cli, config, "mate", json!({"symbol": spec}), serde_json::to_value(&pair)?)
        }
        Command::Curvature { which } => {
            let spec = required_symbol(cli)?;
            let b = spec.parse_rational(tol)?;
            let rows = curvature_rows(&b, *which, config, tol)?;
            if cli.format == Format::Csv {
                return write_curvature_csv(cli, &rows);
            }
            let max_abs_err = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
            let ill = rows.iter().filter(|r| r.ill_conditioned).count();
            let result = json!({
                "which": which_name(*which),
                "points": rows.len(),
                "max_abs_err": max_abs_err,
                "ill_conditioned_points": ill,
            });
            emit(cli, config, "curvature", json!({"symbol": spec}), result)
        }
        Command::Equiv { which } => {
            let (spec_a, spec_b) = required_pair(cli)?;
            let a = spec_a.parse_rational(tol)?;
            let b = spec_b.parse_rational(tol)?;
            let report = match which {
                Which::X => {
                    let pa = mate(&a, tol).map_err(math)?;
                    let pb = mate(&b, tol).map_err(math)?;
                    decide_equiv_x(&pa, &pb, &config.grid, config.tolerances.tol_equiv, tol)
                        .map_err(math)?
                }
                Which::S => decide_equiv_s(&a, &b, &config.grid, config.tolerances.tol_equiv, tol)
                    .map_err(math)?,
            };
            let mut result = serde_json::to_value(&report)?;
            result["which"] = json!(which_name(*which));
            emit(cli, config, "equiv", json!({"symbol": spec_a, "symbol_b": spec_b}), result)
        }
        Command::Adc => {
            let spec = required_symbol(cli)?;
            let b = spec.parse_rational(tol)?;
            let points = adc_points(&b, tol).map_err(math)?;
            let mut result = json!({ "points": points });
            let mut inputs = json!({ "symbol": spec });
            if let Some(arg) = &cli.symbol_b {
                let other_spec = SymbolSpec::from_arg(arg)?;
                let other = other_spec.parse_rational(tol)?;
                let other_points = adc_points(&other, tol).map_err(math)?;
                result["points_b"] = json!(other_points);
                result["same_adc"] = json!(same_adc(&b, &other, tol).map_err(math)?);
                inputs["symbol_b"] = json!(other_spec);
            }
            emit(cli, config, "adc", inputs, result)
        }
        Command::Verify => {
            let spec = required_symbol(cli)?;
            let b = spec.parse_rational(tol)?;
            let mut summaries = Vec::new();
            for &n in &config.trunc {
                let model = build_defect_model(&b, n, tol).map_err(math)?;
                let mut rng = ChaCha8Rng::seed_from_u64(config.grid.random_seed);
                let omega = DiskPoint::from_re_im(0.3, 0.2).unwrap();
                summaries.push(model.summary(&mut rng, omega).map_err(math)?);
            }
            emit(cli, config, "verify", json!({"symbol": spec}), serde_json::to_value(&summaries)?)
        }
        Command::Example5 => {
            let result = run_example5(config, tol)?;
            emit(cli, config, "example5", json!({}), result)
        }
    }
}

fn math(e: drk_core::Error) -> anyhow::Error {
    anyhow!("computation failed: {e}")
}

fn required_symbol(cli: &Cli) -> anyhow::Result<SymbolSpec> {
    let arg = cli.symbol.as_deref().ok_or_else(|| anyhow!("missing --symbol"))?;
    SymbolSpec::from_arg(arg)
}

fn required_pair(cli: &Cli) -> anyhow::Result<(SymbolSpec, SymbolSpec)> {
    let b = cli.symbol_b.as_deref().ok_or_else(|| anyhow!("missing --symbol-b"))?;
    Ok((required_symbol(cli)?, SymbolSpec::from_arg(b)?))
}

fn which_name(which: Which) -> &'static str {
    match which {
        Which::X => "X",
        Which::S => "S",
    }
}

fn extreme_json(verdict: &ExtremeVerdict, certainty: Certainty) -> Value {
    match verdict {
        ExtremeVerdict::Extreme => json!({
            "verdict": "extreme",
            "integral": null,
            "certainty": certainty,
        }),
        ExtremeVerdict::NonExtreme { value } => json!({
            "verdict": "non_extreme",
            "integral": value,
            "certainty": certainty,
        }),
    }
}

struct CurvatureRow {
    omega: DiskPoint,
    closed_form: f64,
    finite_difference: f64,
    abs_err: f64,
    ill_conditioned: bool,
}

impl From<(CurvatureSample, CurvatureSample)> for CurvatureRow {
    fn from((closed, fd): (CurvatureSample, CurvatureSample)) -> Self {
        CurvatureRow {
            omega: closed.omega,
            closed_form: closed.value,
            finite_difference: fd.value,
            abs_err: (closed.value - fd.value).abs(),
            ill_conditioned: closed.omega.is_near_boundary(),
        }
    }
}

fn curvature_rows(
    b: &RationalSymbol,
    which: Which,
    config: &RunConfig,
    tol: &Tolerances,
) -> anyhow::Result<Vec<CurvatureRow>> {
    let h = config.fd_step;
    let table = match which {
        Which::X => {
            let pair = mate(b, tol).map_err(math)?;
            curvature_table(CurvatureData::X(&pair), &config.grid, h, tol)
        }
        Which::S => curvature_table(CurvatureData::S(b), &config.grid, h, tol),
    };
    Ok(table.into_iter().map(CurvatureRow::from).collect())
}

fn write_curvature_csv(cli: &Cli, rows: &[CurvatureRow]) -> anyhow::Result<ExitCode> {
    let target: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(std::fs::File::create(path).context("creating --out file")?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(target);
    w.write_record(["omega_re", "omega_im", "closed_form", "finite_difference", "abs_err"])?;
    for r in rows {
        w.write_record([
            r.omega.value().re.to_string(),
            r.omega.value().im.to_string(),
            r.closed_form.to_string(),
            r.finite_difference.to_string(),
            r.abs_err.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn emit(
    cli: &Cli,
    config: &RunConfig,
    command: &str,
    inputs: Value,
    result: Value,
) -> anyhow::Result<ExitCode> {
    let report = json!({
        "command": command,
        "config": config,
        "inputs": inputs,
        "result": result,
    });
    let text = serde_json::to_string_pretty(&report)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text + "\n").context("writing --out file")?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_example5(config: &RunConfig, tol: &Tolerances) -> anyhow::Result<Value> {
    let b1 = RationalSymbol::from_real(&[0.5, 0.5], &[1.0], tol).map_err(math)?;
    let b2 = RationalSymbol::from_real(&[0.5, -0.5], &[1.0], tol).map_err(math)?;
    let mut claims: Vec<(String, bool)> = Vec::new();

    let non_extreme = |b: &RationalSymbol| -> anyhow::Result<bool> {
        Ok(matches!(extreme_test(b, tol).map_err(math)?.0, ExtremeVerdict::NonExtreme { .. }))
    };
    claims.push(("b1 and b2 are non-extreme".into(), non_extreme(&b1)? && non_extreme(&b2)?));

    let pair1 = mate(&b1, tol).map_err(math)?;
    let pair2 = mate(&b2, tol).map_err(math)?;
    let mate_gap = |pair: &PythagoreanPair, want: &[f64]| -> f64 {
        let a = pair.a.canonical();
        want.iter()
            .enumerate()
            .map(|(k, w)| (a.num().coeff(k) - drk_core::C64::new(*w, 0.0)).norm())
            .fold(0.0, f64::max)
    };
    claims.push((
        "(b1, b2) and (b2, b1) are pythagorean pairs".into(),
        mate_gap(&pair1, &[0.5, -0.5]) <= 1e-10 && mate_gap(&pair2, &[0.5, 0.5]) <= 1e-10,
    ));

    let x_report = decide_equiv_x(&pair1, &pair2, &config.grid, tol.tol_equiv, tol).map_err(math)?;
    claims.push((
        "X_b1 and X_b2 unitarily equivalent".into(),
        x_report.verdict == EquivalenceVerdict::Equivalent,
    ));

    let s_report = decide_equiv_s(&b1, &b2, &config.grid, tol.tol_equiv, tol).map_err(math)?;
    claims.push((
        "S_b1 and S_b2 not unitarily equivalent".into(),
        s_report.verdict == EquivalenceVerdict::NotEquivalent,
    ));

    let space = space_equality_necessary(&b1, &b2, tol).map_err(math)?;
    claims.push(("H(b1) and H(b2) differ".into(), matches!(space, SpaceEquality::NotEqual(_))));

    let adc1 = adc_points(&b1, tol).map_err(math)?;
    let adc2 = adc_points(&b2, tol).map_err(math)?;
    let adc_ok = adc1.len() == 1
        && adc2.len() == 1
        && (adc1[0].zeta - drk_core::C64::new(1.0, 0.0)).norm() <= 1e-8
        && (adc2[0].zeta - drk_core::C64::new(-1.0, 0.0)).norm() <= 1e-8
        && (adc1[0].c - 0.5).abs() <= 1e-8
        && (adc2[0].c - 0.5).abs() <= 1e-8;
    claims.push((
        "angular derivatives only at 1 (b1) and -1 (b2), both with c = 1/2".into(),
        adc_ok,
    ));

    for (claim, pass) in &claims {
        eprintln!("{} {claim}", if *pass { "PASS" } else { "FAIL" });
    }
    let all_pass = claims.iter().all(|(_, p)| *p);

    Ok(json!({
        "equiv_X": verdict_name(&x_report),
        "equiv_S": verdict_name(&s_report),
        "space_equal": match space {
            SpaceEquality::MayBeEqual => "may_be_equal",
            SpaceEquality::NotEqual(_) => "not_equal",
        },
        "adc": {
            "b1": adc1.iter().map(|p| [p.zeta.re, p.zeta.im]).collect::<Vec<_>>(),
            "b2": adc2.iter().map(|p| [p.zeta.re, p.zeta.im]).collect::<Vec<_>>(),
            "c": { "b1": adc1.iter().map(|p| p.c).collect::<Vec<_>>(),
                   "b2": adc2.iter().map(|p| p.c).collect::<Vec<_>>() },
        },
        "claims": claims.iter().map(|(c, p)| json!({"claim": c, "pass": p})).collect::<Vec<_>>(),
        "all_pass": all_pass,
    }))
}

fn verdict_name(report: &EquivalenceReport) -> &'static str {
    match report.verdict {
        EquivalenceVerdict::Equivalent => "equivalent",
        EquivalenceVerdict::NotEquivalent => "not_equivalent",
        EquivalenceVerdict::Inconclusive => "inconclusive",
    }
}
