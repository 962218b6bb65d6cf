//! Command-line front end. Parsing is done by clap; [`run`] turns a parsed
//! command into named outputs without touching the filesystem.

use crate::conditional::{conditional_state, matrix_elements_csv, PROBABILITY_FLOOR};
use crate::error::Error;
use crate::fock::{
    coherent_state, moments, number_state, squeezed_state, thermal_state, FockOperator, TruncationConfig,
    TwinBeamParams, DEFAULT_TAIL_TOLERANCE,
};
use crate::oracles::{self, HomodyneStats};
use crate::phase_space::{wigner, wigner_map, PhaseGrid};
use crate::povm::{homodyne_povm, onoff_povm};
use crate::teleport::{self, ChannelParams};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TWINBEAM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "twinbeam", version, about = "Conditional measurements on twin-beams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file (a directory for reproduce-figure).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Fock truncation; by default chosen from N with tail 1e-10.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conditional state after an on/off click.
    Onoff {
        #[arg(long = "N")]
        photons: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
    },
    /// Conditional state after a homodyne outcome x.
    Homodyne {
        #[arg(long = "N")]
        photons: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Largest photon number in the matrix output.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Binned-homodyne squeezing across outcomes.
    SweepSqueezing {
        #[arg(long = "N")]
        photons: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        delta: f64,
        /// Outcomes span [-x-max, x-max]; default covers the outcome density.
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 241)]
        points: usize,
    },
    /// Teleportation channel parameters and output state.
    Teleport {
        #[arg(long = "N")]
        photons: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma_t: f64,
        #[arg(long = "M", default_value_t = 0.0)]
        thermal: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        /// Input state, see `wigner-map --state`.
        #[arg(long, default_value = "coherent:1,0")]
        input: String,
        /// Also run the full conditioning pipeline and report its distance to the channel.
        #[arg(long)]
        pipeline: bool,
    },
    /// Wigner function on a square grid.
    WignerMap {
        /// vacuum | fock:n | coherent:re,im | squeezed:r | thermal:n | click:N,eta | homodyne:N,eta,x
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 4.0)]
        half: f64,
        #[arg(long, default_value_t = 81)]
        points: usize,
    },
    /// Closed-form quantities over parameter grids.
    Oracle {
        #[arg(value_enum)]
        name: OracleName,
        /// Comma-separated photon numbers.
        #[arg(long = "N", default_value = "1")]
        photons: String,
        /// Efficiency grid `start:stop:count` or comma list.
        #[arg(long, default_value = "1")]
        eta_grid: String,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        s: f64,
    },
    /// Datasets behind figure 2, 3 or 4.
    ReproduceFigure {
        #[arg(value_parser = ["2", "3", "4"])]
        fig: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleName {
    G,
    Fano,
    WignerOrigin,
    SWignerOrigin,
    ClickProbability,
    XDelta,
    QDelta,
    Fidelity,
}

/// Failure classes with their exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::OutOfRange { .. } | Error::DimensionMismatch { .. } | Error::InvalidOperator { .. } => {
                CliError::Validation(e.to_string())
            }
            Error::Truncation { .. } | Error::ProbabilityUnderflow { .. } | Error::Convergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// One emitted dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub content: String,
}

/// Parameters, truncation and tolerances attached to every dataset.
#[derive(Debug, Clone)]
struct Provenance {
    command: &'static str,
    params: BTreeMap<&'static str, Value>,
    dim: Option<usize>,
}

impl Provenance {
    fn new(command: &'static str) -> Self {
        Self { command, params: BTreeMap::new(), dim: None }
    }

    fn param(mut self, k: &'static str, v: impl Into<Value>) -> Self {
        self.params.insert(k, v.into());
        self
    }

    fn dim(mut self, d: usize) -> Self {
        self.dim = Some(d);
        self
    }

    fn json(&self) -> Value {
        json!({
            "package": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "params": self.params,
            "dim": self.dim,
            "tail_tolerance": DEFAULT_TAIL_TOLERANCE,
            "probability_floor": PROBABILITY_FLOOR,
            "quadrature_tolerance": teleport::QUADRATURE_TOLERANCE,
        })
    }

    fn csv_header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# command: {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "# {k}: {v}");
        }
        if let Some(d) = self.dim {
            let _ = writeln!(s, "# dim: {d}");
        }
        let _ = writeln!(s, "# tail_tolerance: {DEFAULT_TAIL_TOLERANCE:e}");
        s
    }

    fn emit_json(&self, name: String, result: Value) -> Output {
        let doc = json!({ "provenance": self.json(), "result": result });
        Output {
            name,
            content: serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
        }
    }

    fn emit_csv(&self, name: String, body: &str) -> Output {
        Output {
            name,
            content: self.csv_header() + body,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn parse_f64(s: &str, what: &str) -> CliResult<f64> {
    s.trim().parse().map_err(|_| invalid(format!("{what}: cannot parse '{s}' as a number")))
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(|v| parse_f64(v, what)).collect()
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma list.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (parse_f64(a, "grid start")?, parse_f64(b, "grid stop")?);
            let n: usize = n.trim().parse().map_err(|_| invalid(format!("grid count '{n}'")))?;
            if n < 2 {
                return Err(invalid("grid count must be at least 2"));
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        [_] => parse_list(s, "grid"),
        _ => Err(invalid(format!("grid '{s}' is neither start:stop:count nor a list"))),
    }
}

fn twb_trunc(twb: &TwinBeamParams, dim: Option<usize>) -> CliResult<TruncationConfig> {
    Ok(match dim {
        Some(d) => TruncationConfig::new(d, DEFAULT_TAIL_TOLERANCE)?,
        None => TruncationConfig::for_twb(twb, DEFAULT_TAIL_TOLERANCE)?,
    })
}

/// Parses a state spec into a density matrix.
pub fn parse_state(spec: &str, dim: Option<usize>) -> CliResult<FockOperator> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = if args.is_empty() { vec![] } else { parse_list(args, "state argument")? };
    let want = |n: usize| -> CliResult<()> {
        if nums.len() == n {
            Ok(())
        } else {
            Err(invalid(format!("state '{kind}' takes {n} argument(s), got {}", nums.len())))
        }
    };
    let fixed = |d: usize| TruncationConfig::new(dim.unwrap_or(d), DEFAULT_TAIL_TOLERANCE);
    let state = match kind {
        "vacuum" => {
            want(0)?;
            number_state(0, &fixed(8)?)?
        }
        "fock" => {
            want(1)?;
            if nums[0] < 0.0 || nums[0].fract() != 0.0 {
                return Err(invalid("fock level must be a non-negative integer"));
            }
            let n = nums[0] as usize;
            number_state(n, &fixed(n + 8)?)?
        }
        "coherent" => {
            want(2)?;
            let z = Complex64::new(nums[0], nums[1]);
            let d = (z.norm_sqr() + 12.0 * z.norm() + 40.0).ceil() as usize;
            coherent_state(z, &fixed(d)?)?
        }
        "squeezed" => {
            want(1)?;
            let d = (40.0 * (2.0 * nums[0].abs()).exp()).ceil() as usize + 20;
            squeezed_state(Complex64::new(0.0, 0.0), Complex64::new(nums[0], 0.0), &fixed(d)?)?
        }
        "thermal" => {
            want(1)?;
            let n = nums[0].max(0.0);
            let d = ((23.0 * (1.0 + n)).ceil() as usize).max(8);
            thermal_state(nums[0], &fixed(d)?)?
        }
        "click" => {
            want(2)?;
            let twb = TwinBeamParams::from_photons(nums[0])?;
            let (_, on) = onoff_povm(nums[1], &twb_trunc(&twb, dim)?)?;
            conditional_state(&twb, &on)?.state
        }
        "homodyne" => {
            want(3)?;
            let twb = TwinBeamParams::from_photons(nums[0])?;
            let el = homodyne_povm(nums[2], nums[1], &twb_trunc(&twb, dim)?)?;
            conditional_state(&twb, &el)?.state
        }
        other => return Err(invalid(format!("unknown state kind '{other}'"))),
    };
    Ok(state)
}

fn matrix_json(op: &FockOperator, max_n: usize) -> Value {
    let k = op.dim().min(max_n + 1);
    Value::from(
        (0..k)
            .map(|n| (0..k).map(|m| json!([op.get(n, m).re, op.get(n, m).im])).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

fn leading_block(op: &FockOperator, max_n: usize) -> FockOperator {
    op.resized(op.dim().min(max_n + 1))
}

fn homodyne_outputs(photons: f64, eta: f64, x: f64, max_n: usize, dim: Option<usize>) -> CliResult<(Provenance, Value, FockOperator)> {
    let twb = TwinBeamParams::from_photons(photons)?;
    let trunc = twb_trunc(&twb, dim)?;
    let el = homodyne_povm(x, eta, &trunc)?;
    let r = conditional_state(&twb, &el)?;
    let mo = moments(&r.state);
    let sq = oracles::conditional_squeezing(x, photons, eta)?;
    let stats = HomodyneStats::new(photons, eta)?;
    let prov = Provenance::new("homodyne")
        .param("N", photons)
        .param("eta", eta)
        .param("x", x)
        .param("max_n", max_n as u64)
        .dim(trunc.dim);
    let result = json!({
        "probability_density": r.probability,
        "probability_density_oracle": stats.density(x),
        "var_x": mo.quadrature_variance(0.0),
        "var_y": mo.quadrature_variance(std::f64::consts::FRAC_PI_2),
        "squeezing_oracle": sq,
        "mean_photons": mo.mean_photons,
        "matrix": matrix_json(&r.state, max_n),
    });
    Ok((prov, result, leading_block(&r.state, max_n)))
}

fn sweep_squeezing(photons: f64, eta: f64, delta: f64, x_max: Option<f64>, points: usize) -> CliResult<(Provenance, Value, String)> {
    if points < 2 {
        return Err(invalid("points must be at least 2"));
    }
    let stats = HomodyneStats::new(photons, eta)?;
    let summary = oracles::binned_squeezing(0.0, photons, eta, delta)?;
    let x_max = x_max.unwrap_or_else(|| crate::povm::homodyne_range(photons, eta));
    if !(x_max > 0.0) {
        return Err(invalid("x-max must be positive"));
    }
    let xs: Vec<f64> = (0..points).map(|i| -x_max + 2.0 * x_max * i as f64 / (points - 1) as f64).collect();
    let rows: Vec<(f64, f64, f64, f64, bool)> = xs
        .par_iter()
        .map(|&x| -> CliResult<_> {
            let b = oracles::binned_squeezing(x, photons, eta, delta)?;
            Ok((x, stats.density_binned(x, delta)?, b.var_x_delta, b.var_x_delta_exact, b.var_x_delta < 0.25))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let q_exact = oracles::squeezed_probability_exact(photons, eta, delta)?;
    let prov = Provenance::new("sweep-squeezing")
        .param("N", photons)
        .param("eta", eta)
        .param("delta", delta)
        .param("x_max", x_max)
        .param("points", points as u64);
    let result = json!({
        "x_delta": summary.x_delta,
        "q_delta": summary.q_delta,
        "q_delta_exact": q_exact,
        "g": summary.g,
        "rows": rows.iter().map(|r| json!({"x": r.0, "density": r.1, "var_x_delta": r.2, "var_x_delta_exact": r.3, "squeezed": r.4})).collect::<Vec<_>>(),
    });
    let mut csv = String::new();
    let fmt_opt = |v: Option<f64>| v.map_or("none".to_string(), |v| v.to_string());
    let _ = writeln!(csv, "# x_delta: {}", fmt_opt(summary.x_delta));
    let _ = writeln!(csv, "# q_delta: {}", summary.q_delta);
    let _ = writeln!(csv, "# q_delta_exact: {q_exact}");
    csv.push_str("x,density,var_x_delta,var_x_delta_exact,squeezed\n");
    for (x, p, v, ve, s) in &rows {
        let _ = writeln!(csv, "{x},{p:.17e},{v:.17e},{ve:.17e},{}", u8::from(*s));
    }
    Ok((prov, result, csv))
}

fn oracle_value(name: OracleName, n: f64, eta: f64, delta: f64, s: f64) -> CliResult<Option<f64>> {
    Ok(match name {
        OracleName::G => (eta >= 0.5).then(|| oracles::squeezing_margin(eta, n)),
        OracleName::Fano => Some(oracles::onoff_fano(n, eta)?),
        OracleName::WignerOrigin => Some(oracles::onoff_wigner_origin(n, eta)?),
        OracleName::SWignerOrigin => Some(oracles::s_wigner_origin_onoff(n, eta, s)?),
        OracleName::ClickProbability => Some(oracles::click_probability(n, eta)?),
        OracleName::XDelta => oracles::binned_squeezing(0.0, n, eta, delta)?.x_delta,
        OracleName::QDelta => Some(oracles::binned_squeezing(0.0, n, eta, delta)?.q_delta),
        OracleName::Fidelity => Some(teleport::coherent_fidelity(&ChannelParams::new(n, 0.0, 0.0, eta)?)),
    })
}

fn oracle_table(name: OracleName, ns: &[f64], etas: &[f64], delta: f64, s: f64) -> CliResult<Vec<(f64, f64, Option<f64>)>> {
    let cells: Vec<(f64, f64)> = ns.iter().flat_map(|&n| etas.iter().map(move |&e| (n, e))).collect();
    cells
        .par_iter()
        .map(|&(n, e)| Ok((n, e, oracle_value(name, n, e, delta, s)?)))
        .collect()
}

fn oracle_label(name: OracleName) -> String {
    name.to_possible_value().expect("not skipped").get_name().to_string()
}

/// Figure datasets with a manifest.
fn reproduce(fig: &str) -> CliResult<Vec<Output>> {
    let mut out = Vec::new();
    let mut manifest = BTreeMap::new();
    match fig {
        "2" => {
            let (photons, max_n) = (1.0, 6);
            let mut files = Vec::new();
            for x in [0.0, 0.6] {
                for eta in [1.0, 0.8, 0.4] {
                    let (prov, _, block) = homodyne_outputs(photons, eta, x, max_n, None)?;
                    let name = format!("fig2_x{x:.1}_eta{eta:.1}.csv");
                    out.push(prov.emit_csv(name.clone(), &matrix_elements_csv(&block)));
                    files.push(name);
                }
            }
            manifest.insert("figure", json!(2));
            manifest.insert("params", json!({"N": photons, "max_n": max_n, "x": [0.0, 0.6], "eta": [1.0, 0.8, 0.4]}));
            manifest.insert("files", json!(files));
        }
        "3" => {
            let (photons, eta, delta) = (20.0, 0.7, 0.25);
            let (prov, result, csv) = sweep_squeezing(photons, eta, delta, None, 241)?;
            out.push(prov.emit_csv("fig3_density.csv".into(), &csv));
            manifest.insert("figure", json!(3));
            manifest.insert("params", json!({"N": photons, "eta": eta, "delta": delta}));
            manifest.insert("x_delta", result["x_delta"].clone());
            manifest.insert("q_delta", result["q_delta"].clone());
            manifest.insert("q_delta_exact", result["q_delta_exact"].clone());
            manifest.insert("files", json!(["fig3_density.csv"]));
        }
        "4" => {
            let ns = [1.0, 2.0, 5.0, 10.0];
            let etas = parse_grid("0.5:1.0:51")?;
            let table = oracle_table(OracleName::G, &ns, &etas, 0.25, 0.0)?;
            let mut csv = String::from("eta,N=1,N=2,N=5,N=10\n");
            for (i, eta) in etas.iter().enumerate() {
                let _ = write!(csv, "{eta}");
                for j in 0..ns.len() {
                    let v = table[j * etas.len() + i].2.unwrap_or(f64::NAN);
                    let _ = write!(csv, ",{v:.17e}");
                }
                csv.push('\n');
            }
            let prov = Provenance::new("reproduce-figure").param("figure", 4).param("N", json!(ns)).param("eta_grid", "0.5:1.0:51");
            out.push(prov.emit_csv("fig4_g.csv".into(), &csv));
            manifest.insert("figure", json!(4));
            manifest.insert("params", json!({"N": ns, "eta_grid": "0.5:1.0:51"}));
            manifest.insert("files", json!(["fig4_g.csv"]));
        }
        other => return Err(invalid(format!("unknown figure '{other}'"))),
    }
    let prov = Provenance::new("reproduce-figure").param("figure", fig);
    out.push(prov.emit_json(format!("fig{fig}_manifest.json"), json!(manifest)));
    Ok(out)
}

/// Executes a parsed command. Every output is a pure function of the command.
pub fn run(cli: &Cli) -> CliResult<Vec<Output>> {
    let fmt = cli.format;
    let single = |name: &str, prov: Provenance, result: Value, csv: String| -> Vec<Output> {
        let file = format!("{name}.{}", fmt.ext());
        vec![match fmt {
            Format::Json => prov.emit_json(file, result),
            Format::Csv => prov.emit_csv(file, &csv),
        }]
    };
    match &cli.command {
        Command::Onoff { photons, eta } => {
            let twb = TwinBeamParams::from_photons(*photons)?;
            let trunc = twb_trunc(&twb, cli.dim)?;
            let (_, on) = onoff_povm(*eta, &trunc)?;
            let r = conditional_state(&twb, &on)?;
            let mo = moments(&r.state);
            let prov = Provenance::new("onoff").param("N", *photons).param("eta", *eta).dim(trunc.dim);
            let result = json!({
                "probability": r.probability,
                "probability_oracle": oracles::click_probability(*photons, *eta)?,
                "mean_photons": mo.mean_photons,
                "fano": mo.fano(),
                "fano_oracle": oracles::onoff_fano(*photons, *eta)?,
                "wigner_origin": wigner(&r.state, Complex64::new(0.0, 0.0)),
                "wigner_origin_oracle": oracles::onoff_wigner_origin(*photons, *eta)?,
            });
            Ok(single("onoff", prov, result, matrix_elements_csv(&r.state)))
        }
        Command::Homodyne { photons, eta, x, max_n } => {
            let (prov, result, block) = homodyne_outputs(*photons, *eta, *x, *max_n, cli.dim)?;
            Ok(single("homodyne", prov, result, matrix_elements_csv(&block)))
        }
        Command::SweepSqueezing { photons, eta, delta, x_max, points } => {
            let (prov, result, csv) = sweep_squeezing(*photons, *eta, *delta, *x_max, *points)?;
            Ok(single("sweep_squeezing", prov, result, csv))
        }
        Command::Teleport { photons, gamma_t, thermal, eta, input, pipeline } => {
            let p = ChannelParams::new(*photons, *gamma_t, *thermal, *eta)?;
            let k = teleport::effective_k(&p);
            let bound = teleport::nonlocality_bound(&p);
            let s = parse_state(input, None)?;
            let out_dim = cli.dim.unwrap_or(((s.dim() as f64) + 25.0 * (1.0 + k)).ceil() as usize);
            let trunc = TruncationConfig::new(out_dim, DEFAULT_TAIL_TOLERANCE)?;
            let sigma = teleport::teleport_state(&s, k, &trunc)?;
            let mut result = json!({
                "K": k,
                "K0": p.k0(),
                "F": teleport::coherent_fidelity(&p),
                "bound_satisfied": bound.satisfied,
                "min_photons_for_bound": teleport::min_photons_for_nonlocality(*gamma_t, *thermal, *eta),
                "K_green_function": teleport::green_function_k(&p),
                "output_trace": sigma.trace(),
                "output_mean_photons": moments(&sigma).mean_photons,
            });
            if *pipeline {
                let via = teleport::teleport_via_conditioning(&s, &p, &trunc)?;
                result["pipeline_trace_distance"] = json!(via.trace_distance(&sigma)?);
            }
            let prov = Provenance::new("teleport")
                .param("N", *photons)
                .param("gamma_t", *gamma_t)
                .param("M", *thermal)
                .param("eta", *eta)
                .param("input", input.as_str())
                .dim(out_dim);
            Ok(single("teleport", prov, result, matrix_elements_csv(&sigma)))
        }
        Command::WignerMap { state, half, points } => {
            let s = parse_state(state, cli.dim)?;
            let grid = PhaseGrid::square(*half, *points)?;
            let map = wigner_map(&s, &grid)?;
            let prov = Provenance::new("wigner-map")
                .param("state", state.as_str())
                .param("half", *half)
                .param("points", *points as u64)
                .dim(s.dim());
            let result = json!({
                "integral": map.integral(),
                "min": map.values.iter().map(|v| v.2).fold(f64::INFINITY, f64::min),
                "values": map.values.iter().map(|v| json!([v.0, v.1, v.2])).collect::<Vec<_>>(),
            });
            Ok(single("wigner_map", prov, result, map.to_csv()))
        }
        Command::Oracle { name, photons, eta_grid, delta, s } => {
            let ns = parse_list(photons, "N")?;
            let etas = parse_grid(eta_grid)?;
            let table = oracle_table(*name, &ns, &etas, *delta, *s)?;
            let label = oracle_label(*name);
            let prov = Provenance::new("oracle")
                .param("name", label.as_str())
                .param("N", json!(ns))
                .param("eta_grid", eta_grid.as_str())
                .param("delta", *delta)
                .param("s", *s);
            let mut csv = format!("N,eta,{label}\n");
            for (n, e, v) in &table {
                let v = v.map_or("nan".to_string(), |v| format!("{v:.17e}"));
                let _ = writeln!(csv, "{n},{e},{v}");
            }
            let result = json!({
                "name": label,
                "rows": table.iter().map(|(n, e, v)| json!({"N": n, "eta": e, "value": v})).collect::<Vec<_>>(),
            });
            Ok(single(&format!("oracle_{label}"), prov, result, csv))
        }
        Command::ReproduceFigure { fig } => reproduce(fig),
    }
}

/// Where outputs go: `--out`, else the directory in [`OUT_DIR_ENV`], else
/// stdout (`None`). For multi-file commands the target is always a directory.
pub fn write_outputs(cli: &Cli, outputs: &[Output]) -> CliResult<Option<Vec<PathBuf>>> {
    let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let multi = matches!(cli.command, Command::ReproduceFigure { .. });
    let dir_target = |dir: PathBuf| -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(&dir)?;
        outputs
            .iter()
            .map(|o| {
                let p = dir.join(&o.name);
                std::fs::write(&p, &o.content)?;
                Ok(p)
            })
            .collect()
    };
    match (&cli.out, env_dir) {
        (Some(dir), _) if multi => dir_target(dir.clone()).map(Some),
        (Some(file), _) => {
            if let Some(parent) = file.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(file, &outputs[0].content)?;
            Ok(Some(vec![file.clone()]))
        }
        (None, Some(dir)) => dir_target(dir).map(Some),
        (None, None) if multi => dir_target(PathBuf::from(".")).map(Some),
        (None, None) => Ok(None),
    }
}
