use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use nqkd::keyrate::{
    nqkd_channel_threshold, nqkd_gate_threshold, rate_depolarized, secret_fraction, threshold_qber,
    PartyCount, RateInput,
};
use nqkd::network::{compare_rates, distribute_ghz_via_router, entanglement_bound_check, NetworkModel};
use nqkd::noise::{NoiseConfig, Topology};
use nqkd::protocol::{run_protocol, BasisRule, ProtocolConfig, StateSource};

mod parse;

use parse::{Sweep, SweepVar};

#[derive(Parser)]
#[command(name = "nqkd", version, about = "Key rates, thresholds and simulations for GHZ-based conference key distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Key-rate curves over a parameter sweep, or one rate from measured error rates.
    Rates(RatesArgs),
    /// Threshold noise levels for a range of party counts.
    Thresholds(ThresholdArgs),
    /// Monte Carlo run of the protocol.
    Simulate(SimulateArgs),
    /// Compare the GHZ protocol with bipartite links on a network.
    Network(NetworkArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TopologyArg {
    Star,
    Router,
    Butterfly,
}

impl TopologyArg {
    fn gate_topology(self) -> Topology {
        match self {
            TopologyArg::Star => Topology::Star,
            TopologyArg::Router | TopologyArg::Butterfly => Topology::Router,
        }
    }

    fn network(self, n: usize) -> Result<NetworkModel> {
        Ok(match self {
            TopologyArg::Star => NetworkModel::star(n)?,
            TopologyArg::Router => NetworkModel::router(n)?,
            TopologyArg::Butterfly => {
                if n != 3 {
                    bail!("the butterfly network has exactly three parties, got N = {n}");
                }
                NetworkModel::butterfly()
            }
        })
    }
}

#[derive(Args)]
struct Output {
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct RatesArgs {
    /// Party counts, e.g. `2..8,inf`.
    #[arg(long, default_value = "2..8")]
    n: String,
    /// `var:start:stop:steps` with var one of Q, fG, fC, N.
    #[arg(long)]
    sweep: Option<String>,
    /// Fixed noise for an N sweep, e.g. `gate:0.05`.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long, value_enum, default_value_t = TopologyArg::Star)]
    topology: TopologyArg,
    /// Error rates as JSON (inline or a file path):
    /// {"n", "q_z", "q_x", "q_ab", "t_rep"}.
    #[arg(long, conflicts_with = "sweep")]
    input: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ThresholdKind {
    Qber,
    Gate,
    Channel,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_enum, default_value_t = ThresholdKind::Qber)]
    kind: ThresholdKind,
    #[arg(long, default_value = "2..17")]
    n: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BasisRuleArg {
    Independent,
    AliceRule,
}

#[derive(Args)]
struct SimulateArgs {
    /// Protocol configuration as JSON; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// QBER of a white-noise GHZ source.
    #[arg(long)]
    q: Option<f64>,
    /// Noise source instead of `--q`, e.g. `gate:0.02`.
    #[arg(long, conflicts_with = "q")]
    noise: Option<String>,
    #[arg(long, value_enum, default_value_t = TopologyArg::Star)]
    topology: TopologyArg,
    #[arg(long)]
    rounds: Option<u64>,
    #[arg(long)]
    p_p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    basis_rule: Option<BasisRuleArg>,
    #[arg(long)]
    privacy_amplification: bool,
    /// Write every round as a JSON line.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Summary file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NetworkArgs {
    #[arg(long, value_enum, default_value_t = TopologyArg::Router)]
    topology: TopologyArg,
    /// Network as JSON {nodes: [{id, role}], edges: [{from, to}]}; overrides `--topology`.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// `gate:VALUE` or `channel:VALUE`; perfect devices when omitted.
    #[arg(long)]
    noise: Option<String>,
    /// Noise sweep `fG:start:stop:steps` or `fC:...`.
    #[arg(long)]
    sweep: Option<String>,
    /// Add the router distribution and entanglement checks to the report.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    output: Output,
}

/// Nine significant digits, scientific notation.
fn fmt_f(x: f64) -> String {
    format!("{x:.8e}")
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Clone, Copy)]
enum Cell {
    Int(usize),
    Parties(PartyCount),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn text(self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Parties(p) => p.to_string(),
            Cell::Float(x) => fmt_f(x),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::Parties(p) => serde_json::to_value(p).expect("serialisable"),
            Cell::Float(x) => json!(x),
            Cell::Bool(b) => json!(b),
        }
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn write(&self, output: &Output) -> Result<()> {
        let mut out = open_out(output.out.as_deref())?;
        match output.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|c| c.text()))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.header
                                .iter()
                                .zip(row)
                                .map(|(h, c)| (h.to_string(), c.json()))
                                .collect(),
                        )
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut out, &rows)?;
                writeln!(out)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn read_json_arg(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}"))
    }
}

fn noise_with_value(noise: &NoiseConfig, v: f64) -> NoiseConfig {
    match *noise {
        NoiseConfig::Gate { topology, .. } => NoiseConfig::Gate { f_g: v, topology },
        NoiseConfig::Channel { topology, .. } => NoiseConfig::Channel { f_c: v, topology },
    }
}

fn noise_row(table: &mut Table, net: &NetworkModel, noise: &NoiseConfig) -> Result<()> {
    noise.validate()?;
    let c = compare_rates(net, Some(noise))?;
    table.rows.push(vec![
        Cell::Int(c.n),
        Cell::Float(noise.value()),
        Cell::Float(c.nqkd.r_inf),
        Cell::Float(c.nqkd.rate),
        Cell::Float(c.twoqkd.rate),
    ]);
    Ok(())
}

fn cmd_rates(args: &RatesArgs) -> Result<()> {
    if let Some(input) = &args.input {
        let input: RateInput = serde_json::from_str(&read_json_arg(input)?).context("invalid rate input")?;
        return write_json(args.output.out.as_deref(), &secret_fraction(&input)?);
    }
    let sweep: Sweep = args
        .sweep
        .as_deref()
        .ok_or_else(|| anyhow!("either --sweep or --input is required"))?
        .parse()?;
    let parties = parse::party_list(&args.n)?;
    let noise_header = ["N", "f", "r_inf", "R_nqkd", "R_2qkd"];
    let table = match sweep.var {
        SweepVar::Q => {
            let mut t = Table::new(&["N", "Q", "r_inf"]);
            for &p in &parties {
                for q in sweep.values() {
                    t.rows.push(vec![Cell::Parties(p), Cell::Float(q), Cell::Float(rate_depolarized(q, p)?)]);
                }
            }
            t
        }
        SweepVar::FG | SweepVar::FC => {
            let mut t = Table::new(&noise_header);
            let topology = args.topology.gate_topology();
            let base = if sweep.var == SweepVar::FG {
                NoiseConfig::Gate { f_g: 0.0, topology }
            } else {
                NoiseConfig::Channel { f_c: 0.0, topology }
            };
            for n in parse::finite_parties(&parties, 2)? {
                let net = args.topology.network(n)?;
                for f in sweep.values() {
                    noise_row(&mut t, &net, &noise_with_value(&base, f))?;
                }
            }
            t
        }
        SweepVar::N => {
            let noise = parse::noise(
                args.noise.as_deref().ok_or_else(|| anyhow!("an N sweep needs --noise"))?,
                args.topology.gate_topology(),
            )?;
            let mut t = Table::new(&noise_header);
            let mut ns: Vec<usize> = sweep.values().iter().map(|v| v.round() as usize).collect();
            ns.dedup();
            for n in ns {
                noise_row(&mut t, &args.topology.network(n)?, &noise)?;
            }
            t
        }
    };
    table.write(&args.output)
}

fn cmd_thresholds(args: &ThresholdArgs) -> Result<()> {
    let parties = parse::party_list(&args.n)?;
    let mut t = Table::new(&["N", "threshold"]);
    match args.kind {
        ThresholdKind::Qber => {
            for p in parties {
                t.rows.push(vec![Cell::Parties(p), Cell::Float(threshold_qber(p)?)]);
            }
        }
        ThresholdKind::Gate | ThresholdKind::Channel => {
            for n in parse::finite_parties(&parties, 3)? {
                let v = if args.kind == ThresholdKind::Gate {
                    nqkd_gate_threshold(n)?
                } else {
                    nqkd_channel_threshold(n)?
                };
                t.rows.push(vec![Cell::Int(n), Cell::Float(v)]);
            }
        }
    }
    t.write(&args.output)
}

fn simulate_config(args: &SimulateArgs) -> Result<ProtocolConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str::<ProtocolConfig>(&text).context("invalid protocol configuration")?
        }
        None => {
            let n = args.n.ok_or_else(|| anyhow!("--n is required without --config"))?;
            ProtocolConfig::new(n, 100_000, StateSource::Depolarized { qber: 0.0 }, 0)
        }
    };
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(q) = args.q {
        cfg.state = StateSource::Depolarized { qber: q };
    }
    if let Some(text) = &args.noise {
        cfg.state = match parse::noise(text, args.topology.gate_topology())? {
            NoiseConfig::Gate { f_g, topology } => StateSource::Gate { f_g, topology },
            NoiseConfig::Channel { f_c, .. } => StateSource::Channel { f_c },
        };
    }
    if let Some(l) = args.rounds {
        cfg.rounds = l;
    }
    if let Some(p) = args.p_p {
        cfg.p_p = p;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(rule) = args.basis_rule {
        cfg.basis_rule = match rule {
            BasisRuleArg::Independent => BasisRule::Independent,
            BasisRuleArg::AliceRule => BasisRule::AliceRule,
        };
    }
    if args.privacy_amplification {
        cfg.privacy_amplification = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = simulate_config(args)?;
    let mut transcript = match &args.transcript {
        Some(p) => Some(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => None,
    };
    let mut io_error = None;
    let summary = run_protocol(&cfg, |rec| {
        if let (Some(w), None) = (transcript.as_mut(), io_error.as_ref()) {
            let line = serde_json::to_string(rec).expect("records serialise");
            if let Err(e) = writeln!(w, "{line}") {
                io_error = Some(e);
            }
        }
    })?;
    if let Some(e) = io_error {
        return Err(e).context("cannot write the transcript");
    }
    if let Some(mut w) = transcript {
        w.flush()?;
    }
    let report = json!({
        "config": cfg,
        "summary": summary,
        "no_key": summary.key_bits == 0,
    });
    write_json(args.out.as_deref(), &report)
}

fn cmd_network(args: &NetworkArgs) -> Result<()> {
    let net = match &args.graph {
        Some(p) => NetworkModel::from_json(
            &std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?,
        )?,
        None => args.topology.network(args.n)?,
    };
    let topology = if net.has_router() {
        Topology::Router
    } else {
        Topology::Star
    };
    if let Some(text) = &args.sweep {
        let sweep: Sweep = text.parse()?;
        let base = match sweep.var {
            SweepVar::FG => NoiseConfig::Gate { f_g: 0.0, topology },
            SweepVar::FC => NoiseConfig::Channel { f_c: 0.0, topology },
            _ => bail!("network sweeps run over fG or fC"),
        };
        let mut t = Table::new(&["f", "R_nqkd", "R_2qkd", "advantage"]);
        for f in sweep.values() {
            let c = compare_rates(&net, Some(&noise_with_value(&base, f)))?;
            t.rows.push(vec![
                Cell::Float(f),
                Cell::Float(c.nqkd.rate),
                Cell::Float(c.twoqkd.rate),
                Cell::Bool(c.advantage),
            ]);
        }
        return t.write(&args.output);
    }
    let noise = args.noise.as_deref().map(|s| parse::noise(s, topology)).transpose()?;
    let comparison = compare_rates(&net, noise.as_ref())?;
    let mut report = serde_json::to_value(&comparison)?;
    if args.verify {
        let n = net.n_parties();
        let dist = distribute_ghz_via_router(n)?;
        report["router_distribution"] = json!({
            "branches": dist.branches,
            "coherent_fidelity": dist.coherent_fidelity,
        });
        report["entanglement_bound"] = serde_json::to_value(entanglement_bound_check(n)?)?;
    }
    if args.output.format == Format::Csv {
        let mut t = Table::new(&["N", "R_nqkd", "R_2qkd", "advantage"]);
        t.rows.push(vec![
            Cell::Int(comparison.n),
            Cell::Float(comparison.nqkd.rate),
            Cell::Float(comparison.twoqkd.rate),
            Cell::Bool(comparison.advantage),
        ]);
        return t.write(&args.output);
    }
    write_json(args.output.out.as_deref(), &report)
}

/// 3 for failures of the numerics, 2 for bad input or configuration.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numeric = err
        .chain()
        .any(|e| e.downcast_ref::<nqkd::Error>().is_some_and(nqkd::Error::is_numeric));
    if numeric {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Rates(a) => cmd_rates(a),
        Command::Thresholds(a) => cmd_thresholds(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Network(a) => cmd_network(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
