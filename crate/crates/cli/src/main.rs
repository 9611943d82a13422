#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod settings;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Checked, Figure};
use error::CliError;
use settings::{Format, Preset, Scale, Settings, SpectrumKind, WeightsKind};
use table::Table;

#[derive(Debug, Parser)]
#[command(name = "dicke-engine", version, about = "Collective power boost of a driven two-level thermal machine")]
struct Cli {
    /// JSON file of settings; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps (0: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    q_max: Option<u32>,
    /// Floquet truncation tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override any setting by name.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved settings as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct MachineArgs {
    #[arg(long)]
    n_atoms: Option<u64>,
    #[arg(long)]
    omega0: Option<f64>,
    /// Drive frequency Ω.
    #[arg(long)]
    drive: Option<f64>,
    /// Modulation amplitude g.
    #[arg(long)]
    depth: Option<f64>,
    #[arg(long)]
    beta_cold: Option<f64>,
    #[arg(long)]
    beta_hot: Option<f64>,
    #[arg(long)]
    coupling_cold: Option<f64>,
    #[arg(long)]
    coupling_hot: Option<f64>,
    #[arg(long, value_enum)]
    spectrum: Option<SpectrumKind>,
    #[arg(long, value_enum)]
    weights: Option<WeightsKind>,
    /// Two-column CSV (t, ω(t)) over one period.
    #[arg(long)]
    modulation_table: Option<PathBuf>,
    /// Two-column CSV (ω/ω₀, G) for the cold bath.
    #[arg(long)]
    cold_spectrum_table: Option<PathBuf>,
    #[arg(long)]
    hot_spectrum_table: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
struct SweepArgs {
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    x_h_min: Option<f64>,
    #[arg(long)]
    x_h_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Comma-separated atom numbers.
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<u64>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Total-spin content of N atoms.
    Decompose { n_atoms: Option<u64> },
    /// Sideband weights P(q) of the modulation.
    PqWeights {
        #[command(flatten)]
        machine: MachineArgs,
    },
    /// Sideband rates and the effective inverse temperature.
    BetaEff {
        #[command(flatten)]
        machine: MachineArgs,
    },
    /// Closed-form steady-state currents.
    Currents {
        #[command(flatten)]
        machine: MachineArgs,
        /// e.g. "3/2:0.5,1/2:0.5"
        #[arg(long)]
        spin_weights: Option<String>,
    },
    /// Collective over independent power on an (N, x_eff) grid.
    Boost {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Reference sweeps fig3 to fig7.
    Figure {
        #[arg(value_enum)]
        which: Figure,
        #[command(flatten)]
        machine: MachineArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Brute-force master equation against the closed form.
    OracleCompare {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long)]
        initial_state: Option<String>,
    },
    /// Dephased collective machine against N independent atoms.
    Dephasing {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long)]
        gamma_d: Option<f64>,
        #[arg(long)]
        initial_state: Option<String>,
    },
    /// Superradiant decay of the fully inverted state.
    Transient {
        #[arg(long)]
        n_atoms: Option<u64>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        sample_every: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Decompose { .. } => "decompose".into(),
            Command::PqWeights { .. } => "pq-weights".into(),
            Command::BetaEff { .. } => "beta-eff".into(),
            Command::Currents { .. } => "currents".into(),
            Command::Boost { .. } => "boost".into(),
            Command::Figure { which, .. } => format!("figure {}", format!("{which:?}").to_lowercase()),
            Command::OracleCompare { .. } => "oracle-compare".into(),
            Command::Dephasing { .. } => "dephasing".into(),
            Command::Transient { .. } => "transient".into(),
        }
    }

    fn preset(&self) -> Preset {
        match self {
            Command::Figure { which, .. } => which.preset(),
            Command::Transient { .. } => Preset {
                n_atoms: 6,
                ..Preset::default()
            },
            _ => Preset::default(),
        }
    }
}

fn apply<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn apply_opt<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

impl MachineArgs {
    fn apply(self, s: &mut Settings) {
        apply_opt(&mut s.n_atoms, self.n_atoms);
        apply_opt(&mut s.omega0, self.omega0);
        apply_opt(&mut s.drive, self.drive);
        apply_opt(&mut s.depth, self.depth);
        apply_opt(&mut s.beta_cold, self.beta_cold);
        apply_opt(&mut s.beta_hot, self.beta_hot);
        apply_opt(&mut s.coupling_cold, self.coupling_cold);
        apply_opt(&mut s.coupling_hot, self.coupling_hot);
        apply(&mut s.spectrum, self.spectrum);
        apply(&mut s.weights, self.weights);
        apply_opt(&mut s.modulation_table, self.modulation_table);
        apply_opt(&mut s.cold_spectrum_table, self.cold_spectrum_table);
        apply_opt(&mut s.hot_spectrum_table, self.hot_spectrum_table);
    }
}

impl SweepArgs {
    fn apply(self, s: &mut Settings) {
        apply_opt(&mut s.x_min, self.x_min);
        apply_opt(&mut s.x_max, self.x_max);
        apply(&mut s.x_h_min, self.x_h_min);
        apply_opt(&mut s.x_h_max, self.x_h_max);
        apply(&mut s.points, self.points);
        apply_opt(&mut s.scale, self.scale);
        apply_opt(&mut s.n_values, self.n_values);
    }
}

fn resolve(cli: &mut Cli) -> Result<Settings, CliError> {
    let mut s = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    for assignment in &cli.set {
        s.set(assignment)?;
    }
    apply(&mut s.format, cli.format);
    apply(&mut s.jobs, cli.jobs);
    apply(&mut s.q_max, cli.q_max);
    apply(&mut s.tol, cli.tol);
    let preset = cli.command.preset();
    match &mut cli.command {
        Command::Decompose { n_atoms } => apply_opt(&mut s.n_atoms, n_atoms.take()),
        Command::PqWeights { machine } | Command::BetaEff { machine } => std::mem::take(machine).apply(&mut s),
        Command::Currents { machine, spin_weights } => {
            std::mem::take(machine).apply(&mut s);
            apply_opt(&mut s.spin_weights, spin_weights.take());
        }
        Command::Boost { sweep } => std::mem::take(sweep).apply(&mut s),
        Command::Figure { machine, sweep, .. } => {
            std::mem::take(machine).apply(&mut s);
            std::mem::take(sweep).apply(&mut s);
        }
        Command::OracleCompare { machine, initial_state } => {
            std::mem::take(machine).apply(&mut s);
            apply(&mut s.initial_state, initial_state.take());
        }
        Command::Dephasing {
            machine,
            gamma_d,
            initial_state,
        } => {
            std::mem::take(machine).apply(&mut s);
            apply(&mut s.gamma_d, *gamma_d);
            apply(&mut s.initial_state, initial_state.take());
        }
        Command::Transient {
            n_atoms,
            rate,
            dt,
            t_final,
            sample_every,
        } => {
            apply_opt(&mut s.n_atoms, *n_atoms);
            apply(&mut s.rate, *rate);
            apply(&mut s.dt, *dt);
            apply(&mut s.t_final, *t_final);
            apply(&mut s.sample_every, *sample_every);
        }
    }
    s.fill(&preset);
    Ok(s)
}

fn execute(command: &Command, s: &Settings) -> Result<Checked, CliError> {
    let plain = |t: Table| (t, None);
    Ok(match command {
        Command::Decompose { .. } => plain(commands::decompose_table(s.n())?),
        Command::PqWeights { .. } => plain(commands::pq_weights_table(s)?),
        Command::BetaEff { .. } => plain(commands::beta_eff_table(s)?),
        Command::Currents { .. } => plain(commands::currents_table(s)?),
        Command::Boost { .. } => plain(commands::boost_table(s)?),
        Command::Figure { which, .. } => plain(commands::figure_table(*which, s)?),
        Command::OracleCompare { .. } => commands::oracle_compare_table(s)?,
        Command::Dephasing { .. } => commands::dephasing_table(s)?,
        Command::Transient { .. } => plain(commands::transient_table(s)?),
    })
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(mut cli: Cli) -> Result<(), CliError> {
    let settings = resolve(&mut cli)?;
    if cli.print_config {
        let mut out = open_output(&cli.output)?;
        serde_json::to_writer_pretty(&mut out, &settings).map_err(std::io::Error::from)?;
        writeln!(out)?;
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let (mut table, failure) = pool.install(|| execute(&cli.command, &settings))?;

    let mut meta = vec![
        ("tool".to_string(), format!("dicke-engine {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), cli.command.name()),
    ];
    meta.extend(settings.echo());
    meta.append(&mut table.metadata);
    table.metadata = meta;

    let mut out = open_output(&cli.output)?;
    table.write(&mut out, settings.format)?;
    out.flush()?;
    match failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dicke-engine: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
