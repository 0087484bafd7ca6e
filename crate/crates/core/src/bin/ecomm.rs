//! `ecomm`: command-line front end for the electrocommunication lab.
//!
//! Subcommands map onto the library: `channel curve` evaluates the
//! received-voltage surface, `train` fits the neural demodulator, `ber
//! sweep` / `ber distance` run the Monte-Carlo experiments, and `link
//! budget` checks the transmit power. Exit codes: 0 success, 1 runtime
//! failure, 2 usage or configuration error.

use clap::{Args, Parser, Subcommand};
use ecomm_core::ber::{
    calibrate_noise_floor, distance_sweep, snr_sweep, transmit_power, voltage_curve,
    write_power_csv, write_voltage_csv, LinkTemplate, Method,
};
use ecomm_core::config::RunConfig;
use ecomm_core::field;
use ecomm_core::mlp::{generate_dataset, MlpError, MlpModel};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ecomm", version, about = "Underwater electric-field communication laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigOpts {
    /// Run configuration file (key = value sections); defaults apply when
    /// omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Channel physics tools.
    Channel {
        #[command(subcommand)]
        cmd: ChannelCmd,
    },
    /// Train the neural demodulator and write the model file.
    Train {
        #[command(flatten)]
        config: ConfigOpts,
        /// Where to write the trained model (default: <output dir>/model.ecmlp).
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Monte-Carlo bit-error-rate experiments.
    Ber {
        #[command(subcommand)]
        cmd: BerCmd,
    },
    /// Link-level budgets.
    Link {
        #[command(subcommand)]
        cmd: LinkCmd,
    },
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Received voltage over a distance x frequency grid (CSV).
    Curve {
        #[command(flatten)]
        config: ConfigOpts,
        #[arg(long, default_value_t = 3.0)]
        r_min: f64,
        #[arg(long, default_value_t = 30.0)]
        r_max: f64,
        #[arg(long, default_value_t = 1.0)]
        r_step: f64,
        /// Comma-separated frequencies in Hz.
        #[arg(long, default_value = "1000,10000,100000,1000000")]
        freqs: String,
        /// Output CSV (default: <output dir>/voltage_curve.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BerCmd {
    /// BER versus SNR for the selected demodulation methods.
    Sweep {
        #[command(flatten)]
        config: ConfigOpts,
        /// Trained model file (required when nn_fsk is among the methods).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Comma-separated methods: coherent_fsk, nn_fsk, coherent_ask.
        #[arg(long, default_value = "coherent_fsk,nn_fsk")]
        methods: String,
        /// SNR grid: comma list ("-4,0,4") or range "start:end:step".
        #[arg(long, default_value = "-20:10:2", allow_hyphen_values = true)]
        snr: String,
        /// Bits per grid point.
        #[arg(long, default_value_t = 10_000)]
        bits: usize,
        /// Output CSV (default: <output dir>/ber_snr.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Neural-demodulator BER versus link distance.
    Distance {
        #[command(flatten)]
        config: ConfigOpts,
        /// Trained model file.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Comma-separated distances in meters, ascending.
        #[arg(long, default_value = "5,10,15,20,25,30")]
        distances: String,
        /// Receiver noise floor in volts RMS, or "auto" to calibrate the
        /// floor so the realized SNR at 10 m is +2 dB.
        #[arg(long, default_value = "auto")]
        floor: String,
        /// Bits per grid point.
        #[arg(long, default_value_t = 10_000)]
        bits: usize,
        /// Output CSV (default: <output dir>/ber_distance.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LinkCmd {
    /// Transmit power vpp^2/(8*Rw) against the 0.1 W budget.
    Budget {
        /// Peak-to-peak transmit voltage, V.
        #[arg(long)]
        vpp: f64,
        /// Water resistance, ohms.
        #[arg(long)]
        rw: f64,
        /// Optional output CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    /// Bad flags or configuration: exit 2.
    Usage(String),
    /// Failure during the run: exit 1.
    Runtime(String),
}

impl From<ecomm_core::config::ConfigError> for CliError {
    fn from(e: ecomm_core::config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load_config(opts: &ConfigOpts) -> Result<Option<RunConfig>, CliError> {
    let cfg = match &opts.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if opts.dump_config {
        print!("{}", cfg.dump());
        return Ok(None);
    }
    Ok(Some(cfg))
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{flag}: `{tok}` is not a number")))
        })
        .collect()
}

/// Grid spec: either a comma list or an inclusive "start:end:step" range.
fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!("{flag}: range must be start:end:step")));
        }
        let nums = parse_f64_list(&parts.join(","), flag)?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || end < start {
            return Err(CliError::Usage(format!("{flag}: need step > 0 and end >= start")));
        }
        let count = ((end - start) / step).round() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    parse_f64_list(text, flag)
}

fn resolve_out(cfg: &RunConfig, explicit: &Option<PathBuf>, default_name: &str) -> Result<PathBuf, CliError> {
    let path = match explicit {
        Some(p) => p.clone(),
        None => cfg.output_dir.join(default_name),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(path)
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let file = std::fs::File::create(path)?;
    let mut writer = std::io::BufWriter::new(file);
    body(&mut writer)?;
    Ok(())
}

fn link_template(cfg: &RunConfig) -> LinkTemplate {
    LinkTemplate {
        medium: cfg.medium,
        geometry: cfg.geometry,
        carrier_ref_hz: cfg.carrier_ref_hz(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Channel { cmd } => match cmd {
            ChannelCmd::Curve {
                config,
                r_min,
                r_max,
                r_step,
                freqs,
                out,
            } => {
                let Some(cfg) = load_config(&config)? else {
                    return Ok(());
                };
                if r_step <= 0.0 {
                    return Err(CliError::Usage("--r-step must be positive".into()));
                }
                if !(r_min > 0.0 && r_max >= r_min) {
                    return Err(CliError::Usage("--r-min/--r-max must satisfy 0 < min <= max".into()));
                }
                let freqs = parse_f64_list(&freqs, "--freqs")?;
                let steps = ((r_max - r_min) / r_step).floor() as usize + 1;
                let r_grid: Vec<f64> = (0..steps).map(|i| r_min + r_step * i as f64).collect();

                for &f in &freqs {
                    let ratio = field::quasi_static_ratio(&cfg.medium, f)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                    if f > 0.0 {
                        let radius = field::near_field_radius(&cfg.medium, f)
                            .map_err(|e| CliError::Runtime(e.to_string()))?;
                        println!("f = {f} Hz: near-field radius {radius:.3} m, displacement/conduction ratio {ratio:.3e}");
                    }
                    if ratio >= field::QUASI_STATIC_LIMIT {
                        println!("warning: quasi-static model invalid at {f} Hz (ratio {ratio:.3})");
                    }
                }

                let points = voltage_curve(&r_grid, &freqs, &cfg.medium, &cfg.geometry)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                let path = resolve_out(&cfg, &out, "voltage_curve.csv")?;
                write_file(&path, |w| write_voltage_csv(&points, w))?;
                println!("wrote {} rows to {}", points.len(), path.display());
                Ok(())
            }
        },
        Command::Train { config, model_out } => {
            let Some(cfg) = load_config(&config)? else {
                return Ok(());
            };
            let dataset = generate_dataset(
                &cfg.modem,
                &cfg.train.snr_grid_db,
                cfg.train.symbols_per_snr,
                cfg.train.seed,
            )
            .map_err(|e| CliError::Runtime(e.to_string()))?;
            let mut model = MlpModel::init(cfg.train.seed);
            let history = model.train(&dataset, &cfg.train).map_err(|e| match e {
                MlpError::Diverged { epoch } => {
                    CliError::Runtime(format!("training diverged at epoch {epoch}"))
                }
                other => CliError::Runtime(other.to_string()),
            })?;

            let model_path = match model_out {
                Some(p) => {
                    if let Some(parent) = p.parent() {
                        if !parent.as_os_str().is_empty() {
                            std::fs::create_dir_all(parent)?;
                        }
                    }
                    p
                }
                None => resolve_out(&cfg, &None, "model.ecmlp")?,
            };
            model
                .save_to_path(&model_path)
                .map_err(|e| CliError::Runtime(e.to_string()))?;

            let loss_path = resolve_out(&cfg, &None, "loss.csv")?;
            write_file(&loss_path, |w| {
                writeln!(w, "epoch,mean_bce")?;
                for (epoch, loss) in history.iter().enumerate() {
                    writeln!(w, "{},{}", epoch + 1, loss)?;
                }
                Ok(())
            })?;
            println!(
                "trained {} epochs on {} windows; final loss {:.6}",
                history.len(),
                dataset.len(),
                history.last().unwrap()
            );
            println!("model: {}", model_path.display());
            println!("loss curve: {}", loss_path.display());
            Ok(())
        }
        Command::Ber { cmd } => match cmd {
            BerCmd::Sweep {
                config,
                model,
                methods,
                snr,
                bits,
                out,
            } => {
                let Some(cfg) = load_config(&config)? else {
                    return Ok(());
                };
                let methods: Vec<Method> = methods
                    .split(',')
                    .map(|tok| {
                        Method::parse(tok.trim())
                            .ok_or_else(|| CliError::Usage(format!("--methods: unknown method `{tok}`")))
                    })
                    .collect::<Result<_, _>>()?;
                let grid = parse_grid(&snr, "--snr")?;
                let model = if methods.contains(&Method::NnFsk) {
                    let path = model.ok_or_else(|| {
                        CliError::Usage("--model is required when nn_fsk is requested".into())
                    })?;
                    Some(MlpModel::load_from_path(&path).map_err(|e| {
                        CliError::Usage(format!("--model {}: {e}", path.display()))
                    })?)
                } else {
                    None
                };
                let result = snr_sweep(&methods, &grid, bits, cfg.noise.seed(), &cfg.modem, model.as_ref())
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                let path = resolve_out(&cfg, &out, "ber_snr.csv")?;
                write_file(&path, |w| result.write_csv("snr_db", w))?;
                println!("snr_db,method,bits,errors,ber");
                for row in &result.rows {
                    println!(
                        "{},{},{},{},{}",
                        row.x_value, row.method.as_str(), row.bits_total, row.bit_errors, row.ber
                    );
                }
                println!("wrote {}", path.display());
                Ok(())
            }
            BerCmd::Distance {
                config,
                model,
                distances,
                floor,
                bits,
                out,
            } => {
                let Some(cfg) = load_config(&config)? else {
                    return Ok(());
                };
                let distances = parse_f64_list(&distances, "--distances")?;
                let path = model.ok_or_else(|| {
                    CliError::Usage("--model is required for the distance sweep".into())
                })?;
                let model = MlpModel::load_from_path(&path)
                    .map_err(|e| CliError::Usage(format!("--model {}: {e}", path.display())))?;
                let template = link_template(&cfg);
                let floor_volts = if floor == "auto" {
                    let calibrated = calibrate_noise_floor(&template, &cfg.modem, 10.0, 2.0)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                    println!("calibrated noise floor: {calibrated:.6e} V RMS (+2 dB at 10 m)");
                    calibrated
                } else {
                    floor
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage("--floor must be `auto` or a voltage".into()))?
                };
                if floor_volts < 0.0 {
                    return Err(CliError::Usage("--floor must be non-negative".into()));
                }
                let result = distance_sweep(
                    &template,
                    &distances,
                    floor_volts,
                    bits,
                    cfg.noise.seed(),
                    &cfg.modem,
                    &model,
                )
                .map_err(|e| CliError::Runtime(e.to_string()))?;
                let path = resolve_out(&cfg, &out, "ber_distance.csv")?;
                write_file(&path, |w| result.write_csv("distance_m", w))?;
                println!("distance_m,method,bits,errors,ber");
                for row in &result.rows {
                    println!(
                        "{},{},{},{},{}",
                        row.x_value, row.method.as_str(), row.bits_total, row.bit_errors, row.ber
                    );
                }
                println!("wrote {}", path.display());
                Ok(())
            }
        },
        Command::Link { cmd } => match cmd {
            LinkCmd::Budget { vpp, rw, out } => {
                let budget = transmit_power(vpp, rw)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                println!("{} W, under_budget={}", budget.power, budget.under_budget);
                if let Some(path) = out {
                    if let Some(parent) = path.parent() {
                        if !parent.as_os_str().is_empty() {
                            std::fs::create_dir_all(parent)?;
                        }
                    }
                    write_file(&path, |w| write_power_csv(&budget, w))?;
                    println!("wrote {}", path.display());
                }
                Ok(())
            }
        },
    }
}
