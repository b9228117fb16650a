use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cascade_cli::config::ConfigError;
use cascade_cli::format::{fmt_num, write_grid_csv, write_modes_csv, write_volume_csv};
use cascade_cli::run::{self, CliError, CliResult};
use cascade_cli::{parse_config, RunConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cascade", version, about = "Spectral entanglement of cascaded photon sources")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; defaults to the matching `output.*` key, then stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    route: Option<String>,
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    #[arg(long, global = true)]
    half_width: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Override any configuration key, e.g. `--set fixed.s=0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the amplitude at one detuning tuple, in route photon order.
    Eval {
        #[arg(allow_negative_numbers = true, required = true)]
        detunings: Vec<f64>,
    },
    /// Write the biphoton projection grid as CSV.
    Project,
    /// Schmidt-decompose the projection and write a JSON report.
    Schmidt,
    /// Run the configured parameter sweep and write a CSV table.
    Sweep,
    /// Write the normalized modulus of a four-photon volume as CSV.
    Volume,
    /// Solve the phase-matching angles of the four-wave-mixing geometry.
    Fwm {
        /// Pump angle a, degrees.
        #[arg(allow_negative_numbers = true)]
        theta_a: f64,
        /// Pump angle b, degrees.
        #[arg(allow_negative_numbers = true)]
        theta_b: f64,
        /// Wavevector ratio |k_s| / |k_i|.
        ratio: f64,
    },
}

/// Replaces or appends `key = value` lines in a config document.
fn with_overrides(text: &str, overrides: &[(String, String)]) -> String {
    let mut out: Vec<String> = text
        .lines()
        .filter(|line| {
            let content = line.split('#').next().unwrap_or("");
            match content.split_once('=') {
                Some((k, _)) => !overrides.iter().any(|(o, _)| o == k.trim()),
                None => true,
            }
        })
        .map(str::to_owned)
        .collect();
    out.extend(overrides.iter().map(|(k, v)| format!("{k} = {v}")));
    out.join("\n") + "\n"
}

fn load_config(common: &Common) -> CliResult<RunConfig> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(None, path.display().to_string(), e.to_string()))?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    if let Some(r) = &common.route {
        overrides.push(("route".to_owned(), r.clone()));
    }
    if let Some(n) = common.grid_points {
        overrides.push(("grid.n_points".to_owned(), n.to_string()));
    }
    if let Some(w) = common.half_width {
        overrides.push(("grid.half_width".to_owned(), w.to_string()));
    }
    if let Some(t) = common.tol {
        overrides.push(("tol".to_owned(), t.to_string()));
    }
    if let Some(w) = common.workers {
        overrides.push(("workers".to_owned(), w.to_string()));
    }
    for item in &common.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| ConfigError::new(None, item.clone(), "--set expects KEY=VALUE"))?;
        overrides.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(parse_config(&with_overrides(&text, &overrides))?)
}

fn write_to<F>(path: Option<&Path>, f: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    if let Command::Fwm { theta_a, theta_b, ratio } = cli.command {
        let s = run::fwm(theta_a, theta_b, ratio)?;
        let (ti, ts) = (s.theta_i.to_degrees(), s.theta_s.to_degrees());
        let text = format!(
            "theta_i={ti:.1} theta_s={ts:.1}\ntheta_i_deg={} theta_s_deg={} residual={},{} iterations={}\n",
            fmt_num(ti),
            fmt_num(ts),
            fmt_num(s.residual[0]),
            fmt_num(s.residual[1]),
            s.iterations
        );
        return write_to(cli.common.out.as_deref(), |w| w.write_all(text.as_bytes()));
    }

    let cfg = load_config(&cli.common)?;
    let out = cli.common.out.as_deref();
    match cli.command {
        Command::Eval { detunings } => {
            let v = run::eval_point(&cfg, &detunings)?;
            let text = format!("re={} im={} abs={}\n", fmt_num(v.re), fmt_num(v.im), fmt_num(v.norm()));
            write_to(out, |w| w.write_all(text.as_bytes()))
        }
        Command::Project => {
            let grid = run::project_grid(&cfg)?;
            write_to(out.or(cfg.outputs.grid.as_deref()), |w| write_grid_csv(&grid, w))
        }
        Command::Schmidt => {
            let (result, report) = run::schmidt_report(&cfg)?;
            if let Some(path) = &cfg.outputs.grid {
                let grid = cascade_core::project(cfg.route, &cfg.params, &cfg.fixed, &result.spec)?;
                write_to(Some(path), |w| write_grid_csv(&grid, w))?;
            }
            if let Some(path) = &cfg.outputs.modes {
                write_to(Some(path), |w| write_modes_csv(&result, cfg.eigenvalues, w))?;
            }
            let json = report.to_json();
            write_to(out.or(cfg.outputs.report.as_deref()), |w| w.write_all(json.as_bytes()))
        }
        Command::Sweep => {
            let table = run::run_sweep(&cfg)?;
            let csv = table.to_csv();
            write_to(out.or(cfg.outputs.sweep.as_deref()), |w| w.write_all(csv.as_bytes()))
        }
        Command::Volume => {
            let vol = run::volume(&cfg)?;
            write_to(out.or(cfg.outputs.volume.as_deref()), |w| write_volume_csv(&vol, w))
        }
        Command::Fwm { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
