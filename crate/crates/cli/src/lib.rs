//! Command-line driver: parses a TOML run configuration and emits CSV tables or a JSON
//! verification report.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::Config;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "dilute-fermi",
    version,
    about = "Dilute spin-1/2 Fermi gas: tables and verification suites"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hartree-Fock energies of filled Fermi balls.
    Hf(Common),
    /// Neumann scattering problem over a density sweep.
    Scatter(Common),
    /// Exact second-quantization checks on a small mode set.
    Verify(Common),
    /// Closed-form energy densities.
    Asympt(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for the output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "DILUTE_FERMI_THREADS")]
    pub threads: Option<usize>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hf(_) => "hf",
            Command::Scatter(_) => "scatter",
            Command::Verify(_) => "verify",
            Command::Asympt(_) => "asympt",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Hf(c) | Command::Scatter(c) | Command::Verify(c) | Command::Asympt(c) => c,
        }
    }

    fn file_name(&self) -> String {
        match self {
            Command::Verify(_) => "verify.json".into(),
            other => format!("{}.csv", other.name()),
        }
    }
}

/// Output of a command: the text to emit and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

/// Runs a command on a loaded configuration.
pub fn execute(command: &Command, cfg: &Config) -> Result<Outcome, CliError> {
    let hash = cfg.hash();
    let ok = |text| Outcome { text, passed: true };
    match command {
        Command::Hf(_) => commands::hf::run(cfg, &hash).map(ok),
        Command::Scatter(_) => commands::scatter::run(cfg, &hash).map(ok),
        Command::Asympt(_) => commands::asympt::run(cfg, &hash).map(ok),
        Command::Verify(_) => {
            let report = commands::verify::run(cfg, &hash)?;
            Ok(Outcome {
                passed: report.passed,
                text: output::json(&report),
            })
        }
    }
}

fn emit(command: &Command, out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(command.file_name()), text)?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    let common = command.common();
    let mut cfg = Config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.run.seed = seed;
    }
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads: must be at least 1".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = execute(command, &cfg)?;
    emit(command, common.out.as_deref(), &outcome.text)?;
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError::Verification(
            "at least one check failed, see the report".into(),
        ))
    }
}

/// Parses `args` and runs the command; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dilute-fermi {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUMP: &str = "[potential]\nkind = \"bump\"\nv0 = 1.0\nr0 = 1.0\n";

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn run_in(dir: &Path, cmd: &str, config: &Path, extra: &[&str]) -> i32 {
        let out = dir.join("out");
        let mut args = vec![
            "dilute-fermi",
            cmd,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        run(args)
    }

    fn rows(text: &str) -> Vec<Vec<String>> {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .take_while(|l| !l.is_empty())
            .map(|l| l.split(',').map(String::from).collect())
            .collect()
    }

    #[test]
    fn hf_free_gas_has_no_interaction_columns() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "c.toml",
            "[potential]\nkind = \"bump\"\nv0 = 0.0\nr0 = 1.0\n[hf]\nl = [5.0, 7.0]\nn_up = 7\nn_down = 19\n",
        );
        assert_eq!(run_in(dir.path(), "hf", &cfg, &[]), 0);
        let text = std::fs::read_to_string(dir.path().join("out/hf.csv")).unwrap();
        assert!(text.starts_with("# dilute-fermi "));
        let r = rows(&text);
        assert_eq!(r.len(), 2);
        for row in r {
            assert_eq!(row[6].parse::<f64>().unwrap(), 0.0);
            assert_eq!(row[7].parse::<f64>().unwrap(), 0.0);
            assert_eq!(row[10].parse::<f64>().unwrap(), 0.0);
        }
    }

    #[test]
    fn hf_kinetic_error_shrinks_along_an_l_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "c.toml",
            &format!("{BUMP}[hf]\nl = [20.0, 40.0, 80.0]\nrho_up = 0.01\nrho_down = 0.01\n"),
        );
        assert_eq!(run_in(dir.path(), "hf", &cfg, &[]), 0);
        let text = std::fs::read_to_string(dir.path().join("out/hf.csv")).unwrap();
        let errs: Vec<f64> = rows(&text)
            .iter()
            .map(|r| r[12].parse::<f64>().unwrap().abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn incomplete_shell_is_a_validation_error_unless_snapped() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "c.toml",
            &format!("{BUMP}[hf]\nl = [4.0]\nn_up = 8\nn_down = 7\n"),
        );
        assert_eq!(run_in(dir.path(), "hf", &cfg, &[]), 1);
        let cfg = write(
            dir.path(),
            "d.toml",
            &format!("{BUMP}[hf]\nl = [4.0]\nn_up = 8\nn_down = 7\nauto_snap = true\n"),
        );
        assert_eq!(run_in(dir.path(), "hf", &cfg, &[]), 0);
        let text = std::fs::read_to_string(dir.path().join("out/hf.csv")).unwrap();
        assert_eq!(rows(&text)[0][1], "7");
    }

    #[test]
    fn config_errors_exit_with_one() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(dir.path(), "c.toml", &format!("{BUMP}colour = 3\n"));
        assert_eq!(run_in(dir.path(), "hf", &cfg, &[]), 1);
        let cfg = write(dir.path(), "d.toml", BUMP);
        assert_eq!(run_in(dir.path(), "scatter", &cfg, &[]), 1);
        assert_eq!(run(["dilute-fermi", "launch"]), 1);
    }

    #[test]
    fn scatter_table_and_fit_block() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "c.toml",
            &format!("{BUMP}[scatter]\ndensities = [1e-4, 1e-3, 1e-2]\n"),
        );
        assert_eq!(run_in(dir.path(), "scatter", &cfg, &[]), 0);
        let text = std::fs::read_to_string(dir.path().join("out/scatter.csv")).unwrap();
        assert_eq!(rows(&text).len(), 3);
        let fit = text.lines().find(|l| l.starts_with("abs_a_gamma_minus_a,")).unwrap();
        let slope: f64 = fit.split(',').nth(1).unwrap().parse().unwrap();
        assert!((slope - 1.0 / 3.0).abs() < 0.15);
    }

    #[test]
    fn asympt_rows_are_symmetric_and_vanish_without_interaction() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "c.toml",
            &format!("{BUMP}[asympt]\npairs = [[0.002, 0.001], [0.001, 0.002]]\na = 0.0\n"),
        );
        assert_eq!(run_in(dir.path(), "asympt", &cfg, &[]), 0);
        let text = std::fs::read_to_string(dir.path().join("out/asympt.csv")).unwrap();
        let r = rows(&text);
        assert_eq!(r[0][2..], r[1][2..]);
        assert_eq!(r[0][4].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[0][5].parse::<f64>().unwrap(), 0.0);
    }

    #[test]
    fn verify_negative_control_and_free_case() {
        let dir = tempfile::tempdir().unwrap();
        let corrupt = write(
            dir.path(),
            "c.toml",
            &format!("{BUMP}[verify]\ncorrupt_exchange_sign = true\ndraws = 3\n"),
        );
        let cfg = Config::load(&corrupt).unwrap();
        let report = commands::verify::run(&cfg, "x").unwrap();
        assert!(!report.check("decomposition_identity").unwrap().passed);
        assert_eq!(run_in(dir.path(), "verify", &corrupt, &[]), 3);
        let free = write(
            dir.path(),
            "f.toml",
            "[potential]\nkind = \"bump\"\nv0 = 0.0\nr0 = 1.0\n[verify]\ndraws = 3\n",
        );
        assert_eq!(run_in(dir.path(), "verify", &free, &[]), 0);
    }
}
