use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nlmg::assembly::Kernel;
use nlmg::multigrid::SmootherParams;
use nlmg_bench::config::default_levels;
use nlmg_bench::scaling::{render_scaling, scaling_passed};
use nlmg_bench::validate::render_validate;
use nlmg_bench::{
    default_suites, render_table, run_convergence, run_scaling, run_validate, run_verify,
    write_csv, Format, Mode, Result, StudyConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Fractional,
    Constant,
}

/// Multigrid studies for 1D nonlocal diffusion.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = KernelArg::Fractional)]
    kernel: KernelArg,
    /// Fractional order, in (1, 2).
    #[arg(long, default_value_t = 1.3)]
    alpha: f64,
    /// Coarsest study level (N = 2^qmin); default depends on kernel and mode.
    #[arg(long)]
    qmin: Option<u32>,
    #[arg(long)]
    qmax: Option<u32>,
    /// Relative residual tolerance; default 1e-10 (fractional) or 1e-13 (constant).
    #[arg(long)]
    tol: Option<f64>,
    /// Presmoothing sweeps.
    #[arg(long)]
    nu1: Option<usize>,
    /// Postsmoothing sweeps.
    #[arg(long)]
    nu2: Option<usize>,
    #[arg(long)]
    omega_pre: Option<f64>,
    #[arg(long)]
    omega_post: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Convergence)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write results here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn config(&self) -> Result<StudyConfig> {
        let kernel = match self.kernel {
            KernelArg::Fractional => Kernel::fractional(self.alpha)?,
            KernelArg::Constant => Kernel::Constant,
        };
        let defaults = StudyConfig::defaults(kernel, self.mode);
        let (q_min, q_max) = default_levels(kernel, self.mode);
        let p = defaults.params;
        StudyConfig::new(
            kernel,
            self.qmin.unwrap_or(q_min),
            self.qmax.unwrap_or(q_max),
            SmootherParams {
                m1: self.nu1.unwrap_or(p.m1),
                m2: self.nu2.unwrap_or(p.m2),
                omega_pre: self.omega_pre.unwrap_or(p.omega_pre),
                omega_post: self.omega_post.unwrap_or(p.omega_post),
            },
            self.tol.unwrap_or(defaults.tol),
            self.format,
            self.mode,
        )
    }
}

fn csv_lines<W: Write, const K: usize>(
    out: W,
    header: [&str; K],
    rows: Vec<[String; K]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the study, writes its output, and tells whether every check passed.
fn run(config: &StudyConfig, mut out: impl Write) -> Result<bool> {
    let csv = config.format == Format::Csv;
    match config.mode {
        Mode::Convergence => {
            let study = run_convergence(config)?;
            if csv {
                write_csv(&study.rows, &mut out)?;
                for flag in &study.flagged {
                    eprintln!("flagged N = {}: {}", flag.intervals, flag.message);
                }
            } else {
                write!(out, "{}", render_table(&study))?;
            }
            Ok(study.passed())
        }
        Mode::Verify => {
            let report = run_verify(config, &default_suites(config.kernel), None)?;
            if csv {
                let rows = report
                    .outcomes
                    .iter()
                    .map(|o| {
                        [
                            o.id.to_string(),
                            o.intervals.to_string(),
                            o.passed.to_string(),
                            o.detail.clone(),
                        ]
                    })
                    .collect();
                csv_lines(&mut out, ["id", "N", "passed", "detail"], rows)?;
            } else {
                for o in &report.outcomes {
                    writeln!(out, "{o}")?;
                }
            }
            let failed = report.failures().count();
            eprintln!("{} checks, {failed} failed", report.outcomes.len());
            Ok(report.passed())
        }
        Mode::Scaling => {
            let rows = run_scaling(config)?;
            if csv {
                let recs = rows
                    .iter()
                    .map(|r| {
                        [
                            r.intervals.to_string(),
                            format!("{:.5e}", r.seconds_per_cycle),
                            r.ratio.map(|v| format!("{v:.5e}")).unwrap_or_default(),
                        ]
                    })
                    .collect();
                csv_lines(&mut out, ["N", "seconds_per_cycle", "ratio"], recs)?;
            } else {
                write!(out, "{}", render_scaling(&rows))?;
            }
            Ok(scaling_passed(&rows))
        }
        Mode::Validate => {
            let rows = run_validate(config)?;
            if csv {
                let recs = rows
                    .iter()
                    .map(|r| {
                        [
                            r.intervals.to_string(),
                            format!("{:.5e}", r.difference),
                            format!("{:.5e}", r.bound),
                            r.iterations.to_string(),
                            r.passed().to_string(),
                        ]
                    })
                    .collect();
                csv_lines(
                    &mut out,
                    ["N", "difference", "bound", "iterations", "passed"],
                    recs,
                )?;
            } else {
                write!(out, "{}", render_validate(&rows))?;
            }
            for r in rows.iter().filter(|r| !r.passed()) {
                eprintln!("validation failed at N = {}:\n{}", r.intervals, r.dump());
            }
            Ok(rows.iter().all(|r| r.passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.config().and_then(|config| match &cli.out {
        Some(path) => run(&config, io::BufWriter::new(File::create(path)?)),
        None => run(&config, io::stdout().lock()),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
