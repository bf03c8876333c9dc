use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use robust_moss::{
    dist_dependent_bound, minimax_lower_bound, minimax_upper_bound, run_batch, validate_condition,
    AlgorithmResult, GapProfile,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::{output, plot};

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const RUNS_FILE: &str = "runs.csv";
pub const PLOT_FILE: &str = "regret.svg";

/// Output directory used when neither `--out` nor the config names one.
pub const DEFAULT_OUT_DIR: &str = "results";

/// Files written by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutputs {
    pub aggregate: PathBuf,
    pub runs: Option<PathBuf>,
    pub plot: PathBuf,
}

/// Loads `config_path`, runs the batch and writes the CSV files and plot.
pub fn run(
    config_path: &Path,
    out: Option<&Path>,
    threads: Option<usize>,
) -> Result<RunOutputs, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let batch = config.batch(threads)?;
    let results = run_batch(&batch).map_err(CliError::Runtime)?;
    write_outputs(&dir, &results, config.write_runs)
}

pub fn write_outputs(
    dir: &Path,
    results: &[AlgorithmResult],
    with_runs: bool,
) -> Result<RunOutputs, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let aggregate = dir.join(AGGREGATE_FILE);
    output::write_aggregate(create(&aggregate)?, results)?;
    let runs = if with_runs {
        let path = dir.join(RUNS_FILE);
        output::write_runs(create(&path)?, results)?;
        Some(path)
    } else {
        None
    };
    let plot = dir.join(PLOT_FILE);
    let mut file = create(&plot)?;
    file.write_all(plot::render_svg(results).as_bytes())
        .and_then(|_| file.flush())
        .map_err(|source| CliError::Write {
            path: plot.clone(),
            source,
        })?;
    Ok(RunOutputs {
        aggregate,
        runs,
        plot,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
}

/// Prints the three regret bounds for the configured problem.
pub fn bounds<W: Write>(config_path: &Path, mut out: W) -> Result<(), CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let params = config.params()?;
    let gaps = GapProfile::from_means(&config.means, config.u)?;
    let lower = minimax_lower_bound(&params);
    let upper = minimax_upper_bound(&params)?;
    let dist = dist_dependent_bound(&gaps, &params)?;
    let io = |source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    };

    (|| -> std::io::Result<()> {
        writeln!(
            out,
            "T = {}  K = {}  u = {}  eps = {}  a = {}  eta = {}",
            params.horizon,
            params.arms,
            params.moment_scale,
            params.moment_order,
            params.grid_base,
            params.inflation
        )?;
        writeln!(out)?;
        writeln!(out, "minimax lower bound       {lower:.6}")?;
        writeln!(out, "minimax upper bound       {:.6}", upper.value)?;
        writeln!(out, "  C                       {:.7}", upper.c)?;
        for (i, term) in upper.c_terms.iter().enumerate() {
            writeln!(out, "    term {}                {term:.7}", i + 1)?;
        }
        writeln!(out, "  C1                      {:.7}", upper.constants.c1)?;
        writeln!(out, "  C2                      {:.7}", upper.constants.c2)?;
        writeln!(out, "  C3                      {:.7}", upper.constants.c3)?;
        writeln!(out)?;
        writeln!(out, "gap-dependent bound       {:.6}", dist.total)?;
        writeln!(out, "  C1                      {:.7}", dist.c1)?;
        writeln!(out, "  C2                      {:.7}", dist.c2)?;
        writeln!(out, "  arm   gap           log argument     term")?;
        for term in &dist.per_arm {
            writeln!(
                out,
                "  {:<5} {:<13.6} {:<16.6} {:.6}{}",
                term.arm,
                term.gap,
                term.log_argument,
                term.value,
                if term.log_warning {
                    "  (log argument <= 1)"
                } else {
                    ""
                }
            )?;
        }
        if dist.log_warning {
            writeln!(
                out,
                "warning: some log arguments are <= 1; their log terms are reported as printed"
            )?;
        }
        Ok(())
    })()
    .map_err(io)
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// Smallest `eta` satisfying the condition at this `a`, when it fails.
    pub min_eta: Option<f64>,
}

/// Checks `eta psi(2 eta / a) >= 2 a` and prints both sides.
pub fn validate<W: Write>(a: f64, eta: f64, mut out: W) -> Result<ValidateReport, CliError> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(CliError::Config(format!("a = {a} must be greater than 1")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(CliError::Config(format!("eta = {eta} must be positive")));
    }
    let check = validate_condition(a, eta);
    let min_eta = (!check.holds).then(|| smallest_eta(a));
    let io = |source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    };
    (|| -> std::io::Result<()> {
        writeln!(out, "eta*psi(2*eta/a) = {:.6}", check.lhs)?;
        writeln!(out, "2*a              = {:.6}", check.rhs)?;
        if check.holds {
            writeln!(out, "condition holds")?;
        } else {
            writeln!(out, "condition fails")?;
            if let Some(m) = min_eta {
                writeln!(out, "hint: at a = {a}, the condition needs eta >= {m:.6}")?;
            }
            writeln!(
                out,
                "hint: choose a slightly larger than 1 with a moderate eta (a = 1.1, eta = 2.2 satisfies it)"
            )?;
        }
        Ok(())
    })()
    .map_err(io)?;
    Ok(ValidateReport {
        holds: check.holds,
        lhs: check.lhs,
        rhs: check.rhs,
        min_eta,
    })
}

/// `eta psi(2 eta / a)` increases in `eta`, so bisect for the threshold.
fn smallest_eta(a: f64) -> f64 {
    let holds = |eta: f64| validate_condition(a, eta).holds;
    let mut hi = 1.0;
    while !holds(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}
