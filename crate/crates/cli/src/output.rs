//! CSV emission.
//!
//! `aggregate.csv`: `algorithm,t,mean_regret,q05,q50,q95` (one quantile
//! column per configured level). `runs.csv`: `algorithm,run,t,cum_regret`.
//! Floats carry 12 significant digits in scientific notation.

use std::io::Write;

use robust_moss::AlgorithmResult;

use crate::error::CliError;

/// Formats `x` with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Column name for a quantile level: 0.05 -> `q05`, 0.5 -> `q50`, 0.975 -> `q97.5`.
pub fn quantile_column(level: f64) -> String {
    let pct = level * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("q{:02}", pct.round() as u32)
    } else {
        let s = format!("{pct:.6}");
        format!("q{}", s.trim_end_matches('0'))
    }
}

pub fn write_aggregate<W: Write>(out: W, results: &[AlgorithmResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let levels = results
        .first()
        .map(|r| r.stats.levels.clone())
        .unwrap_or_default();
    let mut header = vec!["algorithm".to_string(), "t".into(), "mean_regret".into()];
    header.extend(levels.iter().map(|&q| quantile_column(q)));
    w.write_record(&header)?;
    for result in results {
        let s = &result.stats;
        for (i, t) in s.grid.iter().enumerate() {
            let mut row = vec![
                result.kind.name().to_string(),
                t.to_string(),
                fmt_float(s.mean[i]),
            ];
            row.extend(s.quantiles.iter().map(|q| fmt_float(q[i])));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_runs<W: Write>(out: W, results: &[AlgorithmResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "run", "t", "cum_regret"])?;
    for result in results {
        for trace in &result.traces {
            for (t, r) in trace.grid.iter().zip(&trace.cum_regret) {
                w.write_record([
                    result.kind.name().to_string(),
                    trace.run_index.to_string(),
                    t.to_string(),
                    fmt_float(*r),
                ])?;
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(fmt_float(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
        assert_eq!(fmt_float(12345.678), "1.23456780000e4");
        let back: f64 = fmt_float(std::f64::consts::PI).parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn quantile_columns() {
        assert_eq!(quantile_column(0.05), "q05");
        assert_eq!(quantile_column(0.5), "q50");
        assert_eq!(quantile_column(0.95), "q95");
        assert_eq!(quantile_column(1.0), "q100");
        assert_eq!(quantile_column(0.975), "q97.5");
    }
}
