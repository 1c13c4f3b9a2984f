use std::fs;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::gen::Snr;
use super::runner::{AggregateRow, TrialRecord};
use crate::error::{MmpError, Result};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const TRIALS_FILE: &str = "trials.csv";
pub const ERR_PLOT_FILE: &str = "err_vs_k.svg";
pub const MSE_PLOT_FILE: &str = "mse_vs_snr.svg";

/// `10 log₁₀ mse`.
pub fn mse_db(mse: f64) -> f64 {
    10.0 * mse.log10()
}

pub fn write_csv(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(MmpError::from)).collect()
}

pub fn write_trials(trials: &[TrialRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for t in trials {
        w.serialize(t)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(MmpError::from)).collect()
}

fn algorithms(rows: &[AggregateRow]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        if !names.contains(&r.algorithm) {
            names.push(r.algorithm.clone());
        }
    }
    names
}

/// One curve per algorithm of ERR against K, using the noiseless rows
/// (or the first SNR present if there are none).
pub fn plot_err_vs_k(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let snr = rows
        .iter()
        .find(|r| r.snr_db == Snr::Noiseless)
        .or(rows.first())
        .map(|r| r.snr_db)
        .ok_or_else(|| MmpError::InvalidInput("no rows to plot".into()))?;
    let picked: Vec<&AggregateRow> = rows.iter().filter(|r| r.snr_db == snr).collect();
    let kmin = picked.iter().map(|r| r.k).min().unwrap_or(0) as f64;
    let kmax = picked.iter().map(|r| r.k).max().unwrap_or(1) as f64;
    let series: Vec<(String, Vec<(f64, f64)>)> = algorithms(rows)
        .into_iter()
        .map(|a| {
            let pts = picked.iter().filter(|r| r.algorithm == a).map(|r| (r.k as f64, r.err)).collect();
            (a, pts)
        })
        .collect();
    draw(path, "Exact recovery ratio", "K", "ERR", (kmin, kmax.max(kmin + 1.0)), (0.0, 1.05), &series)
}

/// One curve per (algorithm, K) of MSE in dB against SNR; noiseless rows
/// are skipped.
pub fn plot_mse_vs_snr(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let noisy: Vec<&AggregateRow> = rows.iter().filter(|r| matches!(r.snr_db, Snr::Db(_)) && r.mse > 0.0).collect();
    if noisy.is_empty() {
        return Err(MmpError::InvalidInput("no noisy rows to plot".into()));
    }
    let snr = |r: &AggregateRow| match r.snr_db {
        Snr::Db(d) => d,
        Snr::Noiseless => f64::INFINITY,
    };
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in &noisy {
        xlo = xlo.min(snr(r));
        xhi = xhi.max(snr(r));
        ylo = ylo.min(mse_db(r.mse));
        yhi = yhi.max(mse_db(r.mse));
    }
    let mut series = Vec::new();
    for a in algorithms(rows) {
        let mut ks: Vec<usize> = noisy.iter().filter(|r| r.algorithm == a).map(|r| r.k).collect();
        ks.dedup();
        for k in ks {
            let pts: Vec<(f64, f64)> = noisy
                .iter()
                .filter(|r| r.algorithm == a && r.k == k)
                .map(|r| (snr(r), mse_db(r.mse)))
                .collect();
            series.push((format!("{a} K={k}"), pts));
        }
    }
    draw(
        path,
        "Mean squared error",
        "SNR (dB)",
        "MSE (dB)",
        (xlo, xhi.max(xlo + 1.0)),
        (ylo - 1.0, yhi + 1.0),
        &series,
    )
}

fn draw(
    path: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    xr: (f64, f64),
    yr: (f64, f64),
    series: &[(String, Vec<(f64, f64)>)],
) -> Result<()> {
    let plot_err = |e: &dyn std::fmt::Display| MmpError::Plot(e.to_string());
    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(56)
        .build_cartesian_2d(xr.0..xr.1, yr.0..yr.1)
        .map_err(|e| plot_err(&e))?;
    chart
        .configure_mesh()
        .x_desc(xlabel)
        .y_desc(ylabel)
        .draw()
        .map_err(|e| plot_err(&e))?;
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
            .map_err(|e| plot_err(&e))?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        chart
            .draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))
            .map_err(|e| plot_err(&e))?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(|e| plot_err(&e))?;
    root.present().map_err(|e| plot_err(&e))?;
    Ok(())
}

/// Writes the summary CSV and the trial log into `dir`, plus SVG charts
/// when `plot` is set (the MSE chart only if noisy rows exist). Returns
/// the paths written.
pub fn emit_results(rows: &[AggregateRow], trials: &[TrialRecord], dir: &Path, plot: bool) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(MmpError::InvalidInput("no rows to write".into()));
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let summary = dir.join(SUMMARY_FILE);
    write_csv(rows, &summary)?;
    written.push(summary);
    let log = dir.join(TRIALS_FILE);
    write_trials(trials, &log)?;
    written.push(log);
    if plot {
        let err = dir.join(ERR_PLOT_FILE);
        plot_err_vs_k(rows, &err)?;
        written.push(err);
        if rows.iter().any(|r| matches!(r.snr_db, Snr::Db(_))) {
            let mse = dir.join(MSE_PLOT_FILE);
            plot_mse_vs_snr(rows, &mse)?;
            written.push(mse);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn row(alg: &str, k: usize, snr: Snr, mse: f64) -> AggregateRow {
        AggregateRow {
            algorithm: alg.into(),
            k,
            snr_db: snr,
            err: 0.75,
            mse,
            p_md: 0.1,
            p_f: 1.0 / 3.0,
            mean_candidates: 12.5,
            mean_time_ms: 0.123456789,
        }
    }

    #[test]
    fn single_row_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_csv(&[row("omp", 3, Snr::Noiseless, 0.0)], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "algorithm,K,snr_db,err,mse,p_md,p_f,mean_candidates,mean_time_ms");
        assert!(lines[1].starts_with("omp,3,inf,"));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let rows = vec![
            row("mmp-bf", 10, Snr::Noiseless, 1e-30),
            row("omp", 20, Snr::Db(17.5), 0.0123456789012345),
            row("oracle", 20, Snr::Db(-3.0), 2.0 / 3.0),
        ];
        write_csv(&rows, &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), rows);
    }

    #[test]
    fn trial_log_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = TrialRecord {
            trial: 4,
            algorithm: "mmp-df".into(),
            k: 5,
            snr_db: Snr::Db(30.0),
            exact: true,
            squared_error: 1.5e-4,
            missed: 0,
            false_alarms: 0,
            candidates_total: 17,
            failed: false,
            wall_time: Duration::from_micros(1250),
        };
        write_trials(std::slice::from_ref(&t), &path).unwrap();
        let back = read_trials(&path).unwrap();
        assert!(back[0].same_outcome(&t));
    }

    #[test]
    fn mse_axis_is_decibels() {
        assert!((mse_db(0.01) + 20.0).abs() < 1e-12);
    }

    #[test]
    fn emits_plots() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            row("omp", 10, Snr::Noiseless, 0.0),
            row("omp", 20, Snr::Noiseless, 0.0),
            row("omp", 20, Snr::Db(10.0), 0.1),
            row("omp", 20, Snr::Db(20.0), 0.01),
        ];
        let out = emit_results(&rows, &[], dir.path(), true).unwrap();
        assert_eq!(out.len(), 4);
        let svg = fs::read_to_string(dir.path().join(MSE_PLOT_FILE)).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(emit_results(&[], &[], dir.path(), false).is_err());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let rows = vec![row("omp", 1, Snr::Noiseless, 0.0)];
        assert!(emit_results(&rows, &[], &blocker.join("sub"), false).is_err());
    }
}
