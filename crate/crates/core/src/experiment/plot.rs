//! SVG figures derived from a batch output directory.
//!
//! Plotting only reads the CSVs (and the spec copy, for the true rates); it
//! never touches simulation state.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use plotters::prelude::*;

use super::output::{read_runs, InterarrivalRow, RunRow};
use super::{ExperimentSpec, INTERARRIVALS_CSV, RUNS_CSV, SPEC_COPY};

type DrawResult<T> = Result<T, Box<dyn std::error::Error>>;

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(140, 86, 75),
];

/// Writes the interarrival histograms, the accuracy/termination scatter and
/// the events box plot into `dir`. Returns the files written.
pub fn plot(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let runs = match read_runs(&dir.join(RUNS_CSV)) {
        Ok(rows) => rows,
        Err(e) => {
            log::warn!("no run table, plotting empty axes: {e:#}");
            Vec::new()
        }
    };
    let samples = read_interarrivals(&dir.join(INTERARRIVALS_CSV));
    let rates = read_rates(&dir.join(SPEC_COPY));

    let mut written = Vec::new();
    for (area, rate) in [("B", rates.map(|r| r.0)), ("R", rates.map(|r| r.1))] {
        let path = dir.join(format!("interarrivals_{area}.svg"));
        let data = samples.get(area).map(Vec::as_slice).unwrap_or_default();
        if data.is_empty() {
            log::warn!("no interarrival samples for area {area}");
        }
        histogram(&path, area, data, rate).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        written.push(path);
    }

    let path = dir.join("accuracy_vs_time.svg");
    scatter(&path, &runs).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    written.push(path);

    let path = dir.join("events_boxplot.svg");
    boxplot(&path, &runs).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    written.push(path);
    Ok(written)
}

fn read_interarrivals(path: &Path) -> BTreeMap<String, Vec<f64>> {
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let reader = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()));
    match reader {
        Ok(mut r) => {
            for row in r.deserialize::<InterarrivalRow>() {
                match row {
                    Ok(row) => out.entry(row.area).or_default().push(row.measured_ticks as f64),
                    Err(e) => log::warn!("skipping malformed interarrival row: {e}"),
                }
            }
        }
        Err(e) => log::warn!("{e:#}"),
    }
    out
}

fn read_rates(path: &Path) -> Option<(f64, f64)> {
    let text = std::fs::read_to_string(path).ok()?;
    match toml::from_str::<ExperimentSpec>(&text) {
        Ok(spec) => Some((spec.base.rate_b, spec.base.rate_r)),
        Err(e) => {
            log::warn!("cannot read rates from {}: {e}", path.display());
            None
        }
    }
}

fn histogram(path: &Path, area: &str, samples: &[f64], rate: Option<f64>) -> DrawResult<()> {
    let root = SVGBackend::new(path, (640, 420)).into_drawing_area();
    root.fill(&WHITE)?;

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let p99 = super::quantile(&sorted, 0.99).unwrap_or(1.0);
    let x_max = match rate {
        Some(r) if r > 0.0 => p99.max(3.0 / r),
        _ => p99,
    }
    .max(1.0);
    let bins = 40usize;
    let width = x_max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &sorted {
        if x < x_max {
            counts[((x / width) as usize).min(bins - 1)] += 1;
        }
    }
    let n = sorted.len().max(1) as f64;
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let y_max = density
        .iter()
        .copied()
        .chain(rate)
        .fold(0.0_f64, f64::max)
        .max(1e-12)
        * 1.1;

    let mut chart = ChartBuilder::on(&root)
        .caption(format!("Measured interarrival times, area {area}"), ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(0.0..x_max, 0.0..y_max)?;
    chart
        .configure_mesh()
        .x_desc("interarrival time [ticks]")
        .y_desc("density")
        .draw()?;

    chart
        .draw_series(density.iter().enumerate().map(|(i, &h)| {
            let x0 = i as f64 * width;
            Rectangle::new([(x0, 0.0), (x0 + width, h)], PALETTE[0].mix(0.5).filled())
        }))?
        .label(format!("measured (n = {})", sorted.len()))
        .legend(|(x, y)| Rectangle::new([(x, y - 5), (x + 15, y + 5)], PALETTE[0].mix(0.5).filled()));

    if let Some(r) = rate.filter(|r| *r > 0.0) {
        let steps = 200;
        chart
            .draw_series(LineSeries::new(
                (0..=steps).map(|i| {
                    let x = x_max * i as f64 / steps as f64;
                    (x, r * (-r * x).exp())
                }),
                PALETTE[1].stroke_width(2),
            ))?
            .label(format!("true exponential, mean {:.0}", 1.0 / r))
            .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 15, y)], PALETTE[1].stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()?;
    root.present()?;
    Ok(())
}

fn scatter(path: &Path, runs: &[RunRow]) -> DrawResult<()> {
    let root = SVGBackend::new(path, (640, 420)).into_drawing_area();
    root.fill(&WHITE)?;
    let x_max = runs
        .iter()
        .filter_map(|r| r.terminated_at)
        .max()
        .unwrap_or(1)
        .max(1) as f64
        * 1.05;
    let mut chart = ChartBuilder::on(&root)
        .caption("Accuracy vs termination time", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..x_max, -0.05..1.05)?;
    chart
        .configure_mesh()
        .x_desc("termination time [ticks]")
        .y_desc("accuracy")
        .draw()?;

    let mut by_alg: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in runs {
        if let (Some(t), Some(a)) = (r.terminated_at, r.accuracy) {
            by_alg.entry(&r.algorithm).or_default().push((t as f64, a));
        }
    }
    for (i, (alg, points)) in by_alg.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        chart
            .draw_series(points.iter().map(|&p| Circle::new(p, 4, color.mix(0.7).filled())))?
            .label(*alg)
            .legend(move |(x, y)| Circle::new((x + 7, y), 4, color.filled()));
    }
    if !by_alg.is_empty() {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()?;
    }
    root.present()?;
    Ok(())
}

fn boxplot(path: &Path, runs: &[RunRow]) -> DrawResult<()> {
    let root = SVGBackend::new(path, (640, 420)).into_drawing_area();
    root.fill(&WHITE)?;

    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in runs {
        if let Some(e) = r.events_total {
            groups
                .entry(format!("{} ({})", r.algorithm, r.environment))
                .or_default()
                .push(e as f64);
        }
    }
    let labels: Vec<String> = if groups.is_empty() {
        vec![String::new()]
    } else {
        groups.keys().cloned().collect()
    };
    let y_max = groups
        .values()
        .flatten()
        .copied()
        .fold(1.0_f64, f64::max) as f32
        * 1.1;

    let mut chart = ChartBuilder::on(&root)
        .caption("Events observed per run (whole swarm)", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(labels.as_slice().into_segmented(), 0.0f32..y_max)?;
    chart.configure_mesh().y_desc("observed events").draw()?;
    chart.draw_series(groups.iter().enumerate().map(|(i, (label, values))| {
        let idx = labels.iter().position(|l| l == label).unwrap_or(0);
        Boxplot::new_vertical(SegmentValue::CenterOf(&labels[idx]), &Quartiles::new(values))
            .width(30)
            .style(PALETTE[i % PALETTE.len()])
    }))?;
    root.present()?;
    Ok(())
}
