//! SVG renderings of the output tables.

use std::path::Path;

use plotters::prelude::*;

use crate::output::{DensityRow, ProfileRow, SpectrumRow};
use crate::CliError;

const SIZE: (u32, u32) = (640, 480);

fn plot_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Plot(e.to_string())
}

fn range(values: impl Iterator<Item = f64>) -> std::ops::Range<f64> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return -1.0..1.0;
    }
    let pad = ((hi - lo) * 0.05).max(1e-3);
    (lo - pad)..(hi + pad)
}

fn class_color(class: &str) -> RGBColor {
    match class {
        "edge-lower" => RGBColor(200, 40, 40),
        "edge-upper" => RGBColor(40, 80, 200),
        "edge-left" => RGBColor(40, 150, 60),
        "edge-right" => RGBColor(180, 120, 0),
        _ => RGBColor(150, 150, 150),
    }
}

/// Complex-plane scatter of the spectrum, coloured by class.
pub fn spectrum_svg(path: &Path, rows: &[SpectrumRow]) -> Result<(), CliError> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(10)
        .x_label_area_size(35)
        .y_label_area_size(50)
        .build_cartesian_2d(range(rows.iter().map(|r| r.re)), range(rows.iter().map(|r| r.im)))
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("Re E").y_desc("Im E").draw().map_err(plot_err)?;
    chart
        .draw_series(rows.iter().map(|r| Circle::new((r.re, r.im), 2, class_color(&r.class).filled())))
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

/// Site density with marker area proportional to `rho`.
pub fn density_svg(path: &Path, rows: &[DensityRow]) -> Result<(), CliError> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(10)
        .x_label_area_size(35)
        .y_label_area_size(50)
        .build_cartesian_2d(range(rows.iter().map(|r| r.x)), range(rows.iter().map(|r| r.y)))
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("x").y_desc("y").draw().map_err(plot_err)?;
    let max = rows.iter().map(|r| r.rho).fold(0.0, f64::max);
    if max > 0.0 {
        chart
            .draw_series(rows.iter().map(|r| {
                let radius = (6.0 * (r.rho / max).sqrt()).round() as i32;
                Circle::new((r.x, r.y), radius, RGBColor(200, 40, 40).filled())
            }))
            .map_err(plot_err)?;
    }
    root.present().map_err(plot_err)?;
    Ok(())
}

pub fn profile_svg(path: &Path, rows: &[ProfileRow]) -> Result<(), CliError> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(10)
        .x_label_area_size(35)
        .y_label_area_size(50)
        .build_cartesian_2d(range(rows.iter().map(|r| r.x)), range(rows.iter().map(|r| r.gamma)))
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("x").y_desc("gamma").draw().map_err(plot_err)?;
    chart.draw_series(LineSeries::new(rows.iter().map(|r| (r.x, r.gamma)), &BLACK)).map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}
