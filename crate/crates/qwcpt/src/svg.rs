//! Self-contained SVG line plots of sweep results.
//!
//! The output is deterministic: identical input produces byte-identical
//! markup. Coordinates are rounded to hundredths of a pixel, ticks come
//! from a fixed 1-2-5 ladder, and the palette and layout are constants.

use std::io::Write;

use crate::error::{Error, Result};
use crate::observables::ObservableRow;
use crate::sweep::SweepResult;

/// Selectable plot series; names match the CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableColumn {
    P11P22,
    P33,
    P44,
    P33P44,
    AbsProbe,
    DispProbe,
    DispStrong,
    Residual,
}

impl ObservableColumn {
    pub fn as_str(self) -> &'static str {
        match self {
            ObservableColumn::P11P22 => "p11_p22",
            ObservableColumn::P33 => "p33",
            ObservableColumn::P44 => "p44",
            ObservableColumn::P33P44 => "p33_p44",
            ObservableColumn::AbsProbe => "abs_probe",
            ObservableColumn::DispProbe => "disp_probe",
            ObservableColumn::DispStrong => "disp_strong",
            ObservableColumn::Residual => "residual",
        }
    }

    fn value(self, r: &ObservableRow) -> f64 {
        match self {
            ObservableColumn::P11P22 => r.p11_p22,
            ObservableColumn::P33 => r.p33,
            ObservableColumn::P44 => r.p44,
            ObservableColumn::P33P44 => r.p33_p44,
            ObservableColumn::AbsProbe => r.absorption_probe,
            ObservableColumn::DispProbe => r.dispersion_probe,
            ObservableColumn::DispStrong => r.dispersion_strong,
            ObservableColumn::Residual => r.residual_inf,
        }
    }
}

impl std::str::FromStr for ObservableColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "p11_p22" => ObservableColumn::P11P22,
            "p33" => ObservableColumn::P33,
            "p44" => ObservableColumn::P44,
            "p33_p44" => ObservableColumn::P33P44,
            "abs_probe" => ObservableColumn::AbsProbe,
            "disp_probe" => ObservableColumn::DispProbe,
            "disp_strong" => ObservableColumn::DispStrong,
            "residual" => ObservableColumn::Residual,
            other => return Err(Error::Range(format!("unknown plot column {other:?}"))),
        })
    }
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 45.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf",
];

/// Padded data range on one axis.
struct Extent {
    min: f64,
    max: f64,
}

impl Extent {
    fn of(values: impl Iterator<Item = f64>) -> Extent {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values.filter(|v| v.is_finite()) {
            min = min.min(v);
            max = max.max(v);
        }
        if min > max {
            // No finite sample at all; pick a fixed window.
            min = 0.0;
            max = 1.0;
        }
        let pad = if max > min { 0.05 * (max - min) } else { 0.5 };
        Extent { min: min - pad, max: max + pad }
    }

    fn span(&self) -> f64 {
        self.max - self.min
    }
}

/// Nearest 1-2-5 ladder step to span / 6.
fn tick_step(span: f64) -> f64 {
    let target = span / 6.0;
    let k = target.log10().floor() as i32;
    let base = target / 10f64.powi(k);
    let m = if base < 1.5 {
        1.0
    } else if base < 3.0 {
        2.0
    } else if base < 7.0 {
        5.0
    } else {
        10.0
    };
    m * 10f64.powi(k)
}

fn ticks(e: &Extent) -> Vec<f64> {
    let step = tick_step(e.span());
    let mut t = (e.min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= e.max + 1e-9 * step {
        // Snap values that should be exactly zero.
        out.push(if t.abs() < 1e-9 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_label(v: f64, step: f64) -> String {
    let prec = (-(step.log10().floor())).max(0.0) as usize;
    format!("{v:.prec$}")
}

fn px(e: &Extent, x: f64) -> f64 {
    LEFT + (x - e.min) / e.span() * (WIDTH - LEFT - RIGHT)
}

fn py(e: &Extent, y: f64) -> f64 {
    (HEIGHT - BOTTOM) - (y - e.min) / e.span() * (HEIGHT - TOP - BOTTOM)
}

/// Render selected columns of a sweep as an SVG line plot.
pub fn emit_svg(result: &SweepResult, columns: &[ObservableColumn], w: &mut dyn Write) -> Result<()> {
    emit_svg_table(result.spec.param.as_str(), &result.axis, &result.rows, columns, w)
}

/// Core renderer working on a bare table; `axis_name` becomes the x label.
pub fn emit_svg_table(
    axis_name: &str,
    axis: &[f64],
    rows: &[ObservableRow],
    columns: &[ObservableColumn],
    w: &mut dyn Write,
) -> Result<()> {
    if columns.is_empty() {
        return Err(Error::EmptySelection);
    }
    if axis.len() < 2 {
        return Err(Error::Range(format!("plotting needs at least 2 points, got {}", axis.len())));
    }
    if axis.len() != rows.len() {
        return Err(Error::InvalidParams(format!(
            "axis and row counts differ: {} vs {}",
            axis.len(),
            rows.len()
        )));
    }

    let xe = Extent::of(axis.iter().copied());
    let ye = Extent::of(rows.iter().flat_map(|r| columns.iter().map(move |c| c.value(r))));

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));

    let x_step = tick_step(xe.span());
    for t in ticks(&xe) {
        let x = px(&xe, t);
        s.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{TOP}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            HEIGHT - BOTTOM
        ));
        s.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333333\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - BOTTOM + 18.0,
            tick_label(t, x_step)
        ));
    }
    let y_step = tick_step(ye.span());
    for t in ticks(&ye) {
        let y = py(&ye, t);
        s.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            WIDTH - RIGHT
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333333\" text-anchor=\"end\">{}</text>\n",
            LEFT - 8.0,
            y + 4.0,
            tick_label(t, y_step)
        ));
    }

    s.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    ));
    s.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{:.2}\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
        HEIGHT - BOTTOM
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#000000\" text-anchor=\"middle\">{axis_name}</text>\n",
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 8.0
    ));

    for (ci, col) in columns.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if seg.len() >= 2 {
                s.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                    seg.join(" ")
                ));
            }
            seg.clear();
        };
        for (x, r) in axis.iter().zip(rows) {
            let v = col.value(r);
            if x.is_finite() && v.is_finite() {
                segment.push(format!("{:.2},{:.2}", px(&xe, *x), py(&ye, v)));
            } else {
                flush(&mut segment, &mut s);
            }
        }
        flush(&mut segment, &mut s);
    }

    for (ci, col) in columns.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let y = TOP + 16.0 + 18.0 * ci as f64;
        let x = WIDTH - RIGHT - 150.0;
        s.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            x + 24.0
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#000000\">{}</text>\n",
            x + 30.0,
            y + 4.0,
            col.as_str()
        ));
    }

    s.push_str("</svg>\n");
    w.write_all(s.as_bytes())?;
    Ok(())
}
