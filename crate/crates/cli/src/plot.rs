//! Static SVG line charts.

use epitaxy_core::experiments::Series;
use plotters::coord::ranged1d::{AsRangedCoord, ValueFormatter};
use plotters::prelude::*;

fn bounds(v: &[f64], log: bool) -> (f64, f64) {
    let finite = v.iter().copied().filter(|x| x.is_finite() && (!log || *x > 0.0));
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    if !(lo <= hi) {
        return if log { (0.1, 10.0) } else { (0.0, 1.0) };
    }
    if log {
        (lo / 1.2, hi * 1.2)
    } else if hi - lo < 1e-12 * (1.0 + hi.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn draw<X, Y>(
    area: &DrawingArea<SVGBackend<'_>, plotters::coord::Shift>,
    s: &Series,
    x: X,
    y: Y,
) -> Result<(), String>
where
    X: AsRangedCoord<Value = f64>,
    Y: AsRangedCoord<Value = f64>,
    X::CoordDescType: ValueFormatter<f64>,
    Y::CoordDescType: ValueFormatter<f64>,
{
    let caption = match &s.fit {
        Some(f) => format!("{}  (fitted slope {:.4})", s.name, f.slope),
        None => s.name.clone(),
    };
    let mut chart = ChartBuilder::on(area)
        .caption(caption, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(x, y)
        .map_err(|e| e.to_string())?;
    chart
        .configure_mesh()
        .x_desc(s.x_label.as_str())
        .y_desc(s.y_label.as_str())
        .draw()
        .map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = s
        .x
        .iter()
        .copied()
        .zip(s.y.iter().copied())
        .filter(|(a, b)| a.is_finite() && b.is_finite() && (!s.log_x || *a > 0.0) && (!s.log_y || *b > 0.0))
        .collect();
    chart
        .draw_series(LineSeries::new(pts.iter().copied(), &BLUE))
        .map_err(|e| e.to_string())?;
    if let Some(level) = s.reference {
        let (x0, x1) = bounds(&s.x, s.log_x);
        chart
            .draw_series(LineSeries::new([(x0, level), (x1, level)], RED.stroke_width(1)))
            .map_err(|e| e.to_string())?;
    }
    if let Some(f) = s.fit {
        let line = pts
            .iter()
            .map(|(a, _)| (*a, (f.intercept + f.slope * a.ln()).exp()));
        chart
            .draw_series(LineSeries::new(line, BLACK.stroke_width(1)))
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Renders one series as an SVG document.
pub fn render_svg(s: &Series) -> Result<String, String> {
    let mut out = String::new();
    {
        let area = SVGBackend::with_string(&mut out, (720, 440)).into_drawing_area();
        area.fill(&WHITE).map_err(|e| e.to_string())?;
        let (x0, x1) = bounds(&s.x, s.log_x);
        let mut y_all = s.y.clone();
        y_all.extend(s.reference);
        let (y0, y1) = bounds(&y_all, s.log_y);
        match (s.log_x, s.log_y) {
            (false, false) => draw(&area, s, x0..x1, y0..y1)?,
            (true, false) => draw(&area, s, (x0..x1).log_scale(), y0..y1)?,
            (false, true) => draw(&area, s, x0..x1, (y0..y1).log_scale())?,
            (true, true) => draw(&area, s, (x0..x1).log_scale(), (y0..y1).log_scale())?,
        }
        area.present().map_err(|e| e.to_string())?;
    }
    Ok(out)
}
