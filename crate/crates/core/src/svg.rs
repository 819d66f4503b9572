//! Static SVG rendering for reports: time-frequency heatmaps, multi-series
//! line plots, and signed bar charts. Markup is assembled with fixed number
//! formatting and contains no timestamps, ids, or external references, so
//! equal inputs produce byte-identical files. Heatmaps block-average the
//! grid down to at most [`MAX_HEATMAP_CELLS`] cells per axis; cell color is
//! a symmetric diverging map on the real part, scaled to the peak block
//! magnitude.

use crate::error::{Error, Result};
use crate::tfa::TFDist;
use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 56.0;
/// Heatmap grids are reduced to at most this many cells per axis.
pub const MAX_HEATMAP_CELLS: usize = 128;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// One named line in a [`LinePlot`].
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Multi-series line plot with shared axes.
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// One bar of a [`BarChart`]; `stderr` draws a whisker when present.
pub struct Bar {
    pub label: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

/// Signed bar chart around a zero baseline.
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub bars: Vec<Bar>,
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.xmin) / (self.xmax - self.xmin) * self.w
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + self.h - (v - self.ymin) / (self.ymax - self.ymin) * self.h
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Short tick label: plain decimal in a moderate range, exponent outside.
fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Diverging blue/white/red map for `u` in [-1, 1].
fn diverging_color(u: f64) -> String {
    let u = if u.is_finite() {
        u.clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let hi: [f64; 3] = if u < 0.0 {
        [33.0, 102.0, 172.0]
    } else {
        [178.0, 24.0, 43.0]
    };
    let w = u.abs();
    let mix = |b: f64| (255.0 + (b - 255.0) * w).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(hi[0]), mix(hi[1]), mix(hi[2]))
}

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n\
         <text x=\"{:.1}\" y=\"26\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        esc(title)
    );
    s
}

fn draw_frame_box(out: &mut String, f: &Frame) {
    let _ = writeln!(
        out,
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#333333\"/>",
        f.x0, f.y0, f.w, f.h
    );
}

fn draw_x_ticks(out: &mut String, f: &Frame, n: usize) {
    for k in 0..n {
        let v = f.xmin + (f.xmax - f.xmin) * k as f64 / (n - 1) as f64;
        let x = f.x(v);
        let _ = writeln!(
            out,
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#333333\"/>\n\
             <text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            f.y0 + f.h,
            f.y0 + f.h + 5.0,
            f.y0 + f.h + 18.0,
            fmt_tick(v)
        );
    }
}

fn draw_y_ticks(out: &mut String, f: &Frame, n: usize) {
    for k in 0..n {
        let v = f.ymin + (f.ymax - f.ymin) * k as f64 / (n - 1) as f64;
        let y = f.y(v);
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#333333\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            f.x0 - 5.0,
            f.x0,
            f.x0 - 8.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
}

fn draw_axis_labels(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    if !x_label.is_empty() {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            f.x0 + f.w / 2.0,
            f.y0 + f.h + 40.0,
            esc(x_label)
        );
    }
    if !y_label.is_empty() {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" \
             transform=\"rotate(-90 {:.1} {:.1})\">{}</text>",
            f.x0 - 52.0,
            f.y0 + f.h / 2.0,
            f.x0 - 52.0,
            f.y0 + f.h / 2.0,
            esc(y_label)
        );
    }
}

/// Pads a data range so degenerate and flat extents stay drawable.
fn padded(min: f64, max: f64) -> (f64, f64) {
    if min == max {
        let pad = min.abs().max(1.0) * 0.5;
        (min - pad, max + pad)
    } else {
        let pad = (max - min) * 0.05;
        (min - pad, max + pad)
    }
}

/// Renders a multi-series line plot. Series colors cycle through a fixed
/// palette in input order; the legend sits inside the upper-right corner.
pub fn line_plot(plot: &LinePlot) -> Result<String> {
    if plot.series.is_empty() || plot.series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::usage("line plot needs at least one nonempty series"));
    }
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in &plot.series {
        for &(x, y) in &s.points {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::usage("line plot values must be finite"));
            }
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    let (xmin, xmax) = padded(xmin, xmax);
    let (ymin, ymax) = padded(ymin, ymax);
    let f = Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        h: HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
        xmin,
        xmax,
        ymin,
        ymax,
    };
    let mut out = svg_open(&plot.title);
    draw_frame_box(&mut out, &f);
    draw_x_ticks(&mut out, &f, 5);
    draw_y_ticks(&mut out, &f, 5);
    draw_axis_labels(&mut out, &f, &plot.x_label, &plot.y_label);
    for (k, s) in plot.series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let _ = write!(pts, "{:.2},{:.2} ", f.x(x), f.y(y));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            pts.trim_end()
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>",
                f.x(x),
                f.y(y)
            );
        }
        let ly = f.y0 + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>",
            f.x0 + f.w - 150.0,
            f.x0 + f.w - 128.0,
            f.x0 + f.w - 122.0,
            ly + 4.0,
            esc(&s.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders a signed bar chart: positive bars blue above the zero baseline,
/// negative bars red below it, with whiskers for bars carrying a stderr.
pub fn bar_chart(chart: &BarChart) -> Result<String> {
    if chart.bars.is_empty() {
        return Err(Error::usage("bar chart needs at least one bar"));
    }
    let mut ymin = 0.0f64;
    let mut ymax = 0.0f64;
    for b in &chart.bars {
        if !b.value.is_finite() || b.stderr.is_some_and(|s| !s.is_finite() || s < 0.0) {
            return Err(Error::usage("bar chart values must be finite"));
        }
        let se = b.stderr.unwrap_or(0.0);
        ymin = ymin.min(b.value - se);
        ymax = ymax.max(b.value + se);
    }
    let (ymin, ymax) = padded(ymin, ymax);
    let nb = chart.bars.len();
    let f = Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        h: HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
        xmin: 0.0,
        xmax: nb as f64,
        ymin,
        ymax,
    };
    let mut out = svg_open(&chart.title);
    draw_frame_box(&mut out, &f);
    draw_y_ticks(&mut out, &f, 5);
    draw_axis_labels(&mut out, &f, "", &chart.y_label);
    let y0 = f.y(0.0);
    let slot = f.w / nb as f64;
    let bw = slot * 0.7;
    for (k, b) in chart.bars.iter().enumerate() {
        let xc = f.x0 + slot * (k as f64 + 0.5);
        let yv = f.y(b.value);
        let (top, h) = if b.value >= 0.0 {
            (yv, y0 - yv)
        } else {
            (y0, yv - y0)
        };
        let fill = if b.value >= 0.0 { "#1f77b4" } else { "#d62728" };
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{top:.2}\" width=\"{bw:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>",
            xc - bw / 2.0
        );
        if let Some(se) = b.stderr {
            if se > 0.0 {
                let ylo = f.y(b.value - se);
                let yhi = f.y(b.value + se);
                let _ = writeln!(
                    out,
                    "<line x1=\"{xc:.2}\" y1=\"{yhi:.2}\" x2=\"{xc:.2}\" y2=\"{ylo:.2}\" stroke=\"#333333\"/>\n\
                     <line x1=\"{:.2}\" y1=\"{yhi:.2}\" x2=\"{:.2}\" y2=\"{yhi:.2}\" stroke=\"#333333\"/>\n\
                     <line x1=\"{:.2}\" y1=\"{ylo:.2}\" x2=\"{:.2}\" y2=\"{ylo:.2}\" stroke=\"#333333\"/>",
                    xc - 4.0,
                    xc + 4.0,
                    xc - 4.0,
                    xc + 4.0
                );
            }
        }
        let _ = writeln!(
            out,
            "<text x=\"{xc:.2}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            f.y0 + f.h + 16.0,
            esc(&b.label)
        );
    }
    let _ = writeln!(
        out,
        "<line x1=\"{:.1}\" y1=\"{y0:.2}\" x2=\"{:.1}\" y2=\"{y0:.2}\" stroke=\"#333333\"/>",
        f.x0,
        f.x0 + f.w
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders the real part of a distribution as a heatmap: time rightward,
/// frequency upward, diverging color scaled to the peak block magnitude,
/// with a labeled color bar. Grids larger than [`MAX_HEATMAP_CELLS`] per
/// axis are block-averaged first.
pub fn heatmap(dist: &TFDist, title: &str) -> String {
    let nt = dist.nt();
    let nf = dist.nf();
    let bt = nt.div_ceil(MAX_HEATMAP_CELLS);
    let bf = nf.div_ceil(MAX_HEATMAP_CELLS);
    let ct = nt.div_ceil(bt);
    let cf = nf.div_ceil(bf);
    let mut blocks = vec![0.0f64; ct * cf];
    for (i, block) in blocks.iter_mut().enumerate() {
        let (bi, bj) = (i / cf, i % cf);
        let mut acc = 0.0;
        let mut count = 0usize;
        for t in (bi * bt)..((bi + 1) * bt).min(nt) {
            for m in (bj * bf)..((bj + 1) * bf).min(nf) {
                acc += dist.value(t, m).re;
                count += 1;
            }
        }
        *block = acc / count as f64;
    }
    let vmax = blocks.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = if vmax > 0.0 { 1.0 / vmax } else { 0.0 };

    let bar_w = 16.0;
    let f = Frame {
        x0: MARGIN_LEFT,
        y0: MARGIN_TOP,
        w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT - bar_w - 52.0,
        h: HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
        xmin: dist.time_axis()[0],
        xmax: dist.time_axis()[nt - 1],
        ymin: dist.freq_axis()[0],
        ymax: dist.freq_axis()[nf - 1],
    };
    let mut out = svg_open(title);
    let cw = f.w / ct as f64;
    let ch = f.h / cf as f64;
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for bi in 0..ct {
        for bj in 0..cf {
            let u = blocks[bi * cf + bj] * scale;
            let x = f.x0 + cw * bi as f64;
            let y = f.y0 + f.h - ch * (bj + 1) as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"{}\"/>",
                diverging_color(u)
            );
        }
    }
    out.push_str("</g>\n");
    draw_frame_box(&mut out, &f);
    draw_x_ticks(&mut out, &f, 3);
    draw_y_ticks(&mut out, &f, 3);
    draw_axis_labels(&mut out, &f, "time", "frequency");

    let bx = f.x0 + f.w + 18.0;
    let steps = 64;
    let sh = f.h / steps as f64;
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for k in 0..steps {
        let u = 1.0 - 2.0 * (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{bx:.2}\" y=\"{:.2}\" width=\"{bar_w}\" height=\"{sh:.2}\" fill=\"{}\"/>",
            f.y0 + sh * k as f64,
            diverging_color(u)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        "<rect x=\"{bx:.2}\" y=\"{:.1}\" width=\"{bar_w}\" height=\"{:.1}\" fill=\"none\" stroke=\"#333333\"/>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{}</text>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{}</text>",
        f.y0,
        f.h,
        bx + bar_w + 4.0,
        f.y0 + 8.0,
        fmt_tick(vmax),
        bx + bar_w + 4.0,
        f.y0 + f.h,
        fmt_tick(-vmax)
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::SourceModel;
    use crate::tfa::wigner;

    fn chirp_dist(n: usize) -> TFDist {
        let x = SourceModel::chirp(0.05, 0.2, 1.0, 0)
            .realize(n, 1.0, 0)
            .unwrap();
        wigner(&x)
    }

    #[test]
    fn tick_labels_use_plain_decimals_in_moderate_ranges() {
        assert_eq!(fmt_tick(0.0), "0");
        assert_eq!(fmt_tick(0.5), "0.5");
        assert_eq!(fmt_tick(-0.25), "-0.25");
        assert_eq!(fmt_tick(100.0), "100");
        assert_eq!(fmt_tick(12345.0), "1.23e4");
        assert_eq!(fmt_tick(2.0e-5), "2.00e-5");
    }

    #[test]
    fn diverging_map_hits_white_and_both_endpoints() {
        assert_eq!(diverging_color(0.0), "#ffffff");
        assert_eq!(diverging_color(1.0), "#b2182b");
        assert_eq!(diverging_color(-1.0), "#2166ac");
        assert_eq!(diverging_color(f64::NAN), "#ffffff");
    }

    #[test]
    fn heatmap_caps_the_cell_count_by_block_averaging() {
        let d = chirp_dist(256);
        let s = heatmap(&d, "wd");
        let cells = s.matches("<rect").count();
        // 128x128 blocks + background + frame + color bar (64 + outline).
        assert_eq!(cells, 128 * 128 + 2 + 64 + 1);
        assert!(s.contains("</svg>"));
    }

    #[test]
    fn heatmap_paints_the_peak_with_the_endpoint_color() {
        let d = chirp_dist(64);
        let s = heatmap(&d, "wd");
        assert!(s.contains("#b2182b"));
    }

    #[test]
    fn heatmap_of_zero_grid_is_all_white() {
        let x = SourceModel::chirp(0.1, 0.1, 0.0, 0)
            .realize(32, 1.0, 0)
            .unwrap();
        let s = heatmap(&wigner(&x), "zeros");
        assert!(!s.contains("#b2182b"));
        assert!(!s.contains("#2166ac"));
    }

    #[test]
    fn renders_are_byte_identical_across_calls() {
        let d = chirp_dist(64);
        assert_eq!(heatmap(&d, "wd"), heatmap(&d, "wd"));
        let plot = LinePlot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "a".into(),
                points: vec![(0.0, 1.0), (1.0, 2.0)],
            }],
        };
        assert_eq!(line_plot(&plot).unwrap(), line_plot(&plot).unwrap());
    }

    #[test]
    fn line_plot_draws_each_series_with_its_legend_entry() {
        let plot = LinePlot {
            title: "overlay".into(),
            x_label: "snr".into(),
            y_label: "value".into(),
            series: vec![
                Series {
                    label: "left".into(),
                    points: vec![(0.5, 0.3), (1.0, 0.25), (2.0, 0.18)],
                },
                Series {
                    label: "right".into(),
                    points: vec![(0.5, 0.31), (1.0, 0.24), (2.0, 0.19)],
                },
            ],
        };
        let s = line_plot(&plot).unwrap();
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains(">left</text>"));
        assert!(s.contains(">right</text>"));
        assert!(s.contains(">snr</text>"));
    }

    #[test]
    fn line_plot_rejects_empty_and_nonfinite_input() {
        assert!(line_plot(&LinePlot {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![],
        })
        .is_err());
        assert!(line_plot(&LinePlot {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![Series {
                label: "a".into(),
                points: vec![(0.0, f64::NAN)],
            }],
        })
        .is_err());
    }

    #[test]
    fn single_point_series_still_renders() {
        let plot = LinePlot {
            title: "p".into(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![Series {
                label: "a".into(),
                points: vec![(1.0, 1.0)],
            }],
        };
        let s = line_plot(&plot).unwrap();
        assert!(s.contains("<circle"));
    }

    #[test]
    fn bar_chart_splits_signs_across_the_baseline() {
        let chart = BarChart {
            title: "terms".into(),
            y_label: "value".into(),
            bars: vec![
                Bar {
                    label: "1".into(),
                    value: 1.0,
                    stderr: None,
                },
                Bar {
                    label: "2".into(),
                    value: -2.0,
                    stderr: Some(0.25),
                },
            ],
        };
        let s = bar_chart(&chart).unwrap();
        assert_eq!(s.matches("fill=\"#1f77b4\"").count(), 1);
        assert_eq!(s.matches("fill=\"#d62728\"").count(), 1);
        // Whisker: one vertical line plus two caps.
        assert!(s.matches("stroke=\"#333333\"").count() >= 3);
        assert!(!s.contains("NaN"));
    }

    #[test]
    fn bar_chart_rejects_empty_and_negative_stderr() {
        assert!(bar_chart(&BarChart {
            title: String::new(),
            y_label: String::new(),
            bars: vec![],
        })
        .is_err());
        assert!(bar_chart(&BarChart {
            title: String::new(),
            y_label: String::new(),
            bars: vec![Bar {
                label: "1".into(),
                value: 1.0,
                stderr: Some(-0.1),
            }],
        })
        .is_err());
    }

    #[test]
    fn markup_escapes_reserved_characters() {
        let plot = LinePlot {
            title: "a < b & c".into(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![Series {
                label: "x<y".into(),
                points: vec![(0.0, 0.0), (1.0, 1.0)],
            }],
        };
        let s = line_plot(&plot).unwrap();
        assert!(s.contains("a &lt; b &amp; c"));
        assert!(s.contains("x&lt;y"));
    }
}
