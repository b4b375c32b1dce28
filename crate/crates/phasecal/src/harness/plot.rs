//! Deterministic SVG rendering of sweep results: for each δ one file with
//! two panels — the aggregated λ lower bound (log scale) and the recovery
//! probability (linear) against ρ, one curve per L.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::sweep::CellResult;

const WIDTH: f64 = 560.0;
const PANEL_HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn fnum(v: f64) -> String {
    format!("{:.6}", v)
}

struct Panel {
    svg: String,
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    log_y: bool,
}

impl Panel {
    fn new(y_offset: f64, xmin: f64, xmax: f64, ymin: f64, ymax: f64, log_y: bool) -> Self {
        Self {
            svg: String::new(),
            x0: MARGIN_LEFT,
            y0: y_offset + MARGIN_TOP,
            w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            h: PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
            xmin,
            xmax,
            ymin,
            ymax,
            log_y,
        }
    }

    fn tx(&self, x: f64) -> f64 {
        if self.xmax > self.xmin {
            self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * self.w
        } else {
            self.x0 + self.w / 2.0
        }
    }

    fn ty(&self, y: f64) -> f64 {
        let (y, ymin, ymax) = if self.log_y {
            (y.log10(), self.ymin.log10(), self.ymax.log10())
        } else {
            (y, self.ymin, self.ymax)
        };
        if ymax > ymin {
            self.y0 + self.h - (y - ymin) / (ymax - ymin) * self.h
        } else {
            self.y0 + self.h / 2.0
        }
    }

    fn frame(&mut self, title: &str, ylabel: &str) {
        self.svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
            fnum(self.x0),
            fnum(self.y0),
            fnum(self.w),
            fnum(self.h)
        ));
        self.svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            fnum(self.x0 + self.w / 2.0),
            fnum(self.y0 - 14.0),
            title
        ));
        self.svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 {} {})\">{}</text>\n",
            fnum(self.x0 - 50.0),
            fnum(self.y0 + self.h / 2.0),
            fnum(self.x0 - 50.0),
            fnum(self.y0 + self.h / 2.0),
            ylabel
        ));
    }

    fn x_ticks(&mut self, ticks: &[f64]) {
        for &t in ticks {
            let x = self.tx(t);
            self.svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
                fnum(x),
                fnum(self.y0 + self.h),
                fnum(x),
                fnum(self.y0 + self.h + 5.0)
            ));
            self.svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{t}</text>\n",
                fnum(x),
                fnum(self.y0 + self.h + 18.0)
            ));
        }
        self.svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">rho = K/M</text>\n",
            fnum(self.x0 + self.w / 2.0),
            fnum(self.y0 + self.h + 36.0)
        ));
    }

    fn y_ticks(&mut self, ticks: &[f64]) {
        for &t in ticks {
            let y = self.ty(t);
            if y < self.y0 - 1e-9 || y > self.y0 + self.h + 1e-9 {
                continue;
            }
            self.svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
                fnum(self.x0 - 5.0),
                fnum(y),
                fnum(self.x0),
                fnum(y)
            ));
            self.svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{t}</text>\n",
                fnum(self.x0 - 8.0),
                fnum(y + 4.0)
            ));
        }
    }

    fn curve(&mut self, points: &[(f64, f64)], color: &str, label: &str, slot: usize) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> =
            points.iter().map(|&(x, y)| format!("{},{}", fnum(self.tx(x)), fnum(self.ty(y)))).collect();
        if points.len() > 1 {
            self.svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
                coords.join(" ")
            ));
        }
        for &(x, y) in points {
            self.svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                fnum(self.tx(x)),
                fnum(self.ty(y))
            ));
        }
        // legend entry
        let lx = self.x0 + self.w - 90.0;
        let ly = self.y0 + 14.0 + 16.0 * slot as f64;
        self.svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            fnum(lx),
            fnum(ly - 4.0),
            fnum(lx + 22.0),
            fnum(ly - 4.0)
        ));
        self.svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\">{label}</text>\n",
            fnum(lx + 28.0),
            fnum(ly)
        ));
    }
}

fn log_ticks(ymin: f64, ymax: f64) -> Vec<f64> {
    let lo = ymin.log10().floor() as i32;
    let hi = ymax.log10().ceil() as i32;
    (lo..=hi).map(|e| 10f64.powi(e)).collect()
}

/// Renders one SVG per δ value. Output bytes are a pure function of the
/// input cells. Returns the written paths.
pub fn emit_plots(cells: &[CellResult], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if cells.is_empty() {
        return Err(Error::EmptyInput("plot cells"));
    }
    std::fs::create_dir_all(out_dir)?;

    let mut deltas: Vec<f64> = cells.iter().map(|c| c.delta).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();

    let mut written = Vec::new();
    for delta in deltas {
        let subset: Vec<&CellResult> =
            cells.iter().filter(|c| c.delta == delta).collect();
        let mut ls: Vec<usize> = subset.iter().map(|c| c.l).collect();
        ls.sort_unstable();
        ls.dedup();
        let mut rhos: Vec<f64> = subset.iter().map(|c| c.rho).collect();
        rhos.sort_by(f64::total_cmp);
        rhos.dedup();

        let xmin = *rhos.first().unwrap();
        let xmax = *rhos.last().unwrap();

        let lows: Vec<f64> = subset
            .iter()
            .filter_map(|c| c.lambda_low_agg)
            .filter(|v| v.is_finite() && *v > 0.0)
            .collect();
        let (ymin_l, ymax_l) = if lows.is_empty() {
            (1e-2, 1.0)
        } else {
            let lo = lows.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = lows.iter().copied().fold(0.0f64, f64::max);
            (lo / 2.0, (hi * 2.0).max(lo))
        };

        let total_height = 2.0 * PANEL_HEIGHT + 20.0;
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            WIDTH, total_height, WIDTH, total_height
        );

        let mut top = Panel::new(0.0, xmin, xmax, ymin_l, ymax_l, true);
        top.frame(&format!("Lower bound on lambda, delta = {delta}"), "lambda_low");
        top.x_ticks(&rhos);
        top.y_ticks(&log_ticks(ymin_l, ymax_l));
        for (slot, &l) in ls.iter().enumerate() {
            let pts: Vec<(f64, f64)> = subset
                .iter()
                .filter(|c| c.l == l)
                .filter_map(|c| {
                    c.lambda_low_agg
                        .filter(|v| v.is_finite() && *v > 0.0)
                        .map(|v| (c.rho, v))
                })
                .collect();
            let mut pts = pts;
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            top.curve(&pts, PALETTE[slot % PALETTE.len()], &format!("L = {l}"), slot);
        }
        svg.push_str(&top.svg);

        let mut bottom =
            Panel::new(PANEL_HEIGHT + 20.0, xmin, xmax, 0.0, 1.0, false);
        bottom.frame(&format!("Probability of recovery, delta = {delta}"), "probability");
        bottom.x_ticks(&rhos);
        bottom.y_ticks(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        for (slot, &l) in ls.iter().enumerate() {
            let mut pts: Vec<(f64, f64)> = subset
                .iter()
                .filter(|c| c.l == l)
                .map(|c| (c.rho, c.probability))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            bottom.curve(&pts, PALETTE[slot % PALETTE.len()], &format!("L = {l}"), slot);
        }
        svg.push_str(&bottom.svg);
        svg.push_str("</svg>\n");

        let path = out_dir.join(format!("transition_delta_{delta}.svg"));
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}
