//! Minimal deterministic SVG 1.1 output: ABF curves, box summaries and swarm
//! snapshots. Numbers are printed with fixed precision so identical inputs
//! give identical bytes.

use std::fmt::Write as _;

use crate::harness::DynamicsReport;
use crate::stats::{BoxSummary, ComparisonReport};

/// Nonpositive values are clamped to this before taking logs.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-16;

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, w: f64, h: f64, title: &str, floor: Option<f64>) {
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    if let Some(f) = floor {
        writeln!(out, r#"<metadata>log-floor={f:e}</metadata>"#).unwrap();
    }
    writeln!(out, r##"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="#ffffff"/>"##).unwrap();
    writeln!(out, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, esc(title))
        .unwrap();
}

/// Log10 axis covering `values` (clamped at `floor`), snapped to decades.
struct LogAxis {
    lo: f64,
    hi: f64,
}

impl LogAxis {
    fn new<'a>(values: impl Iterator<Item = &'a f64>, floor: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let l = v.max(floor).log10();
            lo = lo.min(l);
            hi = hi.max(l);
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        let (lo, mut hi) = (lo.floor(), hi.ceil());
        if hi <= lo {
            hi = lo + 1.0;
        }
        LogAxis { lo, hi }
    }

    fn y(&self, v: f64, floor: f64) -> f64 {
        let l = v.max(floor).log10();
        TOP + (H - TOP - BOTTOM) * (1.0 - (l - self.lo) / (self.hi - self.lo))
    }

    fn draw(&self, out: &mut String, floor: f64) {
        let span = (self.hi - self.lo) as i64;
        let step = (span / 8).max(1);
        let mut e = self.lo as i64;
        while e <= self.hi as i64 {
            let y = self.y(10f64.powi(e as i32), floor);
            writeln!(
                out,
                r##"<line x1="{LEFT:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.1}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
                W - RIGHT,
                LEFT - 6.0,
                y + 4.0
            )
            .unwrap();
            e += step;
        }
        writeln!(
            out,
            r##"<line x1="{LEFT:.1}" y1="{TOP:.1}" x2="{LEFT:.1}" y2="{:.1}" stroke="#000000"/>"##,
            H - BOTTOM
        )
        .unwrap();
    }
}

fn legend(out: &mut String, labels: &[&str]) {
    for (k, l) in labels.iter().enumerate() {
        let y = TOP + 16.0 * k as f64;
        let x = W - RIGHT + 12.0;
        writeln!(
            out,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="3" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y + 4.0,
            PALETTE[k % PALETTE.len()],
            x + 18.0,
            y + 9.0,
            esc(l)
        )
        .unwrap();
    }
}

/// One polyline per algorithm over iterations `1..=L`, log-scaled fitness.
pub fn abf_svg(objective: &str, series: &[(String, Vec<f64>)], floor: f64) -> String {
    let mut out = String::new();
    header(&mut out, W, H, &format!("ABF on {objective}"), Some(floor));
    let axis = LogAxis::new(series.iter().flat_map(|(_, v)| v.iter()), floor);
    axis.draw(&mut out, floor);
    let len = series.iter().map(|(_, v)| v.len()).max().unwrap_or(1).max(2);
    let x = |i: usize| LEFT + (W - LEFT - RIGHT) * i as f64 / (len - 1) as f64;
    writeln!(
        out,
        r##"<line x1="{LEFT:.1}" y1="{0:.1}" x2="{1:.1}" y2="{0:.1}" stroke="#000000"/><text x="{2:.1}" y="{3:.1}" text-anchor="middle">iteration (1..{len})</text>"##,
        H - BOTTOM,
        W - RIGHT,
        (LEFT + W - RIGHT) / 2.0,
        H - 15.0
    )
    .unwrap();
    for (k, (label, values)) in series.iter().enumerate() {
        let pts: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{:.2},{:.2}", x(i), axis.y(*v, floor)))
            .collect();
        writeln!(
            out,
            r#"<polyline class="abf" data-algorithm="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            esc(label),
            PALETTE[k % PALETTE.len()],
            pts.join(" ")
        )
        .unwrap();
    }
    let labels: Vec<&str> = series.iter().map(|(l, _)| l.as_str()).collect();
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    out
}

/// Box per algorithm (quartiles, median, whiskers at 1.5 IQR, outliers) on a
/// log axis, followed by the pairwise significance classes.
pub fn box_svg(objective: &str, boxes: &[(String, BoxSummary)], report: Option<&ComparisonReport>, floor: f64) -> String {
    let mut out = String::new();
    let extra = report.map_or(0, |r| r.pairs.len());
    let h_total = H + 14.0 * extra as f64;
    header(&mut out, W, h_total, &format!("Final best on {objective}"), Some(floor));
    let axis = LogAxis::new(boxes.iter().flat_map(|(_, b)| [&b.min, &b.max]), floor);
    axis.draw(&mut out, floor);
    let slot = (W - LEFT - RIGHT) / boxes.len().max(1) as f64;
    for (k, (label, b)) in boxes.iter().enumerate() {
        let cx = LEFT + slot * (k as f64 + 0.5);
        let half = slot * 0.25;
        let color = PALETTE[k % PALETTE.len()];
        let q1 = axis.y(b.q1, floor);
        let q3 = axis.y(b.q3, floor);
        let med = axis.y(b.median, floor);
        let wlo = axis.y(b.whisker_low, floor);
        let whi = axis.y(b.whisker_high, floor);
        let (bx, bw, bh) = (cx - half, 2.0 * half, (q1 - q3).max(0.5));
        let (mx0, mx1) = (cx - half, cx + half);
        let label_esc = esc(label);
        writeln!(
            out,
            r##"<g class="box" data-algorithm="{label_esc}"><line x1="{cx:.2}" y1="{wlo:.2}" x2="{cx:.2}" y2="{q1:.2}" stroke="#000000"/><line x1="{cx:.2}" y1="{q3:.2}" x2="{cx:.2}" y2="{whi:.2}" stroke="#000000"/><rect x="{bx:.2}" y="{q3:.2}" width="{bw:.2}" height="{bh:.2}" fill="{color}" fill-opacity="0.4" stroke="{color}"/><line x1="{mx0:.2}" y1="{med:.2}" x2="{mx1:.2}" y2="{med:.2}" stroke="#000000" stroke-width="2"/>"##
        )
        .unwrap();
        for o in &b.outliers {
            writeln!(out, r#"<circle cx="{cx:.2}" cy="{:.2}" r="2" fill="none" stroke="{color}"/>"#, axis.y(*o, floor))
                .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.1}" text-anchor="middle">{}</text></g>"#,
            H - BOTTOM + 16.0,
            esc(label)
        )
        .unwrap();
    }
    if let Some(r) = report {
        for (k, p) in r.pairs.iter().enumerate() {
            writeln!(
                out,
                r#"<text class="pair" x="{LEFT:.1}" y="{:.1}">{} vs {}: p_adj={:.3e} {}</text>"#,
                H + 14.0 * k as f64,
                esc(&p.a),
                esc(&p.b),
                p.p_adjusted,
                p.class
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

/// One panel per frame (start first). The head member is drawn as a larger
/// red marker with class `leader`; the start panel is labelled "Start".
pub fn dynamics_svg(report: &DynamicsReport) -> String {
    let frames: Vec<&Vec<Vec<f64>>> = std::iter::once(&report.start).chain(report.snapshots.iter()).collect();
    let cols = 4usize.min(frames.len()).max(1);
    let rows = frames.len().div_ceil(cols);
    let panel = 160.0;
    let gap = 24.0;
    let w = cols as f64 * (panel + gap) + gap;
    let h = rows as f64 * (panel + gap + 14.0) + 40.0;
    let mut out = String::new();
    header(&mut out, w, h, &format!("{} on random fitness, seed {}", report.preset, report.seed), None);
    let (lo, hi) = (report.bounds.lower(), report.bounds.upper());
    let (ax, ay) = (0usize, 1usize.min(report.bounds.dim() - 1));
    for (f, frame) in frames.iter().enumerate() {
        let (r, c) = (f / cols, f % cols);
        let x0 = gap + c as f64 * (panel + gap);
        let y0 = 40.0 + r as f64 * (panel + gap + 14.0);
        let title = if f == 0 { "Start".to_string() } else { format!("iteration {f}") };
        writeln!(
            out,
            r##"<g class="frame" data-iteration="{f}"><rect x="{x0:.1}" y="{y0:.1}" width="{panel:.1}" height="{panel:.1}" fill="none" stroke="#000000"/><text x="{:.1}" y="{:.1}" text-anchor="middle">{title}</text>"##,
            x0 + panel / 2.0,
            y0 + panel + 13.0
        )
        .unwrap();
        let px = |v: f64| x0 + panel * (v - lo[ax]) / (hi[ax] - lo[ax]);
        let py = |v: f64| y0 + panel * (1.0 - (v - lo[ay]) / (hi[ay] - lo[ay]));
        for (m, p) in frame.iter().enumerate() {
            if m == report.head_index {
                continue;
            }
            writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="2" fill="#1f77b4"/>"##, px(p[ax]), py(p[ay])).unwrap();
        }
        if let Some(p) = frame.get(report.head_index) {
            writeln!(
                out,
                r##"<circle class="leader" data-member="{}" cx="{:.2}" cy="{:.2}" r="4" fill="#d62728" stroke="#000000"/>"##,
                report.head_index,
                px(p[ax]),
                py(p[ay])
            )
            .unwrap();
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
