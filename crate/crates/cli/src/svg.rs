//! Figure rendering as hand-written SVG.
//!
//! Two figures tell the story of a run: the geometry figure (agent paths
//! through the shaded slabs against the least-time reference) and the
//! convergence figure (per-round travel time for selected episodes against
//! the oracle line). Both are plain SVG 1.1 built with `format!`, so the
//! output bytes are a pure function of the inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use lightpath_core::{InterfaceState, LayeredMedium, RoundRecord};

/// Line colors for episode traces; red is reserved for the reference line.
const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#aec7e8", "#ffbb78", "#98df8a",
];

const AGENT_COLOR: &str = "#d62728";
const ORACLE_COLOR: &str = "#1f77b4";
const REFERENCE_COLOR: &str = "#d62728";

/// Draws the medium with its slabs shaded by refractive index, the given
/// agent paths in red (opacity ramping up with list position), and the
/// oracle path dashed in blue, endpoints marked.
pub fn render_path_svg(
    medium: &LayeredMedium,
    states: &[InterfaceState],
    oracle_state: &InterfaceState,
    destination: &Path,
) -> Result<()> {
    let world_w = (medium.num_slabs() as u32 * medium.slab_width()) as f64;
    let world_h = medium.height() as f64;
    let scale = (600.0 / world_w).min(360.0 / world_h);
    let (ml, mt) = (60.0, 42.0);
    let (mr, mb) = (30.0, 30.0);
    let plot_w = world_w * scale;
    let plot_h = world_h * scale;
    let width = ml + plot_w + mr;
    let height = mt + plot_h + mb;
    let px = |x: f64| ml + x * scale;
    let py = |y: f64| mt + (world_h - y) * scale;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    svg.push('\n');
    let _ = writeln!(
        svg,
        r##"  <rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">agent paths (red) and least-time path (dashed)</text>"#,
        ml + plot_w / 2.0
    );

    // Slabs, shaded darker for denser media.
    let indices = medium.indices();
    let (n_min, n_max) = indices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &n| {
        (lo.min(n), hi.max(n))
    });
    for (slab, &n) in indices.iter().enumerate() {
        let t = if n_max > n_min {
            (n - n_min) / (n_max - n_min)
        } else {
            0.5
        };
        let gray = (240.0 - 70.0 * t) as u8;
        let x0 = px(slab as f64 * medium.slab_width() as f64);
        let _ = writeln!(
            svg,
            r##"  <rect x="{x0:.2}" y="{:.2}" width="{:.2}" height="{plot_h:.2}" fill="#{gray:02x}{gray:02x}{gray:02x}" stroke="#888888" stroke-width="0.5"/>"##,
            py(world_h),
            medium.slab_width() as f64 * scale,
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">n={n}</text>"#,
            x0 + medium.slab_width() as f64 * scale / 2.0,
            py(world_h) - 6.0,
        );
    }

    // Agent paths, oldest faintest.
    for (position, state) in states.iter().enumerate() {
        let opacity = if states.len() > 1 {
            0.25 + 0.75 * position as f64 / (states.len() - 1) as f64
        } else {
            1.0
        };
        let points = polyline_points(medium, state, px, py)?;
        let _ = writeln!(
            svg,
            r#"  <polyline points="{points}" fill="none" stroke="{AGENT_COLOR}" stroke-width="1.5" stroke-opacity="{opacity:.2}"/>"#
        );
    }

    // The least-time reference path.
    let points = polyline_points(medium, oracle_state, px, py)?;
    let _ = writeln!(
        svg,
        r#"  <polyline points="{points}" fill="none" stroke="{ORACLE_COLOR}" stroke-width="2.5" stroke-dasharray="7 5"/>"#
    );

    // Endpoints.
    for (label, (x, y), dx) in [
        ("A", medium.start(), -12.0),
        ("B", medium.end(), 12.0),
    ] {
        let _ = writeln!(
            svg,
            r##"  <circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#000000"/>"##,
            px(x as f64),
            py(y as f64)
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{label}</text>"#,
            px(x as f64) + dx,
            py(y as f64) + 4.0
        );
    }

    svg.push_str("</svg>\n");
    fs::write(destination, svg)
        .with_context(|| format!("writing {}", destination.display()))
}

fn polyline_points(
    medium: &LayeredMedium,
    state: &InterfaceState,
    px: impl Fn(f64) -> f64,
    py: impl Fn(f64) -> f64,
) -> Result<String> {
    let crossings = medium.crossings(state)?;
    let mut points = String::new();
    for (i, (x, y)) in crossings.into_iter().enumerate() {
        if i > 0 {
            points.push(' ');
        }
        let _ = write!(points, "{:.2},{:.2}", px(x), py(y));
    }
    Ok(points)
}

/// Plots time per round for each episode present in `records`, one colored
/// polyline per episode, plus a dashed horizontal reference at the oracle's
/// least time. Axes are labeled round/time.
pub fn render_convergence_svg(
    records: &[RoundRecord],
    oracle_time: f64,
    destination: &Path,
) -> Result<()> {
    // Group rounds by episode, keeping first-seen episode order.
    let mut episodes: Vec<(u32, Vec<(u32, f64)>)> = Vec::new();
    for record in records {
        match episodes.last_mut() {
            Some((episode, rounds)) if *episode == record.episode => {
                rounds.push((record.round, record.time));
            }
            _ => episodes.push((record.episode, vec![(record.round, record.time)])),
        }
    }

    let max_round = records.iter().map(|r| r.round).max().unwrap_or(1).max(1);
    let (mut t_lo, mut t_hi) = records.iter().fold(
        (oracle_time, oracle_time),
        |(lo, hi), r| (lo.min(r.time), hi.max(r.time)),
    );
    if t_hi - t_lo < 1e-9 {
        t_hi += 1.0;
    }
    let pad = 0.04 * (t_hi - t_lo);
    t_lo -= pad;
    t_hi += pad;

    let (ml, mt, mb) = (74.0, 40.0, 56.0);
    let legend_w = 110.0;
    let (plot_w, plot_h) = (560.0, 340.0);
    let width = ml + plot_w + 24.0 + legend_w;
    let height = mt + plot_h + mb;
    let px = |round: f64| ml + plot_w * round / max_round as f64;
    let py = |time: f64| mt + plot_h * (t_hi - time) / (t_hi - t_lo);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    svg.push('\n');
    let _ = writeln!(
        svg,
        r##"  <rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">travel time per round</text>"#,
        ml + plot_w / 2.0
    );

    // Axes and ticks.
    let _ = writeln!(
        svg,
        r##"  <rect x="{ml:.2}" y="{mt:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#000000" stroke-width="1"/>"##
    );
    for i in 0..=4u32 {
        let round = (max_round as f64 * i as f64 / 4.0).round();
        let x = px(round);
        let _ = writeln!(
            svg,
            r##"  <line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
            mt + plot_h,
            mt + plot_h + 5.0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{round:.0}</text>"#,
            mt + plot_h + 19.0
        );
        let time = t_lo + (t_hi - t_lo) * i as f64 / 4.0;
        let y = py(time);
        let _ = writeln!(
            svg,
            r##"  <line x1="{:.2}" y1="{y:.2}" x2="{ml:.2}" y2="{y:.2}" stroke="#000000" stroke-width="1"/>"##,
            ml - 5.0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{time:.1}</text>"#,
            ml - 9.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">round</text>"#,
        ml + plot_w / 2.0,
        mt + plot_h + 42.0
    );
    let _ = writeln!(
        svg,
        r#"  <text x="20" y="{0:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90, 20, {0:.2})">time T</text>"#,
        mt + plot_h / 2.0
    );

    // One trace per episode.
    for (series, (_, rounds)) in episodes.iter().enumerate() {
        let color = PALETTE[series % PALETTE.len()];
        let mut points = String::new();
        for (i, &(round, time)) in rounds.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", px(round as f64), py(time));
        }
        let _ = writeln!(
            svg,
            r#"  <polyline points="{points}" fill="none" stroke="{color}" stroke-width="1" stroke-opacity="0.9"/>"#
        );
    }

    // Reference: the least possible time.
    let y_ref = py(oracle_time);
    let _ = writeln!(
        svg,
        r#"  <line x1="{ml:.2}" y1="{y_ref:.2}" x2="{:.2}" y2="{y_ref:.2}" stroke="{REFERENCE_COLOR}" stroke-width="1.5" stroke-dasharray="5 4"/>"#,
        ml + plot_w
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{REFERENCE_COLOR}">least time {oracle_time:.1}</text>"#,
        ml + 6.0,
        y_ref - 5.0
    );

    // Legend, capped so long runs stay readable.
    let legend_x = ml + plot_w + 24.0;
    for (series, (episode, _)) in episodes.iter().enumerate().take(16) {
        let color = PALETTE[series % PALETTE.len()];
        let y = mt + 10.0 + series as f64 * 18.0;
        let _ = writeln!(
            svg,
            r#"  <line x1="{legend_x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            legend_x + 22.0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">episode {episode}</text>"#,
            legend_x + 28.0,
            y + 4.0
        );
    }
    if episodes.len() > 16 {
        let y = mt + 10.0 + 16.0 * 18.0;
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">(+{} more)</text>"#,
            legend_x + 28.0,
            y + 4.0,
            episodes.len() - 16
        );
    }

    svg.push_str("</svg>\n");
    fs::write(destination, svg)
        .with_context(|| format!("writing {}", destination.display()))
}
