//! Text renderings: ASCII heat maps and patterns, and an SVG lozenge
//! (isometric cube) projection of plane partitions.

use std::fmt::Write;

use super::{GtPatternRecord, GtStats, PlanePartitionRecord, RunConfig, SppStats};
use crate::oracle::TestReport;

/// Heat ramp from height 0 to the maximum; cells of π print as `x`.
const RAMP: &[u8] = b" .:=+*#%@";

pub fn ascii_header(cfg: &RunConfig) -> String {
    format!("# {}\n", serde_json::to_string(cfg).expect("config serializes"))
}

fn ramp(h: i64, max: i64) -> char {
    if max <= 0 {
        return RAMP[0] as char;
    }
    let idx = (h as f64 / max as f64 * (RAMP.len() - 1) as f64).round() as usize;
    RAMP[idx.min(RAMP.len() - 1)] as char
}

/// Height grid next to its heat map.
pub fn ascii_plane_partition(r: &PlanePartitionRecord) -> String {
    let max = r.entries.iter().flatten().flatten().copied().max().unwrap_or(0);
    let width = max.to_string().len().max(1);
    let mut out = format!("sample {} volume={} draws={}\n", r.index, r.volume, r.draws);
    for row in &r.entries {
        let nums: Vec<String> = row
            .iter()
            .map(|c| match c {
                Some(h) => format!("{h:>width$}"),
                None => format!("{:>width$}", "x"),
            })
            .collect();
        let heat: String = row.iter().map(|c| c.map_or('x', |h| ramp(h, max))).collect();
        let _ = writeln!(out, "  {}  |{heat}|", nums.join(" "));
    }
    out
}

pub fn ascii_gt_pattern(r: &GtPatternRecord) -> String {
    let width = r.levels.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    let mut out = format!("sample {} draws={}\n", r.index, r.draws);
    for (k, level) in r.levels.iter().enumerate().rev() {
        let indent = (r.n - 1 - k) * (width + 1) / 2;
        let row: Vec<String> = level.iter().map(|x| format!("{x:>width$}")).collect();
        let _ = writeln!(out, "  {}{}", " ".repeat(indent), row.join(" "));
    }
    out
}

pub fn ascii_gt_stats(s: &GtStats) -> String {
    let mut out = format!("samples={} N={} mean_draws={:.3}\n", s.samples, s.n, s.mean_draws);
    for (k, ((mean, lo), hi)) in s.mean_levels.iter().zip(&s.min_levels).zip(&s.max_levels).enumerate() {
        let cells: Vec<String> = mean.iter().zip(lo.iter().zip(hi)).map(|(m, (l, h))| format!("{m:.3}[{l},{h}]")).collect();
        let _ = writeln!(out, "  level {:>3}: {}", k + 1, cells.join(" "));
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}

pub fn ascii_spp_stats(s: &SppStats) -> String {
    let mut out = format!(
        "samples={} A={} B={} pi={:?} q={}\nmean volume {:.4} (std error {}), exact {}, z {}\nmean draws {:.3}, max {}\nmean height:\n",
        s.samples,
        s.a,
        s.b,
        s.pi,
        opt(s.q),
        s.mean_volume,
        opt(s.volume_std_error),
        opt(s.closed_form_mean_volume),
        opt(s.z_score),
        s.mean_draws,
        s.max_draws,
    );
    for row in &s.mean_height {
        let cells: Vec<String> = row.iter().map(|c| c.map_or_else(|| format!("{:>8}", "x"), |v| format!("{v:>8.3}"))).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
    out
}

pub fn ascii_check(c: &TestReport) -> String {
    format!("    {}\n", c.summary_line())
}

const UNIT: f64 = 14.0;
const COS30: f64 = 0.866_025_403_784_438_6;

/// Isometric image of the box point (row x, column y, height z).
fn project(x: f64, y: f64, z: f64) -> (f64, f64) {
    ((y - x) * COS30 * UNIT, ((x + y) * 0.5 - z) * UNIT)
}

fn polygon(out: &mut String, pts: [(f64, f64, f64); 4], dx: f64, dy: f64, fill: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y, z)| {
            let (u, v) = project(x, y, z);
            format!("{:.2},{:.2}", u + dx, v + dy)
        })
        .collect();
    let _ = writeln!(out, r##"<polygon points="{}" fill="{fill}" stroke="#333" stroke-width="0.6"/>"##, coords.join(" "));
}

/// All samples side by side, each drawn as a stack of unit cubes with the
/// three visible faces shaded differently.
pub fn svg_plane_partitions(cfg: &RunConfig, records: &[PlanePartitionRecord]) -> String {
    let (a, b) = (cfg.a as f64, cfg.b as f64);
    let max_h = records.iter().flat_map(|r| r.entries.iter().flatten().flatten().copied()).max().unwrap_or(0) as f64;
    let margin = UNIT;
    let panel_w = (a + b) * COS30 * UNIT + 2.0 * margin;
    let panel_h = ((a + b) * 0.5 + max_h) * UNIT + 2.0 * margin;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.2} {:.2}\">\n",
        panel_w * records.len() as f64,
        panel_h,
        panel_w * records.len() as f64,
        panel_h
    );
    for (p, r) in records.iter().enumerate() {
        let dx = p as f64 * panel_w + margin + a * COS30 * UNIT;
        let dy = margin + max_h * UNIT;
        let height = |i: usize, j: usize| r.entries.get(i).and_then(|row| row.get(j)).copied().flatten();
        let _ = writeln!(out, "<g><title>sample {} volume {}</title>", r.index, r.volume);
        for (i, row) in r.entries.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if cell.is_some() {
                    let (x, y) = (i as f64, j as f64);
                    polygon(&mut out, [(x, y, 0.0), (x + 1.0, y, 0.0), (x + 1.0, y + 1.0, 0.0), (x, y + 1.0, 0.0)], dx, dy, "#f4f4f4");
                }
            }
        }
        // painter's order: nearer cubes have larger i + j + k
        let mut cubes: Vec<(usize, usize, i64)> = Vec::new();
        for (i, row) in r.entries.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                cubes.extend((0..cell.unwrap_or(0)).map(|k| (i, j, k)));
            }
        }
        cubes.sort_by_key(|&(i, j, k)| (i as i64 + j as i64 + k, i, j));
        for (i, j, k) in cubes {
            let (x, y, z) = (i as f64, j as f64, k as f64);
            let below = |h: Option<i64>| h.is_none_or(|h| h <= k);
            if height(i, j).is_none_or(|h| h <= k + 1) {
                polygon(&mut out, [(x, y, z + 1.0), (x + 1.0, y, z + 1.0), (x + 1.0, y + 1.0, z + 1.0), (x, y + 1.0, z + 1.0)], dx, dy, "#e8c170");
            }
            if below(height(i + 1, j)) {
                polygon(&mut out, [(x + 1.0, y, z), (x + 1.0, y + 1.0, z), (x + 1.0, y + 1.0, z + 1.0), (x + 1.0, y, z + 1.0)], dx, dy, "#b5651d");
            }
            if below(height(i, j + 1)) {
                polygon(&mut out, [(x, y + 1.0, z), (x + 1.0, y + 1.0, z), (x + 1.0, y + 1.0, z + 1.0), (x, y + 1.0, z + 1.0)], dx, dy, "#7a4419");
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
