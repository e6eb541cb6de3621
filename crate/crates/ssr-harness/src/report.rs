use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::runner::RESULT_COLUMNS;

/// The slice of a results row that aggregation needs.
#[derive(Debug, Clone)]
pub struct ParsedRow {
    pub algo: String,
    pub seed: u64,
    pub t: u64,
    pub window_loss: Option<f64>,
    pub param_err: Option<f64>,
    pub avg_param_err: Option<f64>,
}

fn opt_f64(field: &str, name: &str, line: usize, path: &Path) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse::<f64>().map(Some).map_err(|_| {
        HarnessError::Data(format!(
            "{} line {line}: bad {name} value {field:?}",
            path.display()
        ))
    })
}

fn req_u64(field: &str, name: &str, line: usize, path: &Path) -> Result<u64> {
    field.parse::<u64>().map_err(|_| {
        HarnessError::Data(format!(
            "{} line {line}: bad {name} value {field:?}",
            path.display()
        ))
    })
}

/// Read one or more results files, insisting on the exact column layout.
pub fn read_results(paths: &[std::path::PathBuf]) -> Result<Vec<ParsedRow>> {
    let mut rows = Vec::new();
    for path in paths {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?
            .clone();
        for (i, expected) in RESULT_COLUMNS.iter().enumerate() {
            match headers.get(i) {
                Some(found) if found == *expected => {}
                Some(found) => {
                    return Err(HarnessError::Data(format!(
                        "{}: column {} is {found:?}, expected {expected:?}",
                        path.display(),
                        i + 1
                    )));
                }
                None => {
                    return Err(HarnessError::Data(format!(
                        "{}: missing column {expected:?}",
                        path.display()
                    )));
                }
            }
        }
        if headers.len() > RESULT_COLUMNS.len() {
            return Err(HarnessError::Data(format!(
                "{}: unexpected extra column {:?}",
                path.display(),
                headers.get(RESULT_COLUMNS.len()).unwrap_or("")
            )));
        }
        for (rownum, record) in reader.records().enumerate() {
            let line = rownum + 2;
            let record =
                record.map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
            if record.len() != RESULT_COLUMNS.len() {
                return Err(HarnessError::Data(format!(
                    "{} line {line}: {} fields, expected {}",
                    path.display(),
                    record.len(),
                    RESULT_COLUMNS.len()
                )));
            }
            rows.push(ParsedRow {
                algo: record[2].to_string(),
                seed: req_u64(&record[1], "seed", line, path)?,
                t: req_u64(&record[3], "t", line, path)?,
                window_loss: opt_f64(&record[5], "window_loss", line, path)?,
                param_err: opt_f64(&record[6], "param_err", line, path)?,
                avg_param_err: opt_f64(&record[7], "avg_param_err", line, path)?,
            });
        }
    }
    Ok(rows)
}

/// Interpolated quantile of an ascending slice, p in [0, 1].
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Median with quartiles over the seeds that reported a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStats {
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

fn stats(values: &mut [f64]) -> Option<MetricStats> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    Some(MetricStats {
        median: quantile(values, 0.5),
        q25: quantile(values, 0.25),
        q75: quantile(values, 0.75),
    })
}

/// Across-seed aggregate at one (algo, t) point.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub algo: String,
    pub t: u64,
    pub seeds: usize,
    pub window_loss: Option<MetricStats>,
    pub param_err: Option<MetricStats>,
    pub avg_param_err: Option<MetricStats>,
}

/// Group rows by (algo, t) and take across-seed medians and quartiles.
pub fn summarize(rows: &[ParsedRow]) -> Vec<SummaryRow> {
    #[derive(Default)]
    struct Bucket {
        seeds: std::collections::BTreeSet<u64>,
        window_loss: Vec<f64>,
        param_err: Vec<f64>,
        avg_param_err: Vec<f64>,
    }
    let mut groups: BTreeMap<(String, u64), Bucket> = BTreeMap::new();
    for row in rows {
        let b = groups.entry((row.algo.clone(), row.t)).or_default();
        b.seeds.insert(row.seed);
        if let Some(v) = row.window_loss {
            b.window_loss.push(v);
        }
        if let Some(v) = row.param_err {
            b.param_err.push(v);
        }
        if let Some(v) = row.avg_param_err {
            b.avg_param_err.push(v);
        }
    }
    groups
        .into_iter()
        .map(|((algo, t), mut b)| SummaryRow {
            algo,
            t,
            seeds: b.seeds.len(),
            window_loss: stats(&mut b.window_loss),
            param_err: stats(&mut b.param_err),
            avg_param_err: stats(&mut b.avg_param_err),
        })
        .collect()
}

fn stat_fields(s: Option<MetricStats>) -> [String; 3] {
    match s {
        Some(s) => [s.median.to_string(), s.q25.to_string(), s.q75.to_string()],
        None => [String::new(), String::new(), String::new()],
    }
}

pub const SUMMARY_COLUMNS: [&str; 12] = [
    "algo",
    "t",
    "seeds",
    "window_loss_med",
    "window_loss_q25",
    "window_loss_q75",
    "param_err_med",
    "param_err_q25",
    "param_err_q75",
    "avg_param_err_med",
    "avg_param_err_q25",
    "avg_param_err_q75",
];

pub fn write_summary_csv(out: &mut dyn Write, summary: &[SummaryRow]) -> Result<()> {
    writeln!(out, "{}", SUMMARY_COLUMNS.join(","))?;
    for row in summary {
        let w = stat_fields(row.window_loss);
        let p = stat_fields(row.param_err);
        let a = stat_fields(row.avg_param_err);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.algo, row.t, row.seeds, w[0], w[1], w[2], p[0], p[1], p[2], a[0], a[1], a[2]
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SvgOptions {
    pub logx: bool,
    pub logy: bool,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Panel {
    title: &'static str,
    /// Per algorithm, the (t, median) curve in ascending t.
    curves: Vec<(String, Vec<(f64, f64)>)>,
}

fn panel_curves(
    summary: &[SummaryRow],
    pick: impl Fn(&SummaryRow) -> Option<MetricStats>,
) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut by_algo: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in summary {
        if let Some(s) = pick(row) {
            by_algo
                .entry(row.algo.clone())
                .or_default()
                .push((row.t as f64, s.median));
        }
    }
    by_algo.into_iter().filter(|(_, pts)| !pts.is_empty()).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (0.01..10000.0).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// Render per-algorithm median curves as a self-contained SVG document: a
/// loss panel and, when parameter error is available, an estimate-error
/// panel. Log scaling drops nonpositive points with a warning on stderr.
pub fn render_svg(summary: &[SummaryRow], opts: SvgOptions) -> Result<String> {
    let mut panels = Vec::new();
    let loss = panel_curves(summary, |r| r.window_loss);
    if !loss.is_empty() {
        panels.push(Panel { title: "windowed loss", curves: loss });
    }
    let param = panel_curves(summary, |r| r.avg_param_err.or(r.param_err));
    if !param.is_empty() {
        panels.push(Panel { title: "parameter error", curves: param });
    }
    if panels.is_empty() {
        return Err(HarnessError::Data("no plottable metrics in input".into()));
    }

    let (width, panel_h) = (720.0, 300.0);
    let (ml, mr, mt, mb) = (80.0, 24.0, 34.0, 50.0);
    let height = panel_h * panels.len() as f64;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));

    let mut dropped = 0usize;
    for (pi, panel) in panels.iter().enumerate() {
        let top = pi as f64 * panel_h + mt;
        let bottom = (pi + 1) as f64 * panel_h - mb;
        let left = ml;
        let right = width - mr;

        // Transform to plotting space, dropping what a log axis cannot show.
        let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for (name, pts) in &panel.curves {
            let kept: Vec<(f64, f64)> = pts
                .iter()
                .filter(|(x, y)| {
                    let ok = (!opts.logx || *x > 0.0) && (!opts.logy || *y > 0.0);
                    if !ok {
                        dropped += 1;
                    }
                    ok
                })
                .map(|(x, y)| {
                    (
                        if opts.logx { x.ln() } else { *x },
                        if opts.logy { y.ln() } else { *y },
                    )
                })
                .collect();
            if !kept.is_empty() {
                curves.push((name.clone(), kept));
            }
        }
        if curves.is_empty() {
            return Err(HarnessError::Data(format!(
                "panel {:?} has no plottable points under the requested axes",
                panel.title
            )));
        }

        let all: Vec<(f64, f64)> = curves.iter().flat_map(|(_, p)| p.iter().copied()).collect();
        let (mut x0, mut x1) = all.iter().fold((f64::MAX, f64::MIN), |(lo, hi), (x, _)| {
            (lo.min(*x), hi.max(*x))
        });
        let (mut y0, mut y1) = all.iter().fold((f64::MAX, f64::MIN), |(lo, hi), (_, y)| {
            (lo.min(*y), hi.max(*y))
        });
        if x1 == x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 == y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = (y1 - y0) * 0.05;
        y0 -= pad;
        y1 += pad;
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
        let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"14\" font-weight=\"bold\">{}</text>\n",
            left,
            top - 12.0,
            panel.title
        ));
        svg.push_str(&format!(
            "<line x1=\"{left}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"black\"/>\n\
             <line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{bottom}\" stroke=\"black\"/>\n"
        ));

        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let px = sx(fx);
            let label = tick_label(if opts.logx { fx.exp() } else { fx });
            svg.push_str(&format!(
                "<line x1=\"{px}\" y1=\"{bottom}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>\n\
                 <text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{label}</text>\n",
                bottom + 5.0,
                bottom + 20.0
            ));
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let py = sy(fy);
            let label = tick_label(if opts.logy { fy.exp() } else { fy });
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{py}\" x2=\"{left}\" y2=\"{py}\" stroke=\"black\"/>\n\
                 <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{label}</text>\n",
                left - 5.0,
                left - 8.0,
                py + 4.0
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">examples</text>\n",
            (left + right) / 2.0,
            bottom + 38.0
        ));

        for (ci, (name, pts)) in curves.iter().enumerate() {
            let color = PALETTE[ci % PALETTE.len()];
            let coords: Vec<String> = pts
                .iter()
                .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
                coords.join(" ")
            ));
            let ly = top + 16.0 * ci as f64 + 4.0;
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"3\"/>\n\
                 <text x=\"{}\" y=\"{}\">{name}</text>\n",
                right - 150.0,
                right - 120.0,
                right - 114.0,
                ly + 4.0
            ));
        }
    }
    if dropped > 0 {
        eprintln!("warning: dropped {dropped} nonpositive points for log axes");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Full report flow: parse, aggregate, write the summary CSV, and render the
/// optional SVG. Empty input is an error before any output file is touched.
pub fn report(
    paths: &[std::path::PathBuf],
    summary_out: &mut dyn Write,
    svg_path: Option<&Path>,
    opts: SvgOptions,
) -> Result<()> {
    if paths.is_empty() {
        return Err(HarnessError::Data("no input files given".into()));
    }
    let rows = read_results(paths)?;
    if rows.is_empty() {
        return Err(HarnessError::Data("input holds no data rows".into()));
    }
    let summary = summarize(&rows);
    if let Some(path) = svg_path {
        let svg = render_svg(&summary, opts)?;
        std::fs::write(path, svg)
            .map_err(|e| HarnessError::Data(format!("cannot write {}: {e}", path.display())))?;
    }
    write_summary_csv(summary_out, &summary)?;
    Ok(())
}
