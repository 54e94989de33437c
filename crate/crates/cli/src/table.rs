//! Column-oriented result tables, CSV I/O with atomic writes, and the
//! self-contained SVG line plot.

use std::path::Path;

use darkcool_core::{CoolError, Result};

/// A named-column table; the first column is the abscissa.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn new() -> Self {
        Table { columns: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.columns.push((name.into(), values));
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| CoolError::invalid(format!("no column `{name}`")))
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map(|(_, v)| v.len()).unwrap_or(0)
    }

    /// CSV with a header row and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let head: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        let mut out = head.join(",");
        out.push('\n');
        for row in 0..self.n_rows() {
            let cells: Vec<String> =
                self.columns.iter().map(|(_, v)| format!("{:.16e}", v[row])).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Table> {
        let mut lines = text.lines();
        let head = lines
            .next()
            .ok_or_else(|| CoolError::invalid("empty CSV"))?;
        let names: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (ln, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != names.len() {
                return Err(CoolError::FormatError {
                    line: ln + 2,
                    msg: format!("expected {} cells, got {}", names.len(), cells.len()),
                });
            }
            for (k, cell) in cells.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| CoolError::FormatError {
                    line: ln + 2,
                    msg: format!("bad number `{cell}`"),
                })?;
                cols[k].push(v);
            }
        }
        Ok(Table { columns: names.into_iter().zip(cols).collect() })
    }
}

/// Write bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Self-contained SVG line plot: first column on x, every other column as
/// a polyline. Log axes kick in automatically for wide positive ranges.
pub fn render_svg(table: &Table, title: &str) -> String {
    let (w, h) = (840.0, 520.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 55.0);
    let pw = w - ml - mr;
    let ph = h - mt - mb;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    if table.columns.len() < 2 || table.n_rows() < 2 {
        svg.push_str("<text x=\"20\" y=\"30\">no data</text></svg>\n");
        return svg;
    }
    let xs = &table.columns[0].1;
    fn finite(v: &[f64]) -> impl Iterator<Item = f64> + '_ {
        v.iter().copied().filter(|x| x.is_finite())
    }

    let use_log = |v: &[f64]| {
        let pos: Vec<f64> = finite(v).filter(|&x| x > 0.0).collect();
        if pos.len() < v.len().max(1) {
            return false;
        }
        let lo = pos.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = pos.iter().cloned().fold(0.0, f64::max);
        lo > 0.0 && hi / lo > 300.0
    };
    let logx = use_log(xs);
    let mut all_y: Vec<f64> = Vec::new();
    for (_, v) in table.columns.iter().skip(1) {
        all_y.extend(finite(v));
    }
    let logy = use_log(&all_y);

    let tx = |x: f64| if logx { x.log10() } else { x };
    let ty = |y: f64| if logy { y.log10() } else { y };
    let x_lo = finite(xs).map(tx).fold(f64::INFINITY, f64::min);
    let x_hi = finite(xs).map(tx).fold(f64::NEG_INFINITY, f64::max);
    let y_lo = all_y.iter().map(|&y| ty(y)).fold(f64::INFINITY, f64::min);
    let y_hi = all_y.iter().map(|&y| ty(y)).fold(f64::NEG_INFINITY, f64::max);
    let pad = |lo: f64, hi: f64| {
        let d = (hi - lo).abs().max(1e-12);
        (lo - 0.04 * d, hi + 0.04 * d)
    };
    let (x_lo, x_hi) = pad(x_lo, x_hi);
    let (y_lo, y_hi) = pad(y_lo, y_hi);
    let px = |x: f64| ml + (tx(x) - x_lo) / (x_hi - x_lo) * pw;
    let py = |y: f64| mt + ph - (ty(y) - y_lo) / (y_hi - y_lo) * ph;

    // frame and ticks
    svg.push_str(&format!(
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#333\"/>\n"
    ));
    for k in 0..=5 {
        let fx = x_lo + (x_hi - x_lo) * k as f64 / 5.0;
        let fy = y_lo + (y_hi - y_lo) * k as f64 / 5.0;
        let vx = if logx { 10f64.powf(fx) } else { fx };
        let vy = if logy { 10f64.powf(fy) } else { fy };
        let xpix = ml + pw * k as f64 / 5.0;
        let ypix = mt + ph - ph * k as f64 / 5.0;
        svg.push_str(&format!(
            "<line x1=\"{xpix}\" y1=\"{}\" x2=\"{xpix}\" y2=\"{}\" stroke=\"#333\"/>\n",
            mt + ph,
            mt + ph + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{xpix}\" y=\"{}\" text-anchor=\"middle\">{:.3e}</text>\n",
            mt + ph + 20.0,
            vx
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ypix}\" x2=\"{ml}\" y2=\"{ypix}\" stroke=\"#333\"/>\n",
            ml - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3e}</text>\n",
            ml - 8.0,
            ypix + 4.0,
            vy
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-size=\"14\">{}</text>\n",
        ml,
        xml_escape(title)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        ml + pw / 2.0,
        h - 12.0,
        xml_escape(&table.columns[0].0)
    ));

    // polylines and legend
    for (ci, (name, ys)) in table.columns.iter().skip(1).enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let mut d = String::new();
        let mut pen_up = true;
        for (x, y) in xs.iter().zip(ys) {
            let drawable = x.is_finite()
                && y.is_finite()
                && (!logx || *x > 0.0)
                && (!logy || *y > 0.0);
            if drawable {
                d.push_str(if pen_up { "M" } else { "L" });
                d.push_str(&format!("{:.2},{:.2} ", px(*x), py(*y)));
                pen_up = false;
            } else {
                pen_up = true;
            }
        }
        svg.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n"
        ));
        let ly = mt + 16.0 + 16.0 * ci as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            ml + pw - 150.0,
            ml + pw - 125.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            ml + pw - 120.0,
            ly + 4.0,
            xml_escape(name)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
