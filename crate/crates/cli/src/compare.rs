//! CSV-to-CSV comparison with per-point relative deviations.

use darkcool_core::{CoolError, Result};

use crate::table::Table;

#[derive(Debug, Clone)]
pub struct ColumnReport {
    pub name: String,
    pub max_dev: f64,
    pub mean_dev: f64,
    pub worst_index: usize,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub columns: Vec<ColumnReport>,
    pub tolerance: f64,
    pub pass: bool,
}

impl CompareReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.columns {
            s.push_str(&format!(
                "column {:24} points {:6} max {:.4e} mean {:.4e} (worst at row {})\n",
                c.name, c.points, c.max_dev, c.mean_dev, c.worst_index
            ));
        }
        s.push_str(&format!(
            "tolerance {:.4e}: {}\n",
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        s
    }
}

/// Compare shared columns of `a` against `b` on `a`'s abscissa.
///
/// Relative deviation per point: |a−b| / max(|b|, scale·1e-9) with
/// `scale` the largest |b| in the column, so near-zero crossings of an
/// otherwise O(scale) signal do not blow up the ratio.
pub fn compare_tables(
    a: &Table,
    b: &Table,
    tol: f64,
    from: Option<f64>,
    interp: bool,
) -> Result<CompareReport> {
    if a.columns.is_empty() || b.columns.is_empty() {
        return Err(CoolError::invalid("empty table"));
    }
    let ax = &a.columns[0].1;
    let bx = &b.columns[0].1;
    let grids_match =
        ax.len() == bx.len() && ax.iter().zip(bx).all(|(p, q)| (p - q).abs() <= 1e-12 * p.abs().max(1.0));
    if !grids_match && !interp {
        return Err(CoolError::invalid(
            "abscissa grids differ; pass --interp to interpolate",
        ));
    }
    let mut columns = Vec::new();
    let mut pass = true;
    for (name, av) in a.columns.iter().skip(1) {
        let Ok(bv) = b.column(name) else { continue };
        let scale = bv.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let floor = scale.max(1e-300) * 1e-9;
        let mut max_dev = 0.0f64;
        let mut sum = 0.0f64;
        let mut count = 0usize;
        let mut worst = 0usize;
        for (i, (x, va)) in ax.iter().zip(av).enumerate() {
            if let Some(x0) = from {
                if *x < x0 {
                    continue;
                }
            }
            let vb = if grids_match {
                bv[i]
            } else {
                linear_interp(bx, bv, *x)?
            };
            if !va.is_finite() || !vb.is_finite() {
                pass = false;
                max_dev = f64::INFINITY;
                worst = i;
                count += 1;
                continue;
            }
            let dev = (va - vb).abs() / vb.abs().max(floor);
            if dev > max_dev {
                max_dev = dev;
                worst = i;
            }
            sum += dev;
            count += 1;
        }
        if count == 0 {
            continue;
        }
        if max_dev > tol {
            pass = false;
        }
        columns.push(ColumnReport {
            name: name.clone(),
            max_dev,
            mean_dev: sum / count as f64,
            worst_index: worst,
            points: count,
        });
    }
    if columns.is_empty() {
        return Err(CoolError::invalid("no shared columns to compare"));
    }
    Ok(CompareReport { columns, tolerance: tol, pass })
}

fn linear_interp(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if xs.len() < 2 {
        return Err(CoolError::invalid("need at least two points to interpolate"));
    }
    if x < xs[0] - 1e-12 || x > xs[xs.len() - 1] + 1e-12 {
        return Err(CoolError::invalid(format!("abscissa {x} outside comparison range")));
    }
    let i = xs.partition_point(|&p| p < x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let w = if x1 > x0 { ((x - x0) / (x1 - x0)).clamp(0.0, 1.0) } else { 0.0 };
    Ok(ys[i - 1] * (1.0 - w) + ys[i] * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(xs: &[f64], name: &str, ys: &[f64]) -> Table {
        let mut t = Table::new();
        t.push("x", xs.to_vec());
        t.push(name, ys.to_vec());
        t
    }

    #[test]
    fn identical_tables_pass() {
        let a = table(&[0.0, 1.0, 2.0], "y", &[1.0, 2.0, 3.0]);
        let r = compare_tables(&a, &a.clone(), 1e-12, None, false).unwrap();
        assert!(r.pass);
        assert_eq!(r.columns[0].max_dev, 0.0);
    }

    #[test]
    fn corrupted_column_located() {
        let a = table(&[0.0, 1.0, 2.0], "y", &[1.0, 2.0, 3.0]);
        let b = table(&[0.0, 1.0, 2.0], "y", &[1.0, 2.6, 3.0]);
        let r = compare_tables(&a, &b, 0.1, None, false).unwrap();
        assert!(!r.pass);
        assert_eq!(r.columns[0].worst_index, 1);
    }

    #[test]
    fn grid_mismatch_needs_interp() {
        let a = table(&[0.0, 1.0, 2.0], "y", &[1.0, 2.0, 3.0]);
        let b = table(&[0.0, 0.5, 1.0, 1.5, 2.0], "y", &[1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(compare_tables(&a, &b, 0.1, None, false).is_err());
        let r = compare_tables(&a, &b, 1e-9, None, true).unwrap();
        assert!(r.pass, "{}", r.render());
    }

    #[test]
    fn window_restriction() {
        let a = table(&[0.0, 1.0, 2.0], "y", &[9.0, 2.0, 3.0]);
        let b = table(&[0.0, 1.0, 2.0], "y", &[1.0, 2.0, 3.0]);
        let r = compare_tables(&a, &b, 0.01, Some(0.5), false).unwrap();
        assert!(r.pass, "early mismatch excluded by the window");
    }
}
