use std::fmt::Write as _;
use std::path::Path;

use super::{MapResult, PrPoint, StatsReport};
use crate::error::{Error, Result};

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// CSV `method,query_id,ap`, then one `method,MAP,value` row per method.
pub fn write_metrics(path: &Path, results: &[(String, MapResult)]) -> Result<()> {
    let mut out = String::from("method,query_id,ap\n");
    for (m, r) in results {
        for (q, ap) in &r.per_query {
            writeln!(out, "{m},{q},{ap}").unwrap();
        }
    }
    for (m, r) in results {
        writeln!(out, "{m},MAP,{}", r.map).unwrap();
    }
    write(path, out)
}

/// CSV `method,threshold,precision,recall`.
pub fn write_curves(path: &Path, curves: &[(String, Vec<PrPoint>)]) -> Result<()> {
    let mut out = String::from("method,threshold,precision,recall\n");
    for (m, c) in curves {
        for p in c {
            writeln!(out, "{m},{},{},{}", p.threshold, p.precision, p.recall).unwrap();
        }
    }
    write(path, out)
}

pub fn write_stats(path: &Path, report: &StatsReport) -> Result<()> {
    let kw = &report.kruskal_wallis;
    let mut out = String::new();
    writeln!(out, "Kruskal-Wallis H = {:.6}  df = {}  p = {:.6e}", kw.h, kw.df, kw.p_value).unwrap();
    if kw.tie_degenerate {
        writeln!(out, "(all values tied)").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "{:<16} {:<16} {:>12} {:>14} {:>14} {:>6}", "method_a", "method_b", "U", "p", "p_adjusted", "exact").unwrap();
    for p in &report.pairwise {
        writeln!(
            out,
            "{:<16} {:<16} {:>12.1} {:>14.6e} {:>14.6e} {:>6}",
            p.a, p.b, p.test.u, p.test.p_value, p.p_adjusted, p.test.exact
        )
        .unwrap();
    }
    write(path, out)
}
