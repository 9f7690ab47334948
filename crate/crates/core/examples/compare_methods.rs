//! Per-query average precision for two scorers, compared with
//! Kruskal-Wallis and Bonferroni-adjusted Mann-Whitney tests, plus the
//! precision-recall curve of each.

use tracelink::baselines::{BaselineModel, BaselineMethod, IrOptions};
use tracelink::corpus::default_stopwords;
use tracelink::datasets::{generate_synthetic, split_pairs, SplitSpec, SynthConfig, SynthMode};
use tracelink::evaluation::{compare_methods, mean_average_precision, pr_curve_exact, ranked_lists};

fn main() -> tracelink::Result<()> {
    let bench = generate_synthetic(&SynthConfig { mode: SynthMode::Lexical, ..Default::default() })?;
    let ds = &bench.dataset;
    let test = split_pairs(ds, &SplitSpec::standard(0))?.test;
    let stopwords = default_stopwords();
    let mut groups = Vec::new();
    for method in [BaselineMethod::Vsm, BaselineMethod::Lsi] {
        let model = BaselineModel::fit(ds, method, IrOptions::default(), &stopwords, 0.1)?;
        let scores = model.score_pairs(ds, &test)?;
        let map = mean_average_precision(&ranked_lists(ds, &test, &scores)?)?;
        let scored: Vec<(f64, bool)> = test.iter().zip(&scores).map(|(&p, &s)| (s, ds.is_link(p))).collect();
        let curve = pr_curve_exact(&scored)?;
        let mid = &curve[curve.len() / 2];
        println!("{method}: MAP {:.4}, {} curve points, mid point p {:.3} r {:.3}", map.map, curve.len(), mid.precision, mid.recall);
        groups.push((method.to_string(), map.aps()));
    }
    let report = compare_methods(&groups)?;
    println!("Kruskal-Wallis H {:.4} p {:.4}", report.kruskal_wallis.h, report.kruskal_wallis.p_value);
    for t in &report.pairwise {
        println!("{} vs {}: U {:.1} adjusted p {:.4}", t.a, t.b, t.test.u, t.p_adjusted);
    }
    Ok(())
}
