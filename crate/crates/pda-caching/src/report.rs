//! Side-by-side comparison of ordering strategies.
//!
//! For one array and one occupancy vector, [`run_compare`] evaluates the
//! array as given, the greedy reordering, the exhaustive optimum (budget
//! permitting), the label-driven family ordering (when the array carries
//! (u,v) labels), and the t-subset baseline at the same memory ratio (when
//! that ratio is achievable). Every row reports an exact load; the baseline
//! row uses its own, usually much larger, subpacketization.

use serde::Serialize;

use crate::constructions::{binomial, detect_const_b, mn_params};
use crate::error::{Error, Result};
use crate::ordering::{
    const_b_order, exhaustive_order, greedy_order, OrderingTrace, Profile, DEFAULT_PERM_BUDGET,
};
use crate::pda::Pda;
use crate::rate::{load_from_pda, load_mn_baseline, LoadValue};

#[derive(Debug, Clone, Serialize)]
pub struct StrategyRow {
    pub strategy: String,
    /// 1-based column permutation, for strategies that reorder the array.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    /// First prefix length covering every symbol, where meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    pub load: LoadValue,
    pub decimal: String,
    pub subpacketization: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedStrategy {
    pub strategy: String,
    pub reason: String,
}

/// Comparison of every applicable strategy on one array.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub raw_profile: Vec<usize>,
    pub sorted_profile: Vec<usize>,
    /// 1-based: entry p names the input cache moved to sorted position p.
    pub relabeling: Vec<usize>,
    pub rows: Vec<StrategyRow>,
    pub skipped: Vec<SkippedStrategy>,
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub perm_budget: u64,
    pub lookahead: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { perm_budget: DEFAULT_PERM_BUDGET, lookahead: false }
    }
}

fn one_based(perm: &[usize]) -> Vec<usize> {
    perm.iter().map(|&p| p + 1).collect()
}

pub fn run_compare(pda: &Pda, raw_profile: &[usize], opts: &CompareOptions) -> Result<ComparisonReport> {
    let profile = Profile::normalize(raw_profile)?;
    if profile.len() != pda.cols() {
        return Err(Error::Dimension(format!(
            "profile has {} caches, array has {} columns",
            profile.len(),
            pda.cols()
        )));
    }
    let f = pda.rows() as u64;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();

    let identity_load = load_from_pda(pda, &profile)?;
    rows.push(StrategyRow {
        strategy: "as-given".into(),
        permutation: None,
        alpha: Some(OrderingTrace::of(pda).alpha),
        load: identity_load,
        decimal: identity_load.decimal(3),
        subpacketization: f,
        note: None,
    });

    let (greedy, trace) = greedy_order(pda, &profile, opts.lookahead)?;
    let greedy_load = load_from_pda(&greedy.reordered, &profile)?;
    rows.push(StrategyRow {
        strategy: "greedy".into(),
        permutation: Some(one_based(&greedy.perm)),
        alpha: Some(trace.alpha),
        load: greedy_load,
        decimal: greedy_load.decimal(3),
        subpacketization: f,
        note: None,
    });

    match exhaustive_order(pda, &profile, opts.perm_budget) {
        Ok(search) => {
            rows.push(StrategyRow {
                strategy: "exhaustive".into(),
                permutation: Some(one_based(&search.ordering.perm)),
                alpha: Some(OrderingTrace::of(&search.ordering.reordered).alpha),
                load: search.load,
                decimal: search.load.decimal(3),
                subpacketization: f,
                note: Some(format!("{} orderings evaluated", search.evaluated)),
            });
        }
        Err(Error::Budget(reason)) => {
            skipped.push(SkippedStrategy { strategy: "exhaustive".into(), reason });
        }
        Err(other) => return Err(other),
    }

    if let Some((q, m)) = detect_const_b(pda) {
        let ordering = const_b_order(pda, q, m, &profile)?;
        let load = load_from_pda(&ordering.reordered, &profile)?;
        rows.push(StrategyRow {
            strategy: "family".into(),
            permutation: Some(one_based(&ordering.perm)),
            alpha: Some(OrderingTrace::of(&ordering.reordered).alpha),
            load,
            decimal: load.decimal(3),
            subpacketization: f,
            note: Some(format!("label-driven ordering for q={q}, m={m}")),
        });
    }

    // The t-subset baseline shares the memory ratio Z/F when t = KZ/F is an
    // integer in range.
    let (k, z) = (pda.cols(), pda.stars_per_column());
    if (k * z) % pda.rows() == 0 {
        let t = k * z / pda.rows();
        if t >= 1 && t < k && mn_params(k, t).is_some() {
            let load = load_mn_baseline(k, t, &profile)?;
            let sub = binomial(k as u64, t as u64).and_then(|b| u64::try_from(b).ok());
            match sub {
                Some(sub) => rows.push(StrategyRow {
                    strategy: "t-subset baseline".into(),
                    permutation: None,
                    alpha: None,
                    load,
                    decimal: load.decimal(3),
                    subpacketization: sub,
                    note: Some("uses its own subpacketization".into()),
                }),
                None => skipped.push(SkippedStrategy {
                    strategy: "t-subset baseline".into(),
                    reason: format!("subpacketization C({k},{t}) overflows"),
                }),
            }
        } else {
            skipped.push(SkippedStrategy {
                strategy: "t-subset baseline".into(),
                reason: format!("memory ratio needs t={t}, out of range"),
            });
        }
    } else {
        skipped.push(SkippedStrategy {
            strategy: "t-subset baseline".into(),
            reason: "memory ratio K*Z/F is not an integer".into(),
        });
    }

    Ok(ComparisonReport {
        raw_profile: raw_profile.to_vec(),
        sorted_profile: profile.loads().to_vec(),
        relabeling: one_based(profile.relabeling()),
        rows,
        skipped,
    })
}

pub fn render_text(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let join = |v: &[usize]| {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    };
    out.push_str(&format!("profile (as given): {}\n", join(&report.raw_profile)));
    out.push_str(&format!("profile (sorted):   {}\n", join(&report.sorted_profile)));
    out.push_str(&format!("cache relabeling:   {}\n\n", join(&report.relabeling)));
    out.push_str(&format!(
        "{:<18} {:>10} {:>9} {:>6} {:>8}\n",
        "strategy", "load", "decimal", "alpha", "F"
    ));
    for row in &report.rows {
        let alpha = row.alpha.map_or("-".to_string(), |a| a.to_string());
        out.push_str(&format!(
            "{:<18} {:>10} {:>9} {:>6} {:>8}{}\n",
            row.strategy,
            row.load.to_string(),
            row.decimal,
            alpha,
            row.subpacketization,
            row.note.as_deref().map_or(String::new(), |n| format!("   {n}")),
        ));
    }
    let with_perm: Vec<&StrategyRow> =
        report.rows.iter().filter(|r| r.permutation.is_some()).collect();
    if !with_perm.is_empty() {
        out.push_str("\norderings (1-based source columns):\n");
        for row in with_perm {
            out.push_str(&format!(
                "  {:<16} {}\n",
                row.strategy,
                join(row.permutation.as_ref().unwrap())
            ));
        }
    }
    for s in &report.skipped {
        out.push_str(&format!("\nskipped {}: {}\n", s.strategy, s.reason));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::construct_b;
    use crate::io::parse_pda_text;
    use crate::pda::tests::SIX_CACHE;

    #[test]
    fn six_cache_comparison() {
        let pda = parse_pda_text(SIX_CACHE).unwrap();
        let report =
            run_compare(&pda, &[5, 4, 3, 2, 2, 1], &CompareOptions::default()).unwrap();
        let by_name: Vec<(&str, &StrategyRow)> =
            report.rows.iter().map(|r| (r.strategy.as_str(), r)).collect();
        assert_eq!(
            by_name.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            vec!["as-given", "greedy", "exhaustive", "t-subset baseline"]
        );
        assert_eq!(by_name[0].1.load, LoadValue::new(24, 3));
        assert_eq!(by_name[0].1.alpha, Some(3));
        assert_eq!(by_name[1].1.load, LoadValue::new(21, 3));
        assert_eq!(by_name[1].1.permutation, Some(vec![1, 5, 3, 4, 2, 6]));
        assert_eq!(by_name[2].1.load, LoadValue::new(21, 3));
        // Same memory ratio needs t = 2: C(6,2) = 15 subfiles.
        assert_eq!(by_name[3].1.load, LoadValue::new(85, 15));
        assert_eq!(by_name[3].1.subpacketization, 15);
        assert!(report.skipped.is_empty());

        let text = render_text(&report);
        assert!(text.contains("as-given"), "{text}");
        assert!(text.contains("21/3"), "{text}");
        assert!(text.contains("7.000"), "{text}");
    }

    #[test]
    fn labeled_family_gets_its_own_row() {
        let pda = construct_b(3, 2).unwrap();
        let raw = [30, 25, 20, 10, 8, 5, 5, 4, 3];
        let opts = CompareOptions { perm_budget: 1_000, lookahead: false };
        let report = run_compare(&pda, &raw, &opts).unwrap();
        let names: Vec<&str> = report.rows.iter().map(|r| r.strategy.as_str()).collect();
        assert_eq!(names, vec!["as-given", "greedy", "family", "t-subset baseline"]);
        assert_eq!(report.rows[0].load, LoadValue::new(255, 18));
        assert_eq!(report.rows[1].load, LoadValue::new(240, 18));
        assert_eq!(report.rows[2].load, LoadValue::new(240, 18));
        assert_eq!(report.rows[2].alpha, Some(4));
        // Memory ratio 12/18 needs t = 6: the baseline splits into C(9,6).
        assert_eq!(report.rows[3].load, LoadValue::new(1035, 84));
        assert_eq!(report.rows[3].subpacketization, 84);
        assert_eq!(report.rows[3].decimal, "12.321");
        assert_eq!(report.skipped.len(), 1);
        assert!(report.skipped[0].reason.contains("181440"), "{:?}", report.skipped);
    }

    #[test]
    fn unsorted_input_is_echoed_with_its_relabeling() {
        let pda = parse_pda_text(SIX_CACHE).unwrap();
        let report =
            run_compare(&pda, &[1, 2, 2, 3, 4, 5], &CompareOptions::default()).unwrap();
        assert_eq!(report.sorted_profile, vec![5, 4, 3, 2, 2, 1]);
        assert_eq!(report.relabeling, vec![6, 5, 4, 2, 3, 1]);
        let json = serde_json::to_value(&report).unwrap();
        assert!(json.get("rows").is_some());
        assert_eq!(json["raw_profile"][0], 1);
    }
}
