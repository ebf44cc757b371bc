//! h-index audit of recommended versus clicked papers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::welch::{welch_t, WelchResult};
use crate::composer::Condition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Max,
    Mean,
}

/// Aggregates the known author h-indices of one paper. `None` when no
/// author has an h-index.
pub fn aggregate_h(author_h: &[Option<u32>], agg: Aggregation) -> Option<f64> {
    let known: Vec<f64> = author_h.iter().flatten().map(|h| f64::from(*h)).collect();
    if known.is_empty() {
        return None;
    }
    Some(match agg {
        Aggregation::Max => known.iter().copied().fold(f64::MIN, f64::max),
        Aggregation::Mean => known.iter().sum::<f64>() / known.len() as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
}

impl GroupSummary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Some(Self { n, mean, sd, median })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub a: String,
    pub b: String,
    /// `None` when either group is too small or both are constant.
    pub welch: Option<WelchResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub aggregation: Aggregation,
    /// Papers dropped because none of their authors had an h-index.
    pub excluded_background: usize,
    pub excluded_clicked: usize,
    pub groups: BTreeMap<String, GroupSummary>,
    pub tests: Vec<PairTest>,
}

pub const BACKGROUND: &str = "background";

fn clicked_label(c: Condition) -> String {
    format!("clicked:{c}")
}

/// Audit from already-aggregated per-paper values (`None` = no h-index).
pub fn fairness_from_values(
    aggregation: Aggregation,
    background: &[Option<f64>],
    clicked: &BTreeMap<Condition, Vec<Option<f64>>>,
) -> FairnessReport {
    let keep = |xs: &[Option<f64>]| -> (Vec<f64>, usize) {
        let kept: Vec<f64> = xs.iter().flatten().copied().collect();
        let dropped = xs.len() - kept.len();
        (kept, dropped)
    };
    let (bg, excluded_background) = keep(background);
    let mut excluded_clicked = 0;
    let mut clicked_vals: BTreeMap<Condition, Vec<f64>> = BTreeMap::new();
    for (c, xs) in clicked {
        let (kept, dropped) = keep(xs);
        excluded_clicked += dropped;
        clicked_vals.insert(*c, kept);
    }

    let mut groups = BTreeMap::new();
    if let Some(s) = GroupSummary::of(&bg) {
        groups.insert(BACKGROUND.to_owned(), s);
    }
    for (c, xs) in &clicked_vals {
        if let Some(s) = GroupSummary::of(xs) {
            groups.insert(clicked_label(*c), s);
        }
    }

    let mut tests = Vec::new();
    for (c, xs) in &clicked_vals {
        tests.push(PairTest {
            a: BACKGROUND.to_owned(),
            b: clicked_label(*c),
            welch: welch_t(&bg, xs).ok(),
        });
    }
    let conds: Vec<_> = clicked_vals.keys().copied().collect();
    for (i, a) in conds.iter().enumerate() {
        for b in &conds[i + 1..] {
            tests.push(PairTest {
                a: clicked_label(*a),
                b: clicked_label(*b),
                welch: welch_t(&clicked_vals[a], &clicked_vals[b]).ok(),
            });
        }
    }
    FairnessReport {
        aggregation,
        excluded_background,
        excluded_clicked,
        groups,
        tests,
    }
}

/// Audit from per-paper author h-index lists.
pub fn fairness_report(
    all_recs: &[Vec<Option<u32>>],
    clicked_recs: &BTreeMap<Condition, Vec<Vec<Option<u32>>>>,
    aggregation: Aggregation,
) -> FairnessReport {
    let bg: Vec<Option<f64>> = all_recs.iter().map(|r| aggregate_h(r, aggregation)).collect();
    let clicked = clicked_recs
        .iter()
        .map(|(c, recs)| (*c, recs.iter().map(|r| aggregate_h(r, aggregation)).collect()))
        .collect();
    fairness_from_values(aggregation, &bg, &clicked)
}

impl FairnessReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "h-index aggregation: {:?}", self.aggregation);
        let _ = writeln!(
            out,
            "excluded (no h-index): background {}, clicked {}",
            self.excluded_background, self.excluded_clicked
        );
        for (name, g) in &self.groups {
            let _ = writeln!(
                out,
                "{name:<28} n={:<7} mean={:.3} sd={:.3} median={:.1}",
                g.n, g.mean, g.sd, g.median
            );
        }
        for t in &self.tests {
            match &t.welch {
                Some(w) => {
                    let _ = writeln!(out, "{} vs {}: t({:.2})={:.3}, p={:.3e}", t.a, t.b, w.df, w.t, w.p);
                }
                None => {
                    let _ = writeln!(out, "{} vs {}: not testable", t.a, t.b);
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,t,df,p\n");
        for t in &self.tests {
            match &t.welch {
                Some(w) => {
                    let _ = writeln!(out, "{},{},{},{},{}", t.a, t.b, w.t, w.df, w.p);
                }
                None => {
                    let _ = writeln!(out, "{},{},,,", t.a, t.b);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn aggregation_examples() {
        let hs = [Some(3), Some(12), Some(7)];
        assert_eq!(aggregate_h(&hs, Aggregation::Max), Some(12.0));
        assert!((aggregate_h(&hs, Aggregation::Mean).unwrap() - 22.0 / 3.0).abs() < 1e-12);
        assert_eq!(aggregate_h(&[None, None], Aggregation::Max), None);
        assert_eq!(aggregate_h(&[None, Some(4)], Aggregation::Mean), Some(4.0));
    }

    #[test]
    fn clicked_equal_to_background_gives_zero_t() {
        let recs: Vec<Vec<Option<u32>>> = (0..20).map(|k| vec![Some(k), Some(k / 2)]).collect();
        let clicked = BTreeMap::from([
            (Condition::Control, recs.clone()),
            (Condition::Citation, recs.clone()),
        ]);
        let r = fairness_report(&recs, &clicked, Aggregation::Max);
        assert_eq!(r.tests.len(), 3);
        for t in &r.tests {
            assert_eq!(t.welch.unwrap().t, 0.0);
        }
        assert_eq!(r.groups[BACKGROUND].n, 20);
    }

    #[test]
    fn papers_without_h_are_excluded() {
        let recs = vec![vec![None], vec![Some(1)], vec![Some(2)], vec![Some(5)]];
        let clicked = BTreeMap::from([(Condition::Citation, vec![vec![None], vec![Some(3)]])]);
        let r = fairness_report(&recs, &clicked, Aggregation::Mean);
        assert_eq!(r.excluded_background, 1);
        assert_eq!(r.excluded_clicked, 1);
        assert!(r.tests[0].welch.is_none());
        assert!(r.to_text().contains("not testable"));
    }

    proptest! {
        #[test]
        fn max_ignores_non_maximal_authors(
            papers in proptest::collection::vec(proptest::collection::vec(0u32..60, 1..6), 3..20),
        ) {
            let full: Vec<Vec<Option<u32>>> = papers.iter().map(|p| p.iter().map(|h| Some(*h)).collect()).collect();
            let trimmed: Vec<Vec<Option<u32>>> = papers
                .iter()
                .map(|p| vec![Some(*p.iter().max().unwrap())])
                .collect();
            let clicked = BTreeMap::from([(Condition::Citation, full[..2].to_vec())]);
            let clicked_t = BTreeMap::from([(Condition::Citation, trimmed[..2].to_vec())]);
            let a = fairness_report(&full, &clicked, Aggregation::Max);
            let b = fairness_report(&trimmed, &clicked_t, Aggregation::Max);
            prop_assert_eq!(a, b);
        }
    }
}
