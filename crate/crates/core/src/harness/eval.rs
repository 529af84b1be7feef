//! Scoring tracked runs against ground truth: the crossing confusion matrix,
//! per-group effectivity and the CDF of final position errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::track::EventLog;
use crate::error::{Error, Result};
use crate::sim::GroundTruth;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Confusion {
    pub fn positives(&self) -> usize {
        self.true_positives + self.false_negatives
    }

    pub fn negatives(&self) -> usize {
        self.true_negatives + self.false_positives
    }

    pub fn tpr(&self) -> Option<f64> {
        ratio(self.true_positives, self.positives())
    }

    pub fn fnr(&self) -> Option<f64> {
        ratio(self.false_negatives, self.positives())
    }

    pub fn tnr(&self) -> Option<f64> {
        ratio(self.true_negatives, self.negatives())
    }

    pub fn fpr(&self) -> Option<f64> {
        ratio(self.false_positives, self.negatives())
    }

    fn add(&mut self, o: &Confusion) {
        self.true_positives += o.true_positives;
        self.false_negatives += o.false_negatives;
        self.true_negatives += o.true_negatives;
        self.false_positives += o.false_positives;
    }
}

/// Rates over each actual class; `None` when the class is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub true_positive_rate: Option<f64>,
    pub false_negative_rate: Option<f64>,
    pub true_negative_rate: Option<f64>,
    pub false_positive_rate: Option<f64>,
}

impl From<&Confusion> for Rates {
    fn from(c: &Confusion) -> Self {
        Rates {
            true_positive_rate: c.tpr(),
            false_negative_rate: c.fnr(),
            true_negative_rate: c.tnr(),
            false_positive_rate: c.fpr(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub trials: usize,
    pub confusion: Confusion,
}

impl GroupStats {
    /// Share of correctly handled events: detected crossings over true
    /// crossings, or correctly ignored turn-backs when the group has no
    /// crossings.
    pub fn effectivity(&self) -> Option<f64> {
        let c = &self.confusion;
        if c.positives() > 0 {
            c.tpr()
        } else {
            c.tnr()
        }
    }
}

/// Empirical CDF over a sample of errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cdf {
    sorted: Vec<f64>,
}

impl Cdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("CDF input contains a non-finite value".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Cdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `(e_(i), i / n)` for the sorted sample.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, (i + 1) as f64 / n))
            .collect()
    }

    /// Fraction of errors at or below `x`.
    pub fn fraction_at_most(&self, x: f64) -> Option<f64> {
        ratio(self.sorted.partition_point(|e| *e <= x), self.sorted.len())
    }

    /// Smallest sample value `e` with `fraction_at_most(e) >= p`.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        if self.sorted.is_empty() || !(0.0..=1.0).contains(&p) {
            return None;
        }
        let n = self.sorted.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        Some(self.sorted[idx])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("error_m,cumulative_fraction\n");
        for (e, f) in self.points() {
            let _ = writeln!(out, "{e},{f}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub trials: usize,
    pub match_window: usize,
    pub confusion: Confusion,
    pub rates: Rates,
    /// Switches that matched no true crossing.
    pub unmatched_switches: usize,
    pub groups: BTreeMap<String, GroupStats>,
    /// Final-position error of every trial, in input order.
    pub final_errors: Vec<f64>,
    pub cdf: Cdf,
}

fn score_trial(log: &EventLog, truth: &GroundTruth, window: usize) -> (Confusion, usize) {
    let switches: Vec<(usize, &str)> = log.switches().collect();
    let mut used = vec![false; switches.len()];
    let mut c = Confusion::default();
    for tc in &truth.crossings {
        let hit = switches
            .iter()
            .enumerate()
            .find(|(j, (s, d))| !used[*j] && *d == tc.door_id && s.abs_diff(tc.step) <= window);
        match hit {
            Some((j, _)) => {
                used[j] = true;
                c.true_positives += 1;
            }
            None => c.false_negatives += 1,
        }
    }
    for tb in &truth.turnbacks {
        let fired = switches
            .iter()
            .enumerate()
            .any(|(j, (_, d))| !used[j] && *d == tb.door_id);
        if fired {
            c.false_positives += 1;
        } else {
            c.true_negatives += 1;
        }
    }
    (c, used.iter().filter(|u| !**u).count())
}

/// Scores each `(log, truth)` pair. A switch through the right door within
/// `match_window` steps of a true crossing is a true positive (each switch
/// matches at most one crossing). Each true turn-back is a negative; it is a
/// false positive when the trial has an unmatched switch through that door.
pub fn evaluate(runs: &[(EventLog, GroundTruth)], match_window: usize) -> Result<EvalReport> {
    if runs.is_empty() {
        return Err(Error::InvalidInput("no trials to evaluate".into()));
    }
    let mut total = Confusion::default();
    let mut unmatched = 0;
    let mut groups: BTreeMap<String, GroupStats> = BTreeMap::new();
    let mut final_errors = Vec::with_capacity(runs.len());
    for (log, truth) in runs {
        let (c, u) = score_trial(log, truth, match_window);
        total.add(&c);
        unmatched += u;
        let g = groups.entry(truth.group.clone()).or_insert(GroupStats {
            trials: 0,
            confusion: Confusion::default(),
        });
        g.trials += 1;
        g.confusion.add(&c);
        final_errors.push(log.final_position().distance(truth.final_position()));
    }
    let cdf = Cdf::new(&final_errors)?;
    Ok(EvalReport {
        trials: runs.len(),
        match_window,
        confusion: total,
        rates: Rates::from(&total),
        unmatched_switches: unmatched,
        groups,
        final_errors,
        cdf,
    })
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.1}", 100.0 * x)).unwrap_or_else(|| "n/a".into())
}

impl EvalReport {
    /// Estimated (rows) against actual (columns), in percent of each
    /// actual class.
    pub fn confusion_csv(&self) -> String {
        let c = &self.confusion;
        format!(
            "estimated,actual_positive,actual_negative\npositive,{},{}\nnegative,{},{}\n",
            pct(c.tpr()),
            pct(c.fpr()),
            pct(c.fnr()),
            pct(c.tnr())
        )
    }

    pub fn cdf_csv(&self) -> String {
        self.cdf.to_csv()
    }

    pub fn text(&self) -> String {
        let c = &self.confusion;
        let mut s = String::new();
        let _ = writeln!(s, "trials: {}", self.trials);
        let _ = writeln!(s, "match window: +/-{} steps", self.match_window);
        let _ = writeln!(s, "crossings (P): {}   turn-backs (N): {}", c.positives(), c.negatives());
        let _ = writeln!(
            s,
            "TP: {}   FN: {}   TN: {}   FP: {}   unmatched switches: {}",
            c.true_positives, c.false_negatives, c.true_negatives, c.false_positives, self.unmatched_switches
        );
        let _ = writeln!(s);
        let _ = writeln!(s, "door crossing confusion matrix (%)");
        let _ = writeln!(s, "{:<20}{:>18}{:>18}", "", "actual positive", "actual negative");
        let _ = writeln!(s, "{:<20}{:>18}{:>18}", "estimated positive", pct(c.tpr()), pct(c.fpr()));
        let _ = writeln!(s, "{:<20}{:>18}{:>18}", "estimated negative", pct(c.fnr()), pct(c.tnr()));
        let _ = writeln!(s);
        let _ = writeln!(s, "effectivity by group (%)");
        for (name, g) in &self.groups {
            let _ = writeln!(s, "{:<20}{:>8}   ({} trials)", name, pct(g.effectivity()), g.trials);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "final position error (m)");
        let q = |p| self.cdf.quantile(p).map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(s, "median: {}   p70: {}   p90: {}   max: {}", q(0.5), q(0.7), q(0.9), q(1.0));
        for x in [1.0, 2.0, 4.0, 8.0] {
            let _ = writeln!(s, "errors <= {x} m: {}%", pct(self.cdf.fraction_at_most(x)));
        }
        s
    }
}
