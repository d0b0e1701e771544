//! Statistical comparison of algorithm accuracy samples: one-way ANOVA, the
//! F-test for variance equality, pooled and Welch two-sample t-tests, and the
//! equivalence-class partition induced by pairwise significance.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::distributions::{f_quantile, f_sf, t_cdf, t_quantile, t_sf_two_tail};
use crate::error::{Error, Result};

/// A named sample of accuracy values (one value per run).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sample {
    pub name: String,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self { name: name.into(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample variance (n-1 denominator). Exactly zero for constant samples.
    pub fn variance(&self) -> f64 {
        if self.values.windows(2).all(|w| w[0] == w[1]) {
            return 0.0;
        }
        let m = self.mean();
        self.values.iter().map(|&x| (x - m).powi(2)).sum::<f64>() / (self.len() as f64 - 1.0)
    }

    fn validate(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::Config(format!("sample {} needs at least 2 values", self.name)));
        }
        if self.values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("sample {} contains non-finite values", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnovaResult {
    pub ss_between: f64,
    pub ss_within: f64,
    pub ss_total: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub ms_between: f64,
    pub ms_within: f64,
    pub f_stat: f64,
    pub p_value: f64,
    pub f_crit: f64,
}

/// One-way (single factor) ANOVA across `samples`, with the critical F value
/// taken at `alpha`.
pub fn anova_single_factor(samples: &[Sample], alpha: f64) -> Result<AnovaResult> {
    if samples.len() < 2 {
        return Err(Error::Config("ANOVA requires at least 2 samples".into()));
    }
    for s in samples {
        s.validate()?;
    }
    let total_n: usize = samples.iter().map(Sample::len).sum();
    let k = samples.len();
    let grand: f64 =
        samples.iter().map(|s| s.values.iter().sum::<f64>()).sum::<f64>() / total_n as f64;
    let ss_between: f64 = samples
        .iter()
        .map(|s| s.len() as f64 * (s.mean() - grand).powi(2))
        .sum();
    let ss_within: f64 = samples
        .iter()
        .map(|s| {
            let m = s.mean();
            s.values.iter().map(|&x| (x - m).powi(2)).sum::<f64>()
        })
        .sum();
    let df_between = k - 1;
    let df_within = total_n - k;
    let ms_between = ss_between / df_between as f64;
    let ms_within = ss_within / df_within as f64;
    let (f_stat, p_value) = if ss_within == 0.0 && ss_between == 0.0 {
        // All values identical everywhere: no variation to explain.
        (0.0, 1.0)
    } else if ms_within == 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = ms_between / ms_within;
        (f, f_sf(f, df_between as f64, df_within as f64))
    };
    Ok(AnovaResult {
        ss_between,
        ss_within,
        ss_total: ss_between + ss_within,
        df_between,
        df_within,
        ms_between,
        ms_within,
        f_stat,
        p_value,
        f_crit: f_quantile(1.0 - alpha, df_between as f64, df_within as f64),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FTestResult {
    pub ratio: f64,
    pub p_two_tail: f64,
    pub equal_variances: bool,
}

/// Two-tailed F-test for equality of variances: ratio is the larger sample
/// variance over the smaller, so it is always >= 1.
pub fn f_test(a: &Sample, b: &Sample, alpha: f64) -> Result<FTestResult> {
    a.validate()?;
    b.validate()?;
    let (va, vb) = (a.variance(), b.variance());
    if va == 0.0 && vb == 0.0 {
        return Ok(FTestResult { ratio: 1.0, p_two_tail: 1.0, equal_variances: true });
    }
    let (num, num_df, den, den_df) = if va >= vb {
        (va, a.len() - 1, vb, b.len() - 1)
    } else {
        (vb, b.len() - 1, va, a.len() - 1)
    };
    if den == 0.0 {
        return Ok(FTestResult { ratio: f64::INFINITY, p_two_tail: 0.0, equal_variances: false });
    }
    let ratio = num / den;
    let p_two_tail = (2.0 * f_sf(ratio, num_df as f64, den_df as f64)).min(1.0);
    Ok(FTestResult { ratio, p_two_tail, equal_variances: p_two_tail >= alpha })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestVariant {
    Pooled,
    Welch,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TTestResult {
    pub names: [String; 2],
    pub means: [f64; 2],
    pub variances: [f64; 2],
    pub observations: [usize; 2],
    pub pooled_variance: Option<f64>,
    pub df: f64,
    pub t_stat: f64,
    pub p_one_tail: f64,
    pub p_two_tail: f64,
    pub t_crit_one_tail: f64,
    pub t_crit_two_tail: f64,
    pub variant: TTestVariant,
}

/// Two-sample t-test assuming equal variances (pooled).
pub fn t_test_pooled(a: &Sample, b: &Sample, alpha: f64) -> Result<TTestResult> {
    a.validate()?;
    b.validate()?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let df = n1 + n2 - 2.0;
    let pooled =
        ((n1 - 1.0) * a.variance() + (n2 - 1.0) * b.variance()) / df;
    let diff = a.mean() - b.mean();
    let t_stat = if pooled == 0.0 {
        if diff == 0.0 {
            0.0
        } else if diff > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        diff / (pooled * (1.0 / n1 + 1.0 / n2)).sqrt()
    };
    Ok(finish_t_test(a, b, Some(pooled), df, t_stat, alpha, TTestVariant::Pooled))
}

/// Two-sample t-test assuming unequal variances (Welch), with the
/// Welch-Satterthwaite degrees of freedom kept real-valued.
pub fn t_test_welch(a: &Sample, b: &Sample, alpha: f64) -> Result<TTestResult> {
    a.validate()?;
    b.validate()?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (s1, s2) = (a.variance() / n1, b.variance() / n2);
    let diff = a.mean() - b.mean();
    let (df, t_stat) = if s1 + s2 == 0.0 {
        let t = if diff == 0.0 {
            0.0
        } else if diff > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        (n1 + n2 - 2.0, t)
    } else {
        let df = (s1 + s2).powi(2) / (s1 * s1 / (n1 - 1.0) + s2 * s2 / (n2 - 1.0));
        (df, diff / (s1 + s2).sqrt())
    };
    Ok(finish_t_test(a, b, None, df, t_stat, alpha, TTestVariant::Welch))
}

fn finish_t_test(
    a: &Sample,
    b: &Sample,
    pooled_variance: Option<f64>,
    df: f64,
    t_stat: f64,
    alpha: f64,
    variant: TTestVariant,
) -> TTestResult {
    let (p_one_tail, p_two_tail) = if t_stat.is_infinite() {
        (0.0, 0.0)
    } else {
        (1.0 - t_cdf(t_stat.abs(), df), t_sf_two_tail(t_stat, df))
    };
    TTestResult {
        names: [a.name.clone(), b.name.clone()],
        means: [a.mean(), b.mean()],
        variances: [a.variance(), b.variance()],
        observations: [a.len(), b.len()],
        pooled_variance,
        df,
        t_stat,
        p_one_tail,
        p_two_tail,
        t_crit_one_tail: t_quantile(1.0 - alpha, df),
        t_crit_two_tail: t_quantile(1.0 - alpha / 2.0, df),
        variant,
    }
}

/// Force a t-test variant instead of letting the F-test choose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantChoice {
    /// F-test on each pair decides pooled vs Welch.
    #[default]
    Auto,
    Pooled,
    Welch,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalencePartition {
    pub classes: Vec<Vec<String>>,
    pub alpha: f64,
}

/// Record of one pairwise comparison made while partitioning.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseRecord {
    pub f_test: FTestResult,
    pub t_test: TTestResult,
    pub significantly_different: bool,
}

/// Partition samples into equivalence classes: samples whose pairwise t-test
/// finds no significant difference are connected, and classes are the
/// connected components of that graph.
pub fn equivalence_classes(samples: &[Sample], alpha: f64) -> Result<EquivalencePartition> {
    Ok(equivalence_classes_with(samples, alpha, VariantChoice::Auto)?.0)
}

/// As [`equivalence_classes`], also returning every pairwise record and
/// honoring a forced t-test variant.
pub fn equivalence_classes_with(
    samples: &[Sample],
    alpha: f64,
    choice: VariantChoice,
) -> Result<(EquivalencePartition, Vec<PairwiseRecord>)> {
    if samples.len() < 2 {
        return Err(Error::Config("equivalence classes require at least 2 samples".into()));
    }
    let n = samples.len();
    let mut adjacent = vec![vec![false; n]; n];
    let mut records = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let f = f_test(&samples[i], &samples[j], alpha)?;
            let use_pooled = match choice {
                VariantChoice::Auto => f.equal_variances,
                VariantChoice::Pooled => true,
                VariantChoice::Welch => false,
            };
            let t = if use_pooled {
                t_test_pooled(&samples[i], &samples[j], alpha)?
            } else {
                t_test_welch(&samples[i], &samples[j], alpha)?
            };
            let different = t.p_two_tail < alpha;
            if !different {
                adjacent[i][j] = true;
                adjacent[j][i] = true;
            }
            records.push(PairwiseRecord { f_test: f, t_test: t, significantly_different: different });
        }
    }
    // Connected components over the "not significantly different" graph.
    let mut assigned = vec![usize::MAX; n];
    let mut classes: Vec<Vec<String>> = Vec::new();
    for start in 0..n {
        if assigned[start] != usize::MAX {
            continue;
        }
        let class_id = classes.len();
        let mut queue = vec![start];
        assigned[start] = class_id;
        let mut members = Vec::new();
        while let Some(i) = queue.pop() {
            members.push(samples[i].name.clone());
            for j in 0..n {
                if adjacent[i][j] && assigned[j] == usize::MAX {
                    assigned[j] = class_id;
                    queue.push(j);
                }
            }
        }
        members.sort();
        classes.push(members);
    }
    Ok((EquivalencePartition { classes, alpha }, records))
}

/// Full report over a set of samples: ANOVA, pairwise tests, partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatReport {
    pub anova: AnovaResult,
    pub pairwise: Vec<PairwiseRecord>,
    pub partition: EquivalencePartition,
    pub group_summary: Vec<GroupSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSummary {
    pub name: String,
    pub count: usize,
    pub sum: f64,
    pub average: f64,
    pub variance: f64,
}

pub fn stat_report(samples: &[Sample], alpha: f64, choice: VariantChoice) -> Result<StatReport> {
    let anova = anova_single_factor(samples, alpha)?;
    let (partition, pairwise) = equivalence_classes_with(samples, alpha, choice)?;
    let group_summary = samples
        .iter()
        .map(|s| GroupSummary {
            name: s.name.clone(),
            count: s.len(),
            sum: s.values.iter().sum(),
            average: s.mean(),
            variance: s.variance(),
        })
        .collect();
    Ok(StatReport { anova, pairwise, partition, group_summary })
}

impl StatReport {
    /// Human-readable tables in the layout of the result tables.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("ANOVA Test Summary\n");
        out.push_str("Groups            Count      Sum    Average   Variance\n");
        for g in &self.group_summary {
            let _ = writeln!(
                out,
                "{:<16} {:>6} {:>8.2} {:>10.4} {:>10.5}",
                g.name, g.count, g.sum, g.average, g.variance
            );
        }
        out.push('\n');
        out.push_str("ANOVA Test Variation Summary\n");
        out.push_str("Source of Variation        SS    df        MS         F    P-value    F crit\n");
        let a = &self.anova;
        let _ = writeln!(
            out,
            "Between             {:>9.4} {:>5} {:>9.5} {:>9.2} {:>10.3e} {:>9.3}",
            a.ss_between, a.df_between, a.ms_between, a.f_stat, a.p_value, a.f_crit
        );
        let _ = writeln!(
            out,
            "Within              {:>9.4} {:>5} {:>9.5}",
            a.ss_within, a.df_within, a.ms_within
        );
        let _ = writeln!(out, "Total               {:>9.4} {:>5}", a.ss_total, a.df_between + a.df_within);
        out.push('\n');
        for rec in &self.pairwise {
            let t = &rec.t_test;
            let title = match t.variant {
                TTestVariant::Pooled => "Student t-Test: Two-Sample Assuming Equal Variances",
                TTestVariant::Welch => "Student t-Test: Two-Sample Assuming Unequal Variances",
            };
            let _ = writeln!(out, "{title}");
            let _ = writeln!(out, "                              {:>12} {:>12}", t.names[0], t.names[1]);
            let _ = writeln!(out, "Mean                          {:>12.4} {:>12.4}", t.means[0], t.means[1]);
            let _ = writeln!(out, "Variance                      {:>12.5} {:>12.5}", t.variances[0], t.variances[1]);
            let _ = writeln!(out, "Observations                  {:>12} {:>12}", t.observations[0], t.observations[1]);
            if let Some(pv) = t.pooled_variance {
                let _ = writeln!(out, "Pooled Variance               {pv:>12.5}");
            }
            let _ = writeln!(out, "df                            {:>12.2}", t.df);
            let _ = writeln!(out, "t Stat                        {:>12.4}", t.t_stat);
            let _ = writeln!(out, "P(T<=t) one-tail              {:>12.3e}", t.p_one_tail);
            let _ = writeln!(out, "t Critical one-tail           {:>12.4}", t.t_crit_one_tail);
            let _ = writeln!(out, "P(T<=t) two-tail              {:>12.3e}", t.p_two_tail);
            let _ = writeln!(out, "t Critical two-tail           {:>12.4}", t.t_crit_two_tail);
            out.push('\n');
        }
        let _ = writeln!(out, "Equivalence classes (alpha = {}):", self.partition.alpha);
        for (i, class) in self.partition.classes.iter().enumerate() {
            let _ = writeln!(out, "  class {}: {{{}}}", i + 1, class.join(", "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spread(name: &str, mean: f64, n: usize) -> Sample {
        // Tiny symmetric spread so variance is nonzero.
        let values = (0..n).map(|i| mean + if i % 2 == 0 { 1e-3 } else { -1e-3 }).collect();
        Sample::new(name, values)
    }

    #[test]
    fn identical_groups_give_f_zero_p_one() {
        let a = Sample::new("a", vec![0.5, 0.6, 0.7]);
        let b = Sample::new("b", vec![0.5, 0.6, 0.7]);
        let c = Sample::new("c", vec![0.5, 0.6, 0.7]);
        let r = anova_single_factor(&[a, b, c], 0.05).unwrap();
        assert!(r.f_stat.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fully_degenerate_input_is_f_zero_p_one() {
        let a = Sample::new("a", vec![0.5, 0.5]);
        let b = Sample::new("b", vec![0.5, 0.5]);
        let r = anova_single_factor(&[a, b], 0.05).unwrap();
        assert_eq!(r.f_stat, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn sum_of_squares_decomposes() {
        let a = Sample::new("a", vec![0.61, 0.72, 0.55, 0.68]);
        let b = Sample::new("b", vec![0.71, 0.69, 0.80, 0.77]);
        let r = anova_single_factor(&[a, b], 0.05).unwrap();
        assert!((r.ss_total - (r.ss_between + r.ss_within)).abs() < 1e-9 * r.ss_total.max(1.0));
    }

    #[test]
    fn two_sample_anova_f_equals_t_squared() {
        let a = Sample::new("a", vec![0.6, 0.64, 0.58, 0.66, 0.61]);
        let b = Sample::new("b", vec![0.70, 0.72, 0.69, 0.75, 0.71]);
        let r = anova_single_factor(&[a.clone(), b.clone()], 0.05).unwrap();
        let t = t_test_pooled(&a, &b, 0.05).unwrap();
        let rel = (r.f_stat - t.t_stat * t.t_stat).abs() / r.f_stat;
        assert!(rel < 1e-9, "F={} t^2={}", r.f_stat, t.t_stat * t.t_stat);
        assert!((r.p_value - t.p_two_tail).abs() < 1e-9);
    }

    #[test]
    fn f_test_on_identical_samples_is_equal() {
        let a = Sample::new("a", vec![0.1, 0.2, 0.3]);
        let r = f_test(&a, &a.clone(), 0.05).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(r.equal_variances);
    }

    #[test]
    fn f_test_flags_variance_ratio_four_at_n30() {
        // var(a)=4*var(b) at n=30 each: two-tailed p ~ 4e-4, clearly unequal.
        let a: Vec<f64> = (0..30).map(|i| 2.0 * ((i % 5) as f64 - 2.0)).collect();
        let b: Vec<f64> = (0..30).map(|i| (i % 5) as f64 - 2.0).collect();
        let r = f_test(&Sample::new("a", a), &Sample::new("b", b), 0.05).unwrap();
        assert!((r.ratio - 4.0).abs() < 1e-12);
        assert!(!r.equal_variances);
    }

    #[test]
    fn pooled_t_is_antisymmetric() {
        let a = Sample::new("a", vec![0.6, 0.64, 0.58]);
        let b = Sample::new("b", vec![0.70, 0.72, 0.69]);
        let ab = t_test_pooled(&a, &b, 0.05).unwrap();
        let ba = t_test_pooled(&b, &a, 0.05).unwrap();
        assert_eq!(ab.t_stat, -ba.t_stat);
        assert_eq!(ab.p_two_tail, ba.p_two_tail);
    }

    #[test]
    fn equal_samples_give_t_zero_p_one() {
        let a = Sample::new("a", vec![0.5, 0.6, 0.7]);
        let p = t_test_pooled(&a, &a.clone(), 0.05).unwrap();
        assert_eq!(p.t_stat, 0.0);
        assert!((p.p_two_tail - 1.0).abs() < 1e-12);
        let w = t_test_welch(&a, &a.clone(), 0.05).unwrap();
        assert_eq!(w.t_stat, 0.0);
    }

    #[test]
    fn zero_variance_cases() {
        let a = Sample::new("a", vec![0.5, 0.5, 0.5]);
        let b = Sample::new("b", vec![0.5, 0.5, 0.5]);
        let same = t_test_pooled(&a, &b, 0.05).unwrap();
        assert_eq!(same.t_stat, 0.0);
        let c = Sample::new("c", vec![0.7, 0.7, 0.7]);
        let diff = t_test_pooled(&a, &c, 0.05).unwrap();
        assert!(diff.t_stat.is_infinite());
        assert_eq!(diff.p_two_tail, 0.0);
    }

    #[test]
    fn welch_df_approaches_pooled_df_for_equal_variances() {
        let a = Sample::new("a", vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = Sample::new("b", vec![11.0, 12.0, 13.0, 14.0, 15.0]);
        let w = t_test_welch(&a, &b, 0.05).unwrap();
        assert!((w.df - 8.0).abs() < 1.0);
    }

    #[test]
    fn identical_triple_forms_one_class() {
        let s = vec![
            Sample::new("x", vec![0.5, 0.6, 0.7, 0.55]),
            Sample::new("y", vec![0.5, 0.6, 0.7, 0.55]),
            Sample::new("z", vec![0.5, 0.6, 0.7, 0.55]),
        ];
        let p = equivalence_classes(&s, 0.05).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].len(), 3);
    }

    #[test]
    fn well_separated_samples_form_singletons() {
        let s = vec![spread("lo", 0.0, 6), spread("mid", 10.0, 6), spread("hi", 20.0, 6)];
        let p = equivalence_classes(&s, 0.05).unwrap();
        assert_eq!(p.classes.len(), 3);
        assert!(p.classes.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn classes_partition_the_names() {
        let s = vec![spread("a", 0.0, 6), spread("b", 0.0, 6), spread("c", 9.0, 6)];
        let p = equivalence_classes(&s, 0.05).unwrap();
        let mut names: Vec<&String> = p.classes.iter().flatten().collect();
        names.sort();
        assert_eq!(names, vec!["a", "b", "c"]);
    }

    #[test]
    fn forced_variant_switch_is_honored() {
        let s = vec![spread("a", 0.0, 6), spread("b", 0.2, 6)];
        let (_, recs) = equivalence_classes_with(&s, 0.05, VariantChoice::Welch).unwrap();
        assert!(recs.iter().all(|r| r.t_test.variant == TTestVariant::Welch));
        let (_, recs) = equivalence_classes_with(&s, 0.05, VariantChoice::Pooled).unwrap();
        assert!(recs.iter().all(|r| r.t_test.variant == TTestVariant::Pooled));
    }
}
