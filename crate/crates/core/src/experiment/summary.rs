use serde::{Deserialize, Serialize};

use super::config::ModelSpec;
use super::trial::TrialReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: ModelSpec,
    pub n_trials: usize,
    pub mean_rmse: f64,
    /// Sample standard deviation (n − 1) over √n; 0 for a single trial.
    pub se_mean_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotRow {
    pub model: ModelSpec,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile of sorted data by linear interpolation between order
/// statistics: position `p·(n − 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    assert!((0.0..=1.0).contains(&p), "quantile level out of range");
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-model RMSE values in trial order, models in reporting order
/// (`ModelSpec::all`). Reports must all attempt the same models.
fn collect(reports: &[TrialReport]) -> Result<Vec<(ModelSpec, Vec<f64>)>> {
    let mut sorted: Vec<&TrialReport> = reports.iter().collect();
    sorted.sort_by_key(|r| r.trial_id);
    let expected = sorted.first().ok_or(Error::EmptyInput)?.attempted();
    if sorted.iter().any(|r| r.attempted() != expected) {
        return Err(Error::InconsistentModels);
    }
    Ok(expected
        .into_iter()
        .map(|m| (m, sorted.iter().filter_map(|r| r.rmse_of(m)).collect()))
        .collect())
}

/// Mean RMSE and its standard error per model, over the trials in which the
/// model succeeded. Models that never succeeded are left out.
pub fn aggregate(reports: &[TrialReport]) -> Result<Vec<SummaryRow>> {
    Ok(collect(reports)?
        .into_iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(model, v)| {
            let (mean_rmse, se_mean_rmse) = mean_and_se(&v);
            SummaryRow {
                model,
                n_trials: v.len(),
                mean_rmse,
                se_mean_rmse,
            }
        })
        .collect())
}

/// Five-number summary of the per-trial RMSE of every model.
pub fn boxplot(reports: &[TrialReport]) -> Result<Vec<BoxplotRow>> {
    Ok(collect(reports)?
        .into_iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(model, mut v)| {
            v.sort_by(f64::total_cmp);
            BoxplotRow {
                model,
                min: v[0],
                q1: quantile_sorted(&v, 0.25),
                median: quantile_sorted(&v, 0.5),
                q3: quantile_sorted(&v, 0.75),
                max: v[v.len() - 1],
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::trial::{ModelFailure, ModelResult};
    use crate::kernels::KernelId;

    const K1: ModelSpec = ModelSpec::Kernel(KernelId::LAPLACE);

    fn report(trial_id: u64, values: &[(ModelSpec, f64)]) -> TrialReport {
        TrialReport {
            trial_id,
            data_jitter: 0.0,
            results: values
                .iter()
                .map(|&(model, rmse)| ModelResult {
                    model,
                    rmse,
                    jitter: 0.0,
                    seconds: 0.0,
                    loss_trace: None,
                })
                .collect(),
            failures: vec![],
        }
    }

    #[test]
    fn single_trial_has_zero_se() {
        let s = aggregate(&[report(0, &[(K1, 0.25)])]).unwrap();
        assert_eq!(s[0].mean_rmse, 0.25);
        assert_eq!(s[0].se_mean_rmse, 0.0);
        assert_eq!(s[0].n_trials, 1);
    }

    #[test]
    fn two_trials_hand_arithmetic() {
        let s = aggregate(&[report(0, &[(K1, 0.1)]), report(1, &[(K1, 0.3)])]).unwrap();
        assert!((s[0].mean_rmse - 0.2).abs() < 1e-15);
        assert!((s[0].se_mean_rmse - 0.1).abs() < 1e-15);
    }

    #[test]
    fn inconsistent_models_rejected() {
        let a = report(0, &[(K1, 0.1)]);
        let b = report(1, &[(ModelSpec::NN1, 0.1)]);
        assert!(matches!(aggregate(&[a, b]), Err(Error::InconsistentModels)));
        assert!(matches!(aggregate(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn failures_count_as_attempted_but_not_in_stats() {
        let a = report(0, &[(K1, 0.1), (ModelSpec::NN1, 0.5)]);
        let mut b = report(1, &[(K1, 0.3)]);
        b.failures.push(ModelFailure {
            model: ModelSpec::NN1,
            message: "diverged".into(),
            numerical: true,
        });
        let s = aggregate(&[a, b]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].model, K1);
        assert_eq!(
            (s[1].model, s[1].n_trials, s[1].mean_rmse),
            (ModelSpec::NN1, 1, 0.5)
        );
    }

    #[test]
    fn quantiles_interpolate_linearly() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 0.25), 1.75);
        assert_eq!(quantile_sorted(&v, 0.5), 2.5);
        assert_eq!(quantile_sorted(&v, 0.75), 3.25);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert_eq!(quantile_sorted(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn boxplot_uses_all_trials() {
        let reps: Vec<_> = [0.5, 0.1, 0.3, 0.2, 0.4]
            .iter()
            .enumerate()
            .map(|(i, &v)| report(i as u64, &[(K1, v)]))
            .collect();
        let b = boxplot(&reps).unwrap();
        assert_eq!(
            (b[0].min, b[0].q1, b[0].median, b[0].q3, b[0].max),
            (0.1, 0.2, 0.3, 0.4, 0.5)
        );
    }
}
