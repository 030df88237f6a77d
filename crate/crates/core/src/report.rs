//! Residual reports: per-sample values plus fixed-order summary statistics.

use serde::Serialize;

/// Residuals at one (base, fibre) sample. `components` follow the order of
/// the geometry's component names; `total` is their sum. Samples that failed
/// to evaluate carry the error text and NaN totals, and poison the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct SampleResidual {
    pub u: Vec<f64>,
    pub t: Vec<f64>,
    pub components: Vec<f64>,
    pub total: f64,
    pub error: Option<String>,
}

/// Summary of a verdict run. Reductions walk samples in enumeration order,
/// so the report does not depend on the parallelism degree.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub geometry: String,
    pub component_names: Vec<String>,
    pub tol: f64,
    pub pass: bool,
    pub max: f64,
    pub mean: f64,
    /// Index into `samples` of the worst sample (first attaining the max).
    pub argmax: usize,
    pub error_count: usize,
    pub samples: Vec<SampleResidual>,
}

impl VerdictReport {
    pub fn from_samples(
        geometry: &str,
        component_names: Vec<&'static str>,
        samples: Vec<SampleResidual>,
        tol: f64,
    ) -> VerdictReport {
        let mut max = f64::NEG_INFINITY;
        let mut argmax = 0;
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut error_count = 0usize;
        for (i, s) in samples.iter().enumerate() {
            if s.error.is_some() {
                error_count += 1;
                continue;
            }
            if s.total > max {
                max = s.total;
                argmax = i;
            }
            sum += s.total;
            count += 1;
        }
        let max = if count == 0 { f64::NAN } else { max };
        let mean = if count == 0 { f64::NAN } else { sum / count as f64 };
        VerdictReport {
            geometry: geometry.to_string(),
            component_names: component_names.iter().map(|s| s.to_string()).collect(),
            tol,
            pass: error_count == 0 && count > 0 && max < tol,
            max,
            mean,
            argmax,
            error_count,
            samples,
        }
    }

    pub fn worst_sample(&self) -> Option<&SampleResidual> {
        self.samples.get(self.argmax)
    }
}
