//! Photon statistics, inversion and atomic entropy, plus time-series
//! assembly.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{BlochVector, ClosedForm, CouplingConfig, ModelKind};
use crate::error::{Error, Result};
use crate::special::NeumaierSum;
use crate::squeezed::PhotonDistribution;

/// Means at or below this make Q undefined.
pub const MIN_MANDEL_MEAN: f64 = 1e-15;

/// A labelled observable sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    label: String,
    taus: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, taus: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if taus.len() != values.len() {
            return Err(Error::Usage(format!(
                "series '{label}': {} times but {} values",
                taus.len(),
                values.len()
            )));
        }
        if taus.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Usage(format!(
                "series '{label}': times are not strictly increasing"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "series '{label}': non-finite value at tau = {}",
                taus[i]
            )));
        }
        Ok(TimeSeries {
            label,
            taus,
            values,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.taus.iter().copied().zip(self.values.iter().copied())
    }
}

/// `steps` equally spaced times from `tau_min` to `tau_max` inclusive.
pub fn time_grid(tau_min: f64, tau_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Config(format!("steps must be >= 2, got {steps}")));
    }
    if !(tau_max > tau_min) || !tau_min.is_finite() || !tau_max.is_finite() || tau_min < 0.0 {
        return Err(Error::Config(format!(
            "need 0 <= tau_min < tau_max, got [{tau_min}, {tau_max}]"
        )));
    }
    let h = (tau_max - tau_min) / (steps - 1) as f64;
    let mut grid: Vec<f64> = (0..steps).map(|k| tau_min + k as f64 * h).collect();
    grid[steps - 1] = tau_max;
    Ok(grid)
}

/// Mandel statistics of one photon-number distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MandelSample {
    pub tau: f64,
    pub mean: f64,
    pub variance: f64,
    pub q: f64,
}

impl MandelSample {
    pub fn at(self, tau: f64) -> Self {
        MandelSample { tau, ..self }
    }
}

/// Mandel Q of the distribution `p`.
///
/// JC counts excitations with `â†â` (weight `n`); AJC counts with `ââ†`
/// (weight `n + 1`). The returned sample has `tau = 0`; use
/// [`MandelSample::at`] to stamp a time.
pub fn mandel_q(p: &[f64], kind: ModelKind) -> Result<MandelSample> {
    let shift = match kind {
        ModelKind::Jc => 0.0,
        ModelKind::Ajc => 1.0,
    };
    let mut first = NeumaierSum::default();
    let mut second = NeumaierSum::default();
    for (n, pn) in p.iter().enumerate() {
        let eta = n as f64 + shift;
        first.add(eta * pn);
        second.add(eta * eta * pn);
    }
    let mean = first.total();
    if mean <= MIN_MANDEL_MEAN {
        return Err(Error::UndefinedQ { mean });
    }
    let variance = second.total() - mean * mean;
    Ok(MandelSample {
        tau: 0.0,
        mean,
        variance,
        q: variance / mean - 1.0,
    })
}

/// Atomic inversion `W = ⟨σ_z⟩`.
pub fn inversion(dist: &PhotonDistribution, cfg: &CouplingConfig, tau: f64) -> f64 {
    ClosedForm::new(dist, cfg).bloch_vector(tau).rz
}

/// Von Neumann entropy (bits) of the qubit with Bloch vector `b`.
///
/// Depends only on `|b|`, which is clamped to 1.
pub fn entropy(b: &BlochVector) -> f64 {
    entropy_from_norm(b.norm())
}

pub fn entropy_from_norm(norm: f64) -> f64 {
    let r = norm.clamp(0.0, 1.0);
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    let s = h(0.5 * (1.0 - r)) + h(0.5 * (1.0 + r));
    s.clamp(0.0, 1.0)
}

/// Revival time `2π sqrt(I)` in scaled time.
pub fn revival_time(intensity: f64) -> f64 {
    std::f64::consts::TAU * intensity.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhotonStatistics {
    #[serde(rename = "sub")]
    SubPoissonian,
    #[serde(rename = "super")]
    SuperPoissonian,
}

impl PhotonStatistics {
    pub fn label(&self) -> &'static str {
        match self {
            PhotonStatistics::SubPoissonian => "sub",
            PhotonStatistics::SuperPoissonian => "super",
        }
    }
}

/// Sub-Poissonian when more than half of the samples have `q < 0`.
pub fn dominant_statistics(series: &TimeSeries) -> Result<PhotonStatistics> {
    if series.is_empty() {
        return Err(Error::Usage(
            "dominant_statistics needs a nonempty series".into(),
        ));
    }
    let negative = series.values().iter().filter(|q| **q < 0.0).count();
    if 2 * negative > series.len() {
        Ok(PhotonStatistics::SubPoissonian)
    } else {
        Ok(PhotonStatistics::SuperPoissonian)
    }
}

/// Time-dependent quantities a run can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observable {
    Mandel,
    Inversion,
    Entropy,
    BlochX,
    BlochY,
    BlochZ,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::Mandel,
        Observable::Inversion,
        Observable::Entropy,
        Observable::BlochX,
        Observable::BlochY,
        Observable::BlochZ,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Observable::Mandel => "mandel",
            Observable::Inversion => "inversion",
            Observable::Entropy => "entropy",
            Observable::BlochX => "bloch_x",
            Observable::BlochY => "bloch_y",
            Observable::BlochZ => "bloch_z",
        }
    }
}

/// Everything measured at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub tau: f64,
    /// `None` when Q is undefined (vacuum under JC counting).
    pub mandel: Option<MandelSample>,
    pub bloch: BlochVector,
    pub entropy: f64,
}

impl Sample {
    /// Builds a sample from a photon distribution and Bloch vector.
    pub fn from_parts(tau: f64, field: &[f64], bloch: BlochVector, kind: ModelKind) -> Self {
        Sample {
            tau,
            mandel: mandel_q(field, kind).ok().map(|m| m.at(tau)),
            bloch,
            entropy: entropy(&bloch),
        }
    }

    pub fn value(&self, obs: Observable) -> Option<f64> {
        match obs {
            Observable::Mandel => self.mandel.map(|m| m.q),
            Observable::Inversion | Observable::BlochZ => Some(self.bloch.rz),
            Observable::Entropy => Some(self.entropy),
            Observable::BlochX => Some(self.bloch.rx),
            Observable::BlochY => Some(self.bloch.ry),
        }
    }
}

/// Samples of one model over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: ModelKind,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    /// Evaluates the closed forms at every time in `taus`.
    ///
    /// Points are independent and evaluated in parallel; each point's sums
    /// are sequential, so the result does not depend on scheduling.
    pub fn closed_form(dist: &PhotonDistribution, cfg: &CouplingConfig, taus: &[f64]) -> Self {
        let cf = ClosedForm::new(dist, cfg);
        let samples = taus
            .par_iter()
            .map(|&tau| {
                Sample::from_parts(
                    tau,
                    &cf.reduced_field_diagonal(tau),
                    cf.bloch_vector(tau),
                    cfg.kind,
                )
            })
            .collect();
        Trajectory {
            kind: cfg.kind,
            samples,
        }
    }

    pub fn taus(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.tau).collect()
    }

    /// Extracts one observable as a [`TimeSeries`].
    pub fn series(&self, obs: Observable) -> Result<TimeSeries> {
        let mut values = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            match s.value(obs) {
                Some(v) => values.push(v),
                None => {
                    let mean = s.mandel.map(|m| m.mean).unwrap_or(0.0);
                    return Err(Error::UndefinedQ { mean });
                }
            }
        }
        TimeSeries::new(
            format!("{}_{}", self.kind.label().to_lowercase(), obs.label()),
            self.taus(),
            values,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeezed::{photon_number_distribution, SqueezeSpec};

    fn poisson(mean: f64, len: usize) -> Vec<f64> {
        let mut p = vec![(-mean).exp()];
        for n in 1..len {
            p.push(p[n - 1] * mean / n as f64);
        }
        p
    }

    #[test]
    fn poisson_q_values() {
        let p = poisson(4.0, 80);
        let jc = mandel_q(&p, ModelKind::Jc).unwrap();
        assert!(jc.q.abs() < 1e-12);
        let ajc = mandel_q(&p, ModelKind::Ajc).unwrap();
        assert!((ajc.q + 0.2).abs() < 1e-12);
        assert!((ajc.mean - 5.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_q_is_undefined_for_jc_only() {
        let p = [1.0, 0.0, 0.0];
        assert!(matches!(
            mandel_q(&p, ModelKind::Jc),
            Err(Error::UndefinedQ { .. })
        ));
        // one excitation, no spread
        let ajc = mandel_q(&p, ModelKind::Ajc).unwrap();
        assert_eq!(ajc.q, -1.0);
    }

    #[test]
    fn entropy_examples() {
        let unit = BlochVector {
            rx: 0.0,
            ry: 0.0,
            rz: -1.0,
        };
        assert_eq!(entropy(&unit), 0.0);
        let zero = BlochVector {
            rx: 0.0,
            ry: 0.0,
            rz: 0.0,
        };
        assert_eq!(entropy(&zero), 1.0);
        let b = BlochVector {
            rx: 0.36,
            ry: 0.0,
            rz: -0.48,
        };
        assert!((entropy(&b) - 0.721_928_094_887_362_3).abs() < 1e-12);
        let over = BlochVector {
            rx: 0.0,
            ry: 0.0,
            rz: 1.0 + 1e-11,
        };
        assert_eq!(entropy(&over), 0.0);
    }

    #[test]
    fn revival_time_examples() {
        assert!((revival_time(40.0) - 39.738_353_063_184_4).abs() < 1e-12);
        assert_eq!(revival_time(1.0), std::f64::consts::TAU);
        assert!((revival_time(0.25) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn dominant_statistics_threshold() {
        let taus: Vec<f64> = (0..10).map(f64::from).collect();
        let sub = TimeSeries::new("q", taus.clone(), vec![-0.3; 10]).unwrap();
        assert_eq!(
            dominant_statistics(&sub).unwrap(),
            PhotonStatistics::SubPoissonian
        );
        let sup = TimeSeries::new("q", taus.clone(), vec![0.3; 10]).unwrap();
        assert_eq!(
            dominant_statistics(&sup).unwrap(),
            PhotonStatistics::SuperPoissonian
        );
        let tie: Vec<f64> = (0..10)
            .map(|k| if k % 2 == 0 { -0.1 } else { 0.1 })
            .collect();
        let tie = TimeSeries::new("q", taus, tie).unwrap();
        assert_eq!(
            dominant_statistics(&tie).unwrap(),
            PhotonStatistics::SuperPoissonian
        );
        let empty = TimeSeries::new("q", vec![], vec![]).unwrap();
        assert!(dominant_statistics(&empty).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new("x", vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(TimeSeries::new("x", vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(TimeSeries::new("x", vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn grid_contract() {
        let g = time_grid(0.0, 1.0, 2).unwrap();
        assert_eq!(g, vec![0.0, 1.0]);
        let g = time_grid(0.0, 100.0, 5001).unwrap();
        assert_eq!(g.len(), 5001);
        assert_eq!(g[5000], 100.0);
        assert!((g[1] - 0.02).abs() < 1e-15);
        assert!(time_grid(0.0, 1.0, 1).is_err());
        assert!(time_grid(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn initial_sample_matches_static_moments() {
        let spec = SqueezeSpec::from_intensity(10.0, 0.5).unwrap();
        let d = photon_number_distribution(&spec, 1e-12).unwrap();
        let (mean, var) = crate::squeezed::moments(&d);
        for kind in [ModelKind::Jc, ModelKind::Ajc] {
            let traj =
                Trajectory::closed_form(&d, &CouplingConfig::resonant(kind, 0.0001), &[0.0, 1.0]);
            let s = &traj.samples[0];
            assert!(s.entropy.abs() < 1e-12);
            assert!((s.bloch.rz + 1.0).abs() < 1e-12);
            let m = s.mandel.unwrap();
            let shift = if kind == ModelKind::Ajc { 1.0 } else { 0.0 };
            assert!((m.mean - mean - shift).abs() < 1e-10);
            assert!((m.variance - var).abs() < 1e-9);
        }
    }

    #[test]
    fn vacuum_mandel_series_errors() {
        let d = photon_number_distribution(&SqueezeSpec::new(0.0, 0.0).unwrap(), 1e-12).unwrap();
        let traj = Trajectory::closed_form(
            &d,
            &CouplingConfig::resonant(ModelKind::Jc, 0.0),
            &[0.0, 1.0],
        );
        assert!(traj.series(Observable::Mandel).is_err());
        assert!(traj.series(Observable::Inversion).is_ok());
    }
}
