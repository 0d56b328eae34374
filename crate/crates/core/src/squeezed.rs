//! Squeezed coherent states `|α, r⟩` in the Fock basis.
//!
//! Amplitudes follow the standard displaced-squeezed-vacuum expansion
//!
//! ```text
//! C_n = cosh(r)^{-1/2} exp[-α²/2 - α² tanh(r)/2] (tanh(r)/2)^{n/2} / sqrt(n!)
//!       × H_n(α e^r / sqrt(sinh 2r))
//! ```
//!
//! for real `α` and zero squeeze phase, where every amplitude is real. All
//! factors are combined in log space; below [`R_MIN`] the coherent-state
//! closed form is used instead since `sinh(2r)` vanishes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{
    hermite_log_scaled, ln_factorial_table, HermiteSequence, LogScaledValue, NeumaierSum,
};

/// Squeeze parameters below this use the coherent-state limit.
pub const R_MIN: f64 = 1e-8;

/// Hard upper bound on the retained Fock index.
pub const N_CAP: usize = 4096;

/// Default truncation tolerance on the discarded probability mass.
pub const DEFAULT_EPS_TRUNC: f64 = 1e-12;

/// Parameters of the initial squeezed coherent field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeSpec {
    alpha: f64,
    r: f64,
    theta: f64,
}

impl SqueezeSpec {
    /// Squeezed coherent state with real amplitude `alpha` and zero squeeze phase.
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        Self::with_phase(alpha, r, 0.0)
    }

    pub fn with_phase(alpha: f64, r: f64, theta: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "coherent amplitude must be finite, got {alpha}"
            )));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "squeeze parameter must be finite and >= 0, got {r}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Domain(format!(
                "squeeze phase must be finite, got {theta}"
            )));
        }
        Ok(SqueezeSpec { alpha, r, theta })
    }

    /// Builds the state whose mean photon number is `intensity`.
    pub fn from_intensity(intensity: f64, r: f64) -> Result<Self> {
        Self::new(coherent_amplitude_for_intensity(intensity, r)?, r)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Initial mean photon number `α² + sinh²(r)`.
    pub fn intensity(&self) -> f64 {
        self.alpha * self.alpha + self.r.sinh().powi(2)
    }

    /// Analytic photon-number variance for zero squeeze phase.
    pub fn variance(&self) -> f64 {
        let (s, c) = (self.r.sinh(), self.r.cosh());
        self.alpha * self.alpha * (-2.0 * self.r).exp() + 2.0 * s * s * c * c
    }

    fn require_zero_phase(&self) -> Result<()> {
        if self.theta != 0.0 {
            return Err(Error::Domain(format!(
                "squeeze phase unsupported: theta = {} (only theta = 0 is implemented)",
                self.theta
            )));
        }
        Ok(())
    }

    fn is_coherent_limit(&self) -> bool {
        self.r < R_MIN
    }
}

/// Coherent amplitude `α = sqrt(I - sinh²r)` giving total intensity `I`.
pub fn coherent_amplitude_for_intensity(intensity: f64, r: f64) -> Result<f64> {
    if !intensity.is_finite() || intensity < 0.0 {
        return Err(Error::Domain(format!(
            "intensity must be finite and >= 0, got {intensity}"
        )));
    }
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!(
            "squeeze parameter must be finite and >= 0, got {r}"
        )));
    }
    let squeeze_photons = r.sinh().powi(2);
    let excess = intensity - squeeze_photons;
    // absorb rounding in sinh² when the caller passes sinh²(r) itself
    if excess < -4.0 * f64::EPSILON * squeeze_photons.max(1.0) {
        return Err(Error::Domain(format!(
            "squeeze photons exceed target intensity: sinh^2({r}) = {squeeze_photons} > {intensity}"
        )));
    }
    Ok(excess.max(0.0).sqrt())
}

/// Per-state constants shared by every Fock index.
struct AmplitudeTerms {
    coherent: bool,
    /// Log of the n-independent prefactor.
    log_prefactor: f64,
    /// Log of the per-photon factor (`tanh(r)/2` halved, or `ln|α|`).
    log_step: f64,
    /// Sign picked up per photon in the coherent limit.
    step_sign: i8,
    hermite_arg: f64,
}

impl AmplitudeTerms {
    fn new(spec: &SqueezeSpec) -> Self {
        let a = spec.alpha;
        if spec.is_coherent_limit() {
            AmplitudeTerms {
                coherent: true,
                log_prefactor: -0.5 * a * a,
                log_step: a.abs().ln(),
                step_sign: if a < 0.0 {
                    -1
                } else if a > 0.0 {
                    1
                } else {
                    0
                },
                hermite_arg: 0.0,
            }
        } else {
            let r = spec.r;
            let t = r.tanh();
            AmplitudeTerms {
                coherent: false,
                log_prefactor: -0.5 * r.cosh().ln() - 0.5 * a * a * (1.0 + t),
                log_step: 0.5 * (0.5 * t).ln(),
                step_sign: 1,
                hermite_arg: a * r.exp() / (2.0 * r).sinh().sqrt(),
            }
        }
    }

    fn combine(&self, n: usize, ln_n_factorial: f64, hermite: LogScaledValue) -> LogScaledValue {
        let n_f = n as f64;
        if self.coherent {
            if n == 0 {
                return LogScaledValue::new(1, self.log_prefactor);
            }
            let sign = match self.step_sign {
                0 => 0,
                s if s < 0 && n % 2 == 1 => -1,
                _ => 1,
            };
            LogScaledValue::new(
                sign,
                self.log_prefactor + n_f * self.log_step - 0.5 * ln_n_factorial,
            )
        } else {
            hermite.scale_log(self.log_prefactor + n_f * self.log_step - 0.5 * ln_n_factorial)
        }
    }
}

/// Log-scaled Fock amplitude `⟨n|α, r⟩`.
pub fn amplitude_log_scaled(n: usize, spec: &SqueezeSpec) -> Result<LogScaledValue> {
    spec.require_zero_phase()?;
    let terms = AmplitudeTerms::new(spec);
    let ln_fact = ln_factorial_table(n)[n];
    let hermite = if terms.coherent {
        LogScaledValue::ONE
    } else {
        hermite_log_scaled(n, terms.hermite_arg)
    };
    Ok(terms.combine(n, ln_fact, hermite))
}

/// Fock amplitude `S_n = ⟨n|α, r⟩` (real for zero squeeze phase).
pub fn amplitude(n: usize, spec: &SqueezeSpec) -> Result<f64> {
    amplitude_log_scaled(n, spec).map(|v| v.to_f64())
}

/// Truncated photon-number distribution together with the signed amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    spec: SqueezeSpec,
    amplitudes: Vec<f64>,
    probs: Vec<f64>,
    tail_mass: f64,
    eps_trunc: f64,
}

impl PhotonDistribution {
    /// Distribution from explicit amplitudes, e.g. a single Fock state.
    ///
    /// Used by tests and the oracle to drive the dynamics with inputs that
    /// do not come from a squeezed state.
    pub fn from_amplitudes(
        spec: SqueezeSpec,
        amplitudes: Vec<f64>,
        eps_trunc: f64,
    ) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Domain("empty amplitude list".into()));
        }
        let probs: Vec<f64> = amplitudes.iter().map(|a| a * a).collect();
        let mass: f64 = probs.iter().copied().collect::<NeumaierSum>().total();
        if mass > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "amplitudes are not normalized: mass {mass}"
            )));
        }
        Ok(PhotonDistribution {
            spec,
            amplitudes,
            probs,
            tail_mass: (1.0 - mass).max(0.0),
            eps_trunc,
        })
    }

    pub fn spec(&self) -> &SqueezeSpec {
        &self.spec
    }

    /// Signed amplitudes `S_0..=S_{n_max}`.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// Probability mass beyond `n_max`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn eps_trunc(&self) -> f64 {
        self.eps_trunc
    }

    /// `S_n`, zero beyond the truncation edge.
    pub fn amp(&self, n: usize) -> f64 {
        self.amplitudes.get(n).copied().unwrap_or(0.0)
    }

    pub fn retained_mass(&self) -> f64 {
        self.probs.iter().copied().collect::<NeumaierSum>().total()
    }
}

/// Fock index the truncation must reach regardless of the retained mass.
///
/// Squeezed tails oscillate, so a prefix can look converged while a later
/// lobe still carries weight.
pub fn minimum_cutoff(spec: &SqueezeSpec) -> usize {
    let intensity = spec.intensity();
    let by_intensity = intensity + 10.0 * intensity.sqrt() + 20.0;
    let by_variance = intensity + 10.0 * spec.variance().sqrt();
    by_intensity.max(by_variance).ceil() as usize
}

/// Photon-number distribution truncated once the retained mass reaches
/// `1 - eps_trunc` and the index has passed [`minimum_cutoff`].
pub fn photon_number_distribution(
    spec: &SqueezeSpec,
    eps_trunc: f64,
) -> Result<PhotonDistribution> {
    spec.require_zero_phase()?;
    if !(eps_trunc > 0.0 && eps_trunc <= 1e-6) {
        return Err(Error::Domain(format!(
            "eps_trunc must lie in (0, 1e-6], got {eps_trunc}"
        )));
    }
    let terms = AmplitudeTerms::new(spec);
    let floor = minimum_cutoff(spec).min(N_CAP);
    let ln_fact = ln_factorial_table(N_CAP);
    let mut hermite = HermiteSequence::new(terms.hermite_arg);

    let mut amplitudes = Vec::new();
    let mut probs = Vec::new();
    let mut mass = NeumaierSum::default();
    for n in 0..=N_CAP {
        let h = hermite.next().expect("infinite sequence");
        let h = if terms.coherent {
            LogScaledValue::ONE
        } else {
            h
        };
        let s = terms.combine(n, ln_fact[n], h).to_f64();
        amplitudes.push(s);
        probs.push(s * s);
        mass.add(s * s);
        if n >= floor && mass.total() >= 1.0 - eps_trunc {
            let tail_mass = (1.0 - mass.total()).max(0.0);
            return Ok(PhotonDistribution {
                spec: *spec,
                amplitudes,
                probs,
                tail_mass,
                eps_trunc,
            });
        }
    }
    Err(Error::Truncation {
        cap: N_CAP,
        achieved: mass.total(),
        target: 1.0 - eps_trunc,
    })
}

/// Mean and variance of the retained distribution.
pub fn moments(dist: &PhotonDistribution) -> (f64, f64) {
    let mut first = NeumaierSum::default();
    let mut second = NeumaierSum::default();
    for (n, p) in dist.probs().iter().enumerate() {
        let n = n as f64;
        first.add(n * p);
        second.add(n * n * p);
    }
    let mean = first.total();
    (mean, second.total() - mean * mean)
}
