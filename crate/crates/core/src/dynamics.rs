//! Exact closed-form evolution of `|g⟩ ⊗ |α, r⟩` under the JC and AJC
//! Hamiltonians.
//!
//! Both Hamiltonians conserve an excitation number, so the dynamics split
//! into independent two-level blocks. For JC the block of `|g,n⟩` is
//! `{|g,n⟩, |e,n-1⟩}`; for AJC it is `{|g,n⟩, |e,n+1⟩}`. Each block rotates
//! at its own Rabi frequency, and every quantity in this module is a sum of
//! per-block trigonometric terms.
//!
//! Time enters only as the scaled time `τ = λt`, so a Rabi frequency `R`
//! contributes `sin(R τ / λ)` and the field frequency contributes `ξ τ`.
//! The constant `-ω/2` energy offset only adds a global phase and is dropped.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::NeumaierSum;
use crate::squeezed::PhotonDistribution;

/// Which half of the Rabi Hamiltonian drives the atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Rotating (Jaynes-Cummings) component.
    #[serde(rename = "JC")]
    Jc,
    /// Counter-rotating (anti-Jaynes-Cummings) component.
    #[serde(rename = "AJC")]
    Ajc,
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Jc => "JC",
            ModelKind::Ajc => "AJC",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Atom-field coupling in dimensionless form.
///
/// `beta = δ/λ` is the JC detuning and `xi = ω/λ` the field frequency. The
/// AJC sum frequency is `δ̄ = δ + 2ω`, so resonance in both models is
/// `beta = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingConfig {
    pub kind: ModelKind,
    pub beta: f64,
    pub xi: f64,
    pub lambda: f64,
}

impl CouplingConfig {
    /// Coupling with `λ = 1`.
    pub fn new(kind: ModelKind, beta: f64, xi: f64) -> Self {
        CouplingConfig {
            kind,
            beta,
            xi,
            lambda: 1.0,
        }
    }

    pub fn resonant(kind: ModelKind, xi: f64) -> Self {
        Self::new(kind, 0.0, xi)
    }

    pub fn with_kind(self, kind: ModelKind) -> Self {
        CouplingConfig { kind, ..self }
    }

    /// δ = ω₀ - ω.
    pub fn detuning(&self) -> f64 {
        self.beta * self.lambda
    }

    /// ω.
    pub fn field_frequency(&self) -> f64 {
        self.xi * self.lambda
    }

    /// ω₀ = δ + ω.
    pub fn atomic_frequency(&self) -> f64 {
        self.detuning() + self.field_frequency()
    }

    /// δ̄ = δ + 2ω = ω₀ + ω.
    pub fn sum_frequency(&self) -> f64 {
        self.detuning() + 2.0 * self.field_frequency()
    }

    /// Block detuning in units of λ: `β` for JC and `β + 2ξ` for AJC.
    pub fn block_detuning(&self) -> f64 {
        match self.kind {
            ModelKind::Jc => self.beta,
            ModelKind::Ajc => self.beta + 2.0 * self.xi,
        }
    }

    /// `4n` (JC) or `4n + 4` (AJC): squared coupling of block `n` in units of `λ²/4`.
    fn coupling_sq(&self, n: usize) -> f64 {
        match self.kind {
            ModelKind::Jc => 4.0 * n as f64,
            ModelKind::Ajc => 4.0 * (n as f64 + 1.0),
        }
    }
}

/// Rabi frequency of the block containing `|g,n⟩`.
///
/// JC: `(λ/2) sqrt(4n + β²)`; AJC: `(λ/2) sqrt(4n + 4 + (β + 2ξ)²)`.
pub fn rabi_frequency(n: usize, cfg: &CouplingConfig) -> f64 {
    let d = cfg.block_detuning();
    0.5 * cfg.lambda * (cfg.coupling_sq(n) + d * d).sqrt()
}

/// Dressing coefficients `(c, s)` of the block containing `|g,n⟩`, with
/// `c² + s² = 1`.
///
/// The resonant JC vacuum block (`n = 0`, `β = 0`) has no partner state and a
/// vanishing Rabi frequency; it returns `(0, 0)`, which is harmless because
/// every use is multiplied by `sin(0) = 0`.
pub fn dressing_coefficients(n: usize, cfg: &CouplingConfig) -> (f64, f64) {
    let d = cfg.block_detuning();
    let k = cfg.coupling_sq(n);
    let norm = (k + d * d).sqrt();
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    (d / norm, k.sqrt() / norm)
}

/// Joint atom-field state at scaled time `tau`.
///
/// `g_amp[n]` and `e_amp[n]` are the amplitudes on `|g,n⟩` and `|e,n⟩`; both
/// have length `n_max + 2` so the AJC excitation of the top retained level
/// still has a slot.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedJointState {
    pub tau: f64,
    pub g_amp: Vec<Complex64>,
    pub e_amp: Vec<Complex64>,
    pub n_max: usize,
}

impl EvolvedJointState {
    pub fn norm_sqr(&self) -> f64 {
        self.g_amp
            .iter()
            .chain(&self.e_amp)
            .map(|z| z.norm_sqr())
            .collect::<NeumaierSum>()
            .total()
    }

    /// Field photon-number probabilities from the amplitudes.
    pub fn photon_probabilities(&self) -> Vec<f64> {
        self.g_amp
            .iter()
            .zip(&self.e_amp)
            .map(|(g, e)| g.norm_sqr() + e.norm_sqr())
            .collect()
    }

    /// Partial trace over the field.
    pub fn atom_density(&self) -> AtomDensity {
        let rho_gg = self
            .g_amp
            .iter()
            .map(|z| z.norm_sqr())
            .collect::<NeumaierSum>()
            .total();
        let rho_ee = self
            .e_amp
            .iter()
            .map(|z| z.norm_sqr())
            .collect::<NeumaierSum>()
            .total();
        let (mut re, mut im) = (NeumaierSum::default(), NeumaierSum::default());
        for (g, e) in self.g_amp.iter().zip(&self.e_amp) {
            let z = g * e.conj();
            re.add(z.re);
            im.add(z.im);
        }
        AtomDensity {
            rho_gg,
            rho_ee,
            rho_ge: Complex64::new(re.total(), im.total()),
        }
    }
}

/// Reduced atomic density matrix in the `{|g⟩, |e⟩}` basis.
///
/// `rho_ge = ⟨g|ρ|e⟩`; `rho_eg` is its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomDensity {
    pub rho_gg: f64,
    pub rho_ee: f64,
    pub rho_ge: Complex64,
}

impl AtomDensity {
    pub fn trace(&self) -> f64 {
        self.rho_gg + self.rho_ee
    }

    pub fn determinant(&self) -> f64 {
        self.rho_gg * self.rho_ee - self.rho_ge.norm_sqr()
    }

    pub fn rho_eg(&self) -> Complex64 {
        self.rho_ge.conj()
    }

    /// Bloch vector with `σ_z = |e⟩⟨e| - |g⟩⟨g|` and `σ_y = -i|e⟩⟨g| + i|g⟩⟨e|`,
    /// so that `rx + i ry = 2 ρ_ge`.
    pub fn bloch_vector(&self) -> BlochVector {
        BlochVector {
            rx: 2.0 * self.rho_ge.re,
            ry: 2.0 * self.rho_ge.im,
            rz: self.rho_ee - self.rho_gg,
        }
    }
}

/// Expectation values `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` of the atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }
}

/// Per-block constants of one (distribution, coupling) pair.
///
/// Building this once and sampling it at many times is how the time series
/// are assembled; the free functions below are one-shot wrappers.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    cfg: CouplingConfig,
    amps: Vec<f64>,
    /// `R_n / λ`, so that `R_n t = rate[n] * τ`.
    rate: Vec<f64>,
    c: Vec<f64>,
    s: Vec<f64>,
}

/// Per-block trigonometric values at one time.
struct BlockPhases {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ClosedForm {
    pub fn new(dist: &PhotonDistribution, cfg: &CouplingConfig) -> Self {
        let amps = dist.amplitudes().to_vec();
        // blocks past the edge carry S ≡ 0 but keep the index arithmetic total
        let blocks = amps.len() + 2;
        let mut rate = Vec::with_capacity(blocks);
        let mut c = Vec::with_capacity(blocks);
        let mut s = Vec::with_capacity(blocks);
        for n in 0..blocks {
            rate.push(rabi_frequency(n, cfg) / cfg.lambda);
            let (cn, sn) = dressing_coefficients(n, cfg);
            c.push(cn);
            s.push(sn);
        }
        ClosedForm {
            cfg: *cfg,
            amps,
            rate,
            c,
            s,
        }
    }

    pub fn config(&self) -> &CouplingConfig {
        &self.cfg
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    fn amp(&self, n: usize) -> f64 {
        self.amps.get(n).copied().unwrap_or(0.0)
    }

    fn phases(&self, tau: f64) -> BlockPhases {
        let (sin, cos) = self.rate.iter().map(|w| (w * tau).sin_cos()).unzip();
        BlockPhases { cos, sin }
    }

    /// `S_n (cos + i c sin)` factor for the ground amplitude of block `n`,
    /// without the free-field phase.
    fn ground_factor(&self, n: usize, ph: &BlockPhases) -> Complex64 {
        Complex64::new(ph.cos[n], self.c[n] * ph.sin[n]) * self.amp(n)
    }

    /// `S_n s_n sin` magnitude of the excited amplitude of block `n`.
    fn excited_factor(&self, n: usize, ph: &BlockPhases) -> f64 {
        self.amp(n) * self.s[n] * ph.sin[n]
    }

    pub fn evolve(&self, tau: f64) -> EvolvedJointState {
        let n_max = self.n_max();
        let len = n_max + 2;
        let ph = self.phases(tau);
        let wt = self.cfg.xi * tau;
        let phase = |k: f64| Complex64::from_polar(1.0, -k * wt);
        let minus_i = Complex64::new(0.0, -1.0);
        let mut g_amp = vec![Complex64::new(0.0, 0.0); len];
        let mut e_amp = vec![Complex64::new(0.0, 0.0); len];
        match self.cfg.kind {
            ModelKind::Jc => {
                for n in 0..=n_max {
                    g_amp[n] = self.ground_factor(n, &ph) * phase(n as f64);
                }
                // |e,n⟩ belongs to block n+1
                for n in 0..n_max {
                    e_amp[n] = minus_i * self.excited_factor(n + 1, &ph) * phase(n as f64 + 1.0);
                }
            }
            ModelKind::Ajc => {
                for n in 0..=n_max {
                    g_amp[n] = self.ground_factor(n, &ph) * phase(n as f64 + 1.0);
                }
                // |e,n⟩ belongs to block n-1
                for n in 1..len {
                    e_amp[n] = minus_i * self.excited_factor(n - 1, &ph) * phase(n as f64);
                }
            }
        }
        EvolvedJointState {
            tau,
            g_amp,
            e_amp,
            n_max,
        }
    }

    /// Diagonal of the reduced field density matrix, indices `0..=n_max+1`.
    pub fn reduced_field_diagonal(&self, tau: f64) -> Vec<f64> {
        let n_max = self.n_max();
        let ph = self.phases(tau);
        let stay = |n: usize| {
            let a = self.amp(n);
            a * a * (ph.cos[n].powi(2) + self.c[n].powi(2) * ph.sin[n].powi(2))
        };
        let moved = |n: usize| self.excited_factor(n, &ph).powi(2);
        (0..n_max + 2)
            .map(|n| match self.cfg.kind {
                ModelKind::Jc => stay(n) + moved(n + 1),
                ModelKind::Ajc => stay(n) + if n == 0 { 0.0 } else { moved(n - 1) },
            })
            .collect()
    }

    /// Reduced atomic density matrix from the explicit block sums.
    pub fn atom_density(&self, tau: f64) -> AtomDensity {
        let n_max = self.n_max();
        let ph = self.phases(tau);
        let (mut gg, mut ee) = (NeumaierSum::default(), NeumaierSum::default());
        let (mut re, mut im) = (NeumaierSum::default(), NeumaierSum::default());
        let i = Complex64::new(0.0, 1.0);
        for n in 0..=n_max {
            let a = self.amp(n);
            gg.add(a * a * (ph.cos[n].powi(2) + self.c[n].powi(2) * ph.sin[n].powi(2)));
            ee.add(self.excited_factor(n, &ph).powi(2));
            // coherence between |g,n⟩ and |e,n⟩, which sit in neighbouring blocks
            let ge = match self.cfg.kind {
                ModelKind::Jc => {
                    i * self.excited_factor(n + 1, &ph)
                        * Complex64::from_polar(1.0, self.cfg.xi * tau)
                        * self.ground_factor(n, &ph)
                }
                ModelKind::Ajc if n > 0 => {
                    i * self.excited_factor(n - 1, &ph)
                        * Complex64::from_polar(1.0, -self.cfg.xi * tau)
                        * self.ground_factor(n, &ph)
                }
                ModelKind::Ajc => Complex64::new(0.0, 0.0),
            };
            re.add(ge.re);
            im.add(ge.im);
        }
        AtomDensity {
            rho_gg: gg.total(),
            rho_ee: ee.total(),
            rho_ge: Complex64::new(re.total(), im.total()),
        }
    }

    /// Bloch components from their explicit trigonometric sums.
    pub fn bloch_vector(&self, tau: f64) -> BlochVector {
        let n_max = self.n_max();
        let ph = self.phases(tau);
        let (sw, cw) = (self.cfg.xi * tau).sin_cos();
        let (mut rx, mut ry, mut rz) = (
            NeumaierSum::default(),
            NeumaierSum::default(),
            NeumaierSum::default(),
        );
        for n in 0..=n_max {
            let a = self.amp(n);
            let stay = a * a * (ph.cos[n].powi(2) + self.c[n].powi(2) * ph.sin[n].powi(2));
            match self.cfg.kind {
                ModelKind::Jc => {
                    let partner = self.amp(n + 1);
                    let k = 2.0 * a * partner * self.s[n + 1] * ph.sin[n + 1];
                    rx.add(-k * ph.cos[n] * sw - k * self.c[n] * ph.sin[n] * cw);
                    ry.add(k * ph.cos[n] * cw - k * self.c[n] * ph.sin[n] * sw);
                    rz.add(self.excited_factor(n + 1, &ph).powi(2) - stay);
                }
                ModelKind::Ajc => {
                    if n > 0 {
                        let partner = self.amp(n - 1);
                        let k = 2.0 * a * partner * self.s[n - 1] * ph.sin[n - 1];
                        rx.add(k * ph.cos[n] * sw - k * self.c[n] * ph.sin[n] * cw);
                        ry.add(k * ph.cos[n] * cw + k * self.c[n] * ph.sin[n] * sw);
                        rz.add(self.excited_factor(n - 1, &ph).powi(2));
                    }
                    rz.add(-stay);
                }
            }
        }
        // AJC: the top retained level still excites into |e, n_max+1⟩
        if self.cfg.kind == ModelKind::Ajc {
            rz.add(self.excited_factor(n_max, &ph).powi(2));
        }
        BlochVector {
            rx: rx.total(),
            ry: ry.total(),
            rz: rz.total(),
        }
    }
}

pub fn evolve(dist: &PhotonDistribution, cfg: &CouplingConfig, tau: f64) -> EvolvedJointState {
    ClosedForm::new(dist, cfg).evolve(tau)
}

pub fn reduced_field_diagonal(
    dist: &PhotonDistribution,
    cfg: &CouplingConfig,
    tau: f64,
) -> Vec<f64> {
    ClosedForm::new(dist, cfg).reduced_field_diagonal(tau)
}

pub fn atom_density(dist: &PhotonDistribution, cfg: &CouplingConfig, tau: f64) -> AtomDensity {
    ClosedForm::new(dist, cfg).atom_density(tau)
}

pub fn bloch_vector(dist: &PhotonDistribution, cfg: &CouplingConfig, tau: f64) -> BlochVector {
    ClosedForm::new(dist, cfg).bloch_vector(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeezed::{photon_number_distribution, SqueezeSpec};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn dist(alpha: f64, r: f64) -> PhotonDistribution {
        photon_number_distribution(&SqueezeSpec::new(alpha, r).unwrap(), 1e-12).unwrap()
    }

    #[test]
    fn rabi_frequency_examples() {
        let jc = CouplingConfig::resonant(ModelKind::Jc, 0.0);
        assert_eq!(rabi_frequency(0, &jc), 0.0);
        assert_eq!(rabi_frequency(4, &jc), 2.0);
        let ajc = CouplingConfig::resonant(ModelKind::Ajc, 0.0);
        assert_eq!(rabi_frequency(0, &ajc), 1.0);
        let detuned = CouplingConfig::new(ModelKind::Ajc, 0.7, 0.3);
        for n in 0..50 {
            assert!(rabi_frequency(n + 1, &detuned) > rabi_frequency(n, &detuned));
        }
    }

    #[test]
    fn dressing_examples() {
        let jc = CouplingConfig::resonant(ModelKind::Jc, 0.0);
        assert_eq!(dressing_coefficients(0, &jc), (0.0, 0.0));
        for n in 1..10 {
            assert_eq!(dressing_coefficients(n, &jc), (0.0, 1.0));
        }
        let ajc = CouplingConfig::resonant(ModelKind::Ajc, 0.0);
        for n in 0..10 {
            assert_eq!(dressing_coefficients(n, &ajc), (0.0, 1.0));
        }
        let detuned = CouplingConfig::new(ModelKind::Jc, 3.0, 0.0);
        assert_eq!(dressing_coefficients(0, &detuned), (1.0, 0.0));
        let general = CouplingConfig::new(ModelKind::Ajc, -0.4, 0.9);
        for n in 0..20 {
            let (c, s) = dressing_coefficients(n, &general);
            assert!((c * c + s * s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn derived_frequencies_are_consistent() {
        let mut cfg = CouplingConfig::new(ModelKind::Ajc, 0.3, 2.0);
        cfg.lambda = 0.5;
        assert!(
            (cfg.sum_frequency() - (cfg.detuning() + 2.0 * cfg.field_frequency())).abs() < 1e-15
        );
        assert!(
            (cfg.sum_frequency() - (cfg.atomic_frequency() + cfg.field_frequency())).abs() < 1e-15
        );
    }

    #[test]
    fn jc_vacuum_is_stationary() {
        let d = dist(0.0, 0.0);
        let jc = CouplingConfig::resonant(ModelKind::Jc, 0.0001);
        for tau in [0.0, 0.3, 17.0, 99.0] {
            let st = evolve(&d, &jc, tau);
            assert!((st.g_amp[0].norm() - 1.0).abs() < 1e-15);
            assert!(st.e_amp.iter().all(|z| z.norm() == 0.0));
            assert_eq!(reduced_field_diagonal(&d, &jc, tau)[0], 1.0);
            let rho = atom_density(&d, &jc, tau);
            assert_eq!((rho.rho_gg, rho.rho_ee), (1.0, 0.0));
            assert_eq!(rho.rho_ge.norm(), 0.0);
            let b = bloch_vector(&d, &jc, tau);
            assert_eq!((b.rx, b.ry, b.rz), (0.0, 0.0, -1.0));
        }
    }

    #[test]
    fn ajc_vacuum_rabi_flops_into_one_photon() {
        let d = dist(0.0, 0.0);
        let ajc = CouplingConfig::resonant(ModelKind::Ajc, 0.0);
        for tau in [0.1, 0.77, 2.5] {
            let st = evolve(&d, &ajc, tau);
            assert!((st.e_amp[1].norm_sqr() - tau.sin().powi(2)).abs() < 1e-15);
        }
        let p = reduced_field_diagonal(&d, &ajc, FRAC_PI_2);
        assert!((p[1] - 1.0).abs() < 1e-15);
        assert!(p[0].abs() < 1e-15);
        let rho = atom_density(&d, &ajc, FRAC_PI_4);
        assert!((rho.rho_ee - 0.5).abs() < 1e-15);
    }

    #[test]
    fn initial_state_is_ground_times_field() {
        let d = dist(6.21441, 1.0);
        for kind in [ModelKind::Jc, ModelKind::Ajc] {
            let cfg = CouplingConfig::resonant(kind, 0.0001);
            let st = evolve(&d, &cfg, 0.0);
            for (n, s) in d.amplitudes().iter().enumerate() {
                assert_eq!(st.g_amp[n].re, *s);
                assert_eq!(st.g_amp[n].im, 0.0);
            }
            assert!(st.e_amp.iter().all(|z| z.norm() == 0.0));
            let p = reduced_field_diagonal(&d, &cfg, 0.0);
            assert_eq!(&p[..=d.n_max()], d.probs());
            let b = bloch_vector(&d, &cfg, 0.0);
            assert_eq!((b.rx, b.ry), (0.0, 0.0));
            assert!((b.rz + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_jc_inversion_identity() {
        let d = dist(2.0, 0.5);
        let jc = CouplingConfig::resonant(ModelKind::Jc, 0.0);
        for k in 0..200 {
            let tau = k as f64 * 0.25;
            let direct: f64 = d
                .probs()
                .iter()
                .enumerate()
                .map(|(n, p)| p * (2.0 * (n as f64).sqrt() * tau).cos())
                .sum();
            assert!((bloch_vector(&d, &jc, tau).rz + direct).abs() < 1e-9);
        }
    }

    #[test]
    fn consistency_triangle() {
        let d = dist(1.7, 0.6);
        for cfg in [
            CouplingConfig::new(ModelKind::Jc, 0.8, 0.3),
            CouplingConfig::new(ModelKind::Ajc, -0.5, 0.2),
            CouplingConfig::resonant(ModelKind::Ajc, 0.0001),
        ] {
            let cf = ClosedForm::new(&d, &cfg);
            for k in 0..60 {
                let tau = 0.37 * k as f64;
                let st = cf.evolve(tau);
                assert!((st.norm_sqr() - 1.0).abs() < 1e-11);
                let from_state = st.photon_probabilities();
                for (a, b) in from_state.iter().zip(cf.reduced_field_diagonal(tau)) {
                    assert!((a - b).abs() < 1e-10);
                }
                let rho_state = st.atom_density();
                let rho = cf.atom_density(tau);
                assert!((rho.rho_gg - rho_state.rho_gg).abs() < 1e-10);
                assert!((rho.rho_ee - rho_state.rho_ee).abs() < 1e-10);
                assert!((rho.rho_ge - rho_state.rho_ge).norm() < 1e-10);
                // explicit Bloch sums agree with rx + i ry = 2 ρ_ge
                let b = cf.bloch_vector(tau);
                let via_rho = rho.bloch_vector();
                assert!((b.rx - via_rho.rx).abs() < 1e-10, "rx at {tau}");
                assert!((b.ry - via_rho.ry).abs() < 1e-10, "ry at {tau}");
                assert!((b.rz - via_rho.rz).abs() < 1e-10, "rz at {tau}");
                assert!(b.norm() <= 1.0 + 1e-10);
                assert!(rho.determinant() >= -1e-10);
                assert!((rho.trace() - 1.0).abs() < 1e-10);
            }
        }
    }
}
