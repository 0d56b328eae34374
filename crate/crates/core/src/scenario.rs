//! Scenario documents, compiled-in figure presets and the output writer.
//!
//! A scenario is a JSON object:
//!
//! ```json
//! { "model": "JC", "r": 1.0, "intensity": 40.0,
//!   "beta": 0.0, "xi": 0.0001, "tau_min": 0.0, "tau_max": 100.0, "steps": 5001,
//!   "eps_trunc": 1e-12, "outputs": ["mandel", "inversion"], "oracle_check": false }
//! ```
//!
//! Only `model`, `r` and exactly one of `intensity` / `alpha` are required.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{CouplingConfig, ModelKind};
use crate::error::{Error, Result};
use crate::observables::{revival_time, time_grid, Observable, TimeSeries, Trajectory};
use crate::oracle::{compare, format_reports, ComparisonReport, OracleRun};
use crate::squeezed::{
    coherent_amplitude_for_intensity, photon_number_distribution, PhotonDistribution, SqueezeSpec,
    DEFAULT_EPS_TRUNC,
};

/// Environment variable overriding the default truncation tolerance.
pub const EPS_TRUNC_ENV: &str = "QRABI_EPS_TRUNC";

pub const DEFAULT_XI: f64 = 0.0001;
pub const DEFAULT_TAU_MAX: f64 = 100.0;
pub const DEFAULT_STEPS: usize = 5001;

/// Oracle tolerance for fields of intensity at most [`SMALL_FIELD_INTENSITY`].
pub const ORACLE_TOL_SMALL: f64 = 1e-8;
pub const ORACLE_TOL_LARGE: f64 = 1e-6;
pub const SMALL_FIELD_INTENSITY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelSelection {
    #[serde(rename = "JC")]
    Jc,
    #[serde(rename = "AJC")]
    Ajc,
    #[serde(rename = "BOTH")]
    Both,
}

impl ModelSelection {
    pub fn kinds(&self) -> &'static [ModelKind] {
        match self {
            ModelSelection::Jc => &[ModelKind::Jc],
            ModelSelection::Ajc => &[ModelKind::Ajc],
            ModelSelection::Both => &[ModelKind::Jc, ModelKind::Ajc],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Mandel,
    Inversion,
    Entropy,
    Bloch,
    PhotonDistribution,
}

impl OutputKind {
    fn observables(&self) -> &'static [Observable] {
        match self {
            OutputKind::Mandel => &[Observable::Mandel],
            OutputKind::Inversion => &[Observable::Inversion],
            OutputKind::Entropy => &[Observable::Entropy],
            OutputKind::Bloch => &[Observable::BlochX, Observable::BlochY, Observable::BlochZ],
            OutputKind::PhotonDistribution => &[],
        }
    }
}

/// How the coherent amplitude was specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldAmplitude {
    Intensity(f64),
    Alpha(f64),
}

/// A validated simulation request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: Option<String>,
    pub model: ModelSelection,
    pub beta: f64,
    pub xi: f64,
    pub r: f64,
    pub field: FieldAmplitude,
    pub theta: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub steps: usize,
    pub eps_trunc: f64,
    pub outputs: BTreeSet<OutputKind>,
    pub oracle_check: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: Option<String>,
    model: ModelSelection,
    r: f64,
    intensity: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    xi: Option<f64>,
    theta: Option<f64>,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
    steps: Option<usize>,
    eps_trunc: Option<f64>,
    outputs: Option<Vec<OutputKind>>,
    oracle_check: Option<bool>,
}

/// `QRABI_EPS_TRUNC` if set, else [`DEFAULT_EPS_TRUNC`].
pub fn default_eps_trunc() -> Result<f64> {
    match std::env::var(EPS_TRUNC_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("{EPS_TRUNC_ENV}={v:?} is not a number: {e}"))),
        Err(_) => Ok(DEFAULT_EPS_TRUNC),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid scenario: {e}")))?;
    let field = match (doc.intensity, doc.alpha) {
        (Some(i), None) => FieldAmplitude::Intensity(i),
        (None, Some(a)) => FieldAmplitude::Alpha(a),
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "schema error: give exactly one of 'intensity' and 'alpha', not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(
                "schema error: one of 'intensity' or 'alpha' is required".into(),
            ))
        }
    };
    let eps_trunc = match doc.eps_trunc {
        Some(e) => e,
        None => default_eps_trunc()?,
    };
    let scenario = Scenario {
        name: doc.name,
        model: doc.model,
        beta: doc.beta.unwrap_or(0.0),
        xi: doc.xi.unwrap_or(DEFAULT_XI),
        r: doc.r,
        field,
        theta: doc.theta.unwrap_or(0.0),
        tau_min: doc.tau_min.unwrap_or(0.0),
        tau_max: doc.tau_max.unwrap_or(DEFAULT_TAU_MAX),
        steps: doc.steps.unwrap_or(DEFAULT_STEPS),
        eps_trunc,
        outputs: doc
            .outputs
            .map(|o| o.into_iter().collect())
            .unwrap_or_else(|| {
                [
                    OutputKind::Mandel,
                    OutputKind::Inversion,
                    OutputKind::Entropy,
                ]
                .into()
            }),
        oracle_check: doc.oracle_check.unwrap_or(false),
    };
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.theta != 0.0 {
            return Err(Error::Config(format!(
                "squeeze phase unsupported: theta = {} (must be 0)",
                self.theta
            )));
        }
        if !self.beta.is_finite() {
            return Err(Error::Config(format!(
                "beta must be finite, got {}",
                self.beta
            )));
        }
        if !(self.xi >= 0.0) || !self.xi.is_finite() {
            return Err(Error::Config(format!(
                "xi must be finite and >= 0, got {}",
                self.xi
            )));
        }
        if !(self.r >= 0.0) || !self.r.is_finite() {
            return Err(Error::Config(format!(
                "r must be finite and >= 0, got {}",
                self.r
            )));
        }
        if !(self.eps_trunc > 0.0 && self.eps_trunc <= 1e-6) {
            return Err(Error::Config(format!(
                "eps_trunc must lie in (0, 1e-6], got {}",
                self.eps_trunc
            )));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("outputs must not be empty".into()));
        }
        time_grid(self.tau_min, self.tau_max, self.steps)?;
        self.squeeze_spec()?;
        Ok(())
    }

    pub fn alpha(&self) -> Result<f64> {
        match self.field {
            FieldAmplitude::Intensity(i) => coherent_amplitude_for_intensity(i, self.r),
            FieldAmplitude::Alpha(a) => Ok(a),
        }
    }

    pub fn squeeze_spec(&self) -> Result<SqueezeSpec> {
        SqueezeSpec::with_phase(self.alpha()?, self.r, self.theta)
    }

    pub fn intensity(&self) -> Result<f64> {
        Ok(self.squeeze_spec()?.intensity())
    }

    pub fn coupling(&self, kind: ModelKind) -> CouplingConfig {
        CouplingConfig::new(kind, self.beta, self.xi)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        time_grid(self.tau_min, self.tau_max, self.steps)
    }

    pub fn oracle_tolerance(&self) -> Result<f64> {
        Ok(if self.intensity()? <= SMALL_FIELD_INTENSITY {
            ORACLE_TOL_SMALL
        } else {
            ORACLE_TOL_LARGE
        })
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::Map::new();
        if let Some(n) = &self.name {
            v.insert("name".into(), n.clone().into());
        }
        v.insert(
            "model".into(),
            serde_json::to_value(self.model).expect("serializable"),
        );
        v.insert("r".into(), self.r.into());
        match self.field {
            FieldAmplitude::Intensity(i) => v.insert("intensity".into(), i.into()),
            FieldAmplitude::Alpha(a) => v.insert("alpha".into(), a.into()),
        };
        v.insert("beta".into(), self.beta.into());
        v.insert("xi".into(), self.xi.into());
        v.insert("theta".into(), self.theta.into());
        v.insert("tau_min".into(), self.tau_min.into());
        v.insert("tau_max".into(), self.tau_max.into());
        v.insert("steps".into(), self.steps.into());
        v.insert("eps_trunc".into(), self.eps_trunc.into());
        v.insert(
            "outputs".into(),
            serde_json::to_value(&self.outputs).expect("serializable"),
        );
        v.insert("oracle_check".into(), self.oracle_check.into());
        serde_json::to_string_pretty(&serde_json::Value::Object(v)).expect("serializable")
    }
}

// ---------------------------------------------------------------------------
// presets

/// Total initial photon number used by every figure.
pub const FIGURE_INTENSITY: f64 = 40.0;

struct PresetRow {
    figure: u8,
    r: f64,
    output: OutputKind,
    /// Zoom window half-width around `τ_R / 2`, if any.
    zoom: Option<f64>,
    what: &'static str,
}

const PRESET_TABLE: [PresetRow; 10] = [
    PresetRow {
        figure: 1,
        r: 1.0,
        output: OutputKind::Mandel,
        zoom: None,
        what: "Mandel Q(tau)",
    },
    PresetRow {
        figure: 2,
        r: 1.3,
        output: OutputKind::Mandel,
        zoom: None,
        what: "Mandel Q(tau)",
    },
    PresetRow {
        figure: 3,
        r: 1.4,
        output: OutputKind::Mandel,
        zoom: None,
        what: "Mandel Q(tau)",
    },
    PresetRow {
        figure: 4,
        r: 1.5,
        output: OutputKind::Mandel,
        zoom: None,
        what: "Mandel Q(tau)",
    },
    PresetRow {
        figure: 5,
        r: 1.0,
        output: OutputKind::Inversion,
        zoom: None,
        what: "inversion W(tau)",
    },
    PresetRow {
        figure: 6,
        r: 1.5,
        output: OutputKind::Inversion,
        zoom: None,
        what: "inversion W(tau)",
    },
    PresetRow {
        figure: 7,
        r: 1.5,
        output: OutputKind::Inversion,
        zoom: Some(10.0),
        what: "ringing revivals, W(tau) near tau_R/2",
    },
    PresetRow {
        figure: 8,
        r: f64::NAN,
        output: OutputKind::PhotonDistribution,
        zoom: None,
        what: "photon-number distribution P_n",
    },
    PresetRow {
        figure: 9,
        r: 1.0,
        output: OutputKind::Entropy,
        zoom: None,
        what: "atomic entropy S_a(tau)",
    },
    PresetRow {
        figure: 10,
        r: 1.5,
        output: OutputKind::Entropy,
        zoom: None,
        what: "atomic entropy S_a(tau)",
    },
];

/// Names of all compiled-in presets, `fig1a` through `fig10b`.
pub fn preset_names() -> Vec<String> {
    PRESET_TABLE
        .iter()
        .flat_map(|row| ["a", "b"].map(|p| format!("fig{}{p}", row.figure)))
        .collect()
}

/// One-line description of a preset.
pub fn describe_preset(name: &str) -> Result<String> {
    let s = preset(name)?;
    let (row, _) = preset_row(name).expect("validated by preset()");
    let model = match s.model {
        ModelSelection::Jc => "JC",
        ModelSelection::Ajc => "AJC",
        ModelSelection::Both => "JC+AJC",
    };
    Ok(format!(
        "{name:<7} {model:<6} r={:<4} tau=[{:.2}, {:.2}]  {}",
        s.r, s.tau_min, s.tau_max, row.what
    ))
}

fn preset_row(name: &str) -> Option<(&'static PresetRow, bool)> {
    let rest = name.strip_prefix("fig")?;
    let (num, panel) = rest.split_at(rest.len().checked_sub(1)?);
    let is_b = match panel {
        "a" => false,
        "b" => true,
        _ => return None,
    };
    let figure: u8 = num.parse().ok()?;
    PRESET_TABLE
        .iter()
        .find(|row| row.figure == figure)
        .map(|row| (row, is_b))
}

/// Parameter set of a figure panel: "a" panels are JC, "b" panels AJC.
///
/// The photon-distribution figure is shared by both models, so its panels
/// select the squeeze parameter instead (a: r = 1, b: r = 1.5).
pub fn preset(name: &str) -> Result<Scenario> {
    let Some((row, is_b)) = preset_row(name) else {
        return Err(Error::Usage(format!(
            "unknown preset '{name}'; valid presets: {}",
            preset_names().join(", ")
        )));
    };
    let (model, r) = if row.output == OutputKind::PhotonDistribution {
        (ModelSelection::Both, if is_b { 1.5 } else { 1.0 })
    } else {
        (
            if is_b {
                ModelSelection::Ajc
            } else {
                ModelSelection::Jc
            },
            row.r,
        )
    };
    let (tau_min, tau_max, steps) = match row.zoom {
        Some(half) => {
            let centre = 0.5 * revival_time(FIGURE_INTENSITY);
            (centre - half, centre + half, 1001)
        }
        None => (0.0, DEFAULT_TAU_MAX, DEFAULT_STEPS),
    };
    let scenario = Scenario {
        name: Some(name.to_string()),
        model,
        beta: 0.0,
        xi: DEFAULT_XI,
        r,
        field: FieldAmplitude::Intensity(FIGURE_INTENSITY),
        theta: 0.0,
        tau_min,
        tau_max,
        steps,
        eps_trunc: default_eps_trunc()?,
        outputs: [row.output].into(),
        oracle_check: false,
    };
    scenario.validate()?;
    Ok(scenario)
}

// ---------------------------------------------------------------------------
// output

/// What a run wrote, serialized as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub scenario: serde_json::Value,
    pub alpha: f64,
    pub intensity: f64,
    pub n_max: usize,
    pub tail_mass: f64,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub tolerance: f64,
    pub n_cut: usize,
    pub passed: bool,
    pub reports: Vec<ComparisonReport>,
}

/// Formats with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("tau,value\n");
    for (t, v) in series.iter() {
        let _ = writeln!(out, "{},{}", fmt12(t), fmt12(v));
    }
    out
}

fn distribution_csv(dist: &PhotonDistribution) -> String {
    let mut out = String::from("n,P_n\n");
    for (n, p) in dist.probs().iter().enumerate() {
        let _ = writeln!(out, "{n},{}", fmt12(*p));
    }
    out
}

fn axis_label(obs: Observable) -> (&'static str, Option<(f64, f64)>) {
    match obs {
        Observable::Mandel => ("Q({/Symbol t})", None),
        Observable::Inversion => ("W({/Symbol t})", Some((-1.0, 1.0))),
        Observable::Entropy => ("S_a({/Symbol t})", Some((0.0, 1.0))),
        Observable::BlochX => ("r_x({/Symbol t})", Some((-1.0, 1.0))),
        Observable::BlochY => ("r_y({/Symbol t})", Some((-1.0, 1.0))),
        Observable::BlochZ => ("r_z({/Symbol t})", Some((-1.0, 1.0))),
    }
}

fn plot_header(stem: &str, title: &str) -> String {
    format!(
        "# gnuplot script; run with: gnuplot {stem}.gp\n\
         set terminal pngcairo enhanced size 900,540\n\
         set output '{stem}.png'\n\
         set datafile separator ','\n\
         set key off\n\
         set grid\n\
         set title \"{title}\"\n"
    )
}

fn series_plot(stem: &str, title: &str, obs: Observable, tau_min: f64, tau_max: f64) -> String {
    let (ylabel, yrange) = axis_label(obs);
    let mut out = plot_header(stem, title);
    let _ = writeln!(out, "set xlabel '{{/Symbol t}}'");
    let _ = writeln!(out, "set ylabel '{ylabel}'");
    let _ = writeln!(out, "set xrange [{tau_min}:{tau_max}]");
    if let Some((lo, hi)) = yrange {
        let _ = writeln!(out, "set yrange [{lo}:{hi}]");
    }
    let _ = writeln!(out, "plot '{stem}.csv' every ::1 using 1:2 with lines lw 1");
    out
}

fn distribution_plot(stem: &str, title: &str, n_max: usize) -> String {
    let mut out = plot_header(stem, title);
    let _ = writeln!(out, "set xlabel 'n'");
    let _ = writeln!(out, "set ylabel 'P(n)'");
    let _ = writeln!(out, "set xrange [0:{n_max}]");
    let _ = writeln!(
        out,
        "plot '{stem}.csv' every ::1 using 1:2 with impulses lw 2"
    );
    out
}

fn plot_title(s: &Scenario, kind: Option<ModelKind>, what: &str) -> String {
    let alpha = match (kind, s.field) {
        (Some(ModelKind::Ajc), _) => "|{/Symbol a}bar|^2",
        _ => "|{/Symbol a}|^2",
    };
    let intensity = match s.field {
        FieldAmplitude::Intensity(i) => format!("{alpha}+sinh^2(r)={i}"),
        FieldAmplitude::Alpha(a) => format!("{{/Symbol a}}={a}"),
    };
    let prefix = kind.map(|k| format!("{k}: ")).unwrap_or_default();
    format!(
        "{prefix}{what}, {{/Symbol b}}={}, r={}, {{/Symbol x}}={}, {intensity}",
        s.beta, s.r, s.xi
    )
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    /// `false` only when an oracle check ran and failed.
    pub fn oracle_passed(&self) -> bool {
        self.manifest.oracle.as_ref().is_none_or(|o| o.passed)
    }
}

/// Runs a scenario and writes CSVs, plot scripts and `manifest.json` to `out_dir`.
///
/// `force_oracle` adds the oracle comparison even when the scenario does
/// not request it.
pub fn run(scenario: &Scenario, out_dir: &Path, force_oracle: bool) -> Result<RunOutcome> {
    scenario.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let spec = scenario.squeeze_spec()?;
    let dist = photon_number_distribution(&spec, scenario.eps_trunc)?;
    let grid = scenario.grid()?;
    let mut w = Writer {
        dir: out_dir,
        files: Vec::new(),
    };

    if scenario.outputs.contains(&OutputKind::PhotonDistribution) {
        let stem = "photon_distribution";
        w.write(&format!("{stem}.csv"), &distribution_csv(&dist))?;
        let title = plot_title(scenario, None, "P(n)");
        w.write(
            &format!("{stem}.gp"),
            &distribution_plot(stem, &title, dist.n_max()),
        )?;
    }

    let observables: Vec<Observable> = scenario
        .outputs
        .iter()
        .flat_map(|o| o.observables().iter().copied())
        .collect();
    let check_oracle = scenario.oracle_check || force_oracle;
    let mut reports = Vec::new();
    let mut n_cut = 0;

    for &kind in scenario.model.kinds() {
        let cfg = scenario.coupling(kind);
        let needs_series = !observables.is_empty() || check_oracle;
        if !needs_series {
            continue;
        }
        let traj = Trajectory::closed_form(&dist, &cfg, &grid);
        for &obs in &observables {
            let series = traj.series(obs)?;
            let stem = series.label().to_string();
            w.write(&format!("{stem}.csv"), &series_csv(&series))?;
            let title = plot_title(scenario, Some(kind), axis_label(obs).0);
            w.write(
                &format!("{stem}.gp"),
                &series_plot(&stem, &title, obs, scenario.tau_min, scenario.tau_max),
            )?;
        }
        if check_oracle {
            let oracle = OracleRun::new(&dist, &cfg)?;
            n_cut = oracle.hamiltonian.n_cut;
            w.write(
                &format!("{}_hamiltonian.csv", kind.label().to_lowercase()),
                &oracle.hamiltonian.to_csv(),
            )?;
            let reference = oracle.trajectory(&grid);
            let compared = [
                Observable::Mandel,
                Observable::Inversion,
                Observable::Entropy,
                Observable::BlochX,
                Observable::BlochY,
            ];
            for obs in compared {
                // Q is undefined for the JC vacuum in both routes alike
                if obs == Observable::Mandel
                    && traj.series(obs).is_err()
                    && reference.series(obs).is_err()
                {
                    continue;
                }
                reports.push(compare(&traj.series(obs)?, &reference.series(obs)?)?);
            }
        }
    }

    let oracle = if check_oracle {
        let tolerance = scenario.oracle_tolerance()?;
        let passed = reports.iter().all(|r| r.passes(tolerance));
        w.write("oracle_report.txt", &format_reports(&reports, tolerance))?;
        Some(OracleSummary {
            tolerance,
            n_cut,
            passed,
            reports,
        })
    } else {
        None
    };

    let manifest = Manifest {
        scenario: serde_json::from_str(&scenario.to_json()).expect("valid json"),
        alpha: spec.alpha(),
        intensity: spec.intensity(),
        n_max: dist.n_max(),
        tail_mass: dist.tail_mass(),
        files: w.files.clone(),
        oracle,
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(RunOutcome {
        manifest,
        out_dir: out_dir.to_path_buf(),
    })
}
