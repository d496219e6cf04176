//! JSON run configuration.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use spincm::elliptic::Lattice;
use spincm::phase::{parse_root_label, LabeledPhasePoint, PhasePoint};
use spincm::rmatrix::RMatrixSpec;
use spincm::{build_root_system, dynamics, RootSystem, C64};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// A complex number written as `"re+imj"`, a bare number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx(pub C64);

pub fn format_complex(z: C64) -> String {
    format!("{}{:+}j", z.re, z.im)
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim();
    C64::from_str(t).map_err(|_| format!("cannot parse {t:?} as a complex number"))
}

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_complex(self.0))
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Real(f64),
            Pair([f64; 2]),
            Text(String),
        }
        Ok(Cx(match Repr::deserialize(d)? {
            Repr::Real(x) => C64::new(x, 0.0),
            Repr::Pair([re, im]) => C64::new(re, im),
            Repr::Text(s) => parse_complex(&s).map_err(serde::de::Error::custom)?,
        }))
    }
}

fn unwrap_all(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|c| c.0).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rational,
    Trigonometric,
    Elliptic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSystemConfig {
    #[serde(default = "default_type")]
    pub family: String,
    pub rank: usize,
}

fn default_type() -> String {
    "A".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    #[default]
    Standard,
    Opposite,
}

/// Family-specific data. Omitted entries take the defaults: Δ′ = Δ,
/// Π′ = Π with the standard polarization, half-periods (1, 1.1i).
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamic_roots: Option<Vec<Vec<i32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple_roots: Option<Vec<Vec<i32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<Polarization>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_periods: Option<[Cx; 2]>,
}

/// Initial condition. `q` are Cartan coordinates in the orthonormal basis;
/// `positions` are the diagonal entries of ρ(q) instead (shifted to trace zero).
/// The spin is either a `preset` ("zero" or "spinless(m)") or an explicit
/// labelled map such as `{"xi_h1": 0, "xi[1,0]": "0.3j"}`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<BTreeMap<String, Cx>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    #[serde(default = "default_t")]
    pub t_end: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_t() -> f64 {
    10.0
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig { t_end: default_t(), tol: default_tol() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_trajectory")]
    pub trajectory: String,
    #[serde(default = "default_diagnostics")]
    pub diagnostics: String,
    #[serde(default = "default_reduced")]
    pub reduced: String,
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default = "default_zs")]
    pub z_samples: Vec<Cx>,
    /// Highest power in the spectral invariants; defaults to N + 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
}

fn default_trajectory() -> String {
    "trajectory.csv".into()
}

fn default_diagnostics() -> String {
    "diagnostics.json".into()
}

fn default_reduced() -> String {
    "reduced.csv".into()
}

fn default_report() -> String {
    "report.json".into()
}

fn default_zs() -> Vec<Cx> {
    [(0.4, 0.3), (-0.3, 0.5), (0.6, -0.2), (0.2, -0.45), (-0.5, -0.1), (0.35, 0.05), (-0.15, 0.3), (0.5, 0.4)]
        .iter()
        .map(|&(a, b)| Cx(C64::new(a, b)))
        .collect()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            trajectory: default_trajectory(),
            diagnostics: default_diagnostics(),
            reduced: default_reduced(),
            report: default_report(),
            z_samples: default_zs(),
            kmax: None,
        }
    }
}

/// Residual thresholds; unset entries use the family defaults of [`Thresholds::resolve`].
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axioms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cdybe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mdybe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_lax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedThresholds {
    pub axioms: f64,
    pub cdybe: f64,
    pub mdybe: f64,
    pub lax: f64,
    pub reduced_lax: f64,
    pub involution: f64,
    pub spectral: f64,
}

impl Thresholds {
    pub fn resolve(&self, family: Family, scale: f64) -> ResolvedThresholds {
        let ell = family == Family::Elliptic;
        let pick = |v: Option<f64>, rt: f64, e: f64| v.unwrap_or(if ell { e } else { rt }) * scale;
        ResolvedThresholds {
            axioms: pick(self.axioms, 1e-10, 1e-8),
            cdybe: pick(self.cdybe, 1e-10, 1e-8),
            mdybe: pick(self.mdybe, 1e-8, 1e-8),
            lax: pick(self.lax, 1e-6, 1e-6),
            reduced_lax: pick(self.reduced_lax, 1e-5, 1e-5),
            involution: pick(self.involution, 1e-8, 1e-6),
            spectral: pick(self.spectral, 1e-6, 1e-6),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn default_samples() -> usize {
    20
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { samples: default_samples(), thresholds: Thresholds::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    pub root_system: RootSystemConfig,
    #[serde(default)]
    pub case: CaseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    /// Size of the injected CDYBE-breaking term; 0 for the genuine r-matrix.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub fault: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// A validated configuration.
pub struct Setup {
    pub config: RunConfig,
    pub rs: RootSystem,
    pub spec: RMatrixSpec,
    pub zs: Vec<C64>,
    pub kmax: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(self) -> Result<Setup, CliError> {
        let cfg = |m: String| CliError::Config(m);
        let ty = match self.root_system.family.as_str() {
            s if s.len() == 1 => s.chars().next().unwrap(),
            s => return Err(cfg(format!("root_system.family: expected one letter, got {s:?}"))),
        };
        let rs = build_root_system(ty, self.root_system.rank).map_err(|e| cfg(format!("root_system: {e}")))?;
        let spec = self.build_spec(&rs)?;
        let spec = if self.fault != 0.0 { spec.with_fault(self.fault) } else { spec };
        if self.integration.tol.is_nan() || self.integration.tol <= 0.0 {
            return Err(cfg("integration.tol must be positive".into()));
        }
        if !self.integration.t_end.is_finite() {
            return Err(cfg("integration.t_end must be finite".into()));
        }
        let zs = unwrap_all(&self.outputs.z_samples);
        if zs.is_empty() {
            return Err(cfg("outputs.z_samples is empty".into()));
        }
        for z in &zs {
            if spec.psi(*z).is_err() {
                return Err(cfg(format!("outputs.z_samples: {} is a pole of the r-matrix", format_complex(*z))));
            }
        }
        let kmax = self.outputs.kmax.unwrap_or(rs.rank() + 1);
        if kmax == 0 || kmax > rs.matrix_size() {
            return Err(cfg(format!("outputs.kmax must lie in 1..={}", rs.matrix_size())));
        }
        if let Some(init) = &self.initial {
            initial_point(&rs, init)?;
        }
        Ok(Setup { config: self, rs, spec, zs, kmax })
    }

    fn build_spec(&self, rs: &RootSystem) -> Result<RMatrixSpec, CliError> {
        let cfg = |m: String| CliError::Config(m);
        let c = &self.case;
        let stray = |field: &str, present: bool| {
            if present {
                Err(cfg(format!("case.{field} does not apply to the {:?} family", self.family)))
            } else {
                Ok(())
            }
        };
        let root = |field: &str, label: &[i32]| {
            rs.root_index(label).ok_or_else(|| cfg(format!("case.{field}: {label:?} is not a root of {}{}", rs.family(), rs.rank())))
        };
        match self.family {
            Family::Rational => {
                stray("simple_roots", c.simple_roots.is_some())?;
                stray("polarization", c.polarization.is_some())?;
                stray("half_periods", c.half_periods.is_some())?;
                match &c.dynamic_roots {
                    None => Ok(RMatrixSpec::rational_full(rs)),
                    Some(labels) => {
                        let ks = labels.iter().map(|l| root("dynamic_roots", l)).collect::<Result<Vec<_>, _>>()?;
                        RMatrixSpec::rational(rs, &ks).map_err(|e| cfg(format!("case.dynamic_roots: {e}")))
                    }
                }
            }
            Family::Trigonometric => {
                stray("dynamic_roots", c.dynamic_roots.is_some())?;
                stray("half_periods", c.half_periods.is_some())?;
                let simple: Vec<usize> = match &c.simple_roots {
                    None => (0..rs.rank()).collect(),
                    Some(labels) => labels
                        .iter()
                        .map(|l| {
                            let k = root("simple_roots", l)?;
                            rs.simple_roots()
                                .iter()
                                .position(|&s| s == k)
                                .ok_or_else(|| cfg(format!("case.simple_roots: {l:?} is not a simple root")))
                        })
                        .collect::<Result<_, _>>()?,
                };
                let spec = RMatrixSpec::trigonometric(rs, &simple).map_err(|e| cfg(format!("case.simple_roots: {e}")))?;
                Ok(match c.polarization.unwrap_or_default() {
                    Polarization::Standard => spec,
                    Polarization::Opposite => spec.with_opposite_polarization(),
                })
            }
            Family::Elliptic => {
                stray("dynamic_roots", c.dynamic_roots.is_some())?;
                stray("simple_roots", c.simple_roots.is_some())?;
                stray("polarization", c.polarization.is_some())?;
                let [w1, w2] = c.half_periods.unwrap_or([Cx(C64::new(1.0, 0.0)), Cx(C64::new(0.0, 1.1))]);
                let lat = Lattice::new(w1.0, w2.0).map_err(|e| cfg(format!("case.half_periods: {e}")))?;
                Ok(RMatrixSpec::elliptic(rs, lat))
            }
        }
    }
}

/// Parses "spinless(m)" and "zero".
fn parse_preset(rs: &RootSystem, s: &str) -> Result<spincm::AlgElement, CliError> {
    let t = s.trim();
    if t == "zero" {
        return Ok(rs.zero());
    }
    let arg = t
        .strip_prefix("spinless(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| CliError::Config(format!("initial.preset: unknown preset {t:?}")))?;
    let m = parse_complex(arg).map_err(|e| CliError::Config(format!("initial.preset: {e}")))?;
    Ok(dynamics::spinless_xi(rs, m))
}

pub fn initial_point(rs: &RootSystem, init: &InitialConfig) -> Result<PhasePoint, CliError> {
    let cfg = |m: String| CliError::Config(m);
    let n = rs.rank();
    let q = match (&init.q, &init.positions) {
        (Some(q), None) => unwrap_all(q),
        (None, Some(pos)) => {
            if pos.len() != rs.matrix_size() {
                return Err(cfg(format!("initial.positions: expected {} entries", rs.matrix_size())));
            }
            rs.cartan_from_diagonal(&unwrap_all(pos))
        }
        _ => return Err(cfg("initial: give exactly one of q and positions".into())),
    };
    let p = init.p.as_deref().map(unwrap_all).unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
    let xi = match (&init.preset, &init.xi) {
        (Some(s), None) => parse_preset(rs, s)?,
        (None, Some(map)) => {
            let l = LabeledPhasePoint { q: q.clone(), p: p.clone(), xi: map.iter().map(|(k, v)| (k.clone(), v.0)).collect() };
            PhasePoint::from_labeled(rs, &l).map_err(|e| cfg(format!("initial.xi: {e}")))?.xi
        }
        (None, None) => rs.zero(),
        _ => return Err(cfg("initial: give at most one of preset and xi".into())),
    };
    PhasePoint::new(rs, q, p, xi).map_err(|e| cfg(format!("initial: {e}")))
}

/// Parses a root label such as "[1,0]" (used by CSV headers).
pub fn label_to_root(rs: &RootSystem, s: &str) -> Option<usize> {
    parse_root_label(s).and_then(|m| rs.root_index(&m))
}
