//! Model data for the degenerate geometric setup: class density `a`,
//! background density `g`, singular weight `ψ` with a σ-smoothed log pole,
//! and the derived weights `w = e^{Bψ}`.
//!
//! The degeneracy structure lives entirely in `a` and `ψ`: no line bundles,
//! Hermitian metrics, or divisors are represented. The "big" hypothesis is
//! mean(a) > 0; pointwise `a` may dip negative near the degeneracy (dip > 1),
//! which is what makes envelopes, contact sets, and free boundaries
//! nontrivial on a flat model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{periodic_distance, FieldError, Grid, ScalarField};

/// Nodes with `a < DEGENERACY_THRESHOLD_REL · max(a)` form the degeneracy mask.
pub const DEGENERACY_THRESHOLD_REL: f64 = 1e-6;

/// Lower bound every preset enforces for the background density `g`.
pub const G_MIN: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("preset violates the positive-volume hypothesis: mean(a) = {0}")]
    ZeroVolume(f64),
    #[error("background density must satisfy g >= {G_MIN}, got min {0}")]
    BackgroundNotPositive(f64),
    #[error("weight psi must be <= 0 after normalization, got max {0}")]
    PsiPositive(f64),
    #[error("kappa (log-pole coefficient) must be > 0, got {0}")]
    BadKappa(f64),
    #[error("weight exponent B must be > 0, got {0}")]
    BadWeightExponent(f64),
    #[error("gamma must lie in (0, 1/2], got {0}")]
    BadGamma(f64),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Parameters of the point-degeneracy preset.
///
/// a(x) = amp·(1−e^{−t})(1−dip·e^{−t}) with t = d(x,p)²/σ_a², so a(p) = 0
/// exactly with quadratic vanishing; dip > 1 makes `a` negative on a ring
/// around p. ψ(x) = κ·½·log(d² + σ_ψ²) − c_norm with max ψ = 0.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DegeneratePointParams {
    pub center: Vec<f64>,
    pub kappa: f64,
    pub sigma_psi: f64,
    pub amp: f64,
    pub sigma_a: f64,
    pub dip: f64,
}

impl Default for DegeneratePointParams {
    fn default() -> Self {
        DegeneratePointParams {
            center: vec![0.5, 0.5],
            kappa: 1.0,
            sigma_psi: 0.4,
            amp: 100.0,
            sigma_a: 0.24,
            dip: 3.0,
        }
    }
}

/// Parameters of the annulus-degeneracy preset: same profile as the point
/// preset but in the shifted variable t = (d(x,p) − r0)²/σ_a².
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DegenerateAnnulusParams {
    pub center: Vec<f64>,
    pub radius: f64,
    pub kappa: f64,
    pub sigma_psi: f64,
    pub amp: f64,
    pub sigma_a: f64,
    pub dip: f64,
}

impl Default for DegenerateAnnulusParams {
    fn default() -> Self {
        DegenerateAnnulusParams {
            center: vec![0.5, 0.5],
            radius: 0.25,
            kappa: 1.0,
            sigma_psi: 0.3,
            amp: 100.0,
            sigma_a: 0.12,
            dip: 3.0,
        }
    }
}

/// Named model problems. `Custom` takes the fields directly.
#[derive(Debug, Clone)]
pub enum Preset {
    /// a = g ≡ 1, ψ ≡ 0.
    Kahler,
    DegeneratePoint(DegeneratePointParams),
    DegenerateAnnulus(DegenerateAnnulusParams),
    Custom {
        a: ScalarField,
        g: ScalarField,
        psi: ScalarField,
        kappa: f64,
    },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Kahler => "kahler",
            Preset::DegeneratePoint(_) => "degenerate_point",
            Preset::DegenerateAnnulus(_) => "degenerate_annulus",
            Preset::Custom { .. } => "custom",
        }
    }

    /// Resolve a named preset with a flat parameter map (experiment configs).
    /// Unknown keys are rejected upstream by config validation; missing keys
    /// fall back to the documented defaults.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Preset, PresetError> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        match name {
            "kahler" => Ok(Preset::Kahler),
            "degenerate_point" => {
                let d = DegeneratePointParams::default();
                Ok(Preset::DegeneratePoint(DegeneratePointParams {
                    center: vec![get("px", d.center[0]), get("py", d.center[1])],
                    kappa: get("kappa", d.kappa),
                    sigma_psi: get("sigma_psi", d.sigma_psi),
                    amp: get("amp", d.amp),
                    sigma_a: get("sigma_a", d.sigma_a),
                    dip: get("dip", d.dip),
                }))
            }
            "degenerate_annulus" => {
                let d = DegenerateAnnulusParams::default();
                Ok(Preset::DegenerateAnnulus(DegenerateAnnulusParams {
                    center: vec![get("px", d.center[0]), get("py", d.center[1])],
                    radius: get("radius", d.radius),
                    kappa: get("kappa", d.kappa),
                    sigma_psi: get("sigma_psi", d.sigma_psi),
                    amp: get("amp", d.amp),
                    sigma_a: get("sigma_a", d.sigma_a),
                    dip: get("dip", d.dip),
                }))
            }
            other => Err(PresetError::UnknownPreset(other.to_string())),
        }
    }
}

/// Model-problem data on one grid. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ReferenceData {
    grid: Grid,
    a: ScalarField,
    g: ScalarField,
    psi: ScalarField,
    kappa: f64,
    degeneracy: Vec<bool>,
    preset_name: String,
}

impl ReferenceData {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn a(&self) -> &ScalarField {
        &self.a
    }
    pub fn g(&self) -> &ScalarField {
        &self.g
    }
    pub fn psi(&self) -> &ScalarField {
        &self.psi
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn preset_name(&self) -> &str {
        &self.preset_name
    }

    /// Node mask where a < 1e-6·max(a).
    pub fn degeneracy_mask(&self) -> &[bool] {
        &self.degeneracy
    }

    /// Node mask ψ ≥ level. With level = −κ/2 this is the "away from the
    /// degeneracy" mask used by the interior C^{1,1} audits.
    pub fn psi_mask(&self, level: f64) -> Vec<bool> {
        self.psi.values().iter().map(|&p| p >= level).collect()
    }

    /// The field a + ε·g.
    pub fn a_plus_eps_g(&self, epsilon: f64) -> ScalarField {
        self.a
            .zip_with(&self.g, |a, g| a + epsilon * g)
            .expect("same grid by construction")
    }
}

/// Build a reference problem from a preset. Rejects presets that violate the
/// positive-volume hypothesis (mean(a) ≤ 0) or background positivity.
pub fn make_reference(preset: &Preset, grid: &Grid) -> Result<ReferenceData, PresetError> {
    let (a, g, psi, kappa) = match preset {
        Preset::Kahler => {
            let a = ScalarField::constant(grid.clone(), 1.0)?;
            let g = ScalarField::constant(grid.clone(), 1.0)?;
            let psi = ScalarField::constant(grid.clone(), 0.0)?;
            (a, g, psi, 1.0)
        }
        Preset::DegeneratePoint(p) => {
            if p.kappa <= 0.0 {
                return Err(PresetError::BadKappa(p.kappa));
            }
            let center = p.center.clone();
            let (amp, sa, dip) = (p.amp, p.sigma_a, p.dip);
            let a = ScalarField::from_fn(grid.clone(), |x| {
                let d = periodic_distance(grid, x, &center);
                let e = (-d * d / (sa * sa)).exp();
                amp * (1.0 - e) * (1.0 - dip * e)
            })?;
            let g = ScalarField::constant(grid.clone(), 1.0)?;
            let psi = log_pole_psi(grid, &p.center, p.kappa, p.sigma_psi, 0.0)?;
            (a, g, psi, p.kappa)
        }
        Preset::DegenerateAnnulus(p) => {
            if p.kappa <= 0.0 {
                return Err(PresetError::BadKappa(p.kappa));
            }
            let center = p.center.clone();
            let (amp, sa, dip, r0) = (p.amp, p.sigma_a, p.dip, p.radius);
            let a = ScalarField::from_fn(grid.clone(), |x| {
                let d = periodic_distance(grid, x, &center) - r0;
                let e = (-d * d / (sa * sa)).exp();
                amp * (1.0 - e) * (1.0 - dip * e)
            })?;
            let g = ScalarField::constant(grid.clone(), 1.0)?;
            let psi = log_pole_psi(grid, &p.center, p.kappa, p.sigma_psi, p.radius)?;
            (a, g, psi, p.kappa)
        }
        Preset::Custom { a, g, psi, kappa } => {
            if *kappa <= 0.0 {
                return Err(PresetError::BadKappa(*kappa));
            }
            // Normalize so max psi = 0.
            let m = psi.max();
            let psi = psi.map(|v| v - m)?;
            (a.clone(), g.clone(), psi, *kappa)
        }
    };

    let mean_a = a.mean();
    if mean_a <= 0.0 {
        return Err(PresetError::ZeroVolume(mean_a));
    }
    if g.min() < G_MIN {
        return Err(PresetError::BackgroundNotPositive(g.min()));
    }
    if psi.max() > 1e-12 {
        return Err(PresetError::PsiPositive(psi.max()));
    }

    let threshold = DEGENERACY_THRESHOLD_REL * a.max();
    let degeneracy = a.values().iter().map(|&v| v < threshold).collect();

    Ok(ReferenceData {
        grid: grid.clone(),
        a,
        g,
        psi,
        kappa,
        degeneracy,
        preset_name: preset.name().to_string(),
    })
}

/// ψ(x) = κ·½·log((d − r0)² + σ²) − c_norm with c_norm fixing max ψ = 0.
fn log_pole_psi(
    grid: &Grid,
    center: &[f64],
    kappa: f64,
    sigma: f64,
    r0: f64,
) -> Result<ScalarField, FieldError> {
    let raw = ScalarField::from_fn(grid.clone(), |x| {
        let d = periodic_distance(grid, x, center) - r0;
        kappa * 0.5 * (d * d + sigma * sigma).ln()
    })?;
    let c_norm = raw.max();
    raw.map(|v| v - c_norm)
}

/// The weight w = e^{B·ψ}; since ψ ≤ 0, always 0 < w ≤ 1.
#[derive(Debug, Clone)]
pub struct WeightField {
    b: f64,
    w: ScalarField,
}

impl WeightField {
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn w(&self) -> &ScalarField {
        &self.w
    }
}

pub fn weight(r: &ReferenceData, b: f64) -> Result<WeightField, PresetError> {
    if b <= 0.0 {
        return Err(PresetError::BadWeightExponent(b));
    }
    let w = r.psi().map(|p| (b * p).exp())?;
    Ok(WeightField { b, w })
}

/// The γ-continuation family: a_γ = (1−γ)·a + γ·a_K with the strictly
/// positive Kähler model density a_K = g, and rhs_γ = γ^n·g.
#[derive(Debug, Clone)]
pub struct GammaFamily {
    pub gamma: f64,
    pub a_gamma: ScalarField,
    pub rhs_gamma: ScalarField,
}

pub fn gamma_family(r: &ReferenceData, gamma: f64) -> Result<GammaFamily, PresetError> {
    if !(gamma > 0.0 && gamma <= 0.5) {
        return Err(PresetError::BadGamma(gamma));
    }
    let a_gamma = r.a().zip_with(r.g(), |a, g| (1.0 - gamma) * a + gamma * g)?;
    let n = r.grid().dims() as i32;
    let rhs_gamma = r.g().map(|g| gamma.powi(n) * g)?;
    Ok(GammaFamily { gamma, a_gamma, rhs_gamma })
}
