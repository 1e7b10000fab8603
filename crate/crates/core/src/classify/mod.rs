//! Orbit sampling, dimension and Lyapunov estimates, and the decision tree
//! for hyperbolic attractors in 3-manifolds.

mod boxdim;
mod lyapunov;
mod mapspec;
mod orbit;

pub use boxdim::{box_count, box_counting_dimension, BoxDimension, BoxOptions};
pub use lyapunov::{lyapunov_spectrum, LyapunovSpectrum};
pub use mapspec::{MapSpec, State, AMBIENT_BOUND, BUILTINS};
pub use orbit::{generate_orbit, OrbitCloud};

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version of the [`AttractorReport`] JSON layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttractorClass {
    #[serde(rename = "attracting-fixed-point")]
    AttractingFixedPoint,
    #[serde(rename = "generalized-1-solenoid")]
    Generalized1Solenoid,
    #[serde(rename = "torus-T2-automorphism")]
    TorusT2Automorphism,
    #[serde(rename = "codim1-expanding")]
    Codim1Expanding,
    #[serde(rename = "anosov-T3")]
    AnosovT3,
}

impl AttractorClass {
    pub fn label(self) -> &'static str {
        match self {
            AttractorClass::AttractingFixedPoint => "attracting-fixed-point",
            AttractorClass::Generalized1Solenoid => "generalized-1-solenoid",
            AttractorClass::TorusT2Automorphism => "torus-T2-automorphism",
            AttractorClass::Codim1Expanding => "codim1-expanding",
            AttractorClass::AnosovT3 => "anosov-T3",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            AttractorClass::AttractingFixedPoint => "an attracting fixed point",
            AttractorClass::Generalized1Solenoid => "conjugate to the shift map on a generalized 1-solenoid",
            AttractorClass::TorusT2Automorphism => "homeomorphic to T^2, conjugate to a hyperbolic toral automorphism",
            AttractorClass::Codim1Expanding => "a codimension-1 expanding attractor",
            AttractorClass::AnosovT3 => "the whole manifold, T^3 with an Anosov automorphism",
        }
    }
}

impl fmt::Display for AttractorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Decision tree for a hyperbolic attractor `Λ` of a diffeomorphism of a
/// 3-manifold, from its topological dimension and unstable dimension.
pub fn classify(dim_lambda: usize, dim_eu: usize) -> Result<AttractorClass> {
    let invalid = |reason| {
        Err(Error::InvalidCombination {
            dim_lambda,
            dim_eu,
            reason,
        })
    };
    if dim_lambda > 3 {
        return invalid("an attractor in a 3-manifold has dimension at most 3");
    }
    if dim_eu > dim_lambda {
        return invalid("unstable manifolds lie in the attractor, so dim E^u <= dim Λ");
    }
    if dim_eu == 0 && dim_lambda >= 1 {
        return invalid("with dim E^u = 0 every point is periodic and isolated, so dim Λ = 0");
    }
    if dim_eu >= 3 {
        return invalid("an attractor needs a nontrivial stable direction");
    }
    match (dim_lambda, dim_eu) {
        (0, 0) => Ok(AttractorClass::AttractingFixedPoint),
        (1, 1) => Ok(AttractorClass::Generalized1Solenoid),
        (2, 1) => Ok(AttractorClass::TorusT2Automorphism),
        (2, 2) => Ok(AttractorClass::Codim1Expanding),
        (3, _) => Ok(AttractorClass::AnosovT3),
        _ => invalid("a 1-dimensional attractor has dim E^u = 1"),
    }
}

/// Every estimator threshold in one place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub transient: usize,
    pub count: usize,
    pub lyapunov_transient: usize,
    pub lyapunov_steps: usize,
    pub max_restarts: usize,
    /// Exponents above this count as expanding; none may lie within it of 0.
    pub exponent_margin: f64,
    /// Transverse residual needed for each extra topological dimension.
    pub residual_threshold: f64,
    /// Use `>` instead of `>=` against the residual threshold.
    pub residual_strict: bool,
    /// Clouds with a smaller diameter count as a single point.
    pub collapse_diameter: f64,
    pub boxes: BoxOptions,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            transient: 100,
            count: 100_000,
            lyapunov_transient: 100,
            lyapunov_steps: 20_000,
            max_restarts: 5,
            exponent_margin: 0.05,
            residual_threshold: 0.75,
            residual_strict: false,
            collapse_diameter: 1e-6,
            boxes: BoxOptions::default(),
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.count == 0 || self.lyapunov_steps == 0 {
            return bad("count and lyapunov_steps must be positive");
        }
        if !(self.exponent_margin >= 0.0) {
            return bad("exponent_margin must be non-negative");
        }
        if !(self.residual_threshold > 0.0 && self.residual_threshold <= 1.0) {
            return bad("residual_threshold must lie in (0, 1]");
        }
        if !(self.collapse_diameter >= 0.0) {
            return bad("collapse_diameter must be non-negative");
        }
        if self.boxes.max_level <= self.boxes.min_level || !(self.boxes.saturation > 0.0) {
            return bad("box levels need min_level < max_level and a positive saturation");
        }
        Ok(())
    }

    /// Number of transverse dimensions `s` read off the residual
    /// `box estimate - dim E^u`: the `k`-th dimension counts once the residual
    /// reaches `k - 1 + residual_threshold`.
    pub fn transverse_dimensions(&self, residual: f64) -> usize {
        let mut s = 0;
        loop {
            let bar = s as f64 + self.residual_threshold;
            let reached = if self.residual_strict { residual > bar } else { residual >= bar };
            if !reached || s >= 3 {
                return s;
            }
            s += 1;
        }
    }
}

/// Seed, spec and thresholds behind a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub crate_version: &'static str,
    pub spec: MapSpec,
    pub orbit_seed: u64,
    pub lyapunov_seed: u64,
    pub config: ClassifierConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quality {
    pub passed: bool,
    pub issues: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttractorReport {
    pub spec_name: &'static str,
    pub ambient_dim: usize,
    pub cloud_diameter: f64,
    pub collapsed: bool,
    pub box_dimension: BoxDimension,
    pub lyapunov: LyapunovSpectrum,
    pub dim_eu: usize,
    pub transverse_residual: f64,
    pub dim_lambda: usize,
    pub class_label: AttractorClass,
    pub quality: Quality,
    pub provenance: Provenance,
}

/// Orbit, box dimension, Lyapunov spectrum, rounding, then the decision tree.
pub fn report(spec: &MapSpec, config: &ClassifierConfig, seed: u64) -> Result<AttractorReport> {
    spec.validate().map_err(|e| e.in_stage("spec"))?;
    config.validate().map_err(|e| e.in_stage("config"))?;
    let lyapunov_seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let (cloud, lyap) = rayon::join(
        || generate_orbit(spec, config.transient, config.count, seed).map_err(|e| e.in_stage("orbit")),
        || {
            lyapunov_spectrum(
                spec,
                config.lyapunov_transient,
                config.lyapunov_steps,
                lyapunov_seed,
                config.max_restarts,
            )
            .map_err(|e| e.in_stage("lyapunov"))
        },
    );
    let (cloud, lyapunov) = (cloud?, lyap?);
    let box_dimension = box_counting_dimension(&cloud, &config.boxes).map_err(|e| e.in_stage("box dimension"))?;

    let mut issues = Vec::new();
    if box_dimension.degenerate {
        issues.push(format!(
            "box-counting fit r^2 = {:.4} below {}",
            box_dimension.r_squared, config.boxes.min_r_squared
        ));
    }
    for e in &lyapunov.exponents {
        if e.abs() <= config.exponent_margin {
            issues.push(format!("exponent {e:.4} within the margin {} of 0", config.exponent_margin));
        }
    }
    if lyapunov.restarts > 0 {
        issues.push(format!("Lyapunov frame restarted {} times", lyapunov.restarts));
    }

    let dim_eu = lyapunov.exponents.iter().filter(|e| **e > config.exponent_margin).count();
    let cloud_diameter = cloud.diameter();
    let collapsed = cloud_diameter < config.collapse_diameter;
    let transverse_residual = box_dimension.estimate - dim_eu as f64;
    let dim_lambda = if collapsed {
        0
    } else {
        (dim_eu + config.transverse_dimensions(transverse_residual))
            .min(spec.ambient_dim())
            .min(3)
    };
    let class_label = classify(dim_lambda, dim_eu).map_err(|e| e.in_stage("classify"))?;

    Ok(AttractorReport {
        spec_name: spec.name(),
        ambient_dim: spec.ambient_dim(),
        cloud_diameter,
        collapsed,
        box_dimension,
        dim_eu,
        transverse_residual,
        dim_lambda,
        class_label,
        quality: Quality {
            passed: issues.is_empty(),
            issues,
        },
        provenance: Provenance {
            schema_version: REPORT_SCHEMA_VERSION,
            crate_version: env!("CARGO_PKG_VERSION"),
            spec: spec.clone(),
            orbit_seed: seed,
            lyapunov_seed: lyapunov.seed,
            config: config.clone(),
        },
        lyapunov,
    })
}

/// Reports for several specs in parallel; output order follows the input.
pub fn report_many(specs: &[MapSpec], config: &ClassifierConfig, seed: u64) -> Vec<Result<AttractorReport>> {
    specs.par_iter().map(|s| report(s, config, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_table_examples() {
        assert_eq!(classify(1, 1).unwrap(), AttractorClass::Generalized1Solenoid);
        assert_eq!(classify(2, 1).unwrap(), AttractorClass::TorusT2Automorphism);
        assert!(matches!(classify(1, 0), Err(Error::InvalidCombination { .. })));
        assert!(classify(4, 1).is_err());
    }

    #[test]
    fn labels_serialize_as_label() {
        let s = serde_json::to_string(&AttractorClass::TorusT2Automorphism).unwrap();
        assert_eq!(s, "\"torus-T2-automorphism\"");
        assert_eq!(AttractorClass::AnosovT3.to_string(), "anosov-T3");
    }

    #[test]
    fn transverse_rounding() {
        let c = ClassifierConfig::default();
        assert_eq!(c.transverse_dimensions(0.5), 0);
        assert_eq!(c.transverse_dimensions(0.75), 1);
        assert_eq!(c.transverse_dimensions(1.0), 1);
        assert_eq!(c.transverse_dimensions(2.0), 2);
        assert_eq!(c.transverse_dimensions(-0.3), 0);
        let strict = ClassifierConfig {
            residual_threshold: 0.5,
            residual_strict: true,
            ..c.clone()
        };
        assert_eq!(strict.transverse_dimensions(0.5), 0);
        let loose = ClassifierConfig {
            residual_threshold: 0.5,
            ..c
        };
        assert_eq!(loose.transverse_dimensions(0.5), 1);
    }

    #[test]
    fn config_json_defaults() {
        let c: ClassifierConfig = serde_json::from_str(r#"{"count": 500}"#).unwrap();
        assert_eq!(c.count, 500);
        assert_eq!(c.exponent_margin, 0.05);
        assert!(serde_json::from_str::<ClassifierConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
