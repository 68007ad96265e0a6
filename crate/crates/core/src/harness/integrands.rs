//! Test integrands with known integrals.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::spaces::{trace, DistributionSpec};

/// Family of spaces an integrand is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Cube,
    Gaussian,
    Sphere,
    Orthogonal,
}

impl SpaceKind {
    pub fn of(spec: &DistributionSpec) -> Option<SpaceKind> {
        match spec {
            DistributionSpec::UniformCube { .. } => Some(SpaceKind::Cube),
            DistributionSpec::StandardGaussian { .. } => Some(SpaceKind::Gaussian),
            DistributionSpec::UniformSphere { .. } => Some(SpaceKind::Sphere),
            DistributionSpec::HaarOrthogonal { .. } => Some(SpaceKind::Orthogonal),
            DistributionSpec::Paths { .. } => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpaceKind::Cube => "cube",
            SpaceKind::Gaussian => "gaussian",
            SpaceKind::Sphere => "sphere",
            SpaceKind::Orthogonal => "orthogonal",
        }
    }

    pub const ALL: [SpaceKind; 4] = [
        SpaceKind::Cube,
        SpaceKind::Gaussian,
        SpaceKind::Sphere,
        SpaceKind::Orthogonal,
    ];

    /// Builds the law for this space. `dim` is the cube/Gaussian dimension, the
    /// sphere's ambient dimension, or the orthogonal matrix size.
    pub fn spec(self, dim: usize) -> DistributionSpec {
        match self {
            SpaceKind::Cube => DistributionSpec::UniformCube { dim },
            SpaceKind::Gaussian => DistributionSpec::StandardGaussian { dim },
            SpaceKind::Sphere => DistributionSpec::UniformSphere { ambient: dim },
            SpaceKind::Orthogonal => DistributionSpec::HaarOrthogonal { size: dim },
        }
    }

    pub fn parse(label: &str) -> Option<SpaceKind> {
        SpaceKind::ALL.into_iter().find(|s| s.label() == label)
    }
}

/// An integrand, the space it lives on, and its integral when known.
#[derive(Debug, Clone)]
pub struct IntegrandSpec {
    pub label: &'static str,
    pub space: SpaceKind,
    eval: fn(&[f64]) -> f64,
    truth: fn(&DistributionSpec) -> Option<f64>,
    /// Where the reference value comes from.
    pub provenance: &'static str,
}

impl IntegrandSpec {
    #[inline]
    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.eval)(p)
    }

    pub fn evaluator(&self) -> fn(&[f64]) -> f64 {
        self.eval
    }

    /// Fails unless `spec` belongs to this integrand's space and dimension.
    pub fn check_space(&self, spec: &DistributionSpec) -> Result<()> {
        spec.validate()?;
        if SpaceKind::of(spec) != Some(self.space) {
            return Err(invalid(format!(
                "integrand '{}' lives on '{}', not '{}'",
                self.label,
                self.space.label(),
                spec.label()
            )));
        }
        if self.space == SpaceKind::Sphere && spec.ambient_dim() != 3 {
            return Err(invalid(format!(
                "integrand '{}' is defined on the sphere of R^3",
                self.label
            )));
        }
        Ok(())
    }

    /// Reference integral, in the units of [`IntegrandSpec::measure_mass`].
    pub fn true_value(&self, spec: &DistributionSpec) -> Option<f64> {
        (self.truth)(spec)
    }

    /// Total mass of the reference measure. Sphere references are surface
    /// integrals over S², so normalized estimates are multiplied by 4π.
    pub fn measure_mass(&self) -> f64 {
        match self.space {
            SpaceKind::Sphere => 4.0 * PI,
            _ => 1.0,
        }
    }
}

/// Lookup table of the built-in integrands.
#[derive(Debug, Clone)]
pub struct Registry {
    items: Vec<IntegrandSpec>,
}

impl Registry {
    pub fn get(&self, label: &str) -> Option<&IntegrandSpec> {
        self.items.iter().find(|i| i.label == label)
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.items.iter().map(|i| i.label).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &IntegrandSpec> {
        self.items.iter()
    }
}

fn phi1(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    (PI * (2.0 / d * x.iter().sum::<f64>() - 1.0)).sin()
}

fn phi2(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    (PI / d * x.iter().sum::<f64>()).sin()
}

fn phi3(x: &[f64]) -> f64 {
    (x[0] + x[1] + x[2]).cos()
}

fn phi4(x: &[f64]) -> f64 {
    x[0].cos() * x[1].cos() * x[2].cos()
}

fn phi5(x: &[f64]) -> f64 {
    (x[0] - x[1]).exp()
}

fn trace_1(x: &[f64]) -> f64 {
    trace(x)
}

fn trace_2(x: &[f64]) -> f64 {
    trace(x).powi(2)
}

fn square_first(x: &[f64]) -> f64 {
    x[0] * x[0]
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn zero(_: &DistributionSpec) -> Option<f64> {
    Some(0.0)
}

fn one(_: &DistributionSpec) -> Option<f64> {
    Some(1.0)
}

fn sphere_cos(_: &DistributionSpec) -> Option<f64> {
    let r = 3f64.sqrt();
    Some(4.0 * PI / r * r.sin())
}

fn sphere_exp(_: &DistributionSpec) -> Option<f64> {
    Some(PI * 8f64.sqrt() * 2f64.sqrt().sinh())
}

fn third(_: &DistributionSpec) -> Option<f64> {
    Some(1.0 / 3.0)
}

fn cube_norm(spec: &DistributionSpec) -> Option<f64> {
    match spec.ambient_dim() {
        1 => Some(0.5),
        // E‖U‖ for U uniform on the unit square.
        2 => Some((2f64.sqrt() + 1f64.asinh()) / 3.0),
        _ => None,
    }
}

/// The integrands of the benchmark suite.
pub fn builtin_integrands() -> Registry {
    let items = vec![
        IntegrandSpec {
            label: "phi1",
            space: SpaceKind::Cube,
            eval: phi1,
            truth: zero,
            provenance: "exact: the argument of sin is symmetric about 0",
        },
        IntegrandSpec {
            label: "phi2",
            space: SpaceKind::Gaussian,
            eval: phi2,
            truth: zero,
            provenance: "exact: sin is odd and N(0, I) is symmetric",
        },
        IntegrandSpec {
            label: "trace_1",
            space: SpaceKind::Orthogonal,
            eval: trace_1,
            truth: zero,
            provenance: "exact: Haar law is invariant under X -> -X",
        },
        IntegrandSpec {
            label: "trace_2",
            space: SpaceKind::Orthogonal,
            eval: trace_2,
            truth: one,
            provenance: "exact second trace moment of O(m), m >= 2; confirmed by a 1e7-draw MC oracle (see tests)",
        },
        IntegrandSpec {
            label: "phi3",
            space: SpaceKind::Sphere,
            eval: phi3,
            truth: sphere_cos,
            provenance: "exact surface integral (4 pi / sqrt 3) sin(sqrt 3)",
        },
        IntegrandSpec {
            label: "phi4",
            space: SpaceKind::Sphere,
            eval: phi4,
            truth: sphere_cos,
            provenance: "exact surface integral (4 pi / sqrt 3) sin(sqrt 3)",
        },
        IntegrandSpec {
            label: "phi5",
            space: SpaceKind::Sphere,
            eval: phi5,
            truth: sphere_exp,
            provenance: "exact surface integral pi sqrt 8 sinh(sqrt 2)",
        },
        IntegrandSpec {
            label: "x2",
            space: SpaceKind::Cube,
            eval: square_first,
            truth: third,
            provenance: "exact: E U^2 = 1/3",
        },
        IntegrandSpec {
            label: "norm",
            space: SpaceKind::Cube,
            eval: norm,
            truth: cube_norm,
            provenance: "exact for d <= 2: (sqrt 2 + asinh 1) / 3 on the square",
        },
    ];
    Registry { items }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_contents() {
        let reg = builtin_integrands();
        for label in [
            "phi1", "phi2", "phi3", "phi4", "phi5", "trace_1", "trace_2", "x2", "norm",
        ] {
            assert!(reg.get(label).is_some(), "{label}");
        }
        assert!(reg.get("nonsense").is_none());
    }

    #[test]
    fn known_truths() {
        let reg = builtin_integrands();
        let cube = DistributionSpec::UniformCube { dim: 2 };
        assert_eq!(reg.get("phi1").unwrap().true_value(&cube), Some(0.0));
        let gauss = DistributionSpec::StandardGaussian { dim: 3 };
        assert_eq!(reg.get("phi2").unwrap().true_value(&gauss), Some(0.0));
        let o3 = DistributionSpec::HaarOrthogonal { size: 3 };
        assert_eq!(reg.get("trace_1").unwrap().true_value(&o3), Some(0.0));
        let s2 = DistributionSpec::UniformSphere { ambient: 3 };
        let t3 = reg.get("phi3").unwrap().true_value(&s2).unwrap();
        assert!((t3 - 4.0 * PI / 3f64.sqrt() * 3f64.sqrt().sin()).abs() < 1e-15);
        let t5 = reg.get("phi5").unwrap().true_value(&s2).unwrap();
        assert!((t5 - 2.0 * 2f64.sqrt() * PI * 2f64.sqrt().sinh()).abs() < 1e-12);
        assert_eq!(
            reg.get("norm")
                .unwrap()
                .true_value(&DistributionSpec::UniformCube { dim: 3 }),
            None
        );
    }

    #[test]
    fn phi1_is_antisymmetric_about_center() {
        let x = [0.2, 0.9, 0.35];
        let y: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
        assert!((phi1(&x) + phi1(&y)).abs() < 1e-15);
    }

    #[test]
    fn space_checks() {
        let reg = builtin_integrands();
        let phi3 = reg.get("phi3").unwrap();
        assert!(phi3
            .check_space(&DistributionSpec::UniformSphere { ambient: 3 })
            .is_ok());
        assert!(phi3
            .check_space(&DistributionSpec::UniformSphere { ambient: 4 })
            .is_err());
        assert!(phi3.check_space(&DistributionSpec::UniformCube { dim: 3 }).is_err());
    }
}
