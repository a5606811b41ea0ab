//! Named invariant checks, runnable per metric: each check samples points
//! (or strips) deterministically from a seed, records the worst residual,
//! and compares against a tolerance scaled by MICROLOC_TOLERANCE_SCALE.

use crate::flow::{self, integrate_bicharacteristic, TransportMode};
use crate::geometry::{metric_at, null_covector_from_direction, GeometryError, MetricSpec};
use crate::spin::{self, CMat4};
use crate::symbols::FamilyKind;
use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// All check names, in execution order.
pub const CHECK_NAMES: [&str; 10] = [
    "metric-inverse",
    "christoffel-symmetry",
    "metric-compatibility",
    "tetrad",
    "anticommutator",
    "nabla-gamma",
    "lichnerowicz",
    "rpt",
    "null-drift",
    "dencker",
];

/// Global tolerance multiplier from the environment, default 1.
pub fn tolerance_scale() -> f64 {
    std::env::var("MICROLOC_TOLERANCE_SCALE")
        .ok()
        .and_then(|v| v.parse::<f64>().ok())
        .filter(|v| *v > 0.0)
        .unwrap_or(1.0)
}

const N_SAMPLE_POINTS: usize = 20;

fn sample_points(spec: &MetricSpec, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..N_SAMPLE_POINTS).map(|_| spec.sample_point(&mut rng)).collect()
}

fn spatial_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn check_metric_inverse(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for x in sample_points(spec, seed) {
        let cache = metric_at(spec, &x)?;
        let prod = cache.g * cache.g_inv - Matrix4::identity();
        worst = worst.max(prod.abs().max());
    }
    Ok(worst)
}

fn check_christoffel_symmetry(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for x in sample_points(spec, seed) {
        let cache = metric_at(spec, &x)?;
        for lam in 0..4 {
            for mu in 0..4 {
                for nu in 0..4 {
                    worst = worst
                        .max((cache.christoffel[lam][(mu, nu)] - cache.christoffel[lam][(nu, mu)]).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn check_metric_compatibility(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for x in sample_points(spec, seed) {
        let cache = metric_at(spec, &x)?;
        for lam in 0..4 {
            let h = 1e-5 * x[lam].abs().max(1.0);
            let mut xp = x;
            xp[lam] += h;
            let mut xm = x;
            xm[lam] -= h;
            let gp = metric_at(spec, &xp)?.g;
            let gm = metric_at(spec, &xm)?.g;
            for mu in 0..4 {
                for nu in 0..4 {
                    let mut d = (gp[(mu, nu)] - gm[(mu, nu)]) / (2.0 * h);
                    for rho in 0..4 {
                        d -= cache.christoffel[rho][(lam, mu)] * cache.g[(rho, nu)];
                        d -= cache.christoffel[rho][(lam, nu)] * cache.g[(mu, rho)];
                    }
                    worst = worst.max(d.abs());
                }
            }
        }
    }
    Ok(worst)
}

fn check_tetrad(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for x in sample_points(spec, seed) {
        let cache = metric_at(spec, &x)?;
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for mu in 0..4 {
                    for nu in 0..4 {
                        s += cache.tetrad[(mu, a)] * cache.tetrad[(nu, b)] * cache.g[(mu, nu)];
                    }
                }
                let eta = crate::geometry::ETA[a];
                let target = if a == b { eta } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
    }
    Ok(worst)
}

fn check_anticommutator(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for x in sample_points(spec, seed) {
        let cache = metric_at(spec, &x)?;
        let gs = spin::gamma_set_from_cache(spec, &cache)?;
        worst = worst.max(spin::anticommutator_residual(&gs, &cache.g_inv));
    }
    Ok(worst)
}

fn check_nabla_gamma(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for x in sample_points(spec, seed).into_iter().take(8) {
        worst = worst.max(spin::nabla_gamma_residual(spec, &x, 1e-5)?);
    }
    Ok(worst)
}

fn check_lichnerowicz(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    // fixed smooth test spinor with O(1) derivatives
    let psi = |x: &[f64; 4]| {
        nalgebra::Vector4::new(
            Complex64::new((0.3 * x[0] + 0.2 * x[1]).sin(), 0.1 * x[2]),
            Complex64::new((0.25 * x[2]).cos(), (0.2 * x[3]).sin()),
            Complex64::new(0.4, (0.15 * x[0] - 0.1 * x[3]).cos()),
            Complex64::new((0.2 * x[1]).sin(), -0.3),
        )
    };
    let mut worst: f64 = 0.0;
    for x in sample_points(spec, seed).into_iter().take(3) {
        worst = worst.max(spin::lichnerowicz_residual(spec, &psi, &x, 0.5, 1e-3)?);
    }
    Ok(worst)
}

fn check_rpt(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for kind in [FamilyKind::ScalarWave, FamilyKind::Dirac, FamilyKind::DiracAdjoint] {
        let fact = crate::symbols::rpt_factorize(kind, spec, seed)?;
        let op = fact.operator();
        for _ in 0..20 {
            let x = spec.sample_point(&mut rng);
            let xi = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let p = op.principal(&x, &xi);
            let pt = fact.ptilde(&x, &xi)?;
            let q = fact.q(&x, &xi)?;
            let dim = p.nrows();
            let resid = (&pt * &p - DMatrix::identity(dim, dim) * Complex64::new(q, 0.0)).norm();
            let scale = 1.0 + p.norm() * pt.norm();
            worst = worst.max(resid / scale);
        }
    }
    Ok(worst)
}

fn null_strip(
    spec: &MetricSpec,
    seed: u64,
) -> Result<flow::BicharStrip, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = spec.sample_point(&mut rng);
    let cache = metric_at(spec, &x)?;
    let xi = null_covector_from_direction(&cache, &spatial_direction(&mut rng));
    integrate_bicharacteristic(spec, &x, &xi, 0.2, 33).map_err(|e| match e {
        flow::FlowError::Geometry(g) => g,
        _ => GeometryError::SolverDiverged,
    })
}

fn check_null_drift(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    let mut worst: f64 = 0.0;
    for k in 0..5 {
        let strip = null_strip(spec, seed.wrapping_add(k))?;
        worst = worst.max(strip.max_null_drift() / strip.xi0_norm_sq);
    }
    Ok(worst)
}

fn check_dencker(spec: &MetricSpec, seed: u64) -> Result<f64, GeometryError> {
    // transport the Dirac kernel fibre slash(xi) and measure how far it
    // leaves the pointwise kernel of the principal symbol along the strip
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let strip = null_strip(spec, seed.wrapping_add(k))?;
        let start = strip.point(0);
        let gs = spin::gamma_set_at(spec, &start.x)?;
        let slash0 = gs.slash(&start.xi);
        let w0 = DMatrix::from_fn(4, 4, |i, j| slash0[(i, j)]);
        let pol = flow::transport(&strip, &w0, TransportMode::BispinorBoth)
            .map_err(|e| match e {
                flow::FlowError::Geometry(g) => g,
                _ => GeometryError::SolverDiverged,
            })?;
        for (j, w) in pol.fibre.iter().enumerate() {
            let p = strip.point(j);
            let gsj = spin::gamma_set_at(spec, &p.x)?;
            let slash: CMat4 = gsj.slash(&p.xi);
            let slash_dyn = DMatrix::from_fn(4, 4, |i, jj| slash[(i, jj)]);
            let resid = (&slash_dyn * w).norm();
            worst = worst.max(resid / (slash_dyn.norm() * w.norm()));
        }
    }
    Ok(worst)
}

struct CheckSpec {
    name: &'static str,
    tolerance: f64,
    run: fn(&MetricSpec, u64) -> Result<f64, GeometryError>,
}

const CHECKS: [CheckSpec; 10] = [
    CheckSpec {
        name: "metric-inverse",
        tolerance: 1e-12,
        run: check_metric_inverse,
    },
    CheckSpec {
        name: "christoffel-symmetry",
        tolerance: 1e-12,
        run: check_christoffel_symmetry,
    },
    CheckSpec {
        name: "metric-compatibility",
        tolerance: 1e-6,
        run: check_metric_compatibility,
    },
    CheckSpec {
        name: "tetrad",
        tolerance: 1e-10,
        run: check_tetrad,
    },
    CheckSpec {
        name: "anticommutator",
        tolerance: 1e-10,
        run: check_anticommutator,
    },
    CheckSpec {
        name: "nabla-gamma",
        tolerance: 1e-4,
        run: check_nabla_gamma,
    },
    CheckSpec {
        name: "lichnerowicz",
        tolerance: 1e-2,
        run: check_lichnerowicz,
    },
    CheckSpec {
        name: "rpt",
        tolerance: 1e-10,
        run: check_rpt,
    },
    CheckSpec {
        name: "null-drift",
        tolerance: 1e-8,
        run: check_null_drift,
    },
    CheckSpec {
        name: "dencker",
        tolerance: 1e-6,
        run: check_dencker,
    },
];

/// Runs the named checks (all of them for an empty list) and reports one
/// result per check. Tolerances are multiplied by `tol_scale` times the
/// environment scale.
pub fn run_checks(
    spec: &MetricSpec,
    names: &[String],
    seed: u64,
    tol_scale: f64,
) -> Result<Vec<CheckResult>, VerifyError> {
    let scale = tol_scale * tolerance_scale();
    let selected: Vec<&CheckSpec> = if names.is_empty() {
        CHECKS.iter().collect()
    } else {
        let mut out = Vec::new();
        for name in names {
            let check = CHECKS
                .iter()
                .find(|c| c.name == name)
                .ok_or_else(|| VerifyError::UnknownCheck(name.clone()))?;
            out.push(check);
        }
        out
    };
    let mut results = Vec::with_capacity(selected.len());
    for check in selected {
        let max_residual = (check.run)(spec, seed)?;
        let tolerance = check.tolerance * scale;
        results.push(CheckResult {
            name: check.name.to_string(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
        });
    }
    Ok(results)
}
