//! Geodesic boundary-value problems: shooting solver, null connections,
//! and the quadratic geodesic distance.

use super::{classify_covector, metric_at, CausalClass, Covector, GeometryError, MetricSpec, Point};
use crate::flow;
use crate::ode::OdePath;
use nalgebra::{Matrix4, Vector4};

/// A geodesic found by the shooting solver, parameterized over tau in [0,1]
/// with the Hamiltonian convention dx = 2 g^{-1} xi.
pub struct GeodesicConnection {
    /// launch covector of the unit-interval parameterization
    pub launch_xi: Covector,
    /// launch covector rescaled so its raised time component is +1
    /// (flips past-pointing solutions to the future); only meaningful for
    /// causal connections
    pub launch_xi_future: Covector,
    /// transported covector at the far end, scaled consistently with
    /// `launch_xi_future`
    pub arrival_xi_future: Covector,
    /// arrival covector in the raw unit-interval scaling
    pub arrival_xi: Covector,
    pub causal: CausalClass,
    /// signed quadratic geodesic distance sigma(x, y)
    pub sigma: f64,
    /// |sigma|^(1/2)
    pub affine_length: f64,
    /// the discretized transport curve (state = (x, xi))
    pub path: OdePath,
}

const MAX_NEWTON: usize = 50;
const POSITION_TOL: f64 = 1e-8;
/// relative |q| below which a converged connection counts as null
const NULL_REL_TOL: f64 = 1e-6;

fn endpoint(path: &OdePath) -> ([f64; 4], [f64; 4]) {
    let y = path.ys.last().unwrap();
    (
        [y[0], y[1], y[2], y[3]],
        [y[4], y[5], y[6], y[7]],
    )
}

/// Shooting solver for the geodesic between `x` and `y`, any causal type.
pub fn solve_geodesic_bvp(
    spec: &MetricSpec,
    x: &Point,
    y: &Point,
) -> Result<GeodesicConnection, GeometryError> {
    spec.check_domain(x)?;
    spec.check_domain(y)?;
    let dx_max = (0..4).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max);
    if dx_max < 1e-12 {
        return Err(GeometryError::BadSpec(
            "geodesic endpoints coincide".into(),
        ));
    }

    let g = spec.metric(x);
    let delta = Vector4::new(y[0] - x[0], y[1] - x[1], y[2] - x[2], y[3] - x[3]);
    // straight-line guess: dx = 2 g^{-1} xi over unit tau, so xi = g delta / 2
    let mut xi = g * delta * 0.5;

    let shoot = |xi: &Vector4<f64>| -> Result<OdePath, GeometryError> {
        flow::integrate_hamiltonian(
            spec,
            x,
            &[xi[0], xi[1], xi[2], xi[3]],
            0.0,
            1.0,
            1e-11,
            1e-13,
        )
        .map_err(|_| GeometryError::SolverDiverged)
    };

    let residual = |path: &OdePath| -> Vector4<f64> {
        let (xe, _) = endpoint(path);
        Vector4::new(xe[0] - y[0], xe[1] - y[1], xe[2] - y[2], xe[3] - y[3])
    };

    let mut path = shoot(&xi)?;
    let mut res = residual(&path);

    for _ in 0..MAX_NEWTON {
        if res.amax() < POSITION_TOL {
            return Ok(finalize(spec, x, xi, path));
        }
        // finite-difference Jacobian of the endpoint wrt the launch covector
        let mut jac = Matrix4::zeros();
        for j in 0..4 {
            let h = 1e-7 * (1.0 + xi[j].abs());
            let mut xip = xi;
            xip[j] += h;
            let pp = shoot(&xip)?;
            let rp = residual(&pp);
            jac.set_column(j, &((rp - res) / h));
        }
        let step = jac
            .lu()
            .solve(&res)
            .ok_or(GeometryError::SolverDiverged)?;
        // damped update
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let cand = xi - step * lambda;
            match shoot(&cand) {
                Ok(p) => {
                    let r = residual(&p);
                    if r.norm() < res.norm() {
                        xi = cand;
                        path = p;
                        res = r;
                        accepted = true;
                        break;
                    }
                }
                Err(_) => {}
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(GeometryError::SolverDiverged);
        }
    }
    if res.amax() < POSITION_TOL {
        return Ok(finalize(spec, x, xi, path));
    }
    Err(GeometryError::SolverDiverged)
}

fn finalize(spec: &MetricSpec, x: &Point, xi: Vector4<f64>, path: OdePath) -> GeodesicConnection {
    let cache = metric_at(spec, x).expect("launch point in domain");
    let q = (cache.g_inv * xi).dot(&xi);
    let sigma = 4.0 * q;
    let (_, xi_end) = endpoint(&path);
    let xi_arr: Covector = [xi[0], xi[1], xi[2], xi[3]];

    // future normalization: raised time component scaled to +1
    let raised0 = (cache.g_inv * xi)[0];
    let (launch_future, arrival_future) = if raised0.abs() > 1e-12 {
        let s = 1.0 / raised0;
        (
            [s * xi[0], s * xi[1], s * xi[2], s * xi[3]],
            [s * xi_end[0], s * xi_end[1], s * xi_end[2], s * xi_end[3]],
        )
    } else {
        (xi_arr, xi_end)
    };

    // classify with a tolerance matched to the shooting accuracy; the
    // orientation is that of the raw launch covector
    let scale = cache.g_inv.norm() * xi.norm_squared();
    let causal = if q.abs() < NULL_REL_TOL * scale {
        if raised0 >= 0.0 {
            CausalClass::NullFuture
        } else {
            CausalClass::NullPast
        }
    } else {
        classify_covector(&cache, &xi_arr)
    };

    GeodesicConnection {
        launch_xi: xi_arr,
        launch_xi_future: launch_future,
        arrival_xi_future: arrival_future,
        arrival_xi: xi_end,
        causal,
        sigma,
        affine_length: sigma.abs().sqrt(),
        path,
    }
}

/// Null geodesic connection between `x` and `y`, if one is found by the
/// shooting solver. Returns `None` when the converged geodesic is not null
/// (spacelike or timelike related pairs). Solver non-convergence is an
/// error: it signals "no result", not "provably none".
pub fn geodesic_connect(
    spec: &MetricSpec,
    x: &Point,
    y: &Point,
) -> Result<Option<GeodesicConnection>, GeometryError> {
    let conn = match solve_geodesic_bvp(spec, x, y) {
        Ok(c) => c,
        Err(GeometryError::SolverDiverged) => return Err(GeometryError::SolverDiverged),
        Err(e) => return Err(e),
    };
    match conn.causal {
        CausalClass::NullFuture | CausalClass::NullPast => Ok(Some(conn)),
        _ => Ok(None),
    }
}

/// Quadratic geodesic distance sigma(x, y): signed square of the geodesic
/// affine length, positive for timelike and negative for spacelike
/// separation. On Minkowski this is (x-y)^mu (x-y)_mu.
pub fn sigma_quadratic_distance(
    spec: &MetricSpec,
    x: &Point,
    y: &Point,
) -> Result<f64, GeometryError> {
    match solve_geodesic_bvp(spec, x, y) {
        Ok(c) => Ok(c.sigma),
        Err(GeometryError::SolverDiverged) => Err(GeometryError::NotInNormalNeighbourhood),
        Err(e) => Err(e),
    }
}
