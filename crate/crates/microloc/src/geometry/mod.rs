//! Spacetime metrics, derived geometric quantities, causal classification,
//! and geodesic initial/boundary value solvers.

pub mod expr;
mod geodesic;

pub use geodesic::{geodesic_connect, sigma_quadratic_distance, solve_geodesic_bvp, GeodesicConnection};

use expr::Expr;
use nalgebra::{Matrix4, Vector4};
use thiserror::Error;

pub type Point = [f64; 4];
pub type Covector = [f64; 4];

/// Flat frame metric diag(+,-,-,-).
pub const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point outside chart domain: {0}")]
    OutOfDomain(String),
    #[error("metric degenerate at queried point (|det g| = {0:.3e})")]
    DegenerateMetric(f64),
    #[error("geodesic shooting did not converge within iteration budget")]
    SolverDiverged,
    #[error("target point not in a normal neighbourhood of the base point")]
    NotInNormalNeighbourhood,
    #[error("invalid metric specification: {0}")]
    BadSpec(String),
}

/// Analytic scale-factor families for spatially flat Robertson-Walker metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleFactor {
    /// a(t) = t^p
    PowerLaw { exponent: f64 },
    /// a(t) = exp(H t)
    Exponential { hubble: f64 },
}

impl ScaleFactor {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScaleFactor::PowerLaw { exponent } => t.powf(*exponent),
            ScaleFactor::Exponential { hubble } => (hubble * t).exp(),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            ScaleFactor::PowerLaw { exponent } => exponent * t.powf(exponent - 1.0),
            ScaleFactor::Exponential { hubble } => hubble * (hubble * t).exp(),
        }
    }
}

/// Closed-form component table for a user-supplied metric.
#[derive(Debug, Clone)]
pub struct CustomMetric {
    /// upper-triangular components g_{mu nu}, mu <= nu, row-major:
    /// (00,01,02,03,11,12,13,22,23,33)
    pub components: [Expr; 10],
    pub chart: String,
}

/// A spacetime chart with signature (+,-,-,-).
#[derive(Debug, Clone)]
pub enum MetricSpec {
    Minkowski,
    Schwarzschild { mass: f64 },
    FrwFlat { scale: ScaleFactor },
    Custom(CustomMetric),
}

impl MetricSpec {
    pub fn chart_label(&self) -> &str {
        match self {
            MetricSpec::Minkowski => "cartesian (t,x,y,z)",
            MetricSpec::Schwarzschild { .. } => "exterior Schwarzschild (t,r,theta,phi)",
            MetricSpec::FrwFlat { .. } => "comoving (t,x,y,z)",
            MetricSpec::Custom(c) => &c.chart,
        }
    }

    pub fn check_domain(&self, x: &Point) -> Result<(), GeometryError> {
        match self {
            MetricSpec::Minkowski => Ok(()),
            MetricSpec::Schwarzschild { mass } => {
                let r = x[1];
                if r <= 2.0 * mass * (1.0 + 1e-6) {
                    return Err(GeometryError::OutOfDomain(format!(
                        "r = {r} inside or too close to horizon r = {}",
                        2.0 * mass
                    )));
                }
                let st = x[2].sin();
                if st.abs() < 1e-6 {
                    return Err(GeometryError::OutOfDomain(format!(
                        "theta = {} at polar chart degeneracy",
                        x[2]
                    )));
                }
                Ok(())
            }
            MetricSpec::FrwFlat { .. } => {
                if x[0] <= 0.0 {
                    return Err(GeometryError::OutOfDomain(format!(
                        "t = {} outside t > 0 chart domain",
                        x[0]
                    )));
                }
                Ok(())
            }
            MetricSpec::Custom(_) => Ok(()),
        }
    }

    /// Metric components g_{mu nu}(x).
    pub fn metric(&self, x: &Point) -> Matrix4<f64> {
        match self {
            MetricSpec::Minkowski => Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0)),
            MetricSpec::Schwarzschild { mass } => {
                let r = x[1];
                let f = 1.0 - 2.0 * mass / r;
                let st = x[2].sin();
                Matrix4::from_diagonal(&Vector4::new(f, -1.0 / f, -r * r, -r * r * st * st))
            }
            MetricSpec::FrwFlat { scale } => {
                let a2 = scale.eval(x[0]).powi(2);
                Matrix4::from_diagonal(&Vector4::new(1.0, -a2, -a2, -a2))
            }
            MetricSpec::Custom(c) => {
                let mut g = Matrix4::zeros();
                let mut k = 0;
                for mu in 0..4 {
                    for nu in mu..4 {
                        let v = c.components[k].eval(x);
                        g[(mu, nu)] = v;
                        g[(nu, mu)] = v;
                        k += 1;
                    }
                }
                g
            }
        }
    }

    /// Coordinate derivatives of the metric: result[lam] = d g / d x^lam.
    /// Closed form for built-in families, central differences for custom
    /// metrics.
    pub fn metric_deriv(&self, x: &Point) -> [Matrix4<f64>; 4] {
        match self {
            MetricSpec::Minkowski => [Matrix4::zeros(); 4],
            MetricSpec::Schwarzschild { mass } => {
                let r = x[1];
                let st = x[2].sin();
                let ct = x[2].cos();
                let fp = 2.0 * mass / (r * r); // d f / d r
                let f = 1.0 - 2.0 * mass / r;
                let mut dr = Matrix4::zeros();
                dr[(0, 0)] = fp;
                dr[(1, 1)] = fp / (f * f);
                dr[(2, 2)] = -2.0 * r;
                dr[(3, 3)] = -2.0 * r * st * st;
                let mut dth = Matrix4::zeros();
                dth[(3, 3)] = -r * r * 2.0 * st * ct;
                [Matrix4::zeros(), dr, dth, Matrix4::zeros()]
            }
            MetricSpec::FrwFlat { scale } => {
                let a = scale.eval(x[0]);
                let da = scale.deriv(x[0]);
                let mut dt = Matrix4::zeros();
                for i in 1..4 {
                    dt[(i, i)] = -2.0 * a * da;
                }
                [dt, Matrix4::zeros(), Matrix4::zeros(), Matrix4::zeros()]
            }
            MetricSpec::Custom(_) => {
                let mut out = [Matrix4::zeros(); 4];
                for (lam, slot) in out.iter_mut().enumerate() {
                    let h = 1e-5 * x[lam].abs().max(1.0);
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[lam] += h;
                    xm[lam] -= h;
                    *slot = (self.metric(&xp) - self.metric(&xm)) / (2.0 * h);
                }
                out
            }
        }
    }

    /// Inverse metric and sqrt(-det g).
    pub fn inverse_metric(&self, x: &Point) -> Result<(Matrix4<f64>, f64), GeometryError> {
        let g = self.metric(x);
        let det = g.determinant();
        if det.abs() < 1e-14 {
            return Err(GeometryError::DegenerateMetric(det.abs()));
        }
        let ginv = g.try_inverse().ok_or(GeometryError::DegenerateMetric(det.abs()))?;
        Ok((ginv, (-det).abs().sqrt()))
    }

    pub fn sqrt_neg_det(&self, x: &Point) -> f64 {
        (-self.metric(x).determinant()).abs().sqrt()
    }

    /// Christoffel symbols: result[lam][(mu, nu)] = Gamma^lam_{mu nu}.
    pub fn christoffel(&self, x: &Point) -> Result<[Matrix4<f64>; 4], GeometryError> {
        let (ginv, _) = self.inverse_metric(x)?;
        let dg = self.metric_deriv(x);
        let mut gamma = [Matrix4::zeros(); 4];
        for lam in 0..4 {
            for mu in 0..4 {
                for nu in mu..4 {
                    let mut s = 0.0;
                    for rho in 0..4 {
                        s += ginv[(lam, rho)]
                            * (dg[mu][(rho, nu)] + dg[nu][(rho, mu)] - dg[rho][(mu, nu)]);
                    }
                    let v = 0.5 * s;
                    gamma[lam][(mu, nu)] = v;
                    gamma[lam][(nu, mu)] = v;
                }
            }
        }
        Ok(gamma)
    }

    /// Orthonormal tetrad e^mu_a by Gram-Schmidt on the coordinate basis
    /// starting from d/dt. Columns of the returned matrix are the frame
    /// vectors; the second matrix is the inverse frame e^a_mu.
    pub fn tetrad(&self, x: &Point) -> Result<(Matrix4<f64>, Matrix4<f64>), GeometryError> {
        let g = self.metric(x);
        let inner = |u: &Vector4<f64>, v: &Vector4<f64>| (g * v).dot(u);
        let mut frame = [Vector4::zeros(); 4];
        for a in 0..4 {
            let mut v = Vector4::zeros();
            v[a] = 1.0;
            for (b, ub) in frame.iter().enumerate().take(a) {
                // subtract projections; eta_bb sign accounts for Lorentzian norm
                let c = inner(&v, ub) * ETA[b];
                v -= ub * c;
            }
            let n2 = inner(&v, &v) * ETA[a];
            if n2 <= 0.0 {
                return Err(GeometryError::DegenerateMetric(n2.abs()));
            }
            frame[a] = v / n2.sqrt();
        }
        let e = Matrix4::from_columns(&frame);
        // e^a_mu = eta^{ab} g_{mu nu} e^nu_b  (as a matrix: eta * e^T * g)
        let eta = Matrix4::from_diagonal(&Vector4::new(ETA[0], ETA[1], ETA[2], ETA[3]));
        let e_inv = eta * e.transpose() * g;
        Ok((e, e_inv))
    }

    /// Deterministic sample point inside the chart domain, for randomized
    /// property checks.
    pub fn sample_point<R: rand::Rng>(&self, rng: &mut R) -> Point {
        match self {
            MetricSpec::Minkowski | MetricSpec::Custom(_) => [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ],
            MetricSpec::Schwarzschild { mass } => [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(3.0 * mass..20.0 * mass),
                rng.gen_range(0.4..std::f64::consts::PI - 0.4),
                rng.gen_range(0.0..2.0 * std::f64::consts::PI),
            ],
            MetricSpec::FrwFlat { .. } => [
                rng.gen_range(0.5..5.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ],
        }
    }
}

/// All derived geometric quantities at a point.
pub struct GeometryCache {
    pub point: Point,
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
    pub sqrt_neg_det: f64,
    /// christoffel[lam][(mu,nu)] = Gamma^lam_{mu nu}
    pub christoffel: [Matrix4<f64>; 4],
    /// riemann[rho][sig][(mu,nu)] = R^rho_{sig mu nu}
    pub riemann: Box<[[Matrix4<f64>; 4]; 4]>,
    pub ricci: Matrix4<f64>,
    pub scalar_curvature: f64,
    /// e^mu_a (column a = frame vector a)
    pub tetrad: Matrix4<f64>,
    /// e^a_mu
    pub tetrad_inv: Matrix4<f64>,
}

/// Assemble metric, Christoffels, curvature and tetrad at `x`.
///
/// Curvature is computed from the Christoffel symbols by central finite
/// differences; the Christoffels themselves come from closed-form metric
/// derivatives for the built-in families.
pub fn metric_at(spec: &MetricSpec, x: &Point) -> Result<GeometryCache, GeometryError> {
    spec.check_domain(x)?;
    let g = spec.metric(x);
    let (g_inv, sqrt_neg_det) = spec.inverse_metric(x)?;
    let christoffel = spec.christoffel(x)?;

    // dGamma[mu] = d Gamma / d x^mu by central differences
    let mut dgamma = [[Matrix4::zeros(); 4]; 4];
    for mu in 0..4 {
        let h = 1e-5 * x[mu].abs().max(1.0);
        let mut xp = *x;
        let mut xm = *x;
        xp[mu] += h;
        xm[mu] -= h;
        let gp = spec.christoffel(&xp)?;
        let gm = spec.christoffel(&xm)?;
        for lam in 0..4 {
            dgamma[mu][lam] = (gp[lam] - gm[lam]) / (2.0 * h);
        }
    }

    let mut riemann = Box::new([[Matrix4::zeros(); 4]; 4]);
    for rho in 0..4 {
        for sig in 0..4 {
            for mu in 0..4 {
                for nu in 0..4 {
                    let mut v = dgamma[mu][rho][(nu, sig)] - dgamma[nu][rho][(mu, sig)];
                    for lam in 0..4 {
                        v += christoffel[rho][(mu, lam)] * christoffel[lam][(nu, sig)]
                            - christoffel[rho][(nu, lam)] * christoffel[lam][(mu, sig)];
                    }
                    riemann[rho][sig][(mu, nu)] = v;
                }
            }
        }
    }

    let mut ricci = Matrix4::zeros();
    for sig in 0..4 {
        for nu in 0..4 {
            let mut v = 0.0;
            for mu in 0..4 {
                v += riemann[mu][sig][(mu, nu)];
            }
            ricci[(sig, nu)] = v;
        }
    }
    let mut scalar = 0.0;
    for sig in 0..4 {
        for nu in 0..4 {
            scalar += g_inv[(sig, nu)] * ricci[(sig, nu)];
        }
    }

    let (tetrad, tetrad_inv) = spec.tetrad(x)?;

    Ok(GeometryCache {
        point: *x,
        g,
        g_inv,
        sqrt_neg_det,
        christoffel,
        riemann,
        ricci,
        scalar_curvature: scalar,
        tetrad,
        tetrad_inv,
    })
}

/// A point of the punctured cotangent bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: Point,
    pub xi: Covector,
}

impl PhasePoint {
    pub fn new(x: Point, xi: Covector) -> Self {
        assert!(
            xi.iter().any(|&c| c != 0.0),
            "covector of a phase point must be nonzero"
        );
        PhasePoint { x, xi }
    }

    pub fn xi_vec(&self) -> Vector4<f64> {
        Vector4::from_column_slice(&self.xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalClass {
    TimelikeFuture,
    TimelikePast,
    NullFuture,
    NullPast,
    Spacelike,
    Zero,
}

/// Causal classification of a covector. Homogeneous of degree zero in xi;
/// time orientation is fixed by the chart's d/dt.
pub fn classify_covector(cache: &GeometryCache, xi: &Covector) -> CausalClass {
    let v = Vector4::from_column_slice(xi);
    if v == Vector4::zeros() {
        return CausalClass::Zero;
    }
    let s = (cache.g_inv * v).dot(&v);
    let scale = cache.g_inv.norm() * v.norm_squared();
    // the covector applied to the future timelike d/dt is just xi_0
    let future = xi[0] > 0.0;
    if s.abs() < 1e-9 * scale {
        if future {
            CausalClass::NullFuture
        } else {
            CausalClass::NullPast
        }
    } else if s > 0.0 {
        if future {
            CausalClass::TimelikeFuture
        } else {
            CausalClass::TimelikePast
        }
    } else {
        CausalClass::Spacelike
    }
}

/// Covector with frame components (1, n) for a unit spatial direction n:
/// future-pointing and null by construction.
pub fn null_covector_from_direction(cache: &GeometryCache, n: &[f64; 3]) -> Covector {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let frame = [1.0, n[0] / norm, n[1] / norm, n[2] / norm];
    let mut xi = [0.0; 4];
    for mu in 0..4 {
        for (a, fa) in frame.iter().enumerate() {
            xi[mu] += fa * cache.tetrad_inv[(a, mu)];
        }
    }
    xi
}

/// Deterministic quasi-uniform directions on the unit 2-sphere
/// (Fibonacci lattice).
pub fn sphere_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}
