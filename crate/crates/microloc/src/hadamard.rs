//! Flat-space two-point functions and curved-space singularity predictors:
//! the null-geodesic equivalence relation, wave-front and polarization
//! predictions for Hadamard and Feynman two-point functions, the vacuum
//! momentum-space support data, and regularized example samplers for the
//! numerical detector.
//!
//! Sign conventions. Fourier transforms pair with exp(-i x.xi) (component
//! pairing), under which the boundary value of 1/(x + i eps) is singular on
//! the positive half-line. Consistency with the vacuum momentum support
//! theta(xi_0) then forces the two-point function to be the boundary value
//! from below in the time difference: sigma_eps = (x-y)^2 + i eps (x0-y0)
//! - eps^2, equivalently positive frequencies exp(+i omega (x0-y0)) in the
//! mode integral. At spacelike separation with (x-y)^2 = -1 the massless
//! value is +1/(4 pi^2).

use crate::flow::{self, TransportMode};
use crate::geometry::{
    classify_covector, geodesic_connect, metric_at, null_covector_from_direction,
    sphere_directions, Covector, GeodesicConnection, GeometryError, MetricSpec, PhasePoint, Point,
};
use crate::spin::{self, CMat4};
use crate::wfdetect::{DetectError, GridSample, TwoPointSample};
use nalgebra::Vector4;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// angular tolerance for projective ray comparisons
pub const RAY_ANGLE_TOL: f64 = 1e-6;
/// number of null directions used to discretize diagonal cone families
pub const DIAGONAL_DIRECTIONS: usize = 64;
const FOUR_PI_SQ: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

/// One element of a predicted wave front set over M x M, stored in the
/// (xi, -eta) sign convention: `eta` is the negated transport of `xi`, with
/// the raw transported covector kept alongside. Causal directions are
/// normalized so the raised time component of xi is +-1.
#[derive(Clone, Debug)]
pub struct WFElement {
    pub x: Point,
    pub y: Point,
    pub xi: Covector,
    /// second-slot covector in the stored sign convention (-eta_raw)
    pub eta: Covector,
    /// parallel transport of xi at y
    pub eta_raw: Covector,
    /// xi lies in the closed forward cone at x
    pub frequency_flag: bool,
    pub diagonal: bool,
}

/// A wave front element with a bispinor fibre ray attached.
#[derive(Clone, Debug)]
pub struct PolElement {
    pub wf: WFElement,
    /// nonzero 4x4 fibre, compared projectively
    pub fibre: CMat4,
}

fn ray_normalize(v: &Covector) -> Option<[f64; 4]> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n == 0.0 {
        return None;
    }
    Some([v[0] / n, v[1] / n, v[2] / n, v[3] / n])
}

/// true iff b is a positive multiple of a, within `tol` on unit vectors
pub fn same_ray(a: &Covector, b: &Covector, tol: f64) -> bool {
    match (ray_normalize(a), ray_normalize(b)) {
        (Some(na), Some(nb)) => {
            let d: f64 = (0..4).map(|i| (na[i] - nb[i]).powi(2)).sum::<f64>().sqrt();
            d <= tol
        }
        _ => false,
    }
}

fn points_coincide(x: &Point, y: &Point) -> bool {
    let scale = 1.0 + x.iter().chain(y.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    (0..4).all(|i| (x[i] - y[i]).abs() < 1e-9 * scale)
}

fn raised_time(spec: &MetricSpec, x: &Point, xi: &Covector) -> Result<f64, GeometryError> {
    let g_inv = spec.inverse_metric(x)?.0;
    let v = g_inv * Vector4::from_column_slice(xi);
    Ok(v[0])
}

/// The null-geodesic equivalence relation between phase points: related iff
/// a null geodesic connects the base points with `a.xi` tangent at one end
/// and `b.xi` its parallel transport at the other (rays, not vectors). On
/// the diagonal: xi null and equal to eta as rays. Solver non-convergence
/// propagates as an error, distinct from an established `false`.
pub fn equivalence_related(
    spec: &MetricSpec,
    a: &PhasePoint,
    b: &PhasePoint,
) -> Result<bool, GeometryError> {
    assert!(a.xi.iter().any(|v| *v != 0.0), "zero covector");
    assert!(b.xi.iter().any(|v| *v != 0.0), "zero covector");
    if points_coincide(&a.x, &b.x) {
        let cache = metric_at(spec, &a.x)?;
        let null = matches!(
            classify_covector(&cache, &a.xi),
            crate::geometry::CausalClass::NullFuture | crate::geometry::CausalClass::NullPast
        );
        return Ok(null && same_ray(&a.xi, &b.xi, RAY_ANGLE_TOL));
    }
    let conn = match geodesic_connect(spec, &a.x, &b.x)? {
        Some(conn) => conn,
        None => return Ok(false),
    };
    let fwd = same_ray(&a.xi, &conn.launch_xi, RAY_ANGLE_TOL)
        && same_ray(&b.xi, &conn.arrival_xi, RAY_ANGLE_TOL);
    let neg_launch = [-conn.launch_xi[0], -conn.launch_xi[1], -conn.launch_xi[2], -conn.launch_xi[3]];
    let neg_arrival = [-conn.arrival_xi[0], -conn.arrival_xi[1], -conn.arrival_xi[2], -conn.arrival_xi[3]];
    let bwd = same_ray(&a.xi, &neg_launch, RAY_ANGLE_TOL) && same_ray(&b.xi, &neg_arrival, RAY_ANGLE_TOL);
    Ok(fwd || bwd)
}

fn scaled(v: &Covector, s: f64) -> Covector {
    [v[0] * s, v[1] * s, v[2] * s, v[3] * s]
}

fn diagonal_cone_elements(spec: &MetricSpec, x: &Point) -> Result<Vec<WFElement>, GeometryError> {
    let cache = metric_at(spec, x)?;
    let mut out = Vec::with_capacity(DIAGONAL_DIRECTIONS);
    for n in sphere_directions(DIAGONAL_DIRECTIONS) {
        let xi0 = null_covector_from_direction(&cache, &n);
        let r0 = (cache.g_inv * Vector4::from_column_slice(&xi0))[0];
        let xi = scaled(&xi0, 1.0 / r0);
        out.push(WFElement {
            x: *x,
            y: *x,
            xi,
            eta: scaled(&xi, -1.0),
            eta_raw: xi,
            frequency_flag: true,
            diagonal: true,
        });
    }
    Ok(out)
}

/// Wave front prediction for a Hadamard two-point function: empty at
/// spacelike separation, the future-pointing connecting ray for null-related
/// pairs, and the discretized future null cone on the diagonal.
pub fn predict_wf_hadamard_scalar(
    spec: &MetricSpec,
    x: &Point,
    y: &Point,
) -> Result<Vec<WFElement>, GeometryError> {
    if points_coincide(x, y) {
        return diagonal_cone_elements(spec, x);
    }
    let conn = match geodesic_connect(spec, x, y)? {
        Some(conn) => conn,
        None => return Ok(Vec::new()),
    };
    Ok(vec![WFElement {
        x: *x,
        y: *y,
        xi: conn.launch_xi_future,
        eta: scaled(&conn.arrival_xi_future, -1.0),
        eta_raw: conn.arrival_xi_future,
        frequency_flag: true,
        diagonal: false,
    }])
}

/// Second-slot spin transport along a connection: drag a 4x4 fibre by the
/// inverse spinor propagator acting on the right index only.
fn transport_fibre_along(
    spec: &MetricSpec,
    conn: &GeodesicConnection,
    w0: &CMat4,
) -> Result<CMat4, GeometryError> {
    let strip = flow::strip_from_path(spec, &conn.path, 65)?;
    let w0_dyn = nalgebra::DMatrix::from_fn(4, 4, |i, j| w0[(i, j)]);
    let pol = flow::transport(&strip, &w0_dyn, TransportMode::BispinorRightOnly)
        .map_err(|e| match e {
            flow::FlowError::Geometry(g) => g,
            _ => GeometryError::SolverDiverged,
        })?;
    let end = pol.fibre.last().expect("transport produced samples");
    Ok(CMat4::from_fn(|i, j| end[(i, j)]))
}

/// Polarization prediction for the Dirac two-point function: every scalar
/// wave front element carries the fibre ray slash(xi) at x, dragged to the
/// second slot by the inverse spinor propagator. Diagonal elements carry
/// slash(xi) itself.
pub fn predict_pol_dirac(
    spec: &MetricSpec,
    x: &Point,
    y: &Point,
) -> Result<Vec<PolElement>, GeometryError> {
    let gs = spin::gamma_set_at(spec, x)?;
    if points_coincide(x, y) {
        let els = diagonal_cone_elements(spec, x)?;
        return Ok(els
            .into_iter()
            .map(|wf| {
                let fibre = gs.slash(&wf.xi);
                PolElement { wf, fibre }
            })
            .collect());
    }
    let conn = match geodesic_connect(spec, x, y)? {
        Some(conn) => conn,
        None => return Ok(Vec::new()),
    };
    let wf = WFElement {
        x: *x,
        y: *y,
        xi: conn.launch_xi_future,
        eta: scaled(&conn.arrival_xi_future, -1.0),
        eta_raw: conn.arrival_xi_future,
        frequency_flag: true,
        diagonal: false,
    };
    let fibre = transport_fibre_along(spec, &conn, &gs.slash(&wf.xi))?;
    Ok(vec![PolElement { wf, fibre }])
}

/// Radial mode integrals of the flat vacuum two-point function at time
/// difference t >= 0 and spatial separation r >= 0: returns (W, dW/dt,
/// dW/dr). Gauss-Legendre panels sized to the oscillation period, upper
/// cutoff set by the exp(-eps omega) damping.
fn radial_mode_integrals(mass: f64, t: f64, r: f64, eps: f64) -> (Complex64, Complex64, Complex64) {
    // 10-point Gauss-Legendre nodes/weights on [-1, 1]
    const GL_X: [f64; 5] = [
        0.148874338981631,
        0.433395394129247,
        0.679409568299024,
        0.865063366688985,
        0.973906528517172,
    ];
    const GL_W: [f64; 5] = [
        0.295524224714753,
        0.269266719309996,
        0.219086362515982,
        0.149451349150581,
        0.066671344308688,
    ];
    let k_max = 36.0 / eps + 10.0 * mass;
    let panel = std::f64::consts::PI / (r + t + mass + 1.0);
    let n_panels = (k_max / panel).ceil() as usize;
    let small_r = r < 1e-8;
    let mut w = c(0.0, 0.0);
    let mut wt = c(0.0, 0.0);
    let mut wr = c(0.0, 0.0);
    let mut eval = |k: f64, weight: f64| {
        let om = (k * k + mass * mass).sqrt();
        let damp = (-eps * om).exp() / om;
        let phase = Complex64::from_polar(1.0, om * t);
        let f = phase * (damp * weight);
        if small_r {
            // sin(kr)/r -> k, d/dr [sin(kr)/r] -> 0 at r = 0
            w += f * (k * k);
            wt += f * c(0.0, om * k * k);
        } else {
            let (skr, ckr) = (k * r).sin_cos();
            w += f * (k * skr / r);
            wt += f * c(0.0, om * k * skr / r);
            wr += f * (k * (k * r * ckr - skr) / (r * r));
        }
    };
    for p in 0..n_panels {
        let a = panel * p as f64;
        let half = 0.5 * panel;
        let mid = a + half;
        for i in 0..5 {
            eval(mid - half * GL_X[i], half * GL_W[i]);
            eval(mid + half * GL_X[i], half * GL_W[i]);
        }
    }
    let norm = 1.0 / FOUR_PI_SQ;
    (w * norm, wt * norm, wr * norm)
}

/// Massive evaluation with the time-reflection symmetry W(-t) = conj W(t)
/// applied so the quadrature only runs for t >= 0.
fn massive_scalar(mass: f64, t: f64, r: f64, eps: f64) -> (Complex64, Complex64, Complex64) {
    if t >= 0.0 {
        radial_mode_integrals(mass, t, r, eps)
    } else {
        let (w, wt, wr) = radial_mode_integrals(mass, -t, r, eps);
        (w.conj(), -wt.conj(), wr.conj())
    }
}

fn split_t_r(x: &Point, y: &Point) -> (f64, f64) {
    let t = x[0] - y[0];
    let r = ((x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2) + (x[3] - y[3]).powi(2)).sqrt();
    (t, r)
}

fn sigma_eps(x: &Point, y: &Point, eps: f64) -> Complex64 {
    let (t, r) = split_t_r(x, y);
    c(t * t - r * r - eps * eps, eps * t)
}

/// Flat vacuum two-point function of the Klein-Gordon field. Massless case
/// in closed form as 1/(4 pi^2 (-sigma_eps)); massive case by the radial
/// mode integral with exp(-eps omega) damping.
pub fn eval_minkowski_scalar(mass: f64, x: &Point, y: &Point, eps: f64) -> Complex64 {
    assert!(eps > 0.0, "the regulator must be positive");
    if mass == 0.0 {
        return c(1.0 / FOUR_PI_SQ, 0.0) / (-sigma_eps(x, y, eps));
    }
    let (t, r) = split_t_r(x, y);
    massive_scalar(mass, t, r, eps).0
}

/// Flat Dirac two-point function (i gamma d + m applied in x to the scalar
/// one, times the unit bispinor matrix). The derivative is analytic: for the
/// massless case from the closed form, for the massive case from the mode
/// integral differentiated under the integral sign.
pub fn eval_minkowski_dirac(mass: f64, x: &Point, y: &Point, eps: f64) -> CMat4 {
    assert!(eps > 0.0, "the regulator must be positive");
    let (t, r) = split_t_r(x, y);
    let (lam, dlam) = if mass == 0.0 {
        let s = sigma_eps(x, y, eps);
        let lam = c(1.0 / FOUR_PI_SQ, 0.0) / (-s);
        // d sigma_eps / d x^mu = 2 (eta dx)_mu + i eps delta_mu0
        let mut ds = [c(0.0, 0.0); 4];
        ds[0] = c(2.0 * (x[0] - y[0]), eps);
        for i in 1..4 {
            ds[i] = c(-2.0 * (x[i] - y[i]), 0.0);
        }
        let mut dl = [c(0.0, 0.0); 4];
        for mu in 0..4 {
            dl[mu] = c(1.0 / FOUR_PI_SQ, 0.0) * ds[mu] / (s * s);
        }
        (lam, dl)
    } else {
        let (w, wt, wr) = massive_scalar(mass, t, r, eps);
        let mut dl = [c(0.0, 0.0); 4];
        dl[0] = wt;
        if r > 1e-12 {
            for i in 0..3 {
                dl[i + 1] = wr * ((x[i + 1] - y[i + 1]) / r);
            }
        }
        (w, dl)
    };
    let gam = spin::flat_gammas();
    let mut out = CMat4::identity() * (lam * mass);
    for mu in 0..4 {
        out += gam[mu] * (c(0.0, 1.0) * dlam[mu]);
    }
    out
}

/// Momentum-space support data of the flat vacuum two-point function:
/// delta(xi + eta) theta(xi_0) delta(xi^2 - m^2), plus the mass-shell
/// measure weight 1/(2 omega).
#[derive(Clone, Copy, Debug)]
pub struct VacuumSupport {
    pub momentum_conserving: bool,
    pub positive_frequency: bool,
    pub on_shell: bool,
    /// 1 / (2 sqrt(|spatial xi|^2 + m^2))
    pub weight: f64,
}

impl VacuumSupport {
    pub fn on_support(&self) -> bool {
        self.momentum_conserving && self.positive_frequency && self.on_shell
    }
}

pub fn fourier_vacuum_scalar(mass: f64, xi: &Covector, eta: &Covector) -> VacuumSupport {
    let norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sum: f64 = (0..4)
        .map(|i| (xi[i] + eta[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    let spatial_sq: f64 = xi[1..].iter().map(|v| v * v).sum();
    let lorentz_sq = xi[0] * xi[0] - spatial_sq;
    VacuumSupport {
        momentum_conserving: sum <= 1e-9 * (norm + 1.0),
        positive_frequency: xi[0] > 0.0,
        on_shell: (lorentz_sq - mass * mass).abs() <= 1e-9 * (norm * norm + mass * mass),
        weight: 1.0 / (2.0 * (spatial_sq + mass * mass).sqrt()),
    }
}

/// Wave front prediction for a Feynman two-point function: the frequency
/// sign is tied to the causal order (xi past-pointing at x when y lies in
/// the future of x), and the diagonal contributes every nonzero direction,
/// not only the null cone.
pub fn predict_wf_feynman(
    spec: &MetricSpec,
    x: &Point,
    y: &Point,
) -> Result<Vec<WFElement>, GeometryError> {
    if points_coincide(x, y) {
        return feynman_diagonal_grid(spec, x, 2 * DIAGONAL_DIRECTIONS);
    }
    let conn = match geodesic_connect(spec, x, y)? {
        Some(conn) => conn,
        None => return Ok(Vec::new()),
    };
    // raw launch orientation tells the causal order: a future launch means
    // the geodesic runs from x forward to y
    let v0 = raised_time(spec, x, &conn.launch_xi)?;
    let flip = if v0 > 0.0 { -1.0 } else { 1.0 };
    let xi = scaled(&conn.launch_xi_future, flip);
    let eta_raw = scaled(&conn.arrival_xi_future, flip);
    let cache = metric_at(spec, x)?;
    let frequency_flag = matches!(
        classify_covector(&cache, &xi),
        crate::geometry::CausalClass::NullFuture | crate::geometry::CausalClass::TimelikeFuture
    );
    Ok(vec![WFElement {
        x: *x,
        y: *y,
        xi,
        eta: scaled(&eta_raw, -1.0),
        eta_raw,
        frequency_flag,
        diagonal: false,
    }])
}

/// Diagonal Feynman family of configurable size: `count` covector
/// directions on the unit 3-sphere of directions, symmetric under
/// xi -> -xi by construction (count/2 spiral points plus their antipodes).
pub fn feynman_diagonal_grid(
    spec: &MetricSpec,
    x: &Point,
    count: usize,
) -> Result<Vec<WFElement>, GeometryError> {
    assert!(count >= 2, "the direction grid needs at least one antipodal pair");
    let cache = metric_at(spec, x)?;
    let m = count / 2;
    let spatial = sphere_directions(m);
    let mut dirs: Vec<Covector> = Vec::with_capacity(2 * m);
    for (i, n) in spatial.iter().enumerate() {
        // polar spiral: time component sweeps (0, 1) while the spatial
        // direction walks the sphere lattice
        let chi = std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / m as f64;
        let (s, c_a) = chi.sin_cos();
        dirs.push([c_a, s * n[0], s * n[1], s * n[2]]);
    }
    let full: Vec<Covector> = dirs
        .iter()
        .cloned()
        .chain(dirs.iter().map(|d| scaled(d, -1.0)))
        .collect();
    Ok(full
        .into_iter()
        .map(|xi| {
            let frequency_flag = matches!(
                classify_covector(&cache, &xi),
                crate::geometry::CausalClass::NullFuture
                    | crate::geometry::CausalClass::TimelikeFuture
            );
            WFElement {
                x: *x,
                y: *x,
                xi,
                eta: scaled(&xi, -1.0),
                eta_raw: xi,
                frequency_flag,
                diagonal: true,
            }
        })
        .collect())
}

/// Product admissibility of two wave front sets over M x M: inadmissible iff
/// elements over the same base pair have joint directions (xi, eta) summing
/// to zero within the angular tolerance. Returns the offending index pairs.
pub fn product_admissible(wf_a: &[WFElement], wf_b: &[WFElement]) -> (bool, Vec<(usize, usize)>) {
    let mut offending = Vec::new();
    for (i, a) in wf_a.iter().enumerate() {
        for (j, b) in wf_b.iter().enumerate() {
            if !(points_coincide(&a.x, &b.x) && points_coincide(&a.y, &b.y)) {
                continue;
            }
            let ja = joint_direction(a);
            let jb = joint_direction(b);
            let d: f64 = (0..8).map(|k| (ja[k] + jb[k]).powi(2)).sum::<f64>().sqrt();
            if d <= RAY_ANGLE_TOL {
                offending.push((i, j));
            }
        }
    }
    (offending.is_empty(), offending)
}

fn joint_direction(e: &WFElement) -> [f64; 8] {
    let mut v = [0.0; 8];
    v[..4].copy_from_slice(&e.xi);
    v[4..].copy_from_slice(&e.eta);
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= n;
    }
    v
}

/// The regularized model distributions used by the detector examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    /// narrow Gaussian of width eps, normalized to unit mass
    Delta,
    /// boundary value 1/(x + i eps)
    OneOverXPlusIEps,
    /// two components (v, v'') with v the regularized delta
    VLaplacianV,
    /// gradient of a 2-d narrow Gaussian, two components
    GradDelta2d,
    /// smooth control: exp(-x^2/2), no regularization scale
    SmoothGaussian,
}

/// Uniform grid samples of the model distributions on [-halfwidth,
/// halfwidth]^d. Requires at least 8 samples per regularization width.
pub fn sample_examples(
    kind: SampleKind,
    halfwidth: f64,
    spacing: f64,
    eps: f64,
) -> Result<GridSample, DetectError> {
    if eps > 0.0 && spacing > eps / 8.0 + 1e-15 {
        return Err(DetectError::GridTooCoarse(format!(
            "spacing {} exceeds eps/8 = {}",
            spacing,
            eps / 8.0
        )));
    }
    let n = (2.0 * halfwidth / spacing).round() as usize + 1;
    let origin_1d = [-halfwidth];
    let origin_2d = [-halfwidth, -halfwidth];
    let sample = match kind {
        SampleKind::Delta => GridSample::from_fn(&origin_1d, spacing, &[n], eps, 1, |x| {
            vec![c(gauss_delta(x[0], eps), 0.0)]
        }),
        SampleKind::OneOverXPlusIEps => {
            GridSample::from_fn(&origin_1d, spacing, &[n], eps, 1, |x| {
                vec![c(1.0, 0.0) / c(x[0], eps)]
            })
        }
        SampleKind::VLaplacianV => GridSample::from_fn(&origin_1d, spacing, &[n], eps, 2, |x| {
            let v = gauss_delta(x[0], eps);
            let vpp = v * (x[0] * x[0] - eps * eps) / (eps * eps * eps * eps);
            vec![c(v, 0.0), c(vpp, 0.0)]
        }),
        SampleKind::GradDelta2d => GridSample::from_fn(&origin_2d, spacing, &[n, n], eps, 2, |x| {
            let g = (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * eps * eps)).exp()
                / (2.0 * std::f64::consts::PI * eps * eps);
            vec![
                c(-x[0] / (eps * eps) * g, 0.0),
                c(-x[1] / (eps * eps) * g, 0.0),
            ]
        }),
        SampleKind::SmoothGaussian => GridSample::from_fn(&origin_1d, spacing, &[n], eps, 1, |x| {
            vec![c((-0.5 * x[0] * x[0]).exp(), 0.0)]
        }),
    };
    Ok(sample)
}

fn gauss_delta(x: f64, eps: f64) -> f64 {
    (-x * x / (2.0 * eps * eps)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * eps)
}

/// 2-d slice of the flat two-point function through a base pair: the grid
/// covers (s, s') in [-halfwidth, halfwidth]^2 with x = x_base + s x_dir and
/// y = y_base + s' y_dir.
pub fn sample_minkowski_slice(
    mass: f64,
    x_base: &Point,
    x_dir: &[f64; 4],
    y_base: &Point,
    y_dir: &[f64; 4],
    halfwidth: f64,
    spacing: f64,
    eps: f64,
) -> Result<TwoPointSample, DetectError> {
    if spacing > eps / 4.0 + 1e-15 {
        return Err(DetectError::GridTooCoarse(format!(
            "spacing {} exceeds eps/4 = {}",
            spacing,
            eps / 4.0
        )));
    }
    let n = (2.0 * halfwidth / spacing).round() as usize + 1;
    let origin = [-halfwidth, -halfwidth];
    let grid = GridSample::from_fn(&origin, spacing, &[n, n], eps, 1, |s| {
        let mut x = *x_base;
        let mut y = *y_base;
        for mu in 0..4 {
            x[mu] += s[0] * x_dir[mu];
            y[mu] += s[1] * y_dir[mu];
        }
        vec![eval_minkowski_scalar(mass, &x, &y, eps)]
    });
    Ok(TwoPointSample {
        grid,
        x_base: *x_base,
        x_dir: *x_dir,
        y_base: *y_base,
        y_dir: *y_dir,
    })
}
