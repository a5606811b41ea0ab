//! Bicharacteristic flow of the null cone Hamiltonian and the polarization
//! transport equations pulled along it.

use crate::geometry::{
    metric_at, Covector, GeometryError, MetricSpec, PhasePoint, Point,
};
use crate::ode::{integrate_adaptive, rk4_step, OdeError, OdePath};
use crate::spin::gamma_set_from_cache;
use crate::symbols::{poisson_ptilde_p, OperatorSpec, RptFactorization};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("initial covector is not null: |q| = {q:.3e} exceeds {bound:.3e}")]
    NotNull { q: f64, bound: f64 },
    #[error("null constraint drifted to {drift:.3e} (bound {bound:.3e})")]
    DriftExceeded { drift: f64, bound: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Hamilton equations of q(x, xi) = g^{mu nu} xi_mu xi_nu:
/// dx = 2 g^{-1} xi, dxi_mu = -d_mu g^{alpha beta} xi_alpha xi_beta.
/// Writes into `dy` and reports whether `y` is inside the chart domain.
fn hamilton_rhs(spec: &MetricSpec, y: &[f64], dy: &mut [f64]) -> bool {
    let x = [y[0], y[1], y[2], y[3]];
    if spec.check_domain(&x).is_err() {
        return false;
    }
    let g_inv = match spec.inverse_metric(&x) {
        Ok((m, _)) => m,
        Err(_) => return false,
    };
    let dg = spec.metric_deriv(&x);
    for mu in 0..4 {
        let mut v = 0.0;
        for nu in 0..4 {
            v += 2.0 * g_inv[(mu, nu)] * y[4 + nu];
        }
        dy[mu] = v;
    }
    for mu in 0..4 {
        // d_mu g^{ab} = -(g^{-1} d_mu g g^{-1})^{ab}
        let dginv = -g_inv * dg[mu] * g_inv;
        let mut v = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                v += dginv[(a, b)] * y[4 + a] * y[4 + b];
            }
        }
        dy[4 + mu] = -v;
    }
    true
}

/// Integrate the Hamiltonian flow from (x, xi) over [tau0, tau1], for any
/// (not necessarily null) covector.
pub fn integrate_hamiltonian(
    spec: &MetricSpec,
    x: &Point,
    xi: &Covector,
    tau0: f64,
    tau1: f64,
    rtol: f64,
    atol: f64,
) -> Result<OdePath, FlowError> {
    spec.check_domain(x)?;
    let y0 = [x[0], x[1], x[2], x[3], xi[0], xi[1], xi[2], xi[3]];
    let path = integrate_adaptive(
        |_t, y, dy| hamilton_rhs(spec, y, dy),
        &y0,
        tau0,
        tau1,
        rtol,
        atol,
        200_000,
    )?;
    Ok(path)
}

/// A null bicharacteristic sampled uniformly in the flow parameter, with
/// dense Hermite interpolation between the integrator's accepted steps.
#[derive(Clone)]
pub struct BicharStrip {
    pub spec: MetricSpec,
    pub taus: Vec<f64>,
    /// states[k] = (x, xi) at taus[k]
    pub states: Vec<[f64; 8]>,
    /// q = g^{mu nu} xi_mu xi_nu at each sample (the null drift diagnostic)
    pub q_values: Vec<f64>,
    pub xi0_norm_sq: f64,
    path: OdePath,
}

impl BicharStrip {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn point(&self, k: usize) -> PhasePoint {
        let s = &self.states[k];
        PhasePoint::new([s[0], s[1], s[2], s[3]], [s[4], s[5], s[6], s[7]])
    }

    /// Dense state (x, xi) at an arbitrary parameter value.
    pub fn state_at(&self, tau: f64) -> [f64; 8] {
        let mut out = [0.0; 8];
        self.path.sample(tau, &mut out);
        out
    }

    /// Coordinate velocity dx/dtau at an arbitrary parameter value.
    pub fn velocity_at(&self, tau: f64) -> [f64; 4] {
        let mut out = [0.0; 8];
        self.path.sample_deriv(tau, &mut out);
        [out[0], out[1], out[2], out[3]]
    }

    pub fn max_null_drift(&self) -> f64 {
        self.q_values.iter().fold(0.0, |m, q| m.max(q.abs()))
    }

    pub fn endpoint(&self) -> PhasePoint {
        self.point(self.len() - 1)
    }
}

const NULL_START_REL: f64 = 1e-10;
const NULL_DRIFT_REL: f64 = 1e-9;

/// Flow a null covector for parameter time `tau_end` (either sign) and
/// resample the result on `n_samples` uniform parameter values. Rejects
/// non-null starting data and integrations whose null constraint drifts.
pub fn integrate_bicharacteristic(
    spec: &MetricSpec,
    x: &Point,
    xi: &Covector,
    tau_end: f64,
    n_samples: usize,
) -> Result<BicharStrip, FlowError> {
    assert!(n_samples >= 2, "a strip needs at least two samples");
    let cache = metric_at(spec, x)?;
    let xiv = nalgebra::Vector4::from_column_slice(xi);
    let norm_sq = xiv.norm_squared();
    let q0 = (cache.g_inv * xiv).dot(&xiv);
    let bound0 = NULL_START_REL * cache.g_inv.norm() * norm_sq;
    if q0.abs() > bound0 {
        return Err(FlowError::NotNull {
            q: q0.abs(),
            bound: bound0,
        });
    }
    let path = integrate_hamiltonian(spec, x, xi, 0.0, tau_end, 2e-14, 1e-15)?;

    let mut taus = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples);
    let mut q_values = Vec::with_capacity(n_samples);
    let drift_bound = NULL_DRIFT_REL * norm_sq;
    for k in 0..n_samples {
        let tau = tau_end * k as f64 / (n_samples - 1) as f64;
        let mut s = [0.0; 8];
        path.sample(tau, &mut s);
        let xk = [s[0], s[1], s[2], s[3]];
        let g_inv = spec.inverse_metric(&xk)?.0;
        let mut q = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                q += g_inv[(mu, nu)] * s[4 + mu] * s[4 + nu];
            }
        }
        if q.abs() > drift_bound {
            return Err(FlowError::DriftExceeded {
                drift: q.abs(),
                bound: drift_bound,
            });
        }
        taus.push(tau);
        states.push(s);
        q_values.push(q);
    }
    Ok(BicharStrip {
        spec: spec.clone(),
        taus,
        states,
        q_values,
        xi0_norm_sq: norm_sq,
        path,
    })
}

/// Resample an already-integrated Hamiltonian path as a strip without
/// enforcing the null constraint. The q values are recorded as diagnostics
/// only; this is for transport along boundary-value solver output whose
/// constraint error sits at the solver tolerance rather than at the
/// integrator tolerance.
pub fn strip_from_path(
    spec: &MetricSpec,
    path: &OdePath,
    n_samples: usize,
) -> Result<BicharStrip, GeometryError> {
    assert!(n_samples >= 2, "a strip needs at least two samples");
    let t0 = *path.ts.first().expect("path has samples");
    let t1 = *path.ts.last().expect("path has samples");
    let mut taus = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples);
    let mut q_values = Vec::with_capacity(n_samples);
    let mut xi0_norm_sq = 0.0;
    for k in 0..n_samples {
        let tau = t0 + (t1 - t0) * k as f64 / (n_samples - 1) as f64;
        let mut s = [0.0; 8];
        path.sample(tau, &mut s);
        let xk = [s[0], s[1], s[2], s[3]];
        let g_inv = spec.inverse_metric(&xk)?.0;
        let mut q = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                q += g_inv[(mu, nu)] * s[4 + mu] * s[4 + nu];
            }
        }
        if k == 0 {
            xi0_norm_sq = s[4..].iter().map(|v| v * v).sum();
        }
        taus.push(tau);
        states.push(s);
        q_values.push(q);
    }
    Ok(BicharStrip {
        spec: spec.clone(),
        taus,
        states,
        q_values,
        xi0_norm_sq,
        path: path.clone(),
    })
}

/// How a fibre matrix is dragged along the strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportMode {
    /// dw^nu/dtau = -Gamma^nu_{rho mu} dx^rho w^mu on each column
    LeviCivita,
    /// dw/dtau + sigma(dx) w = 0
    Spinor,
    /// dw/dtau - w sigma(dx) = 0 (rows are cospinors)
    Cospinor,
    /// dw/dtau + sigma(dx) w - w sigma(dx) = 0
    BispinorBoth,
    /// dw/dtau - w sigma(dx) = 0 on a square fibre matrix
    BispinorRightOnly,
}

/// A strip with a fibre matrix attached at every sample.
#[derive(Clone)]
pub struct PolarizedStrip {
    pub strip: BicharStrip,
    pub fibre: Vec<DMatrix<Complex64>>,
}

fn pack(w: &DMatrix<Complex64>, out: &mut [f64]) {
    for (k, v) in w.iter().enumerate() {
        out[2 * k] = v.re;
        out[2 * k + 1] = v.im;
    }
}

fn unpack(buf: &[f64], rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |i, j| {
        let k = j * rows + i; // column-major, matching DMatrix::iter
        c(buf[2 * k], buf[2 * k + 1])
    })
}

/// Transport `w0` along the strip under `mode`, with the connection
/// coefficients evaluated exactly at the RK4 stage points. Returns fibres at
/// the strip's own samples.
pub fn transport(
    strip: &BicharStrip,
    w0: &DMatrix<Complex64>,
    mode: TransportMode,
) -> Result<PolarizedStrip, FlowError> {
    let (rows, cols) = w0.shape();
    match mode {
        TransportMode::LeviCivita | TransportMode::Spinor => assert_eq!(rows, 4),
        TransportMode::Cospinor => assert_eq!(cols, 4),
        TransportMode::BispinorBoth | TransportMode::BispinorRightOnly => {
            assert_eq!((rows, cols), (4, 4))
        }
    }
    let spec = &strip.spec;
    // the driving term: dw as a function of (tau, w)
    let mut rhs = |tau: f64, buf: &[f64], dbuf: &mut [f64]| {
        let s = strip.state_at(tau);
        let x = [s[0], s[1], s[2], s[3]];
        let v = strip.velocity_at(tau);
        let w = unpack(buf, rows, cols);
        let dw: DMatrix<Complex64> = match mode {
            TransportMode::LeviCivita => {
                let gamma = spec.christoffel(&x).expect("strip leaves domain");
                let mut a = DMatrix::<Complex64>::zeros(4, 4);
                for nu in 0..4 {
                    for mu in 0..4 {
                        let mut g = 0.0;
                        for rho in 0..4 {
                            g += gamma[nu][(rho, mu)] * v[rho];
                        }
                        a[(nu, mu)] = c(-g, 0.0);
                    }
                }
                a * &w
            }
            _ => {
                let cache = metric_at(spec, &x).expect("strip leaves domain");
                let gs = gamma_set_from_cache(spec, &cache).expect("strip leaves domain");
                let sig = gs.sigma_contract(&v);
                let sig = DMatrix::from_fn(4, 4, |i, j| sig[(i, j)]);
                match mode {
                    TransportMode::Spinor => -&sig * &w,
                    TransportMode::Cospinor | TransportMode::BispinorRightOnly => &w * &sig,
                    TransportMode::BispinorBoth => &w * &sig - &sig * &w,
                    TransportMode::LeviCivita => unreachable!(),
                }
            }
        };
        pack(&dw, dbuf);
    };

    let mut buf = vec![0.0; 2 * rows * cols];
    pack(w0, &mut buf);
    let mut fibre = Vec::with_capacity(strip.len());
    fibre.push(w0.clone());
    let substeps = 8usize;
    for k in 1..strip.len() {
        let t0 = strip.taus[k - 1];
        let h = (strip.taus[k] - t0) / substeps as f64;
        for s in 0..substeps {
            rk4_step(&mut rhs, t0 + h * s as f64, &mut buf, h);
        }
        fibre.push(unpack(&buf, rows, cols));
    }
    Ok(PolarizedStrip {
        strip: strip.clone(),
        fibre,
    })
}

/// Dencker's transport derivative at the interior samples of a polarized
/// strip:
/// D w = s(x) dw/dtau + (1/2) {ptilde, p} w + i ptilde p^s w,
/// with dw/dtau by centered differences on the strip's uniform samples.
/// Entry k of the result corresponds to strip sample k+1.
pub fn dencker_derivative(
    fact: &RptFactorization,
    op: &OperatorSpec,
    pol: &PolarizedStrip,
) -> Result<Vec<DMatrix<Complex64>>, FlowError> {
    let n = pol.strip.len();
    assert!(n >= 3, "need at least one interior sample");
    let mut out = Vec::with_capacity(n - 2);
    for k in 1..(n - 1) {
        let dtau = pol.strip.taus[k + 1] - pol.strip.taus[k - 1];
        let dw = (&pol.fibre[k + 1] - &pol.fibre[k - 1]) / c(dtau, 0.0);
        let s = &pol.strip.states[k];
        let x = [s[0], s[1], s[2], s[3]];
        let xi = [s[4], s[5], s[6], s[7]];
        let scale = fact.strip_scale(&x);
        let bracket = poisson_ptilde_p(fact, op, &x, &xi)?;
        let pt = fact.ptilde(&x, &xi)?;
        let ps = op.subprincipal(&x, &xi);
        let d = dw * c(scale, 0.0) + bracket * c(0.5, 0.0) * &pol.fibre[k]
            + pt * ps * c(0.0, 1.0) * &pol.fibre[k];
        out.push(d);
    }
    Ok(out)
}

/// How `hamilton_orbit` realizes the transport.
pub enum OrbitMode {
    /// a geometric connection known to solve the transport exactly
    Geometric(TransportMode),
    /// integrate D w = 0 directly as an ODE in the strip parameter
    Generic,
}

/// Propagate a fibre matrix along the strip so that Dencker's derivative
/// vanishes: either through the matching geometric connection or by direct
/// integration of dw/dtau = -(1/s)((1/2){ptilde,p} + i ptilde p^s) w.
pub fn hamilton_orbit(
    fact: &RptFactorization,
    op: &OperatorSpec,
    strip: &BicharStrip,
    w0: &DMatrix<Complex64>,
    mode: OrbitMode,
) -> Result<PolarizedStrip, FlowError> {
    match mode {
        OrbitMode::Geometric(tm) => transport(strip, w0, tm),
        OrbitMode::Generic => {
            let (rows, cols) = w0.shape();
            let mut rhs = |tau: f64, buf: &[f64], dbuf: &mut [f64]| {
                let s = strip.state_at(tau);
                let x = [s[0], s[1], s[2], s[3]];
                let xi = [s[4], s[5], s[6], s[7]];
                let w = unpack(buf, rows, cols);
                let scale = fact.strip_scale(&x);
                let bracket = poisson_ptilde_p(fact, op, &x, &xi).expect("strip leaves domain");
                let pt = fact.ptilde(&x, &xi).expect("strip leaves domain");
                let ps = op.subprincipal(&x, &xi);
                let gen = (bracket * c(0.5, 0.0) + pt * ps * c(0.0, 1.0)) * c(-1.0 / scale, 0.0);
                pack(&(gen * &w), dbuf);
            };
            let mut buf = vec![0.0; 2 * rows * cols];
            pack(w0, &mut buf);
            let mut fibre = Vec::with_capacity(strip.len());
            fibre.push(w0.clone());
            let substeps = 8usize;
            for k in 1..strip.len() {
                let t0 = strip.taus[k - 1];
                let h = (strip.taus[k] - t0) / substeps as f64;
                for s in 0..substeps {
                    rk4_step(&mut rhs, t0 + h * s as f64, &mut buf, h);
                }
                fibre.push(unpack(&buf, rows, cols));
            }
            Ok(PolarizedStrip {
                strip: strip.clone(),
                fibre,
            })
        }
    }
}
