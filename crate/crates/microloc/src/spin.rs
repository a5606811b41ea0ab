//! Dirac algebra on curved backgrounds: tetrad gammas, spin connection,
//! the squared Dirac operator identity, and decomposition of 4x4 fibre
//! matrices over the standard bispinor basis.

use crate::geometry::{metric_at, Covector, GeometryCache, GeometryError, MetricSpec, Point, ETA};
use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;

pub type CMat4 = Matrix4<Complex64>;
pub type CVec4 = Vector4<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Flat gamma matrices in the Dirac basis, signature (+,-,-,-):
/// {gamma^a, gamma^b} = 2 eta^{ab}.
pub fn flat_gammas() -> [CMat4; 4] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let g0 = CMat4::from_diagonal(&CVec4::new(one, one, -one, -one));
    let g1 = CMat4::new(
        z, z, z, one, //
        z, z, one, z, //
        z, -one, z, z, //
        -one, z, z, z,
    );
    let g2 = CMat4::new(
        z, z, z, -i, //
        z, z, i, z, //
        z, i, z, z, //
        -i, z, z, z,
    );
    let g3 = CMat4::new(
        z, z, one, z, //
        z, z, z, -one, //
        -one, z, z, z, //
        z, one, z, z,
    );
    [g0, g1, g2, g3]
}

/// gamma^5 = i gamma^0 gamma^1 gamma^2 gamma^3.
pub fn gamma5(flat: &[CMat4; 4]) -> CMat4 {
    (flat[0] * flat[1] * flat[2] * flat[3]) * c(0.0, 1.0)
}

/// Coordinate gamma matrices and spin connection coefficients at a point.
pub struct GammaSet {
    pub point: Point,
    /// curved gamma^mu = e^mu_a gamma^a
    pub gamma: [CMat4; 4],
    pub gamma_flat: [CMat4; 4],
    /// sigma_mu = (1/4) omega_{mu a b} gamma^a gamma^b
    pub sigma: [CMat4; 4],
}

impl GammaSet {
    /// xi-slash = gamma^mu xi_mu.
    pub fn slash(&self, xi: &Covector) -> CMat4 {
        let mut m = CMat4::zeros();
        for mu in 0..4 {
            m += self.gamma[mu] * c(xi[mu], 0.0);
        }
        m
    }

    /// sigma(v) = v^mu sigma_mu for a coordinate vector v.
    pub fn sigma_contract(&self, v: &[f64; 4]) -> CMat4 {
        let mut m = CMat4::zeros();
        for mu in 0..4 {
            m += self.sigma[mu] * c(v[mu], 0.0);
        }
        m
    }
}

/// Spin connection coefficients omega_{mu a b} =
/// eta_{ac} e^c_nu (d_mu e^nu_b + Gamma^nu_{mu lam} e^lam_b), with the
/// tetrad derivative taken by central differences.
fn spin_connection(spec: &MetricSpec, cache: &GeometryCache) -> Result<[CMat4; 4], GeometryError> {
    let flat = flat_gammas();
    let x = cache.point;
    let mut de = [[Vector4::zeros(); 4]; 4]; // de[mu][b] = d_mu e^._b
    for mu in 0..4 {
        let h = 1e-6 * x[mu].abs().max(1.0);
        let mut xp = x;
        xp[mu] += h;
        let mut xm = x;
        xm[mu] -= h;
        let (ep, _) = spec.tetrad(&xp)?;
        let (em, _) = spec.tetrad(&xm)?;
        for b in 0..4 {
            de[mu][b] = (ep.column(b) - em.column(b)) / (2.0 * h);
        }
    }
    let mut sigma = [CMat4::zeros(); 4];
    for mu in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                // omega_{mu a b}
                let mut cov = de[mu][b];
                for nu in 0..4 {
                    let mut acc = 0.0;
                    for lam in 0..4 {
                        acc += cache.christoffel[nu][(mu, lam)] * cache.tetrad[(lam, b)];
                    }
                    cov[nu] += acc;
                }
                let mut omega = 0.0;
                for nu in 0..4 {
                    omega += ETA[a] * cache.tetrad_inv[(a, nu)] * cov[nu];
                }
                sigma[mu] += flat[a] * flat[b] * c(0.25 * omega, 0.0);
            }
        }
    }
    Ok(sigma)
}

/// Assemble the curved gammas and spin connection at `x`.
pub fn gamma_set_at(spec: &MetricSpec, x: &Point) -> Result<GammaSet, GeometryError> {
    let cache = metric_at(spec, x)?;
    gamma_set_from_cache(spec, &cache)
}

pub fn gamma_set_from_cache(
    spec: &MetricSpec,
    cache: &GeometryCache,
) -> Result<GammaSet, GeometryError> {
    let flat = flat_gammas();
    let mut gamma = [CMat4::zeros(); 4];
    for mu in 0..4 {
        for a in 0..4 {
            gamma[mu] += flat[a] * c(cache.tetrad[(mu, a)], 0.0);
        }
    }
    let sigma = spin_connection(spec, cache)?;
    Ok(GammaSet {
        point: cache.point,
        gamma,
        gamma_flat: flat,
        sigma,
    })
}

/// Max residual of {gamma^mu, gamma^nu} - 2 g^{mu nu} over all index pairs.
pub fn anticommutator_residual(gs: &GammaSet, g_inv: &Matrix4<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            let anti = gs.gamma[mu] * gs.gamma[nu] + gs.gamma[nu] * gs.gamma[mu];
            let target = CMat4::identity() * c(2.0 * g_inv[(mu, nu)], 0.0);
            worst = worst.max((anti - target).norm());
        }
    }
    worst
}

/// Max residual of the metric-compatibility identity for the gammas:
/// d_mu gamma^nu + Gamma^nu_{mu lam} gamma^lam + [sigma_mu, gamma^nu] = 0,
/// with d_mu gamma^nu taken by central differences with step `h`.
pub fn nabla_gamma_residual(
    spec: &MetricSpec,
    x: &Point,
    h: f64,
) -> Result<f64, GeometryError> {
    let cache = metric_at(spec, x)?;
    let gs = gamma_set_from_cache(spec, &cache)?;
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        let step = h * x[mu].abs().max(1.0);
        let mut xp = *x;
        xp[mu] += step;
        let mut xm = *x;
        xm[mu] -= step;
        let gp = gamma_set_at(spec, &xp)?;
        let gm = gamma_set_at(spec, &xm)?;
        for nu in 0..4 {
            let dg = (gp.gamma[nu] - gm.gamma[nu]) / c(2.0 * step, 0.0);
            let mut res = dg + gs.sigma[mu] * gs.gamma[nu] - gs.gamma[nu] * gs.sigma[mu];
            for lam in 0..4 {
                res += gs.gamma[lam] * c(cache.christoffel[nu][(mu, lam)], 0.0);
            }
            worst = worst.max(res.norm());
        }
    }
    Ok(worst)
}

/// Covariant Dirac operator i gamma^mu (d_mu + sigma_mu) applied to a spinor
/// field closure, with d_mu by central differences of step `h` per axis
/// (scaled by the coordinate magnitude).
fn dirac_apply<F>(spec: &MetricSpec, psi: &F, x: &Point, h: f64) -> Result<CVec4, GeometryError>
where
    F: Fn(&Point) -> CVec4,
{
    let gs = gamma_set_at(spec, x)?;
    let mut out = CVec4::zeros();
    for mu in 0..4 {
        let step = h * x[mu].abs().max(1.0);
        let mut xp = *x;
        xp[mu] += step;
        let mut xm = *x;
        xm[mu] -= step;
        let dpsi = (psi(&xp) - psi(&xm)) / c(2.0 * step, 0.0);
        out += gs.gamma[mu] * (dpsi + gs.sigma[mu] * psi(x)) * c(0.0, 1.0);
    }
    Ok(out)
}

/// Spinor Laplacian g^{mu nu}(nabla_mu nabla_nu - Gamma^lam_{mu nu} nabla_lam)
/// applied by nesting first differences, same step policy as `dirac_apply`.
fn box_apply<F>(spec: &MetricSpec, psi: &F, x: &Point, h: f64) -> Result<CVec4, GeometryError>
where
    F: Fn(&Point) -> CVec4,
{
    let cache = metric_at(spec, x)?;
    let nabla = |nu: usize, y: &Point| -> Result<CVec4, GeometryError> {
        let gs = gamma_set_at(spec, y)?;
        let step = h * y[nu].abs().max(1.0);
        let mut yp = *y;
        yp[nu] += step;
        let mut ym = *y;
        ym[nu] -= step;
        Ok((psi(&yp) - psi(&ym)) / c(2.0 * step, 0.0) + gs.sigma[nu] * psi(y))
    };
    let gs = gamma_set_at(spec, x)?;
    let mut out = CVec4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let w = cache.g_inv[(mu, nu)];
            if w == 0.0 {
                continue;
            }
            let step = h * x[mu].abs().max(1.0);
            let mut xp = *x;
            xp[mu] += step;
            let mut xm = *x;
            xm[mu] -= step;
            let dnab = (nabla(nu, &xp)? - nabla(nu, &xm)?) / c(2.0 * step, 0.0);
            let mut term = dnab + gs.sigma[mu] * nabla(nu, x)?;
            for lam in 0..4 {
                term -= nabla(lam, x)? * c(cache.christoffel[lam][(mu, nu)], 0.0);
            }
            out += term * c(w, 0.0);
        }
    }
    Ok(out)
}

/// Residual of the squared Dirac operator identity
/// (-i D + m)(i D + m) psi = (box - R/4 + m^2) psi at `x`, evaluated with
/// nested central first differences on both sides. Returns the max absolute
/// component of LHS - RHS.
pub fn lichnerowicz_residual<F>(
    spec: &MetricSpec,
    psi: &F,
    x: &Point,
    mass: f64,
    h: f64,
) -> Result<f64, GeometryError>
where
    F: Fn(&Point) -> CVec4,
{
    // phi = (i D + m) psi as a field closure; errors inside the closure are
    // surfaced by the caller-side domain check at x
    let phi = |y: &Point| -> CVec4 {
        dirac_apply(spec, psi, y, h).expect("inner stencil point left the chart domain")
            + psi(y) * c(mass, 0.0)
    };
    let lhs = -dirac_apply(spec, &phi, x, h)? + phi(x) * c(mass, 0.0);
    let cache = metric_at(spec, x)?;
    let rhs = box_apply(spec, psi, x, h)?
        + psi(x) * c(mass * mass - 0.25 * cache.scalar_curvature, 0.0);
    let diff = lhs - rhs;
    Ok((0..4).map(|i| diff[i].norm()).fold(0.0, f64::max))
}

/// The 16 basis labels of `bispinor_decompose`, in coefficient order.
pub const BISPINOR_BASIS_LABELS: [&str; 16] = [
    "1", "g0", "g1", "g2", "g3", "s01", "s02", "s03", "s12", "s13", "s23", "g5g0", "g5g1",
    "g5g2", "g5g3", "g5",
];

/// The 16 flat basis matrices {1, gamma^a, sigma^{ab} (a<b), gamma^5 gamma^a,
/// gamma^5} with sigma^{ab} = (i/2)[gamma^a, gamma^b].
pub fn bispinor_basis() -> Vec<CMat4> {
    let g = flat_gammas();
    let g5 = gamma5(&g);
    let mut basis = vec![CMat4::identity()];
    basis.extend_from_slice(&g);
    for a in 0..4 {
        for b in (a + 1)..4 {
            basis.push((g[a] * g[b] - g[b] * g[a]) * c(0.0, 0.5));
        }
    }
    for gm in &g {
        basis.push(g5 * gm);
    }
    basis.push(g5);
    basis
}

/// Coefficients of `m` over the 16-element bispinor basis, by solving the
/// dense 16x16 linear system (the basis is a vector-space basis of M4(C)).
pub fn bispinor_decompose(m: &CMat4) -> Vec<Complex64> {
    let basis = bispinor_basis();
    let mut a = DMatrix::<Complex64>::zeros(16, 16);
    for (k, b) in basis.iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                a[(4 * i + j, k)] = b[(i, j)];
            }
        }
    }
    let mut rhs = DVector::<Complex64>::zeros(16);
    for i in 0..4 {
        for j in 0..4 {
            rhs[4 * i + j] = m[(i, j)];
        }
    }
    let sol = a.lu().solve(&rhs).expect("bispinor basis is nonsingular");
    sol.iter().copied().collect()
}
