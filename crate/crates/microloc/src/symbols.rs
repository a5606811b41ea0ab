//! Differential operator symbols: multi-index operator descriptions,
//! principal and subprincipal symbols, characteristic sets, and scalar
//! factorizations of real principal type.

use crate::geometry::{metric_at, Covector, GeometryError, MetricSpec, Point};
use crate::spin::{gamma_set_from_cache, CMat4};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::Arc;

pub type CoeffFn = Arc<dyn Fn(&Point) -> DMatrix<Complex64> + Send + Sync>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cmat4_to_dmatrix(m: &CMat4) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

/// One term c_alpha(x) d^alpha of a differential operator, where alpha is a
/// coordinate multi-index.
pub struct Term {
    pub alpha: [u8; 4],
    pub coeff: CoeffFn,
}

impl Term {
    pub fn order(&self) -> u32 {
        self.alpha.iter().map(|&a| a as u32).sum()
    }
}

/// A matrix differential operator sum_alpha c_alpha(x) d^alpha of stated
/// order acting on C^dim valued fields.
pub struct OperatorSpec {
    pub label: String,
    pub order: u32,
    pub dim: usize,
    pub terms: Vec<Term>,
}

/// (i xi)^alpha
fn ixi_pow(xi: &Covector, alpha: &[u8; 4]) -> Complex64 {
    let mut v = c(1.0, 0.0);
    for mu in 0..4 {
        for _ in 0..alpha[mu] {
            v *= c(0.0, xi[mu]);
        }
    }
    v
}

impl OperatorSpec {
    pub fn from_terms(label: &str, order: u32, dim: usize, terms: Vec<Term>) -> Self {
        OperatorSpec {
            label: label.to_string(),
            order,
            dim,
            terms,
        }
    }

    fn symbol_at_order(&self, x: &Point, xi: &Covector, order: u32) -> DMatrix<Complex64> {
        let mut p = DMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            if t.order() == order {
                p += (t.coeff)(x) * ixi_pow(xi, &t.alpha);
            }
        }
        p
    }

    /// Principal symbol p_m(x, xi) = sum over |alpha| = m of c_alpha (i xi)^alpha.
    pub fn principal(&self, x: &Point, xi: &Covector) -> DMatrix<Complex64> {
        self.symbol_at_order(x, xi, self.order)
    }

    /// d p_m / d xi_mu, analytic in xi.
    pub fn principal_dxi(&self, x: &Point, xi: &Covector, mu: usize) -> DMatrix<Complex64> {
        let mut p = DMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            if t.order() != self.order || t.alpha[mu] == 0 {
                continue;
            }
            let mut a = t.alpha;
            a[mu] -= 1;
            p += (t.coeff)(x) * ixi_pow(xi, &a) * c(0.0, t.alpha[mu] as f64);
        }
        p
    }

    /// d p_m / d x^mu by central differences of the coefficients.
    pub fn principal_dx(&self, x: &Point, xi: &Covector, mu: usize) -> DMatrix<Complex64> {
        let h = 1e-6 * x[mu].abs().max(1.0);
        let mut xp = *x;
        xp[mu] += h;
        let mut xm = *x;
        xm[mu] -= h;
        (self.principal(&xp, xi) - self.principal(&xm, xi)) / c(2.0 * h, 0.0)
    }

    /// Subprincipal symbol
    /// p^s = p_{m-1} - (1/2i) sum_mu d^2 p_m / d x^mu d xi_mu.
    pub fn subprincipal(&self, x: &Point, xi: &Covector) -> DMatrix<Complex64> {
        let mut p = self.symbol_at_order(x, xi, self.order.saturating_sub(1));
        for mu in 0..4 {
            let h = 1e-6 * x[mu].abs().max(1.0);
            let mut xp = *x;
            xp[mu] += h;
            let mut xm = *x;
            xm[mu] -= h;
            let mixed = (self.principal_dxi(&xp, xi, mu) - self.principal_dxi(&xm, xi, mu))
                / c(2.0 * h, 0.0);
            // -(1/2i) = i/2
            p += mixed * c(0.0, 0.5);
        }
        p
    }

    /// Characteristic set membership: |det p_m| below a tolerance scaled by
    /// the Frobenius norm raised to the matrix dimension.
    pub fn in_char_set(&self, x: &Point, xi: &Covector) -> bool {
        let p = self.principal(x, xi);
        let scale = p.norm().powi(self.dim as i32).max(f64::MIN_POSITIVE);
        let det = p.determinant().norm();
        det < 1e-8 * scale
    }
}

/// Scalar wave operator g^{mu nu} (d_mu d_nu - Gamma^lam_{mu nu} d_lam) + m^2
/// with principal symbol -xi^2.
pub fn scalar_wave(spec: &MetricSpec, mass: f64) -> OperatorSpec {
    let mut terms = Vec::new();
    for mu in 0..4usize {
        for nu in mu..4usize {
            let mut alpha = [0u8; 4];
            alpha[mu] += 1;
            alpha[nu] += 1;
            let s = spec.clone();
            let w = if mu == nu { 1.0 } else { 2.0 };
            terms.push(Term {
                alpha,
                coeff: Arc::new(move |x: &Point| {
                    let g_inv = s.inverse_metric(x).expect("in domain").0;
                    DMatrix::from_element(1, 1, c(w * g_inv[(mu, nu)], 0.0))
                }),
            });
        }
    }
    for lam in 0..4usize {
        let mut alpha = [0u8; 4];
        alpha[lam] = 1;
        let s = spec.clone();
        terms.push(Term {
            alpha,
            coeff: Arc::new(move |x: &Point| {
                let g_inv = s.inverse_metric(x).expect("in domain").0;
                let gamma = s.christoffel(x).expect("in domain");
                let mut v = 0.0;
                for mu in 0..4 {
                    for nu in 0..4 {
                        v -= g_inv[(mu, nu)] * gamma[lam][(mu, nu)];
                    }
                }
                DMatrix::from_element(1, 1, c(v, 0.0))
            }),
        });
    }
    if mass != 0.0 {
        terms.push(Term {
            alpha: [0; 4],
            coeff: Arc::new(move |_: &Point| DMatrix::from_element(1, 1, c(mass * mass, 0.0))),
        });
    }
    OperatorSpec::from_terms("scalar_wave", 2, 1, terms)
}

/// Dirac operator -i gamma^mu (d_mu + sigma_mu) + m with principal symbol
/// xi-slash.
pub fn dirac(spec: &MetricSpec, mass: f64) -> OperatorSpec {
    let mut terms = Vec::new();
    for mu in 0..4usize {
        let mut alpha = [0u8; 4];
        alpha[mu] = 1;
        let s = spec.clone();
        terms.push(Term {
            alpha,
            coeff: Arc::new(move |x: &Point| {
                let cache = metric_at(&s, x).expect("in domain");
                let gs = gamma_set_from_cache(&s, &cache).expect("in domain");
                cmat4_to_dmatrix(&(gs.gamma[mu] * c(0.0, -1.0)))
            }),
        });
    }
    let s = spec.clone();
    terms.push(Term {
        alpha: [0; 4],
        coeff: Arc::new(move |x: &Point| {
            let cache = metric_at(&s, x).expect("in domain");
            let gs = gamma_set_from_cache(&s, &cache).expect("in domain");
            let mut m = CMat4::identity() * c(mass, 0.0);
            for mu in 0..4 {
                m += gs.gamma[mu] * gs.sigma[mu] * c(0.0, -1.0);
            }
            cmat4_to_dmatrix(&m)
        }),
    });
    OperatorSpec::from_terms("dirac", 1, 4, terms)
}

/// The transposed-representation operator satisfied by the second slot of a
/// Dirac two-point kernel: i gamma^muT (d_mu + sigma_muT ...) + m, principal
/// symbol -xi-slash-transpose.
pub fn dirac_adjoint(spec: &MetricSpec, mass: f64) -> OperatorSpec {
    let mut terms = Vec::new();
    for mu in 0..4usize {
        let mut alpha = [0u8; 4];
        alpha[mu] = 1;
        let s = spec.clone();
        terms.push(Term {
            alpha,
            coeff: Arc::new(move |x: &Point| {
                let cache = metric_at(&s, x).expect("in domain");
                let gs = gamma_set_from_cache(&s, &cache).expect("in domain");
                cmat4_to_dmatrix(&(gs.gamma[mu].transpose() * c(0.0, 1.0)))
            }),
        });
    }
    let s = spec.clone();
    terms.push(Term {
        alpha: [0; 4],
        coeff: Arc::new(move |x: &Point| {
            let cache = metric_at(&s, x).expect("in domain");
            let gs = gamma_set_from_cache(&s, &cache).expect("in domain");
            let mut m = CMat4::identity() * c(mass, 0.0);
            for mu in 0..4 {
                m += (gs.gamma[mu] * gs.sigma[mu]).transpose() * c(0.0, 1.0);
            }
            cmat4_to_dmatrix(&m)
        }),
    });
    OperatorSpec::from_terms("dirac_adjoint", 1, 4, terms)
}

/// Maxwell operator on potentials in the Lorenz gauge, acting on the index-
/// lowered one-form components: principal symbol -xi^2 times the identity,
/// with first order entries 2 g^{rho lam} Gamma^nu_{rho mu}
/// - delta^nu_mu g^{rho sig} Gamma^lam_{rho sig} and zeroth order -R^nu_mu.
pub fn maxwell(spec: &MetricSpec) -> OperatorSpec {
    let mut terms = Vec::new();
    for a in 0..4usize {
        for b in a..4usize {
            let mut alpha = [0u8; 4];
            alpha[a] += 1;
            alpha[b] += 1;
            let s = spec.clone();
            let w = if a == b { 1.0 } else { 2.0 };
            terms.push(Term {
                alpha,
                coeff: Arc::new(move |x: &Point| {
                    let g_inv = s.inverse_metric(x).expect("in domain").0;
                    DMatrix::from_fn(4, 4, |i, j| {
                        if i == j {
                            c(w * g_inv[(a, b)], 0.0)
                        } else {
                            c(0.0, 0.0)
                        }
                    })
                }),
            });
        }
    }
    for lam in 0..4usize {
        let mut alpha = [0u8; 4];
        alpha[lam] = 1;
        let s = spec.clone();
        terms.push(Term {
            alpha,
            coeff: Arc::new(move |x: &Point| {
                let g_inv = s.inverse_metric(x).expect("in domain").0;
                let gamma = s.christoffel(x).expect("in domain");
                DMatrix::from_fn(4, 4, |nu, mu| {
                    let mut v = 0.0;
                    for rho in 0..4 {
                        v += 2.0 * g_inv[(rho, lam)] * gamma[nu][(rho, mu)];
                    }
                    if nu == mu {
                        for rho in 0..4 {
                            for sig in 0..4 {
                                v -= g_inv[(rho, sig)] * gamma[lam][(rho, sig)];
                            }
                        }
                    }
                    c(v, 0.0)
                })
            }),
        });
    }
    let s = spec.clone();
    terms.push(Term {
        alpha: [0; 4],
        coeff: Arc::new(move |x: &Point| {
            let cache = metric_at(&s, x).expect("in domain");
            let mixed = cache.g_inv * cache.ricci;
            DMatrix::from_fn(4, 4, |nu, mu| c(-mixed[(nu, mu)], 0.0))
        }),
    });
    OperatorSpec::from_terms("maxwell", 2, 4, terms)
}

/// Which of the built-in operator families a factorization belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    ScalarWave,
    Maxwell,
    Dirac,
    DiracAdjoint,
}

/// Factorization p = ptilde^{-1} q of the principal symbol with q real,
/// scalar, of real principal type: ptilde(x, xi) p(x, xi) = q(x, xi) I.
pub struct RptFactorization {
    pub kind: FamilyKind,
    pub spec: MetricSpec,
    pub dim: usize,
}

impl RptFactorization {
    fn xi_sq(&self, x: &Point, xi: &Covector) -> Result<f64, GeometryError> {
        let g_inv = self.spec.inverse_metric(x)?.0;
        let mut v = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                v += g_inv[(mu, nu)] * xi[mu] * xi[nu];
            }
        }
        Ok(v)
    }

    /// The scalar real factor q(x, xi).
    pub fn q(&self, x: &Point, xi: &Covector) -> Result<f64, GeometryError> {
        let xi2 = self.xi_sq(x, xi)?;
        Ok(match self.kind {
            FamilyKind::ScalarWave => -xi2,
            FamilyKind::Maxwell => -self.spec.sqrt_neg_det(x) * xi2,
            FamilyKind::Dirac | FamilyKind::DiracAdjoint => self.spec.sqrt_neg_det(x) * xi2,
        })
    }

    /// The matrix cofactor ptilde(x, xi).
    pub fn ptilde(&self, x: &Point, xi: &Covector) -> Result<DMatrix<Complex64>, GeometryError> {
        let sg = self.spec.sqrt_neg_det(x);
        Ok(match self.kind {
            FamilyKind::ScalarWave => DMatrix::from_element(1, 1, c(1.0, 0.0)),
            FamilyKind::Maxwell => DMatrix::from_diagonal_element(4, 4, c(sg, 0.0)),
            FamilyKind::Dirac => {
                let cache = metric_at(&self.spec, x)?;
                let gs = gamma_set_from_cache(&self.spec, &cache)?;
                cmat4_to_dmatrix(&(gs.slash(xi) * c(sg, 0.0)))
            }
            FamilyKind::DiracAdjoint => {
                let cache = metric_at(&self.spec, x)?;
                let gs = gamma_set_from_cache(&self.spec, &cache)?;
                cmat4_to_dmatrix(&(gs.slash(xi).transpose() * c(-sg, 0.0)))
            }
        })
    }

    /// d q / d xi_mu, analytic.
    pub fn q_dxi(&self, x: &Point, xi: &Covector) -> Result<[f64; 4], GeometryError> {
        let g_inv = self.spec.inverse_metric(x)?.0;
        let sg = self.spec.sqrt_neg_det(x);
        let fac = match self.kind {
            FamilyKind::ScalarWave => -1.0,
            FamilyKind::Maxwell => -sg,
            FamilyKind::Dirac | FamilyKind::DiracAdjoint => sg,
        };
        let mut out = [0.0; 4];
        for mu in 0..4 {
            let mut v = 0.0;
            for nu in 0..4 {
                v += 2.0 * g_inv[(mu, nu)] * xi[nu];
            }
            out[mu] = fac * v;
        }
        Ok(out)
    }

    /// d ptilde / d xi_mu, analytic.
    pub fn ptilde_dxi(
        &self,
        x: &Point,
        xi: &Covector,
        mu: usize,
    ) -> Result<DMatrix<Complex64>, GeometryError> {
        let _ = xi;
        let sg = self.spec.sqrt_neg_det(x);
        Ok(match self.kind {
            FamilyKind::ScalarWave | FamilyKind::Maxwell => {
                DMatrix::zeros(self.dim, self.dim)
            }
            FamilyKind::Dirac => {
                let cache = metric_at(&self.spec, x)?;
                let gs = gamma_set_from_cache(&self.spec, &cache)?;
                cmat4_to_dmatrix(&(gs.gamma[mu] * c(sg, 0.0)))
            }
            FamilyKind::DiracAdjoint => {
                let cache = metric_at(&self.spec, x)?;
                let gs = gamma_set_from_cache(&self.spec, &cache)?;
                cmat4_to_dmatrix(&(gs.gamma[mu].transpose() * c(-sg, 0.0)))
            }
        })
    }

    /// d ptilde / d x^mu by central differences.
    pub fn ptilde_dx(
        &self,
        x: &Point,
        xi: &Covector,
        mu: usize,
    ) -> Result<DMatrix<Complex64>, GeometryError> {
        let h = 1e-6 * x[mu].abs().max(1.0);
        let mut xp = *x;
        xp[mu] += h;
        let mut xm = *x;
        xm[mu] -= h;
        Ok((self.ptilde(&xp, xi)? - self.ptilde(&xm, xi)?) / c(2.0 * h, 0.0))
    }

    /// Ratio s(x) between the Hamilton field of q and the flow
    /// parameterization of the underlying bicharacteristic strip (which uses
    /// xi^2 as its Hamiltonian): on the strip, H_q = s(x) d/dtau.
    pub fn strip_scale(&self, x: &Point) -> f64 {
        match self.kind {
            FamilyKind::ScalarWave => -1.0,
            FamilyKind::Maxwell => -self.spec.sqrt_neg_det(x),
            FamilyKind::Dirac | FamilyKind::DiracAdjoint => self.spec.sqrt_neg_det(x),
        }
    }

    /// The operator this factorization belongs to (mass enters only below
    /// the principal part, so it is irrelevant here and set to zero).
    pub fn operator(&self) -> OperatorSpec {
        match self.kind {
            FamilyKind::ScalarWave => scalar_wave(&self.spec, 0.0),
            FamilyKind::Maxwell => maxwell(&self.spec),
            FamilyKind::Dirac => dirac(&self.spec, 0.0),
            FamilyKind::DiracAdjoint => dirac_adjoint(&self.spec, 0.0),
        }
    }
}

/// Build the factorization for one of the operator families and verify the
/// defining identity ptilde p = q I at randomly sampled phase points, along
/// with non-degeneracy of dq/dxi on the characteristic set.
pub fn rpt_factorize(
    kind: FamilyKind,
    spec: &MetricSpec,
    seed: u64,
) -> Result<RptFactorization, GeometryError> {
    use rand::{Rng, SeedableRng};
    let dim = match kind {
        FamilyKind::ScalarWave => 1,
        _ => 4,
    };
    let fact = RptFactorization {
        kind,
        spec: spec.clone(),
        dim,
    };
    let op = fact.operator();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let x = spec.sample_point(&mut rng);
        let mut xi = [0.0; 4];
        for v in xi.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        if xi.iter().map(|v: &f64| v.abs()).fold(0.0, f64::max) < 1e-3 {
            xi[0] = 1.0;
        }
        let p = op.principal(&x, &xi);
        let pt = fact.ptilde(&x, &xi)?;
        let q = fact.q(&x, &xi)?;
        let res = &pt * &p - DMatrix::from_diagonal_element(dim, dim, c(q, 0.0));
        let scale = (pt.norm() * p.norm()).max(q.abs()).max(1.0);
        if res.norm() > 1e-12 * scale {
            return Err(GeometryError::BadSpec(format!(
                "factorization identity violated for {:?}: residual {:.3e}",
                kind,
                res.norm() / scale
            )));
        }
    }
    // dq/dxi must not vanish where q vanishes (real principal type)
    let cache = metric_at(spec, &spec.sample_point(&mut rng))?;
    for _ in 0..50 {
        let n = [
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if nn < 1e-3 {
            continue;
        }
        let xi = crate::geometry::null_covector_from_direction(
            &cache,
            &[n[0] / nn, n[1] / nn, n[2] / nn],
        );
        let dq = fact.q_dxi(&cache.point, &xi)?;
        let mag = dq.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if mag < 1e-10 {
            return Err(GeometryError::BadSpec(format!(
                "dq/dxi degenerate on the characteristic set for {:?}",
                kind
            )));
        }
    }
    Ok(fact)
}

/// Matrix Poisson bracket {ptilde, p} =
/// sum_mu (d ptilde/d xi_mu)(d p/d x^mu) - (d ptilde/d x^mu)(d p/d xi_mu).
pub fn poisson_ptilde_p(
    fact: &RptFactorization,
    op: &OperatorSpec,
    x: &Point,
    xi: &Covector,
) -> Result<DMatrix<Complex64>, GeometryError> {
    let mut out = DMatrix::zeros(op.dim, op.dim);
    for mu in 0..4 {
        out += fact.ptilde_dxi(x, xi, mu)? * op.principal_dx(x, xi, mu);
        out -= fact.ptilde_dx(x, xi, mu)? * op.principal_dxi(x, xi, mu);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScaleFactor;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn multiplication_operator_subprincipal() {
        // P = -i x^1 d/dx^1 has full symbol x^1 xi_1 and subprincipal i/2
        let op = OperatorSpec::from_terms(
            "toy",
            1,
            1,
            vec![Term {
                alpha: [0, 1, 0, 0],
                coeff: Arc::new(|x: &Point| DMatrix::from_element(1, 1, c(0.0, -x[1]))),
            }],
        );
        let x = [0.0, 0.7, 0.0, 0.0];
        let xi = [0.0, 2.0, 0.0, 0.0];
        let p = op.principal(&x, &xi);
        assert_abs_diff_eq!(p[(0, 0)].re, 0.7 * 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[(0, 0)].im, 0.0, epsilon = 1e-12);
        let ps = op.subprincipal(&x, &xi);
        assert_abs_diff_eq!(ps[(0, 0)].re, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(ps[(0, 0)].im, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn scalar_wave_principal_is_minus_xi_squared() {
        let spec = MetricSpec::Schwarzschild { mass: 1.0 };
        let x = [0.0, 7.0, 1.2, 0.4];
        let xi = [0.3, -0.9, 0.1, 0.5];
        let op = scalar_wave(&spec, 0.0);
        let p = op.principal(&x, &xi)[(0, 0)];
        let g_inv = spec.inverse_metric(&x).unwrap().0;
        let mut xi2 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                xi2 += g_inv[(mu, nu)] * xi[mu] * xi[nu];
            }
        }
        assert_abs_diff_eq!(p.re, -xi2, epsilon = 1e-12);
        assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn principal_symbol_is_homogeneous() {
        let spec = MetricSpec::FrwFlat {
            scale: ScaleFactor::PowerLaw { exponent: 0.5 },
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for op in [scalar_wave(&spec, 0.3), dirac(&spec, 0.2), maxwell(&spec)] {
            for _ in 0..10 {
                let x = spec.sample_point(&mut rng);
                let xi = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                let lam: f64 = rng.gen_range(0.5..3.0);
                let xis = [lam * xi[0], lam * xi[1], lam * xi[2], lam * xi[3]];
                let p1 = op.principal(&x, &xi) * c(lam.powi(op.order as i32), 0.0);
                let p2 = op.principal(&x, &xis);
                assert!((p1 - p2).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn dirac_determinant_identity() {
        // det(xi-slash) = (xi^2)^2
        let spec = MetricSpec::Schwarzschild { mass: 1.0 };
        let x = [0.1, 9.0, 1.5, 2.0];
        let op = dirac(&spec, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g_inv = spec.inverse_metric(&x).unwrap().0;
        for _ in 0..20 {
            let xi = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let mut xi2 = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    xi2 += g_inv[(mu, nu)] * xi[mu] * xi[nu];
                }
            }
            let det = op.principal(&x, &xi).determinant();
            assert!((det - c(xi2 * xi2, 0.0)).norm() < 1e-10 * (1.0 + xi2 * xi2));
        }
    }

    #[test]
    fn char_sets_are_the_null_cone() {
        let spec = MetricSpec::Minkowski;
        let x = [0.0; 4];
        for op in [
            scalar_wave(&spec, 0.0),
            dirac(&spec, 1.0),
            dirac_adjoint(&spec, 1.0),
            maxwell(&spec),
        ] {
            assert!(op.in_char_set(&x, &[1.0, 1.0, 0.0, 0.0]));
            assert!(op.in_char_set(&x, &[5.0, 0.0, -3.0, 4.0]));
            assert!(!op.in_char_set(&x, &[1.0, 0.0, 0.0, 0.0]));
            assert!(!op.in_char_set(&x, &[0.0, 1.0, 0.0, 0.0]));
        }
    }

    #[test]
    fn factorizations_verify_on_all_families() {
        for spec in [
            MetricSpec::Minkowski,
            MetricSpec::Schwarzschild { mass: 1.0 },
            MetricSpec::FrwFlat {
                scale: ScaleFactor::PowerLaw { exponent: 2.0 / 3.0 },
            },
        ] {
            for kind in [
                FamilyKind::ScalarWave,
                FamilyKind::Maxwell,
                FamilyKind::Dirac,
                FamilyKind::DiracAdjoint,
            ] {
                rpt_factorize(kind, &spec, 42).expect("factorization verifies");
            }
        }
    }

    #[test]
    fn poisson_bracket_vanishes_for_constant_coefficients() {
        // flat scalar wave: ptilde = 1 and p is x-independent
        let spec = MetricSpec::Minkowski;
        let fact = rpt_factorize(FamilyKind::ScalarWave, &spec, 1).unwrap();
        let op = scalar_wave(&spec, 0.0);
        let b = poisson_ptilde_p(&fact, &op, &[0.2, 0.1, 0.0, 0.3], &[1.0, 0.5, 0.2, 0.1])
            .unwrap();
        assert!(b.norm() < 1e-9);
    }
}
