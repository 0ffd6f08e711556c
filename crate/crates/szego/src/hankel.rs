//! The Hankel operator `H_u f = P₊(u conj f)` of a rational symbol and the
//! direct spectral problem.
//!
//! For a Hardy-class rational `u` the range of `H_u` is the model space `K_θ`
//! whose inner function has the conjugated poles of `u` as zeros. On the
//! orthonormal basis `e_k` of `K_θ` the antilinear operator is represented by
//! the complex symmetric matrix `M[(j, k)] = ⟨H_u e_k, e_j⟩`, acting as
//! `c ↦ M conj(c)`. Singular values of `M` are the Schmidt values `λ_j`;
//! their left singular subspaces are the level spaces `E_j`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::blaschke::{BlaschkeProduct, HerglotzData};
use crate::error::{Result, SzegoError};
use crate::inverse::{Level, SpectralData};
use crate::linalg;
use crate::model_space::ModelSpace;
use crate::rational::RationalFunction;
use crate::C64;

/// Relative gap (in units of the largest singular value) below which
/// singular values are merged into one level.
pub const SCHMIDT_CLUSTER_TOL: f64 = 1e-8;

/// One level `E_j` of `H_u²` with orthonormal coordinate columns.
#[derive(Clone, Debug)]
pub struct SchmidtLevel {
    pub lambda: f64,
    /// `m × d` matrix of orthonormal coordinate vectors spanning `E_j`.
    pub basis: DMatrix<C64>,
    /// Set when a neighbouring level lies within ten clustering tolerances,
    /// so the split into levels may not be reliable.
    pub ambiguous: bool,
}

impl SchmidtLevel {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projector onto `E_j` in coordinates.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.basis * self.basis.adjoint()
    }
}

/// Quantities of one level produced by the direct problem.
#[derive(Clone, Debug)]
pub struct DirectLevel {
    pub lambda: f64,
    pub phi: f64,
    pub omega: C64,
    pub nu_sq: f64,
    pub b: HerglotzData,
    /// Coordinates of `g_j = P_j(1 - θ)`.
    pub g: DVector<C64>,
    pub schmidt: SchmidtLevel,
}

/// Hankel operator of a rational symbol restricted to its range `K_θ`.
#[derive(Clone, Debug)]
pub struct HankelOperator {
    u: RationalFunction,
    space: ModelSpace,
    m: DMatrix<C64>,
    a: DMatrix<C64>,
    g: DVector<C64>,
    uc: DVector<C64>,
}

impl HankelOperator {
    /// Builds `H_u` on `K_θ`. Negligible trailing pole coefficients of `u`
    /// are dropped first so that `deg θ` equals the rank of `H_u`.
    pub fn build(u: &RationalFunction) -> Result<Self> {
        let u = u.trimmed(1e-14);
        if !u.is_hardy() {
            return Err(SzegoError::NotHardy(
                "symbol must vanish at infinity with poles in the lower half-plane".into(),
            ));
        }
        if u.poles().is_empty() {
            return Err(SzegoError::InvalidInput("trivial symbol: u = 0 has no spectral data".into()));
        }
        let zeros: Vec<C64> = u
            .poles()
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.z.conj(), p.order()))
            .collect();
        let theta = BlaschkeProduct::new(zeros)?;
        let space = ModelSpace::new(&theta)?;
        let dim = space.dim();
        // M[(j, k)] = ∫ u conj(e_j e_k) = -2πi Σ_p Σ_m c_m conj([t^{m-1}] e_j e_k (conj p + t))
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for p in u.poles() {
            let n = p.coeffs.len();
            let t = space.onb_taylor(p.z.conj(), n);
            for j in 0..dim {
                for k in 0..=j {
                    let mut s = C64::new(0.0, 0.0);
                    for (mi, &cm) in p.coeffs.iter().enumerate() {
                        let prod: C64 = (0..=mi).map(|a| t[(j, a)] * t[(k, mi - a)]).sum();
                        s += cm * prod.conj();
                    }
                    m[(j, k)] += s;
                }
            }
        }
        for j in 0..dim {
            for k in 0..j {
                m[(k, j)] = m[(j, k)];
            }
        }
        let m = m * C64::new(0.0, -2.0 * PI);
        let a = space.model_operator();
        let g = space.coords(&space.one_minus_theta())?;
        let uc = space.coords(&u)?;
        let op = Self { u, space, m, a, g, uc };
        let (sv, _) = linalg::svd_left(&op.m)?;
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        if !(smin > 1e-13 * smax) {
            return Err(SzegoError::IllConditioned { what: "hankel matrix rank", cond: smax / smin });
        }
        Ok(op)
    }

    pub fn symbol(&self) -> &RationalFunction {
        &self.u
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn theta(&self) -> &BlaschkeProduct {
        self.space.theta()
    }

    /// Symmetric matrix `M[(j, k)] = ⟨H_u e_k, e_j⟩`.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    /// Matrix of `A_θ` in the same basis.
    pub fn model_operator(&self) -> &DMatrix<C64> {
        &self.a
    }

    /// Coordinates of `1 - θ`.
    pub fn one_minus_theta(&self) -> &DVector<C64> {
        &self.g
    }

    /// Coordinates of `u`.
    pub fn symbol_coords(&self) -> &DVector<C64> {
        &self.uc
    }

    /// `H_u` applied to coordinates.
    pub fn apply(&self, c: &DVector<C64>) -> DVector<C64> {
        &self.m * c.conjugate()
    }

    /// `H_u f` for a rational `f ∈ K_θ`, through coordinates. Errors when
    /// `f` is not in `K_θ` to relative accuracy `1e-8`.
    pub fn apply_function(&self, f: &RationalFunction) -> Result<RationalFunction> {
        let c = self.space.coords(f)?;
        let back = self.space.from_coords(&c);
        let scale = f.l2_norm()?.max(f64::MIN_POSITIVE);
        let miss = back.sub(f).l2_norm()?;
        if miss > 1e-8 * scale {
            return Err(SzegoError::InvalidInput(format!(
                "function is not in the model space (relative residual {miss:e})"
            )));
        }
        Ok(self.space.from_coords(&self.apply(&c)))
    }

    /// `P₊(u conj f)` by rational algebra, valid for any `f ∈ L²`.
    pub fn apply_direct(&self, f: &RationalFunction) -> Result<RationalFunction> {
        self.u.mul(&f.conj_reflect()).hardy_project()
    }

    /// The linear operator `H_u²` as a Hermitian matrix.
    pub fn square(&self) -> DMatrix<C64> {
        &self.m * self.m.conjugate()
    }

    /// Distinct singular values (descending) with their level spaces.
    pub fn schmidt_levels(&self) -> Result<Vec<SchmidtLevel>> {
        let (sv, left) = linalg::svd_left(&self.m)?;
        let smax = sv[0];
        let mut levels: Vec<Vec<usize>> = Vec::new();
        for (i, &s) in sv.iter().enumerate() {
            match levels.last_mut() {
                Some(idx) if sv[*idx.last().unwrap()] - s <= SCHMIDT_CLUSTER_TOL * smax => {
                    idx.push(i)
                }
                _ => levels.push(vec![i]),
            }
        }
        let lams: Vec<f64> = levels
            .iter()
            .map(|idx| idx.iter().map(|&i| sv[i]).sum::<f64>() / idx.len() as f64)
            .collect();
        let near = |a: f64, b: f64| (a - b).abs() < 10.0 * SCHMIDT_CLUSTER_TOL * smax;
        Ok(levels
            .into_iter()
            .enumerate()
            .map(|(k, idx)| {
                let ambiguous = (k > 0 && near(lams[k - 1], lams[k]))
                    || (k + 1 < lams.len() && near(lams[k + 1], lams[k]));
                let basis = DMatrix::from_fn(left.nrows(), idx.len(), |r, c| left[(r, idx[c])]);
                SchmidtLevel { lambda: lams[k], basis, ambiguous }
            })
            .collect())
    }

    /// Solves the direct problem level by level.
    pub fn direct_levels(&self) -> Result<Vec<DirectLevel>> {
        let levels = self.schmidt_levels()?;
        let mut out = Vec::with_capacity(levels.len());
        for lev in levels {
            let lambda = lev.lambda;
            let gj = lev.projector() * &self.g;
            let nu_sq = gj.norm_squared();
            if !(nu_sq > 1e-28) {
                return Err(SzegoError::Inconsistent(format!(
                    "level λ = {lambda} is orthogonal to 1 - θ"
                )));
            }
            // H_u g_j = λ e^{-iφ} g_j
            let hg = self.apply(&gj);
            let ratio = gj.dotc(&hg) / C64::new(lambda * nu_sq, 0.0);
            let mut phi = -ratio.arg();
            if phi <= -PI {
                phi += 2.0 * PI;
            }
            let omega = gj.dotc(&(&self.a * &gj)) * (lambda * lambda);
            let b = level_herglotz(&self.a, &lev.basis, &gj, nu_sq)?;
            out.push(DirectLevel { lambda, phi, omega, nu_sq, b, g: gj, schmidt: lev });
        }
        Ok(out)
    }

    pub fn spectral_data(&self) -> Result<SpectralData> {
        let levels = self
            .direct_levels()?
            .into_iter()
            .map(|l| Level { lambda: l.lambda, phi: l.phi, omega: l.omega, b: l.b })
            .collect();
        Ok(SpectralData { levels })
    }

    /// Relative defect of `A_θ H_u² - H_u² A_θ = (i/2π)⟨·, H_u u⟩(1-θ) - (i/2π)⟨·, u⟩u`.
    pub fn commutator_defect(&self) -> f64 {
        let s = self.square();
        let hu = self.apply(&self.uc);
        let lhs = &self.a * &s - &s * &self.a;
        let coef = C64::new(0.0, 1.0 / (2.0 * PI));
        let rhs = (&self.g * hu.adjoint() - &self.uc * self.uc.adjoint()) * coef;
        let scale = 1.0 + linalg::max_abs(&(&self.a * &s));
        linalg::max_abs(&(lhs - rhs)) / scale
    }

    /// Relative defect of `A_θ* H_u = H_u A_θ`.
    pub fn intertwining_defect(&self) -> f64 {
        let lhs = self.a.adjoint() * &self.m;
        let rhs = &self.m * self.a.conjugate();
        linalg::max_abs(&(lhs - rhs)) / (1.0 + linalg::max_abs(&self.a) * linalg::max_abs(&self.m))
    }

    /// Defect of `H_u(1 - θ) = u`.
    pub fn range_defect(&self) -> f64 {
        (self.apply(&self.g) - &self.uc).norm() / (1.0 + self.uc.norm())
    }
}

/// Herglotz data of a level from the compression of `A_θ*` to `E_j`.
///
/// With `B = P_j A_θ* P_j` written in the orthonormal frame `[ĝ, W]` of
/// `E_j`, `ĝ = g_j/ν_j`, the Schur complement gives
/// `b_j(x) = (1/ν_j²) B₁₂ (B₂₂ - x)⁻¹ B₂₁` where `B₂₂` is Hermitian.
fn level_herglotz(
    a: &DMatrix<C64>,
    basis: &DMatrix<C64>,
    gj: &DVector<C64>,
    nu_sq: f64,
) -> Result<HerglotzData> {
    let d = basis.ncols();
    if d == 1 {
        return Ok(HerglotzData::zero());
    }
    let bmat = basis.adjoint() * a.adjoint() * basis;
    let gamma = basis.adjoint() * gj;
    let ghat = &gamma / C64::new(gamma.norm(), 0.0);
    let w = linalg::orthonormal_complement(&ghat);
    let b22 = w.adjoint() * &bmat * &w;
    let b21 = w.adjoint() * &bmat * &ghat;
    let (alpha, vecs) = linalg::hermitian_eigen(&b22);
    let wk = vecs.adjoint() * b21;
    let residues: Vec<f64> = wk.iter().map(|z| z.norm_sqr() / nu_sq).collect();
    HerglotzData::new(alpha, residues, 0.0)
}

/// Direct problem: spectral data of a rational Hardy symbol.
pub fn direct_spectral_data(u: &RationalFunction) -> Result<SpectralData> {
    HankelOperator::build(u)?.spectral_data()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn simple_pole_symbol() {
        // u = 1/(x + i): λ = 1/2, φ = π/2, ω = iπ.
        let u = RationalFunction::pole(c64(0.0, -1.0), 1, c64(1.0, 0.0));
        let sd = direct_spectral_data(&u).unwrap();
        assert_eq!(sd.levels.len(), 1);
        let l = &sd.levels[0];
        assert!((l.lambda - 0.5).abs() < 1e-14);
        assert!((l.phi - PI / 2.0).abs() < 1e-13);
        assert!((l.omega - c64(0.0, PI)).norm() < 1e-12);
        assert!(l.b.poles.is_empty());
    }

    #[test]
    fn worked_symbol_round_trip_values() {
        let u = RationalFunction::pole(c64(0.0, -1.0 / (4.0 * PI)), 1, c64(0.0, 1.0 / (2.0 * PI)));
        let h = HankelOperator::build(&u).unwrap();
        let lv = h.direct_levels().unwrap();
        assert!((lv[0].lambda - 1.0).abs() < 1e-13);
        assert!(lv[0].phi.abs() < 1e-13);
        assert!((lv[0].omega - c64(0.0, 1.0 / (4.0 * PI))).norm() < 1e-13);
        assert!((lv[0].nu_sq - 1.0).abs() < 1e-13);
        assert!(h.range_defect() < 1e-13);
    }
}
