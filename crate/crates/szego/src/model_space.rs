//! The model space `K_θ = H² ⊖ θH²` of a finite Blaschke product.
//!
//! Raw basis: the Takenaka–Malmquist functions
//! `h_k(x) = Π_{j<k} (x - a_j)/(x - conj a_j) · 1/(x - conj a_k)`, which span
//! `K_θ` for repeated zeros as well as simple ones and are mutually
//! orthogonal, `‖h_k‖² = π/Im a_k`. The orthonormal basis is
//! `e_k = √(Im a_k/π) h_k`.
//!
//! Partial fractions of `h_k` can have coefficients far larger than the
//! function itself, so no matrix is assembled from them. Inner products
//! `⟨f, e_k⟩` are residues of `f` at its lower poles against Taylor
//! coefficients of the product form of `e_k`, and the model operator
//! `A_θ f = x f - Λ1(f) θ` has the closed lower-triangular matrix
//! `a_k` on the diagonal and `2i √(Im a_j Im a_k)` below it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::blaschke::BlaschkeProduct;
use crate::error::{Result, SzegoError};
use crate::rational::{ComplexPolynomial, RationalFunction, Root};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Gram matrices with a larger condition number are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// `K_θ` with raw and orthonormal bases.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    theta: BlaschkeProduct,
    theta_rf: RationalFunction,
    basis: Vec<RationalFunction>,
    gram: DMatrix<C64>,
    /// `e_a = Σ_k to_onb[(k, a)] h_k`.
    to_onb: DMatrix<C64>,
    onb: Vec<RationalFunction>,
    condition: f64,
}

impl ModelSpace {
    pub fn new(theta: &BlaschkeProduct) -> Result<Self> {
        if !theta.is_normalized() {
            return Err(SzegoError::InvalidInput("model space needs a normalized θ".into()));
        }
        let zeros = theta.zeros();
        let m = zeros.len();
        if m == 0 {
            return Err(SzegoError::InvalidInput("trivial space: θ has no zeros".into()));
        }
        let mut basis = Vec::with_capacity(m);
        for k in 0..m {
            let num = ComplexPolynomial::from_roots(&zeros[..k]);
            let poles: Vec<C64> = zeros[..=k].iter().map(|a| a.conj()).collect();
            let roots = crate::rational::cluster_roots(&poles, crate::rational::MERGE_TOL);
            basis.push(RationalFunction::from_numerator_and_roots(&num, ONE, &roots)?);
        }
        let ims: Vec<f64> = zeros.iter().map(|a| a.im).collect();
        let (lo, hi) = ims.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        let condition = hi / lo;
        if condition > MAX_GRAM_CONDITION {
            return Err(SzegoError::IllConditioned { what: "model space gram matrix", cond: condition });
        }
        let gram = DMatrix::from_fn(m, m, |j, k| if j == k { C64::new(PI / ims[k], 0.0) } else { ZERO });
        let to_onb = DMatrix::from_fn(m, m, |j, k| if j == k { C64::new((ims[k] / PI).sqrt(), 0.0) } else { ZERO });
        let onb = (0..m).map(|k| basis[k].scale(to_onb[(k, k)])).collect();
        Ok(Self {
            theta: theta.clone(),
            theta_rf: theta.to_rational(),
            basis,
            gram,
            to_onb,
            onb,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn theta(&self) -> &BlaschkeProduct {
        &self.theta
    }

    pub fn theta_rational(&self) -> &RationalFunction {
        &self.theta_rf
    }

    /// Raw Takenaka–Malmquist basis.
    pub fn basis(&self) -> &[RationalFunction] {
        &self.basis
    }

    /// `gram[(j, k)] = ⟨h_k, h_j⟩`.
    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn gram_condition(&self) -> f64 {
        self.condition
    }

    pub fn orthonormal_basis(&self) -> &[RationalFunction] {
        &self.onb
    }

    /// Change of basis from orthonormal coordinates to raw coefficients.
    pub fn onb_matrix(&self) -> &DMatrix<C64> {
        &self.to_onb
    }

    /// Poles shared by every element of the space (conjugate zeros of θ).
    pub fn pole_roots(&self) -> Vec<Root> {
        self.theta_rf.pole_roots()
    }

    /// Raw-basis coefficients of the orthogonal projection of `f`.
    pub fn project(&self, f: &RationalFunction) -> Result<DVector<C64>> {
        let c = self.coords(f)?;
        Ok(DVector::from_fn(self.dim(), |k, _| c[k] * self.to_onb[(k, k)]))
    }

    /// Taylor coefficients of the orthonormal basis at `z` off the poles:
    /// row `k` holds the first `n` coefficients of `e_k(z + t)`, computed
    /// from the product form.
    pub fn onb_taylor(&self, z: C64, n: usize) -> DMatrix<C64> {
        let m = self.dim();
        let mut out = DMatrix::<C64>::zeros(m, n);
        // series of 1/(x - w) at z
        let inv_series = |w: C64| -> Vec<C64> {
            let d = ONE / (z - w);
            let mut v = Vec::with_capacity(n);
            let mut term = d;
            for _ in 0..n {
                v.push(term);
                term *= -d;
            }
            v
        };
        let mul = |a: &[C64], b: &[C64]| -> Vec<C64> {
            (0..n).map(|i| (0..=i).map(|j| a[j] * b[i - j]).sum()).collect()
        };
        let mut prefix = vec![ZERO; n];
        if n > 0 {
            prefix[0] = ONE;
        }
        for (k, &a) in self.theta.zeros().iter().enumerate() {
            let s = inv_series(a.conj());
            let e = mul(&prefix, &s);
            for j in 0..n {
                out[(k, j)] = e[j] * self.to_onb[(k, k)];
            }
            // prefix ← prefix · (1 + (conj a - a)/(x - conj a))
            let shift = a.conj() - a;
            let b: Vec<C64> = (0..n).map(|j| if j == 0 { ONE + shift * s[0] } else { shift * s[j] }).collect();
            prefix = mul(&prefix, &b);
        }
        out
    }

    /// Coordinates `⟨f, e_k⟩` in the orthonormal basis, for `f ∈ L²`.
    ///
    /// `⟨f, e_k⟩ = -2πi Σ_p Σ_m c_{p,m} conj(e_k^{(m-1)}(conj p)/(m-1)!)`
    /// over the poles `p` of `f` in the lower half-plane.
    pub fn coords(&self, f: &RationalFunction) -> Result<DVector<C64>> {
        f.check_l2("model space coordinates")?;
        let mut c = DVector::<C64>::zeros(self.dim());
        for p in f.poles().iter().filter(|p| p.z.im < 0.0) {
            let t = self.onb_taylor(p.z.conj(), p.coeffs.len());
            for k in 0..self.dim() {
                let s: C64 = p.coeffs.iter().enumerate().map(|(m, &cm)| cm * t[(k, m)].conj()).sum();
                c[k] += s;
            }
        }
        Ok(c * C64::new(0.0, -2.0 * PI))
    }

    /// `Σ c_k e_k`.
    pub fn from_coords(&self, c: &DVector<C64>) -> RationalFunction {
        let terms: Vec<(C64, &RationalFunction)> = c.iter().copied().zip(self.onb.iter()).collect();
        RationalFunction::combination(&terms)
    }

    /// `P_θ f = f - θ P₊(conj(θ) f)` evaluated in closed form.
    pub fn project_by_formula(&self, f: &RationalFunction) -> Result<RationalFunction> {
        let tail = self.theta_rf.conj_reflect().mul(f).hardy_project()?;
        Ok(f.sub(&self.theta_rf.mul(&tail)))
    }

    /// `1 - θ`.
    pub fn one_minus_theta(&self) -> RationalFunction {
        RationalFunction::constant(ONE).sub(&self.theta_rf)
    }

    /// `A_θ f = x f - Λ1(f) θ` for `f ∈ K_θ`.
    pub fn apply_a(&self, f: &RationalFunction) -> RationalFunction {
        let (l1, _) = f.laurent_coeffs();
        let xf = f.mul_poly(&ComplexPolynomial::x());
        xf.sub(&self.theta_rf.scale(l1))
    }

    /// Matrix of `A_θ` in the orthonormal basis, `a[(i, k)] = ⟨A_θ e_k, e_i⟩`.
    pub fn model_operator(&self) -> DMatrix<C64> {
        let z = self.theta.zeros();
        DMatrix::from_fn(self.dim(), self.dim(), |i, k| match i.cmp(&k) {
            std::cmp::Ordering::Equal => z[k],
            std::cmp::Ordering::Greater => C64::new(0.0, 2.0 * (z[i].im * z[k].im).sqrt()),
            std::cmp::Ordering::Less => ZERO,
        })
    }
}

/// Largest entry of `|⟨p e_j, p e_k⟩ - δ_jk|` over an orthonormal basis of
/// `K_ψ`; zero when multiplication by `p` is isometric on `K_ψ`.
pub fn isometry_defect(p: &RationalFunction, psi: &BlaschkeProduct) -> Result<f64> {
    let space = ModelSpace::new(psi)?;
    let prods: Vec<RationalFunction> = space.orthonormal_basis().iter().map(|e| p.mul(e)).collect();
    let mut worst: f64 = 0.0;
    for j in 0..prods.len() {
        for k in j..prods.len() {
            let v = prods[j].l2_inner(&prods[k])?;
            let target = if j == k { ONE } else { ZERO };
            worst = worst.max((v - target).norm());
        }
    }
    Ok(worst)
}
