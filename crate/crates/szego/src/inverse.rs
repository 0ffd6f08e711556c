//! Spectral data and the explicit inverse formula.
//!
//! From data `(λ_j, φ_j, ω_j, b_j)` the symbol is
//! `u(x) = (1/2πi) ⟨Q(x)⁻¹ D(λ e^{-iφ}) 𝟙, 𝟙⟩` with
//! `Q(x) = 𝒜* - x D(ν⁻²) - D(b(x))`, where `ν_j² = √(4π Im ω_j)/λ_j` and
//!
//! * `𝒜_jj = ω_j / (4π Im ω_j)`,
//! * `𝒜_kj = (i/2π)(λ_j² - λ_jλ_k e^{i(φ_j-φ_k)})/(λ_j² - λ_k²)` for `j ≠ k`.
//!
//! Each `b_j = Σ c/(α - x)` is linearized by auxiliary unknowns
//! `y = √c v_j/(α - x)`, which turns `Q(x)` into the Schur complement of a
//! linear pencil `M - xE` of size `deg θ`. The poles of `u` are the
//! eigenvalues of that pencil, and every evaluation of `Q⁻¹` goes through an
//! LU solve of the pencil, which stays regular at the real poles of `b`.
//! Principal parts of `u` and `g_j` are then read off by contour integrals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::blaschke::{psi_from_b, BlaschkeProduct, HerglotzData};
use crate::error::{Result, SzegoError};
use crate::hankel::HankelOperator;
use crate::linalg;
use crate::model_space::isometry_defect;
use crate::rational::{cluster_roots_by, RationalFunction, Root, CLUSTER_TOL};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Pole pairs closer than this multiple of their perturbation radius are
/// treated as one multiple pole.
pub const MULTIPLE_ROOT_RATIO: f64 = 1e6;

/// Data attached to one singular value `λ_j` of `H_u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub lambda: f64,
    pub phi: f64,
    pub omega: C64,
    #[serde(default)]
    pub b: HerglotzData,
}

impl Level {
    /// `ν² = √(4π Im ω)/λ`.
    pub fn nu_sq(&self) -> f64 {
        (4.0 * PI * self.omega.im).sqrt() / self.lambda
    }

    /// Dimension of the level space, `1 + #poles(b)` counting poles with a
    /// positive residue.
    pub fn dim(&self) -> usize {
        1 + self.b.residues.iter().filter(|&&c| c > 0.0).count()
    }
}

/// Spectral data, levels ordered by decreasing `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub levels: Vec<Level>,
}

impl SpectralData {
    pub fn validate(&self) -> Result<()> {
        for (j, l) in self.levels.iter().enumerate() {
            if !(l.lambda > 0.0) || !l.lambda.is_finite() {
                return Err(SzegoError::InvalidInput(format!("level {j}: invariant λ > 0 violated")));
            }
            if !l.phi.is_finite() || !l.omega.re.is_finite() || !l.omega.im.is_finite() {
                return Err(SzegoError::InvalidInput(format!("level {j}: φ and ω must be finite")));
            }
            if !(l.omega.im > 0.0) {
                return Err(SzegoError::InvalidInput(format!("level {j}: invariant Im ω > 0 violated")));
            }
            l.b.validate()
                .map_err(|e| SzegoError::InvalidInput(format!("level {j}: {e}")))?;
            if l.b.b != 0.0 {
                return Err(SzegoError::InvalidInput(format!("level {j}: invariant B = 0 violated in b")));
            }
        }
        for w in self.levels.windows(2) {
            if !(w[0].lambda > w[1].lambda) {
                return Err(SzegoError::InvalidInput(
                    "invariant λ_1 > λ_2 > … violated: levels must have strictly decreasing λ".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn nu_sq(&self) -> Vec<f64> {
        self.levels.iter().map(Level::nu_sq).collect()
    }

    /// `deg θ = Σ dim E_j`.
    pub fn total_degree(&self) -> usize {
        self.levels.iter().map(Level::dim).sum()
    }

    /// The matrix `𝒜`.
    pub fn generator_matrix(&self) -> DMatrix<C64> {
        let n = self.levels.len();
        DMatrix::from_fn(n, n, |k, j| {
            let (lj, lk) = (&self.levels[j], &self.levels[k]);
            if j == k {
                lj.omega / (4.0 * PI * lj.omega.im)
            } else {
                let e = C64::from_polar(1.0, lj.phi - lk.phi);
                let num = C64::new(lj.lambda * lj.lambda, 0.0) - e * (lj.lambda * lk.lambda);
                I / (2.0 * PI) * num / (lj.lambda * lj.lambda - lk.lambda * lk.lambda)
            }
        })
    }

    /// `D(λ e^{-iφ}) 𝟙`.
    pub fn weights(&self) -> DVector<C64> {
        DVector::from_iterator(
            self.levels.len(),
            self.levels.iter().map(|l| C64::from_polar(l.lambda, -l.phi)),
        )
    }
}

/// Largest entry of `|Im 𝒜 - (1/4π) 𝟙𝟙*|`.
pub fn imaginary_part_defect(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let im = (a - a.adjoint()) / C64::new(0.0, 2.0);
    let target = DMatrix::from_element(n, n, C64::new(1.0 / (4.0 * PI), 0.0));
    linalg::max_abs(&(im - target))
}

/// Largest entry of `|conj(𝒜)_jk λ_j e^{-iφ_j} - conj(𝒜)_kj λ_k e^{-iφ_k}|`,
/// the coordinate form of `𝒜* ℋ = ℋ 𝒜`.
pub fn intertwining_defect(sd: &SpectralData, a: &DMatrix<C64>) -> f64 {
    let w = sd.weights();
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let d = a[(j, k)].conj() * w[j] - a[(k, j)].conj() * w[k];
            worst = worst.max(d.norm());
        }
    }
    worst
}

/// Linear pencil `M - xE` whose Schur complement on the first `N`
/// coordinates is `Q(x)`.
#[derive(Clone, Debug)]
struct Pencil {
    m: DMatrix<C64>,
    e: Vec<f64>,
    n: usize,
}

impl Pencil {
    fn new(sd: &SpectralData, a: &DMatrix<C64>, sharp: bool) -> Self {
        let n = sd.len();
        let aux: Vec<(usize, f64, f64)> = sd
            .levels
            .iter()
            .enumerate()
            .flat_map(|(j, l)| {
                l.b.poles
                    .iter()
                    .zip(&l.b.residues)
                    .filter(|(_, &c)| c > 0.0)
                    .map(move |(&al, &c)| (j, al, c))
            })
            .collect();
        let size = n + aux.len();
        let mut m = DMatrix::<C64>::zeros(size, size);
        let top = if sharp { a.clone() } else { a.adjoint() };
        m.view_mut((0, 0), (n, n)).copy_from(&top);
        let mut e = vec![1.0; size];
        for (j, l) in sd.levels.iter().enumerate() {
            e[j] = 1.0 / l.nu_sq();
        }
        for (idx, &(j, al, c)) in aux.iter().enumerate() {
            let r = n + idx;
            let s = C64::new(-c.sqrt(), 0.0);
            m[(j, r)] = s;
            m[(r, j)] = s;
            m[(r, r)] = C64::new(al, 0.0);
        }
        Self { m, e, n }
    }

    fn size(&self) -> usize {
        self.e.len()
    }

    fn shifted(&self, x: C64) -> DMatrix<C64> {
        let mut s = self.m.clone();
        for (k, &ek) in self.e.iter().enumerate() {
            s[(k, k)] -= x * ek;
        }
        s
    }

    /// `E^{-1/2} M E^{-1/2}`, whose eigenvalues are the poles of `u`.
    fn reduced(&self) -> DMatrix<C64> {
        let sq: Vec<f64> = self.e.iter().map(|v| v.sqrt()).collect();
        DMatrix::from_fn(self.size(), self.size(), |i, j| self.m[(i, j)] / (sq[i] * sq[j]))
    }

    /// Poles with multiplicities. Two eigenvalues are merged when they lie
    /// within [`CLUSTER_TOL`] of each other, or when their distance is below
    /// [`MULTIPLE_ROOT_RATIO`] times the first-order perturbation radius
    /// `ε ‖K‖ κ`, `κ` the smaller of the two eigenvalue condition numbers. Both
    /// halves of a defective eigenvalue split by rounding are ill-conditioned,
    /// with radii comparable to the split.
    fn poles(&self) -> Result<Vec<Root>> {
        let k = self.reduced();
        let vals = linalg::eigenvalues(&k)?;
        let radius = f64::EPSILON * k.norm();
        let kappa: Vec<f64> = vals
            .iter()
            .map(|&z| linalg::eigenvalue_condition(&k, z))
            .collect::<Result<_>>()?;
        Ok(cluster_roots_by(&vals, |i, j| {
            let d = (vals[i] - vals[j]).norm();
            let scale = 1.0 + vals[i].norm().max(vals[j].norm());
            d <= CLUSTER_TOL * scale || d <= MULTIPLE_ROOT_RATIO * radius * kappa[i].min(kappa[j])
        }))
    }

    /// `Q(x)⁻¹ r`.
    fn solve(&self, x: C64, r: &DVector<C64>) -> Result<DVector<C64>> {
        let mut rhs = DVector::zeros(self.size());
        rhs.rows_mut(0, self.n).copy_from(r);
        let sol = linalg::solve(&self.shifted(x), &rhs, "inverse pencil")?;
        Ok(sol.rows(0, self.n).into_owned())
    }

    /// `Q(x)⁻ᵀ r`.
    fn solve_transpose(&self, x: C64, r: &DVector<C64>) -> Result<DVector<C64>> {
        let mut rhs = DVector::zeros(self.size());
        rhs.rows_mut(0, self.n).copy_from(r);
        let sol = linalg::solve(&self.shifted(x).transpose(), &rhs, "inverse pencil")?;
        Ok(sol.rows(0, self.n).into_owned())
    }
}

/// Result of the inverse formula with everything needed for verification.
#[derive(Clone, Debug)]
pub struct InverseSolution {
    data: SpectralData,
    nu_sq: Vec<f64>,
    a: DMatrix<C64>,
    pencil: Pencil,
    poles: Vec<Root>,
    u: RationalFunction,
    g: Vec<RationalFunction>,
    theta: BlaschkeProduct,
    psi: Vec<BlaschkeProduct>,
}

impl InverseSolution {
    pub fn new(sd: &SpectralData) -> Result<Self> {
        sd.validate()?;
        let nu_sq = sd.nu_sq();
        let a = sd.generator_matrix();
        let pencil = Pencil::new(sd, &a, false);
        let mut poles = if sd.is_empty() { Vec::new() } else { pencil.poles()? };
        let mut sol = Self {
            data: sd.clone(),
            nu_sq,
            a,
            pencil,
            poles: Vec::new(),
            u: RationalFunction::zero(),
            g: Vec::new(),
            theta: BlaschkeProduct::new(Vec::new())?,
            psi: Vec::new(),
        };
        sol.polish_poles(&mut poles);
        if let Some(p) = poles.iter().find(|p| !(p.z.im < 0.0)) {
            return Err(SzegoError::Inconsistent(format!(
                "reconstructed pole {} is not in the lower half-plane",
                p.z
            )));
        }
        sol.poles = poles;
        let w = sd.weights();
        let ones = DVector::from_element(sd.len(), ONE);
        let cst = ONE / C64::new(0.0, 2.0 * PI);
        let pencil = sol.pencil.clone();
        sol.u = RationalFunction::from_evaluator(&sol.poles, |_| f64::INFINITY, false, |z| {
            pencil.solve(z, &w).map(|v| v.sum() * cst).unwrap_or(C64::new(f64::NAN, f64::NAN))
        });
        sol.g = (0..sd.len())
            .map(|j| {
                RationalFunction::from_evaluator(&sol.poles, |_| f64::INFINITY, false, |z| {
                    pencil
                        .solve_transpose(z, &ones)
                        .map(|v| v[j] * cst)
                        .unwrap_or(C64::new(f64::NAN, f64::NAN))
                })
            })
            .collect();
        if sol.u.coeff_scale().is_nan() || sol.g.iter().any(|g| g.coeff_scale().is_nan()) {
            return Err(SzegoError::Singular("inverse pencil on a contour"));
        }
        let zeros = sol
            .poles
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.z.conj(), r.multiplicity))
            .collect();
        sol.theta = BlaschkeProduct::new(zeros)?;
        sol.psi = sd
            .levels
            .iter()
            .zip(&sol.nu_sq)
            .map(|(l, &nu)| psi_from_b(&l.b, nu, 1.0, 0.0))
            .collect::<Result<_>>()?;
        Ok(sol)
    }

    /// Newton refinement of simple poles on `det Q`, using
    /// `(log det Q)' = tr(Q⁻¹ Q')` with `Q' = -D(ν⁻²) - D(b')`.
    fn polish_poles(&self, poles: &mut [Root]) {
        let seps: Vec<f64> = (0..poles.len())
            .map(|i| {
                poles
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| (q.z - poles[i].z).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        for (p, sep) in poles.iter_mut().zip(seps) {
            if p.multiplicity != 1 {
                continue;
            }
            for _ in 0..3 {
                let x = p.z;
                let Ok(qinv) = linalg::inverse(&self.q_matrix(x), "Q") else { break };
                let mut tr = ZERO;
                for (j, l) in self.data.levels.iter().enumerate() {
                    let dq = -1.0 / self.nu_sq[j] - l.b.derivative(x);
                    tr += qinv[(j, j)] * dq;
                }
                let step = ONE / tr;
                if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 0.1 * sep.min(1.0 + x.norm()) {
                    break;
                }
                p.z = x - step;
                if step.norm() <= 1e-16 * (1.0 + x.norm()) {
                    break;
                }
            }
        }
    }

    pub fn data(&self) -> &SpectralData {
        &self.data
    }

    pub fn generator_matrix(&self) -> &DMatrix<C64> {
        &self.a
    }

    pub fn nu_sq(&self) -> &[f64] {
        &self.nu_sq
    }

    /// Poles of `u` with multiplicities.
    pub fn poles(&self) -> &[Root] {
        &self.poles
    }

    pub fn u(&self) -> &RationalFunction {
        &self.u
    }

    /// `g_j = P_j(1 - θ)`.
    pub fn g(&self) -> &[RationalFunction] {
        &self.g
    }

    pub fn theta(&self) -> &BlaschkeProduct {
        &self.theta
    }

    /// Inner functions `ψ_j` with the representative `κ = 1`, `B = 0`.
    pub fn psi(&self) -> &[BlaschkeProduct] {
        &self.psi
    }

    /// `Q(x) = 𝒜* - x D(ν⁻²) - D(b(x))`.
    pub fn q_matrix(&self, x: C64) -> DMatrix<C64> {
        self.q_generic(x, false)
    }

    /// `Q#(x) = 𝒜 - x D(ν⁻²) - D(b(x))`.
    pub fn q_sharp(&self, x: C64) -> DMatrix<C64> {
        self.q_generic(x, true)
    }

    fn q_generic(&self, x: C64, sharp: bool) -> DMatrix<C64> {
        let mut q = if sharp { self.a.clone() } else { self.a.adjoint() };
        for (j, l) in self.data.levels.iter().enumerate() {
            q[(j, j)] -= x / self.nu_sq[j] + l.b.eval(x);
        }
        q
    }

    /// `u(x)` evaluated through the pencil.
    pub fn eval_u(&self, x: C64) -> Result<C64> {
        let v = self.pencil.solve(x, &self.data.weights())?;
        Ok(v.sum() / C64::new(0.0, 2.0 * PI))
    }

    /// `(1/2πi)⟨Q(x)⁻¹ r, 𝟙⟩`.
    pub fn eval_functional(&self, x: C64, r: &DVector<C64>) -> Result<C64> {
        Ok(self.pencil.solve(x, r)?.sum() / C64::new(0.0, 2.0 * PI))
    }

    /// `(g_1(x), …, g_N(x)) = (1/2πi) Q(x)⁻ᵀ 𝟙`.
    pub fn eval_g(&self, x: C64) -> Result<DVector<C64>> {
        let ones = DVector::from_element(self.data.len(), ONE);
        Ok(self.pencil.solve_transpose(x, &ones)? / C64::new(0.0, 2.0 * PI))
    }

    /// `det Q#(x) / det Q(x)`.
    pub fn theta_from_determinants(&self, x: C64) -> C64 {
        self.q_sharp(x).determinant() / self.q_matrix(x).determinant()
    }

    /// `‖1 - ψ_j‖`.
    fn one_minus_psi_norm(&self, j: usize) -> f64 {
        self.psi[j].one_minus_norm_sq().sqrt()
    }

    /// `p_j = i e^{-iφ_j/2} (‖1-ψ_j‖/ν_j) g_j/(1-ψ_j)` evaluated pointwise.
    pub fn eval_p(&self, j: usize, x: C64) -> Result<C64> {
        let g = self.eval_g(x)?[j];
        Ok(self.p_prefactor(j) * g / (ONE - self.psi[j].eval(x)))
    }

    fn p_prefactor(&self, j: usize) -> C64 {
        I * C64::from_polar(1.0, -self.data.levels[j].phi / 2.0) * (self.one_minus_psi_norm(j) / self.nu_sq[j].sqrt())
    }

    /// The multiplier `p_j` in partial-fraction form.
    pub fn p(&self, j: usize) -> RationalFunction {
        let cap = |z: C64| 0.9 * z.im.abs();
        RationalFunction::from_evaluator(&self.poles, cap, true, |z| {
            self.eval_p(j, z).unwrap_or(C64::new(f64::NAN, f64::NAN))
        })
    }

    /// Contraction `(B, β)` with `p = D(e^{-iφ/2})(I - B D(ψ))⁻¹ β`.
    pub fn contraction(&self) -> Result<(DMatrix<C64>, DVector<C64>)> {
        let n = self.data.len();
        let nu: Vec<f64> = self.nu_sq.iter().map(|v| v.sqrt()).collect();
        let gamma: Vec<f64> = (0..n).map(|j| self.one_minus_psi_norm(j) / (2.0 * PI.sqrt())).collect();
        let mut a1 = self.a.clone();
        for j in 0..n {
            a1[(j, j)] -= self.psi[j].herglotz_shift() / self.nu_sq[j];
        }
        let scale: Vec<f64> = (0..n).map(|j| nu[j] / gamma[j]).collect();
        let a2 = DMatrix::from_fn(n, n, |r, c| a1[(r, c)] * scale[r] * scale[c]);
        let id = DMatrix::<C64>::identity(n, n);
        let left = linalg::inverse(&(a2.conjugate() - &id * I), "contraction")?;
        let bmat = &left * (a2.conjugate() + &id * I);
        let rhs = DVector::from_iterator(n, scale.iter().map(|&s| C64::new(s, 0.0)));
        let beta = &left * rhs / C64::new(PI.sqrt(), 0.0);
        Ok((bmat, beta))
    }

    /// `p(x)` from the contraction representation.
    pub fn p_from_contraction(&self, x: C64, bmat: &DMatrix<C64>, beta: &DVector<C64>) -> Result<DVector<C64>> {
        let n = self.data.len();
        let dpsi = DMatrix::from_fn(n, n, |r, c| if r == c { self.psi[r].eval(x) } else { ZERO });
        let sys = DMatrix::<C64>::identity(n, n) - bmat * dpsi;
        let v = linalg::solve(&sys, beta, "contraction resolvent")?;
        Ok(DVector::from_iterator(
            n,
            v.iter().enumerate().map(|(j, z)| z * C64::from_polar(1.0, -self.data.levels[j].phi / 2.0)),
        ))
    }

    /// Runs the full identity suite; `tol` is the pass threshold for the
    /// defect entries.
    pub fn verify(&self, tol: f64) -> Result<VerificationReport> {
        let mut rep = VerificationReport::default();
        let sd = &self.data;
        let n = sd.len();
        if n == 0 {
            return Ok(rep);
        }

        rep.push_max("resolvent_bound", self.resolvent_bound(), 1e12);
        rep.push("imaginary_part_identity", imaginary_part_defect(&self.a), tol);
        rep.push("intertwining_identity", intertwining_defect(sd, &self.a), tol);
        let min_im = linalg::eigenvalues(&self.a)?
            .iter()
            .map(|z| z.im)
            .fold(f64::INFINITY, f64::min);
        rep.push_min("generator_min_imag_eigenvalue", min_im, 0.0);

        let mut gram_def: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let v = self.g[j].l2_inner(&self.g[k])?;
                let target = if j == k { self.nu_sq[j] } else { 0.0 };
                gram_def = gram_def.max((v - target).norm() / self.nu_sq[j].max(self.nu_sq[k]));
            }
        }
        rep.push("gram_of_g", gram_def, tol);

        let probes = probe_points(&self.poles);
        let mut sum_def: f64 = 0.0;
        let mut theta_def: f64 = 0.0;
        let mut unimod: f64 = 0.0;
        for &x in &probes {
            let th = self.theta.eval(x);
            let gsum: C64 = self.g.iter().map(|g| g.eval(x)).sum();
            sum_def = sum_def.max((gsum + th - ONE).norm());
            if x.im > 0.0 {
                theta_def = theta_def.max((self.theta_from_determinants(x) - th).norm());
            } else {
                unimod = unimod.max((th.norm() - 1.0).abs());
            }
        }
        rep.push("sum_g_plus_theta", sum_def, tol);
        rep.push("theta_determinant_ratio", theta_def, tol);
        rep.push("theta_unimodular", unimod, tol);

        let (bmat, beta) = self.contraction()?;
        let id = DMatrix::<C64>::identity(n, n);
        let contr = linalg::max_abs(&(&bmat * bmat.adjoint() + &beta * beta.adjoint() - id));
        rep.push("contraction_unitarity", contr, tol);
        let mut p_def: f64 = 0.0;
        let mut iso: f64 = 0.0;
        let ps: Vec<RationalFunction> = (0..n).map(|j| self.p(j)).collect();
        for &x in probes.iter().filter(|x| x.im > 0.0) {
            let pc = self.p_from_contraction(x, &bmat, &beta)?;
            for j in 0..n {
                p_def = p_def.max((pc[j] - ps[j].eval(x)).norm() / (1.0 + pc[j].norm()));
            }
        }
        for j in 0..n {
            iso = iso.max(isometry_defect(&ps[j], &self.psi[j])?);
        }
        rep.push("multiplier_contraction_form", p_def, tol);
        rep.push("isometry_defect", iso, tol);

        let hank = HankelOperator::build(&self.u)?;
        let levels = hank.direct_levels()?;
        let mut eig_res: f64 = 0.0;
        for l in &levels {
            let uj = &l.g * C64::from_polar(l.lambda, -l.phi);
            let r = hank.apply(&uj) - &uj * C64::from_polar(l.lambda, l.phi);
            eig_res = eig_res.max(r.norm() / (1.0 + uj.norm()));
        }
        rep.push("eigen_equation_residual", eig_res, tol);
        let back = SpectralData {
            levels: levels
                .iter()
                .map(|l| Level { lambda: l.lambda, phi: l.phi, omega: l.omega, b: l.b.clone() })
                .collect(),
        };
        let cmp = compare_spectral_data(sd, &back);
        rep.push("round_trip_lambda", cmp.lambda, tol);
        rep.push("round_trip_phi", cmp.phi, tol);
        rep.push("round_trip_omega", cmp.omega, tol);
        rep.push("round_trip_b", cmp.b, tol);
        let mut gen_def: f64 = 0.0;
        for (l, dl) in sd.levels.iter().zip(&levels) {
            let ag = dl.g.dotc(&(hank.model_operator() * &dl.g));
            gen_def = gen_def.max((ag - l.omega / (l.lambda * l.lambda)).norm() / (1.0 + ag.norm()));
        }
        rep.push("generator_value_round_trip", gen_def, tol);
        Ok(rep)
    }

    /// `max ‖Q(x)⁻¹‖₂` over log-spaced radii `1e-3 … 1e6` and 16 angles in
    /// the upper half-plane.
    pub fn resolvent_bound(&self) -> f64 {
        let radii = 313;
        let angles = 16;
        let mut worst: f64 = 0.0;
        for r in 0..radii {
            let rad = 10f64.powf(-3.0 + 9.0 * r as f64 / (radii - 1) as f64);
            for k in 0..angles {
                let ang = PI * (k as f64 + 0.5) / angles as f64;
                let x = C64::from_polar(rad, ang);
                let s = linalg::min_singular_value(&self.q_matrix(x));
                worst = worst.max(1.0 / s);
            }
        }
        worst
    }
}

/// Probe points: a real grid and points in the upper half-plane, scaled to
/// the pole cloud.
pub fn probe_points(poles: &[Root]) -> Vec<C64> {
    let r = 1.0 + poles.iter().map(|p| p.z.norm()).fold(0.0, f64::max);
    let mut out = Vec::new();
    for k in 0..41 {
        let t = -1.0 + 2.0 * k as f64 / 40.0;
        out.push(C64::new(r * 2.0 * t + 0.0123, 0.0));
        out.push(C64::new(r * t, 0.1 + r * (k % 5) as f64 / 4.0));
    }
    out
}

/// Inverse formula: the rational symbol with the given spectral data.
pub fn reconstruct_u(sd: &SpectralData) -> Result<RationalFunction> {
    Ok(InverseSolution::new(sd)?.u)
}

/// Largest errors between two spectral data sets, level by level: relative
/// for `λ`, absolute modulo `2π` for `φ`, relative for `ω` and for `b` (poles
/// and residues).
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct DataComparison {
    pub lambda: f64,
    pub phi: f64,
    pub omega: f64,
    pub b: f64,
    pub structure_mismatch: bool,
}

pub fn compare_spectral_data(a: &SpectralData, b: &SpectralData) -> DataComparison {
    let mut c = DataComparison::default();
    if a.len() != b.len() {
        c.structure_mismatch = true;
        c.lambda = f64::INFINITY;
        c.phi = f64::INFINITY;
        c.omega = f64::INFINITY;
        c.b = f64::INFINITY;
        return c;
    }
    for (x, y) in a.levels.iter().zip(&b.levels) {
        c.lambda = c.lambda.max((x.lambda - y.lambda).abs() / x.lambda);
        let d = (x.phi - y.phi).rem_euclid(2.0 * PI);
        c.phi = c.phi.max(d.min(2.0 * PI - d));
        c.omega = c.omega.max((x.omega - y.omega).norm() / x.omega.norm());
        let bx = x.b.canonical();
        let by = y.b.canonical();
        if bx.poles.len() != by.poles.len() {
            c.structure_mismatch = true;
            c.b = f64::INFINITY;
            continue;
        }
        for k in 0..bx.poles.len() {
            c.b = c.b.max((bx.poles[k] - by.poles[k]).abs() / (1.0 + bx.poles[k].abs()));
            c.b = c.b.max((bx.residues[k] - by.residues[k]).abs() / bx.residues[k].abs().max(1e-300));
        }
    }
    c
}

/// One named check of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"max"`: pass when `value ≤ threshold`; `"min"`: pass when
    /// `value > threshold`.
    pub kind: &'static str,
    pub pass: bool,
}

/// Collection of named checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn push(&mut self, name: &str, value: f64, threshold: f64) {
        self.push_max(name, value, threshold)
    }

    pub fn push_max(&mut self, name: &str, value: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            threshold,
            kind: "max",
            pass: value.is_finite() && value <= threshold,
        });
    }

    pub fn push_min(&mut self, name: &str, value: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            threshold,
            kind: "min",
            pass: value.is_finite() && value > threshold,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn worked() -> SpectralData {
        SpectralData {
            levels: vec![Level {
                lambda: 1.0,
                phi: 0.0,
                omega: c64(0.0, 1.0 / (4.0 * PI)),
                b: HerglotzData::zero(),
            }],
        }
    }

    #[test]
    fn worked_example_symbol() {
        let sol = InverseSolution::new(&worked()).unwrap();
        let u = sol.u();
        assert_eq!(u.poles().len(), 1);
        let p = &u.poles()[0];
        assert!((p.z - c64(0.0, -1.0 / (4.0 * PI))).norm() < 1e-14);
        assert!((p.coeffs[0] - c64(0.0, 1.0 / (2.0 * PI))).norm() < 1e-14);
    }

    #[test]
    fn two_level_generator_entries() {
        let sd = SpectralData {
            levels: vec![
                Level { lambda: 2.0, phi: 0.0, omega: c64(0.0, 1.0), b: HerglotzData::zero() },
                Level { lambda: 1.0, phi: 0.0, omega: c64(0.0, 1.0), b: HerglotzData::zero() },
            ],
        };
        let a = sd.generator_matrix();
        assert!((a[(0, 1)] - c64(0.0, 1.0 / (6.0 * PI))).norm() < 1e-15);
        assert!((a[(1, 0)] - c64(0.0, 1.0 / (3.0 * PI))).norm() < 1e-15);
    }

    #[test]
    fn worked_contraction() {
        let sol = InverseSolution::new(&worked()).unwrap();
        let (b, beta) = sol.contraction().unwrap();
        let fp = 4.0 * PI;
        assert!((b[(0, 0)] - c64(-(fp - 1.0) / (fp + 1.0), 0.0)).norm() < 1e-14);
        assert!((beta[0] - c64(0.0, 4.0 * PI.sqrt() / (fp + 1.0))).norm() < 1e-14);
    }
}
