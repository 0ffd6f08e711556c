//! Polynomials and rational functions in partial-fraction form.
//!
//! A [`RationalFunction`] is stored as a polynomial part plus a list of
//! [`PoleTerm`]s, `f(x) = P(x) + Σ_p Σ_k c_{p,k} (x - p)^{-k}`. Products,
//! conjugate reflection, Hardy projection and `L²(ℝ)` inner products are
//! computed exactly from this representation: Taylor and Laurent coefficients
//! of every pole term are known in closed form, so no quadrature is involved.
//!
//! The Hardy space here is `H²(ℂ₊)`: a rational function belongs to it when
//! its poles lie in the open lower half-plane and it vanishes at infinity.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Result, SzegoError};
use crate::linalg;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative distance below which two pole locations are the same point in
/// arithmetic (`|p - q| ≤ MERGE_TOL·(1 + |p|)`).
pub const MERGE_TOL: f64 = 1e-13;

/// Relative distance below which computed roots are merged into a single
/// root of higher multiplicity.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Poles closer than this to the real axis (relative to `1 + |p|`) are
/// treated as real.
pub const REAL_AXIS_TOL: f64 = 1e-13;

#[inline]
fn same_point(p: C64, q: C64) -> bool {
    (p - q).norm() <= MERGE_TOL * (1.0 + p.norm())
}

/// Lexicographic order on (real part, imaginary part).
pub fn canonical_cmp(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Complex polynomial with coefficients in ascending order of degree.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub z: C64,
    pub multiplicity: usize,
}

impl ComplexPolynomial {
    /// Builds a polynomial from ascending coefficients; exact trailing zeros
    /// are removed.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    /// Monic polynomial with the given roots (repeated as listed).
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(ZERO)
                        + other.coeffs.get(k).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d
            .degree()
            .ok_or_else(|| SzegoError::InvalidInput("division by the zero polynomial".into()))?;
        let Some(dn) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if dn < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let mut q = vec![ZERO; dn - dd + 1];
        for k in (0..=dn - dd).rev() {
            let f = rem[k + dd] / lead;
            q[k] = f;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= f * dc;
            }
        }
        rem.truncate(dd);
        Ok((Self::new(q), Self::new(rem)))
    }

    /// Coefficients of `t ↦ p(z + t)`, ascending.
    pub fn taylor_at(&self, z: C64) -> Vec<C64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let next = c[k + 1];
                c[k] += z * next;
            }
        }
        c
    }

    /// `z ↦ conj(p(conj z))`.
    pub fn conj_reflect(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Roots by companion-matrix eigenvalues, clustering within
    /// [`CLUSTER_TOL`] and two Newton polishing steps per cluster.
    pub fn roots(&self) -> Result<Vec<Root>> {
        let n = self
            .degree()
            .ok_or_else(|| SzegoError::InvalidInput("roots of the zero polynomial".into()))?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading();
        let comp = DMatrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -self.coeffs[n - 1 - j] / lead
            } else if i == j + 1 {
                ONE
            } else {
                ZERO
            }
        });
        let vals = linalg::eigenvalues(&comp)?;
        let mut roots = cluster_roots(&vals, CLUSTER_TOL);
        let dp = self.derivative();
        for r in roots.iter_mut() {
            // Newton with the multiplicity as step factor; guarded so that
            // the residual never grows.
            let m = r.multiplicity as f64;
            for _ in 0..2 {
                let f = self.eval(r.z);
                let df = dp.eval(r.z);
                if df.norm() == 0.0 {
                    break;
                }
                let cand = r.z - f / df * m;
                if self.eval(cand).norm() <= f.norm() {
                    r.z = cand;
                }
            }
        }
        roots.sort_by(|a, b| canonical_cmp(&a.z, &b.z));
        Ok(roots)
    }
}

/// Groups points closer than `tol·(1 + |p|)` (single linkage) and replaces
/// each group by its centroid with the group size as multiplicity. Output is
/// sorted canonically.
pub fn cluster_roots(vals: &[C64], tol: f64) -> Vec<Root> {
    cluster_roots_by(vals, |i, j| {
        let scale = 1.0 + vals[i].norm().max(vals[j].norm());
        (vals[i] - vals[j]).norm() <= tol * scale
    })
}

/// Single-linkage grouping of `vals` under the pair predicate `close(i, j)`,
/// each group replaced by its centroid. Output is sorted canonically.
pub fn cluster_roots_by(vals: &[C64], close: impl Fn(usize, usize) -> bool) -> Vec<Root> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let nx = p[j];
            p[j] = r;
            j = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if close(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += vals[i];
                g.2 += 1;
            }
            None => groups.push((r, vals[i], 1)),
        }
    }
    let mut roots: Vec<Root> = groups
        .into_iter()
        .map(|(_, s, m)| Root { z: s / m as f64, multiplicity: m })
        .collect();
    roots.sort_by(|a, b| canonical_cmp(&a.z, &b.z));
    roots
}

// ---------------------------------------------------------------------------
// Rational functions
// ---------------------------------------------------------------------------

/// Principal part of a rational function at one pole: `Σ_k coeffs[k]·(x - z)^{-(k+1)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleTerm {
    pub z: C64,
    pub coeffs: Vec<C64>,
}

impl PoleTerm {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn eval(&self, x: C64) -> C64 {
        let inv = ONE / (x - self.z);
        let mut pw = inv;
        let mut s = ZERO;
        for &c in &self.coeffs {
            s += c * pw;
            pw *= inv;
        }
        s
    }

    /// Taylor coefficients of this term at a point `w ≠ z`, `n` terms.
    fn taylor_at(&self, w: C64, n: usize, out: &mut [C64]) {
        let d = w - self.z;
        let dinv = ONE / d;
        for (k0, &c) in self.coeffs.iter().enumerate() {
            let order = (k0 + 1) as f64;
            // c·(t + d)^{-order} = Σ_j c·binom(-order, j)·d^{-order-j} t^j
            let mut term = c * dinv.powi(k0 as i32 + 1);
            for (j, o) in out.iter_mut().enumerate().take(n) {
                *o += term;
                term *= -dinv * ((order + j as f64) / (j as f64 + 1.0));
            }
        }
    }

    /// Coefficients of `x^{-1}, …, x^{-n}` in the expansion at infinity.
    fn infinity_expansion(&self, n: usize, out: &mut [C64]) {
        for (k0, &c) in self.coeffs.iter().enumerate() {
            let k = k0 + 1;
            // c·(x - z)^{-k} = c Σ_j binom(k+j-1, j) z^j x^{-k-j}
            let mut term = c;
            let mut j = 0usize;
            while k + j <= n {
                out[k + j - 1] += term;
                term *= self.z * ((k + j) as f64 / (j as f64 + 1.0));
                j += 1;
            }
        }
    }
}

/// Rational function in partial-fraction form.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RationalFunction {
    poly: ComplexPolynomial,
    poles: Vec<PoleTerm>,
}

impl RationalFunction {
    /// Canonical construction: coincident poles are merged, exact trailing
    /// zero coefficients dropped and poles sorted by (Re, Im).
    pub fn new(poly: ComplexPolynomial, poles: Vec<PoleTerm>) -> Self {
        let mut merged: Vec<PoleTerm> = Vec::with_capacity(poles.len());
        for p in poles {
            match merged.iter_mut().find(|q| same_point(q.z, p.z)) {
                Some(q) => {
                    if q.coeffs.len() < p.coeffs.len() {
                        q.coeffs.resize(p.coeffs.len(), ZERO);
                    }
                    for (a, b) in q.coeffs.iter_mut().zip(p.coeffs.iter()) {
                        *a += b;
                    }
                }
                None => merged.push(p),
            }
        }
        for q in merged.iter_mut() {
            while q.coeffs.last() == Some(&ZERO) {
                q.coeffs.pop();
            }
        }
        merged.retain(|q| !q.coeffs.is_empty());
        merged.sort_by(|a, b| canonical_cmp(&a.z, &b.z));
        Self { poly, poles: merged }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::new(ComplexPolynomial::constant(c), Vec::new())
    }

    pub fn polynomial(p: ComplexPolynomial) -> Self {
        Self::new(p, Vec::new())
    }

    /// `c / (x - z)^order`.
    pub fn pole(z: C64, order: usize, c: C64) -> Self {
        let mut coeffs = vec![ZERO; order];
        if order > 0 {
            coeffs[order - 1] = c;
        }
        Self::new(ComplexPolynomial::zero(), vec![PoleTerm { z, coeffs }])
    }

    pub fn poly(&self) -> &ComplexPolynomial {
        &self.poly
    }

    pub fn poles(&self) -> &[PoleTerm] {
        &self.poles
    }

    /// Sum of pole orders (McMillan degree of the strictly proper part).
    pub fn pole_degree(&self) -> usize {
        self.poles.iter().map(PoleTerm::order).sum()
    }

    /// Pole locations with their orders.
    pub fn pole_roots(&self) -> Vec<Root> {
        self.poles
            .iter()
            .map(|p| Root { z: p.z, multiplicity: p.order() })
            .collect()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.poly.eval(x) + self.poles.iter().map(|p| p.eval(x)).sum::<C64>()
    }

    /// Largest modulus among all stored coefficients.
    pub fn coeff_scale(&self) -> f64 {
        self.poly
            .coeffs()
            .iter()
            .chain(self.poles.iter().flat_map(|p| p.coeffs.iter()))
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.poly.scale(s),
            self.poles
                .iter()
                .map(|p| PoleTerm { z: p.z, coeffs: p.coeffs.iter().map(|&c| c * s).collect() })
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut poles = self.poles.clone();
        poles.extend(other.poles.iter().cloned());
        Self::new(self.poly.add(&other.poly), poles)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Linear combination `Σ c_k f_k`.
    pub fn combination(terms: &[(C64, &RationalFunction)]) -> Self {
        let mut poly = ComplexPolynomial::zero();
        let mut poles = Vec::new();
        for (c, f) in terms {
            poly = poly.add(&f.poly.scale(*c));
            poles.extend(f.poles.iter().map(|p| PoleTerm {
                z: p.z,
                coeffs: p.coeffs.iter().map(|&a| a * c).collect(),
            }));
        }
        Self::new(poly, poles)
    }

    pub fn derivative(&self) -> Self {
        let poles = self
            .poles
            .iter()
            .map(|p| {
                let mut coeffs = vec![ZERO; p.coeffs.len() + 1];
                for (k0, &c) in p.coeffs.iter().enumerate() {
                    coeffs[k0 + 1] = -c * (k0 + 1) as f64;
                }
                PoleTerm { z: p.z, coeffs }
            })
            .collect();
        Self::new(self.poly.derivative(), poles)
    }

    /// `z ↦ conj(f(conj z))`; on the real line this is the complex conjugate.
    pub fn conj_reflect(&self) -> Self {
        Self::new(
            self.poly.conj_reflect(),
            self.poles
                .iter()
                .map(|p| PoleTerm {
                    z: p.z.conj(),
                    coeffs: p.coeffs.iter().map(|c| c.conj()).collect(),
                })
                .collect(),
        )
    }

    fn principal_at(&self, z: C64) -> &[C64] {
        self.poles
            .iter()
            .find(|p| same_point(p.z, z))
            .map(|p| p.coeffs.as_slice())
            .unwrap_or(&[])
    }

    /// First `n` Taylor coefficients at `z` of `f` minus its principal part
    /// at `z` (if `z` is a pole).
    pub fn regular_taylor_at(&self, z: C64, n: usize) -> Vec<C64> {
        let mut out = vec![ZERO; n];
        if n == 0 {
            return out;
        }
        for (o, c) in out.iter_mut().zip(self.poly.taylor_at(z)) {
            *o += c;
        }
        for p in &self.poles {
            if !same_point(p.z, z) {
                p.taylor_at(z, n, &mut out);
            }
        }
        out
    }

    /// Coefficients `s_1, …, s_n` of the strictly proper part at infinity,
    /// `f - P = Σ s_k x^{-k}`.
    pub fn infinity_expansion(&self, n: usize) -> Vec<C64> {
        let mut out = vec![ZERO; n];
        for p in &self.poles {
            p.infinity_expansion(n, &mut out);
        }
        out
    }

    /// `(Λ1, Λ2)` with `f = P + Λ1/x + Λ2/x² + O(x⁻³)`.
    pub fn laurent_coeffs(&self) -> (C64, C64) {
        let s = self.infinity_expansion(2);
        (s[0], s[1])
    }

    /// [`Self::laurent_coeffs`] for functions bounded at infinity; a
    /// polynomial part of positive degree is an error.
    pub fn laurent_at_infinity(&self) -> Result<(C64, C64)> {
        if self.poly.degree().is_some_and(|d| d > 0) {
            return Err(SzegoError::InvalidInput("unbounded at infinity".into()));
        }
        Ok(self.laurent_coeffs())
    }

    /// Exact product in partial-fraction form.
    pub fn mul(&self, other: &Self) -> Self {
        let mut locs: Vec<C64> = Vec::new();
        for p in self.poles.iter().chain(other.poles.iter()) {
            if !locs.iter().any(|&q| same_point(q, p.z)) {
                locs.push(p.z);
            }
        }
        let mut poles = Vec::with_capacity(locs.len());
        for z in locs {
            let fm = self.principal_at(z);
            let gm = other.principal_at(z);
            let (nf, ng) = (fm.len(), gm.len());
            let fp = self.regular_taylor_at(z, ng);
            let gp = other.regular_taylor_at(z, nf);
            let mut c = vec![ZERO; nf + ng];
            for a in 1..=nf {
                for b in 1..=ng {
                    c[a + b - 1] += fm[a - 1] * gm[b - 1];
                }
                for (j, &gj) in gp.iter().enumerate() {
                    if a > j {
                        c[a - j - 1] += fm[a - 1] * gj;
                    }
                }
            }
            for b in 1..=ng {
                for (j, &fj) in fp.iter().enumerate() {
                    if b > j {
                        c[b - j - 1] += gm[b - 1] * fj;
                    }
                }
            }
            poles.push(PoleTerm { z, coeffs: c });
        }
        let mut poly = self.poly.mul(&other.poly);
        poly = poly.add(&poly_times_proper(&self.poly, other));
        poly = poly.add(&poly_times_proper(&other.poly, self));
        Self::new(poly, poles)
    }

    pub fn mul_poly(&self, p: &ComplexPolynomial) -> Self {
        self.mul(&Self::polynomial(p.clone()))
    }

    /// Riesz projection onto `H²(ℂ₊)`: keeps the poles in the lower
    /// half-plane. Requires a function in `L²(ℝ)`.
    pub fn hardy_project(&self) -> Result<Self> {
        self.check_l2("Hardy projection")?;
        let poles = self.poles.iter().filter(|p| p.z.im < 0.0).cloned().collect();
        Ok(Self::new(ComplexPolynomial::zero(), poles))
    }

    /// Errors unless the function is strictly proper with no real poles.
    pub fn check_l2(&self, what: &str) -> Result<()> {
        let scale = self.coeff_scale().max(f64::MIN_POSITIVE);
        if self.poly.coeffs().iter().any(|c| c.norm() > 1e-12 * scale) {
            return Err(SzegoError::NotHardy(format!("{what}: non-decaying polynomial part")));
        }
        if let Some(p) = self
            .poles
            .iter()
            .find(|p| p.z.im.abs() <= REAL_AXIS_TOL * (1.0 + p.z.norm()))
        {
            return Err(SzegoError::NotHardy(format!("{what}: real pole at {}", p.z)));
        }
        Ok(())
    }

    /// True when all poles lie in the open lower half-plane and the function
    /// vanishes at infinity.
    pub fn is_hardy(&self) -> bool {
        self.check_l2("").is_ok() && self.poles.iter().all(|p| p.z.im < 0.0)
    }

    /// `⟨f, g⟩ = ∫ f(x) conj(g(x)) dx`, by residues in the upper half-plane.
    pub fn l2_inner(&self, other: &Self) -> Result<C64> {
        self.check_l2("inner product")?;
        other.check_l2("inner product")?;
        Ok(residue_integral(self, &other.conj_reflect()))
    }

    pub fn l2_norm(&self) -> Result<f64> {
        Ok(self.l2_inner(self)?.re.max(0.0).sqrt())
    }

    /// Drops pole coefficients whose modulus is at most `rel·scale`, where
    /// `scale` is the largest coefficient modulus, and trailing polynomial
    /// coefficients below the same bound.
    pub fn trimmed(&self, rel: f64) -> Self {
        let cut = rel * self.coeff_scale();
        let mut poly = self.poly.coeffs().to_vec();
        while poly.last().is_some_and(|c| c.norm() <= cut) {
            poly.pop();
        }
        let poles = self
            .poles
            .iter()
            .map(|p| {
                let mut c = p.coeffs.clone();
                while c.last().is_some_and(|a| a.norm() <= cut) {
                    c.pop();
                }
                PoleTerm { z: p.z, coeffs: c }
            })
            .collect();
        Self::new(ComplexPolynomial::new(poly), poles)
    }

    /// Partial fractions of `num/den` via companion roots of `den`.
    pub fn partial_fractions(num: &ComplexPolynomial, den: &ComplexPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(SzegoError::InvalidInput("zero denominator".into()));
        }
        let roots = den.roots()?;
        Self::from_numerator_and_roots(num, den.leading(), &roots)
    }

    /// `num(x) / (lead·Π (x - r)^{m_r})` with the roots given.
    pub fn from_numerator_and_roots(
        num: &ComplexPolynomial,
        lead: C64,
        roots: &[Root],
    ) -> Result<Self> {
        if lead == ZERO {
            return Err(SzegoError::InvalidInput("zero leading coefficient".into()));
        }
        let expanded: Vec<C64> = roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.z, r.multiplicity))
            .collect();
        let den = ComplexPolynomial::from_roots(&expanded).scale(lead);
        let (quot, _) = num.div_rem(&den)?;
        let mut poles = Vec::with_capacity(roots.len());
        for (i, r) in roots.iter().enumerate() {
            let m = r.multiplicity;
            if m == 0 {
                continue;
            }
            // Taylor series at r of num / (lead Π_{j≠i} (x - r_j)^{m_j}).
            let mut t: Vec<C64> = num.taylor_at(r.z).into_iter().take(m).collect();
            t.resize(m, ZERO);
            for (j, s) in roots.iter().enumerate() {
                if j == i || s.multiplicity == 0 {
                    continue;
                }
                let mut f = vec![ZERO; m];
                PoleTerm { z: s.z, coeffs: unit_power(s.multiplicity) }.taylor_at(r.z, m, &mut f);
                t = truncated_conv(&t, &f, m);
            }
            let coeffs: Vec<C64> = (1..=m).map(|k| t[m - k] / lead).collect();
            poles.push(PoleTerm { z: r.z, coeffs });
        }
        Ok(Self::new(quot, poles))
    }

    /// Rebuilds a rational function known only through an evaluator, given
    /// its pole locations with multiplicities. Principal parts come from
    /// trapezoidal contour integrals on circles around each pole; the circle
    /// radius is `0.4` times the distance to the nearest other pole, capped by
    /// `radius_cap(z)`. If `bounded_at_infinity` the constant at infinity is
    /// recovered from far-field samples, otherwise it is taken as zero.
    pub fn from_evaluator<F, R>(
        poles: &[Root],
        radius_cap: R,
        bounded_at_infinity: bool,
        f: F,
    ) -> Self
    where
        F: Fn(C64) -> C64,
        R: Fn(C64) -> f64,
    {
        const NODES: usize = 64;
        let mut terms = Vec::with_capacity(poles.len());
        for (i, r) in poles.iter().enumerate() {
            let sep = poles
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| (s.z - r.z).norm())
                .fold(f64::INFINITY, f64::min);
            let mut rad = if sep.is_finite() { 0.4 * sep } else { 0.5 * (1.0 + r.z.norm()) };
            rad = rad.min(radius_cap(r.z));
            let m = r.multiplicity;
            let mut c = vec![ZERO; m];
            for n in 0..NODES {
                let ang = 2.0 * PI * (n as f64 + 0.5) / NODES as f64;
                let w = C64::from_polar(rad, ang);
                let val = f(r.z + w);
                let mut pw = w;
                for ck in c.iter_mut() {
                    *ck += val * pw;
                    pw *= w;
                }
            }
            for ck in c.iter_mut() {
                *ck /= NODES as f64;
            }
            terms.push(PoleTerm { z: r.z, coeffs: c });
        }
        let strict = Self::new(ComplexPolynomial::zero(), terms);
        if !bounded_at_infinity {
            return strict;
        }
        let far = 1e4 * (1.0 + poles.iter().map(|r| r.z.norm()).fold(0.0, f64::max));
        let samples = 8;
        let mut acc = ZERO;
        for k in 0..samples {
            let ang = PI * (k as f64 + 0.5) / samples as f64;
            let x = C64::from_polar(far, ang);
            acc += f(x) - strict.eval(x);
        }
        let c0 = acc / samples as f64;
        Self::new(ComplexPolynomial::constant(c0), strict.poles)
    }
}

fn unit_power(m: usize) -> Vec<C64> {
    let mut v = vec![ZERO; m];
    v[m - 1] = ONE;
    v
}

fn truncated_conv(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Polynomial part of `P·S` where `S` is the strictly proper part of `f`.
fn poly_times_proper(p: &ComplexPolynomial, f: &RationalFunction) -> ComplexPolynomial {
    let Some(d) = p.degree() else {
        return ComplexPolynomial::zero();
    };
    if d == 0 || f.poles.is_empty() {
        return ComplexPolynomial::zero();
    }
    let s = f.infinity_expansion(d);
    let pc = p.coeffs();
    let mut out = vec![ZERO; d];
    for (k, o) in out.iter_mut().enumerate() {
        for i in k + 1..=d {
            *o += pc[i] * s[i - k - 1];
        }
    }
    ComplexPolynomial::new(out)
}

/// `∫_ℝ f·h dx = 2πi Σ_{Im z > 0} Res(f·h)` for an integrand that is
/// `O(x⁻²)`, without forming the full product.
fn residue_integral(f: &RationalFunction, h: &RationalFunction) -> C64 {
    let mut locs: Vec<C64> = Vec::new();
    for p in f.poles.iter().chain(h.poles.iter()) {
        if p.z.im > 0.0 && !locs.iter().any(|&q| same_point(q, p.z)) {
            locs.push(p.z);
        }
    }
    let mut total = ZERO;
    for z in locs {
        let fm = f.principal_at(z);
        let hm = h.principal_at(z);
        let fp = f.regular_taylor_at(z, hm.len());
        let hp = h.regular_taylor_at(z, fm.len());
        // Coefficient of (x - z)^{-1}.
        let mut res = ZERO;
        for (a0, &fa) in fm.iter().enumerate() {
            // t^{-(a0+1)} · t^{a0} from h's regular part.
            res += fa * hp[a0];
        }
        for (b0, &hb) in hm.iter().enumerate() {
            res += hb * fp[b0];
        }
        total += res;
    }
    C64::new(0.0, 2.0 * PI) * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn partial_fractions_of_two_simple_poles() {
        // 1/((x+i)(x-i)) = (i/2)/(x+i) - (i/2)/(x-i)
        let den = ComplexPolynomial::from_roots(&[c64(0.0, -1.0), c64(0.0, 1.0)]);
        let f = RationalFunction::partial_fractions(&ComplexPolynomial::constant(ONE), &den).unwrap();
        assert_eq!(f.poles().len(), 2);
        let at = |z: C64| f.poles().iter().find(|p| close(p.z, z, 1e-12)).unwrap().coeffs[0];
        assert!(close(at(c64(0.0, -1.0)), c64(0.0, 0.5), 1e-14));
        assert!(close(at(c64(0.0, 1.0)), c64(0.0, -0.5), 1e-14));
        assert!(f.poly().is_zero());
    }

    #[test]
    fn partial_fractions_with_double_root_and_polynomial_part() {
        // (x^3 + 2) / (x + i)^2
        let num = ComplexPolynomial::new(vec![c64(2.0, 0.0), ZERO, ZERO, ONE]);
        let den = ComplexPolynomial::from_roots(&[c64(0.0, -1.0), c64(0.0, -1.0)]);
        let f = RationalFunction::partial_fractions(&num, &den).unwrap();
        assert_eq!(f.poles().len(), 1);
        assert_eq!(f.poles()[0].order(), 2);
        for x in [c64(0.3, 0.0), c64(-2.0, 1.0), c64(5.0, -0.2)] {
            let want = num.eval(x) / den.eval(x);
            assert!(close(f.eval(x), want, 1e-12), "{} vs {}", f.eval(x), want);
        }
    }

    #[test]
    fn norm_of_simple_pole() {
        let u = RationalFunction::pole(c64(0.0, -1.0), 1, ONE);
        let n2 = u.l2_inner(&u).unwrap();
        assert!(close(n2, c64(PI, 0.0), 1e-15));
        let du = u.derivative();
        assert!(close(du.l2_inner(&du).unwrap(), c64(PI / 2.0, 0.0), 1e-15));
    }

    #[test]
    fn laurent_of_elementary_blaschke() {
        // (x - i)/(x + i) = 1 - 2i/(x + i)
        let th = RationalFunction::new(
            ComplexPolynomial::constant(ONE),
            vec![PoleTerm { z: c64(0.0, -1.0), coeffs: vec![c64(0.0, -2.0)] }],
        );
        let (l1, l2) = th.laurent_coeffs();
        assert!(close(l1, c64(0.0, -2.0), 1e-15));
        assert!(close(l2, c64(-2.0, 0.0), 1e-15));
    }

    #[test]
    fn product_matches_pointwise() {
        let f = RationalFunction::new(
            ComplexPolynomial::new(vec![c64(1.0, 0.5), c64(0.0, 1.0)]),
            vec![
                PoleTerm { z: c64(0.5, -1.0), coeffs: vec![c64(1.0, 2.0), c64(-0.5, 0.0)] },
                PoleTerm { z: c64(-1.0, 2.0), coeffs: vec![c64(0.3, 0.0)] },
            ],
        );
        let g = RationalFunction::new(
            ComplexPolynomial::new(vec![ZERO, ZERO, c64(2.0, 0.0)]),
            vec![
                PoleTerm { z: c64(0.5, -1.0), coeffs: vec![c64(0.0, 1.0)] },
                PoleTerm { z: c64(3.0, -0.25), coeffs: vec![c64(1.0, 0.0), ZERO, c64(0.1, 0.1)] },
            ],
        );
        let h = f.mul(&g);
        for x in [c64(0.1, 0.0), c64(-3.0, 0.7), c64(2.0, -2.0), c64(10.0, 5.0)] {
            let want = f.eval(x) * g.eval(x);
            assert!(close(h.eval(x), want, 1e-12), "{x}: {} vs {}", h.eval(x), want);
        }
    }

    #[test]
    fn residue_inner_product_matches_quadrature() {
        let f = RationalFunction::new(
            ComplexPolynomial::zero(),
            vec![
                PoleTerm { z: c64(0.5, -1.0), coeffs: vec![c64(1.0, 2.0), c64(-0.5, 0.0)] },
                PoleTerm { z: c64(-1.0, 0.7), coeffs: vec![c64(0.3, 0.0)] },
            ],
        );
        let g = RationalFunction::new(
            ComplexPolynomial::zero(),
            vec![PoleTerm { z: c64(1.0, -0.5), coeffs: vec![c64(0.0, 1.0), c64(0.2, 0.0)] }],
        );
        // Oracle: composite midpoint rule after x = tan(s).
        let n = 400_000;
        let mut q = ZERO;
        for k in 0..n {
            let s = -PI / 2.0 + PI * (k as f64 + 0.5) / n as f64;
            let x = s.tan();
            let w = PI / n as f64 / s.cos().powi(2);
            q += f.eval(c64(x, 0.0)) * g.eval(c64(x, 0.0)).conj() * w;
        }
        let r = f.l2_inner(&g).unwrap();
        assert!((r - q).norm() < 1e-8, "{r} vs {q}");
    }

    #[test]
    fn hardy_projection_of_mixed_function() {
        let f = RationalFunction::new(
            ComplexPolynomial::zero(),
            vec![
                PoleTerm { z: c64(0.0, -1.0), coeffs: vec![ONE] },
                PoleTerm { z: c64(0.0, 1.0), coeffs: vec![ONE] },
            ],
        );
        let p = f.hardy_project().unwrap();
        assert_eq!(p.poles().len(), 1);
        assert!(p.poles()[0].z.im < 0.0);
        let with_const = f.add(&RationalFunction::constant(ONE));
        assert!(with_const.hardy_project().is_err());
    }

    #[test]
    fn evaluator_reconstruction_with_double_pole() {
        let f = RationalFunction::new(
            ComplexPolynomial::constant(c64(0.5, 0.0)),
            vec![
                PoleTerm { z: c64(0.0, -1.0), coeffs: vec![c64(1.0, 1.0), c64(0.0, 2.0)] },
                PoleTerm { z: c64(2.0, -0.1), coeffs: vec![c64(-1.0, 0.0)] },
            ],
        );
        let g = RationalFunction::from_evaluator(&f.pole_roots(), |_| f64::INFINITY, true, |z| f.eval(z));
        for (a, b) in f.poles().iter().zip(g.poles()) {
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                assert!(close(*y, *x, 1e-12));
            }
        }
        assert!(close(g.poly().coeffs()[0], c64(0.5, 0.0), 1e-12));
    }

    #[test]
    fn roots_cluster_double_root() {
        let p = ComplexPolynomial::from_roots(&[c64(1.0, 1.0), c64(1.0, 1.0), c64(-2.0, 0.5)]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 2);
        let d = r.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!(close(d.z, c64(1.0, 1.0), 1e-9));
    }
}
