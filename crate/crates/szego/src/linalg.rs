//! Dense complex linear algebra used by the transform.
//!
//! Hermitian eigenproblems, the SVD and LU solves are delegated to
//! `nalgebra`. Eigenvalues of general (non-normal) complex matrices come from
//! a balanced Hessenberg reduction followed by a single-shift QR iteration
//! implemented here.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SzegoError};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Eigenvalues of a general complex square matrix, in no particular order.
pub fn eigenvalues(a: &DMatrix<C64>) -> Result<Vec<C64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(SzegoError::InvalidInput("eigenvalues of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SzegoError::InvalidInput("matrix has non-finite entries".into()));
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_qr(h)
}

/// Parlett–Reinsch diagonal balancing by powers of two.
fn balance(a: &mut DMatrix<C64>) {
    let n = a.nrows();
    let radix = 2.0_f64;
    let sqrdx = radix * radix;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place reduction to upper Hessenberg form by Householder reflections.
fn hessenberg(a: &mut DMatrix<C64>) {
    let n = a.nrows();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- (I - 2 v v*/|v|²) A
        for j in 0..n {
            let mut dot = ZERO;
            for (idx, vi) in v.iter().enumerate() {
                dot += vi.conj() * a[(k + 1 + idx, j)];
            }
            let f = dot * (2.0 / vnorm2);
            for (idx, vi) in v.iter().enumerate() {
                a[(k + 1 + idx, j)] -= vi * f;
            }
        }
        // A <- A (I - 2 v v*/|v|²)
        for i in 0..n {
            let mut dot = ZERO;
            for (idx, vi) in v.iter().enumerate() {
                dot += a[(i, k + 1 + idx)] * vi;
            }
            let f = dot * (2.0 / vnorm2);
            for (idx, vi) in v.iter().enumerate() {
                a[(i, k + 1 + idx)] -= f * vi.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Givens rotation `[c s; -conj(s) c]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn hessenberg_qr(mut h: DMatrix<C64>) -> Result<Vec<C64>> {
    let n = h.nrows();
    let eps = f64::EPSILON;
    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the trailing unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(SzegoError::NoConvergence("complex Hessenberg QR"));
        }
        // Wilkinson shift from the trailing 2x2 block, exceptional shift
        // every tenth iteration.
        let mu = if iter % 10 == 0 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr * 0.25 - det).sqrt();
            let l1 = tr * 0.5 + disc;
            let l2 = tr * 0.5 - disc;
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            let rmax = (k + 2).min(hi);
            for i in lo..=rmax {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// Eigen-decomposition of a Hermitian matrix (the Hermitian part is used).
///
/// Returns eigenvalues in ascending order with matching unit eigenvector
/// columns.
pub fn hermitian_eigen(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Singular values in descending order with the matching left singular
/// vectors as columns.
///
/// Computed from the Hermitian dilation `[[0, A], [A*, 0]]`, whose
/// eigenvalues are `±σ_k` with eigenvectors `(u_k, ±v_k)/√2`.
pub fn svd_left(a: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(SzegoError::InvalidInput("svd_left needs a square matrix".into()));
    }
    let mut dil = DMatrix::<C64>::zeros(2 * n, 2 * n);
    dil.view_mut((0, n), (n, n)).copy_from(a);
    dil.view_mut((n, 0), (n, n)).copy_from(&a.adjoint());
    let (vals, vecs) = hermitian_eigen(&dil);
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(SzegoError::NoConvergence("singular value decomposition"));
    }
    let sv: Vec<f64> = (0..n).map(|k| vals[2 * n - 1 - k].max(0.0)).collect();
    let mut u = DMatrix::from_fn(n, n, |r, c| vecs[(r, 2 * n - 1 - c)]);
    for mut col in u.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
    }
    Ok((sv, u))
}

/// Condition number `‖x‖‖y‖/|y* x|` of an eigenvalue `z` of `a`, with `x`
/// and `y` the right and left singular vectors of `a - z` for its smallest
/// singular value. Large when `z` is close to a multiple eigenvalue.
pub fn eigenvalue_condition(a: &DMatrix<C64>, z: C64) -> Result<f64> {
    let n = a.nrows();
    let shifted = a - DMatrix::<C64>::identity(n, n) * z;
    let (_, left) = svd_left(&shifted)?;
    let (_, right) = svd_left(&shifted.adjoint())?;
    let y = left.column(n - 1);
    let x = right.column(n - 1);
    Ok(1.0 / y.dotc(&x).norm().max(f64::MIN_POSITIVE))
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(a: &DMatrix<C64>) -> f64 {
    a.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: &DMatrix<C64>, b: &DVector<C64>, what: &'static str) -> Result<DVector<C64>> {
    let x = a.clone().lu().solve(b).ok_or(SzegoError::Singular(what))?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SzegoError::Singular(what));
    }
    Ok(x)
}

/// Inverse by LU with partial pivoting.
pub fn inverse(a: &DMatrix<C64>, what: &'static str) -> Result<DMatrix<C64>> {
    let inv = a.clone().try_inverse().ok_or(SzegoError::Singular(what))?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SzegoError::Singular(what));
    }
    Ok(inv)
}

/// Orthonormal basis (as columns) of the orthogonal complement of `v` in
/// `C^d`, built from a Householder reflector.
pub fn orthonormal_complement(v: &DVector<C64>) -> DMatrix<C64> {
    let d = v.len();
    let nv = v.norm();
    if d <= 1 {
        return DMatrix::zeros(d, 0);
    }
    let vhat = v / C64::new(nv, 0.0);
    let phase = if vhat[0].norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        vhat[0] / vhat[0].norm()
    };
    // Reflector H with H e_1 = -phase * vhat; columns 2..d span vhat^⊥.
    let mut w = vhat.clone();
    w[0] += phase;
    let wn2 = w.norm_squared();
    let mut h = DMatrix::<C64>::identity(d, d);
    if wn2 > 0.0 {
        h -= &w * w.adjoint() * C64::new(2.0 / wn2, 0.0);
    }
    h.columns(1, d - 1).into_owned()
}

/// Largest modulus of the entries of a matrix.
pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
