//! Hermitian eigensolvers and a complex SVD for small dense matrices.
//!
//! Two independent eigen routes are provided. [`eigvalsh`] reduces to a real
//! tridiagonal matrix with Householder reflections and runs implicit QL; it
//! is the fast path for spectra (negativity, PSD checks). [`eigh`] is cyclic
//! Jacobi and also returns eigenvectors. Both symmetrize their input first.

use crate::qcore::matrix::CMatrix;
use crate::scalar::{c, cone, cr, czero, Real, C};

const MAX_QL_ITER: usize = 64;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn eigvalsh<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    assert!(m.is_square(), "eigvalsh needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return Vec::new();
    }
    let mut a = m.hermitian_part();
    householder_tridiagonalize(&mut a);

    let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e: Vec<T> = (0..n)
        .map(|i| {
            if i + 1 < n {
                a[(i + 1, i)].norm()
            } else {
                T::zero()
            }
        })
        .collect();
    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    d
}

/// In-place reduction of a Hermitian matrix to Hermitian tridiagonal form.
/// Only the tridiagonal band of the result is meaningful.
fn householder_tridiagonalize<T: Real>(a: &mut CMatrix<T>) {
    let n = a.rows();
    let two = T::lit(2.0);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C<T>> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == T::zero() {
            cone()
        } else {
            x0.unscale(x0.norm())
        };
        let alpha = -phase.scale(xnorm);
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = z.unscale(vnorm);
        }

        let off = k + 1;
        let len = n - off;
        // p = B v on the trailing block
        let p: Vec<C<T>> = (0..len)
            .map(|i| (0..len).fold(czero(), |acc, j| acc + a[(off + i, off + j)] * v[j]))
            .collect();
        let kk = v
            .iter()
            .zip(&p)
            .fold(czero::<T>(), |acc, (vi, &pi)| acc + vi.conj() * pi)
            .re;
        let w: Vec<C<T>> = p
            .iter()
            .zip(&v)
            .map(|(&pi, &vi)| pi - vi.scale(kk))
            .collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(off + i, off + j)] = a[(off + i, off + j)] - upd.scale(two);
            }
        }
        a[(off, k)] = alpha;
        a[(k, off)] = alpha.conj();
        for i in off + 1..n {
            a[(i, k)] = czero();
            a[(k, i)] = czero();
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i+1`). Eigenvalues land in `d`.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let eps = T::solver_eps();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= MAX_QL_ITER, "tridiagonal QL failed to converge");

            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut cs, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = cs * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                cs = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * cs * b;
                p = s * r;
                d[i + 1] = g + p;
                g = cs * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigh<T: Real> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> Eigh<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }
}

/// Cyclic Jacobi eigen-decomposition of the Hermitian part of `m`.
pub fn eigh<T: Real>(m: &CMatrix<T>) -> Eigh<T> {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let eps = T::solver_eps();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag += a[(i, i)].norm_sqr();
            for j in i + 1..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off <= eps * eps * (diag + off) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == T::zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if r <= eps * T::lit(1e-2) * (app.abs() + aqq.abs()) {
                    a[(p, q)] = czero();
                    a[(q, p)] = czero();
                    continue;
                }
                let ph = apq.unscale(r);
                let theta = (aqq - app) / (T::lit(2.0) * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(ph)) * [[c, s], [-s, c]]
                let g_pp = cr(cs);
                let g_pq = cr(sn);
                let g_qp = ph.conj().scale(-sn);
                let g_qq = ph.conj().scale(cs);
                rotate_columns(&mut a, p, q, g_pp, g_pq, g_qp, g_qq);
                rotate_rows_adjoint(&mut a, p, q, g_pp, g_pq, g_qp, g_qq);
                rotate_columns(&mut v, p, q, g_pp, g_pq, g_qp, g_qq);
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Eigh { values, vectors }
}

#[allow(clippy::too_many_arguments)]
fn rotate_columns<T: Real>(
    m: &mut CMatrix<T>,
    p: usize,
    q: usize,
    g_pp: C<T>,
    g_pq: C<T>,
    g_qp: C<T>,
    g_qq: C<T>,
) {
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * g_pp + mq * g_qp;
        m[(k, q)] = mp * g_pq + mq * g_qq;
    }
}

#[allow(clippy::too_many_arguments)]
fn rotate_rows_adjoint<T: Real>(
    m: &mut CMatrix<T>,
    p: usize,
    q: usize,
    g_pp: C<T>,
    g_pq: C<T>,
    g_qp: C<T>,
    g_qq: C<T>,
) {
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = g_pp.conj() * mp + g_qp.conj() * mq;
        m[(q, k)] = g_pq.conj() * mp + g_qq.conj() * mq;
    }
}

/// Thin singular value decomposition `M = U diag(s) V†`.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    /// `rows x k`, `k = min(rows, cols)`. Columns belonging to zero singular
    /// values are zero.
    pub u: CMatrix<T>,
    /// Nonincreasing.
    pub singular_values: Vec<T>,
    /// `cols x k`.
    pub v: CMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(m: &CMatrix<T>) -> Svd<T> {
    if m.cols() > m.rows() {
        // M^T = U' S V'^†  =>  M = conj(V') S conj(U')^†
        let t = svd(&m.transpose());
        return Svd {
            u: t.v.conj(),
            singular_values: t.singular_values,
            v: t.u.conj(),
        };
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = m.clone();
    let mut v = CMatrix::identity(cols);
    let eps = T::solver_eps();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), czero::<T>());
                for k in 0..rows {
                    let wi = w[(k, i)];
                    let wj = w[(k, j)];
                    alpha += wi.norm_sqr();
                    beta += wj.norm_sqr();
                    gamma = gamma + wi.conj() * wj;
                }
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = gamma.unscale(g).conj();
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut w, &mut v] {
                    for k in 0..mat.rows() {
                        let xi = mat[(k, i)];
                        let xj = mat[(k, j)] * ph;
                        mat[(k, i)] = xi.scale(cs) - xj.scale(sn);
                        mat[(k, j)] = xi.scale(sn) + xj.scale(cs);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..cols)
        .map(|j| (0..rows).map(|k| w[(k, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("finite"));
    let singular_values: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let scale_floor = singular_values.first().copied().unwrap_or(T::zero()) * eps;
    let u = CMatrix::from_fn(rows, cols, |k, col| {
        let j = order[col];
        if norms[j] > scale_floor && norms[j] > T::zero() {
            w[(k, j)].unscale(norms[j])
        } else {
            czero()
        }
    });
    let v = CMatrix::from_fn(cols, cols, |k, col| v[(k, order[col])]);
    Svd {
        u,
        singular_values,
        v,
    }
}

/// Multiplies a vector by a unit phase so that its largest-modulus entry is
/// real and positive.
pub fn fix_global_phase<T: Real>(v: &mut [C<T>]) {
    let Some(big) = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).expect("finite"))
    else {
        return;
    };
    if big.norm() == T::zero() {
        return;
    }
    let ph = big.unscale(big.norm()).conj();
    for z in v.iter_mut() {
        *z = *z * ph;
    }
    // snap the reference entry's imaginary part
    if let Some(z) = v
        .iter_mut()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).expect("finite"))
    {
        *z = c(z.norm(), T::zero());
    }
}
