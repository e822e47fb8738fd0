//! Householder reduction to tridiagonal form, implicit QL eigenvalues, and
//! inverse iteration for selected eigenvectors.

use crate::rng::hashed_unit;
use crate::scalar::{axpy, dot, norm2, Scalar};

/// `Q' M Q = T` with `Q = H_0 H_1 ... H_{n-3}`.
pub(crate) struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
    /// `(k, v, beta)`: `H_k = I - beta v v'` acting on coordinates `k+1..`.
    reflectors: Vec<(usize, Vec<T>, T)>,
}

pub(crate) fn tridiagonalize<T: Scalar>(m: &[T], n: usize) -> Tridiagonal<T> {
    let mut a = m.to_vec();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut w = vec![T::zero(); n];

    for k in 0..n {
        diag[k] = a[k * n + k];
        if k + 1 >= n {
            break;
        }
        let start = k + 1;
        let len = n - start;
        let mut v: Vec<T> = a[k * n + start..k * n + n].to_vec();
        if len == 1 {
            off[k] = v[0];
            continue;
        }
        let tail: T = dot(&v[1..], &v[1..]);
        if tail == T::zero() {
            off[k] = v[0];
            continue;
        }
        let norm = (v[0] * v[0] + tail).sqrt();
        let alpha = if v[0] >= T::zero() { -norm } else { norm };
        v[0] -= alpha;
        let beta = T::lit(2.0) / (v[0] * v[0] + tail);
        off[k] = alpha;

        // p = beta * S v ; w = p - (beta/2)(p'v) v ; S -= v w' + w v'
        let w = &mut w[..len];
        for (i, wi) in w.iter_mut().enumerate() {
            let r = (start + i) * n + start;
            *wi = beta * dot(&a[r..r + len], &v);
        }
        let kk = beta * T::lit(0.5) * dot(w, &v);
        axpy(-kk, &v, w);
        for i in 0..len {
            let r = (start + i) * n + start;
            let row = &mut a[r..r + len];
            let (vi, wi) = (v[i], w[i]);
            for ((x, &wj), &vj) in row.iter_mut().zip(w.iter()).zip(v.iter()) {
                *x -= vi * wj + wi * vj;
            }
        }
        reflectors.push((k, v, beta));
    }
    Tridiagonal { diag, off, reflectors }
}

impl<T: Scalar> Tridiagonal<T> {
    /// Maps a vector in the tridiagonal basis back to the original basis.
    pub fn apply_q(&self, y: &mut [T]) {
        for (k, v, beta) in self.reflectors.iter().rev() {
            let tail = &mut y[k + 1..];
            let s = *beta * dot(v, tail);
            axpy(-s, v, tail);
        }
    }

    fn norm_bound(&self) -> T {
        // max row sum of |T|
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(T::zero(), T::max)
    }

    fn mul(&self, x: &[T], out: &mut [T]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Eigenvector of the tridiagonal for eigenvalue `lambda` by inverse
    /// iteration, kept orthogonal to every vector in `previous`.
    pub fn eigenvector(&self, lambda: T, previous: &[Vec<T>], start_seed: u64) -> (Vec<T>, T) {
        let n = self.diag.len();
        let scale = self.norm_bound().max(T::min_positive_value());
        let lu = ShiftedLu::new(&self.diag, &self.off, lambda, scale);
        let mut x: Vec<T> = (0..n).map(|i| T::lit(hashed_unit(start_seed, i))).collect();
        orthonormalize(&mut x, previous);
        let mut tx = vec![T::zero(); n];
        let target = T::tol(1e-13) * scale;
        let mut residual = T::infinity();
        for it in 0..24 {
            lu.solve(&mut x);
            orthonormalize(&mut x, previous);
            if it >= 2 {
                self.mul(&x, &mut tx);
                residual = tx
                    .iter()
                    .zip(&x)
                    .map(|(&t, &xi)| (t - lambda * xi) * (t - lambda * xi))
                    .sum::<T>()
                    .sqrt();
                if residual <= target {
                    break;
                }
            }
        }
        (x, residual)
    }
}

fn orthonormalize<T: Scalar>(x: &mut [T], previous: &[Vec<T>]) {
    for _ in 0..2 {
        for p in previous {
            let c = dot(p, x);
            axpy(-c, p, x);
        }
    }
    let nrm = norm2(x);
    if nrm > T::zero() && nrm.is_finite() {
        let inv = T::one() / nrm;
        x.iter_mut().for_each(|v| *v *= inv);
    } else {
        // fully absorbed by earlier vectors; fall back to a fresh direction
        for (i, v) in x.iter_mut().enumerate() {
            *v = T::lit(hashed_unit(0xDEAD_BEEF, i));
        }
        for p in previous {
            let c = dot(p, x);
            axpy(-c, p, x);
        }
        let nrm = norm2(x);
        let inv = T::one() / nrm;
        x.iter_mut().for_each(|v| *v *= inv);
    }
}

/// LU factors of `T - lambda I` with partial pivoting; `U` has two
/// superdiagonals.
struct ShiftedLu<T> {
    u0: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    mult: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> ShiftedLu<T> {
    fn new(diag: &[T], off: &[T], lambda: T, scale: T) -> Self {
        let n = diag.len();
        let tiny = T::epsilon() * scale;
        let mut u0 = vec![T::zero(); n];
        let mut u1 = vec![T::zero(); n];
        let mut u2 = vec![T::zero(); n];
        let mut mult = vec![T::zero(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        let fix = |p: T| if p.abs() < tiny { if p < T::zero() { -tiny } else { tiny } } else { p };

        let (mut r0, mut r1, mut r2) = (diag[0] - lambda, if n > 1 { off[0] } else { T::zero() }, T::zero());
        for k in 0..n.saturating_sub(1) {
            let s0 = off[k];
            let s1 = diag[k + 1] - lambda;
            let s2 = if k + 2 < n { off[k + 1] } else { T::zero() };
            if r0.abs() >= s0.abs() {
                let p = fix(r0);
                let l = s0 / p;
                u0[k] = p;
                u1[k] = r1;
                u2[k] = r2;
                mult[k] = l;
                r0 = s1 - l * r1;
                r1 = s2 - l * r2;
            } else {
                let l = r0 / s0;
                u0[k] = s0;
                u1[k] = s1;
                u2[k] = s2;
                mult[k] = l;
                swapped[k] = true;
                r0 = r1 - l * s1;
                r1 = r2 - l * s2;
            }
            r2 = T::zero();
        }
        u0[n - 1] = fix(r0);
        Self {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn solve(&self, y: &mut [T]) {
        let n = y.len();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                y.swap(k, k + 1);
            }
            let yk = y[k];
            y[k + 1] -= self.mult[k] * yk;
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            if k + 1 < n {
                s -= self.u1[k] * y[k + 1];
            }
            if k + 2 < n {
                s -= self.u2[k] * y[k + 2];
            }
            y[k] = s / self.u0[k];
        }
        // keep magnitudes bounded between iterations
        let m = y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if m > T::zero() && m.is_finite() {
            let inv = T::one() / m;
            y.iter_mut().for_each(|v| *v *= inv);
        }
    }
}

/// Eigenvalues of the symmetric tridiagonal `(diag, off)` by implicit QL with
/// Wilkinson shifts. Returns `Err(iterations)` if some eigenvalue needed more
/// than the iteration cap.
pub(crate) fn ql_eigenvalues<T: Scalar>(diag: &[T], off: &[T]) -> Result<Vec<T>, usize> {
    const MAX_ITER: usize = 60;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(off);
    let two = T::lit(2.0);
    // absolute deflation floor; without it, zero diagonals next to tiny
    // off-diagonals never deflate and the shift overflows
    let norm = (0..n).fold(T::zero(), |a, i| a.max(d[i].abs() + e[i].abs()));
    let floor = T::epsilon() * norm;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(iter);
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(d)
}
