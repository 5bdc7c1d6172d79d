//! Dense complex linear algebra for small systems.
//!
//! The eigensolver is the textbook pipeline: Householder reduction to upper
//! Hessenberg form, Wilkinson-shifted complex QR sweeps (Givens rotations) to
//! a Schur form `A = Q T Q*`, then back-substitution on the triangular factor
//! for the right eigenvectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Maximum QR sweeps per eigenvalue before giving up.
const SWEEPS_PER_EIGENVALUE: usize = 60;

/// Complex Schur decomposition `A = Q·T·Q*` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: DMatrix<Complex64>,
    pub t: DMatrix<Complex64>,
}

/// Eigenvalues and (column) right eigenvectors of a general complex matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: DMatrix<Complex64>,
}

/// Reduces `a` in place to upper Hessenberg form and returns the unitary `Q`
/// with `A_in = Q·H·Q*`.
fn hessenberg(a: &mut DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    if n < 3 {
        return q;
    }
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A ← (I − 2vv*) A
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(p, vp)| vp.conj() * a[(k + 1 + p, j)])
                .sum();
            for (p, vp) in v.iter().enumerate() {
                a[(k + 1 + p, j)] -= 2.0 * vp * dot;
            }
        }
        // A ← A (I − 2vv*), Q ← Q (I − 2vv*)
        for m in [&mut *a, &mut q] {
            for i in 0..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(p, vp)| m[(i, k + 1 + p)] * vp)
                    .sum();
                for (p, vp) in v.iter().enumerate() {
                    m[(i, k + 1 + p)] -= 2.0 * dot * vp.conj();
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
    q
}

/// Givens pair `(c, s)` with `[c s; −s̄ c]·[a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

fn rotate_rows(m: &mut DMatrix<Complex64>, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = m[(k, j)];
        let y = m[(k + 1, j)];
        m[(k, j)] = c * x + s * y;
        m[(k + 1, j)] = -s.conj() * x + c * y;
    }
}

fn rotate_cols(m: &mut DMatrix<Complex64>, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = m[(i, k)];
        let y = m[(i, k + 1)];
        m[(i, k)] = c * x + s.conj() * y;
        m[(i, k + 1)] = -s * x + c * y;
    }
}

/// Eigenvalue of the trailing 2×2 block `[a b; c d]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub fn schur(a: &DMatrix<Complex64>) -> Result<Schur> {
    assert!(a.is_square(), "schur: matrix must be square");
    let n = a.nrows();
    let mut t = a.clone();
    let mut q = hessenberg(&mut t);
    if n < 2 {
        return Ok(Schur { q, t });
    }
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let max_sweeps = SWEEPS_PER_EIGENVALUE * n;
    let mut sweeps = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    while hi > 0 {
        // deflate negligible subdiagonal entries
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let local = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            let local = if local == 0.0 { scale } else { local };
            if sub <= eps * local {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            t[(hi, hi)] + Complex64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        // explicit single-shift QR sweep on the active window [lo, hi]
        for k in lo..=hi {
            t[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            rotate_rows(&mut t, k, c, s, k..n);
            t[(k + 1, k)] = ZERO;
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            rotate_cols(&mut t, k, c, s, 0..(k + 2).min(hi + 1));
            rotate_cols(&mut q, k, c, s, 0..n);
        }
        for k in lo..=hi {
            t[(k, k)] += shift;
        }
    }
    Ok(Schur { q, t })
}

/// Right eigenvectors by back-substitution on the Schur factor.
pub fn eigen(a: &DMatrix<Complex64>) -> Result<Eigen> {
    let n = a.nrows();
    let Schur { q, t } = schur(a)?;
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let norm_t = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let small = (f64::EPSILON * norm_t).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in i + 1..=k {
                acc += t[(i, j)] * y[(j, k)];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            y[(i, k)] = -acc / denom;
        }
    }
    let mut vectors = &q * y;
    for k in 0..n {
        let norm = vectors.column(k).norm();
        if norm > 0.0 {
            vectors.column_mut(k).unscale_mut(norm);
        }
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let s = schur(a)?;
    Ok((0..a.nrows()).map(|i| s.t[(i, i)]).collect())
}

/// Induced 1-norm (max column sum).
pub fn norm1(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solution of `A x = b` together with the 1-norm condition number of `A`.
#[derive(Clone, Debug)]
pub struct Solved {
    pub x: DVector<Complex64>,
    pub cond: f64,
}

/// LU solve with an explicit-inverse condition number (fine at these sizes).
/// Returns `None` when `A` is exactly singular.
pub fn solve_with_cond(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Option<Solved> {
    let lu = a.clone().lu();
    let inv = lu.try_inverse()?;
    let x = lu.solve(b)?;
    let cond = norm1(a) * norm1(&inv);
    if !cond.is_finite() || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some(Solved { x, cond })
}

/// Unconjugated bilinear product `uᵀv`.
pub fn bilinear(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pseudo_random(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        DMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn schur_reconstructs_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (12, 5), (40, 6)] {
            let a = pseudo_random(n, seed);
            let s = schur(&a).unwrap();
            let back = &s.q * &s.t * s.q.adjoint();
            assert!(max_abs(&(back - &a)) < 1e-12 * (n as f64), "n = {n}");
            let unitary = s.q.adjoint() * &s.q - DMatrix::identity(n, n);
            assert!(max_abs(&unitary) < 1e-12 * (n as f64));
            for i in 0..n {
                for j in 0..i {
                    assert_eq!(s.t[(i, j)], ZERO, "T not triangular at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn interior_deflation_keeps_schur_form() {
        // block upper-triangular: the QR sweep deflates in the middle of the matrix
        let top = pseudo_random(4, 21);
        let bottom = pseudo_random(4, 22);
        let coupling = pseudo_random(4, 23);
        let mut a = DMatrix::<Complex64>::zeros(8, 8);
        a.view_mut((0, 0), (4, 4)).copy_from(&top);
        a.view_mut((4, 4), (4, 4)).copy_from(&bottom);
        a.view_mut((0, 4), (4, 4)).copy_from(&coupling);
        let s = schur(&a).unwrap();
        let back = &s.q * &s.t * s.q.adjoint();
        assert!(max_abs(&(back - &a)) < 1e-12);
        let e = eigen(&a).unwrap();
        for k in 0..8 {
            let v = e.vectors.column(k).into_owned();
            assert!((&a * &v - v.clone() * e.values[k]).norm() < 1e-11);
        }
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        for (n, seed) in [(3, 10), (7, 11), (25, 12)] {
            let a = pseudo_random(n, seed);
            let e = eigen(&a).unwrap();
            for k in 0..n {
                let v = e.vectors.column(k).into_owned();
                let residual = (&a * &v - v.clone() * e.values[k]).norm();
                assert!(residual < 1e-11, "n = {n}, k = {k}, residual {residual:e}");
            }
        }
    }

    #[test]
    fn known_spectrum_of_triangular_and_diagonal() {
        let a = DMatrix::from_row_slice(3, 3, &[c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0), ZERO, c(-2.0, 0.5), c(1.0, 0.0), ZERO, ZERO, c(0.25, -4.0)]);
        let mut got = eigenvalues(&a).unwrap();
        got.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        let want = [c(-2.0, 0.5), c(0.25, -4.0), c(1.0, 1.0)];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() < 1e-13);
        }
    }

    #[test]
    fn real_symmetric_with_degenerate_pair() {
        // rotation generator has eigenvalues ±i; direct sum with a repeated value
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[ZERO, c(-1.0, 0.0), ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ZERO, ZERO, c(2.0, 0.0), ZERO, ZERO, ZERO, ZERO, c(2.0, 0.0)],
        );
        let e = eigen(&a).unwrap();
        let mut im: Vec<f64> = e.values.iter().map(|z| z.im).collect();
        im.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((im[0] + 1.0).abs() < 1e-14 && (im[3] - 1.0).abs() < 1e-14);
        for k in 0..4 {
            let v = e.vectors.column(k).into_owned();
            assert!((&a * &v - v.clone() * e.values[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn solve_reports_condition() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), ZERO, ZERO, c(1e-8, 0.0)]);
        let b = DVector::from_vec(vec![ONE, ONE]);
        let s = solve_with_cond(&a, &b).unwrap();
        assert!((s.cond - 1e8).abs() / 1e8 < 1e-12);
        assert!((s.x[1] - c(1e8, 0.0)).norm() < 1e-4);
        let singular = DMatrix::<Complex64>::zeros(2, 2);
        assert!(solve_with_cond(&singular, &b).is_none());
    }
}
