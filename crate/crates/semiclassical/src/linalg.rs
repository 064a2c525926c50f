//! Thin LAPACK wrappers for the dense complex kernels used by the rest of
//! the crate.
//!
//! All marshalling into column-major buffers happens here, so eigenvector
//! and singular-vector conventions are pinned in one place: `eigh` returns
//! eigenvectors as *columns* of a unitary matrix, eigenvalues ascending.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

fn col_major(a: &Array2<C64>) -> Vec<C64> {
    let (rows, cols) = a.dim();
    let mut buf = Vec::with_capacity(rows * cols);
    for j in 0..cols {
        for i in 0..rows {
            buf.push(a[(i, j)]);
        }
    }
    buf
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns `(w, v)` with `w` ascending and the columns of `v` the matching
/// orthonormal eigenvectors, so `h = v · diag(w) · v†`.
pub fn eigh(h: &Array2<C64>) -> (Array1<f64>, Array2<C64>) {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "eigh: matrix must be square");
    if n == 0 {
        return (Array1::zeros(0), Array2::zeros((0, 0)));
    }
    let mut a = col_major(h);
    let mut w = vec![0.0f64; n];
    let mut rwork = vec![0.0f64; 3 * n];
    let mut info = 0i32;
    // workspace query
    let mut wkopt = [C64::new(0.0, 0.0)];
    unsafe {
        lapack::zheev(
            b'V', b'L', n as i32, &mut a, n as i32, &mut w, &mut wkopt, -1, &mut rwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "zheev workspace query failed (info = {info})");
    let lwork = wkopt[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack::zheev(
            b'V', b'L', n as i32, &mut a, n as i32, &mut w, &mut work, lwork, &mut rwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "zheev failed to converge (info = {info})");
    let mut v = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            v[(i, j)] = a[j * n + i];
        }
    }
    (Array1::from(w), v)
}

/// Singular values of a general complex matrix, descending.
pub fn singular_values(a: &Array2<C64>) -> Array1<f64> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Array1::zeros(0);
    }
    let k = m.min(n);
    let mut buf = col_major(a);
    let mut s = vec![0.0f64; k];
    let mut rwork = vec![0.0f64; 5 * k];
    let mut u = [C64::new(0.0, 0.0)];
    let mut vt = [C64::new(0.0, 0.0)];
    let mut info = 0i32;
    let mut wkopt = [C64::new(0.0, 0.0)];
    unsafe {
        lapack::zgesvd(
            b'N', b'N', m as i32, n as i32, &mut buf, m as i32, &mut s, &mut u, 1, &mut vt, 1,
            &mut wkopt, -1, &mut rwork, &mut info,
        );
    }
    assert_eq!(info, 0, "zgesvd workspace query failed (info = {info})");
    let lwork = wkopt[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack::zgesvd(
            b'N', b'N', m as i32, n as i32, &mut buf, m as i32, &mut s, &mut u, 1, &mut vt, 1,
            &mut work, lwork, &mut rwork, &mut info,
        );
    }
    assert_eq!(info, 0, "zgesvd failed to converge (info = {info})");
    Array1::from(s)
}

/// Largest eigenvalue of the Hermitian generalized problem `a x = λ b x`
/// with `b` positive definite.
pub fn generalized_eig_max(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let n = a.nrows();
    assert_eq!(a.dim(), b.dim(), "generalized_eig_max: shape mismatch");
    assert!(n > 0);
    let mut abuf = col_major(a);
    let mut bbuf = col_major(b);
    let mut w = vec![0.0f64; n];
    let mut rwork = vec![0.0f64; 3 * n];
    let mut info = 0i32;
    let mut wkopt = [C64::new(0.0, 0.0)];
    unsafe {
        lapack::zhegv(
            &[1], b'N', b'L', n as i32, &mut abuf, n as i32, &mut bbuf, n as i32, &mut w,
            &mut wkopt, -1, &mut rwork, &mut info,
        );
    }
    assert_eq!(info, 0, "zhegv workspace query failed (info = {info})");
    let lwork = wkopt[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack::zhegv(
            &[1], b'N', b'L', n as i32, &mut abuf, n as i32, &mut bbuf, n as i32, &mut w,
            &mut work, lwork, &mut rwork, &mut info,
        );
    }
    assert_eq!(info, 0, "zhegv failed (info = {info}); b not positive definite?");
    w[n - 1]
}

/// Dense product `a · b` through BLAS.
pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (m, k) = a.dim();
    let (k2, n) = b.dim();
    assert_eq!(k, k2, "matmul: inner dimensions differ");
    if m == 0 || n == 0 || k == 0 {
        return Array2::zeros((m, n));
    }
    let a_buf = a.as_standard_layout();
    let b_buf = b.as_standard_layout();
    let mut c = vec![C64::new(0.0, 0.0); m * n];
    // row-major product via the transposed column-major identity
    unsafe {
        blas::zgemm(
            b'N',
            b'N',
            n as i32,
            m as i32,
            k as i32,
            C64::new(1.0, 0.0),
            b_buf.as_slice().unwrap(),
            n as i32,
            a_buf.as_slice().unwrap(),
            k as i32,
            C64::new(0.0, 0.0),
            &mut c,
            n as i32,
        );
    }
    Array2::from_shape_vec((m, n), c).unwrap()
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    let (m, n) = a.dim();
    let mut out = Array2::zeros((n, m));
    for i in 0..m {
        for j in 0..n {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

/// `a† x` without materializing the adjoint.
pub fn adjoint_matvec(a: &Array2<C64>, x: &Array1<C64>) -> Array1<C64> {
    let (m, n) = a.dim();
    assert_eq!(m, x.len());
    let mut y = Array1::zeros(n);
    for i in 0..m {
        let xi = x[i];
        for j in 0..n {
            y[j] += a[(i, j)].conj() * xi;
        }
    }
    y
}

/// Largest entry magnitude.
pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest deviation of `a` from its own conjugate transpose.
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in i..n {
            d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    d
}
