//! Dense complex linear algebra helpers on top of faer.

use faer::linalg::solvers::{DenseSolveCore, Solve};

use crate::prelude::*;

/// Largest absolute entry.
pub fn max_norm(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

/// Induced 1-norm (largest absolute column sum).
pub fn one_norm(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        let mut s = 0.0;
        for i in 0..a.nrows() {
            s += a[(i, j)].norm();
        }
        if s.is_nan() {
            return f64::NAN;
        }
        m = m.max(s);
    }
    m
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::identity(n, n)
}

/// Kronecker product `a ⊗ b`; the row index of `a` is the slow index.
pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn trace(a: MatRef<'_, c64>) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// `max |a - a^H|`.
pub fn hermiticity_error(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..=j.min(a.nrows().saturating_sub(1)) {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// `(a + a^H) / 2`.
pub fn hermitian_part(a: MatRef<'_, c64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn commutator(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    a * b - b * a
}

pub fn is_finite(a: MatRef<'_, c64>) -> bool {
    (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].re.is_finite() && a[(i, j)].im.is_finite()))
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_hermitian_eigenvalue(a: MatRef<'_, c64>) -> Result<f64> {
    let h = hermitian_part(a);
    let values = h.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|_| Error::EigenFailed)?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

/// Linear combination `sum c_k M_k` of equally sized matrices.
fn lin(terms: &[(f64, &Mat<c64>)]) -> Mat<c64> {
    let (r, c) = (terms[0].1.nrows(), terms[0].1.ncols());
    let mut out = Mat::<c64>::zeros(r, c);
    for (coef, m) in terms {
        for j in 0..c {
            for i in 0..r {
                out[(i, j)] += m[(i, j)] * *coef;
            }
        }
    }
    out
}

// Pade coefficients b_k and 1-norm bounds theta_m from Higham (2005),
// "The scaling and squaring method for the matrix exponential revisited".
const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

fn pade(a: &Mat<c64>, m: usize) -> Mat<c64> {
    let n = a.nrows();
    let ident = identity(n);
    let a2 = a * a;
    let (u, v) = if m == 13 {
        let b = &B13;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let inner = &a6 * lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)])
            + lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &ident)]);
        let u = a * inner;
        let v = &a6 * lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)])
            + lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &ident)]);
        (u, v)
    } else {
        let b: &[f64] = match m {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            _ => &B9,
        };
        // even powers A^0, A^2, ..., A^(m-1)
        let mut even = vec![ident, a2];
        while even.len() <= m / 2 {
            let next = even.last().unwrap() * &even[1];
            even.push(next);
        }
        let odd_terms: Vec<(f64, &Mat<c64>)> = (0..=m / 2).map(|j| (b[2 * j + 1], &even[j])).collect();
        let even_terms: Vec<(f64, &Mat<c64>)> = (0..=m / 2).map(|j| (b[2 * j], &even[j])).collect();
        (a * lin(&odd_terms), lin(&even_terms))
    };
    let p = &v + &u;
    let q = &v - &u;
    q.partial_piv_lu().solve(&p)
}

/// Matrix exponential by scaling and squaring with a diagonal Pade
/// approximant of degree 3, 5, 7, 9 or 13 chosen from the 1-norm.
pub fn matrix_exp(a: MatRef<'_, c64>) -> Result<Mat<c64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::ExpOverflow { norm });
    }
    let a = a.to_owned();
    let out = match THETA.iter().find(|(_, t)| norm <= *t) {
        Some(&(m, _)) => pade(&a, m),
        None => {
            let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
            let scale = 0.5f64.powi(s);
            let scaled = Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * scale);
            let mut x = pade(&scaled, 13);
            for _ in 0..s {
                x = &x * &x;
            }
            x
        }
    };
    if !is_finite(out.as_ref()) {
        return Err(Error::ExpOverflow { norm });
    }
    Ok(out)
}

/// Eigendecomposition `A = V diag(values) V^-1` with diagnostics.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<c64>,
    pub right: Mat<c64>,
    pub inverse: Mat<c64>,
    /// `max |A V - V diag(values)| / max(1, max |A|)`.
    pub residual: f64,
    /// `||V||_1 ||V^-1||_1`.
    pub condition: f64,
}

/// Eigenvector condition number beyond which a matrix is treated as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e12;
/// Relative residual beyond which an eigendecomposition is rejected.
pub const DEFECTIVE_RESIDUAL: f64 = 1e-8;

pub fn eigensystem(a: MatRef<'_, c64>) -> Result<Eigensystem> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.ncols() });
    }
    let e = a.eigen().map_err(|_| Error::EigenFailed)?;
    let right = e.U().to_owned();
    let values: Vec<c64> = (0..n).map(|i| e.S()[i]).collect();
    let inverse = right.partial_piv_lu().inverse();
    let condition = one_norm(right.as_ref()) * one_norm(inverse.as_ref());

    let av = a * &right;
    let mut residual = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            residual = residual.max((av[(i, j)] - right[(i, j)] * values[j]).norm());
        }
    }
    residual /= max_norm(a).max(1.0);

    if !condition.is_finite() || condition > DEFECTIVE_CONDITION || !(residual <= DEFECTIVE_RESIDUAL) {
        return Err(Error::NearDefective { residual, condition });
    }
    Ok(Eigensystem { values, right, inverse, residual, condition })
}

pub fn eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<c64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    a.eigenvalues().map_err(|_| Error::EigenFailed)
}

/// Applies `f` to the eigenvalues: `V diag(f(values)) V^-1`.
pub fn spectral_function(es: &Eigensystem, f: impl Fn(c64) -> c64) -> Mat<c64> {
    let n = es.values.len();
    let mut scaled = es.right.clone();
    for j in 0..n {
        let fj = f(es.values[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    &scaled * &es.inverse
}
