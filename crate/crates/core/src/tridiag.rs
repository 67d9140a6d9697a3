//! Tridiagonal line solvers.
//!
//! Rows are `sub[i]·x[i−1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`; `sub[0]`
//! and `sup[n−1]` are ignored.

use num_complex::Complex;

use crate::Scalar;

/// Thomas algorithm without pivoting, solving in place on `rhs`.
///
/// Only safe for (weakly, irreducibly) diagonally dominant systems. `work`
/// must hold at least `rhs.len()` entries and is overwritten.
pub fn thomas_in_place<T: Scalar>(sub: &[T], diag: &[T], sup: &[T], rhs: &mut [T], work: &mut [T]) {
    let n = rhs.len();
    if n == 0 {
        return;
    }
    debug_assert!(sub.len() >= n && diag.len() >= n && sup.len() >= n && work.len() >= n);

    let mut denom = diag[0];
    work[0] = sup[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * work[i - 1];
        work[i] = sup[i] / denom;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= work[i] * next;
    }
}

/// LU factorization of a complex tridiagonal matrix with partial pivoting.
///
/// Row interchanges create one extra superdiagonal of fill, as in LAPACK's
/// `gttrf`. Used for resolvents `(zI − τL)⁻¹` where `z` may sit anywhere in
/// the cut plane and diagonal dominance is not guaranteed.
#[derive(Debug, Clone)]
pub struct PivotedTridiagonal<T> {
    lower: Vec<Complex<T>>,
    diag: Vec<Complex<T>>,
    sup1: Vec<Complex<T>>,
    sup2: Vec<Complex<T>>,
    swapped: Vec<bool>,
}

impl<T: Scalar> PivotedTridiagonal<T> {
    /// Factors the matrix; returns `None` if it is numerically singular.
    pub fn factor(sub: &[Complex<T>], diag: &[Complex<T>], sup: &[Complex<T>]) -> Option<Self> {
        let n = diag.len();
        let mut d: Vec<Complex<T>> = diag.to_vec();
        let mut du: Vec<Complex<T>> = (0..n).map(|i| if i + 1 < n { sup[i] } else { Complex::new(T::zero(), T::zero()) }).collect();
        let mut dl: Vec<Complex<T>> = (0..n).map(|i| if i + 1 < n { sub[i + 1] } else { Complex::new(T::zero(), T::zero()) }).collect();
        let mut du2 = vec![Complex::new(T::zero(), T::zero()); n];
        let mut swapped = vec![false; n];

        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() == T::zero() {
                    return None;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1].norm() == T::zero() {
            return None;
        }
        Some(Self {
            lower: dl,
            diag: d,
            sup1: du,
            sup2: du2,
            swapped,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex<T>]) {
        let n = self.len();
        assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            let bi = b[i];
            b[i + 1] -= self.lower[i] * bi;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.sup1[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.sup2[i] * b[i + 2];
            }
            b[i] = acc / self.diag[i];
        }
    }
}
