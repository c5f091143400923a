//! Exact linear-system solving over the rationals, for Markov-chain value
//! computation. Plain Gaussian elimination with partial (first non-zero)
//! pivoting; the systems here are small and `I - γP` with `γ < 1` is always
//! non-singular.

use crate::rational::Rational;

/// Solve `a · x = b`. Returns `None` for singular systems.
pub fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        b[col] = &b[col] * &inv;
        for row in 0..n {
            if row == col || a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone();
            for k in col..n {
                let delta = &factor * &a[col][k];
                a[row][k] -= &delta;
            }
            let delta = &factor * &b[col];
            b[row] -= &delta;
        }
    }
    Some(b)
}
