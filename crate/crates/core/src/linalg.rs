//! Determinants of small dense matrices via LU with partial pivoting.

use num_complex::Complex64;

/// Determinant of a row-major `n x n` real matrix. The input is consumed as
/// scratch space.
pub fn det_real(mut a: Vec<f64>, n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        let p = a[pivot * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor != 0.0 {
                for k in col + 1..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Complex counterpart of [`det_real`].
pub fn det_complex(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n);
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap();
        let p = a[pivot * n + col];
        if p.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            for k in col + 1..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(det_real(vec![2.0], 1), 2.0);
        assert!((det_real(vec![0.0, 1.0, 1.0, 0.0], 2) + 1.0).abs() < 1e-15);
        let a = vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        assert!((det_real(a, 3) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn complex_matches_real() {
        let a = vec![4.0, 1.0, 2.0, 3.0, 5.0, 1.0, 1.0, 1.0, 6.0];
        let c: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let d = det_complex(c, 3);
        assert!((d.re - det_real(a, 3)).abs() < 1e-12);
        assert!(d.im.abs() < 1e-14);
    }
}
