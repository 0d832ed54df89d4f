//! Dense determinants for the small finite-difference Jacobians used by the
//! Liouville and gauge-flow checks (dimension `2(2N+1)` with `N <= 8`).

/// Determinant of a row-major `dim x dim` matrix via LU with partial
/// pivoting. Consumes the buffer.
pub fn determinant(mut a: Vec<f64>, dim: usize) -> f64 {
    assert_eq!(a.len(), dim * dim);
    let mut det = 1.0;
    for col in 0..dim {
        let mut pivot = col;
        let mut best = a[col * dim + col].abs();
        for row in (col + 1)..dim {
            let v = a[row * dim + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..dim {
                a.swap(col * dim + j, pivot * dim + j);
            }
            det = -det;
        }
        let d = a[col * dim + col];
        det *= d;
        for row in (col + 1)..dim {
            let factor = a[row * dim + col] / d;
            if factor == 0.0 {
                continue;
            }
            for j in col..dim {
                a[row * dim + j] -= factor * a[col * dim + j];
            }
        }
    }
    det
}
