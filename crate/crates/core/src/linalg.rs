//! Fixed-size dense complex LU with partial pivoting.

use num_complex::Complex64 as C64;

/// Pivots smaller than this fraction of the largest matrix entry count as zero.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct Lu<const N: usize> {
    factors: [[C64; N]; N],
    perm: [usize; N],
}

/// Returned when a pivot vanishes; carries max|pivot| / min|pivot|.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Singular {
    pub condition: f64,
}

impl<const N: usize> Lu<N> {
    pub fn factor(mut a: [[C64; N]; N]) -> Result<Self, Singular> {
        let scale = a
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut max_pivot = 0.0_f64;

        for k in 0..N {
            let (p, pivot_norm) = (k..N)
                .map(|i| (i, a[i][k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            max_pivot = max_pivot.max(pivot_norm);
            if scale == 0.0 || pivot_norm <= PIVOT_TOLERANCE * scale {
                return Err(Singular {
                    condition: if pivot_norm == 0.0 {
                        f64::INFINITY
                    } else {
                        max_pivot.max(scale) / pivot_norm
                    },
                });
            }
            if p != k {
                a.swap(p, k);
                perm.swap(p, k);
            }
            let inv = a[k][k].inv();
            let pivot_row = a[k];
            for row in a.iter_mut().skip(k + 1) {
                let f = row[k] * inv;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                row[k] = f;
                for j in (k + 1)..N {
                    row[j] -= f * pivot_row[j];
                }
            }
        }
        Ok(Self { factors: a, perm })
    }

    pub fn solve(&self, b: &[C64; N]) -> [C64; N] {
        let mut x = [C64::new(0.0, 0.0); N];
        for (i, &p) in self.perm.iter().enumerate() {
            x[i] = b[p];
        }
        for i in 0..N {
            let mut s = x[i];
            for j in 0..i {
                s -= self.factors[i][j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..N).rev() {
            let mut s = x[i];
            for j in (i + 1)..N {
                s -= self.factors[i][j] * x[j];
            }
            x[i] = s / self.factors[i][i];
        }
        x
    }

    /// 1-norm condition number of the original matrix, ‖A‖₁‖A⁻¹‖₁.
    pub fn condition_1(&self, a: &[[C64; N]; N]) -> f64 {
        let norm_a = (0..N)
            .map(|j| (0..N).map(|i| a[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut norm_inv = 0.0_f64;
        for j in 0..N {
            let mut e = [C64::new(0.0, 0.0); N];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e);
            norm_inv = norm_inv.max(col.iter().map(|z| z.norm()).sum());
        }
        norm_a * norm_inv
    }
}

pub(crate) fn mat_vec<const N: usize>(a: &[[C64; N]; N], x: &[C64; N]) -> [C64; N] {
    let mut y = [C64::new(0.0, 0.0); N];
    for (yi, row) in y.iter_mut().zip(a.iter()) {
        *yi = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    }
    y
}
