//! Singular values of a small complex matrix by one-sided (Hestenes) Jacobi.
//!
//! The shorter dimension is orthogonalized pairwise until every pair of
//! vectors is orthogonal to machine precision; the squared singular values
//! are then the squared vector norms, which keeps `Σ S²` equal to the
//! Frobenius norm to rounding.

use num_complex::Complex64;

use crate::error::{DickeError, Result};

const MAX_SWEEPS: usize = 80;
const NEGLIGIBLE: f64 = 1e-250;

/// Squared singular values of the `rows × cols` row-major matrix `data`,
/// descending, `min(rows, cols)` entries.
pub fn singular_values_squared(rows: usize, cols: usize, data: &[Complex64]) -> Result<Vec<f64>> {
    assert_eq!(data.len(), rows * cols);
    // vectors = rows of the matrix when there are fewer rows, else columns
    let mut vecs: Vec<Vec<Complex64>> = if rows <= cols {
        data.chunks(cols).map(|r| r.to_vec()).collect()
    } else {
        (0..cols)
            .map(|c| (0..rows).map(|r| data[r * cols + c]).collect())
            .collect()
    };
    let k = vecs.len();
    let mut norms: Vec<f64> = vecs.iter().map(|v| sq_norm(v)).collect();
    let tol = f64::EPSILON * (rows.max(cols) as f64);

    let mut converged = k < 2;
    let mut sweeps = 0;
    let mut residual: f64 = 0.0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        converged = true;
        residual = 0.0;
        for p in 0..k - 1 {
            for q in p + 1..k {
                let alpha = norms[p];
                let beta = norms[q];
                // vectors this small carry no resolvable weight
                if alpha < NEGLIGIBLE || beta < NEGLIGIBLE {
                    continue;
                }
                let gamma: Complex64 = vecs[p].iter().zip(&vecs[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 {
                    continue;
                }
                let rel = g / (alpha.sqrt() * beta.sqrt());
                residual = residual.max(rel);
                if rel <= tol {
                    continue;
                }
                converged = false;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = vecs.split_at_mut(q);
                let (vp, vq) = (&mut left[p], &mut right[0]);
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let b = *y * phase;
                    let xp = *x * c - b * s;
                    *y = *x * s + b * c;
                    *x = xp;
                }
                norms[p] = sq_norm(vp);
                norms[q] = sq_norm(vq);
            }
        }
    }
    if !converged {
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(DickeError::SvdFailure {
            sweeps,
            residual,
            condition: (max / min).sqrt(),
        });
    }
    norms.sort_by(|a, b| b.total_cmp(a));
    Ok(norms)
}

fn sq_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..rows * cols)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn matches_nalgebra_svd() {
        for (rows, cols, seed) in [(3, 7, 1), (9, 4, 2), (6, 6, 3), (1, 5, 4), (5, 1, 5)] {
            let data = random(rows, cols, seed);
            let ours = singular_values_squared(rows, cols, &data).unwrap();
            let m = DMatrix::from_row_slice(rows, cols, &data);
            let mut theirs: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
            theirs.sort_by(|a, b| b.total_cmp(a));
            assert_eq!(ours.len(), rows.min(cols));
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rank_deficient_and_zero() {
        // outer product u v^T: one nonzero singular value |u||v|
        let u = [Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)];
        let v = [Complex64::new(3.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(1.0, 0.0)];
        let data: Vec<_> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        let s = singular_values_squared(2, 3, &data).unwrap();
        assert!((s[0] - 6.0 * 11.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
        let zeros = vec![Complex64::default(); 6];
        assert_eq!(singular_values_squared(2, 3, &zeros).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn tiny_entries_do_not_stall() {
        let mut data = random(4, 6, 9);
        for a in data.iter_mut().skip(6) {
            *a *= 1e-160;
        }
        let s = singular_values_squared(4, 6, &data).unwrap();
        assert!(s[0] > 0.1);
    }

    #[test]
    fn degenerate_values() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut data = vec![Complex64::default(); 9];
        data[0] = Complex64::new(h, 0.0);
        data[1 * 3 + 2] = Complex64::new(0.0, h);
        let s = singular_values_squared(3, 3, &data).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-15 && (s[1] - 0.5).abs() < 1e-15 && s[2] == 0.0);
    }
}
