use crate::embedding::Embedding;
use crate::error::{Error, Result};

/// Least-squares affine map `y = A x + b` taking `source` coordinates onto
/// `target` coordinates, fitted on the rows in `fit_on` and applied to all.
pub fn affine_align(source: &Embedding, target: &Embedding, fit_on: &[usize]) -> Result<Embedding> {
    if source.len() != target.len() {
        return Err(Error::Dimension {
            expected: target.len(),
            actual: source.len(),
        });
    }
    let (ds, dt) = (source.dim(), target.dim());
    let p = ds + 1;
    if fit_on.len() < p {
        return Err(Error::Argument(format!("affine fit needs at least {p} points, got {}", fit_on.len())));
    }

    // Normal equations: (X^T X) W = X^T Y with X augmented by a ones column.
    let mut xtx = vec![0.0; p * p];
    let mut xty = vec![0.0; p * dt];
    for &i in fit_on {
        let x: Vec<f64> = source.point(i).iter().copied().chain([1.0]).collect();
        let y = target.point(i);
        for r in 0..p {
            for c in 0..p {
                xtx[r * p + c] += x[r] * x[c];
            }
            for c in 0..dt {
                xty[r * dt + c] += x[r] * y[c];
            }
        }
    }
    let w = solve(xtx, xty, p, dt)
        .ok_or_else(|| Error::Argument("affine fit is singular: source points are degenerate".into()))?;

    let mut coords = Vec::with_capacity(source.len() * dt);
    for x in source.points() {
        for c in 0..dt {
            let v = (0..ds).map(|r| x[r] * w[r * dt + c]).sum::<f64>() + w[ds * dt + c];
            coords.push(v);
        }
    }
    Embedding::new(source.ids().to_vec(), dt, coords)
}

/// Gaussian elimination with partial pivoting on `a` (`n x n`) against
/// `m` right-hand sides.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize, m: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))?;
        if a[pivot * n + col].abs() <= scale * 1e-12 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            for k in 0..m {
                b.swap(pivot * m + k, col * m + k);
            }
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            for k in 0..m {
                b[row * m + k] -= f * b[col * m + k];
            }
        }
    }
    for col in (0..n).rev() {
        for k in 0..m {
            let tail: f64 = (col + 1..n).map(|j| a[col * n + j] * b[j * m + k]).sum();
            b[col * m + k] = (b[col * m + k] - tail) / a[col * n + col];
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_known_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 30;
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let src: Vec<f64> = (0..n * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // Reflection + rotation + scale + shift.
        let a = [[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, -1.5]];
        let shift = [3.0, -1.0, 0.25];
        let dst: Vec<f64> = src
            .chunks(3)
            .flat_map(|x| (0..3).map(move |r| (0..3).map(|c| a[r][c] * x[c]).sum::<f64>() + shift[r]))
            .collect();
        let s = Embedding::new(ids.clone(), 3, src).unwrap();
        let t = Embedding::new(ids, 3, dst).unwrap();
        let fit: Vec<usize> = (0..20).collect();
        let out = affine_align(&s, &t, &fit).unwrap();
        for (u, v) in out.coords().iter().zip(t.coords()) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_source_is_rejected() {
        let ids: Vec<String> = (0..5).map(|i| format!("p{i}")).collect();
        let s = Embedding::new(ids.clone(), 2, vec![1.0; 10]).unwrap();
        let t = Embedding::new(ids, 2, (0..10).map(f64::from).collect()).unwrap();
        assert!(affine_align(&s, &t, &[0, 1, 2, 3, 4]).is_err());
        assert!(affine_align(&s, &t, &[0, 1]).is_err());
    }
}
