//! Eigen-decomposition of symmetric 3×3 matrices from the characteristic
//! polynomial, by bracketing and bisection.

pub type Mat3 = [[f64; 3]; 3];

/// Sample covariance (divisor `n - 1`) of rows with three columns.
pub fn covariance(rows: &[[f64; 3]]) -> Mat3 {
    let n = rows.len() as f64;
    let mut mean = [0.0; 3];
    for r in rows {
        for j in 0..3 {
            mean[j] += r[j] / n;
        }
    }
    let mut c = [[0.0; 3]; 3];
    for r in rows {
        for a in 0..3 {
            for b in 0..3 {
                c[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]) / (n - 1.0);
            }
        }
    }
    c
}

/// Coefficients of `det(λI − A) = λ³ + c2 λ² + c1 λ + c0`.
fn char_poly(a: &Mat3) -> (f64, f64, f64) {
    let tr = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2] - a[1][2] * a[2][1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    (-tr, minors, -det)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues in descending order.
pub fn eigenvalues(a: &Mat3) -> [f64; 3] {
    let (c2, c1, c0) = char_poly(a);
    let p = |x: f64| ((x + c2) * x + c1) * x + c0;
    // Gershgorin bound on the spectrum.
    let bound = (0..3)
        .map(|i| (0..3).map(|j| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    // Turning points of p split the real line into monotone pieces.
    let disc = (c2 * c2 - 3.0 * c1).max(0.0).sqrt();
    let t1 = ((-c2 - disc) / 3.0).clamp(-bound, bound);
    let t2 = ((-c2 + disc) / 3.0).clamp(-bound, bound);
    let pieces = [(-bound, t1), (t1, t2), (t2, bound)];
    let mut roots = [0.0; 3];
    for (k, &(lo, hi)) in pieces.iter().enumerate() {
        roots[k] = if p(lo) == 0.0 {
            lo
        } else if p(hi) == 0.0 || (p(lo) < 0.0) == (p(hi) < 0.0) {
            // Double root at a turning point.
            hi
        } else {
            bisect(p, lo, hi)
        };
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unit eigenvector for a simple eigenvalue, with its largest-magnitude
/// entry positive.
pub fn eigenvector(a: &Mat3, lambda: f64) -> [f64; 3] {
    let m: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            let mut r = a[i];
            r[i] -= lambda;
            r
        })
        .collect();
    let candidates = [cross(m[0], m[1]), cross(m[0], m[2]), cross(m[1], m[2])];
    let best = candidates
        .iter()
        .max_by(|x, y| norm(**x).total_cmp(&norm(**y)))
        .copied()
        .unwrap();
    let len = norm(best);
    let mut v = best.map(|x| x / len);
    let big = (0..3).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap();
    if v[big] < 0.0 {
        v = v.map(|x| -x);
    }
    v
}

fn norm(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let a = [[2.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, -1.0]];
        assert_eq!(eigenvalues(&a), [5.0, 2.0, -1.0]);
        assert_eq!(eigenvector(&a, 5.0), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn known_spectrum() {
        // [[2,1,0],[1,2,0],[0,0,3]] has eigenvalues 3, 3, 1.
        let a = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 3.0]];
        let e = eigenvalues(&a);
        for (x, y) in e.iter().zip([3.0, 3.0, 1.0]) {
            assert!((x - y).abs() < 1e-7, "{e:?}");
        }
    }
}
