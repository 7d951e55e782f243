//! Symmetric tridiagonal eigenvalue solver (implicit-shift QL).
//!
//! This is the classic tql2 iteration, restricted to accumulating the first
//! row of the eigenvector matrix, which is all the Golub-Welsch weight
//! formula needs.

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e` (`e[i]` couples rows i and i+1; `e` has length `d.len()-1`
/// or `d.len()` with the last entry ignored).
///
/// On success returns `(eigenvalues, first_components)` sorted ascending,
/// where `first_components[i]` is the first entry of the i-th normalized
/// eigenvector.
pub fn tridiagonal_eigen(diag: &[f64], sub: &[f64]) -> Result<(Vec<f64>, Vec<f64>), &'static str> {
    let n = diag.len();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&sub[..n - 1]);

    let mut z = vec![0.0; n];
    z[0] = 1.0;

    const MAX_SWEEPS: usize = 64;
    const OFFDIAG_TOL: f64 = 1e-15;

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal element to split the matrix.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= OFFDIAG_TOL * dd + f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err("tridiagonal QL iteration failed to converge");
            }

            // Implicit shift from the trailing 2x2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let first: Vec<f64> = order.iter().map(|&i| z[i]).collect();
    Ok((eigenvalues, first))
}
