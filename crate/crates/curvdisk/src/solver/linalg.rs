//! Matrix-free GMRES with modified Gram-Schmidt, used for every Newton step
//! in this module.  The operators are compact perturbations of the identity,
//! so no restarting or preconditioning is needed.

use nalgebra::DVector;

/// Solve A x = b for a linear operator given only as `apply`, starting from
/// x = 0, to relative residual `rtol` or at most `max_iter` Krylov vectors.
/// Returns (x, achieved relative residual, iterations).
pub fn gmres(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    b: &DVector<f64>,
    rtol: f64,
    max_iter: usize,
) -> (DVector<f64>, f64, usize) {
    let n = b.len();
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return (DVector::zeros(n), 0.0, 0);
    }

    let max_iter = max_iter.min(n);
    let mut basis: Vec<DVector<f64>> = vec![b / bnorm];
    // Column-major upper-Hessenberg entries after Givens elimination.
    let mut rcols: Vec<DVector<f64>> = Vec::new();
    let mut cs: Vec<(f64, f64)> = Vec::new();
    let mut g = vec![bnorm];
    let mut rel = 1.0;
    let mut k = 0;

    while k < max_iter && rel > rtol {
        let mut v = apply(&basis[k]);
        let mut hcol = DVector::zeros(k + 2);
        // Modified Gram-Schmidt, twice: the second pass mops up the loss of
        // orthogonality that otherwise stalls convergence near roundoff.
        for _ in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let proj = q.dot(&v);
                hcol[i] += proj;
                v.axpy(-proj, q, 1.0);
            }
        }
        let hnext = v.norm();
        hcol[k + 1] = hnext;

        for (i, &(c, s)) in cs.iter().enumerate() {
            let t = c * hcol[i] + s * hcol[i + 1];
            hcol[i + 1] = -s * hcol[i] + c * hcol[i + 1];
            hcol[i] = t;
        }
        let (c, s) = {
            let denom = hcol[k].hypot(hcol[k + 1]);
            if denom == 0.0 {
                (1.0, 0.0)
            } else {
                (hcol[k] / denom, hcol[k + 1] / denom)
            }
        };
        hcol[k] = c * hcol[k] + s * hcol[k + 1];
        cs.push((c, s));
        g.push(-s * g[k]);
        g[k] *= c;
        rel = g[k + 1].abs() / bnorm;
        rcols.push(hcol);
        k += 1;

        if hnext <= f64::EPSILON * bnorm {
            break; // exact solution found in this Krylov space
        }
        basis.push(v / hnext);
    }

    // Back-substitute the triangular system held in rcols.
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for (j, yj) in y.iter().enumerate().take(k).skip(i + 1) {
            acc -= rcols[j][i] * yj;
        }
        y[i] = acc / rcols[i][i];
    }
    let mut x = DVector::zeros(n);
    for (i, yi) in y.iter().enumerate() {
        x.axpy(*yi, &basis[i], 1.0);
    }
    (x, rel, k)
}
