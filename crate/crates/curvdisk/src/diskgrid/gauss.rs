//! Radial quadrature nodes and polynomial differentiation tables.
//!
//! The radial nodes are images r = sqrt((x+1)/2) of a Gauss-Radau rule on
//! [-1, 1] with the fixed endpoint at x = +1.  This guarantees r = 1 is a
//! node (boundary data lives on a grid row) while the innermost node stays
//! O(1/n) away from the axis, where 1/r^2 factors would otherwise amplify
//! angular transform roundoff.  Substituting t = r^2 shows the weights
//! integrate f(r) r dr exactly whenever f is an even polynomial of degree
//! at most 2(2n - 2).

use nalgebra::{DMatrix, DVector};

/// Gauss-Radau rule on [-1, 1] with a node fixed at x = +1.
///
/// Returns `(nodes, weights)` with nodes ascending; exact for polynomials of
/// degree <= 2n - 2 against unit weight.
pub(crate) fn radau_right(n: usize) -> (DVector<f64>, DVector<f64>) {
    assert!(n >= 2, "radau rule needs at least two nodes");
    // Monic Legendre three-term recurrence coefficients, kept 1-indexed to
    // match p_{k+1} = x p_k - b_k p_{k-1}: b[k] = k^2/(4k^2 - 1).
    let mut b = vec![0.0_f64; n];
    for k in 1..n {
        let kf = k as f64;
        b[k] = kf * kf / (4.0 * kf * kf - 1.0);
    }
    // Values p_k(1) of the monic polynomials, used to shift the last Jacobi
    // diagonal so that x = 1 becomes an eigenvalue.
    let mut p_at_one = vec![0.0_f64; n];
    p_at_one[0] = 1.0;
    p_at_one[1] = 1.0;
    for k in 2..n {
        p_at_one[k] = p_at_one[k - 1] - b[k - 1] * p_at_one[k - 2];
    }
    let alpha_last = 1.0 - b[n - 1] * p_at_one[n - 2] / p_at_one[n - 1];

    let mut jac = DMatrix::<f64>::zeros(n, n);
    jac[(n - 1, n - 1)] = alpha_last;
    for i in 0..n - 1 {
        let off = b[i + 1].sqrt();
        jac[(i, i + 1)] = off;
        jac[(i + 1, i)] = off;
    }
    let eig = jac.symmetric_eigen();
    // Golub-Welsch: weight = mu_0 * (first eigenvector component)^2, mu_0 = 2.
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], 2.0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x = DVector::from_iterator(n, pairs.iter().map(|p| p.0));
    let w = DVector::from_iterator(n, pairs.iter().map(|p| p.1));
    (x, w)
}

/// Nodes and weights for radial integrals ∫_0^1 f(r) r dr, with r[n-1] == 1.
pub(crate) fn radial_rule(n: usize) -> (DVector<f64>, DVector<f64>) {
    let (x, wx) = radau_right(n);
    let mut r = x.map(|xi| ((xi + 1.0) * 0.5).sqrt());
    let w = wx.map(|wi| wi * 0.25);
    assert!(
        (r[n - 1] - 1.0).abs() < 1e-12,
        "fixed radau node drifted from the boundary"
    );
    r[n - 1] = 1.0;
    (r, w)
}

/// Barycentric interpolation weights for the node set `x`, scaled so the
/// largest magnitude is 1 (the common factor cancels in every use).
pub(crate) fn barycentric_weights(x: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    let mut prod = DVector::from_element(n, 1.0_f64);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                prod[i] *= x[i] - x[j];
            }
        }
    }
    let scale = prod.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    prod.map(|v| scale / v)
}

/// Parity-folded radial differentiation tables on the doubled node set.
///
/// Interpolating u_m(r) directly on the positive nodes is badly conditioned
/// (they are nowhere near a Chebyshev density on [0, 1]).  The doubled,
/// sign-symmetric set {-r_i} ∪ {r_i} is Chebyshev-like on [-1, 1], and an
/// angular mode m extends across the axis with parity (-1)^m, so folding the
/// full-set matrices by that symmetry gives well-conditioned derivatives in
/// the function class the modes actually live in.
pub(crate) struct ParityCalculus {
    /// First derivative at the positive nodes; index 0 = even, 1 = odd.
    pub d1: [DMatrix<f64>; 2],
    /// Second derivative, same parity indexing.
    pub d2: [DMatrix<f64>; 2],
    /// Doubled node set, ascending.
    pub y: DVector<f64>,
    /// Barycentric weights of the doubled set.
    pub bw: DVector<f64>,
}

pub(crate) fn parity_calculus(r: &DVector<f64>) -> ParityCalculus {
    let n = r.len();
    let mut y = DVector::zeros(2 * n);
    for i in 0..n {
        y[n + i] = r[i];
        y[n - 1 - i] = -r[i];
    }
    let bw = barycentric_weights(&y);
    let d1f = diff_matrix(&y, &bw);
    let d2f = diff2_matrix(&y, &d1f);
    let fold = |m: &DMatrix<f64>, sigma: f64| {
        DMatrix::from_fn(n, n, |i, j| m[(n + i, n + j)] + sigma * m[(n + i, n - 1 - j)])
    };
    ParityCalculus {
        d1: [fold(&d1f, 1.0), fold(&d1f, -1.0)],
        d2: [fold(&d2f, 1.0), fold(&d2f, -1.0)],
        y,
        bw,
    }
}

/// Evaluate the parity-extended interpolant of positive-node data at `t`.
pub(crate) fn bary_eval_sym(
    y: &DVector<f64>,
    bw: &DVector<f64>,
    vals: impl Fn(usize) -> f64,
    sigma: f64,
    t: f64,
) -> f64 {
    let n = y.len() / 2;
    bary_eval(
        y,
        bw,
        |k| {
            if k >= n {
                vals(k - n)
            } else {
                sigma * vals(n - 1 - k)
            }
        },
        t,
    )
}

/// First-derivative collocation matrix on the nodes `x`.
pub(crate) fn diff_matrix(x: &DVector<f64>, bw: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bw[j] / bw[i]) / (x[i] - x[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        // Constants differentiate to zero, so the diagonal closes the row.
        d[(i, i)] = -row_sum;
    }
    d
}

/// Second-derivative collocation matrix, built from the first via Welfert's
/// recursion; the diagonal again comes from the zero-row-sum identity.
pub(crate) fn diff2_matrix(x: &DVector<f64>, d1: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = 2.0 * d1[(i, j)] * (d1[(i, i)] - 1.0 / (x[i] - x[j]));
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum;
    }
    d
}

/// Evaluate the interpolating polynomial through (x_i, f(i)) at `t` using the
/// second barycentric form.  Exact node hits short-circuit to the data value.
pub(crate) fn bary_eval(
    x: &DVector<f64>,
    bw: &DVector<f64>,
    f: impl Fn(usize) -> f64,
    t: f64,
) -> f64 {
    let n = x.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let dt = t - x[i];
        if dt == 0.0 {
            return f(i);
        }
        let c = bw[i] / dt;
        num += c * f(i);
        den += c;
    }
    num / den
}
