//! Spectral collocation on the unit disk in polar coordinates.
//!
//! Angular direction: equispaced nodes with a real trigonometric basis,
//! transforms done by dense matrix products (sizes here never justify an
//! FFT).  Radial direction: mapped Gauss-Radau nodes with barycentric
//! differentiation.  The boundary circle r = 1 is a grid row, so boundary
//! data and Neumann conditions need no extrapolation.
//!
//! All reductions (quadrature, transforms) run in a fixed sequential order,
//! which keeps every derived quantity byte-reproducible across runs and
//! thread counts.

mod field;
mod gauss;

pub use field::{BoundaryField, DiskField};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use thiserror::Error;

/// Relative tolerance on the Neumann compatibility defect ∫f + ∮g.
pub const TOL_COMPAT: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid needs n_r >= 4 and even n_theta >= 8, got {n_r} x {n_theta}")]
    BadSize { n_r: usize, n_theta: usize },
    #[error("incompatible Neumann data: scaled defect {defect:.3e} exceeds {TOL_COMPAT:.1e}")]
    IncompatibleData { defect: f64 },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Polar collocation grid with precomputed transform, differentiation, and
/// per-mode Poisson factorizations.
pub struct Grid {
    pub n_r: usize,
    pub n_theta: usize,
    /// Radial nodes, ascending, `r[n_r - 1] == 1.0`.
    pub r: DVector<f64>,
    /// Weights for ∫_0^1 f(r) r dr over the radial nodes.
    pub w_r: DVector<f64>,
    /// Angular nodes theta_j = 2 pi j / n_theta.
    pub theta: DVector<f64>,
    /// Uniform angular weight 2 pi / n_theta.
    pub w_theta: f64,
    calc: gauss::ParityCalculus,
    /// d2 + diag(1/r) d1 per parity: the radial part of the Laplacian
    /// before the -m^2/r^2 mode shift.
    lap_base: [DMatrix<f64>; 2],
    rinv2: DVector<f64>,
    d_theta_t: DMatrix<f64>,
    /// Coefficients = fwd * values for a length-n_theta angular sample.
    fwd: DMatrix<f64>,
    fwd_t: DMatrix<f64>,
    inv_t: DMatrix<f64>,
    /// Angular wavenumber of each coefficient column.
    mode_of_col: Vec<usize>,
    /// LU of the mode-m radial Neumann operator, index m in 0..=n_theta/2.
    mode_lu: Vec<LU<f64, Dyn, Dyn>>,
}

impl Grid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Grid, GridError> {
        if n_r < 4 || n_theta < 8 || n_theta % 2 != 0 {
            return Err(GridError::BadSize { n_r, n_theta });
        }
        let (r, w_r) = gauss::radial_rule(n_r);
        let calc = gauss::parity_calculus(&r);
        let rinv = r.map(|v| 1.0 / v);
        let rinv2 = r.map(|v| 1.0 / (v * v));
        let lap_base = [0, 1].map(|p| {
            let mut base = calc.d2[p].clone();
            for i in 0..n_r {
                for k in 0..n_r {
                    base[(i, k)] += rinv[i] * calc.d1[p][(i, k)];
                }
            }
            base
        });

        let w_theta = 2.0 * PI / n_theta as f64;
        let theta = DVector::from_fn(n_theta, |j, _| w_theta * j as f64);
        let half = n_theta / 2;

        // Real trig transform: column layout [a_0, a_1, b_1, ..., a_half].
        let mut fwd = DMatrix::zeros(n_theta, n_theta);
        let mut inv = DMatrix::zeros(n_theta, n_theta);
        let mut mode_of_col = vec![0usize; n_theta];
        let inv_n = 1.0 / n_theta as f64;
        for j in 0..n_theta {
            inv[(j, 0)] = 1.0;
            fwd[(0, j)] = inv_n;
        }
        for m in 1..half {
            mode_of_col[2 * m - 1] = m;
            mode_of_col[2 * m] = m;
            for j in 0..n_theta {
                let (s, c) = (m as f64 * theta[j]).sin_cos();
                inv[(j, 2 * m - 1)] = c;
                inv[(j, 2 * m)] = s;
                fwd[(2 * m - 1, j)] = 2.0 * inv_n * c;
                fwd[(2 * m, j)] = 2.0 * inv_n * s;
            }
        }
        mode_of_col[n_theta - 1] = half;
        for j in 0..n_theta {
            // Nyquist column alternates sign; its sine partner vanishes at
            // the nodes and is not represented.
            let c = if j % 2 == 0 { 1.0 } else { -1.0 };
            inv[(j, n_theta - 1)] = c;
            fwd[(n_theta - 1, j)] = inv_n * c;
        }

        // Angular derivative at the nodes of the trig interpolant.
        let mut d_theta = DMatrix::zeros(n_theta, n_theta);
        for j in 0..n_theta {
            for k in 0..n_theta {
                if j != k {
                    let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
                    d_theta[(j, k)] = 0.5 * sign / ((theta[j] - theta[k]) * 0.5).tan();
                }
            }
        }

        // Mode-m radial operators for -lap v = f with Neumann data at r = 1.
        // Interior rows carry the r^2-scaled equation; the boundary row is
        // the derivative at r = 1; the m = 0 operator trades its innermost
        // collocation row for the quadrature-mean row that pins the
        // constant null direction.
        let mut mode_lu = Vec::with_capacity(half + 1);
        for m in 0..=half {
            let p = m % 2;
            let (d1m, d2m) = (&calc.d1[p], &calc.d2[p]);
            let mut a = DMatrix::zeros(n_r, n_r);
            let first = if m == 0 { 1 } else { 0 };
            if m == 0 {
                for k in 0..n_r {
                    a[(0, k)] = w_r[k];
                }
            }
            let m2 = (m * m) as f64;
            for i in first..n_r - 1 {
                for k in 0..n_r {
                    a[(i, k)] = -(r[i] * r[i] * d2m[(i, k)] + r[i] * d1m[(i, k)]);
                }
                a[(i, i)] += m2;
            }
            for k in 0..n_r {
                a[(n_r - 1, k)] = d1m[(n_r - 1, k)];
            }
            let lu = a.lu();
            assert!(lu.is_invertible(), "mode {m} radial operator is singular");
            mode_lu.push(lu);
        }

        Ok(Grid {
            n_r,
            n_theta,
            r,
            w_r,
            theta,
            w_theta,
            calc,
            lap_base,
            rinv2,
            d_theta_t: d_theta.transpose(),
            fwd_t: fwd.transpose(),
            fwd,
            inv_t: inv.transpose(),
            mode_of_col,
            mode_lu,
        })
    }

    // ----- sampling -----------------------------------------------------

    /// Sample `f(r, theta)` at every node.
    pub fn field_from_polar(&self, f: impl Fn(f64, f64) -> f64) -> DiskField {
        DiskField(DMatrix::from_fn(self.n_r, self.n_theta, |i, j| {
            f(self.r[i], self.theta[j])
        }))
    }

    /// Sample `f(x1, x2)` at every node.
    pub fn field_from_xy(&self, f: impl Fn(f64, f64) -> f64) -> DiskField {
        self.field_from_polar(|r, t| f(r * t.cos(), r * t.sin()))
    }

    /// Sample `f(theta)` at every boundary node.
    pub fn boundary_from_fn(&self, f: impl Fn(f64) -> f64) -> BoundaryField {
        BoundaryField(DVector::from_fn(self.n_theta, |j, _| f(self.theta[j])))
    }

    // ----- quadrature ---------------------------------------------------

    /// ∫∫ u dA over the disk.
    pub fn integrate(&self, u: &DiskField) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n_r {
            let mut ring = 0.0;
            for j in 0..self.n_theta {
                ring += u.0[(i, j)];
            }
            total += self.w_r[i] * ring;
        }
        total * self.w_theta
    }

    /// Mean value of u over the disk.
    pub fn mean(&self, u: &DiskField) -> f64 {
        self.integrate(u) / PI
    }

    /// ∮ b ds over the boundary circle.
    pub fn boundary_integral(&self, b: &BoundaryField) -> f64 {
        let mut total = 0.0;
        for j in 0..self.n_theta {
            total += b.0[j];
        }
        total * self.w_theta
    }

    // ----- restriction and traces ----------------------------------------

    /// Copy of the r = 1 row.
    pub fn boundary_row(&self, u: &DiskField) -> BoundaryField {
        BoundaryField(u.0.row(self.n_r - 1).transpose())
    }

    /// Outward normal derivative ∂u/∂r at r = 1.
    pub fn normal_derivative(&self, u: &DiskField) -> BoundaryField {
        self.boundary_row(&self.radial_derivative(u))
    }

    // ----- transforms ----------------------------------------------------

    /// Angular trig coefficients of each radial row.
    pub fn to_modes(&self, u: &DiskField) -> DMatrix<f64> {
        &u.0 * &self.fwd_t
    }

    /// Inverse of [`Grid::to_modes`].
    pub fn from_modes(&self, coeffs: &DMatrix<f64>) -> DiskField {
        DiskField(coeffs * &self.inv_t)
    }

    /// Trig coefficients of a boundary sample.
    pub fn boundary_modes(&self, b: &BoundaryField) -> DVector<f64> {
        &self.fwd * &b.0
    }

    /// Values of the coefficient-column basis functions at angle `theta`.
    fn trig_basis(&self, theta: f64) -> DVector<f64> {
        let half = self.n_theta / 2;
        let mut basis = DVector::zeros(self.n_theta);
        basis[0] = 1.0;
        for m in 1..half {
            let (s, c) = (m as f64 * theta).sin_cos();
            basis[2 * m - 1] = c;
            basis[2 * m] = s;
        }
        basis[self.n_theta - 1] = (half as f64 * theta).cos();
        basis
    }

    // ----- differential operators ----------------------------------------

    /// ∂u/∂r at every node, differentiating each angular mode with its own
    /// parity extension across the axis.
    pub fn radial_derivative(&self, u: &DiskField) -> DiskField {
        let coeffs = self.to_modes(u);
        let even = &self.calc.d1[0] * &coeffs;
        let odd = &self.calc.d1[1] * &coeffs;
        let mut out = DMatrix::zeros(self.n_r, self.n_theta);
        for c in 0..self.n_theta {
            let src = if self.mode_of_col[c] % 2 == 0 { &even } else { &odd };
            for i in 0..self.n_r {
                out[(i, c)] = src[(i, c)];
            }
        }
        self.from_modes(&out)
    }

    /// Cartesian gradient (∂u/∂x1, ∂u/∂x2) at every node.
    pub fn gradient(&self, u: &DiskField) -> (DiskField, DiskField) {
        let ur = self.radial_derivative(u).0;
        let ut = &u.0 * &self.d_theta_t;
        let mut gx = DMatrix::zeros(self.n_r, self.n_theta);
        let mut gy = DMatrix::zeros(self.n_r, self.n_theta);
        for j in 0..self.n_theta {
            let (s, c) = self.theta[j].sin_cos();
            for i in 0..self.n_r {
                let rinv = 1.0 / self.r[i];
                gx[(i, j)] = c * ur[(i, j)] - s * rinv * ut[(i, j)];
                gy[(i, j)] = s * ur[(i, j)] + c * rinv * ut[(i, j)];
            }
        }
        (DiskField(gx), DiskField(gy))
    }

    /// Laplacian at every node.
    pub fn laplacian(&self, u: &DiskField) -> DiskField {
        let coeffs = self.to_modes(u);
        let even = &self.lap_base[0] * &coeffs;
        let odd = &self.lap_base[1] * &coeffs;
        let mut out = DMatrix::zeros(self.n_r, self.n_theta);
        for c in 0..self.n_theta {
            let m = self.mode_of_col[c];
            let src = if m % 2 == 0 { &even } else { &odd };
            let m2 = (m * m) as f64;
            for i in 0..self.n_r {
                out[(i, c)] = src[(i, c)] - m2 * self.rinv2[i] * coeffs[(i, c)];
            }
        }
        self.from_modes(&out)
    }

    /// Dirichlet energy ∫ |∇u|^2 dA.
    pub fn dirichlet_energy(&self, u: &DiskField) -> f64 {
        let (gx, gy) = self.gradient(u);
        let sq = DiskField(gx.0.zip_map(&gy.0, |a, b| a * a + b * b));
        self.integrate(&sq)
    }

    // ----- boundary value problems ---------------------------------------

    /// Solve -lap v = f in the disk, ∂v/∂r = g on the boundary, normalized
    /// to zero disk mean.  Fails if the data violate the divergence-theorem
    /// compatibility ∫f + ∮g = 0 beyond [`TOL_COMPAT`].
    pub fn poisson_neumann(
        &self,
        f: &DiskField,
        g: &BoundaryField,
    ) -> Result<DiskField, GridError> {
        let defect = self.integrate(f) + self.boundary_integral(g);
        let scale = 1.0 + f.sup_norm() + g.sup_norm();
        if !(defect / scale).abs().is_finite() || (defect / scale).abs() > TOL_COMPAT {
            return Err(GridError::IncompatibleData {
                defect: defect / scale,
            });
        }
        let fm = self.to_modes(f);
        let gm = self.boundary_modes(g);
        let mut vm = DMatrix::zeros(self.n_r, self.n_theta);
        let mut rhs = DVector::zeros(self.n_r);
        for c in 0..self.n_theta {
            let m = self.mode_of_col[c];
            let first = if m == 0 { 1 } else { 0 };
            if m == 0 {
                rhs[0] = 0.0;
            }
            for i in first..self.n_r - 1 {
                rhs[i] = self.r[i] * self.r[i] * fm[(i, c)];
            }
            rhs[self.n_r - 1] = gm[c];
            let sol = self.mode_lu[m]
                .solve(&rhs)
                .expect("mode operator verified invertible at construction");
            vm.set_column(c, &sol);
        }
        let mut v = self.from_modes(&vm);
        let mean = self.mean(&v);
        v.0.iter_mut().for_each(|x| *x -= mean);
        Ok(v)
    }

    /// Harmonic extension of boundary data: mode m decays like r^m.
    pub fn harmonic_extend(&self, h: &BoundaryField) -> DiskField {
        let hm = self.boundary_modes(h);
        let mut coeffs = DMatrix::zeros(self.n_r, self.n_theta);
        for c in 0..self.n_theta {
            let m = self.mode_of_col[c] as i32;
            for i in 0..self.n_r {
                coeffs[(i, c)] = hm[c] * self.r[i].powi(m);
            }
        }
        self.from_modes(&coeffs)
    }

    // ----- pointwise evaluation ------------------------------------------

    /// Evaluate the interpolant of `u` at an arbitrary point (r, theta),
    /// 0 <= r <= 1: parity-aware barycentric interpolation of each angular
    /// mode in r, then the trig sum at theta.
    pub fn eval_at(&self, u: &DiskField, r: f64, theta: f64) -> f64 {
        let coeffs = self.to_modes(u);
        let basis = self.trig_basis(theta);
        let mut acc = 0.0;
        for c in 0..self.n_theta {
            let sigma = if self.mode_of_col[c] % 2 == 0 { 1.0 } else { -1.0 };
            let col = coeffs.column(c);
            acc += basis[c] * gauss::bary_eval_sym(&self.calc.y, &self.calc.bw, |i| col[i], sigma, r);
        }
        acc
    }

    /// Evaluate the trig interpolant of boundary data at angle `theta`.
    pub fn boundary_eval(&self, b: &BoundaryField, theta: f64) -> f64 {
        self.boundary_modes(b).dot(&self.trig_basis(theta))
    }

    /// Trig coefficients of `u` restricted to the circle of given radius —
    /// the cheap way to sample one ring at many angles.
    pub fn ring_modes(&self, u: &DiskField, radius: f64) -> DVector<f64> {
        let coeffs = self.to_modes(u);
        DVector::from_fn(self.n_theta, |c, _| {
            let sigma = if self.mode_of_col[c] % 2 == 0 { 1.0 } else { -1.0 };
            let col = coeffs.column(c);
            gauss::bary_eval_sym(&self.calc.y, &self.calc.bw, |i| col[i], sigma, radius)
        })
    }

    /// Evaluate a coefficient vector (from [`Grid::ring_modes`] or
    /// [`Grid::boundary_modes`]) at angle `theta`.
    pub fn modes_eval(&self, modes: &DVector<f64>, theta: f64) -> f64 {
        modes.dot(&self.trig_basis(theta))
    }
}
