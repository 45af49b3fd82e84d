//! Variational layer: the normalization constant c(u), the fixed-point
//! operator T, the energy functional J with its gradient, the center-of-mass
//! map, and the conserved-quantity residuals (Gauss-Bonnet, Kazdan-Warner,
//! mass bounds) used to audit candidate solutions.

use std::f64::consts::PI;

use thiserror::Error;

use crate::diskgrid::{BoundaryField, DiskField, Grid, GridError};

#[derive(Debug, Error)]
pub enum MeanFieldError {
    #[error("no normalization constant: area term {a:.6e} and boundary term {b:.6e} admit no positive root")]
    NoNormalization { a: f64, b: f64 },
    #[error("energy undefined: curvature mass {mass:.6e} is not positive")]
    NonpositiveMass { mass: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Curvature data for one subproblem.  `k` and `h` are the effective fields
/// after any homotopy mixing; `s` records the parameter that produced them.
pub struct ProblemData<'g> {
    pub grid: &'g Grid,
    pub k: DiskField,
    pub h: BoundaryField,
    pub s: f64,
}

impl<'g> ProblemData<'g> {
    pub fn new(grid: &'g Grid, k: DiskField, h: BoundaryField, s: f64) -> Self {
        ProblemData { grid, k, h, s }
    }

    /// Reduced problem: interior curvature only, no boundary term.
    pub fn reduced(grid: &'g Grid, k: DiskField, s: f64) -> Self {
        let h = BoundaryField::zeros(grid);
        ProblemData { grid, k, h, s }
    }
}

/// Energy value together with the data needed to judge criticality.
#[derive(Clone, Copy, Debug)]
pub struct FunctionalValue {
    pub j: f64,
    /// Seminorm ‖∇(u − T u)‖_{L²}, the gradient size in the energy metric.
    pub grad_norm: f64,
    pub c_of_u: f64,
}

/// Normalization constant: the unique real c with
/// e^c ∫K e^u + e^{c/2} ∮h e^{u/2} = 2π.
///
/// With A = ∫K e^u and B = ∮h e^{u/2}, t = e^{c/2} solves At² + Bt = 2π.
/// The conjugate form t = 4π / (B + √(B² + 8πA)) selects the same root as
/// the quadratic formula for every valid (A, B) and stays stable as A
/// passes through zero, so no separate small-A branch is needed.
pub fn c_of(data: &ProblemData, u: &DiskField) -> Result<f64, MeanFieldError> {
    let grid = data.grid;
    let ke_u = DiskField(data.k.0.zip_map(&u.0, |k, uu| k * uu.exp()));
    let a = grid.integrate(&ke_u);
    let ub = grid.boundary_row(u);
    let he_u2 = BoundaryField(data.h.0.zip_map(&ub.0, |h, uu| h * (uu / 2.0).exp()));
    let b = grid.boundary_integral(&he_u2);

    // Negated comparisons so that NaN data (an overflowed iterate, say)
    // lands in the error branch instead of poisoning the caller.
    let disc = b * b + 8.0 * PI * a;
    if !(disc >= 0.0) {
        return Err(MeanFieldError::NoNormalization { a, b });
    }
    let denom = b + disc.sqrt();
    if !(denom > 0.0) {
        return Err(MeanFieldError::NoNormalization { a, b });
    }
    let t = 4.0 * PI / denom;
    if !t.is_finite() {
        return Err(MeanFieldError::NoNormalization { a, b });
    }
    let c = 2.0 * t.ln();
    debug_assert!(
        (a * t * t + b * t - 2.0 * PI).abs() <= 1e-11 * (1.0 + a.abs() * t * t + b.abs() * t),
        "normalization root lost accuracy"
    );
    Ok(c)
}

/// Fixed-point operator: T(u) solves
/// −Δv = 2K e^{u+c(u)},  ∂v/∂ν = 2h e^{(u+c(u))/2} − 2,
/// projected to zero mean.  The normalization c(u) makes the Neumann data
/// compatible by construction, so the solve cannot reject them.
pub fn apply_t(data: &ProblemData, u: &DiskField) -> Result<DiskField, MeanFieldError> {
    let grid = data.grid;
    let c = c_of(data, u)?;
    let f = DiskField(data.k.0.zip_map(&u.0, |k, uu| 2.0 * k * (uu + c).exp()));
    let ub = grid.boundary_row(u);
    let g = BoundaryField(
        data.h
            .0
            .zip_map(&ub.0, |h, uu| 2.0 * h * ((uu + c) / 2.0).exp() - 2.0),
    );
    Ok(grid.poisson_neumann(&f, &g)?)
}

/// Seminorm pairing ∫∇a·∇b, the inner product behind the gradient field.
pub fn grad_pairing(grid: &Grid, a: &DiskField, b: &DiskField) -> f64 {
    let (ax, ay) = grid.gradient(a);
    let (bx, by) = grid.gradient(b);
    let dot = DiskField(DiskField(ax.0.component_mul(&bx.0)).0 + ay.0.component_mul(&by.0));
    grid.integrate(&dot)
}

/// Energy of the reduced problem,
/// J(u) = ½∫|∇u|² + 2∮u − 4π log ∫K e^u,
/// together with the norm of its gradient u − T(u).  Meaningful when the
/// boundary term of `data` is zero; the log requires positive curvature mass.
pub fn j_value(data: &ProblemData, u: &DiskField) -> Result<FunctionalValue, MeanFieldError> {
    let grid = data.grid;
    let ke_u = DiskField(data.k.0.zip_map(&u.0, |k, uu| k * uu.exp()));
    let mass = grid.integrate(&ke_u);
    if mass <= 0.0 {
        return Err(MeanFieldError::NonpositiveMass { mass });
    }
    let j = 0.5 * grid.dirichlet_energy(u) + 2.0 * grid.boundary_integral(&grid.boundary_row(u))
        - 4.0 * PI * mass.ln();
    let grad = j_grad(data, u)?;
    let grad_norm = grid.dirichlet_energy(&grad).max(0.0).sqrt();
    let c_of_u = c_of(data, u)?;
    Ok(FunctionalValue { j, grad_norm, c_of_u })
}

/// Gradient of J in the zero-mean energy space: u − T(u).
pub fn j_grad(data: &ProblemData, u: &DiskField) -> Result<DiskField, MeanFieldError> {
    let t = apply_t(data, u)?;
    let mut g = u.clone();
    let mean = data.grid.mean(u);
    g.0.iter_mut().for_each(|x| *x -= mean);
    Ok(DiskField(g.0 - t.0))
}

/// Center of mass P(u) = ∫e^u x / ∫e^u.  Evaluated with the maximum of u
/// shifted out so large fields cannot overflow; the quotient makes the map
/// invariant under adding constants to u.
pub fn center_of_mass(grid: &Grid, u: &DiskField) -> (f64, f64) {
    let shift = u.0.max();
    let e = DiskField(u.0.map(|v| (v - shift).exp()));
    let m = grid.integrate(&e);
    let ex = DiskField(grid.field_from_xy(|x, _| x).0.component_mul(&e.0));
    let ey = DiskField(grid.field_from_xy(|_, y| y).0.component_mul(&e.0));
    (grid.integrate(&ex) / m, grid.integrate(&ey) / m)
}

/// The two Kazdan-Warner obstructions and the reduced Gauss-Bonnet defect.
/// For an exact solution of −Δw = 2K e^w, ∂w/∂ν = −2 all three vanish.
#[derive(Clone, Copy, Debug)]
pub struct KwResiduals {
    /// ∫e^w ∇K·τ with the rotation field τ = (−x₂, x₁).
    pub kw_tau: f64,
    /// Euclidean norm of ∫e^w ∇K·F over the two non-rotational conformal
    /// fields of the disk, F = 1 − z² and i(1 + z²).
    pub kw_f: f64,
    /// |∫K e^w − 2π|.
    pub gauss_bonnet: f64,
}

pub fn kazdan_warner_residuals(grid: &Grid, w: &DiskField, keff: &DiskField) -> KwResiduals {
    let (kx, ky) = grid.gradient(keff);
    let ew = DiskField(w.0.map(f64::exp));
    let x1 = grid.field_from_xy(|x, _| x);
    let x2 = grid.field_from_xy(|_, y| y);

    let weighted = |vx: &DiskField, vy: &DiskField| {
        let integrand = DiskField(
            ew.0.zip_map(
                &DiskField(kx.0.component_mul(&vx.0) + ky.0.component_mul(&vy.0)).0,
                |e, d| e * d,
            ),
        );
        grid.integrate(&integrand)
    };

    let tau_x = DiskField(-&x2.0);
    let tau_y = x1.clone();
    let kw_tau = weighted(&tau_x, &tau_y);

    // The non-rotational generators tangent to the circle are 1 - z^2 and
    // i(1 + z^2); note i(1 - z^2) is *not* tangent and carries no identity.
    let f1 = grid.field_from_xy(|x, y| 1.0 - x * x + y * y);
    let f2 = grid.field_from_xy(|x, y| -2.0 * x * y);
    let g1 = f2.clone();
    let g2 = grid.field_from_xy(|x, y| 1.0 + x * x - y * y);
    let kw_f = weighted(&f1, &f2).hypot(weighted(&g1, &g2));

    let ke_w = DiskField(keff.0.zip_map(&w.0, |k, ww| k * ww.exp()));
    let gauss_bonnet = (grid.integrate(&ke_w) - 2.0 * PI).abs();

    KwResiduals { kw_tau, kw_f, gauss_bonnet }
}

/// Mass ∫e^w against the a-priori window [2π/max K, 2π/min K].
#[derive(Clone, Copy, Debug)]
pub struct MassBounds {
    pub mass: f64,
    /// Lower bound, when max K > 0.
    pub lower: Option<f64>,
    /// Upper bound, when min K > 0.
    pub upper: Option<f64>,
    pub ok: bool,
}

const MASS_SLACK: f64 = 1e-8;

/// Check 2π/max K ≤ ∫e^w ≤ 2π/min K with a small slack.  Each side applies
/// only while the corresponding extremum of K is positive; with max K ≤ 0
/// the window is void and the check passes vacuously.
pub fn mass_bounds_check(grid: &Grid, w: &DiskField, keff: &DiskField) -> MassBounds {
    let ew = DiskField(w.0.map(f64::exp));
    let mass = grid.integrate(&ew);
    let kmax = keff.0.max();
    let kmin = keff.0.min();
    let lower = (kmax > 0.0).then(|| 2.0 * PI / kmax);
    let upper = (kmin > 0.0).then(|| 2.0 * PI / kmin);
    let ok = lower.is_none_or(|lo| mass >= lo - MASS_SLACK)
        && upper.is_none_or(|hi| mass <= hi + MASS_SLACK);
    MassBounds { mass, lower, upper, ok }
}

/// Signed Gauss-Bonnet defect of the full problem: ∫K e^w + ∮h e^{w/2} − 2π.
pub fn gauss_bonnet_full(grid: &Grid, w: &DiskField, k: &DiskField, h: &BoundaryField) -> f64 {
    let ke_w = DiskField(k.0.zip_map(&w.0, |kk, ww| kk * ww.exp()));
    let wb = grid.boundary_row(w);
    let he_w2 = BoundaryField(h.0.zip_map(&wb.0, |hh, ww| hh * (ww / 2.0).exp()));
    grid.integrate(&ke_w) + grid.boundary_integral(&he_w2) - 2.0 * PI
}
