//! Geometric preprocessing: the harmonic extension of boundary curvature
//! data, the criterion field Φ = H + √(H² + K), and the Brouwer degree of a
//! planar vector field over the disk, computed as a boundary winding number.

use thiserror::Error;

use crate::diskgrid::{BoundaryField, DiskField, Grid};

/// Below this magnitude a sampled vector field counts as vanishing and its
/// winding number is ill-defined.
pub const EPS_NONVANISH: f64 = 1e-8;

/// Roundoff allowance when checking sign conditions; H² + K above this
/// (negative) threshold is clamped to zero before the square root.
pub const CLAMP_TOL: f64 = 1e-12;

const MAX_REFINEMENT_DEPTH: usize = 12;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("H^2 + K reaches {min:.3e}, below the roundoff clamp -{CLAMP_TOL:.0e}")]
    NegativeDiscriminant { min: f64 },
    #[error("field magnitude {min:.3e} on the sample circle is within {EPS_NONVANISH:.0e} of zero; degree undefined")]
    VanishingOnBoundary { min: f64 },
    #[error("winding refinement exhausted at depth {depth}: some angle step still exceeds pi/2")]
    RefinementExhausted { depth: usize },
}

/// Harmonic function matching the boundary data, mode m lifted as r^m.
pub fn harmonic_extend(grid: &Grid, h: &BoundaryField) -> DiskField {
    grid.harmonic_extend(h)
}

/// The criterion field and everything derived from it.
pub struct PhiField {
    /// Harmonic extension H of the boundary curvature.
    pub h_ext: DiskField,
    /// Gaussian curvature sampled on the grid.
    pub k: DiskField,
    /// Φ = H + √(H² + K).
    pub phi: DiskField,
    /// Cartesian gradient of Φ.
    pub grad_phi: (DiskField, DiskField),
    /// Sign-hypothesis violations; advisory, never fatal.
    pub warnings: Vec<String>,
}

/// Assemble Φ from curvature data.  Fails only if H² + K is genuinely
/// negative somewhere; violated sign hypotheses (K ≥ 0 and h > 0 or K > 0)
/// are reported as warnings since downstream stages may still succeed.
pub fn build_phi(grid: &Grid, k: DiskField, h_ext: DiskField) -> Result<PhiField, CurvatureError> {
    let disc = h_ext.0.zip_map(&k.0, |h, kk| h * h + kk);
    let min_disc = disc.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_disc < -CLAMP_TOL {
        return Err(CurvatureError::NegativeDiscriminant { min: min_disc });
    }
    let phi = DiskField(
        h_ext
            .0
            .zip_map(&disc, |h, d| h + d.max(0.0).sqrt()),
    );

    let mut warnings = Vec::new();
    let min_k = k.0.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_h = grid
        .boundary_row(&h_ext)
        .0
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_k < -CLAMP_TOL {
        warnings.push(format!(
            "sign hypothesis violated: K reaches {min_k:.6e} < 0"
        ));
    }
    if !(min_h > 0.0 || min_k > 0.0) {
        warnings.push(format!(
            "sign hypothesis violated: need h > 0 or K > 0, got min h = {min_h:.6e}, min K = {min_k:.6e}"
        ));
    }

    let grad_phi = grid.gradient(&phi);
    Ok(PhiField {
        h_ext,
        k,
        phi,
        grad_phi,
        warnings,
    })
}

/// Winding-number computation summary.
#[derive(Clone, Debug)]
pub struct DegreeReport {
    pub degree: i64,
    /// Smallest |V| seen over all accepted samples.
    pub min_boundary_grad_norm: f64,
    pub n_samples_final: usize,
    pub refinement_depth: usize,
}

fn wrap_angle(mut d: f64) -> f64 {
    use std::f64::consts::PI;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Winding number of a fixed closed sample loop (no resampling possible).
/// Steps over π/2 are rejected rather than refined.
pub fn winding_closed_loop(samples: &[(f64, f64)]) -> Result<i64, CurvatureError> {
    use std::f64::consts::PI;
    assert!(samples.len() >= 3, "winding needs at least three samples");
    let mut min_norm = f64::INFINITY;
    for &(x, y) in samples {
        min_norm = min_norm.min(x.hypot(y));
    }
    if min_norm <= EPS_NONVANISH {
        return Err(CurvatureError::VanishingOnBoundary { min: min_norm });
    }
    let mut total = 0.0;
    for i in 0..samples.len() {
        let (x0, y0) = samples[i];
        let (x1, y1) = samples[(i + 1) % samples.len()];
        let step = wrap_angle(y1.atan2(x1) - y0.atan2(x0));
        if step.abs() > PI / 2.0 {
            return Err(CurvatureError::RefinementExhausted { depth: 0 });
        }
        total += step;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Brouwer degree of the field (vx, vy) over the disk, computed as the
/// winding of its restriction to the circle of radius `circle_radius`.
/// Starts from the grid's angular resolution and doubles the sample count
/// until every wrapped angle step is at most π/2.
pub fn brouwer_degree(
    grid: &Grid,
    vx: &DiskField,
    vy: &DiskField,
    circle_radius: f64,
) -> Result<DegreeReport, CurvatureError> {
    use std::f64::consts::PI;
    let mx = grid.ring_modes(vx, circle_radius);
    let my = grid.ring_modes(vy, circle_radius);
    let eval = |theta: f64| (grid.modes_eval(&mx, theta), grid.modes_eval(&my, theta));

    let mut n = grid.n_theta;
    let mut depth = 0;
    loop {
        let dt = 2.0 * PI / n as f64;
        let mut min_norm = f64::INFINITY;
        let angles: Vec<f64> = (0..n)
            .map(|j| {
                let (x, y) = eval(j as f64 * dt);
                min_norm = min_norm.min(x.hypot(y));
                y.atan2(x)
            })
            .collect();
        if min_norm <= EPS_NONVANISH {
            return Err(CurvatureError::VanishingOnBoundary { min: min_norm });
        }
        let mut total = 0.0;
        let mut max_step = 0.0_f64;
        for j in 0..n {
            let step = wrap_angle(angles[(j + 1) % n] - angles[j]);
            max_step = max_step.max(step.abs());
            total += step;
        }
        if max_step <= PI / 2.0 {
            let degree = (total / (2.0 * PI)).round() as i64;
            debug_assert!((total - 2.0 * PI * degree as f64).abs() < 1e-9);
            return Ok(DegreeReport {
                degree,
                min_boundary_grad_norm: min_norm,
                n_samples_final: n,
                refinement_depth: depth,
            });
        }
        if depth == MAX_REFINEMENT_DEPTH {
            return Err(CurvatureError::RefinementExhausted { depth });
        }
        n *= 2;
        depth += 1;
    }
}

/// Degree at radius 1 with a fallback sweep toward the interior when the
/// boundary samples are too close to zero.  Returns the report and the
/// radius that produced it.
pub fn degree_with_fallback(
    grid: &Grid,
    vx: &DiskField,
    vy: &DiskField,
) -> Result<(DegreeReport, f64), CurvatureError> {
    let mut last_err = None;
    for &radius in &[1.0, 0.999, 0.99] {
        match brouwer_degree(grid, vx, vy, radius) {
            Ok(rep) => return Ok((rep, radius)),
            Err(e @ CurvatureError::VanishingOnBoundary { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}
