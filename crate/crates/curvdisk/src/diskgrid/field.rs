//! Grid-sampled scalar fields on the disk and its boundary circle, with the
//! plain-text serialization used by the command line tools.
//!
//! Files are CSV with a fixed header; every float is written with 17
//! significant digits so a write/read cycle is bit-exact.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};

use super::{Grid, GridError};

/// Scalar samples u(r_i, theta_j); row index is radial, column index angular.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskField(pub DMatrix<f64>);

/// Scalar samples on the boundary circle, one per angular node.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryField(pub DVector<f64>);

/// Node coordinates written with `{:.16e}` round-trip exactly, so a reader
/// can insist the file was produced on the same grid.
const NODE_TOL: f64 = 1e-10;

fn parse_float(tok: &str, line: usize) -> Result<f64, GridError> {
    tok.trim().parse::<f64>().map_err(|_| GridError::Csv {
        line,
        message: format!("expected a float, got {tok:?}"),
    })
}

impl DiskField {
    pub fn zeros(grid: &Grid) -> Self {
        DiskField(DMatrix::zeros(grid.n_r, grid.n_theta))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        DiskField(self.0.map(f))
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Write `r,theta,value` rows, radial index outer, angular index inner.
    pub fn write_csv<W: Write>(&self, grid: &Grid, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "r,theta,value")?;
        for i in 0..grid.n_r {
            for j in 0..grid.n_theta {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e}",
                    grid.r[i],
                    grid.theta[j],
                    self.0[(i, j)]
                )?;
            }
        }
        Ok(())
    }

    /// Read a field previously written by [`DiskField::write_csv`] on the
    /// same grid; node coordinates are checked, not trusted.
    pub fn read_csv<R: BufRead>(grid: &Grid, input: R) -> Result<Self, GridError> {
        let mut lines = input.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((no, line)) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break (no + 1, line);
                    }
                }
                None => {
                    return Err(GridError::Csv {
                        line: 0,
                        message: "empty file".into(),
                    })
                }
            }
        };
        if header.1.trim() != "r,theta,value" {
            return Err(GridError::Csv {
                line: header.0,
                message: format!("expected header 'r,theta,value', got {:?}", header.1.trim()),
            });
        }
        let mut data = DMatrix::zeros(grid.n_r, grid.n_theta);
        let mut count = 0usize;
        for (no, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let no = no + 1;
            let mut parts = trimmed.split(',');
            let (a, b, c) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(c), None) => (a, b, c),
                _ => {
                    return Err(GridError::Csv {
                        line: no,
                        message: "expected exactly three comma-separated fields".into(),
                    })
                }
            };
            if count >= grid.n_r * grid.n_theta {
                return Err(GridError::Csv {
                    line: no,
                    message: "more rows than grid nodes".into(),
                });
            }
            let i = count / grid.n_theta;
            let j = count % grid.n_theta;
            let r = parse_float(a, no)?;
            let theta = parse_float(b, no)?;
            let value = parse_float(c, no)?;
            if (r - grid.r[i]).abs() > NODE_TOL || (theta - grid.theta[j]).abs() > NODE_TOL {
                return Err(GridError::Csv {
                    line: no,
                    message: format!(
                        "node mismatch: file has ({r}, {theta}), grid expects ({}, {})",
                        grid.r[i], grid.theta[j]
                    ),
                });
            }
            data[(i, j)] = value;
            count += 1;
        }
        if count != grid.n_r * grid.n_theta {
            return Err(GridError::Csv {
                line: 0,
                message: format!(
                    "expected {} rows, found {count}",
                    grid.n_r * grid.n_theta
                ),
            });
        }
        Ok(DiskField(data))
    }
}

impl BoundaryField {
    pub fn zeros(grid: &Grid) -> Self {
        BoundaryField(DVector::zeros(grid.n_theta))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        BoundaryField(self.0.map(f))
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn write_csv<W: Write>(&self, grid: &Grid, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "theta,value")?;
        for j in 0..grid.n_theta {
            writeln!(out, "{:.16e},{:.16e}", grid.theta[j], self.0[j])?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(grid: &Grid, input: R) -> Result<Self, GridError> {
        let mut lines = input.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((no, line)) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break (no + 1, line);
                    }
                }
                None => {
                    return Err(GridError::Csv {
                        line: 0,
                        message: "empty file".into(),
                    })
                }
            }
        };
        if header.1.trim() != "theta,value" {
            return Err(GridError::Csv {
                line: header.0,
                message: format!("expected header 'theta,value', got {:?}", header.1.trim()),
            });
        }
        let mut data = DVector::zeros(grid.n_theta);
        let mut count = 0usize;
        for (no, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let no = no + 1;
            let mut parts = trimmed.split(',');
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(GridError::Csv {
                        line: no,
                        message: "expected exactly two comma-separated fields".into(),
                    })
                }
            };
            if count >= grid.n_theta {
                return Err(GridError::Csv {
                    line: no,
                    message: "more rows than boundary nodes".into(),
                });
            }
            let theta = parse_float(a, no)?;
            if (theta - grid.theta[count]).abs() > NODE_TOL {
                return Err(GridError::Csv {
                    line: no,
                    message: format!(
                        "node mismatch: file has theta {theta}, grid expects {}",
                        grid.theta[count]
                    ),
                });
            }
            data[count] = parse_float(b, no)?;
            count += 1;
        }
        if count != grid.n_theta {
            return Err(GridError::Csv {
                line: 0,
                message: format!("expected {} rows, found {count}", grid.n_theta),
            });
        }
        Ok(BoundaryField(data))
    }
}
