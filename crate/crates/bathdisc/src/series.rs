//! Uniform time grids and sampled time series, with CSV round-tripping.

use crate::error::{BathError, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

/// Uniformly spaced samples t_k = k·dt for k = 0..n.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    n: usize,
}

impl TimeGrid {
    /// Grid with n samples, starting at t = 0.
    pub fn new(dt: f64, n: usize) -> Self {
        assert!(dt > 0.0, "dt must be positive");
        assert!(n >= 1, "grid needs at least one sample");
        TimeGrid { dt, n }
    }

    /// Smallest grid with the given spacing whose last sample reaches t_end.
    pub fn spanning(dt: f64, t_end: f64) -> Self {
        assert!(t_end >= 0.0);
        let n = (t_end / dt).ceil() as usize + 1;
        TimeGrid::new(dt, n)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.time(k)).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n - 1)
    }
}

/// Complex-valued series on a uniform grid.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    grid: TimeGrid,
    values: Vec<Complex64>,
}

/// Real-valued series on a uniform grid.
#[derive(Debug, Clone)]
pub struct RealSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>) -> Self {
        assert_eq!(grid.len(), values.len(), "grid/value length mismatch");
        TimeSeries { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Pointwise |self − other| as a real series. Grids must match.
    pub fn abs_diff(&self, other: &TimeSeries) -> Result<RealSeries> {
        if self.grid != other.grid {
            return Err(BathError::GridMismatch(format!(
                "dt {} x {} vs dt {} x {}",
                self.grid.dt,
                self.grid.n,
                other.grid.dt,
                other.grid.n
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .collect();
        Ok(RealSeries::new(self.grid.clone(), values))
    }

    /// CSV with header `t,re,im`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im\n");
        for (k, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", self.grid.time(k), v.re, v.im).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| BathError::Parse("empty series file".into()))?;
        if header.trim() != "t,re,im" {
            return Err(BathError::Parse(format!("expected header 't,re,im', got '{header}'")));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(BathError::Parse(format!("row {}: expected 3 fields", i + 2)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| BathError::Parse(format!("row {}: bad number '{s}'", i + 2)))
            };
            times.push(parse(fields[0])?);
            values.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        let grid = grid_from_times(&times)?;
        Ok(TimeSeries::new(grid, values))
    }
}

impl RealSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "grid/value length mismatch");
        RealSeries { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn abs_diff(&self, other: &RealSeries) -> Result<RealSeries> {
        if self.grid != other.grid {
            return Err(BathError::GridMismatch(format!(
                "dt {} x {} vs dt {} x {}",
                self.grid.dt, self.grid.n, other.grid.dt, other.grid.n
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .collect();
        Ok(RealSeries::new(self.grid.clone(), values))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    /// CSV with header `t,value`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (k, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.grid.time(k), v).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| BathError::Parse("empty series file".into()))?;
        if header.trim() != "t,value" {
            return Err(BathError::Parse(format!("expected header 't,value', got '{header}'")));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 2 {
                return Err(BathError::Parse(format!("row {}: expected 2 fields", i + 2)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| BathError::Parse(format!("row {}: bad number '{s}'", i + 2)))
            };
            times.push(parse(fields[0])?);
            values.push(parse(fields[1])?);
        }
        let grid = grid_from_times(&times)?;
        Ok(RealSeries::new(grid, values))
    }
}

fn grid_from_times(times: &[f64]) -> Result<TimeGrid> {
    if times.is_empty() {
        return Err(BathError::Parse("series has no rows".into()));
    }
    if times[0] != 0.0 {
        return Err(BathError::Parse(format!("series must start at t=0, got {}", times[0])));
    }
    if times.len() == 1 {
        return Ok(TimeGrid::new(1.0, 1));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(BathError::Parse("non-increasing time column".into()));
    }
    for (k, t) in times.iter().enumerate() {
        let expect = k as f64 * dt;
        if (t - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
            return Err(BathError::Parse(format!(
                "time column is not uniform at row {}: {} vs {}",
                k + 2,
                t,
                expect
            )));
        }
    }
    Ok(TimeGrid::new(dt, times.len()))
}
