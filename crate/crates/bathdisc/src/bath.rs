//! Discrete bath representations: the star form (energies + weights) and the
//! chain form (on-site/hopping coefficients), with their text file formats.

use crate::error::{BathError, Result};
use crate::series::{TimeGrid, TimeSeries};
use num_complex::Complex64;
use std::fmt::Write as _;

/// Star representation: H_bath = Σ_n x_n c†_n c_n with couplings |V_n|².
///
/// Energies are strictly increasing and contained in the source support;
/// weights are strictly positive (zero-weight modes are dropped and counted).
#[derive(Debug, Clone)]
pub struct DiscreteBath {
    energies: Vec<f64>,
    weights: Vec<f64>,
    method_tag: String,
    source_support: (f64, f64),
    dropped_modes: usize,
}

impl DiscreteBath {
    pub fn new(
        energies: Vec<f64>,
        weights: Vec<f64>,
        method_tag: &str,
        source_support: (f64, f64),
    ) -> Result<Self> {
        if energies.len() != weights.len() {
            return Err(BathError::Parse(format!(
                "bath has {} energies but {} weights",
                energies.len(),
                weights.len()
            )));
        }
        let (a, b) = source_support;
        if !(a < b) {
            return Err(BathError::InvalidPartition(format!("support [{a}, {b}] is empty")));
        }
        let mut modes: Vec<(f64, f64)> = Vec::with_capacity(energies.len());
        let mut dropped = 0usize;
        let tol = 1e-12 * (b - a).abs();
        for (x, w) in energies.into_iter().zip(weights) {
            if !x.is_finite() || !w.is_finite() {
                return Err(BathError::Parse(format!("non-finite mode ({x}, {w})")));
            }
            if x < a - tol || x > b + tol {
                return Err(BathError::InvalidPartition(format!(
                    "energy {x} outside support [{a}, {b}]"
                )));
            }
            if w <= 0.0 {
                dropped += 1;
            } else {
                modes.push((x.clamp(a, b), w));
            }
        }
        if modes.is_empty() {
            return Err(BathError::EmptyBath);
        }
        modes.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        // coincident energies describe one physical mode: merge their weights
        let mut energies = Vec::with_capacity(modes.len());
        let mut weights: Vec<f64> = Vec::with_capacity(modes.len());
        for (x, w) in modes {
            match energies.last() {
                Some(&last) if x == last => *weights.last_mut().unwrap() += w,
                _ => {
                    energies.push(x);
                    weights.push(w);
                }
            }
        }
        Ok(DiscreteBath {
            energies,
            weights,
            method_tag: method_tag.to_string(),
            source_support,
            dropped_modes: dropped,
        })
    }

    pub fn n_b(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn method_tag(&self) -> &str {
        &self.method_tag
    }

    pub fn source_support(&self) -> (f64, f64) {
        self.source_support
    }

    /// Number of zero-weight modes removed at construction.
    pub fn dropped_modes(&self) -> usize {
        self.dropped_modes
    }

    /// Σ_n |V_n|².
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Discrete hybridization Λ^discr(z) = Σ_n |V_n|²/(z − x_n).
    pub fn lambda_z(&self, z: Complex64) -> Complex64 {
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w / (z - x))
            .sum()
    }

    /// Discrete hybridization Λ^discr(t) = Σ_n |V_n|² e^{−i x_n t} on a grid.
    pub fn lambda_time(&self, grid: &TimeGrid) -> TimeSeries {
        let values = grid
            .times()
            .iter()
            .map(|&t| {
                self.energies
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, w)| w * Complex64::new(0.0, -x * t).exp())
                    .sum()
            })
            .collect();
        TimeSeries::new(grid.clone(), values)
    }

    /// Text format: header `# method= N_b= support=`, rows `n x_n weight_n`,
    /// 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# method={} N_b={} support={:.16e},{:.16e}",
            self.method_tag,
            self.n_b(),
            self.source_support.0,
            self.source_support.1
        )
        .unwrap();
        for (n, (x, w)) in self.energies.iter().zip(&self.weights).enumerate() {
            writeln!(out, "{n} {x:.16e} {w:.16e}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        // provenance comments may precede the `# method=` header
        let header = loop {
            match lines.next() {
                None => return Err(BathError::Parse("bath file has no '# method=' header".into())),
                Some(l) if l.trim_start().starts_with("# method=") => break l,
                Some(l) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
                Some(l) => {
                    return Err(BathError::Parse(format!(
                        "expected '# method=' header, got '{l}'"
                    )))
                }
            }
        };
        let (tag, n_b, support) = parse_bath_header(header)?;
        let mut energies = Vec::with_capacity(n_b);
        let mut weights = Vec::with_capacity(n_b);
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(BathError::Parse(format!("bath row {}: expected 3 fields", i + 2)));
            }
            let idx: usize = fields[0]
                .parse()
                .map_err(|_| BathError::Parse(format!("bath row {}: bad index", i + 2)))?;
            if idx != energies.len() {
                return Err(BathError::Parse(format!(
                    "bath row {}: index {} out of sequence",
                    i + 2,
                    idx
                )));
            }
            energies.push(parse_f64(fields[1], i + 2)?);
            weights.push(parse_f64(fields[2], i + 2)?);
        }
        if energies.len() != n_b {
            return Err(BathError::Parse(format!(
                "header says N_b={} but file has {} rows",
                n_b,
                energies.len()
            )));
        }
        DiscreteBath::new(energies, weights, &tag, support)
    }
}

/// Chain representation: V_tot coupling into site 0, on-site energies α_n,
/// hoppings √β_n between sites n−1 and n.
#[derive(Debug, Clone)]
pub struct ChainCoefficients {
    v_tot: f64,
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl ChainCoefficients {
    /// betas carries β_1..β_{N_b−1} (one fewer entry than alphas).
    pub fn new(v_tot: f64, alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(BathError::EmptyBath);
        }
        if betas.len() + 1 != alphas.len() {
            return Err(BathError::Parse(format!(
                "chain has {} alphas but {} betas (expected {})",
                alphas.len(),
                betas.len(),
                alphas.len() - 1
            )));
        }
        if !(v_tot > 0.0) {
            return Err(BathError::Parse(format!("v_tot = {v_tot} must be positive")));
        }
        if let Some(bad) = betas.iter().position(|b| !(*b > 0.0)) {
            return Err(BathError::RecurrenceInstability {
                order: bad + 1,
                beta: betas[bad],
            });
        }
        Ok(ChainCoefficients { v_tot, alphas, betas })
    }

    pub fn v_tot(&self) -> f64 {
        self.v_tot
    }

    pub fn n_b(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Hoppings √β_1..√β_{N_b−1}.
    pub fn hoppings(&self) -> Vec<f64> {
        self.betas.iter().map(|b| b.sqrt()).collect()
    }

    /// Text format: header `# v_tot= N_b=`, rows `n alpha_n beta_n` with the
    /// β_0 entry omitted from row 0, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# v_tot={:.16e} N_b={}", self.v_tot, self.n_b()).unwrap();
        for (n, a) in self.alphas.iter().enumerate() {
            if n == 0 {
                writeln!(out, "{n} {a:.16e}").unwrap();
            } else {
                writeln!(out, "{n} {a:.16e} {:.16e}", self.betas[n - 1]).unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        // provenance comments may precede the `# v_tot=` header
        let header = loop {
            match lines.next() {
                None => return Err(BathError::Parse("chain file has no '# v_tot=' header".into())),
                Some(l) if l.trim_start().starts_with("# v_tot=") => break l,
                Some(l) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
                Some(l) => {
                    return Err(BathError::Parse(format!(
                        "expected '# v_tot=' header, got '{l}'"
                    )))
                }
            }
        };
        let toks: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
        let mut v_tot = None;
        let mut n_b = None;
        for t in toks {
            if let Some(v) = t.strip_prefix("v_tot=") {
                v_tot = Some(parse_f64(v, 1)?);
            } else if let Some(v) = t.strip_prefix("N_b=") {
                n_b = Some(
                    v.parse::<usize>()
                        .map_err(|_| BathError::Parse(format!("bad N_b '{v}'")))?,
                );
            }
        }
        let v_tot = v_tot.ok_or_else(|| BathError::Parse("chain header missing v_tot=".into()))?;
        let n_b = n_b.ok_or_else(|| BathError::Parse("chain header missing N_b=".into()))?;
        let mut alphas = Vec::with_capacity(n_b);
        let mut betas = Vec::with_capacity(n_b.saturating_sub(1));
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let expected = if alphas.is_empty() { 2 } else { 3 };
            if fields.len() != expected {
                return Err(BathError::Parse(format!(
                    "chain row {}: expected {} fields",
                    i + 2,
                    expected
                )));
            }
            let idx: usize = fields[0]
                .parse()
                .map_err(|_| BathError::Parse(format!("chain row {}: bad index", i + 2)))?;
            if idx != alphas.len() {
                return Err(BathError::Parse(format!(
                    "chain row {}: index {} out of sequence",
                    i + 2,
                    idx
                )));
            }
            alphas.push(parse_f64(fields[1], i + 2)?);
            if expected == 3 {
                betas.push(parse_f64(fields[2], i + 2)?);
            }
        }
        if alphas.len() != n_b {
            return Err(BathError::Parse(format!(
                "header says N_b={} but file has {} rows",
                n_b,
                alphas.len()
            )));
        }
        ChainCoefficients::new(v_tot, alphas, betas)
    }
}

fn parse_bath_header(header: &str) -> Result<(String, usize, (f64, f64))> {
    if !header.trim_start().starts_with('#') {
        return Err(BathError::Parse("bath file must start with a # header".into()));
    }
    let mut tag = None;
    let mut n_b = None;
    let mut support = None;
    for t in header.trim_start_matches(|c: char| c == '#' || c.is_whitespace()).split_whitespace() {
        if let Some(v) = t.strip_prefix("method=") {
            tag = Some(v.to_string());
        } else if let Some(v) = t.strip_prefix("N_b=") {
            n_b = Some(
                v.parse::<usize>()
                    .map_err(|_| BathError::Parse(format!("bad N_b '{v}'")))?,
            );
        } else if let Some(v) = t.strip_prefix("support=") {
            let parts: Vec<&str> = v.split(',').collect();
            if parts.len() != 2 {
                return Err(BathError::Parse(format!("bad support '{v}'")));
            }
            support = Some((parse_f64(parts[0], 1)?, parse_f64(parts[1], 1)?));
        }
    }
    Ok((
        tag.ok_or_else(|| BathError::Parse("bath header missing method=".into()))?,
        n_b.ok_or_else(|| BathError::Parse("bath header missing N_b=".into()))?,
        support.ok_or_else(|| BathError::Parse("bath header missing support=".into()))?,
    ))
}

fn parse_f64(s: &str, row: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| BathError::Parse(format!("row {row}: bad number '{s}'")))
}
