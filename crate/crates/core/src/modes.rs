//! Crystal mode-spectrum data: file ingestion, validation, and synthetic
//! generators for tests.
//!
//! File format (plain text, `#` comments allowed):
//! ```text
//! # optional comments
//! N
//! f0 f1 .. f{N-1}        # frequencies as 2π×MHz decimals, ν=0 is the COM
//! K00 K01 .. K0{N-1}     # N rows of N profile entries, row ν = mode ν
//! ..
//! ```
//! `profiles: none` in place of the matrix is allowed; operations needing
//! profiles then fail with a missing-profiles error.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CoolError, Result};
use crate::TWO_PI;

const NORM_TOL: f64 = 1e-9;

/// Mode frequencies ω_ν and profile amplitudes K_{ν,j} for an N-ion crystal.
///
/// Frequencies are stored in the file unit (2π×MHz) so that save/load
/// round-trips bit-exactly; [`ModeSpectrum::omega`] converts to rad/µs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    n_ions: usize,
    freqs_2pi_mhz: Vec<f64>,
    profiles: Option<Vec<Vec<f64>>>,
    warnings: Vec<String>,
}

impl ModeSpectrum {
    pub fn new(
        freqs_2pi_mhz: Vec<f64>,
        profiles: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n = freqs_2pi_mhz.len();
        if n == 0 {
            return Err(CoolError::invalid("need at least one mode"));
        }
        let mut spec =
            ModeSpectrum { n_ions: n, freqs_2pi_mhz, profiles, warnings: Vec::new() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    /// ω_ν in rad/µs.
    pub fn omega(&self, nu: usize) -> f64 {
        self.freqs_2pi_mhz[nu] * TWO_PI
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.freqs_2pi_mhz.iter().map(|f| f * TWO_PI).collect()
    }

    pub fn freq_2pi_mhz(&self, nu: usize) -> f64 {
        self.freqs_2pi_mhz[nu]
    }

    /// K_{ν,j}; errors if the file declared `profiles: none`.
    pub fn profile(&self, nu: usize, j: usize) -> Result<f64> {
        match &self.profiles {
            Some(k) => Ok(k[nu][j]),
            None => Err(CoolError::MissingProfiles(
                "spectrum was loaded with `profiles: none`".into(),
            )),
        }
    }

    pub fn has_profiles(&self) -> bool {
        self.profiles.is_some()
    }

    /// Non-fatal findings from validation (transverse ordering).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn validate(&mut self) -> Result<()> {
        let n = self.n_ions;
        if let Some(k) = &self.profiles {
            if k.len() != n || k.iter().any(|row| row.len() != n) {
                return Err(CoolError::invalid(format!(
                    "profile matrix must be {n}×{n}"
                )));
            }
            // Σ_ν K_{ν,j}² = 1 for every ion j
            for j in 0..n {
                let s: f64 = (0..n).map(|nu| k[nu][j] * k[nu][j]).sum();
                if (s - 1.0).abs() > NORM_TOL {
                    return Err(CoolError::ValidationError {
                        invariant: format!("sum_nu K[nu][{j}]^2 = 1"),
                        magnitude: (s - 1.0).abs(),
                    });
                }
            }
            // rows orthonormal
            for a in 0..n {
                for b in a..n {
                    let dot: f64 = (0..n).map(|j| k[a][j] * k[b][j]).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    if (dot - expect).abs() > NORM_TOL {
                        return Err(CoolError::ValidationError {
                            invariant: format!("profile rows {a},{b} orthonormal"),
                            magnitude: (dot - expect).abs(),
                        });
                    }
                }
            }
            // COM row K_{0,j} = 1/√N
            let com = 1.0 / (n as f64).sqrt();
            for j in 0..n {
                if (k[0][j] - com).abs() > NORM_TOL {
                    return Err(CoolError::ValidationError {
                        invariant: format!("K[0][{j}] = 1/sqrt(N)"),
                        magnitude: (k[0][j] - com).abs(),
                    });
                }
            }
        }
        // transverse ordering ω_ν ≤ ω_0 is conventional, not mandatory
        for nu in 1..n {
            if self.freqs_2pi_mhz[nu] > self.freqs_2pi_mhz[0] + 1e-12 {
                self.warnings.push(format!(
                    "mode {nu} lies above the COM frequency; transverse ordering convention violated"
                ));
            }
        }
        Ok(())
    }

    /// Serialize in the plain-text format; parses back bit-identically.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.n_ions);
        let freqs: Vec<String> = self.freqs_2pi_mhz.iter().map(|f| format!("{f}")).collect();
        let _ = writeln!(s, "{}", freqs.join(" "));
        match &self.profiles {
            None => {
                let _ = writeln!(s, "profiles: none");
            }
            Some(k) => {
                for row in k {
                    let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
                    let _ = writeln!(s, "{}", cells.join(" "));
                }
            }
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Parse the mode file format.
pub fn parse_modes(text: &str) -> Result<ModeSpectrum> {
    // keep original line numbers for diagnostics
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(CoolError::FormatError { line: 1, msg: "empty mode file".into() });
    }
    let (ln, first) = lines[0];
    let n: usize = first
        .parse()
        .map_err(|_| CoolError::FormatError { line: ln, msg: format!("expected ion count, got `{first}`") })?;
    if n == 0 {
        return Err(CoolError::FormatError { line: ln, msg: "ion count must be positive".into() });
    }
    if lines.len() < 2 {
        return Err(CoolError::FormatError { line: ln, msg: "missing frequency line".into() });
    }
    let (lf, freq_line) = lines[1];
    let freqs: Vec<f64> = freq_line
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|_| CoolError::FormatError {
                line: lf,
                msg: format!("bad frequency `{t}`"),
            })
        })
        .collect::<Result<_>>()?;
    if freqs.len() != n {
        return Err(CoolError::FormatError {
            line: lf,
            msg: format!("expected {n} frequencies, got {}", freqs.len()),
        });
    }
    if lines.len() < 3 {
        return Err(CoolError::FormatError {
            line: lf,
            msg: "missing profiles (matrix or `profiles: none`)".into(),
        });
    }
    if lines[2].1.replace(' ', "") == "profiles:none" {
        return ModeSpectrum::new(freqs, None);
    }
    if lines.len() < 2 + n {
        return Err(CoolError::FormatError {
            line: lines.last().unwrap().0,
            msg: format!("expected {n} profile rows"),
        });
    }
    let mut k = Vec::with_capacity(n);
    for r in 0..n {
        let (lr, row_line) = lines[2 + r];
        let row: Vec<f64> = row_line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| CoolError::FormatError {
                    line: lr,
                    msg: format!("bad profile entry `{t}`"),
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(CoolError::FormatError {
                line: lr,
                msg: format!("expected {n} entries, got {}", row.len()),
            });
        }
        k.push(row);
    }
    ModeSpectrum::new(freqs, Some(k))
}

/// Load and validate a mode file.
pub fn load_modes(path: &Path) -> Result<ModeSpectrum> {
    let text = std::fs::read_to_string(path)?;
    parse_modes(&text)
}

/// Synthetic spectra for tests and presets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// All modes at ω_m (the COM value); the single-mode spectrum for N = 1.
    ComOnly,
    /// Modes spread downward over `bandwidth`: ω_ν = ω_m − ν·bw/(N−1).
    UniformBand(f64),
    /// Alias of ComOnly for N > 1: an N-fold degenerate stack at ω_m.
    Degenerate,
}

/// Deterministic orthonormal profile matrix with first row 1/√N: a
/// Householder reflection mapping e_0 onto the uniform vector.
fn com_profiles(n: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0]];
    }
    let u = 1.0 / (n as f64).sqrt();
    let mut v: Vec<f64> = vec![u; n];
    v[0] -= 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            h[i][j] = if i == j { 1.0 } else { 0.0 };
            h[i][j] -= 2.0 * v[i] * v[j] / vv;
        }
    }
    h
}

/// Generate a synthetic, fully validated spectrum.
pub fn synth_modes(kind: SynthKind, n: usize, omega_m: f64) -> Result<ModeSpectrum> {
    if n == 0 {
        return Err(CoolError::invalid("need at least one ion"));
    }
    let f0 = omega_m / TWO_PI;
    let freqs: Vec<f64> = match kind {
        SynthKind::ComOnly | SynthKind::Degenerate => vec![f0; n],
        SynthKind::UniformBand(bw) => {
            if bw < 0.0 {
                return Err(CoolError::invalid("bandwidth must be >= 0"));
            }
            if bw >= omega_m {
                return Err(CoolError::invalid(
                    "bandwidth must be below omega_m (mode frequencies must stay positive)",
                ));
            }
            if n == 1 {
                vec![f0]
            } else {
                (0..n)
                    .map(|nu| f0 - (nu as f64) * (bw / TWO_PI) / ((n - 1) as f64))
                    .collect()
            }
        }
    };
    ModeSpectrum::new(freqs, Some(com_profiles(n)))
}
