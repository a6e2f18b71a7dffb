//! Scenario files: which Hamiltonian, over what interval, through which
//! solver paths, and with what tolerances.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;
use unitint::hamiltonian::{
    build_so5, BlockedHamiltonian, ConstantHamiltonian, Hamiltonian, PiecewiseConstant, So5Coefficients,
    So5Matrix, SpinHalfField, TrigHamiltonian,
};
use unitint::linalg::{CMatrix, C64};
use unitint::riccati::DEFAULT_Z_MAX;

/// A complex matrix as row-major nested `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_from_json(m: &JsonMatrix) -> Result<CMatrix, String> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || m.iter().any(|r| r.len() != cols) {
        return Err("matrix rows must be non-empty and of equal length".into());
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(m[i][j][0], m[i][j][1])))
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    Factorized,
    Hierarchical,
    Bloch,
    Oracle,
}

impl Path {
    pub fn name(self) -> &'static str {
        match self {
            Path::Factorized => "factorized",
            Path::Hierarchical => "hierarchical",
            Path::Bloch => "bloch",
            Path::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "factorized" => Ok(Path::Factorized),
            "hierarchical" => Ok(Path::Hierarchical),
            "bloch" => Ok(Path::Bloch),
            "oracle" => Ok(Path::Oracle),
            other => Err(format!("unknown path `{other}`")),
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub start: f64,
    #[serde(rename = "H")]
    pub h: JsonMatrix,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Constant {
        #[serde(rename = "H")]
        h: JsonMatrix,
    },
    SpinHalf {
        #[serde(rename = "B")]
        b: [f64; 3],
        /// Rotation rate of the transverse field about z.
        #[serde(default)]
        omega: f64,
    },
    So5 {
        #[serde(rename = "F")]
        f: So5Matrix,
        #[serde(rename = "F_cos")]
        f_cos: Option<So5Matrix>,
        #[serde(default)]
        omega: f64,
    },
    TrigRandom {
        #[serde(default = "default_harmonics")]
        harmonics: usize,
        #[serde(default = "default_omega")]
        omega: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    Piecewise {
        pieces: Vec<Piece>,
    },
}

fn default_harmonics() -> usize {
    2
}

fn default_omega() -> f64 {
    1.0
}

fn default_scale() -> f64 {
    1.0
}

fn default_z_max() -> f64 {
    DEFAULT_Z_MAX
}

fn default_paths() -> Vec<Path> {
    vec![Path::Factorized, Path::Oracle]
}

#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub id: String,
    #[serde(rename = "N")]
    pub dim: usize,
    pub n: usize,
    #[serde(flatten)]
    pub family: Family,
    pub t_end: f64,
    pub steps: usize,
    /// Oracle steps; four times `steps` when absent.
    pub oracle_steps: Option<usize>,
    #[serde(rename = "Z_max", default = "default_z_max")]
    pub z_max: f64,
    #[serde(default = "default_paths")]
    pub paths: Vec<Path>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

const EVOLUTION: &[Path] = &[Path::Factorized, Path::Hierarchical, Path::Oracle];
const RICCATI: &[Path] = &[Path::Factorized, Path::Hierarchical];

/// Tolerance names a scenario may request, each with the paths of which
/// at least one must run.
pub const TOLERANCES: &[(&str, &[Path])] = &[
    ("distance", EVOLUTION),
    ("unitarity", EVOLUTION),
    ("schroedinger", RICCATI),
    ("phase_split", RICCATI),
    ("riccati_error", RICCATI),
    ("oracle_error", &[Path::Oracle]),
    ("bloch_deviation", &[Path::Bloch]),
    ("bloch_norm_drift", &[Path::Bloch]),
    ("bloch_fd", &[Path::Bloch]),
];

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, String> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| e.to_string())?;
        s.validate()?;
        Ok(s)
    }

    pub fn oracle_steps(&self) -> usize {
        self.oracle_steps.unwrap_or(4 * self.steps)
    }

    pub fn is_so5(&self) -> bool {
        matches!(self.family, Family::So5 { .. })
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return Err(format!("id `{}` must be a non-empty file-name stem", self.id));
        }
        if self.dim < 2 {
            return Err(format!("N must be at least 2 (got {})", self.dim));
        }
        if self.n < 1 || 2 * self.n > self.dim {
            return Err(format!("n must satisfy 1 ≤ n ≤ N/2 (got n = {}, N = {})", self.n, self.dim));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(format!("t_end must be positive (got {})", self.t_end));
        }
        if self.steps < 1 || self.oracle_steps() < 1 {
            return Err("steps must be at least 1".into());
        }
        if !(self.z_max > 1.0) {
            return Err(format!("Z_max must exceed 1 (got {})", self.z_max));
        }
        if self.paths.is_empty() {
            return Err("at least one path is required".into());
        }
        match &self.family {
            Family::Constant { h } => {
                let m = matrix_from_json(h)?;
                if m.shape() != (self.dim, self.dim) {
                    return Err(format!("H is {:?}, N = {}", m.shape(), self.dim));
                }
            }
            Family::SpinHalf { .. } if (self.dim, self.n) != (2, 1) => {
                return Err("spin_half needs N = 2, n = 1".into());
            }
            Family::So5 { .. } if (self.dim, self.n) != (4, 2) => {
                return Err("so5 needs N = 4, n = 2".into());
            }
            Family::Piecewise { pieces } => {
                if pieces.is_empty() {
                    return Err("piecewise needs at least one piece".into());
                }
                for p in pieces {
                    if matrix_from_json(&p.h)?.shape() != (self.dim, self.dim) {
                        return Err(format!("piece at {} has the wrong shape", p.start));
                    }
                }
            }
            _ => {}
        }
        if self.paths.contains(&Path::Hierarchical) && self.n != 1 {
            return Err("the hierarchical path needs n = 1".into());
        }
        if self.paths.contains(&Path::Bloch) && !matches!(self.family, Family::SpinHalf { .. } | Family::So5 { .. }) {
            return Err("the bloch path needs a spin_half or so5 family".into());
        }
        for name in self.tolerances.keys() {
            let Some((_, needs)) = TOLERANCES.iter().find(|(t, _)| t == name) else {
                let known: Vec<_> = TOLERANCES.iter().map(|t| t.0).collect();
                return Err(format!("unknown tolerance `{name}` (known: {})", known.join(", ")));
            };
            let present = needs.iter().filter(|p| self.paths.contains(p)).count();
            if present == 0 {
                let names: Vec<_> = needs.iter().map(|p| p.name()).collect();
                return Err(format!("tolerance `{name}` needs one of the paths {}", names.join(", ")));
            }
            if name == "distance" && present < 2 {
                return Err("tolerance `distance` needs two evolution paths to compare".into());
            }
            if name == "phase_split" && self.n != 1 {
                return Err("tolerance `phase_split` needs n = 1".into());
            }
        }
        Ok(())
    }

    pub fn so5_coefficients(&self) -> Option<So5Coefficients> {
        match &self.family {
            Family::So5 { f, f_cos: Some(f1), omega } => Some(So5Coefficients::harmonic(*f, *f1, *omega)),
            Family::So5 { f, f_cos: None, .. } => Some(So5Coefficients::constant(*f)),
            _ => None,
        }
    }

    pub fn spin_half_field(&self) -> Option<SpinHalfField> {
        match &self.family {
            Family::SpinHalf { b, omega } => Some(SpinHalfField::rotating(*b, *omega)),
            _ => None,
        }
    }

    pub fn hamiltonian(&self) -> unitint::Result<BlockedHamiltonian> {
        let contract = |e: String| unitint::Error::Contract(e);
        let h: Arc<dyn Hamiltonian> = match &self.family {
            Family::Constant { h } => Arc::new(ConstantHamiltonian(matrix_from_json(h).map_err(contract)?)),
            Family::SpinHalf { .. } => Arc::new(self.spin_half_field().expect("spin_half")),
            Family::So5 { .. } => return build_so5(self.so5_coefficients().expect("so5")),
            Family::TrigRandom { harmonics, omega, scale } => {
                Arc::new(TrigHamiltonian::random(self.dim, *harmonics, *omega, *scale, self.seed))
            }
            Family::Piecewise { pieces } => {
                let pieces = pieces
                    .iter()
                    .map(|p| Ok((p.start, matrix_from_json(&p.h).map_err(contract)?)))
                    .collect::<unitint::Result<Vec<_>>>()?;
                Arc::new(PiecewiseConstant::new(pieces)?)
            }
        };
        BlockedHamiltonian::from_arc(h, self.n)
    }
}
