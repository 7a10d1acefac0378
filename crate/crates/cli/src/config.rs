//! Sweep configuration read from TOML.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use twistlab::averages::{AverageKind, Cell};
use twistlab::coeffs::ProviderKind;
use twistlab::cutoff::CutoffSpec;
use twistlab::dirichlet::CharSpec;

fn default_c() -> Vec<u64> {
    vec![1]
}

fn default_delta() -> Vec<f64> {
    vec![0.5]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellsSection {
    pub kind: AverageKind,
    pub discriminants: Vec<i64>,
    #[serde(default = "default_c")]
    pub c: Vec<u64>,
    /// Exponents for Galois averages; ignored by other kinds.
    #[serde(default)]
    pub l: Vec<u64>,
    #[serde(default = "default_delta")]
    pub delta: Vec<f64>,
    /// Twisting characters for basechange cells.
    #[serde(default)]
    pub xi: Vec<CharSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: PathBuf,
    #[serde(default)]
    pub json: Option<PathBuf>,
    #[serde(default)]
    pub plot: Option<PathBuf>,
    #[serde(default)]
    pub journal: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub provider: ProviderKind,
    pub cells: CellsSection,
    #[serde(default)]
    pub cutoff: CutoffSpec,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), String> {
        if self.cells.discriminants.is_empty() {
            return Err("cells.discriminants: at least one discriminant is required".into());
        }
        if self.cells.c.contains(&0) {
            return Err("cells.c: conductors must be >= 1".into());
        }
        if self.cells.kind == AverageKind::GaloisAverage && self.cells.l.is_empty() {
            return Err("cells.l: galois_average cells need at least one exponent l".into());
        }
        self.cutoff.validate().map_err(|e| format!("cutoff: {e}"))
    }

    /// Cells in a fixed order: discriminant, then c, l, delta, xi.
    pub fn expand(&self) -> Vec<Cell> {
        let s = &self.cells;
        let ls: Vec<Option<u64>> = if s.kind == AverageKind::GaloisAverage { s.l.iter().map(|&l| Some(l)).collect() } else { vec![None] };
        let deltas: Vec<f64> = if s.kind == AverageKind::ClassAverage { s.delta.clone() } else { vec![0.5] };
        let xis: Vec<Option<CharSpec>> = if s.kind == AverageKind::Basechange && !s.xi.is_empty() {
            s.xi.iter().cloned().map(Some).collect()
        } else {
            vec![None]
        };
        let mut out = Vec::new();
        for &d0 in &s.discriminants {
            for &c in &s.c {
                for &l in &ls {
                    for &delta in &deltas {
                        for xi in &xis {
                            out.push(Cell {
                                kind: s.kind,
                                provider: self.provider.clone(),
                                d0,
                                c,
                                l,
                                delta_re: delta,
                                delta_im: 0.0,
                                xi: xi.clone(),
                                cutoff: self.cutoff,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}
