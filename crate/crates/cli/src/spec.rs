//! Symbol specifications and the run configuration embedded in reports.

use anyhow::{anyhow, bail, Context};
use drk_core::boundary::BoundarySampler;
use drk_core::curvature::DiskGrid;
use drk_core::{C64, Poly, RationalSymbol, Tolerances};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A symbol as given on the command line: either rational coefficient data
/// or a file of boundary samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Rational {
        num: Poly,
        den: Poly,
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Sampled {
        samples_file: PathBuf,
        #[serde(skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

/// A parsed symbol ready for computation.
pub enum ParsedSymbol {
    Rational(RationalSymbol),
    Sampled(BoundarySampler),
}

impl SymbolSpec {
    /// Accepts either inline JSON or a path to a JSON file.
    pub fn from_arg(arg: &str) -> anyhow::Result<Self> {
        let trimmed = arg.trim();
        if trimmed.starts_with('{') {
            serde_json::from_str(trimmed).context("parsing inline symbol JSON")
        } else {
            let text = std::fs::read_to_string(Path::new(trimmed))
                .with_context(|| format!("reading symbol file {trimmed}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing symbol file {trimmed}"))
        }
    }

    pub fn parse(&self, tol: &Tolerances) -> anyhow::Result<ParsedSymbol> {
        match self {
            SymbolSpec::Rational { num, den, .. } => Ok(ParsedSymbol::Rational(
                RationalSymbol::new(num.clone(), den.clone(), tol)
                    .map_err(|e| anyhow!("invalid rational symbol: {e}"))?,
            )),
            SymbolSpec::Sampled { samples_file, m, .. } => {
                let text = std::fs::read_to_string(samples_file)
                    .with_context(|| format!("reading samples file {}", samples_file.display()))?;
                let pairs: Vec<[f64; 2]> =
                    serde_json::from_str(&text).context("parsing samples file as [[re, im], ...]")?;
                if let Some(m) = m {
                    if *m != pairs.len() {
                        bail!("samples file holds {} values, spec says M = {m}", pairs.len());
                    }
                }
                let values: Vec<C64> = pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                Ok(ParsedSymbol::Sampled(
                    BoundarySampler::new(values).map_err(|e| anyhow!("invalid sampler: {e}"))?,
                ))
            }
        }
    }

    /// Rational-only commands reject sampled symbols up front.
    pub fn parse_rational(&self, tol: &Tolerances) -> anyhow::Result<RationalSymbol> {
        match self.parse(tol)? {
            ParsedSymbol::Rational(r) => Ok(r),
            ParsedSymbol::Sampled(_) => bail!("this command needs a rational symbol"),
        }
    }
}

/// Everything that determines a run's numbers; embedded in every report so
/// reruns with the same config are bit-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub grid: DiskGrid,
    pub fd_step: f64,
    pub trunc: Vec<usize>,
    pub format: String,
}
