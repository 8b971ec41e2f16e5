use anyhow::{bail, Result};
use maass_shift_core::PrecisionContext;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unsupported format '{other}' (csv or json)"),
        }
    }
}

/// Everything a command run depends on: precision, truncation orders,
/// the shift list, output format, and the cache location.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub qseries_len: usize,
    pub kloosterman_c_max: u64,
    pub direct_n: usize,
    pub projection_m_max: usize,
    pub h_list: Vec<u32>,
    pub format: OutputFormat,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            precision_bits: 512,
            qseries_len: 1100,
            kloosterman_c_max: 4000,
            direct_n: 100_000,
            projection_m_max: 1_600_000,
            h_list: vec![1, 10, 100, 1000],
            format: OutputFormat::Csv,
            cache_dir: std::env::var_os("MAASS_SHIFT_CACHE").map(PathBuf::from),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qseries_len == 0
            || self.kloosterman_c_max == 0
            || self.direct_n == 0
            || self.projection_m_max == 0
        {
            bail!("all truncation orders must be positive");
        }
        if self.precision_bits < 64 {
            bail!("precision below 64 bits");
        }
        Ok(())
    }

    pub fn context(&self) -> PrecisionContext {
        PrecisionContext::new(self.precision_bits, 1e-30, self.qseries_len)
            .expect("validated config")
    }

    /// Context with the mantissa widened when the requested shifts reach
    /// coefficient magnitudes past ~1e120.
    pub fn context_for_shifts(&self) -> PrecisionContext {
        let max_h = self.h_list.iter().copied().max().unwrap_or(1);
        let auto = PrecisionContext::for_coefficient_range(max_h);
        let bits = self.precision_bits.max(auto.bits());
        PrecisionContext::new(bits, 1e-30, self.qseries_len).expect("validated config")
    }
}
