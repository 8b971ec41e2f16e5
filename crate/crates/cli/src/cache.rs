//! On-disk coefficient cache. Keys carry every input that affects the bits
//! of the stored values: object name, precision, and the Kloosterman cutoff.
//! Floats are stored as full-precision decimal strings, which round-trip
//! exactly at the same mantissa size.

use anyhow::{Context, Result};
use maass_shift_core::maass::HarmonicMaassForm;
use maass_shift_core::qseries::{float_from_decimal, float_to_decimal};
use std::fs;
use std::path::{Path, PathBuf};

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache dir {dir:?}"))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn coeff_path(&self, bits: u32, c_max: u64) -> PathBuf {
        self.dir.join(format!("poincare_delta_p{bits}_c{c_max}.json"))
    }

    /// Load cached raw coefficients into the form. Returns how many entries
    /// were seeded.
    pub fn load_coeffs(&self, hmf: &HarmonicMaassForm) -> Result<usize> {
        let path = self.coeff_path(hmf.ctx().bits(), hmf.c_max());
        if !path.exists() {
            return Ok(0);
        }
        let text = fs::read_to_string(&path)?;
        let v: serde_json::Value = serde_json::from_str(&text)?;
        let arr = v["coeffs"].as_array().context("bad cache file")?;
        let mut entries = Vec::with_capacity(arr.len());
        for e in arr {
            let n = e[0].as_u64().context("bad cache entry")? as u32;
            let val = float_from_decimal(hmf.ctx().bits(), e[1].as_str().context("bad entry")?)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let tail = e[2].as_f64().unwrap_or(f64::NAN);
            entries.push((n, val, tail));
        }
        let count = entries.len();
        hmf.seed_raw(entries);
        if let Some(c0s) = v["c0"].as_str() {
            let c0 = float_from_decimal(hmf.ctx().bits(), c0s)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            hmf.set_c0(c0);
        }
        Ok(count)
    }

    /// Persist the form's raw coefficients; atomic per key.
    pub fn store_coeffs(&self, hmf: &HarmonicMaassForm) -> Result<()> {
        let path = self.coeff_path(hmf.ctx().bits(), hmf.c_max());
        let entries = hmf.export_raw();
        let coeffs: Vec<serde_json::Value> = entries
            .iter()
            .map(|(n, v, t)| serde_json::json!([n, float_to_decimal(v), t]))
            .collect();
        let body = serde_json::json!({
            "object": "poincare-delta-raw",
            "precision": hmf.ctx().bits(),
            "c_max": hmf.c_max(),
            "c0": float_to_decimal(&hmf.raw_c0()),
            "coeffs": coeffs,
        });
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(&body)?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}
