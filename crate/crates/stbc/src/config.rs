//! Optional TOML configuration file. Every key mirrors a command-line flag;
//! flags given on the command line win.
//!
//! ```toml
//! workers = 4
//!
//! [simulate]
//! constellation = "qam4"
//! norm = "unit-power"
//! r = "auto"            # or "u,v"
//! decoder = "fast"
//! snr = "0:5:30"        # start:step:stop in dB, or a comma list
//! codewords = 1000000
//! seed = 1
//!
//! [gain]
//! constellation = "psk8"
//! norm = "unit-power"
//! r = "auto"
//! method = "auto"       # exhaustive | aggregated
//!
//! [optimize]
//! constellation = "apsk16"
//! norm = "unit-power"
//!
//! [constellation]
//! name = "proposed-16"
//! norm = "integer-grid"
//! ```

use std::path::Path;

use serde::Deserialize;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub gain: GainSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub constellation: ConstellationSection,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub constellation: Option<String>,
    pub norm: Option<String>,
    pub r: Option<String>,
    pub decoder: Option<String>,
    pub snr: Option<String>,
    pub codewords: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSection {
    pub constellation: Option<String>,
    pub norm: Option<String>,
    pub r: Option<String>,
    pub method: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub constellation: Option<String>,
    pub norm: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSection {
    pub name: Option<String>,
    pub norm: Option<String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> crate::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// `start:step:stop` (inclusive) or a comma-separated list, in dB.
pub fn parse_snr_grid(s: &str) -> crate::Result<Vec<f64>> {
    let bad = || crate::Error::Config(format!("malformed SNR grid `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        let (start, step, stop) = (v[0], v[1], v[2]);
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    if parts.len() == 1 {
        return s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect();
    }
    Err(bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_grids() {
        assert_eq!(parse_snr_grid("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_snr_grid("0:0.1:0.3").unwrap().len(), 4);
        assert_eq!(parse_snr_grid("3, 7").unwrap(), vec![3.0, 7.0]);
        assert!(parse_snr_grid("0:0:5").is_err());
        assert!(parse_snr_grid("a:b").is_err());
    }

    #[test]
    fn file_sections() {
        let c = FileConfig::parse("workers = 2\n[simulate]\nseed = 9\nsnr = \"0:2:4\"\n").unwrap();
        assert_eq!(c.workers, Some(2));
        assert_eq!(c.simulate.seed, Some(9));
        assert!(FileConfig::parse("[simulate]\nbogus = 1\n").is_err());
    }
}
