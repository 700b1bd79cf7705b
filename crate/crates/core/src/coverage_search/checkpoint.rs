//! JSON form of a [`SearchReport`], checkpoint files, and resume validation.
//!
//! Every integer is written as a decimal string.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::search::{SearchConfig, SearchReport};
use super::seed::progression_gcd;
use super::tracker::{Family, Witness};
use crate::girstmair::h_fast;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub x: String,
    pub y: String,
    pub residue: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub q: String,
    pub family: String,
    pub covered: String,
    pub total: String,
    pub complete: bool,
    pub max_depth_used: String,
    pub witnesses: Vec<WitnessRecord>,
    #[serde(default = "zero")]
    pub progression_filled: String,
    pub elapsed_ms: String,
}

fn zero() -> String {
    "0".into()
}

impl From<&SearchReport> for ReportRecord {
    fn from(r: &SearchReport) -> Self {
        ReportRecord {
            q: r.q.to_string(),
            family: r.family.to_string(),
            covered: r.covered.to_string(),
            total: r.total.to_string(),
            complete: r.complete,
            max_depth_used: r.max_depth_used.to_string(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessRecord {
                    x: w.x.to_string(),
                    y: w.y.to_string(),
                    residue: w.residue.to_string(),
                })
                .collect(),
            progression_filled: r.progression_filled.to_string(),
            elapsed_ms: r.elapsed.as_millis().to_string(),
        }
    }
}

impl TryFrom<ReportRecord> for SearchReport {
    type Error = String;

    fn try_from(rec: ReportRecord) -> Result<Self, String> {
        fn num<T: std::str::FromStr>(field: &str, s: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("bad {field}: {s:?}"))
        }
        let family: Family = rec.family.parse()?;
        let witnesses = rec
            .witnesses
            .iter()
            .map(|w| {
                Ok(Witness {
                    x: num("x", &w.x)?,
                    y: num("y", &w.y)?,
                    family,
                    residue: num("residue", &w.residue)?,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(SearchReport {
            q: num("q", &rec.q)?,
            family,
            covered: num("covered", &rec.covered)?,
            total: num("total", &rec.total)?,
            complete: rec.complete,
            max_depth_used: num("max_depth_used", &rec.max_depth_used)?,
            witnesses,
            progression_filled: num("progression_filled", &rec.progression_filled)?,
            elapsed: Duration::from_millis(num("elapsed_ms", &rec.elapsed_ms)?),
        })
    }
}

/// One JSON line for a report.
pub fn to_json_line(report: &SearchReport) -> String {
    serde_json::to_string(&ReportRecord::from(report)).expect("report records serialize")
}

pub fn from_json(text: &str) -> Result<SearchReport, String> {
    let rec: ReportRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
    SearchReport::try_from(rec)
}

/// `q_<q>.json` for the full family, `q_<q>_single_r<r>.json` otherwise.
pub fn checkpoint_path(dir: &Path, q: u64, family: Family) -> PathBuf {
    match family {
        Family::Full => dir.join(format!("q_{q}.json")),
        Family::Single { r } => dir.join(format!("q_{q}_single_r{r}.json")),
    }
}

pub fn save(dir: &Path, report: &SearchReport) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = checkpoint_path(dir, report.q, report.family);
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, to_json_line(report) + "\n")?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Number of witnesses recomputed when a checkpoint is loaded.
pub const SPOT_CHECKS: usize = 3;

/// Structural checks plus recomputation of a few witnesses, chosen by an RNG
/// seeded from `q` so validation is reproducible.
pub fn validate(report: &SearchReport) -> Result<(), String> {
    if report.witnesses.len() as u64 != report.covered {
        return Err("witness count differs from covered".into());
    }
    if report.complete != (report.covered == report.total) {
        return Err("complete flag disagrees with counts".into());
    }
    if report.progression_filled > report.covered {
        return Err("more progression witnesses than covered residues".into());
    }
    let mut rng = StdRng::seed_from_u64(report.q);
    for w in report.witnesses.choose_multiple(&mut rng, SPOT_CHECKS) {
        let got = h_fast(w.x, w.y, report.q).map_err(|e| e.to_string())?;
        if got != w.residue {
            return Err(format!(
                "witness ({}, {}) gives {got}, recorded {}",
                w.x, w.y, w.residue
            ));
        }
    }
    Ok(())
}

/// A previously saved report that still answers `cfg`: same `q` and family,
/// passes [`validate`], and agrees with `cfg` on how it may be completed.
///
/// A complete report is reused unless it leaned on the seed progression and
/// `cfg` forbids that. An incomplete one is reused only if it was scanned at
/// least to the cap and `cfg` could not have completed it by progression.
pub fn load_valid(dir: &Path, cfg: &SearchConfig) -> Option<SearchReport> {
    let text = fs::read_to_string(checkpoint_path(dir, cfg.q, cfg.family)).ok()?;
    let report = from_json(text.trim()).ok()?;
    if report.q != cfg.q || report.family != cfg.family {
        return None;
    }
    if report.complete {
        if report.progression_filled > 0 && !cfg.progression {
            return None;
        }
    } else {
        let could_fill =
            cfg.progression && cfg.family == Family::Full && progression_gcd(cfg.q).is_some();
        if could_fill || report.max_depth_used < cfg.max_pair_sum {
            return None;
        }
    }
    validate(&report).ok()?;
    Some(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage_search::search::search_full_family;

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("dedekind-ckpt-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn json_round_trip() {
        let report = search_full_family(&SearchConfig::full(13, 3100)).unwrap();
        let line = to_json_line(&report);
        assert!(line.contains("\"q\":\"13\""));
        assert!(line.contains("\"family\":\"full\""));
        let mut back = from_json(&line).unwrap();
        back.elapsed = report.elapsed;
        // millisecond truncation is the only loss
        assert_eq!(back, report);
    }

    #[test]
    fn save_and_resume() {
        let dir = scratch("resume");
        let report = search_full_family(&SearchConfig::full(11, 3100)).unwrap();
        let path = save(&dir, &report).unwrap();
        assert!(path.ends_with("q_11.json"));
        assert!(load_valid(&dir, &SearchConfig::full(11, 3100)).is_some());
        assert!(load_valid(&dir, &SearchConfig::single(11, 1, 3100)).is_none());
        assert!(load_valid(&dir, &SearchConfig::full(12, 3100)).is_none());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn tampered_checkpoint_rejected() {
        let dir = scratch("tamper");
        let mut report = search_full_family(&SearchConfig::full(7, 3100)).unwrap();
        for w in &mut report.witnesses {
            w.x += 1;
        }
        save(&dir, &report).unwrap();
        assert!(load_valid(&dir, &SearchConfig::full(7, 3100)).is_none());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn shallow_incomplete_checkpoint_is_rerun() {
        let dir = scratch("shallow");
        let report = search_full_family(&SearchConfig::full_scan_only(60, 10)).unwrap();
        assert!(!report.complete);
        save(&dir, &report).unwrap();
        assert!(load_valid(&dir, &SearchConfig::full_scan_only(60, 3100)).is_none());
        assert!(load_valid(&dir, &SearchConfig::full_scan_only(60, 10)).is_some());
        // the default config could finish it from the seed progression
        assert!(load_valid(&dir, &SearchConfig::full(60, 10)).is_none());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn progression_checkpoint_not_reused_for_scan_only() {
        let dir = scratch("progression");
        let report = search_full_family(&SearchConfig::full(60, 10)).unwrap();
        assert!(report.complete);
        assert!(report.progression_filled > 0);
        save(&dir, &report).unwrap();
        assert!(load_valid(&dir, &SearchConfig::full(60, 10)).is_some());
        assert!(load_valid(&dir, &SearchConfig::full_scan_only(60, 10)).is_none());
        fs::remove_dir_all(&dir).unwrap();
    }
}
