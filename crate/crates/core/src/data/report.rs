use std::path::Path;

use crate::error::{Error, Result};
use crate::fewshot::EvalReport;

/// Canonical JSON text of a report: pretty-printed, trailing newline.
pub fn report_to_string(report: &EvalReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_report(text: &str) -> Result<EvalReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_report(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report_to_string(report)?).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<EvalReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fewshot::CoreStrategy;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn text_round_trip_is_byte_identical(acc in proptest::collection::vec(0u32..=1000, 1..30)) {
            let acc: Vec<f64> = acc.into_iter().map(|a| a as f64 / 1000.0).collect();
            let mut r = EvalReport::new("deflate-6/ncd".into(), CoreStrategy::ConcatCore, acc);
            r.config.insert("seed".into(), "42".into());
            let text = report_to_string(&r).unwrap();
            let back = parse_report(&text).unwrap();
            prop_assert!(back.is_consistent());
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(report_to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        let r = EvalReport::new("store/max_raw".into(), CoreStrategy::NearestSample, vec![1.0 / 3.0, 0.7]);
        write_report(&r, &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let back = read_report(&p).unwrap();
        write_report(&back, &p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), bytes);
        let text = String::from_utf8(bytes).unwrap();
        for key in ["\"spec\"", "\"strategy\": \"nearest_sample\"", "\"episodes\"", "\"per_episode_accuracy\"", "\"mean\"", "\"std\""] {
            assert!(text.contains(key), "{key} missing from {text}");
        }
    }
}
