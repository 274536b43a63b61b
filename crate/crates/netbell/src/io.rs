//! Atomic file output and CSV rows.

use std::io::Write;
use std::path::Path;

use netbell_core::certify::CorrespondenceReport;

/// Writes `bytes` to a temporary file beside `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// One row per trial: seed, per-edge maxima, network value, bound, margin.
pub fn correspondence_csv(report: &CorrespondenceReport) -> csv::Result<Vec<u8>> {
    let n = report.family.sources();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["seed".to_string()];
    header.extend((1..=n).map(|k| format!("edge_max_{k}")));
    header.extend(["network_value", "bound", "margin", "satisfied"].map(String::from));
    w.write_record(&header)?;
    for t in &report.trials {
        let mut row = vec![t.seed.to_string()];
        row.extend(t.edge_maxima.iter().map(|v| v.to_string()));
        row.extend([
            t.network_value.to_string(),
            t.bound.to_string(),
            t.margin.to_string(),
            t.satisfied.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
