//! Configuration, snapshots and CSV output.

pub mod config;
pub mod snapshot;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evolution::ConservationRecord;

pub use config::{parse_config, parse_config_for, InitialCondition, Mode, RunConfig};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotMeta};

/// Writes `bytes` to a temporary sibling of `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Usage(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV text with a header row and one line per row.
pub fn csv_text<I, S>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(r.as_ref());
        out.push('\n');
    }
    out
}

pub fn write_records_csv(path: &Path, records: &[ConservationRecord]) -> Result<()> {
    let text = csv_text(ConservationRecord::CSV_HEADER, records.iter().map(|r| r.to_csv_row()));
    write_atomic(path, text.as_bytes())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<ConservationRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(ConservationRecord::CSV_HEADER) {
        return Err(Error::Usage(format!("{}: unexpected CSV header", path.display())));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            ConservationRecord::from_csv_row(l)
                .ok_or_else(|| Error::Usage(format!("{}: bad row {}", path.display(), i + 2)))
        })
        .collect()
}
