//! CSV tables, number formatting and atomic file replacement.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Shortest decimal text that parses back to exactly `x`.
///
/// Plain notation for magnitudes in `[1e-4, 1e16)`, scientific otherwise.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 || (x.is_finite() && (1e-4..1e16).contains(&x.abs())) {
        format!("{x:?}")
    } else if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "NaN".to_owned()
    } else if x > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

/// In-memory CSV table with LF line endings.
#[derive(Debug)]
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
    width: usize,
}

impl Table {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let header: Vec<String> = header.into_iter().map(|s| s.as_ref().to_owned()).collect();
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(&header)
            .expect("writing to memory cannot fail");
        Self {
            writer,
            width: header.len(),
        }
    }

    /// Appends one row; panics if its length differs from the header's.
    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let row: Vec<String> = row.into_iter().map(|s| s.as_ref().to_owned()).collect();
        assert_eq!(row.len(), self.width, "row width does not match header");
        self.writer
            .write_record(&row)
            .expect("writing to memory cannot fail");
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| format_f64(x)));
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer
            .into_inner()
            .expect("flushing memory cannot fail")
    }
}

/// `<dir>/<stem>.manifest` for an output at `path`.
pub fn manifest_path(path: &Path) -> PathBuf {
    path.with_extension("manifest")
}

/// Writes `bytes` to a temporary sibling, then renames it over `path`, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?
        .to_owned();
    name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(name);
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
