use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Output written under `<path>.partial` and renamed into place by
/// [`AtomicOutput::commit`]. A run that fails leaves the `.partial` file
/// behind as a marker.
pub struct AtomicOutput {
    partial: PathBuf,
    target: PathBuf,
    writer: BufWriter<File>,
}

pub fn partial_path(path: &Path) -> PathBuf {
    let mut name = OsString::from(path.as_os_str());
    name.push(".partial");
    PathBuf::from(name)
}

impl AtomicOutput {
    pub fn create(path: &Path) -> Result<Self> {
        let partial = partial_path(path);
        let writer = BufWriter::new(File::create(&partial)?);
        Ok(AtomicOutput { partial, target: path.to_owned(), writer })
    }

    pub fn commit(mut self) -> Result<()> {
        self.writer.flush()?;
        self.writer.get_ref().sync_all()?;
        fs::rename(&self.partial, &self.target)?;
        Ok(())
    }
}

impl Write for AtomicOutput {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.writer.write(buf)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.writer.flush()
    }
}
