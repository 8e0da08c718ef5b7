pub mod loss;
pub mod train;
pub mod verify;
pub mod window;

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Writes a file atomically enough for our purposes and reports the path.
pub fn write_output(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(contents)?;
    f.flush()?;
    eprintln!("shiftk: wrote {}", path.display());
    Ok(())
}
