//! Output helpers: atomic file writes, fixed-precision JSON, PGM images.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::domain::Grid;
use crate::error::Result;

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// JSON formatter writing every float with 17 significant digits.
struct Precise;

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        w.write_all(fmt_f64(value as f64).as_bytes())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise);
    value
        .serialize(&mut ser)
        .map_err(|e| crate::Error::InvalidArgument(format!("cannot serialize output: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Binary PGM of a 2D cell field (middle slice in 3D), top row first.
pub fn pgm(grid: &Grid, shade: impl Fn(usize) -> u8) -> Vec<u8> {
    let (nx, ny) = (grid.extent(0), grid.extent(1));
    let k = grid.extent(2) / 2;
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    for row in 0..ny {
        let j = ny - 1 - row;
        out.extend((0..nx).map(|i| shade(grid.cell_index([i, j, k]))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let s = to_json(&vec![0.1f64, 1.0]).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,1.0000000000000000e0]");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 1.0]);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn pgm_header() {
        let g = Grid::new(1.0, &[0.0, 0.0], &[3, 2]).unwrap();
        let img = pgm(&g, |c| c as u8);
        assert!(img.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(&img[img.len() - 3..], &[0, 1, 2]);
    }
}
