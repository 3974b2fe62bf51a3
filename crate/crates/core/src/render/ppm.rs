//! Binary PPM (P6) frames and numbered frame directories.

use super::raster::Frame;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.pixels);
    out
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Decodes the P6 files written by [`encode_ppm`] (maxval 255, `#` comments allowed).
pub fn decode_ppm(bytes: &[u8]) -> io::Result<Frame> {
    let mut pos = 0;
    let mut token = || -> io::Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated ppm header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P6" {
        return Err(bad("not a P6 ppm"));
    }
    let width: u32 = token()?.parse().map_err(|_| bad("bad width"))?;
    let height: u32 = token()?.parse().map_err(|_| bad("bad height"))?;
    if token()? != "255" {
        return Err(bad("only maxval 255 is supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let start = pos + 1;
    let len = width as usize * height as usize * 3;
    let pixels = bytes.get(start..start + len).ok_or_else(|| bad("truncated ppm raster"))?.to_vec();
    Ok(Frame { width, height, pixels })
}

pub fn frame_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("frame_{index:05}.ppm"))
}

/// Writes `frame_00000.ppm`, `frame_00001.ppm`, ... into `dir` (created if absent).
pub fn write_frames(dir: &Path, frames: &[Frame]) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    frames
        .iter()
        .enumerate()
        .map(|(i, frame)| {
            let path = frame_path(dir, i);
            let mut file = io::BufWriter::new(std::fs::File::create(&path)?);
            file.write_all(&encode_ppm(frame))?;
            file.flush()?;
            Ok(path)
        })
        .collect()
}
