use std::fs;
use std::path::Path;

use super::ModelError;

/// Reads a little-endian float32 file.
pub fn read_f32_le(path: &Path) -> Result<Vec<f32>, ModelError> {
    let bytes = fs::read(path).map_err(|e| ModelError::io(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(ModelError::Input(format!(
            "{}: length {} is not a multiple of 4",
            path.display(),
            bytes.len()
        )));
    }
    Ok(decode_f32_le(&bytes))
}

pub fn write_f32_le(path: &Path, values: &[f32]) -> Result<(), ModelError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| ModelError::io(dir, e))?;
    }
    fs::write(path, encode_f32_le(values)).map_err(|e| ModelError::io(path, e))
}

pub(crate) fn decode_f32_le(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}

pub(crate) fn encode_f32_le(values: &[f32]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}
