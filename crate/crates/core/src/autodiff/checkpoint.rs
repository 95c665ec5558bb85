use std::io::{BufRead, Write};

use super::{Architecture, MlpParams};
use crate::error::{PinnError, Result};
use crate::numfmt::fmt_g17;

/// Writes the architecture descriptor line followed by one parameter per
/// line in the frozen flat ordering.
pub fn write_checkpoint<W: Write>(params: &MlpParams, mut out: W) -> Result<()> {
    writeln!(out, "{}", params.arch().descriptor())?;
    for &v in params.as_slice() {
        writeln!(out, "{}", fmt_g17(v))?;
    }
    Ok(())
}

pub fn read_checkpoint<R: BufRead>(input: R) -> Result<MlpParams> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| PinnError::Checkpoint("empty checkpoint".into()))??;
    let arch = Architecture::parse_descriptor(&header).map_err(|e| PinnError::Checkpoint(e.to_string()))?;
    let mut data = Vec::with_capacity(arch.param_count());
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v = line
            .parse::<f64>()
            .map_err(|_| PinnError::Checkpoint(format!("line {}: not a number: `{line}`", lineno + 2)))?;
        data.push(v);
    }
    MlpParams::from_flat(arch, data).map_err(|e| PinnError::Checkpoint(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Activation;

    #[test]
    fn round_trip_is_exact() {
        let arch = Architecture::new(vec![2, 3, 1], Activation::Tanh).unwrap();
        let data: Vec<f64> = (0..13).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let p = MlpParams::from_flat(arch, data).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("arch: 2,3,1; activation: tanh\n"));
        assert_eq!(read_checkpoint(&buf[..]).unwrap(), p);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = "arch: 1,2,1; activation: tanh\n0.5\n";
        assert!(read_checkpoint(text.as_bytes()).is_err());
    }
}
