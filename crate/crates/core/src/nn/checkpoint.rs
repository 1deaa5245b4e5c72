//! Parameter checkpoint files.
//!
//! A checkpoint is one ASCII header line followed by the raw parameters:
//!
//! ```text
//! retcap-mlp v1 input=3 hidden=64,64 output=9 activation=tanh params=4937\n
//! <params × 8 bytes, IEEE-754 binary64, little-endian>
//! ```

use super::mlp::{Activation, Mlp, MlpSpec};
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

const MAGIC: &str = "retcap-mlp";
const VERSION: &str = "v1";

pub fn header_line(spec: &MlpSpec) -> String {
    let hidden: Vec<String> = spec.hidden.iter().map(|h| h.to_string()).collect();
    format!(
        "{MAGIC} {VERSION} input={} hidden={} output={} activation={} params={}",
        spec.input_dim,
        hidden.join(","),
        spec.output_dim,
        spec.activation.name(),
        spec.param_count()
    )
}

pub fn parse_header(line: &str) -> Result<MlpSpec> {
    let bad = |msg: &str| Error::parse(1, format!("checkpoint header: {msg}"));
    let mut parts = line.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(bad("missing magic"));
    }
    if parts.next() != Some(VERSION) {
        return Err(bad("unsupported version"));
    }
    let (mut input, mut hidden, mut output, mut activation, mut count) = (None, None, None, None, None);
    for field in parts {
        let (key, value) = field.split_once('=').ok_or_else(|| bad(field))?;
        let num = |v: &str| v.parse::<usize>().map_err(|_| bad(field));
        match key {
            "input" => input = Some(num(value)?),
            "output" => output = Some(num(value)?),
            "params" => count = Some(num(value)?),
            "hidden" => {
                hidden = Some(value.split(',').map(num).collect::<Result<Vec<_>>>()?);
            }
            "activation" => activation = Some(Activation::parse(value).ok_or_else(|| bad(field))?),
            _ => return Err(bad(&format!("unknown field {key}"))),
        }
    }
    let spec = MlpSpec {
        input_dim: input.ok_or_else(|| bad("missing input"))?,
        hidden: hidden.ok_or_else(|| bad("missing hidden"))?,
        output_dim: output.ok_or_else(|| bad("missing output"))?,
        activation: activation.ok_or_else(|| bad("missing activation"))?,
    };
    spec.validate()?;
    if count != Some(spec.param_count()) {
        return Err(bad("parameter count does not match shape"));
    }
    Ok(spec)
}

pub fn write_checkpoint<W: Write>(net: &Mlp, mut out: W) -> Result<()> {
    writeln!(out, "{}", header_line(net.spec()))?;
    let mut bytes = Vec::with_capacity(net.params().len() * 8);
    for v in net.params().values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: BufRead>(mut input: R) -> Result<Mlp> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let spec = parse_header(line.trim_end_matches('\n'))?;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let expected = spec.param_count() * 8;
    if bytes.len() != expected {
        return Err(Error::invalid(format!(
            "checkpoint body has {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Mlp::from_values(spec, values)
}
