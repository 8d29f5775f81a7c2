//! Plain-text channel blocks.
//!
//! ```text
//! domain 0 1
//! component 0.5 identity
//! component 0.25 constant 0
//! component 0.25 additive
//! piece -0.1 0 10 100
//! piece 0 0.1 10 -100
//! ```
//!
//! Component kinds: `identity`, `constant <y0>`, `quantizer <b0> <b1> ...`,
//! `uniform <a> <b>`, `additive triangular <h>`, `additive gaussian <sigma>`,
//! and a bare `additive` followed by the `piece` lines of the noise density.

use super::{Channel, ChannelKind, Component, NoiseDensity, Quantizer};
use crate::error::{Error, Result};
use crate::measures::text::numbers;
use crate::measures::{Interval, Piece, Poly};

struct Pending {
    line: usize,
    weight: f64,
    pieces: Vec<Piece>,
}

/// Parses a channel block. Without a `domain` line the input domain is
/// `default_domain`.
pub fn parse_channel(text: &str, first_line: usize, default_domain: Option<Interval>) -> Result<Channel> {
    let mut domain = default_domain;
    let mut components = Vec::new();
    let mut pending: Option<Pending> = None;
    let mut last_line = first_line;

    let flush = |pending: &mut Option<Pending>, components: &mut Vec<Component>| -> Result<()> {
        if let Some(p) = pending.take() {
            let eta = NoiseDensity::new(p.pieces).map_err(|e| Error::parse(p.line, e.to_string()))?;
            components.push(Component {
                weight: p.weight,
                kind: ChannelKind::Additive(eta),
            });
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = first_line + i;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        last_line = line_no;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "domain" => {
                let v = numbers(words[1..].iter().copied(), line_no)?;
                if v.len() != 2 {
                    return Err(Error::parse(line_no, "domain takes <lo> <hi>"));
                }
                domain = Some(Interval::new(v[0], v[1]).map_err(|e| Error::parse(line_no, e.to_string()))?);
            }
            "piece" => {
                let Some(p) = pending.as_mut() else {
                    return Err(Error::parse(line_no, "piece line outside an additive component"));
                };
                let v = numbers(words[1..].iter().copied(), line_no)?;
                if v.len() < 3 || v[1] <= v[0] {
                    return Err(Error::parse(line_no, "piece takes <a> <b> <c0> [c1 ...] with a < b"));
                }
                p.pieces.push(Piece::new(v[0], v[1], Poly::new(v[2..].to_vec())));
            }
            "component" => {
                flush(&mut pending, &mut components)?;
                if words.len() < 3 {
                    return Err(Error::parse(line_no, "component takes <weight> <kind> ..."));
                }
                let weight = numbers(std::iter::once(words[1]), line_no)?[0];
                let args = &words[3..];
                let kind = match words[2] {
                    "identity" => ChannelKind::Identity,
                    "constant" => {
                        let v = numbers(args.iter().copied(), line_no)?;
                        if v.len() != 1 {
                            return Err(Error::parse(line_no, "constant takes <y0>"));
                        }
                        ChannelKind::Constant(v[0])
                    }
                    "quantizer" => {
                        let v = numbers(args.iter().copied(), line_no)?;
                        ChannelKind::Quantizer(Quantizer::new(v).map_err(|e| Error::parse(line_no, e.to_string()))?)
                    }
                    "uniform" => {
                        let v = numbers(args.iter().copied(), line_no)?;
                        if v.len() != 2 {
                            return Err(Error::parse(line_no, "uniform takes <a> <b>"));
                        }
                        ChannelKind::UniformNoise { lo: v[0], hi: v[1] }
                    }
                    "additive" => match args.first().copied() {
                        None => {
                            pending = Some(Pending {
                                line: line_no,
                                weight,
                                pieces: Vec::new(),
                            });
                            continue;
                        }
                        Some(name) => {
                            let v = numbers(args[1..].iter().copied(), line_no)?;
                            if v.len() != 1 {
                                return Err(Error::parse(line_no, format!("additive {name} takes one parameter")));
                            }
                            let eta = match name {
                                "triangular" => NoiseDensity::triangular(v[0]),
                                "gaussian" => NoiseDensity::gaussian(v[0]),
                                other => return Err(Error::parse(line_no, format!("unknown noise `{other}`"))),
                            }
                            .map_err(|e| Error::parse(line_no, e.to_string()))?;
                            ChannelKind::Additive(eta)
                        }
                    },
                    other => return Err(Error::parse(line_no, format!("unknown component kind `{other}`"))),
                };
                components.push(Component { weight, kind });
            }
            other => return Err(Error::parse(line_no, format!("unknown channel keyword `{other}`"))),
        }
    }
    flush(&mut pending, &mut components)?;
    let domain = domain.ok_or_else(|| Error::parse(last_line, "channel block needs a domain"))?;
    Channel::new(domain, components).map_err(|e| Error::parse(last_line, e.to_string()))
}
