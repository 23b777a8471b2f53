//! Plain-text checkpoints for policies and value networks.
//!
//! One record per line, `tag value value ...`, whitespace separated, floats in
//! shortest round-trip form. See FORMATS.md for the full layout.

use std::fmt::Write as _;
use std::path::Path;

use biped_core::control::{GainName, GainSet};
use biped_core::nets::{GaussianMlpPolicy, MlpParams, PolicyKind, ValueNet};

use crate::error::{io_err, LabError, LabResult};

pub const MAGIC: &str = "biped-checkpoint";
pub const VERSION: u32 = 1;

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_mlp(out: &mut String, net: &MlpParams) {
    let _ = writeln!(out, "layer_sizes {}", join(&net.layer_sizes));
    for (i, (w, b)) in net.weights.iter().zip(&net.biases).enumerate() {
        let _ = writeln!(out, "weights {i} {}", join(w));
        let _ = writeln!(out, "biases {i} {}", join(b));
    }
}

pub fn policy_to_text(policy: &GaussianMlpPolicy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "type policy");
    let _ = writeln!(out, "kind {}", policy.kind.as_str());
    let _ = writeln!(out, "log_std {}", join(&policy.log_std));
    let flat: Vec<f64> = policy.output_ranges.iter().flat_map(|&(lo, hi)| [lo, hi]).collect();
    let _ = writeln!(out, "output_ranges {}", join(&flat));
    if let Some(g) = &policy.gains {
        for n in GainName::ALL {
            let _ = writeln!(out, "gain {} {}", n.as_str(), g.get(n));
        }
    }
    write_mlp(&mut out, &policy.mean_net);
    out.push_str("end\n");
    out
}

pub fn value_to_text(value: &ValueNet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "type value");
    let _ = writeln!(out, "scale {}", value.scale);
    write_mlp(&mut out, &value.net);
    out.push_str("end\n");
    out
}

/// Line cursor that reports errors against the source path.
struct Reader<'a> {
    path: &'a Path,
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Self { path, lines, pos: 0 }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> LabError {
        LabError::Format { path: self.path.to_path_buf(), line, message: message.into() }
    }

    fn peek_tag(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|(_, t)| t[0])
    }

    /// Next line, which must start with `tag`; returns the remaining tokens.
    fn expect(&mut self, tag: &str) -> LabResult<(usize, Vec<&'a str>)> {
        let Some((line, toks)) = self.lines.get(self.pos).cloned() else {
            let last = self.lines.last().map_or(1, |(l, _)| *l);
            return Err(self.err(last, format!("unexpected end of file, expected `{tag}`")));
        };
        if toks[0] != tag {
            return Err(self.err(line, format!("expected `{tag}`, found `{}`", toks[0])));
        }
        self.pos += 1;
        Ok((line, toks[1..].to_vec()))
    }

    fn floats(&self, line: usize, toks: &[&str]) -> LabResult<Vec<f64>> {
        toks.iter()
            .map(|t| t.parse::<f64>().map_err(|_| self.err(line, format!("bad number `{t}`"))))
            .collect()
    }

    fn one<T: std::str::FromStr>(&self, line: usize, toks: &[&str]) -> LabResult<T> {
        match toks {
            [t] => t.parse().map_err(|_| self.err(line, format!("bad value `{t}`"))),
            _ => Err(self.err(line, format!("expected one value, got {}", toks.len()))),
        }
    }

    fn header(&mut self, kind: &str) -> LabResult<()> {
        let (line, toks) = self.expect(MAGIC)?;
        let v: u32 = self.one(line, &toks)?;
        if v != VERSION {
            return Err(self.err(line, format!("unsupported version {v}")));
        }
        let (line, toks) = self.expect("type")?;
        if toks != [kind] {
            return Err(self.err(line, format!("expected a {kind} checkpoint")));
        }
        Ok(())
    }

    fn mlp(&mut self) -> LabResult<MlpParams> {
        let (line, toks) = self.expect("layer_sizes")?;
        let sizes: Vec<usize> = toks
            .iter()
            .map(|t| t.parse().map_err(|_| self.err(line, format!("bad layer size `{t}`"))))
            .collect::<LabResult<_>>()?;
        if sizes.len() < 2 {
            return Err(self.err(line, "need at least input and output sizes"));
        }
        let mut net = MlpParams { layer_sizes: sizes.clone(), weights: Vec::new(), biases: Vec::new() };
        for l in 0..sizes.len() - 1 {
            for (tag, len) in [("weights", sizes[l] * sizes[l + 1]), ("biases", sizes[l + 1])] {
                let (line, toks) = self.expect(tag)?;
                if toks.first().and_then(|t| t.parse::<usize>().ok()) != Some(l) {
                    return Err(self.err(line, format!("expected {tag} of layer {l}")));
                }
                let vals = self.floats(line, &toks[1..])?;
                if vals.len() != len {
                    return Err(self.err(line, format!("expected {len} values, got {}", vals.len())));
                }
                if tag == "weights" {
                    net.weights.push(vals);
                } else {
                    net.biases.push(vals);
                }
            }
        }
        Ok(net)
    }

    fn end(&mut self) -> LabResult<()> {
        self.expect("end")?;
        if let Some((line, _)) = self.lines.get(self.pos) {
            return Err(self.err(*line, "content after `end`"));
        }
        Ok(())
    }
}

/// Parses a policy checkpoint; `path` is only used in error messages.
pub fn policy_from_text(text: &str, path: &Path) -> LabResult<GaussianMlpPolicy> {
    let mut r = Reader::new(path, text);
    r.header("policy")?;
    let (line, toks) = r.expect("kind")?;
    let kind_str: String = r.one(line, &toks)?;
    let kind = PolicyKind::parse(&kind_str).ok_or_else(|| r.err(line, format!("unknown kind `{kind_str}`")))?;
    let (line, toks) = r.expect("log_std")?;
    let log_std = r.floats(line, &toks)?;
    let (line, toks) = r.expect("output_ranges")?;
    let flat = r.floats(line, &toks)?;
    if flat.len() % 2 != 0 {
        return Err(r.err(line, "output_ranges needs low/high pairs"));
    }
    let output_ranges = flat.chunks(2).map(|c| (c[0], c[1])).collect();
    let mut gains = None;
    while r.peek_tag() == Some("gain") {
        let (line, toks) = r.expect("gain")?;
        let [name, value] = toks[..] else {
            return Err(r.err(line, "expected `gain NAME VALUE`"));
        };
        let name: GainName = name.parse().map_err(|_| r.err(line, format!("unknown gain `{name}`")))?;
        let value: f64 = r.one(line, &[value])?;
        gains.get_or_insert_with(GainSet::default).set(name, value);
    }
    let mean_net = r.mlp()?;
    r.end()?;
    let policy = GaussianMlpPolicy { mean_net, log_std, kind, output_ranges, gains };
    policy.validate()?;
    Ok(policy)
}

pub fn value_from_text(text: &str, path: &Path) -> LabResult<ValueNet> {
    let mut r = Reader::new(path, text);
    r.header("value")?;
    let (line, toks) = r.expect("scale")?;
    let scale: f64 = r.one(line, &toks)?;
    let net = r.mlp()?;
    r.end()?;
    let value = ValueNet { net, scale };
    value.validate()?;
    Ok(value)
}

pub fn save_policy(path: &Path, policy: &GaussianMlpPolicy) -> LabResult<()> {
    std::fs::write(path, policy_to_text(policy)).map_err(io_err(path))
}

pub fn load_policy(path: &Path) -> LabResult<GaussianMlpPolicy> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    policy_from_text(&text, path)
}

pub fn save_value(path: &Path, value: &ValueNet) -> LabResult<()> {
    std::fs::write(path, value_to_text(value)).map_err(io_err(path))
}

pub fn load_value(path: &Path) -> LabResult<ValueNet> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    value_from_text(&text, path)
}

/// Whether `text` starts like a policy checkpoint.
pub fn is_policy_text(text: &str) -> bool {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    lines.next().is_some_and(|l| l.split_whitespace().next() == Some(MAGIC))
        && lines.next().is_some_and(|l| l.split_whitespace().collect::<Vec<_>>() == ["type", "policy"])
}
