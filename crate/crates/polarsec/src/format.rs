//! Plain-text container for profiles, partitions and bit strings.
//!
//! A file is a sequence of sections. Each section starts with a header line
//! `@kind key=value ...` followed by body lines:
//!
//! ```text
//! @profile metric=entropy n=4 trials=1000 clamped=0
//! 0 9.9990000000000001e-01 1.0000000000000000e-04 1.2000000000000000e-03
//! ...
//! @partition scheme=nldls n=4
//! 0 F -
//! 1 I2 cld
//! ...
//! @bits name=common.1 len=5
//! 01101
//! ```
//!
//! Floats are written with 17 significant digits, enough to round-trip any
//! `f64`. Partition flags are `c` (candidate), `l` (receiver low-entropy set),
//! `d` (estimated by the decoder) and `a` (argmax transition index).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use polarsec_core::partition::{IndexPartition, Role, Scheme};
use polarsec_core::profile::{Metric, PolarizationProfile};
use thiserror::Error;

/// Parse failures.
#[derive(Debug, Error)]
pub enum FormatError {
    /// Malformed input at a given line.
    #[error("line {line}: {msg}")]
    Syntax {
        /// One-based line number.
        line: usize,
        /// What went wrong.
        msg: String,
    },
    /// A section was well-formed but its content is invalid.
    #[error(transparent)]
    Invalid(#[from] polarsec_core::Error),
    /// A required section is missing.
    #[error("missing section {0}")]
    Missing(String),
}

type Result<T> = std::result::Result<T, FormatError>;

/// One parsed section.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    /// Section kind (`profile`, `partition`, `bits`).
    pub kind: String,
    /// Header attributes.
    pub attrs: BTreeMap<String, String>,
    /// Body lines.
    pub body: Vec<String>,
    line: usize,
}

impl Section {
    /// Empty section with the given header.
    pub fn new(kind: &str, attrs: &[(&str, String)]) -> Self {
        let attrs = attrs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        Self { kind: kind.to_string(), attrs, body: Vec::new(), line: 0 }
    }

    /// A header attribute.
    pub fn attr(&self, key: &str) -> Result<&str> {
        self.attrs.get(key).map(String::as_str).ok_or_else(|| self.err(format!("missing attribute {key}")))
    }

    fn parse_attr<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.attr(key)?.parse().map_err(|_| self.err(format!("bad value for {key}")))
    }

    fn err(&self, msg: String) -> FormatError {
        FormatError::Syntax { line: self.line, msg }
    }

    fn render(&self, out: &mut String) {
        out.push('@');
        out.push_str(&self.kind);
        for (k, v) in &self.attrs {
            let _ = write!(out, " {k}={v}");
        }
        out.push('\n');
        for l in &self.body {
            out.push_str(l);
            out.push('\n');
        }
    }
}

/// Renders sections to text.
pub fn render(sections: &[Section]) -> String {
    let mut out = String::new();
    for s in sections {
        s.render(&mut out);
    }
    out
}

/// Splits text into sections.
pub fn parse(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(head) = line.strip_prefix('@') {
            let mut parts = head.split_whitespace();
            let kind = parts.next().ok_or(FormatError::Syntax { line: i + 1, msg: "empty header".into() })?;
            let mut attrs = BTreeMap::new();
            for p in parts {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| FormatError::Syntax { line: i + 1, msg: format!("expected key=value, got {p}") })?;
                attrs.insert(k.to_string(), v.to_string());
            }
            sections.push(Section { kind: kind.to_string(), attrs, body: Vec::new(), line: i + 1 });
        } else {
            let s = sections
                .last_mut()
                .ok_or(FormatError::Syntax { line: i + 1, msg: "content before the first header".into() })?;
            s.body.push(line.to_string());
        }
    }
    Ok(sections)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Bhattacharyya => "bhattacharyya",
        Metric::Entropy => "entropy",
    }
}

/// Serializes a profile; `label` names the conditioning.
pub fn profile_section(label: &str, p: &PolarizationProfile) -> Section {
    let mut s = Section::new(
        "profile",
        &[
            ("label", label.to_string()),
            ("metric", metric_name(p.metric()).to_string()),
            ("n", p.len().to_string()),
            ("trials", p.trials().to_string()),
            ("clamped", p.clamped().to_string()),
        ],
    );
    for j in 0..p.len() {
        let se = p.std_errors().map_or("-".to_string(), |e| float(e[j]));
        s.body.push(format!("{j} {} {} {se}", float(p.values()[j]), float(p.complements()[j])));
    }
    s
}

/// Parses a profile section.
pub fn read_profile(s: &Section) -> Result<PolarizationProfile> {
    let metric = match s.attr("metric")? {
        "bhattacharyya" => Metric::Bhattacharyya,
        "entropy" => Metric::Entropy,
        other => return Err(s.err(format!("unknown metric {other}"))),
    };
    let n: usize = s.parse_attr("n")?;
    if s.body.len() != n {
        return Err(s.err(format!("expected {n} entries, found {}", s.body.len())));
    }
    let (mut values, mut comps, mut errs) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (j, line) in s.body.iter().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || FormatError::Syntax { line: s.line + j + 1, msg: format!("bad profile entry {line:?}") };
        if f.len() != 4 || f[0].parse::<usize>().ok() != Some(j) {
            return Err(bad());
        }
        values.push(f[1].parse::<f64>().map_err(|_| bad())?);
        comps.push(f[2].parse::<f64>().map_err(|_| bad())?);
        errs.push(if f[3] == "-" { None } else { Some(f[3].parse::<f64>().map_err(|_| bad())?) });
    }
    let std_errors = if errs.iter().all(Option::is_some) { Some(errs.into_iter().flatten().collect()) } else { None };
    let p = PolarizationProfile::from_parts(metric, values, comps)?;
    Ok(p.with_diagnostics(std_errors, s.parse_attr("trials")?, s.parse_attr("clamped")?))
}

fn scheme_name(s: Scheme) -> String {
    s.to_string()
}

/// Serializes a partition.
pub fn partition_section(p: &IndexPartition) -> Section {
    let mut s = Section::new("partition", &[("scheme", scheme_name(p.scheme())), ("n", p.len().to_string())]);
    let (cand, low) = (p.candidate_indices(), p.receiver_low_indices());
    let (mut is_cand, mut is_low) = (vec![false; p.len()], vec![false; p.len()]);
    cand.iter().for_each(|&j| is_cand[j] = true);
    low.iter().for_each(|&j| is_low[j] = true);
    for (j, role) in p.roles().iter().enumerate() {
        let r = match role {
            Role::Message(m) => format!("I{}", m + 1),
            Role::Local => "C".into(),
            Role::Common => "F".into(),
            Role::Transition => "T".into(),
        };
        let mut flags = String::new();
        for (on, c) in [(is_cand[j], 'c'), (is_low[j], 'l'), (p.is_decoded(j), 'd'), (p.is_argmax(j), 'a')] {
            if on {
                flags.push(c);
            }
        }
        if flags.is_empty() {
            flags.push('-');
        }
        s.body.push(format!("{j} {r} {flags}"));
    }
    s
}

/// Parses a partition section.
pub fn read_partition(s: &Section) -> Result<IndexPartition> {
    let scheme = match s.attr("scheme")? {
        "nldls" => Scheme::NldLs,
        other => match other.strip_prefix("ldnls-").and_then(|l| l.parse().ok()) {
            Some(layer) => Scheme::LdNls { layer },
            None => return Err(s.err(format!("unknown scheme {other}"))),
        },
    };
    let n: usize = s.parse_attr("n")?;
    if s.body.len() != n {
        return Err(s.err(format!("expected {n} entries, found {}", s.body.len())));
    }
    let mut roles = Vec::with_capacity(n);
    let mut masks = [vec![false; n], vec![false; n], vec![false; n], vec![false; n]];
    for (j, line) in s.body.iter().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || FormatError::Syntax { line: s.line + j + 1, msg: format!("bad partition entry {line:?}") };
        if f.len() != 3 || f[0].parse::<usize>().ok() != Some(j) {
            return Err(bad());
        }
        roles.push(match f[1] {
            "C" => Role::Local,
            "F" => Role::Common,
            "T" => Role::Transition,
            r => Role::Message(
                r.strip_prefix('I').and_then(|m| m.parse::<usize>().ok()).filter(|&m| m > 0).ok_or_else(bad)? - 1,
            ),
        });
        for c in f[2].chars() {
            match c {
                'c' => masks[0][j] = true,
                'l' => masks[1][j] = true,
                'd' => masks[2][j] = true,
                'a' => masks[3][j] = true,
                '-' => {}
                _ => return Err(bad()),
            }
        }
    }
    let [cand, low, dec, argmax] = masks;
    Ok(IndexPartition::from_parts(scheme, roles, cand, low, dec, argmax)?)
}

/// Serializes a bit string.
pub fn bits_section(name: &str, bits: &[u8]) -> Section {
    let mut s = Section::new("bits", &[("name", name.to_string()), ("len", bits.len().to_string())]);
    s.body.push(bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect());
    s
}

/// Parses a bit-string section.
pub fn read_bits(s: &Section) -> Result<Vec<u8>> {
    let len: usize = s.parse_attr("len")?;
    let text: String = s.body.concat();
    let bits: Vec<u8> = text
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(s.err(format!("bad bit {c:?}"))),
        })
        .collect::<Result<_>>()?;
    if bits.len() != len {
        return Err(s.err(format!("expected {len} bits, found {}", bits.len())));
    }
    Ok(bits)
}

/// Finds the bit string called `name`.
pub fn find_bits(sections: &[Section], name: &str) -> Result<Vec<u8>> {
    let s = sections
        .iter()
        .find(|s| s.kind == "bits" && s.attrs.get("name").map(String::as_str) == Some(name))
        .ok_or_else(|| FormatError::Missing(format!("bits {name}")))?;
    read_bits(s)
}

/// Finds the profile labelled `label`.
pub fn find_profile(sections: &[Section], label: &str) -> Result<PolarizationProfile> {
    let s = sections
        .iter()
        .find(|s| s.kind == "profile" && s.attrs.get("label").map(String::as_str) == Some(label))
        .ok_or_else(|| FormatError::Missing(format!("profile {label}")))?;
    read_profile(s)
}

/// All partition sections, in file order.
pub fn read_partitions(sections: &[Section]) -> Result<Vec<IndexPartition>> {
    let parts: Vec<IndexPartition> =
        sections.iter().filter(|s| s.kind == "partition").map(read_partition).collect::<Result<_>>()?;
    if parts.is_empty() {
        return Err(FormatError::Missing("partition".into()));
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use polarsec_core::channel::{Component, ObservationChannel};
    use polarsec_core::partition::{partition_nldls, scaled_rates, CodeParameters, NldlsProfiles};
    use polarsec_core::profile::{bec_bhattacharyya_profile, mc_entropy_profile_for};

    #[test]
    fn profile_round_trip() {
        let exact = bec_bhattacharyya_profile(0.35, 1 << 12).unwrap();
        let mc = mc_entropy_profile_for(&ObservationChannel::new(vec![Component::Crossover(0.1)]), 16, 300, 4).unwrap();
        for p in [exact, mc] {
            let text = render(&[profile_section("Y1", &p)]);

            let back = read_profile(&parse(&text).unwrap()[0]).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn partition_round_trip() {
        let n = 1024;
        let profs: Vec<_> = [0.04, 0.35, 0.2].iter().map(|&e| bec_bhattacharyya_profile(e, n).unwrap()).collect();
        let params = CodeParameters::nldls(n, 0.16, 0.30, scaled_rates(&[0.15, 0.16], 0.9)).unwrap();
        let p =
            partition_nldls(&NldlsProfiles { receiver: &profs[0], eavesdroppers: &[&profs[1], &profs[2]] }, &params)
                .unwrap();
        let text = render(&[partition_section(&p)]);
        assert_eq!(read_partitions(&parse(&text).unwrap()).unwrap(), vec![p]);
    }

    #[test]
    fn bits_round_trip_and_errors() {
        let text = render(&[bits_section("x", &[0, 1, 1, 0, 1])]);
        let sections = parse(&text).unwrap();
        assert_eq!(find_bits(&sections, "x").unwrap(), vec![0, 1, 1, 0, 1]);
        assert!(find_bits(&sections, "y").is_err());
        assert!(parse("0101\n").is_err());
        let bad = parse("@bits name=x len=3\n01\n").unwrap();
        assert!(read_bits(&bad[0]).is_err());
    }
}
