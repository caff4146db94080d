//! Versioned text format for compiled automata.
//!
//! ```text
//! regraph-dfa 1
//! [automaton] sha256=...
//! <automaton spec>
//! [order] sha256=...
//! q0: 0
//! [certificates] sha256=...
//! ts_certified true
//! ...
//! ```
//!
//! Each section carries a SHA-256 digest of its body. The certificates section
//! is optional; without it the automaton loads uncertified.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::automaton::{parse_automaton_spec, write_automaton_spec};
use super::FormatError;
use crate::automaton::{default_order, Dfa, DfaFlags};

pub const DFA_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "regraph-dfa";

pub(crate) fn digest(body: &str) -> String {
    Sha256::digest(body.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn push_section(out: &mut String, name: &str, body: &str) {
    let _ = writeln!(out, "[{name}] sha256={}", digest(body));
    out.push_str(body);
}

pub fn write_dfa(dfa: &Dfa) -> String {
    let a = dfa.automaton();
    let mut out = format!("{MAGIC} {DFA_FORMAT_VERSION}\n");
    push_section(&mut out, "automaton", &write_automaton_spec(a));

    let mut order = String::new();
    for (q, ts) in dfa.order().iter().enumerate() {
        let ids: Vec<String> = ts.iter().map(usize::to_string).collect();
        let _ = writeln!(order, "{}: {}", a.state(q as u32).name, ids.join(" "));
    }
    push_section(&mut out, "order", &order);

    let f = dfa.flags;
    let mut certs = String::new();
    for (k, v) in [
        ("disambiguated", f.disambiguated),
        ("deterministic", f.deterministic),
        ("minimized", f.minimized),
        ("ts_certified", f.ts_certified),
        ("fec_certified", f.fec_certified),
    ] {
        let _ = writeln!(certs, "{k} {v}");
    }
    let ids: String = dfa.deferrable().iter().map(|t| format!(" {t}")).collect();
    let _ = writeln!(certs, "deferrable{ids}");
    push_section(&mut out, "certificates", &certs);
    out
}

struct Section<'a> {
    name: &'a str,
    line: usize,
    body: String,
}

fn split_sections(text: &str) -> Result<Vec<Section<'_>>, FormatError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or("");
    let version = header
        .strip_prefix(MAGIC)
        .map(str::trim)
        .ok_or_else(|| FormatError::Syntax {
            line: 1,
            column: 1,
            message: format!("missing `{MAGIC}` header"),
        })?;
    if version != DFA_FORMAT_VERSION.to_string() {
        return Err(FormatError::VersionMismatch {
            found: version.to_string(),
            expected: DFA_FORMAT_VERSION,
        });
    }
    let mut sections: Vec<(Section, String)> = Vec::new();
    for (i, l) in lines {
        if let Some(rest) = l.strip_prefix('[') {
            let (name, sum) = rest
                .split_once("] sha256=")
                .ok_or_else(|| FormatError::Syntax {
                    line: i + 1,
                    column: 1,
                    message: "malformed section header".into(),
                })?;
            sections.push((
                Section {
                    name,
                    line: i + 1,
                    body: String::new(),
                },
                sum.trim().to_string(),
            ));
        } else if let Some((s, _)) = sections.last_mut() {
            s.body.push_str(l);
            s.body.push('\n');
        } else if !l.trim().is_empty() {
            return Err(FormatError::Syntax {
                line: i + 1,
                column: 1,
                message: "content before the first section".into(),
            });
        }
    }
    sections
        .into_iter()
        .map(|(s, sum)| {
            if digest(&s.body) == sum {
                Ok(s)
            } else {
                Err(FormatError::ChecksumMismatch {
                    section: s.name.to_string(),
                })
            }
        })
        .collect()
}

pub fn read_dfa(text: &str) -> Result<Dfa, FormatError> {
    let sections = split_sections(text)?;
    let find = |name: &str| sections.iter().find(|s| s.name == name);
    let auto = find("automaton").ok_or_else(|| FormatError::Semantic {
        line: 1,
        column: 1,
        message: "missing [automaton] section".into(),
    })?;
    let a = parse_automaton_spec(&auto.body).map_err(|e| e.shifted(auto.line))?;

    let order = match find("order") {
        None => default_order(&a),
        Some(sec) => {
            let mut order = vec![Vec::new(); a.state_count()];
            for (i, l) in sec.body.lines().enumerate() {
                let line = sec.line + i + 1;
                let bad = |message: String| FormatError::Semantic {
                    line,
                    column: 1,
                    message,
                };
                let (name, ids) = l
                    .split_once(':')
                    .ok_or_else(|| bad("expected `state: ids`".into()))?;
                let q = a
                    .state_by_name(name.trim())
                    .ok_or_else(|| bad(format!("undeclared state `{}`", name.trim())))?;
                for id in ids.split_whitespace() {
                    let t: usize = id.parse().map_err(|_| bad(format!("bad transition id `{id}`")))?;
                    let ok = a
                        .transitions()
                        .get(t)
                        .is_some_and(|tr| tr.source == q && !tr.symbol.is_blank());
                    if !ok {
                        return Err(bad(format!("transition {t} is not an atom transition of `{}`", name.trim())));
                    }
                    order[q as usize].push(t);
                }
            }
            order
        }
    };

    let mut flags = DfaFlags::default();
    let mut deferrable = Vec::new();
    if let Some(sec) = find("certificates") {
        for (i, l) in sec.body.lines().enumerate() {
            let line = sec.line + i + 1;
            let bad = |message: String| FormatError::Semantic {
                line,
                column: 1,
                message,
            };
            let (key, value) = l.split_once(' ').unwrap_or((l, ""));
            let flag = |v: &str| match v.trim() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(bad(format!("expected true/false, found `{other}`"))),
            };
            match key {
                "disambiguated" => flags.disambiguated = flag(value)?,
                "deterministic" => flags.deterministic = flag(value)?,
                "minimized" => flags.minimized = flag(value)?,
                "ts_certified" => flags.ts_certified = flag(value)?,
                "fec_certified" => flags.fec_certified = flag(value)?,
                "deferrable" => {
                    for id in value.split_whitespace() {
                        deferrable.push(id.parse().map_err(|_| bad(format!("bad transition id `{id}`")))?);
                    }
                }
                other => return Err(bad(format!("unknown certificate key `{other}`"))),
            }
        }
    }
    Ok(Dfa::from_parts(a, order, deferrable, flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_automaton_spec;

    fn sample() -> Dfa {
        let a = parse_automaton_spec(
            "symbol a(2), c(2)\nstate q0(2), q1(2), *q2(0)\nstart q0\nq0 -> q1 : a^13_23\nq1 -> q1 : a^13_23\nq1 -> q2 : c^12_<>\n",
        )
        .unwrap();
        let mut d = Dfa::new(a, DfaFlags::default());
        d.flags.ts_certified = true;
        d.flags.fec_certified = true;
        d.set_order(vec![vec![0], vec![2, 1], vec![]]);
        d.set_deferrable(vec![1]);
        d
    }

    #[test]
    fn round_trip() {
        let d = sample();
        assert_eq!(read_dfa(&write_dfa(&d)).unwrap(), d);
    }

    #[test]
    fn stripped_certificates_load_uncertified() {
        let text = write_dfa(&sample());
        let cut = &text[..text.find("[certificates]").unwrap()];
        let d = read_dfa(cut).unwrap();
        assert!(!d.is_certified());
        assert_eq!(d.order(), sample().order());
    }

    #[test]
    fn corruption_and_version() {
        let text = write_dfa(&sample());
        let corrupted = text.replace("q1 -> q2 : c^12_<>", "q1 -> q2 : c^21_<>");
        assert!(matches!(
            read_dfa(&corrupted),
            Err(FormatError::ChecksumMismatch { section }) if section == "automaton"
        ));
        let v2 = text.replacen("regraph-dfa 1", "regraph-dfa 2", 1);
        assert!(matches!(read_dfa(&v2), Err(FormatError::VersionMismatch { .. })));
    }
}
