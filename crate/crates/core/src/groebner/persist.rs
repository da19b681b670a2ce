//! Plain-text basis files.
//!
//! ```text
//! gdop-basis 1
//! presentation gd
//! order pathlex
//! max-arity 4
//! generators x/2 y/2 z/2
//! checksum <sha256 of the other lines>
//! rules 2
//! z(z(1 2) 3) => z(z(1 3) 2) + z(1 z(2 3))
//! ...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::element::OperadElement;
use crate::order::MonomialOrder;
use crate::tree::{GeneratorSymbol, Signature, TreeMonomial};

use super::{GroebnerBasis, GroebnerError, RewriteRule};

pub const BASIS_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "gdop-basis";

fn format_err(line: usize, msg: impl Into<String>) -> GroebnerError {
    GroebnerError::Format { line, msg: msg.into() }
}

fn body_lines(b: &GroebnerBasis) -> (Vec<String>, Vec<String>) {
    let sig = b.signature();
    let gens: Vec<String> = sig.generators().iter().map(|g| format!("{}/{}", g.name, g.arity)).collect();
    let header = vec![
        format!("{MAGIC} {BASIS_FORMAT_VERSION}"),
        format!("presentation {}", b.presentation_name()),
        format!("order {}", b.order().id()),
        format!("max-arity {}", b.max_arity()),
        format!("generators {}", gens.join(" ")),
    ];
    let mut rules = vec![format!("rules {}", b.rules().len())];
    for r in b.rules() {
        rules.push(format!(
            "{} => {}",
            r.lead.display(sig),
            r.tail.display(sig, b.order())
        ));
    }
    (header, rules)
}

fn checksum<'a>(lines: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn save_basis(b: &GroebnerBasis, path: impl AsRef<Path>) -> Result<(), GroebnerError> {
    fs::write(path, basis_to_string(b))?;
    Ok(())
}

pub(crate) fn basis_to_string(b: &GroebnerBasis) -> String {
    let (header, rules) = body_lines(b);
    let sum = checksum(header.iter().chain(&rules).map(String::as_str));
    let mut s = String::new();
    for l in &header {
        s.push_str(l);
        s.push('\n');
    }
    s.push_str(&format!("checksum {sum}\n"));
    for l in &rules {
        s.push_str(l);
        s.push('\n');
    }
    s
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<GroebnerBasis, GroebnerError> {
    parse_basis(&fs::read_to_string(path)?)
}

pub fn parse_basis(text: &str) -> Result<GroebnerBasis, GroebnerError> {
    let lines: Vec<&str> = text.lines().collect();
    let field = |i: usize, key: &str| -> Result<&str, GroebnerError> {
        let l = lines.get(i).ok_or_else(|| format_err(i + 1, format!("missing `{key}` line")))?;
        l.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::trim)
            .ok_or_else(|| format_err(i + 1, format!("expected `{key} ...`")))
    };
    let version = field(0, MAGIC)?;
    if version != BASIS_FORMAT_VERSION.to_string() {
        return Err(GroebnerError::Version(version.to_string()));
    }
    let name = field(1, "presentation")?.to_string();
    let order: MonomialOrder = field(2, "order")?
        .parse()
        .map_err(|e: crate::order::UnknownOrder| format_err(3, e.to_string()))?;
    let max_arity: usize = field(3, "max-arity")?
        .parse()
        .map_err(|_| format_err(4, "bad max-arity"))?;
    let mut gens = Vec::new();
    for tok in field(4, "generators")?.split_whitespace() {
        let (n, a) = tok.split_once('/').ok_or_else(|| format_err(5, format!("bad generator `{tok}`")))?;
        let arity = a.parse().map_err(|_| format_err(5, format!("bad arity in `{tok}`")))?;
        gens.push(GeneratorSymbol {
            name: n.to_string(),
            arity,
        });
    }
    let sig = Signature::new(gens).map_err(|e| format_err(5, e.to_string()))?;
    let expected = field(5, "checksum")?.to_string();
    let count: usize = field(6, "rules")?.parse().map_err(|_| format_err(7, "bad rule count"))?;
    let rule_lines = &lines[7.min(lines.len())..];
    let rule_lines: Vec<&str> = rule_lines.iter().copied().filter(|l| !l.trim().is_empty()).collect();
    let actual = checksum(lines[..5].iter().chain(&lines[6..7]).chain(&rule_lines).copied());
    if actual != expected {
        return Err(GroebnerError::Checksum);
    }
    if rule_lines.len() != count {
        return Err(format_err(7, format!("expected {count} rules, found {}", rule_lines.len())));
    }
    let mut rules = Vec::with_capacity(count);
    for (i, l) in rule_lines.iter().enumerate() {
        let line = i + 8;
        let (lhs, rhs) = l.split_once("=>").ok_or_else(|| format_err(line, "expected `lead => tail`"))?;
        let lead = TreeMonomial::parse(lhs.trim(), &sig).map_err(|e| format_err(line, e.to_string()))?;
        let rhs = rhs.trim();
        let tail = if rhs == "0" {
            OperadElement::zero(lead.arity())
        } else {
            OperadElement::parse(rhs, &sig).map_err(|e| format_err(line, e.to_string()))?
        };
        if tail.arity() != lead.arity() {
            return Err(format_err(line, "tail arity differs from lead"));
        }
        if lead.arity() > max_arity {
            return Err(format_err(line, "rule above max-arity"));
        }
        rules.push(RewriteRule { lead, tail });
    }
    let b = GroebnerBasis::new(name, sig, order, max_arity, rules);
    b.check_interreduced()?;
    Ok(b)
}
