//! Operad presentations: a signature plus relations.
//!
//! File format:
//!
//! ```text
//! operad <name>
//! generators x/2 y/2 z/2     # or: extends <builtin>
//! relations:
//! x(x(1 2) 3) - x(x(1 3) 2)
//! sym: (a o b) o c - (a o c) o b
//! ```
//!
//! A `sym:` line holds an identity in the symmetric signature and
//! contributes its whole orbit.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::element::{ElementError, OperadElement};
use crate::fixtures;
use crate::symmetric::{symmetric_to_shuffle, Dictionary, SymmetricError, SymmetricRelation};
use crate::tree::{GeneratorSymbol, Signature, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown builtin presentation `{0}`")]
    UnknownBuiltin(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub signature: Signature,
    pub relations: Vec<OperadElement>,
}

impl Presentation {
    pub fn relations_by_arity(&self) -> BTreeMap<usize, Vec<&OperadElement>> {
        let mut m: BTreeMap<usize, Vec<&OperadElement>> = BTreeMap::new();
        for r in &self.relations {
            m.entry(r.arity()).or_default().push(r);
        }
        m
    }

    pub fn max_relation_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity()).max().unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<Presentation, PresentationError> {
        parse_presentation(text)
    }

    /// Text in the file format; parses back to an equal presentation.
    pub fn to_text(&self) -> String {
        let order = crate::order::MonomialOrder::PathLex;
        let mut s = format!("operad {}\ngenerators", self.name);
        for g in self.signature.generators() {
            s.push_str(&format!(" {}/{}", g.name, g.arity));
        }
        s.push_str("\nrelations:\n");
        for r in &self.relations {
            s.push_str(&r.display(&self.signature, order).to_string());
            s.push('\n');
        }
        s
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["lie", "novikov", "gd", "wsgd"];

pub fn builtin(name: &str) -> Result<Presentation, PresentationError> {
    let text = match name {
        "lie" => fixtures::LIE.to_string(),
        "novikov" => fixtures::NOVIKOV.to_string(),
        "gd" => fixtures::GD.to_string(),
        "wsgd" => format!("operad wsgd\nextends gd\nrelations:\n{}", fixtures::WSGD_EXTRA),
        other => return Err(PresentationError::UnknownBuiltin(other.to_string())),
    };
    Ok(parse_presentation(&text).expect("builtin fixtures parse"))
}

pub fn builtin_presentations() -> BTreeMap<String, Presentation> {
    BUILTIN_NAMES
        .iter()
        .map(|n| (n.to_string(), builtin(n).expect("builtin")))
        .collect()
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> PresentationError {
    PresentationError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut name: Option<String> = None;
    let mut sig: Option<Signature> = None;
    let mut relations = Vec::new();
    let mut in_relations = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let line = content.trim();
        if line.is_empty() {
            continue;
        }
        if in_relations {
            let sig = sig.as_ref().expect("checked when the section opened");
            if let Some(rest) = line.strip_prefix("sym:") {
                let off = indent + (line.len() - rest.len());
                let rel = SymmetricRelation::parse(rest).map_err(|e| match e {
                    SymmetricError::Syntax { pos, msg } => syntax(line_no, off + pos + 1, msg),
                    other => syntax(line_no, off + 1, other.to_string()),
                })?;
                let orbit = symmetric_to_shuffle(&rel, &Dictionary::standard(sig))
                    .map_err(|e| syntax(line_no, off + 1, e.to_string()))?;
                relations.extend(orbit);
                continue;
            }
            let e = OperadElement::parse(line, sig).map_err(|e| element_error(line_no, indent, e))?;
            relations.push(e);
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head.trim_end_matches(':') {
            "operad" => {
                let n = rest.trim();
                if n.is_empty() || n.contains(char::is_whitespace) {
                    return Err(syntax(line_no, indent + 1, "expected `operad <name>`"));
                }
                name = Some(n.to_string());
            }
            "generators" => {
                if sig.is_some() {
                    return Err(syntax(line_no, indent + 1, "generators already declared"));
                }
                let mut gens = Vec::new();
                for tok in rest.split_whitespace() {
                    let col = indent + line.find(tok).unwrap_or(0) + 1;
                    let (n, a) = tok
                        .split_once('/')
                        .ok_or_else(|| syntax(line_no, col, format!("expected `name/arity`, got `{tok}`")))?;
                    let a: u8 = a
                        .parse()
                        .map_err(|_| syntax(line_no, col, format!("bad arity in `{tok}`")))?;
                    gens.push(GeneratorSymbol {
                        name: n.to_string(),
                        arity: a,
                    });
                }
                sig = Some(Signature::new(gens).map_err(|e| syntax(line_no, indent + 1, e.to_string()))?);
            }
            "extends" => {
                if sig.is_some() {
                    return Err(syntax(line_no, indent + 1, "`extends` must come before generators"));
                }
                let base = builtin(rest.trim()).map_err(|e| syntax(line_no, indent + 1, e.to_string()))?;
                sig = Some(base.signature);
                relations.extend(base.relations);
            }
            "relations" => {
                if sig.is_none() {
                    return Err(syntax(line_no, indent + 1, "relations before generators"));
                }
                in_relations = true;
            }
            other => {
                return Err(syntax(line_no, indent + 1, format!("unexpected `{other}`")));
            }
        }
    }
    let name = name.ok_or_else(|| syntax(1, 1, "missing `operad <name>` header"))?;
    let signature = sig.ok_or_else(|| syntax(1, 1, "missing generators"))?;
    Ok(Presentation {
        name,
        signature,
        relations,
    })
}

fn element_error(line: usize, indent: usize, e: ElementError) -> PresentationError {
    match e {
        ElementError::Parse { pos, msg } => syntax(line, indent + pos + 1, msg),
        ElementError::Tree(TreeError::Parse { pos, msg }) => syntax(line, indent + pos + 1, msg),
        other => syntax(line, indent + 1, other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RowSpace;
    use crate::order::MonomialOrder;

    #[test]
    fn builtin_sizes() {
        let b = builtin_presentations();
        assert_eq!(b["gd"].signature.len(), 3);
        assert_eq!(b["gd"].relations.len(), 10);
        assert_eq!(b["wsgd"].relations.len(), 28);
        assert_eq!(b["wsgd"].relations_by_arity()[&4].len(), 18);
        assert_eq!(b["lie"].relations.len(), 1);
        assert_eq!(b["novikov"].relations.len(), 6);
    }

    #[test]
    fn lie_is_the_bracket_part_of_gd() {
        let b = builtin_presentations();
        let lie = &b["lie"];
        let gd = &b["gd"];
        let z_only: Vec<String> = gd
            .relations
            .iter()
            .filter(|r| r.monomials().all(|t| t.nodes().iter().all(|n| !matches!(n, crate::tree::Node::Op { gen, .. } if *gen != 2))))
            .map(|r| r.display(&gd.signature, MonomialOrder::PathLex).to_string())
            .collect();
        let lie_rel: Vec<String> = lie
            .relations
            .iter()
            .map(|r| r.display(&lie.signature, MonomialOrder::PathLex).to_string())
            .collect();
        assert_eq!(z_only, lie_rel);
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = Presentation::parse("operad t\ngenerators x/2\nrelations:\nx(2 1)\n").unwrap_err();
        assert!(matches!(err, PresentationError::Syntax { line: 4, .. }), "{err}");
        let err = Presentation::parse("operad t\ngenerators x/2\nrelations:\n  x(1 2) + q(1 2)\n").unwrap_err();
        assert!(matches!(err, PresentationError::Syntax { line: 4, .. }), "{err}");
        let err = Presentation::parse("operad t\ngenerators x/2\nrelations:\nx(1 2\n").unwrap_err();
        assert!(matches!(err, PresentationError::Syntax { line: 4, col: 6, .. }), "{err}");
        assert!(Presentation::parse("generators x/2\n").is_err());
        assert!(Presentation::parse("operad t\nrelations:\n").is_err());
    }

    #[test]
    fn extends_and_symmetric_lines() {
        let p = Presentation::parse("operad t\nextends novikov\nrelations:\nsym: [a, b] o c\n").unwrap_err();
        // novikov has no bracket generator
        assert!(p.to_string().contains("no image"));
        let p = Presentation::parse("operad t\nextends gd\nrelations:\nsym: [a, b] o c\n").unwrap();
        assert_eq!(p.relations.len(), 13);
    }

    #[test]
    fn text_round_trip() {
        for (_, p) in builtin_presentations() {
            let back = Presentation::parse(&p.to_text()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn wsgd_extra_relations_are_independent() {
        let w = builtin("wsgd").unwrap();
        let mut s = RowSpace::new(MonomialOrder::PathLex);
        for r in w.relations_by_arity()[&4].iter() {
            assert!(s.insert(r));
        }
    }
}
