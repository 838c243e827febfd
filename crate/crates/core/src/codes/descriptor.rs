//! On-disk description of a code: a scheme, a length, and either additive
//! generators or an explicit word list.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::Word;
use crate::scheme::{AssociationScheme, SchemeDescriptor};

use super::{BlockCode, CodeRepr};

/// A symbol: a vertex index, or a residue tuple in the scheme's group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Symbol {
    Index(u32),
    Residues(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub scheme: SchemeDescriptor,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Symbol>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<Vec<Symbol>>>,
}

fn resolve(scheme: &AssociationScheme, n: usize, rows: &[Vec<Symbol>]) -> Result<Vec<Word>> {
    rows.iter()
        .map(|row| {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            row.iter()
                .map(|sym| match sym {
                    Symbol::Index(i) if (*i as usize) < scheme.size() => Ok(*i as u8),
                    Symbol::Index(i) => Err(Error::InvalidCode(format!(
                        "symbol {i} outside the {}-point alphabet",
                        scheme.size()
                    ))),
                    Symbol::Residues(r) => {
                        let g = scheme.group().ok_or(Error::NotTranslation)?;
                        Ok(g.index_of(&g.element(r)?)? as u8)
                    }
                })
                .collect()
        })
        .collect()
}

impl CodeDescriptor {
    pub fn build(&self) -> Result<BlockCode> {
        let scheme = Arc::new(self.scheme.build()?);
        if scheme.size() > 256 {
            return Err(Error::InvalidParameter(
                "alphabets above 256 symbols are not supported".into(),
            ));
        }
        match (&self.generators, &self.words) {
            (Some(g), None) => {
                let gens = resolve(&scheme, self.n, g)?;
                BlockCode::additive(scheme, self.n, gens)
            }
            (None, Some(w)) => {
                let words = resolve(&scheme, self.n, w)?;
                BlockCode::from_words(scheme, words)
            }
            _ => Err(Error::InvalidCode(
                "give exactly one of `generators` or `words`".into(),
            )),
        }
    }

    /// Describes `code` over the scheme named by `scheme`, keeping additive
    /// codes as generator lists.
    pub fn from_code(name: Option<String>, scheme: SchemeDescriptor, code: &BlockCode) -> Self {
        let rows = |ws: &[Word]| -> Vec<Vec<Symbol>> {
            ws.iter()
                .map(|w| w.iter().map(|&x| Symbol::Index(x as u32)).collect())
                .collect()
        };
        let (generators, words) = match code.repr() {
            CodeRepr::Additive(a) => (Some(rows(&a.generators)), None),
            CodeRepr::Explicit(w) => (None, Some(rows(w))),
        };
        CodeDescriptor {
            name,
            scheme,
            n: code.len(),
            generators,
            words,
        }
    }
}
