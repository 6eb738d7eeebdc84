use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Vocab;

use super::mine::PatternSet;
use super::pattern::{Pattern, PatternEdge};

/// On-disk form of one pattern; names instead of interned ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRecord {
    /// Attribute of each slot.
    pub nodes: Vec<String>,
    /// `(source slot, target slot, layer)`.
    pub edges: Vec<(usize, usize, String)>,
    pub support: usize,
    pub code: String,
}

impl PatternRecord {
    pub fn from_pattern(p: &Pattern, vocab: &Vocab) -> Self {
        PatternRecord {
            nodes: p.attrs().iter().map(|&a| vocab.attr_name(a).to_string()).collect(),
            edges: p
                .edges()
                .iter()
                .map(|e| (e.src, e.dst, vocab.layer_name(e.layer).to_string()))
                .collect(),
            support: p.support(),
            code: p.code_string(vocab),
        }
    }

    /// Interns the record against `vocab`. Names the vocabulary does not know
    /// are a format error, as is a code that disagrees with the structure.
    pub fn to_pattern(&self, directed: bool, vocab: &Vocab) -> Result<Pattern> {
        let attrs = self
            .nodes
            .iter()
            .map(|a| {
                vocab
                    .attr_id(a)
                    .ok_or_else(|| Error::format("pattern", format!("unknown attribute `{a}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = self
            .edges
            .iter()
            .map(|(s, d, l)| {
                vocab
                    .layer_id(l)
                    .map(|l| PatternEdge::new(*s, *d, l))
                    .ok_or_else(|| Error::format("pattern", format!("unknown layer `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Pattern::new(directed, attrs, edges)?.with_support(self.support);
        let code = p.code_string(vocab);
        if code != self.code {
            return Err(Error::format(
                "pattern",
                format!("stored code `{}` does not match structure `{code}`", self.code),
            ));
        }
        Ok(p)
    }
}

pub fn patterns_to_json(set: &PatternSet, vocab: &Vocab) -> String {
    let records: Vec<PatternRecord> =
        set.iter().map(|p| PatternRecord::from_pattern(p, vocab)).collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}

pub fn patterns_from_json(text: &str, directed: bool, vocab: &Vocab) -> Result<PatternSet> {
    let records: Vec<PatternRecord> =
        serde_json::from_str(text).map_err(|e| Error::format("pattern", e))?;
    let patterns = records
        .iter()
        .map(|r| r.to_pattern(directed, vocab))
        .collect::<Result<Vec<_>>>()?;
    Ok(PatternSet::new(directed, patterns))
}

/// Line-graph text format: `t # <index> <support>`, `v <slot> <attr>`,
/// `e <src> <dst> <layer>`.
pub fn patterns_to_lg(set: &PatternSet, vocab: &Vocab) -> String {
    let mut out = String::new();
    for (i, p) in set.iter().enumerate() {
        out.push_str(&format!("t # {i} {}\n", p.support()));
        for (s, &a) in p.attrs().iter().enumerate() {
            out.push_str(&format!("v {s} {}\n", vocab.attr_name(a)));
        }
        for e in p.edges() {
            out.push_str(&format!("e {} {} {}\n", e.src, e.dst, vocab.layer_name(e.layer)));
        }
    }
    out
}
