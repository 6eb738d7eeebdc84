use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Edge, LayerId, NodeId, SimpleGraph};
use crate::predictor::ScoreTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classical {
    /// Common neighbours.
    Cn,
    /// Adamic-Adar.
    Aa,
    /// Resource allocation.
    Ra,
    /// Preferential attachment.
    Pa,
    /// Jaccard.
    Ja,
}

impl Classical {
    pub const ALL: [Classical; 5] = [Classical::Cn, Classical::Aa, Classical::Ra, Classical::Pa, Classical::Ja];
}

impl fmt::Display for Classical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classical::Cn => "cn",
            Classical::Aa => "aa",
            Classical::Ra => "ra",
            Classical::Pa => "pa",
            Classical::Ja => "ja",
        })
    }
}

impl FromStr for Classical {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Classical::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::Usage(format!("unknown method `{s}`")))
    }
}

fn common(a: &[NodeId], b: &[NodeId], mut f: impl FnMut(NodeId)) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                f(a[i]);
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Scores every non-adjacent pair `u < v` of `sg`, keyed on `layer`. Pairs
/// scoring zero are left out.
pub fn classical_scores(sg: &SimpleGraph, method: Classical, layer: LayerId) -> ScoreTable {
    let mut table = ScoreTable::new(false, method.to_string());
    let nodes = sg.nodes();
    for (i, &u) in nodes.iter().enumerate() {
        let nu = sg.neighbors(u);
        for &v in &nodes[i + 1..] {
            if sg.has_edge(u, v) {
                continue;
            }
            let nv = sg.neighbors(v);
            let s = match method {
                Classical::Cn => common(nu, nv, |_| {}) as f64,
                Classical::Aa => {
                    let mut s = 0.0;
                    common(nu, nv, |z| {
                        let d = sg.degree(z);
                        if d > 1 {
                            s += 1.0 / (d as f64).ln();
                        }
                    });
                    s
                }
                Classical::Ra => {
                    let mut s = 0.0;
                    common(nu, nv, |z| s += 1.0 / sg.degree(z) as f64);
                    s
                }
                Classical::Pa => (nu.len() * nv.len()) as f64,
                Classical::Ja => {
                    let c = common(nu, nv, |_| {});
                    let union = nu.len() + nv.len() - c;
                    if union == 0 {
                        0.0
                    } else {
                        c as f64 / union as f64
                    }
                }
            };
            if s > 0.0 {
                table.insert(Edge::new(u, v, layer), s);
            }
        }
    }
    table
}
