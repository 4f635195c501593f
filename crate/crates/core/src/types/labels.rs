use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interned label identifier.
pub type LabelId = usize;

/// Label of intra-word arcs.
pub const INTRA: &str = "INTRA";
/// Interned id of [`INTRA`]; always 0.
pub const INTRA_ID: LabelId = 0;
/// Default label of the arc from ROOT to the sentence head.
pub const DEFAULT_ROOT_LABEL: &str = "root";

/// Ordered set of dependency labels with the INTRA label at id 0 and a
/// distinguished ROOT-attachment label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "LabelSetRepr", into = "LabelSetRepr")]
pub struct LabelSet {
    names: Vec<String>,
    root: LabelId,
    index: HashMap<String, LabelId>,
}

#[derive(Serialize, Deserialize)]
struct LabelSetRepr {
    names: Vec<String>,
    root: LabelId,
}

impl From<LabelSetRepr> for LabelSet {
    fn from(repr: LabelSetRepr) -> Self {
        let index = repr
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        LabelSet {
            names: repr.names,
            root: repr.root,
            index,
        }
    }
}

impl From<LabelSet> for LabelSetRepr {
    fn from(set: LabelSet) -> Self {
        LabelSetRepr {
            names: set.names,
            root: set.root,
        }
    }
}

impl LabelSet {
    /// Build a label set from syntactic labels. Duplicates are collapsed and
    /// the remaining labels are sorted, so the layout does not depend on
    /// corpus order. `root_label` is added if absent.
    pub fn new<I, S>(labels: I, root_label: &str) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut syntactic: Vec<String> =
            labels.into_iter().map(|s| s.as_ref().to_owned()).collect();
        syntactic.push(root_label.to_owned());
        syntactic.sort();
        syntactic.dedup();
        if syntactic.iter().any(|l| l == INTRA) {
            return Err(Error::UnknownLabel(format!(
                "{} is reserved for intra-word arcs",
                INTRA
            )));
        }
        if syntactic
            .iter()
            .any(|l| l.is_empty() || l.contains(char::is_whitespace))
        {
            return Err(Error::UnknownLabel(
                "labels must be non-empty without whitespace".into(),
            ));
        }
        let mut names = vec![INTRA.to_owned()];
        names.extend(syntactic);
        let index: HashMap<String, LabelId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let root = index[root_label];
        Ok(LabelSet { names, root, index })
    }

    /// Label set with INTRA as the only label. The ROOT-attachment label
    /// then also maps to INTRA's id, which is only meaningful for
    /// structure-only experiments.
    pub fn intra_only() -> Self {
        LabelSet::from(LabelSetRepr {
            names: vec![INTRA.to_owned()],
            root: INTRA_ID,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<LabelId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<LabelId> {
        self.id(name)
            .ok_or_else(|| Error::UnknownLabel(name.to_owned()))
    }

    pub fn name(&self, id: LabelId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn root_label(&self) -> LabelId {
        self.root
    }

    /// Ids of all labels except INTRA.
    pub fn syntactic(&self) -> impl Iterator<Item = LabelId> {
        1..self.names.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intra_is_zero_and_sorted() {
        let set = LabelSet::new(["nsubj", "dobj", "nsubj"], "root").unwrap();
        assert_eq!(set.names(), &["INTRA", "dobj", "nsubj", "root"]);
        assert_eq!(set.id(INTRA), Some(INTRA_ID));
        assert_eq!(set.name(set.root_label()), "root");
        assert_eq!(set.syntactic().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn intra_name_reserved() {
        assert!(LabelSet::new(["INTRA"], "root").is_err());
    }

    #[test]
    fn serde_round_trip_rebuilds_index() {
        let set = LabelSet::new(["a", "b"], "ROOT").unwrap();
        let json = serde_json::to_string(&set).unwrap();
        let back: LabelSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
        assert_eq!(back.id("b"), set.id("b"));
    }
}
