use std::collections::HashMap;

use crate::error::{invalid, Result};

/// Role of one point in a flat clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Core(usize),
    Border(usize),
    Noise,
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Core(c) | Label::Border(c) => Some(c),
            Label::Noise => None,
        }
    }

    pub fn is_core(self) -> bool {
        matches!(self, Label::Core(_))
    }

    /// `core`, `border` or `noise`.
    pub fn kind(self) -> &'static str {
        match self {
            Label::Core(_) => "core",
            Label::Border(_) => "border",
            Label::Noise => "noise",
        }
    }
}

/// Per-point labels with canonical cluster ids: the cluster holding the
/// smallest core index is 0, the next new one 1, and so on. Two labelings of
/// the same clustering therefore compare equal with `==`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Labeling {
    labels: Vec<Label>,
}

impl Labeling {
    /// Canonicalizes arbitrary cluster ids.
    pub fn new(mut labels: Vec<Label>) -> Self {
        let mut map: HashMap<usize, usize> = HashMap::new();
        for l in &labels {
            if let Label::Core(c) = *l {
                let next = map.len();
                map.entry(c).or_insert(next);
            }
        }
        // Clusters without a core point should not exist; keep them distinct
        // anyway rather than merging them silently.
        for l in &labels {
            if let Label::Border(c) = *l {
                let next = map.len();
                map.entry(c).or_insert(next);
            }
        }
        for l in labels.iter_mut() {
            *l = match *l {
                Label::Core(c) => Label::Core(map[&c]),
                Label::Border(c) => Label::Border(map[&c]),
                Label::Noise => Label::Noise,
            };
        }
        Labeling { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn cluster_count(&self) -> usize {
        self.labels.iter().filter_map(|l| l.cluster()).max().map_or(0, |m| m + 1)
    }

    /// Members of every cluster, by id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(c) = l.cluster() {
                out[c].push(i);
            }
        }
        out
    }

    /// Cluster sizes, largest first.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.clusters().iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Noise).count()
    }
}

/// Whether every cluster of `fine` lies inside a single cluster of `coarse`.
pub fn is_refinement(fine: &Labeling, coarse: &Labeling) -> Result<bool> {
    if fine.len() != coarse.len() {
        return Err(invalid(format!(
            "labelings cover {} and {} points",
            fine.len(),
            coarse.len()
        )));
    }
    let mut image: Vec<Option<usize>> = vec![None; fine.cluster_count()];
    for (a, b) in fine.labels().iter().zip(coarse.labels()) {
        let Some(c) = a.cluster() else { continue };
        let Some(d) = b.cluster() else { return Ok(false) };
        match image[c] {
            None => image[c] = Some(d),
            Some(prev) if prev != d => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}
