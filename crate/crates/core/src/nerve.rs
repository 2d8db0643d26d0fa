//! Finite covers and their nerves.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub const DEFAULT_DIM_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NerveError {
    #[error("index {index} is out of range for a cover with {opens} opens")]
    IndexOutOfRange { index: usize, opens: usize },
    #[error("subset {subset:?} is declared nonempty but its face {missing:?} is not")]
    NotDownwardClosed { subset: Vec<usize>, missing: Vec<usize> },
    #[error("simplex indices {0:?} are not strictly increasing")]
    NotIncreasing(Vec<usize>),
    #[error("simplex {0} is not in the nerve")]
    UnknownSimplex(Simplex),
}

/// Strictly increasing tuple of open indices `i_0 < … < i_p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(indices: Vec<usize>) -> Result<Self, NerveError> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NerveError::NotIncreasing(indices));
        }
        Ok(Simplex(indices))
    }

    /// Sorts and deduplicates; for ingesting unordered index sets.
    pub fn from_unordered(mut indices: Vec<usize>) -> Result<Self, NerveError> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices)
    }

    pub fn vertex(i: usize) -> Self {
        Simplex(vec![i])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    /// The face with position `k` deleted.
    pub fn face(&self, k: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(k);
        Simplex(v)
    }

    pub fn contains(&self, other: &Simplex) -> bool {
        other.0.iter().all(|i| self.0.binary_search(i).is_ok())
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

/// Codimension-one faces of `s`, each with the position that was deleted.
/// A vertex has none.
pub fn faces(s: &Simplex) -> Vec<(Simplex, usize)> {
    if s.dimension() == 0 {
        return Vec::new();
    }
    (0..s.0.len()).map(|k| (s.face(k), k)).collect()
}

/// A finite open cover, known only through which intersections are nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub opens: Vec<String>,
    /// Index subsets declared to have nonempty intersection. Singletons are implied.
    pub nonempty: Vec<Vec<usize>>,
}

impl Cover {
    pub fn new(opens: Vec<String>, nonempty: Vec<Vec<usize>>) -> Self {
        Cover { opens, nonempty }
    }

    /// Every subset of the opens is nonempty.
    pub fn full(labels: &[&str]) -> Self {
        let n = labels.len();
        let nonempty = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
        Cover::new(labels.iter().map(|s| s.to_string()).collect(), nonempty)
    }

    /// Opens `U_0..U_{n-1}` with the given nonempty subsets.
    pub fn numbered(n: usize, nonempty: Vec<Vec<usize>>) -> Self {
        Cover::new((0..n).map(|i| format!("U{i}")).collect(), nonempty)
    }
}

/// Nerve of a cover: its nonempty intersections, graded by dimension and
/// sorted lexicographically inside each dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nerve {
    labels: Vec<String>,
    dim_cap: usize,
    by_dim: Vec<Vec<Simplex>>,
    position: HashMap<Simplex, usize>,
}

pub fn build_nerve(cover: &Cover, dim_cap: usize) -> Result<Nerve, NerveError> {
    let n = cover.opens.len();
    let mut declared: BTreeSet<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for subset in &cover.nonempty {
        if let Some(&bad) = subset.iter().find(|&&i| i >= n) {
            return Err(NerveError::IndexOutOfRange { index: bad, opens: n });
        }
        let s = Simplex::from_unordered(subset.clone())?;
        declared.insert(s.0);
    }
    for subset in &declared {
        if subset.len() < 2 {
            continue;
        }
        for k in 0..subset.len() {
            let mut face = subset.clone();
            face.remove(k);
            if !declared.contains(&face) {
                return Err(NerveError::NotDownwardClosed {
                    subset: subset.clone(),
                    missing: face,
                });
            }
        }
    }
    let top = declared.iter().map(Vec::len).max().unwrap_or(0);
    let dims = top.min(dim_cap + 1);
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); dims];
    for s in declared {
        let d = s.len() - 1;
        if d < dims {
            by_dim[d].push(Simplex(s));
        }
    }
    for layer in &mut by_dim {
        layer.sort();
    }
    let position = by_dim
        .iter()
        .flat_map(|layer| layer.iter().enumerate().map(|(k, s)| (s.clone(), k)))
        .collect();
    Ok(Nerve {
        labels: cover.opens.clone(),
        dim_cap,
        by_dim,
        position,
    })
}

impl Nerve {
    /// Nerve of `n` opens where every subset intersects.
    pub fn full_simplex(n: usize, dim_cap: usize) -> Nerve {
        let labels: Vec<String> = (0..n).map(|i| format!("U{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        build_nerve(&Cover::full(&refs), dim_cap).expect("full cover is downward closed")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn open_count(&self) -> usize {
        self.labels.len()
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// Highest dimension with at least one simplex (`None` for an empty cover).
    pub fn dimension(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    /// The `p`-simplices, sorted; empty past the top dimension.
    pub fn simplices(&self, p: usize) -> &[Simplex] {
        self.by_dim.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.position.contains_key(s)
    }

    /// Position of `s` within its dimension layer.
    pub fn index_of(&self, s: &Simplex) -> Result<usize, NerveError> {
        self.position.get(s).copied().ok_or_else(|| NerveError::UnknownSimplex(s.clone()))
    }

    /// Simplices of dimension `p + 1` having `s` as a codimension-one face,
    /// each with the position at which `s`'s complement index sits.
    pub fn cofaces(&self, s: &Simplex) -> Vec<(Simplex, usize)> {
        self.simplices(s.dimension() + 1)
            .iter()
            .filter_map(|t| faces(t).into_iter().find(|(f, _)| f == s).map(|(_, k)| (t.clone(), k)))
            .collect()
    }

    /// Counts of simplices per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }
}
