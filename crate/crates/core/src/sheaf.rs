//! Sheaves of abelian groups on a nerve.
//!
//! A sheaf assigns a finitely presented group to every simplex and a
//! restriction morphism to every codimension-one face inclusion
//! `F(face) → F(simplex)`. Deeper restrictions are composites.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{FGAbelianGroup, GroupMorphism, IntMatrix, LatticeError};
use crate::nerve::{faces, Nerve, NerveError, Simplex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{face} is not a codimension-one face of {coface}")]
    NotAFace { face: Simplex, coface: Simplex },
    #[error("{face} is not contained in {coface}")]
    NotContained { face: Simplex, coface: Simplex },
    #[error("no restriction from {face} to {coface}")]
    MissingRestriction { face: Simplex, coface: Simplex },
    #[error("sheaves live on different nerves")]
    NerveMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SheafIssue {
    MissingRestriction { face: Simplex, coface: Simplex },
    IllDefinedRestriction { face: Simplex, coface: Simplex, relation: usize },
    /// The two composites from a codimension-two face disagree.
    NotFunctorial { face: Simplex, coface: Simplex, via: (Simplex, Simplex) },
}

impl fmt::Display for SheafIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SheafIssue::MissingRestriction { face, coface } => {
                write!(f, "missing restriction {face} -> {coface}")
            }
            SheafIssue::IllDefinedRestriction { face, coface, relation } => {
                write!(f, "restriction {face} -> {coface} breaks source relation {relation}")
            }
            SheafIssue::NotFunctorial { face, coface, via } => write!(
                f,
                "composites {face} -> {} -> {coface} and {face} -> {} -> {coface} disagree",
                via.0, via.1
            ),
        }
    }
}

/// Outcome of [`validate_sheaf`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SheafReport {
    pub issues: Vec<SheafIssue>,
}

impl SheafReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSheaf {
    nerve: Arc<Nerve>,
    groups: Vec<Vec<FGAbelianGroup>>,
    // [dim][position][deleted index] : F(face) -> F(simplex), dim >= 1
    restrictions: Vec<Vec<Vec<Option<GroupMorphism>>>>,
}

impl AbelianSheaf {
    /// A sheaf with the given groups and no restrictions yet.
    pub fn new(nerve: Arc<Nerve>, mut group_of: impl FnMut(&Simplex) -> FGAbelianGroup) -> Self {
        let dims = nerve.dimension().map_or(0, |d| d + 1);
        let groups = (0..dims)
            .map(|p| nerve.simplices(p).iter().map(&mut group_of).collect())
            .collect();
        let restrictions = (0..dims)
            .map(|p| {
                nerve
                    .simplices(p)
                    .iter()
                    .map(|_| if p == 0 { Vec::new() } else { vec![None; p + 1] })
                    .collect()
            })
            .collect();
        AbelianSheaf {
            nerve,
            groups,
            restrictions,
        }
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        &self.nerve
    }

    pub fn group(&self, s: &Simplex) -> Result<&FGAbelianGroup, SheafError> {
        let k = self.nerve.index_of(s)?;
        Ok(&self.groups[s.dimension()][k])
    }

    /// Groups of the `p`-simplices in nerve order.
    pub fn groups_in_degree(&self, p: usize) -> &[FGAbelianGroup] {
        self.groups.get(p).map_or(&[], Vec::as_slice)
    }

    fn deleted_position(face: &Simplex, coface: &Simplex) -> Result<usize, SheafError> {
        faces(coface)
            .into_iter()
            .find(|(f, _)| f == face)
            .map(|(_, k)| k)
            .ok_or_else(|| SheafError::NotAFace {
                face: face.clone(),
                coface: coface.clone(),
            })
    }

    /// Installs `F(face) → F(coface)` given by `matrix` on generator coordinates.
    pub fn set_restriction(&mut self, face: &Simplex, coface: &Simplex, matrix: IntMatrix) -> Result<(), SheafError> {
        let k = Self::deleted_position(face, coface)?;
        let pos = self.nerve.index_of(coface)?;
        let m = GroupMorphism::new(self.group(face)?.clone(), self.group(coface)?.clone(), matrix)?;
        self.restrictions[coface.dimension()][pos][k] = Some(m);
        Ok(())
    }

    /// Installs a restriction for every face inclusion, computed by `f(face, coface)`.
    pub fn fill_restrictions(
        &mut self,
        mut f: impl FnMut(&Simplex, &Simplex) -> IntMatrix,
    ) -> Result<(), SheafError> {
        let nerve = Arc::clone(&self.nerve);
        for s in nerve.all_simplices() {
            for (face, _) in faces(s) {
                let m = f(&face, s);
                self.set_restriction(&face, s, m)?;
            }
        }
        Ok(())
    }

    /// Codimension-one restriction `F(face) → F(coface)`, if installed.
    pub fn restriction(&self, face: &Simplex, coface: &Simplex) -> Result<&GroupMorphism, SheafError> {
        let k = Self::deleted_position(face, coface)?;
        let pos = self.nerve.index_of(coface)?;
        self.restrictions[coface.dimension()][pos][k]
            .as_ref()
            .ok_or_else(|| SheafError::MissingRestriction {
                face: face.clone(),
                coface: coface.clone(),
            })
    }

    /// Restriction `F(small) → F(big)` for any inclusion, composed along the
    /// chain that inserts the missing indices in increasing order.
    pub fn restriction_between(&self, small: &Simplex, big: &Simplex) -> Result<GroupMorphism, SheafError> {
        if !big.contains(small) {
            return Err(SheafError::NotContained {
                face: small.clone(),
                coface: big.clone(),
            });
        }
        let mut current = small.clone();
        let mut acc = GroupMorphism::identity(self.group(small)?);
        for &i in big.indices() {
            if current.indices().contains(&i) {
                continue;
            }
            let next = Simplex::from_unordered(current.indices().iter().copied().chain([i]).collect())?;
            acc = self.restriction(&current, &next)?.compose(&acc)?;
            current = next;
        }
        Ok(acc)
    }
}

pub fn validate_sheaf(sheaf: &AbelianSheaf) -> SheafReport {
    let mut issues = Vec::new();
    let nerve = sheaf.nerve();
    for s in nerve.all_simplices() {
        for (face, _) in faces(s) {
            match sheaf.restriction(&face, s) {
                Err(_) => issues.push(SheafIssue::MissingRestriction {
                    face,
                    coface: s.clone(),
                }),
                Ok(m) => {
                    if let Err(LatticeError::IllDefinedMorphism { relation }) = m.check_well_defined() {
                        issues.push(SheafIssue::IllDefinedRestriction {
                            face,
                            coface: s.clone(),
                            relation,
                        });
                    }
                }
            }
        }
    }
    for s in nerve.all_simplices().filter(|s| s.dimension() >= 2) {
        let n = s.indices().len();
        for j in 0..n {
            for k in j + 1..n {
                let via_j = s.face(j);
                let via_k = s.face(k);
                // deleting positions j and k, in either order
                let bottom = via_j.face(k - 1);
                let path = |mid: &Simplex| -> Option<GroupMorphism> {
                    let lower = sheaf.restriction(&bottom, mid).ok()?;
                    let upper = sheaf.restriction(mid, s).ok()?;
                    upper.compose(lower).ok()
                };
                let (Some(a), Some(b)) = (path(&via_j), path(&via_k)) else {
                    continue;
                };
                if !a.agrees_with(&b).unwrap_or(false) {
                    issues.push(SheafIssue::NotFunctorial {
                        face: bottom.clone(),
                        coface: s.clone(),
                        via: (via_j.clone(), via_k.clone()),
                    });
                }
            }
        }
    }
    SheafReport { issues }
}

/// The sheaf with group `group` everywhere and identity restrictions.
pub fn constant_sheaf(nerve: Arc<Nerve>, group: &FGAbelianGroup) -> AbelianSheaf {
    let mut sheaf = AbelianSheaf::new(nerve, |_| group.clone());
    let n = group.generator_count();
    sheaf
        .fill_restrictions(|_, _| IntMatrix::identity(n))
        .expect("identity restrictions fit");
    sheaf
}
