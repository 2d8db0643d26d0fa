//! Gerbe descent data with an abelian band.
//!
//! Every hom-set between local objects is a torsor under the band, so a
//! morphism is stored as an offset from a designated basepoint morphism.
//! Composition adds offsets. The composite of basepoints around a triangle
//! need not be the identity; that discrepancy is the `basepoint_defect`.

use std::sync::Arc;

use thiserror::Error;

use crate::cech::{coboundary, is_cocycle, CechError, Cochain};
use crate::connecting::{connecting_map, ConnectingError, ShortExactSequence};
use crate::lattice::{GroupElement, LatticeError};
use crate::nerve::{Nerve, Simplex};
use crate::sheaf::{AbelianSheaf, SheafError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Connecting(#[from] ConnectingError),
    #[error("nonabelian band ({0}): only abelian bands are supported")]
    NonAbelianBand(String),
    #[error("cannot compose {first} -> {second}: labels {found} and {expected} differ")]
    LabelMismatch {
        first: String,
        second: String,
        expected: String,
        found: String,
    },
    #[error("{what} on {simplex}: expected an arrow {expected}, found {found}")]
    WrongArrow {
        what: &'static str,
        simplex: Simplex,
        expected: String,
        found: String,
    },
    #[error("expected {expected} {what}, found {found}")]
    WrongCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("automorphism does not respect composition on {0}")]
    NotFunctorial(Simplex),
    #[error("band of the descent datum is not the quotient sheaf of the sequence")]
    BandMismatch,
}

/// A morphism between two local objects, as an offset from the basepoint
/// of its hom-torsor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsorMorphism {
    pub source_label: String,
    pub target_label: String,
    pub offset: GroupElement,
}

impl TorsorMorphism {
    pub fn new(source: impl Into<String>, target: impl Into<String>, offset: GroupElement) -> Self {
        TorsorMorphism {
            source_label: source.into(),
            target_label: target.into(),
            offset,
        }
    }

    fn arrow(&self) -> String {
        format!("{} -> {}", self.source_label, self.target_label)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &TorsorMorphism) -> Result<TorsorMorphism, DescentError> {
        if self.target_label != next.source_label {
            return Err(DescentError::LabelMismatch {
                first: self.arrow(),
                second: next.arrow(),
                expected: next.source_label.clone(),
                found: self.target_label.clone(),
            });
        }
        Ok(TorsorMorphism::new(
            self.source_label.clone(),
            next.target_label.clone(),
            &self.offset + &next.offset,
        ))
    }

    pub fn inverse(&self) -> TorsorMorphism {
        TorsorMorphism::new(self.target_label.clone(), self.source_label.clone(), -&self.offset)
    }

    /// Transports the offset from `L(from)` to `L(to)`.
    pub fn restrict(&self, band: &AbelianSheaf, from: &Simplex, to: &Simplex) -> Result<TorsorMorphism, DescentError> {
        let r = band.restriction_between(from, to)?;
        Ok(TorsorMorphism::new(
            self.source_label.clone(),
            self.target_label.clone(),
            r.apply(&self.offset)?,
        ))
    }

    fn expect_arrow(&self, what: &'static str, simplex: &Simplex, source: &str, target: &str) -> Result<(), DescentError> {
        if self.source_label != source || self.target_label != target {
            return Err(DescentError::WrongArrow {
                what,
                simplex: simplex.clone(),
                expected: format!("{source} -> {target}"),
                found: self.arrow(),
            });
        }
        Ok(())
    }
}

/// The band a descent datum is bounded by.
#[derive(Clone, Debug)]
pub enum Band {
    Abelian(AbelianSheaf),
    /// Described only, never computed with.
    NonAbelian(String),
}

/// Local objects `x_i`, transitions `g_ij : x_i → x_j` for `i < j`, and the
/// basepoint defect around each triangle.
#[derive(Clone, Debug)]
pub struct GerbeDescentDatum {
    band: AbelianSheaf,
    objects: Vec<String>,
    transitions: Vec<TorsorMorphism>,
    basepoint_defect: Cochain,
}

impl GerbeDescentDatum {
    pub fn new(
        band: Band,
        objects: Vec<String>,
        transitions: Vec<TorsorMorphism>,
        basepoint_defect: Cochain,
    ) -> Result<Self, DescentError> {
        let band = match band {
            Band::Abelian(l) => l,
            Band::NonAbelian(desc) => return Err(DescentError::NonAbelianBand(desc)),
        };
        let nerve = Arc::clone(band.nerve());
        if objects.len() != nerve.simplices(0).len() {
            return Err(DescentError::WrongCount {
                what: "objects",
                expected: nerve.simplices(0).len(),
                found: objects.len(),
            });
        }
        if transitions.len() != nerve.simplices(1).len() {
            return Err(DescentError::WrongCount {
                what: "transitions",
                expected: nerve.simplices(1).len(),
                found: transitions.len(),
            });
        }
        for (e, g) in nerve.simplices(1).iter().zip(&transitions) {
            let (i, j) = edge_ends(&nerve, e)?;
            g.expect_arrow("transition", e, &objects[i], &objects[j])?;
            band.group(e)?.check_element(&g.offset)?;
        }
        // Re-validate coordinates of the defect against this band.
        let basepoint_defect = Cochain::new(&band, 2, basepoint_defect.values().to_vec())?;
        Ok(GerbeDescentDatum {
            band,
            objects,
            transitions,
            basepoint_defect,
        })
    }

    /// All transitions at their basepoints and no defect.
    pub fn trivial(band: AbelianSheaf, objects: Vec<String>) -> Result<Self, DescentError> {
        let nerve = Arc::clone(band.nerve());
        let transitions = nerve
            .simplices(1)
            .iter()
            .map(|e| {
                let (i, j) = edge_ends(&nerve, e)?;
                Ok(TorsorMorphism::new(
                    objects.get(i).cloned().unwrap_or_default(),
                    objects.get(j).cloned().unwrap_or_default(),
                    band.group(e)?.zero_element(),
                ))
            })
            .collect::<Result<Vec<_>, DescentError>>()?;
        let defect = Cochain::zero(&band, 2);
        Self::new(Band::Abelian(band), objects, transitions, defect)
    }

    pub fn band(&self) -> &AbelianSheaf {
        &self.band
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn transitions(&self) -> &[TorsorMorphism] {
        &self.transitions
    }

    pub fn basepoint_defect(&self) -> &Cochain {
        &self.basepoint_defect
    }

    /// Transition offsets as a 1-cochain of the band.
    pub fn transition_offsets(&self) -> Result<Cochain, DescentError> {
        Ok(Cochain::new(
            &self.band,
            1,
            self.transitions.iter().map(|g| g.offset.clone()).collect(),
        )?)
    }

    /// Adds `a_ij` to every transition offset.
    pub fn shift_transitions(&self, a: &Cochain) -> Result<Self, DescentError> {
        let shifted = self.transition_offsets()?.add(a)?;
        let transitions = self
            .transitions
            .iter()
            .zip(shifted.values())
            .map(|(g, v)| TorsorMorphism::new(g.source_label.clone(), g.target_label.clone(), v.clone()))
            .collect();
        Self::new(
            Band::Abelian(self.band.clone()),
            self.objects.clone(),
            transitions,
            self.basepoint_defect.clone(),
        )
    }

    fn transition(&self, i: usize, j: usize) -> Result<(&TorsorMorphism, Simplex), DescentError> {
        let e = Simplex::new(vec![i, j]).map_err(SheafError::from)?;
        let k = self.band.nerve().index_of(&e).map_err(SheafError::from)?;
        Ok((&self.transitions[k], e))
    }
}

fn edge_ends(nerve: &Nerve, e: &Simplex) -> Result<(usize, usize), DescentError> {
    let idx = e.indices();
    let i = nerve.index_of(&Simplex::vertex(idx[0])).map_err(SheafError::from)?;
    let j = nerve.index_of(&Simplex::vertex(idx[1])).map_err(SheafError::from)?;
    Ok((i, j))
}

/// A cochain together with whether it satisfied the cocycle identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedCochain {
    pub cochain: Cochain,
    pub is_cocycle: bool,
}

/// `c_ijk`: the loop `x_i → x_j → x_k → x_i` on `U_ijk`, offset plus defect.
pub fn transition_cocycle(datum: &GerbeDescentDatum) -> Result<VerifiedCochain, DescentError> {
    let band = &datum.band;
    let nerve = Arc::clone(band.nerve());
    let mut values = Vec::new();
    for t in nerve.simplices(2) {
        let [i, j, k] = [t.indices()[0], t.indices()[1], t.indices()[2]];
        let (g_ij, e_ij) = datum.transition(i, j)?;
        let (g_jk, e_jk) = datum.transition(j, k)?;
        let (g_ik, e_ik) = datum.transition(i, k)?;
        let around = g_ij
            .restrict(band, &e_ij, t)?
            .then(&g_jk.restrict(band, &e_jk, t)?)?
            .then(&g_ik.restrict(band, &e_ik, t)?.inverse())?;
        debug_assert_eq!(around.source_label, around.target_label);
        values.push(&around.offset + datum.basepoint_defect.value_at(band, t)?);
    }
    let cochain = Cochain::new(band, 2, values)?;
    let is_cocycle = is_cocycle(band, &cochain)?;
    Ok(VerifiedCochain { cochain, is_cocycle })
}

/// A torsor datum (one object per fibre) has trivial loops:
/// `g_ik = g_ij + g_jk` on every triangle.
pub fn is_torsor_datum(datum: &GerbeDescentDatum) -> Result<bool, DescentError> {
    Ok(transition_cocycle(datum)?.cochain.is_zero(&datum.band)?)
}

/// An automorphism `h` of the gerbe acting trivially on the band.
///
/// `connecting[i]` is `l_i : x_i → h(x_i)` with offset in `L(U_i)`;
/// `images[e]` is `h(u_e) : h(x_i) → h(x_j)` for the transition `u_e = g_e`,
/// with offset relative to the transported basepoint `l_j ∘ b_ij ∘ l_i⁻¹`
/// where `b_ij` is the basepoint of `x_i → x_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismDatum {
    pub image_objects: Vec<String>,
    pub connecting: Vec<TorsorMorphism>,
    pub images: Vec<TorsorMorphism>,
}

impl AutomorphismDatum {
    /// `h` the identity, `l_i` the basepoints.
    pub fn identity(datum: &GerbeDescentDatum) -> Result<Self, DescentError> {
        let band = &datum.band;
        let nerve = band.nerve();
        let connecting = nerve
            .simplices(0)
            .iter()
            .zip(&datum.objects)
            .map(|(v, x)| Ok(TorsorMorphism::new(x.clone(), x.clone(), band.group(v)?.zero_element())))
            .collect::<Result<Vec<_>, DescentError>>()?;
        Ok(AutomorphismDatum {
            image_objects: datum.objects.clone(),
            connecting,
            images: datum.transitions.clone(),
        })
    }

    fn check(&self, datum: &GerbeDescentDatum) -> Result<(), DescentError> {
        let nerve = Arc::clone(datum.band.nerve());
        let n = nerve.simplices(0).len();
        for (what, found) in [("image objects", self.image_objects.len()), ("connecting morphisms", self.connecting.len())] {
            if found != n {
                return Err(DescentError::WrongCount { what, expected: n, found });
            }
        }
        if self.images.len() != datum.transitions.len() {
            return Err(DescentError::WrongCount {
                what: "transition images",
                expected: datum.transitions.len(),
                found: self.images.len(),
            });
        }
        for (k, v) in nerve.simplices(0).iter().enumerate() {
            self.connecting[k].expect_arrow("connecting morphism", v, &datum.objects[k], &self.image_objects[k])?;
            datum.band.group(v)?.check_element(&self.connecting[k].offset)?;
        }
        for (e, hu) in nerve.simplices(1).iter().zip(&self.images) {
            let (i, j) = edge_ends(&nerve, e)?;
            hu.expect_arrow("transition image", e, &self.image_objects[i], &self.image_objects[j])?;
            datum.band.group(e)?.check_element(&hu.offset)?;
        }
        Ok(())
    }
}

/// `h_ij = u_ij⁻¹ ∘ l_j⁻¹ ∘ h(u_ij) ∘ l_i`, an automorphism of `x_i` on `U_ij`.
///
/// Fails with [`DescentError::NotFunctorial`] when `h` does not carry the
/// loop `c_ijk` to itself.
pub fn automorphism_to_cocycle(datum: &GerbeDescentDatum, auto: &AutomorphismDatum) -> Result<VerifiedCochain, DescentError> {
    auto.check(datum)?;
    let band = &datum.band;
    let nerve = Arc::clone(band.nerve());

    // h must send each loop to the same band element: the images around a
    // triangle (with the transported defect) must compose to c_ijk.
    let images = Cochain::new(band, 1, auto.images.iter().map(|m| m.offset.clone()).collect())?;
    let c = transition_cocycle(datum)?.cochain;
    let hc = coboundary(band, &images)?.add(&datum.basepoint_defect)?;
    for (t, (a, b)) in nerve.simplices(2).iter().zip(hc.values().iter().zip(c.values())) {
        if !band.group(t)?.element_equal(a, b)? {
            return Err(DescentError::NotFunctorial(t.clone()));
        }
    }

    let mut values = Vec::new();
    for (e, (u, hu)) in nerve.simplices(1).iter().zip(datum.transitions.iter().zip(&auto.images)) {
        let (i, j) = edge_ends(&nerve, e)?;
        let vi = Simplex::vertex(e.indices()[0]);
        let vj = Simplex::vertex(e.indices()[1]);
        let l_i = auto.connecting[i].restrict(band, &vi, e)?;
        let l_j = auto.connecting[j].restrict(band, &vj, e)?;
        let h = l_i.then(hu)?.then(&l_j.inverse())?.then(&u.inverse())?;
        debug_assert_eq!(h.source_label, h.target_label);
        values.push(h.offset);
    }
    let cochain = Cochain::new(band, 1, values)?;
    let is_cocycle = is_cocycle(band, &cochain)?;
    Ok(VerifiedCochain { cochain, is_cocycle })
}

/// The (2,1)-gerbe classifying 3-cocycle, computed by lifting transitions
/// and defect separately to the middle sheaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gerbe21Output {
    /// `c' = dg' + defect'` in the middle sheaf.
    pub lifted_loop: Cochain,
    /// `dc'`, pulled back to the kernel sheaf.
    pub cocycle: Cochain,
}

pub fn gerbe21_classifying(datum: &GerbeDescentDatum, seq: &ShortExactSequence) -> Result<Gerbe21Output, DescentError> {
    if datum.band != seq.quotient {
        return Err(DescentError::BandMismatch);
    }
    let c = transition_cocycle(datum)?;
    if !c.is_cocycle {
        return Err(ConnectingError::NotACocycle(2).into());
    }
    let lift = |x: &Cochain| -> Result<Cochain, DescentError> {
        let nerve = seq.nerve();
        let values = nerve
            .simplices(x.degree())
            .iter()
            .zip(seq.projection.in_degree(x.degree()).iter().zip(x.values()))
            .map(|(s, (pi, v))| {
                pi.preimage(v)?
                    .ok_or_else(|| DescentError::Connecting(ConnectingError::LiftFailed { simplex: s.clone() }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Cochain::new(&seq.middle, x.degree(), values)?)
    };
    let g_lift = lift(&datum.transition_offsets()?)?;
    let defect_lift = lift(&datum.basepoint_defect)?;
    let lifted_loop = coboundary(&seq.middle, &g_lift)?.add(&defect_lift)?;
    let boundary = coboundary(&seq.middle, &lifted_loop)?;
    let values = seq
        .nerve()
        .simplices(3)
        .iter()
        .zip(seq.inclusion.in_degree(3).iter().zip(boundary.values()))
        .map(|(s, (iota, v))| {
            iota.preimage(v)?.ok_or_else(|| {
                DescentError::Connecting(ConnectingError::PullbackFailed {
                    simplex: s.clone(),
                    stage: "kernel pullback",
                })
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cocycle = Cochain::new(&seq.kernel, 3, values)?;
    if !is_cocycle(&seq.kernel, &cocycle)? {
        return Err(ConnectingError::OutputNotCocycle(3).into());
    }
    Ok(Gerbe21Output { lifted_loop, cocycle })
}

/// The same class by the generic route: [`connecting_map`] applied to `c`.
pub fn gerbe21_via_connecting(datum: &GerbeDescentDatum, seq: &ShortExactSequence) -> Result<Cochain, DescentError> {
    let c = transition_cocycle(datum)?;
    Ok(connecting_map(seq, &c.cochain, None)?.cocycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::coboundary_witness;
    use crate::lattice::FGAbelianGroup;
    use crate::sheaf::constant_sheaf;

    fn band(n: usize) -> AbelianSheaf {
        constant_sheaf(Arc::new(Nerve::full_simplex(n, 5)), &FGAbelianGroup::free(1))
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn edge_values(l: &AbelianSheaf, v: &[i64]) -> Cochain {
        Cochain::new(l, 1, v.iter().map(|&x| GroupElement::from_i64s(&[x])).collect()).unwrap()
    }

    #[test]
    fn trivial_datum_has_zero_loop() {
        let d = GerbeDescentDatum::trivial(band(3), labels(3)).unwrap();
        let c = transition_cocycle(&d).unwrap();
        assert!(c.is_cocycle);
        assert!(c.cochain.is_zero(d.band()).unwrap());
        assert!(is_torsor_datum(&d).unwrap());
    }

    #[test]
    fn shifting_transitions_shifts_by_coboundary() {
        let l = band(4);
        let d = GerbeDescentDatum::trivial(l.clone(), labels(4)).unwrap();
        let a = edge_values(&l, &[1, -2, 3, 0, 5, 7]);
        let shifted = d.shift_transitions(&a).unwrap();
        let diff = transition_cocycle(&shifted)
            .unwrap()
            .cochain
            .sub(&transition_cocycle(&d).unwrap().cochain)
            .unwrap();
        assert!(diff.equals(&l, &coboundary(&l, &a).unwrap()).unwrap());
    }

    #[test]
    fn torsor_case_is_the_edge_identity() {
        let l = band(3);
        // g_02 = g_01 + g_12 makes the single loop trivial.
        let d = GerbeDescentDatum::trivial(l.clone(), labels(3))
            .unwrap()
            .shift_transitions(&edge_values(&l, &[2, 5, 3]))
            .unwrap();
        assert!(is_torsor_datum(&d).unwrap());
        let d = d.shift_transitions(&edge_values(&l, &[0, 1, 0])).unwrap();
        assert!(!is_torsor_datum(&d).unwrap());
    }

    #[test]
    fn nonabelian_band_is_refused() {
        let l = band(2);
        let err = GerbeDescentDatum::new(Band::NonAbelian("GL2".into()), labels(2), vec![], Cochain::zero(&l, 2));
        assert!(matches!(err, Err(DescentError::NonAbelianBand(_))));
    }

    #[test]
    fn mislabelled_transition_is_refused() {
        let l = band(2);
        let g = TorsorMorphism::new("x1", "x0", GroupElement::from_i64s(&[0]));
        let err = GerbeDescentDatum::new(Band::Abelian(l.clone()), labels(2), vec![g], Cochain::zero(&l, 2));
        assert!(matches!(err, Err(DescentError::WrongArrow { .. })));
    }

    #[test]
    fn identity_automorphism_gives_zero() {
        let l = band(3);
        let d = GerbeDescentDatum::trivial(l.clone(), labels(3))
            .unwrap()
            .shift_transitions(&edge_values(&l, &[4, 1, -3]))
            .unwrap();
        let h = automorphism_to_cocycle(&d, &AutomorphismDatum::identity(&d).unwrap()).unwrap();
        assert!(h.is_cocycle);
        assert!(h.cochain.is_zero(&l).unwrap());
    }

    #[test]
    fn changing_connecting_morphisms_is_a_coboundary_shift() {
        let l = band(3);
        let d = GerbeDescentDatum::trivial(l.clone(), labels(3)).unwrap();
        let mut a = AutomorphismDatum::identity(&d).unwrap();
        for (k, w) in [3, -1, 4].into_iter().enumerate() {
            a.connecting[k].offset = GroupElement::from_i64s(&[w]);
        }
        let h = automorphism_to_cocycle(&d, &a).unwrap();
        assert!(h.is_cocycle);
        assert!(coboundary_witness(&l, &h.cochain).unwrap().is_some());
    }

    #[test]
    fn nonfunctorial_images_are_refused() {
        let l = band(3);
        let d = GerbeDescentDatum::trivial(l.clone(), labels(3)).unwrap();
        let mut a = AutomorphismDatum::identity(&d).unwrap();
        a.images[0].offset = GroupElement::from_i64s(&[1]);
        assert!(matches!(automorphism_to_cocycle(&d, &a), Err(DescentError::NotFunctorial(_))));
    }
}
