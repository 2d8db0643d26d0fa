//! Certificates: a claim about a cochain of a named scene sheaf, the verdict,
//! and evidence that can be re-checked from the scene alone.

use cech::cech::{coboundary, coboundary_witness_or_certificate, is_cocycle, witness_system, Cochain, WitnessOutcome};
use cech::connecting::{validate_exact, validate_extension};
use cech::lattice::IntegerInfeasibility;
use cech::projective::Window;
use cech::sheaf::AbelianSheaf;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::int::Int;
use crate::scene::{read_cochain, values_doc, Scene, ValueDoc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    Cocycle,
    ClassTrivial,
    ClassNontrivialInWindow,
    Exactness,
    Independence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    Refuted,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Verified
        } else {
            Verdict::Refuted
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Evidence {
    /// The nonzero values of `dω`; empty exactly when `ω` is a cocycle.
    Boundary { nonzero: Vec<ValueDoc> },
    /// `dη = ω`.
    Coboundary { eta: Vec<ValueDoc> },
    /// A multiplier row against the witness system of the sheaf in this degree.
    Infeasibility { multiplier: Vec<Int>, modulus: Int },
    /// Issues found by re-running the exactness checks.
    Exactness { issues: Vec<String> },
    /// Evidence about `ω − other`.
    Difference { other: Vec<ValueDoc>, proof: Box<Evidence> },
}

/// Which truncated model a class statement refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowStamp {
    pub ambient: Int,
    pub forms: Vec<String>,
    pub points: Vec<String>,
    pub constants: Vec<Int>,
    pub scope: String,
}

pub const WINDOW_SCOPE: &str = "statement about the sheaves generated by the listed cycles and functions; \
the corresponding statement for all cycles and rational functions is not checked";

impl WindowStamp {
    pub fn of(window: &Window) -> Self {
        WindowStamp {
            ambient: Int::from(window.ambient()),
            forms: window.forms().iter().map(|f| f.to_string()).collect(),
            points: window.points().iter().map(|p| p.to_string()).collect(),
            constants: window.constants().iter().map(Int::from).collect(),
            scope: WINDOW_SCOPE.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub claim: ClaimKind,
    pub verdict: Verdict,
    pub subject: String,
    pub inputs_digest: String,
    /// Scene sheaf, sequence or extension the claim is about.
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cochain: Option<Vec<ValueDoc>>,
    pub evidence: Evidence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowStamp>,
}

/// Context shared by the certificates of one run.
pub struct Issuer<'a> {
    pub scene: &'a Scene,
    pub window: Option<WindowStamp>,
}

impl Issuer<'_> {
    fn base(&self, claim: ClaimKind, verdict: Verdict, subject: &str, target: &str, evidence: Evidence) -> Certificate {
        Certificate {
            claim,
            verdict,
            subject: subject.into(),
            inputs_digest: self.scene.digest.clone(),
            target: target.into(),
            degree: None,
            cochain: None,
            evidence,
            window: self.window.clone(),
        }
    }

    fn about(&self, mut cert: Certificate, sheaf: &AbelianSheaf, omega: &Cochain) -> Certificate {
        cert.degree = Some(Int::from(omega.degree()));
        cert.cochain = Some(values_doc(sheaf.nerve(), omega));
        cert
    }

    /// Whether `omega` is a cocycle of the scene sheaf `name`.
    pub fn cocycle(&self, subject: &str, name: &str, omega: &Cochain) -> Result<Certificate, CliError> {
        let sheaf = self.scene.sheaf(name, subject)?;
        let nonzero = nonzero_boundary(sheaf, omega)?;
        let verdict = Verdict::from_bool(nonzero.is_empty());
        let cert = self.base(ClaimKind::Cocycle, verdict, subject, name, Evidence::Boundary { nonzero });
        Ok(self.about(cert, sheaf, omega))
    }

    /// States whichever of "trivial" and "nontrivial" holds, with evidence.
    pub fn class(&self, subject: &str, name: &str, omega: &Cochain) -> Result<Certificate, CliError> {
        let (trivial, evidence) = self.class_evidence(name, omega)?;
        let claim = if trivial {
            ClaimKind::ClassTrivial
        } else {
            ClaimKind::ClassNontrivialInWindow
        };
        self.class_claim(claim, subject, name, omega, trivial, evidence)
    }

    /// Checks the stated `claim` about the class of `omega`.
    pub fn class_expecting(&self, claim: ClaimKind, subject: &str, name: &str, omega: &Cochain) -> Result<Certificate, CliError> {
        let (trivial, evidence) = self.class_evidence(name, omega)?;
        self.class_claim(claim, subject, name, omega, trivial, evidence)
    }

    fn class_claim(
        &self,
        claim: ClaimKind,
        subject: &str,
        name: &str,
        omega: &Cochain,
        trivial: bool,
        evidence: Evidence,
    ) -> Result<Certificate, CliError> {
        let sheaf = self.scene.sheaf(name, subject)?;
        let holds = match claim {
            ClaimKind::ClassTrivial => trivial,
            ClaimKind::ClassNontrivialInWindow => !trivial,
            _ => unreachable!("not a class claim"),
        };
        let cert = self.base(claim, Verdict::from_bool(holds), subject, name, evidence);
        Ok(self.about(cert, sheaf, omega))
    }

    fn class_evidence(&self, name: &str, omega: &Cochain) -> Result<(bool, Evidence), CliError> {
        let sheaf = self.scene.sheaf(name, name)?;
        Ok(match coboundary_witness_or_certificate(sheaf, omega).map_err(CliError::compute)? {
            WitnessOutcome::Witness(eta) => (
                true,
                Evidence::Coboundary {
                    eta: values_doc(sheaf.nerve(), &eta),
                },
            ),
            WitnessOutcome::NoWitness(cert) => (false, infeasibility_doc(&cert)),
        })
    }

    /// Whether `omega` and `other` have the same class.
    pub fn independence(&self, subject: &str, name: &str, omega: &Cochain, other: &Cochain) -> Result<Certificate, CliError> {
        let sheaf = self.scene.sheaf(name, subject)?;
        let diff = omega.sub(other).map_err(CliError::compute)?;
        let (same, proof) = self.class_evidence(name, &diff)?;
        let evidence = Evidence::Difference {
            other: values_doc(sheaf.nerve(), other),
            proof: Box::new(proof),
        };
        let cert = self.base(ClaimKind::Independence, Verdict::from_bool(same), subject, name, evidence);
        Ok(self.about(cert, sheaf, omega))
    }

    pub fn exactness_of_sequence(&self, name: &str) -> Result<Certificate, CliError> {
        let issues = sequence_issues(self.scene, name)?;
        let verdict = Verdict::from_bool(issues.is_empty());
        Ok(self.base(
            ClaimKind::Exactness,
            verdict,
            &format!("sequence {name} is exact"),
            name,
            Evidence::Exactness { issues },
        ))
    }

    pub fn exactness_of_extension(&self, name: &str) -> Result<Certificate, CliError> {
        let issues = extension_issues(self.scene, name)?;
        let verdict = Verdict::from_bool(issues.is_empty());
        Ok(self.base(
            ClaimKind::Exactness,
            verdict,
            &format!("extension {name} is exact"),
            name,
            Evidence::Exactness { issues },
        ))
    }
}

fn infeasibility_doc(cert: &IntegerInfeasibility) -> Evidence {
    Evidence::Infeasibility {
        multiplier: cert.multiplier.iter().map(Int::from).collect(),
        modulus: Int::from(&cert.modulus),
    }
}

fn nonzero_boundary(sheaf: &AbelianSheaf, omega: &Cochain) -> Result<Vec<ValueDoc>, CliError> {
    let d = coboundary(sheaf, omega).map_err(CliError::compute)?;
    let nerve = sheaf.nerve();
    let mut out = Vec::new();
    for (s, v) in nerve.simplices(d.degree()).iter().zip(values_doc(nerve, &d)) {
        if !sheaf.group(s).expect("own nerve").is_zero(&crate::int::element(&v.value)).map_err(CliError::compute)? {
            out.push(v);
        }
    }
    Ok(out)
}

fn sequence_issues(scene: &Scene, name: &str) -> Result<Vec<String>, CliError> {
    let seq = scene.sequence(name, "target")?;
    let report = validate_exact(seq).map_err(CliError::compute)?;
    Ok(report.issues.iter().map(|i| i.to_string()).collect())
}

fn extension_issues(scene: &Scene, name: &str) -> Result<Vec<String>, CliError> {
    let ext = scene.extension(name, "target")?;
    let report = validate_extension(ext).map_err(CliError::compute)?;
    Ok(report.issues.iter().map(|i| i.to_string()).collect())
}

/// Result of re-checking one certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Confirmed,
    Mismatch(String),
}

fn mismatch(reason: impl Into<String>) -> Result<Check, CliError> {
    Ok(Check::Mismatch(reason.into()))
}

/// Re-checks `cert` against `scene` without trusting anything but the
/// evidence it carries.
pub fn check(scene: &Scene, cert: &Certificate) -> Result<Check, CliError> {
    if cert.inputs_digest != scene.digest {
        return mismatch(format!("certificate is for scene {}, not {}", cert.inputs_digest, scene.digest));
    }
    if cert.claim == ClaimKind::Exactness {
        let Evidence::Exactness { issues } = &cert.evidence else {
            return mismatch("exactness needs exactness evidence");
        };
        let found = if scene.sequences.contains_key(&cert.target) {
            sequence_issues(scene, &cert.target)?
        } else {
            extension_issues(scene, &cert.target)?
        };
        if &found != issues {
            return mismatch("recorded issues differ from a fresh check");
        }
        return Ok(verdict_agrees(cert.verdict, found.is_empty()));
    }

    let sheaf = scene.sheaf(&cert.target, "target")?;
    let (Some(degree), Some(values)) = (&cert.degree, &cert.cochain) else {
        return mismatch("claim needs a degree and a cochain");
    };
    let degree = degree.to_usize("degree")?;
    let omega = read_cochain(sheaf, degree, values, "cochain")?;
    if cert.claim == ClaimKind::Cocycle {
        let Evidence::Boundary { nonzero } = &cert.evidence else {
            return mismatch("cocycle claims carry the boundary");
        };
        let found = nonzero_boundary(sheaf, &omega)?;
        if &found != nonzero {
            return mismatch("recorded boundary differs from a fresh computation");
        }
        return Ok(verdict_agrees(cert.verdict, found.is_empty()));
    }

    let (subject_cochain, proof) = match (&cert.claim, &cert.evidence) {
        (ClaimKind::Independence, Evidence::Difference { other, proof }) => {
            let other = read_cochain(sheaf, degree, other, "evidence.other")?;
            (omega.sub(&other).map_err(CliError::compute)?, proof.as_ref())
        }
        (ClaimKind::Independence, _) => return mismatch("independence claims carry a difference"),
        (_, e) => (omega, e),
    };
    let trivial = match class_from_evidence(sheaf, &subject_cochain, proof)? {
        Ok(t) => t,
        Err(reason) => return mismatch(reason),
    };
    let holds = match cert.claim {
        ClaimKind::ClassTrivial | ClaimKind::Independence => trivial,
        ClaimKind::ClassNontrivialInWindow => !trivial,
        ClaimKind::Cocycle | ClaimKind::Exactness => unreachable!("handled above"),
    };
    Ok(verdict_agrees(cert.verdict, holds))
}

fn verdict_agrees(verdict: Verdict, holds: bool) -> Check {
    if verdict == Verdict::from_bool(holds) {
        Check::Confirmed
    } else {
        Check::Mismatch(format!("the evidence shows the claim {}", if holds { "holds" } else { "fails" }))
    }
}

/// Decides from the evidence alone whether the class of `omega` is zero.
fn class_from_evidence(sheaf: &AbelianSheaf, omega: &Cochain, evidence: &Evidence) -> Result<Result<bool, String>, CliError> {
    match evidence {
        Evidence::Coboundary { eta } => {
            if omega.degree() == 0 {
                return Ok(Err("degree-0 classes have no coboundary witness".into()));
            }
            let eta = read_cochain(sheaf, omega.degree() - 1, eta, "evidence.eta")?;
            let d = coboundary(sheaf, &eta).map_err(CliError::compute)?;
            if d.equals(sheaf, omega).map_err(CliError::compute)? {
                Ok(Ok(true))
            } else {
                Ok(Err("dη differs from the cochain".into()))
            }
        }
        Evidence::Infeasibility { multiplier, modulus } => {
            if omega.degree() == 0 {
                return Ok(Err("degree-0 classes have no witness system".into()));
            }
            if !is_cocycle(sheaf, omega).map_err(CliError::compute)? {
                return Ok(Err("the cochain is not a cocycle".into()));
            }
            let cert = IntegerInfeasibility {
                multiplier: multiplier.iter().map(|x| x.0.clone()).collect(),
                modulus: modulus.0.clone(),
            };
            let system = witness_system(sheaf, omega.degree()).map_err(CliError::compute)?;
            if cert.verify(&system, &omega.flatten()) {
                Ok(Ok(false))
            } else {
                Ok(Err("the multiplier does not refute the witness system".into()))
            }
        }
        _ => Ok(Err("class claims carry a coboundary or an infeasibility proof".into())),
    }
}
