//! Linear projective geometry over ℚ and the divisor sheaves built on it.
//!
//! Everything is linear: divisors are made of hyperplanes `{f = 0}` for
//! integer linear forms `f` and of points, and rational functions are
//! degree-zero products of linear forms (times positive constants). A
//! [`Window`] fixes finitely many forms and points so that the sheaves
//! `M^l → CH^l` of the standard chart cover become finitely generated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cech::{coboundary_witness, coboundary_witness_or_certificate, is_cocycle, CechError, Cochain, WitnessOutcome};
use crate::connecting::{
    connecting_map, obstruction_quotient, validate_exact, ConnectingError, ConnectingOutput, ExactnessReport,
    ObstructionQuotient, ShortExactSequence, SheafMorphism,
};
use crate::lattice::{analyze_morphism, express_in, FGAbelianGroup, GroupElement, IntMatrix, LatticeError};
use crate::nerve::{build_nerve, Cover, Nerve, Simplex, DEFAULT_DIM_CAP};
use crate::sheaf::{constant_sheaf, AbelianSheaf, SheafError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectiveError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error(transparent)]
    Connecting(#[from] ConnectingError),
    #[error("the zero vector is not a point or a form")]
    ZeroVector,
    #[error("expected {expected} homogeneous coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("forms {0} and {1} are proportional and have no unique intersection")]
    ProportionalForms(LinearForm, LinearForm),
    #[error("rational function has total degree {0}, expected 0")]
    NotDegreeZero(BigInt),
    #[error("{0} is not in the window")]
    NotInWindow(String),
    #[error("window is not closed: {first} and {second} meet at {point}, which is missing")]
    WindowNotClosed {
        first: LinearForm,
        second: LinearForm,
        point: ProjPoint,
    },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("codimension {0} is not supported (only 1 and 2)")]
    UnsupportedCodimension(usize),
    #[error("expected a tuple of {expected} functions, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("expected data for {expected} charts, found {found}")]
    WrongChartCount { expected: usize, found: usize },
    #[error("the data on the charts of {0} cut out different cycles")]
    DifferentLoci(Simplex),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

fn primitive(mut v: Vec<BigInt>) -> Result<Vec<BigInt>, ProjectiveError> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(ProjectiveError::ZeroVector);
    }
    let negate = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in &mut v {
        *x /= &g;
        if negate {
            *x = -&*x;
        }
    }
    Ok(v)
}

fn cross(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn proportional(a: &[BigInt], b: &[BigInt]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (i + 1..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

/// A point of `P^n`: primitive integer coordinates, first nonzero one positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint(Vec<BigInt>);

impl ProjPoint {
    pub fn new(coords: Vec<BigInt>) -> Result<Self, ProjectiveError> {
        Ok(ProjPoint(primitive(coords)?))
    }

    pub fn from_i64s(coords: &[i64]) -> Result<Self, ProjectiveError> {
        Self::new(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Whether every coordinate in `open` is nonzero, i.e. the point lies in
    /// the intersection of those standard charts.
    pub fn lies_in(&self, open: &[usize]) -> bool {
        open.iter().all(|&s| !self.0[s].is_zero())
    }

    pub fn lies_on(&self, form: &LinearForm) -> bool {
        form.evaluate(self).is_zero()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ProjPoint {
    type Err = ProjectiveError;

    /// Parses `[1,1,0]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ProjectiveError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| err("expected [a,b,...]"))?;
        let coords = inner
            .split(',')
            .map(|t| t.trim().parse::<BigInt>().map_err(|_| err("bad integer")))
            .collect::<Result<Vec<_>, _>>()?;
        ProjPoint::new(coords)
    }
}

/// A nonzero integer linear form, primitive with first nonzero coefficient positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm(Vec<BigInt>);

impl LinearForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, ProjectiveError> {
        Ok(LinearForm(primitive(coeffs)?))
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self, ProjectiveError> {
        Self::new(coeffs.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The coordinate function `X_{i+1}` on `P^n`.
    pub fn coordinate(i: usize, ambient: usize) -> Self {
        let mut v = vec![BigInt::zero(); ambient + 1];
        v[i] = BigInt::one();
        LinearForm(v)
    }

    /// `X_{i+1} − X_{j+1}` for `i < j`.
    pub fn difference(i: usize, j: usize, ambient: usize) -> Self {
        let mut v = vec![BigInt::zero(); ambient + 1];
        v[i] = BigInt::one();
        v[j] = BigInt::from(-1);
        LinearForm::new(v).expect("nonzero")
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn evaluate(&self, p: &ProjPoint) -> BigInt {
        self.0.iter().zip(&p.0).map(|(a, x)| a * x).sum()
    }

    /// Index `s` when the form is the coordinate `X_{s+1}`.
    pub fn as_coordinate(&self) -> Option<usize> {
        let mut nz = self.0.iter().enumerate().filter(|(_, x)| !x.is_zero());
        let (s, _) = nz.next()?;
        nz.next().is_none().then_some(s)
    }

    /// Whether the hyperplane meets the intersection of the charts in `open`.
    pub fn meets(&self, open: &[usize]) -> bool {
        self.as_coordinate().is_none_or(|s| !open.contains(&s))
    }

    /// Parses sums like `X1 - X2`, `2X1+3X3` in `P^ambient`.
    pub fn parse(s: &str, ambient: usize) -> Result<Self, ProjectiveError> {
        let err = |reason: String| ProjectiveError::Parse {
            input: s.to_string(),
            reason,
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty form".into()));
        }
        let mut coeffs = vec![BigInt::zero(); ambient + 1];
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ => (1, rest),
            };
            let x = body.find(['X', 'x']).ok_or_else(|| err("expected a variable X1, X2, ...".into()))?;
            let coeff = match &body[..x] {
                "" => BigInt::one(),
                c => c.parse::<BigInt>().map_err(|_| err(format!("bad coefficient {c:?}")))?,
            };
            let digits_end = body[x + 1..]
                .find(|c: char| !c.is_ascii_digit())
                .map_or(body.len(), |k| x + 1 + k);
            let index: usize = body[x + 1..digits_end]
                .parse()
                .map_err(|_| err("expected a variable index".into()))?;
            if index == 0 || index > ambient + 1 {
                return Err(err(format!("variable X{index} outside X1..X{}", ambient + 1)));
            }
            coeffs[index - 1] += coeff * sign;
            rest = &body[digits_end..];
        }
        LinearForm::new(coeffs)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mag = a.abs();
            if a.is_negative() {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "X{}", k + 1)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The common zero of two non-proportional forms on `P²`.
pub fn line_intersection(f: &LinearForm, g: &LinearForm) -> Result<ProjPoint, ProjectiveError> {
    for h in [f, g] {
        if h.0.len() != 3 {
            return Err(ProjectiveError::DimensionMismatch {
                expected: 3,
                found: h.0.len(),
            });
        }
    }
    let c = cross(&f.0, &g.0);
    if c.iter().all(Zero::is_zero) {
        return Err(ProjectiveError::ProportionalForms(f.clone(), g.clone()));
    }
    ProjPoint::new(c)
}

/// A nonzero rational function `∏ c^e · ∏ f^e` with linear forms `f` of
/// total exponent zero and positive integer constants `c`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalFunctionRep {
    factors: BTreeMap<LinearForm, BigInt>,
    constants: BTreeMap<BigInt, BigInt>,
}

impl RationalFunctionRep {
    pub fn one() -> Self {
        Self::default()
    }

    /// Product of `form^exponent`; must have total degree zero.
    pub fn new(factors: impl IntoIterator<Item = (LinearForm, BigInt)>) -> Result<Self, ProjectiveError> {
        let mut map: BTreeMap<LinearForm, BigInt> = BTreeMap::new();
        for (f, e) in factors {
            *map.entry(f).or_default() += e;
        }
        map.retain(|_, e| !e.is_zero());
        let degree: BigInt = map.values().sum();
        if !degree.is_zero() {
            return Err(ProjectiveError::NotDegreeZero(degree));
        }
        Ok(RationalFunctionRep {
            factors: map,
            constants: BTreeMap::new(),
        })
    }

    /// `numerator / denominator`.
    pub fn ratio(numerator: &LinearForm, denominator: &LinearForm) -> Self {
        Self::new([(numerator.clone(), BigInt::one()), (denominator.clone(), BigInt::from(-1))])
            .expect("degree zero")
    }

    /// Multiplies by `base^exponent` for a positive integer `base > 1`.
    pub fn with_constant(mut self, base: BigInt, exponent: BigInt) -> Result<Self, ProjectiveError> {
        if base <= BigInt::one() {
            return Err(ProjectiveError::Parse {
                input: base.to_string(),
                reason: "constants must be integers greater than 1".into(),
            });
        }
        *self.constants.entry(base).or_default() += exponent;
        self.constants.retain(|_, e| !e.is_zero());
        Ok(self)
    }

    pub fn factors(&self) -> &BTreeMap<LinearForm, BigInt> {
        &self.factors
    }

    pub fn constants(&self) -> &BTreeMap<BigInt, BigInt> {
        &self.constants
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (f, e) in &other.factors {
            *out.factors.entry(f.clone()).or_default() += e;
        }
        for (c, e) in &other.constants {
            *out.constants.entry(c.clone()).or_default() += e;
        }
        out.factors.retain(|_, e| !e.is_zero());
        out.constants.retain(|_, e| !e.is_zero());
        out
    }

    pub fn inverse(&self) -> Self {
        RationalFunctionRep {
            factors: self.factors.iter().map(|(f, e)| (f.clone(), -e)).collect(),
            constants: self.constants.iter().map(|(c, e)| (c.clone(), -e)).collect(),
        }
    }
}

impl fmt::Display for RationalFunctionRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |positive: bool| -> Vec<String> {
            let consts = self
                .constants
                .iter()
                .filter(|(_, e)| e.is_positive() == positive)
                .map(|(c, e)| (c.to_string(), e.abs()));
            let forms = self
                .factors
                .iter()
                .filter(|(_, e)| e.is_positive() == positive)
                .map(|(l, e)| (format!("({l})"), e.abs()));
            consts
                .chain(forms)
                .map(|(b, e)| if e.is_one() { b } else { format!("{b}^{e}") })
                .collect()
        };
        let num = part(true);
        let den = part(false);
        if num.is_empty() {
            write!(f, "1")?;
        } else {
            write!(f, "{}", num.join("*"))?;
        }
        if !den.is_empty() {
            write!(f, "/{}", den.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RationalFunctionRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An irreducible linear cycle: a hyperplane or a point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prime {
    Hyperplane(LinearForm),
    Point(ProjPoint),
}

impl Prime {
    pub fn codimension(&self) -> usize {
        match self {
            Prime::Hyperplane(_) => 1,
            Prime::Point(p) => p.ambient_dim(),
        }
    }

    pub fn meets(&self, open: &[usize]) -> bool {
        match self {
            Prime::Hyperplane(f) => f.meets(open),
            Prime::Point(p) => p.lies_in(open),
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prime::Hyperplane(l) => write!(f, "{{{l}=0}}"),
            Prime::Point(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A formal ℤ-combination of linear cycles of one codimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Divisor {
    codimension: usize,
    terms: BTreeMap<Prime, BigInt>,
}

impl Divisor {
    pub fn zero(codimension: usize) -> Self {
        Divisor {
            codimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn prime(p: Prime) -> Self {
        let mut d = Divisor::zero(p.codimension());
        d.terms.insert(p, BigInt::one());
        d
    }

    pub fn point(p: ProjPoint) -> Self {
        Self::prime(Prime::Point(p))
    }

    pub fn hyperplane(f: LinearForm) -> Self {
        Self::prime(Prime::Hyperplane(f))
    }

    pub fn codimension(&self) -> usize {
        self.codimension
    }

    pub fn terms(&self) -> &BTreeMap<Prime, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &Prime) -> BigInt {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, p: Prime, k: &BigInt) {
        let e = self.terms.entry(p.clone()).or_default();
        *e += k;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, k) in &other.terms {
            out.add_term(p.clone(), k);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Divisor {
        let mut out = Divisor::zero(self.codimension);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), &(c * k));
        }
        out
    }

    /// Restriction to the intersection of the standard charts in `open`.
    pub fn restrict(&self, open: &[usize]) -> Divisor {
        Divisor {
            codimension: self.codimension,
            terms: self.terms.iter().filter(|(p, _)| p.meets(open)).map(|(p, k)| (p.clone(), k.clone())).collect(),
        }
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (p, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Principal divisor of `h` on all of projective space.
pub fn principal_divisor(h: &RationalFunctionRep) -> Divisor {
    let mut d = Divisor::zero(1);
    for (f, e) in &h.factors {
        d.add_term(Prime::Hyperplane(f.clone()), e);
    }
    d
}

/// Intersection product of hyperplane divisors. Proportional pairs contribute
/// nothing; distinct hyperplanes of `P¹` never meet.
fn intersect(a: &Divisor, b: &Divisor) -> Result<Divisor, ProjectiveError> {
    let mut out = Divisor::zero(2);
    for (p, x) in &a.terms {
        for (q, y) in &b.terms {
            let (Prime::Hyperplane(f), Prime::Hyperplane(g)) = (p, q) else {
                return Err(ProjectiveError::UnsupportedCodimension(p.codimension() + q.codimension()));
            };
            if f.0.len() != 3 || proportional(&f.0, &g.0) {
                continue;
            }
            out.add_term(Prime::Point(line_intersection(f, g)?), &(x * y));
        }
    }
    Ok(out)
}

/// `ch_l(h_1, …, h_l)` restricted to the intersection of the charts in `open`
/// (empty `open` means the whole space).
pub fn ch_l(h: &[RationalFunctionRep], open: &[usize]) -> Result<Divisor, ProjectiveError> {
    let d = match h {
        [a] => principal_divisor(a),
        [a, b] => intersect(&principal_divisor(a), &principal_divisor(b))?,
        _ => return Err(ProjectiveError::UnsupportedCodimension(h.len())),
    };
    Ok(d.restrict(open))
}

/// Finitely many forms, points and constants on `P^n` (`n ≤ 2`), together
/// with the standard chart cover `U_i = {X_i ≠ 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    ambient: usize,
    forms: Vec<LinearForm>,
    points: Vec<ProjPoint>,
    constants: Vec<BigInt>,
}

impl Window {
    pub fn new(
        ambient: usize,
        forms: Vec<LinearForm>,
        points: Vec<ProjPoint>,
        constants: Vec<BigInt>,
    ) -> Result<Self, ProjectiveError> {
        if ambient > 2 {
            return Err(ProjectiveError::InvalidWindow(format!("P^{ambient} is not supported")));
        }
        if ambient == 0 && !forms.is_empty() {
            return Err(ProjectiveError::InvalidWindow("a point carries no linear forms".into()));
        }
        for v in forms.iter().map(|f| &f.0).chain(points.iter().map(|p| &p.0)) {
            if v.len() != ambient + 1 {
                return Err(ProjectiveError::DimensionMismatch {
                    expected: ambient + 1,
                    found: v.len(),
                });
            }
        }
        if forms.iter().collect::<BTreeSet<_>>().len() != forms.len()
            || points.iter().collect::<BTreeSet<_>>().len() != points.len()
        {
            return Err(ProjectiveError::InvalidWindow("repeated form or point".into()));
        }
        for (k, c) in constants.iter().enumerate() {
            if *c <= BigInt::one() {
                return Err(ProjectiveError::InvalidWindow(format!("constant {c} is not greater than 1")));
            }
            if constants[..k].iter().any(|d| !c.gcd(d).is_one()) {
                return Err(ProjectiveError::InvalidWindow(format!("constant {c} is not coprime to the others")));
            }
        }
        if ambient == 2 {
            for (i, f) in forms.iter().enumerate() {
                for g in &forms[i + 1..] {
                    let p = line_intersection(f, g)?;
                    if !points.contains(&p) {
                        return Err(ProjectiveError::WindowNotClosed {
                            first: f.clone(),
                            second: g.clone(),
                            point: p,
                        });
                    }
                }
            }
        } else if !points.is_empty() {
            return Err(ProjectiveError::InvalidWindow("points of codimension 2 need P²".into()));
        }
        Ok(Window {
            ambient,
            forms,
            points,
            constants,
        })
    }

    /// The window generated by `forms` and all their pairwise intersections.
    pub fn closure(ambient: usize, forms: Vec<LinearForm>, constants: Vec<BigInt>) -> Result<Self, ProjectiveError> {
        let mut points = BTreeSet::new();
        if ambient == 2 {
            for (i, f) in forms.iter().enumerate() {
                for g in &forms[i + 1..] {
                    points.insert(line_intersection(f, g)?);
                }
            }
        }
        Window::new(ambient, forms, points.into_iter().collect(), constants)
    }

    /// `P²` with `X1, X2, X3, X1−X2, X1−X3, X2−X3` and their seven
    /// intersection points (the points with 0/1 coordinates).
    pub fn standard_p2() -> Self {
        let forms = vec![
            LinearForm::coordinate(0, 2),
            LinearForm::coordinate(1, 2),
            LinearForm::coordinate(2, 2),
            LinearForm::difference(0, 1, 2),
            LinearForm::difference(0, 2, 2),
            LinearForm::difference(1, 2, 2),
        ];
        Window::closure(2, forms, Vec::new()).expect("standard window is valid")
    }

    /// `P¹` with `X1, X2, X1−X2`.
    pub fn standard_p1() -> Self {
        let forms = vec![
            LinearForm::coordinate(0, 1),
            LinearForm::coordinate(1, 1),
            LinearForm::difference(0, 1, 1),
        ];
        Window::closure(1, forms, Vec::new()).expect("standard window is valid")
    }

    /// `Spec(k)`: one chart, no cycles, only the constants `2` and `3`.
    pub fn spec_k() -> Self {
        Window::new(0, Vec::new(), Vec::new(), vec![BigInt::from(2), BigInt::from(3)]).expect("valid")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn constants(&self) -> &[BigInt] {
        &self.constants
    }

    /// Chart labels `U1, …, U{n+1}`.
    pub fn chart_labels(&self) -> Vec<String> {
        (1..=self.ambient + 1).map(|i| format!("U{i}")).collect()
    }

    /// Nerve of the chart cover: every intersection is nonempty.
    pub fn nerve(&self) -> Nerve {
        let labels = self.chart_labels();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        build_nerve(&Cover::full(&refs), DEFAULT_DIM_CAP).expect("full cover")
    }

    /// Rank of the lattice of window functions.
    pub fn function_rank(&self) -> usize {
        self.constants.len() + self.forms.len().saturating_sub(1)
    }

    /// Basis of window functions: the constants, then `form_k / form_0` for `k ≥ 1`.
    pub fn basis_function(&self, k: usize) -> RationalFunctionRep {
        if k < self.constants.len() {
            return RationalFunctionRep::one()
                .with_constant(self.constants[k].clone(), BigInt::one())
                .expect("window constants are > 1");
        }
        let j = k - self.constants.len() + 1;
        RationalFunctionRep::ratio(&self.forms[j], &self.forms[0])
    }

    /// Coordinates of `h` on [`basis_function`](Self::basis_function).
    pub fn function_coords(&self, h: &RationalFunctionRep) -> Result<Vec<BigInt>, ProjectiveError> {
        let mut v = vec![BigInt::zero(); self.function_rank()];
        for (c, e) in &h.constants {
            let k = self
                .constants
                .iter()
                .position(|d| d == c)
                .ok_or_else(|| ProjectiveError::NotInWindow(format!("constant {c}")))?;
            v[k] += e;
        }
        for (f, e) in &h.factors {
            let k = self
                .forms
                .iter()
                .position(|g| g == f)
                .ok_or_else(|| ProjectiveError::NotInWindow(format!("form {f}")))?;
            // form_0 has exponent minus the sum of the others and no coordinate.
            if k > 0 {
                v[self.constants.len() + k - 1] += e;
            }
        }
        Ok(v)
    }

    /// Window cycles of codimension `l` meeting the charts in `open`.
    pub fn cycles_in(&self, l: usize, open: &[usize]) -> Vec<Prime> {
        match l {
            1 => self
                .forms
                .iter()
                .filter(|f| f.meets(open))
                .map(|f| Prime::Hyperplane(f.clone()))
                .collect(),
            2 if self.ambient == 2 => self
                .points
                .iter()
                .filter(|p| p.lies_in(open))
                .map(|p| Prime::Point(p.clone()))
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// Multisets of size `l` from `0..r`, as sorted vectors in lexicographic order.
fn multisets(r: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(l);
    fn go(start: usize, r: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for k in start..r {
            cur.push(k);
            go(k, r, l, cur, out);
            cur.pop();
        }
    }
    go(0, r, l, &mut cur, &mut out);
    out
}

/// `0 → Z(l) → M^l → CH^l → 0` on the chart cover of a window.
#[derive(Clone, Debug)]
pub struct WindowSequence {
    pub window: Window,
    pub l: usize,
    /// Generators of `M^l`: multisets of basis functions.
    pub monomials: Vec<Vec<usize>>,
    pub sequence: ShortExactSequence,
}

/// Builds the window sheaves for `l ∈ {1, 2}`.
pub fn symmetric_power_window(window: &Window, l: usize) -> Result<WindowSequence, ProjectiveError> {
    if !(1..=2).contains(&l) {
        return Err(ProjectiveError::UnsupportedCodimension(l));
    }
    let nerve = Arc::new(window.nerve());
    let monomials = multisets(window.function_rank(), l);
    let middle = constant_sheaf(Arc::clone(&nerve), &FGAbelianGroup::free(monomials.len()));

    let mut quotient = AbelianSheaf::new(Arc::clone(&nerve), |s| FGAbelianGroup::free(window.cycles_in(l, s.indices()).len()));
    quotient.fill_restrictions(|face, coface| {
        let from = window.cycles_in(l, face.indices());
        let to = window.cycles_in(l, coface.indices());
        let mut m = IntMatrix::zeros(to.len(), from.len());
        for (r, p) in to.iter().enumerate() {
            let c = from.iter().position(|q| q == p).expect("smaller open has fewer cycles");
            m.set(r, c, BigInt::one());
        }
        m
    })?;

    // ch_l on each monomial, per simplex.
    let mut ch_matrices: BTreeMap<Simplex, IntMatrix> = BTreeMap::new();
    for s in nerve.all_simplices() {
        let cycles = window.cycles_in(l, s.indices());
        let mut cols = Vec::with_capacity(monomials.len());
        for mono in &monomials {
            let h: Vec<_> = mono.iter().map(|&k| window.basis_function(k)).collect();
            let d = ch_l(&h, s.indices())?;
            cols.push(divisor_coords(&cycles, &d)?);
        }
        ch_matrices.insert(s.clone(), IntMatrix::from_columns(cycles.len(), &cols)?);
    }
    let projection = SheafMorphism::from_fn(&middle, &quotient, |s| ch_matrices[s].clone())?;

    // Z(l) = ker ch_l, simplex by simplex.
    let mut kernels: BTreeMap<Simplex, (FGAbelianGroup, IntMatrix)> = BTreeMap::new();
    for s in nerve.all_simplices() {
        let a = analyze_morphism(projection.at(&nerve, s)?)?;
        kernels.insert(s.clone(), (a.kernel, a.kernel_inclusion.matrix));
    }
    let mut kernel = AbelianSheaf::new(Arc::clone(&nerve), |s| kernels[s].0.clone());
    let mut restriction_err = None;
    kernel.fill_restrictions(|face, coface| {
        let (zf, incl_f) = &kernels[face];
        let (_, incl_c) = &kernels[coface];
        let cols: Vec<Vec<BigInt>> = (0..zf.generator_count())
            .map(|j| {
                let x = GroupElement(incl_f.column(j));
                match express_in(middle.group(coface).expect("in nerve"), incl_c, &x) {
                    Ok(Some(y)) => y.0,
                    _ => {
                        restriction_err.get_or_insert(coface.clone());
                        vec![BigInt::zero(); incl_c.cols()]
                    }
                }
            })
            .collect();
        IntMatrix::from_columns(incl_c.cols(), &cols).expect("consistent shapes")
    })?;
    if let Some(s) = restriction_err {
        return Err(ProjectiveError::DifferentLoci(s));
    }
    let inclusion = SheafMorphism::from_fn(&kernel, &middle, |s| kernels[s].1.clone())?;
    let sequence = ShortExactSequence::new(kernel, middle, quotient, inclusion, projection)?;
    Ok(WindowSequence {
        window: window.clone(),
        l,
        monomials,
        sequence,
    })
}

fn divisor_coords(cycles: &[Prime], d: &Divisor) -> Result<Vec<BigInt>, ProjectiveError> {
    let mut v = vec![BigInt::zero(); cycles.len()];
    for (p, k) in d.terms() {
        let i = cycles
            .iter()
            .position(|q| q == p)
            .ok_or_else(|| ProjectiveError::NotInWindow(p.to_string()))?;
        v[i] = k.clone();
    }
    Ok(v)
}

impl WindowSequence {
    pub fn nerve(&self) -> &Arc<Nerve> {
        self.sequence.nerve()
    }

    pub fn validate(&self) -> Result<ExactnessReport, ProjectiveError> {
        Ok(validate_exact(&self.sequence)?)
    }

    /// The element of `CH^l(U_s)` for a divisor supported on window cycles.
    pub fn divisor_element(&self, s: &Simplex, d: &Divisor) -> Result<GroupElement, ProjectiveError> {
        let cycles = self.window.cycles_in(self.l, s.indices());
        Ok(GroupElement(divisor_coords(&cycles, &d.restrict(s.indices()))?))
    }

    pub fn element_divisor(&self, s: &Simplex, x: &GroupElement) -> Divisor {
        let mut d = Divisor::zero(self.l);
        for (p, k) in self.window.cycles_in(self.l, s.indices()).into_iter().zip(x.coords()) {
            d.add_term(p, k);
        }
        d
    }

    /// The symmetric product `h_1 ⋯ h_l` in `M^l`.
    pub fn symmetric_product(&self, h: &[RationalFunctionRep]) -> Result<GroupElement, ProjectiveError> {
        if h.len() != self.l {
            return Err(ProjectiveError::WrongArity {
                expected: self.l,
                found: h.len(),
            });
        }
        let coords = h.iter().map(|f| self.window.function_coords(f)).collect::<Result<Vec<_>, _>>()?;
        let mut out = vec![BigInt::zero(); self.monomials.len()];
        let r = self.window.function_rank();
        let mut index = vec![0usize; self.l];
        if r == 0 {
            return Ok(GroupElement(out));
        }
        loop {
            let coeff: BigInt = index.iter().zip(&coords).map(|(&k, c)| c[k].clone()).product();
            if !coeff.is_zero() {
                let mut key = index.clone();
                key.sort_unstable();
                let m = self.monomials.binary_search(&key).expect("every multiset is a monomial");
                out[m] += coeff;
            }
            // Odometer over all index tuples.
            let mut t = 0;
            while t < self.l {
                index[t] += 1;
                if index[t] < r {
                    break;
                }
                index[t] = 0;
                t += 1;
            }
            if t == self.l {
                break;
            }
        }
        Ok(GroupElement(out))
    }

    /// An element of `M^l` as a sum of products of basis functions.
    pub fn describe_monomials(&self, x: &GroupElement) -> Vec<(BigInt, Vec<RationalFunctionRep>)> {
        x.coords()
            .iter()
            .zip(&self.monomials)
            .filter(|(k, _)| !k.is_zero())
            .map(|(k, m)| (k.clone(), m.iter().map(|&i| self.window.basis_function(i)).collect()))
            .collect()
    }
}

/// A global section of `M^l` agreeing with the local data up to `Z(l)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalWitness {
    /// `f` with `df = h`.
    pub correction: Cochain,
    /// `F = F_i − f_i`, the same on every chart.
    pub section: GroupElement,
    /// `section` as a ℤ-combination of products of basis functions.
    pub expansion: Vec<(BigInt, Vec<RationalFunctionRep>)>,
    /// The tuple of the first chart whose product equals `section`, if any.
    pub tuple: Option<Vec<RationalFunctionRep>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LciOutput {
    /// `F_i` per chart.
    pub local_products: Vec<GroupElement>,
    /// `h_ij = F_j − F_i` as a 1-cochain of `Z(l)`.
    pub cocycle: Cochain,
    pub is_cocycle: bool,
    pub global: Option<GlobalWitness>,
}

/// The cocycle `h_ij = F_j − F_i` of local equations `F_i` of one cycle.
pub fn lci_cocycle(ws: &WindowSequence, local: &[Vec<RationalFunctionRep>]) -> Result<LciOutput, ProjectiveError> {
    let nerve = Arc::clone(ws.nerve());
    let charts = nerve.simplices(0);
    if local.len() != charts.len() {
        return Err(ProjectiveError::WrongChartCount {
            expected: charts.len(),
            found: local.len(),
        });
    }
    let seq = &ws.sequence;
    let local_products = local.iter().map(|h| ws.symmetric_product(h)).collect::<Result<Vec<_>, _>>()?;
    let mut values = Vec::new();
    for e in nerve.simplices(1) {
        let [i, j] = [e.indices()[0], e.indices()[1]];
        let diff = &local_products[j] - &local_products[i];
        let iota = seq.inclusion.at(&nerve, e)?;
        let z = iota.preimage(&diff)?.ok_or_else(|| ProjectiveError::DifferentLoci(e.clone()))?;
        values.push(z);
    }
    let cocycle = Cochain::new(&seq.kernel, 1, values)?;
    let is_cocycle = is_cocycle(&seq.kernel, &cocycle)?;
    let global = match coboundary_witness(&seq.kernel, &cocycle)? {
        None => None,
        Some(f) => Some(global_witness(ws, local, &local_products, f)?),
    };
    Ok(LciOutput {
        local_products,
        cocycle,
        is_cocycle,
        global,
    })
}

fn global_witness(
    ws: &WindowSequence,
    local: &[Vec<RationalFunctionRep>],
    products: &[GroupElement],
    f: Cochain,
) -> Result<GlobalWitness, ProjectiveError> {
    let nerve = Arc::clone(ws.nerve());
    let seq = &ws.sequence;
    let mut section: Option<GroupElement> = None;
    for (k, v) in nerve.simplices(0).iter().enumerate() {
        let iota = seq.inclusion.at(&nerve, v)?;
        let candidate = &products[k] - &iota.apply(&f.values()[k])?;
        // Same ch_l as the local data on the chart.
        let pi = seq.projection.at(&nerve, v)?;
        if !pi.target.element_equal(&pi.apply(&candidate)?, &pi.apply(&products[k])?)? {
            return Err(ProjectiveError::DifferentLoci(v.clone()));
        }
        match &section {
            None => section = Some(candidate),
            Some(s) if *s == candidate => {}
            Some(_) => return Err(ProjectiveError::DifferentLoci(v.clone())),
        }
    }
    let section = section.unwrap_or_else(|| GroupElement::zero(ws.monomials.len()));
    let tuple = products.iter().position(|p| *p == section).map(|k| local[k].clone());
    Ok(GlobalWitness {
        expansion: ws.describe_monomials(&section),
        correction: f,
        section,
        tuple,
    })
}

/// Everything about the cocycle of points `c_ij = {X_i − X_j = 0} ∩ {X_k = 0}`.
#[derive(Clone, Debug)]
pub struct P2GerbeExample {
    pub window: WindowSequence,
    /// `(X_i − X_j, X_k, c_ij)` per edge `ij` of the chart nerve.
    pub intersections: Vec<(Simplex, LinearForm, LinearForm, ProjPoint)>,
    /// The 1-cochain of `CH²` with value `c_ij` on `U_ij`.
    pub cocycle: Cochain,
    /// Each `c_ij` restricted to `U_123`.
    pub triple_restrictions: Vec<Divisor>,
    pub is_cocycle: bool,
    /// Coboundary witness over the window, or a certificate that none exists.
    pub witness: WitnessOutcome,
    pub connecting: ConnectingOutput,
    pub obstruction: ObstructionQuotient,
}

pub fn p2_gerbe_example() -> Result<P2GerbeExample, ProjectiveError> {
    let window = symmetric_power_window(&Window::standard_p2(), 2)?;
    let nerve = Arc::clone(window.nerve());
    let ch2 = &window.sequence.quotient;
    let triple = Simplex::new(vec![0, 1, 2]).expect("increasing");
    let mut intersections = Vec::new();
    let mut values = Vec::new();
    let mut triple_restrictions = Vec::new();
    for e in nerve.simplices(1) {
        let [i, j] = [e.indices()[0], e.indices()[1]];
        let k = 3 - i - j;
        let diff = LinearForm::difference(i, j, 2);
        let coord = LinearForm::coordinate(k, 2);
        let p = line_intersection(&diff, &coord)?;
        let d = Divisor::point(p.clone());
        values.push(window.divisor_element(e, &d)?);
        let r = ch2.restriction(e, &triple)?;
        triple_restrictions.push(window.element_divisor(&triple, &r.apply(values.last().expect("pushed"))?));
        intersections.push((e.clone(), diff, coord, p));
    }
    let cocycle = Cochain::new(ch2, 1, values)?;
    let is_cocycle = is_cocycle(ch2, &cocycle)?;
    let witness = coboundary_witness_or_certificate(ch2, &cocycle)?;
    let connecting = connecting_map(&window.sequence, &cocycle, None)?;
    let obstruction = obstruction_quotient(&window.sequence, 1)?;
    Ok(P2GerbeExample {
        window,
        intersections,
        cocycle,
        triple_restrictions,
        is_cocycle,
        witness,
        connecting,
        obstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: &str) -> LinearForm {
        LinearForm::parse(s, 2).unwrap()
    }

    fn point(s: &str) -> ProjPoint {
        s.parse().unwrap()
    }

    #[test]
    fn normalization_is_canonical() {
        assert_eq!(ProjPoint::from_i64s(&[-2, -2, 0]).unwrap(), point("[1,1,0]"));
        assert_eq!(LinearForm::from_i64s(&[0, -3, 3]).unwrap(), form("X2-X3"));
        assert!(ProjPoint::from_i64s(&[0, 0, 0]).is_err());
    }

    #[test]
    fn parse_and_display_forms() {
        assert_eq!(form("2X1 - 2X2").to_string(), "X1-X2");
        assert_eq!(form("-X1+3X3").to_string(), "X1-3X3");
        assert!(LinearForm::parse("X4", 2).is_err());
    }

    #[test]
    fn intersections() {
        assert_eq!(line_intersection(&form("X1-X2"), &form("X3")).unwrap(), point("[1,1,0]"));
        assert_eq!(line_intersection(&form("X1"), &form("X2")).unwrap(), point("[0,0,1]"));
        assert_eq!(line_intersection(&form("X1"), &form("X1+X2")).unwrap(), point("[0,0,1]"));
        assert!(line_intersection(&form("X1"), &form("2X1")).is_err());
    }

    #[test]
    fn principal_divisor_of_ratio() {
        let h = RationalFunctionRep::ratio(&form("X1-X2"), &form("X3"));
        let d = ch_l(&[h], &[]).unwrap();
        let expect = Divisor::hyperplane(form("X1-X2")).add(&Divisor::hyperplane(form("X3")).scale(&BigInt::from(-1)));
        assert_eq!(d, expect);
    }

    #[test]
    fn ch2_of_two_ratios() {
        let a = RationalFunctionRep::ratio(&form("X1-X2"), &form("X3"));
        let b = RationalFunctionRep::ratio(&form("X1-X3"), &form("X2"));
        let d = ch_l(&[a, b], &[]).unwrap();
        let mut expect = Divisor::zero(2);
        for (p, k) in [("[1,1,1]", 1), ("[0,0,1]", -1), ("[0,1,0]", -1), ("[1,0,0]", 1)] {
            expect.add_term(Prime::Point(point(p)), &BigInt::from(k));
        }
        assert_eq!(d, expect);
    }

    #[test]
    fn repeated_line_contributes_nothing() {
        let a = RationalFunctionRep::ratio(&form("X1-X2"), &form("X3"));
        let d = ch_l(&[a.clone(), a], &[]).unwrap();
        // (a−c)·(a−c) = −2 a·c with the a·a and c·c terms dropped
        let mut expect = Divisor::zero(2);
        expect.add_term(Prime::Point(point("[1,1,0]")), &BigInt::from(-2));
        assert_eq!(d, expect);
    }

    #[test]
    fn window_closure_is_checked() {
        let err = Window::new(2, vec![form("X1"), form("X2")], vec![], vec![]);
        assert!(matches!(err, Err(ProjectiveError::WindowNotClosed { .. })));
        assert_eq!(Window::standard_p2().points().len(), 7);
    }

    #[test]
    fn standard_windows_are_exact() {
        for (w, l) in [(Window::standard_p2(), 1), (Window::standard_p2(), 2), (Window::standard_p1(), 1), (Window::standard_p1(), 2)] {
            let ws = symmetric_power_window(&w, l).unwrap();
            assert!(ws.validate().unwrap().is_valid(), "P^{} l={l}", w.ambient());
        }
    }

    #[test]
    fn symmetric_product_is_symmetric() {
        let ws = symmetric_power_window(&Window::standard_p2(), 2).unwrap();
        let a = RationalFunctionRep::ratio(&form("X1-X2"), &form("X3"));
        let b = RationalFunctionRep::ratio(&form("X1-X3"), &form("X2"));
        assert_eq!(
            ws.symmetric_product(&[a.clone(), b.clone()]).unwrap(),
            ws.symmetric_product(&[b, a]).unwrap()
        );
    }

    #[test]
    fn mismatched_local_data_is_located() {
        let ws = symmetric_power_window(&Window::standard_p2(), 2).unwrap();
        let x1 = form("X1");
        let y = vec![RationalFunctionRep::ratio(&form("X1-X2"), &x1), RationalFunctionRep::ratio(&form("X3"), &x1)];
        let other = vec![RationalFunctionRep::ratio(&form("X1-X3"), &x1), RationalFunctionRep::ratio(&form("X2"), &x1)];
        let err = lci_cocycle(&ws, &[y.clone(), other, y]).unwrap_err();
        assert!(matches!(err, ProjectiveError::DifferentLoci(_)));
    }
}
