use std::fmt;

use cech::lattice::{GroupElement, IntMatrix};
use cech::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// An integer written as a decimal string. Plain JSON numbers are accepted
/// on input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Int(pub BigInt);

impl Int {
    pub fn to_usize(&self, at: &str) -> Result<usize, CliError> {
        usize::try_from(&self.0).map_err(|_| CliError::invalid(at, format!("expected a non-negative count, found {}", self.0)))
    }
}

impl From<usize> for Int {
    fn from(n: usize) -> Self {
        Int(BigInt::from(n))
    }
}

impl From<&BigInt> for Int {
    fn from(n: &BigInt) -> Self {
        Int(n.clone())
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "an integer as a decimal string")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        let digits = v.strip_prefix('-').unwrap_or(v);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(E::custom(format!("`{v}` is not a decimal integer")));
        }
        v.parse().map(Int).map_err(|_| E::custom(format!("`{v}` is not a decimal integer")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        Ok(Int(BigInt::from(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int(BigInt::from(v)))
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

pub fn vector(x: &GroupElement) -> Vec<Int> {
    x.coords().iter().map(Int::from).collect()
}

pub fn element(v: &[Int]) -> GroupElement {
    GroupElement(v.iter().map(|x| x.0.clone()).collect())
}

/// Rows of `m`.
pub fn matrix_rows(m: &IntMatrix) -> Vec<Vec<Int>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(Int::from).collect()).collect()
}

/// Reads a `rows × cols` matrix given row by row.
pub fn read_matrix(rows: &[Vec<Int>], shape: (usize, usize), at: &str) -> Result<IntMatrix, CliError> {
    if rows.len() != shape.0 {
        return Err(CliError::invalid(at, format!("expected {} rows, found {}", shape.0, rows.len())));
    }
    let mut data = Vec::with_capacity(shape.0 * shape.1);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(CliError::invalid(
                format!("{at}[{i}]"),
                format!("expected {} entries, found {}", shape.1, row.len()),
            ));
        }
        data.extend(row.iter().map(|x| x.0.clone()));
    }
    Ok(IntMatrix::new(shape.0, shape.1, data).expect("shape checked"))
}
