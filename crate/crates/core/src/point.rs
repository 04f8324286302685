use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A data, parameter or auxiliary value of dimension one or two.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 2],
    dim: u8,
}

impl Point {
    pub fn scalar(x: f64) -> Self {
        Self { coords: [x, 0.0], dim: 1 }
    }

    pub fn pair(a: f64, b: f64) -> Self {
        Self { coords: [a, b], dim: 2 }
    }

    pub fn from_slice(values: &[f64]) -> Option<Self> {
        match values {
            [x] => Some(Self::scalar(*x)),
            [a, b] => Some(Self::pair(*a, *b)),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// First coordinate.
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn get(&self, i: usize) -> f64 {
        assert!(i < self.dim(), "coordinate {i} out of range");
        self.coords[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim()]
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    pub fn l2(&self) -> f64 {
        self.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn linf(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Self::scalar(x)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            1 => write!(f, "{}", self.coords[0]),
            _ => write!(f, "({}, {})", self.coords[0], self.coords[1]),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for v in self.as_slice() {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct PointVisitor;
        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an array of one or two numbers")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Point, E> {
                Ok(Point::scalar(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Point, E> {
                Ok(Point::scalar(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Point, E> {
                Ok(Point::scalar(v as f64))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point, A::Error> {
                let mut v = Vec::new();
                while let Some(x) = seq.next_element::<f64>()? {
                    v.push(x);
                }
                Point::from_slice(&v).ok_or_else(|| de::Error::invalid_length(v.len(), &self))
            }
        }
        d.deserialize_any(PointVisitor)
    }
}
