//! Dense sets of non-negative integers `0..=max_value`.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;

/// A set of achievable sizes, e.g. the products of a multiplication table or
/// the induced-subgraph edge counts of a graph.
#[derive(Clone, PartialEq, Eq)]
pub struct SizeSet {
    bits: BitSet,
}

impl SizeSet {
    /// Empty set over `0..=max_value`.
    pub fn new(max_value: u64) -> Self {
        SizeSet {
            bits: BitSet::new(max_value as usize + 1),
        }
    }

    /// `{0}` over `0..=max_value`.
    pub fn with_zero(max_value: u64) -> Self {
        let mut s = SizeSet::new(max_value);
        s.insert(0);
        s
    }

    pub fn from_values<I: IntoIterator<Item = u64>>(max_value: u64, values: I) -> Self {
        let mut s = SizeSet::new(max_value);
        for v in values {
            s.insert(v);
        }
        s
    }

    pub(crate) fn from_bits(bits: BitSet) -> Self {
        assert!(!bits.is_empty(), "size set needs at least the value 0 in range");
        SizeSet { bits }
    }

    pub fn max_value(&self) -> u64 {
        self.bits.len() as u64 - 1
    }

    pub fn insert(&mut self, v: u64) {
        self.bits.insert(v as usize);
    }

    pub fn contains(&self, v: u64) -> bool {
        self.bits.contains(v as usize)
    }

    /// Number of values in the set.
    pub fn cardinality(&self) -> u64 {
        self.bits.count_ones() as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|v| v as u64)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut BitSet {
        &mut self.bits
    }

    /// Union with a set of the same range.
    pub fn union_with(&mut self, other: &SizeSet) {
        assert_eq!(self.max_value(), other.max_value(), "size sets over different ranges");
        self.bits.union_with(&other.bits);
    }

    /// Union with a set over any range; grows `self` if needed.
    pub fn merge(&mut self, other: &SizeSet) {
        if other.max_value() > self.max_value() {
            let mut grown = SizeSet::new(other.max_value());
            for v in self.iter() {
                grown.insert(v);
            }
            *self = grown;
        }
        if other.max_value() == self.max_value() {
            self.bits.union_with(&other.bits);
        } else {
            for v in other.iter() {
                self.insert(v);
            }
        }
    }

    pub fn is_subset(&self, other: &SizeSet) -> bool {
        if self.max_value() == other.max_value() {
            self.bits.is_subset(&other.bits)
        } else {
            self.iter().all(|v| other.contains(v))
        }
    }
}

impl std::fmt::Debug for SizeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SizeSet(max={}, ", self.max_value())?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct SizeSetRepr {
    max_value: u64,
    values: Vec<u64>,
}

impl Serialize for SizeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SizeSetRepr {
            max_value: self.max_value(),
            values: self.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SizeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SizeSetRepr::deserialize(d)?;
        if let Some(&v) = r.values.iter().find(|&&v| v > r.max_value) {
            return Err(serde::de::Error::custom(format!("value {v} > max_value {}", r.max_value)));
        }
        Ok(SizeSet::from_values(r.max_value, r.values))
    }
}
