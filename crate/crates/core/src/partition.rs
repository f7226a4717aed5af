//! Summands, finished partitions and the condensate observables.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// A degenerate energy state: a nonempty multiset over colors `1..=d`,
/// stored as per-color counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnergyState {
    counts: Vec<u64>,
}

impl EnergyState {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::OutOfRange("energy state needs at least one color".into()));
        }
        if counts.iter().all(|&c| c == 0) {
            return Err(Error::OutOfRange("energy state must be nonempty".into()));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn colors(&self) -> usize {
        self.counts.len()
    }

    /// Total number of atoms, i.e. the energy of the state.
    pub fn cardinality(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Every state of cardinality `k` over `d` colors, in increasing order.
    pub fn all_with_cardinality(k: u64, d: usize) -> Vec<EnergyState> {
        let mut out = Vec::new();
        if k == 0 || d == 0 {
            return out;
        }
        let mut counts = vec![0u64; d];
        fill_compositions(k, 0, &mut counts, &mut out);
        out.sort();
        out
    }
}

fn fill_compositions(rest: u64, pos: usize, counts: &mut Vec<u64>, out: &mut Vec<EnergyState>) {
    if pos + 1 == counts.len() {
        counts[pos] = rest;
        out.push(EnergyState {
            counts: counts.clone(),
        });
        return;
    }
    for c in 0..=rest {
        counts[pos] = c;
        fill_compositions(rest - c, pos + 1, counts, out);
    }
}

impl fmt::Display for EnergyState {
    /// Multiset notation, e.g. `{1,1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (color, &count) in self.counts.iter().enumerate() {
            for _ in 0..count {
                if !first {
                    f.write_str(",")?;
                }
                write!(f, "{}", color + 1)?;
                first = false;
            }
        }
        f.write_str("}")
    }
}

/// The type of a summand within its size class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SummandType {
    /// Type index in `1..=b_k` for polynomial-weight classes.
    Index(u64),
    /// Colored multiset for colored classes.
    State(EnergyState),
}

/// One part of a weighted partition: a size and a type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Summand {
    size: u64,
    kind: SummandType,
}

impl Summand {
    pub fn indexed(size: u64, index: u64) -> Result<Self> {
        if size == 0 || index == 0 {
            return Err(Error::OutOfRange(format!(
                "summand size {size} and type index {index} must be positive"
            )));
        }
        Ok(Self {
            size,
            kind: SummandType::Index(index),
        })
    }

    pub fn colored(state: EnergyState) -> Self {
        Self {
            size: state.cardinality(),
            kind: SummandType::State(state),
        }
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn kind(&self) -> &SummandType {
        &self.kind
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SummandType::Index(i) => write!(f, "{}#{}", self.size, i),
            SummandType::State(s) => write!(f, "{s}"),
        }
    }
}

/// A weighted partition: summands with positive multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: BTreeMap<Summand, u64>,
    size: u64,
    width: u64,
}

impl Partition {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a partition, merging repeated summands.
    pub fn from_parts<I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Summand, u64)>,
    {
        let mut out = Self::empty();
        for (summand, mult) in parts {
            if mult == 0 {
                return Err(Error::OutOfRange(format!(
                    "summand {summand} given multiplicity 0"
                )));
            }
            out.add(summand, mult);
        }
        Ok(out)
    }

    /// Adds `mult` copies of `summand`. Zero multiplicity is a no-op.
    pub fn add(&mut self, summand: Summand, mult: u64) {
        if mult == 0 {
            return;
        }
        self.size += mult * summand.size;
        self.width += mult;
        *self.parts.entry(summand).or_insert(0) += mult;
    }

    /// Total size `sum(multiplicity * summand size)`, cached.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Size recomputed from the parts.
    pub fn recompute_size(&self) -> u64 {
        self.parts.iter().map(|(s, &m)| s.size * m).sum()
    }

    /// Number of summands counted with multiplicity; for condensates this is
    /// the number of excited particles (the Young-diagram width).
    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Summand, u64)> {
        self.parts.iter().map(|(s, &m)| (s, m))
    }

    pub fn distinct_summands(&self) -> usize {
        self.parts.len()
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        CanonicalKey(self.parts.iter().map(|(s, &m)| (s.clone(), m)).collect())
    }

    /// Fraction of `particles` in their ground state: `(m - width) / m`.
    pub fn ground_state_fraction(&self, particles: u64) -> Result<Ratio<u64>> {
        if particles == 0 || particles < self.width {
            return Err(Error::OutOfRange(format!(
                "particle count {particles} below partition width {}",
                self.width
            )));
        }
        Ok(Ratio::new(particles - self.width, particles))
    }
}

/// Total-order key identifying a partition; the sorted `(summand, multiplicity)` list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<(Summand, u64)>);

impl CanonicalKey {
    pub fn entries(&self) -> &[(Summand, u64)] {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (s, m)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if *m == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{m}")?;
            }
        }
        f.write_str("]")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.canonical_key().fmt(f)
    }
}
