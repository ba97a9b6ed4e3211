//! Reaction networks: species, complexes, reactions and temperings.

use std::collections::HashMap;
use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::linalg::{format_q, sub, to_f64, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("duplicate species name '{0}'")]
    DuplicateSpecies(String),
    #[error("complex has {found} coefficients but the network has {expected} species")]
    ComplexLength { expected: usize, found: usize },
    #[error("network has no reactions")]
    NoReactions,
    #[error("tempering has {found} intervals for {expected} reactions")]
    TemperingLength { expected: usize, found: usize },
    #[error("invalid rate interval [{lo}, {hi}] for reaction {reaction}")]
    BadInterval { reaction: usize, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

/// Stoichiometric coefficient vector, one exact rational per species.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complex(Vec<Q>);

impl Complex {
    pub fn new(coeffs: Vec<Q>) -> Self {
        Self(coeffs)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![Q::zero(); n])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        to_f64(&self.0)
    }

    /// Render with species names, e.g. `2X + Y`, `9/4*A`, or `0`.
    pub fn display_with<'a>(&'a self, species: &'a [Species]) -> impl fmt::Display + 'a {
        ComplexDisplay { complex: self, species }
    }
}

struct ComplexDisplay<'a> {
    complex: &'a Complex,
    species: &'a [Species],
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complex.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (c, s) in self.complex.0.iter().zip(self.species) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{}", s.name)?;
            } else if c.is_integer() && c.is_positive() {
                write!(f, "{}{}", format_q(c), s.name)?;
            } else {
                write!(f, "{}*{}", format_q(c), s.name)?;
            }
        }
        Ok(())
    }
}

/// A directed reaction between two complexes of the owning network, stored
/// as indices into [`ReactionNetwork::complexes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Reaction {
    pub source: usize,
    pub target: usize,
}

impl Reaction {
    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

/// The triple (species, complexes, reactions). Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
}

impl ReactionNetwork {
    /// Build a network. Complexes are deduplicated; `isolated` complexes that
    /// take part in no reaction are retained.
    pub fn new(
        species_names: Vec<String>,
        reactions: Vec<(Complex, Complex)>,
        isolated: Vec<Complex>,
    ) -> Result<Self, NetworkError> {
        let mut seen = HashMap::new();
        let species: Vec<Species> = species_names
            .into_iter()
            .enumerate()
            .map(|(index, name)| {
                if seen.insert(name.clone(), index).is_some() {
                    return Err(NetworkError::DuplicateSpecies(name));
                }
                Ok(Species { name, index })
            })
            .collect::<Result<_, _>>()?;
        let n = species.len();
        let mut complexes: Vec<Complex> = Vec::new();
        let mut index: HashMap<Complex, usize> = HashMap::new();
        let mut intern = |c: Complex| -> Result<usize, NetworkError> {
            if c.len() != n {
                return Err(NetworkError::ComplexLength { expected: n, found: c.len() });
            }
            if let Some(&i) = index.get(&c) {
                return Ok(i);
            }
            complexes.push(c.clone());
            index.insert(c, complexes.len() - 1);
            Ok(complexes.len() - 1)
        };
        let mut rs = Vec::with_capacity(reactions.len());
        for (s, t) in reactions {
            let source = intern(s)?;
            let target = intern(t)?;
            rs.push(Reaction { source, target });
        }
        for c in isolated {
            intern(c)?;
        }
        Ok(Self { species, complexes, reactions: rs })
    }

    /// Convenience constructor from integer coefficient rows.
    pub fn from_integer_reactions(species: &[&str], reactions: &[(&[i64], &[i64])]) -> Result<Self, NetworkError> {
        let to_c = |v: &[i64]| Complex::new(v.iter().map(|&x| Q::from_integer(x.into())).collect());
        Self::new(
            species.iter().map(|s| s.to_string()).collect(),
            reactions.iter().map(|(s, t)| (to_c(s), to_c(t))).collect(),
            Vec::new(),
        )
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn source(&self, r: usize) -> &Complex {
        &self.complexes[self.reactions[r].source]
    }

    pub fn target(&self, r: usize) -> &Complex {
        &self.complexes[self.reactions[r].target]
    }

    /// `target - source`.
    pub fn reaction_vector(&self, r: usize) -> Vec<Q> {
        sub(self.target(r).coeffs(), self.source(r).coeffs())
    }

    pub fn reaction_vectors(&self) -> Vec<Vec<Q>> {
        (0..self.reactions.len()).map(|r| self.reaction_vector(r)).collect()
    }

    /// Distinct source complexes, as complex indices in first-use order.
    pub fn source_complexes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for r in &self.reactions {
            if !out.contains(&r.source) {
                out.push(r.source);
            }
        }
        out
    }

    /// The network with every reaction reversed.
    pub fn reversed(&self) -> Self {
        Self {
            species: self.species.clone(),
            complexes: self.complexes.clone(),
            reactions: self.reactions.iter().map(|r| Reaction { source: r.target, target: r.source }).collect(),
        }
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn describe_reaction(&self, r: usize) -> String {
        format!(
            "{} -> {}",
            self.source(r).display_with(&self.species),
            self.target(r).display_with(&self.species)
        )
    }

    /// Float copy used by the numerical modules.
    pub fn to_float(&self) -> FloatNetwork {
        FloatNetwork {
            n_species: self.n_species(),
            sources: (0..self.reactions.len()).map(|r| self.source(r).to_f64()).collect(),
            fluxes: (0..self.reactions.len()).map(|r| to_f64(&self.reaction_vector(r))).collect(),
        }
    }
}

impl fmt::Display for ReactionNetwork {
    /// Serializes in the network-file grammar; the output reparses to an
    /// identical network.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "species:")?;
        for s in &self.species {
            write!(f, " {}", s.name)?;
        }
        writeln!(f)?;
        for r in 0..self.reactions.len() {
            writeln!(f, "{}", self.describe_reaction(r))?;
        }
        let used: Vec<bool> = (0..self.complexes.len())
            .map(|c| self.reactions.iter().any(|r| r.source == c || r.target == c))
            .collect();
        for (c, u) in self.complexes.iter().zip(used) {
            if !u {
                writeln!(f, "{}", c.display_with(&self.species))?;
            }
        }
        Ok(())
    }
}

/// Floating-point view of a network: sources and reaction vectors per reaction.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatNetwork {
    pub n_species: usize,
    pub sources: Vec<Vec<f64>>,
    pub fluxes: Vec<Vec<f64>>,
}

impl FloatNetwork {
    pub fn n_reactions(&self) -> usize {
        self.sources.len()
    }
}

/// A compact positive rate interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(k: f64) -> Option<Self> {
        Self::new(k, k)
    }

    pub fn contains(&self, k: f64) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// One rate interval per reaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tempering {
    intervals: Vec<Interval>,
}

impl Tempering {
    pub fn new(net: &ReactionNetwork, intervals: Vec<(f64, f64)>) -> Result<Self, NetworkError> {
        if intervals.len() != net.reactions().len() {
            return Err(NetworkError::TemperingLength { expected: net.reactions().len(), found: intervals.len() });
        }
        let intervals = intervals
            .into_iter()
            .enumerate()
            .map(|(reaction, (lo, hi))| Interval::new(lo, hi).ok_or(NetworkError::BadInterval { reaction, lo, hi }))
            .collect::<Result<_, _>>()?;
        Ok(Self { intervals })
    }

    /// Every reaction confined to `[lo, hi]`.
    pub fn uniform(net: &ReactionNetwork, lo: f64, hi: f64) -> Result<Self, NetworkError> {
        Self::new(net, vec![(lo, hi); net.reactions().len()])
    }

    /// Point intervals `{k_r}`.
    pub fn fixed(net: &ReactionNetwork, k: &[f64]) -> Result<Self, NetworkError> {
        Self::new(net, k.iter().map(|&x| (x, x)).collect())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, k: &[f64]) -> bool {
        k.len() == self.intervals.len() && self.intervals.iter().zip(k).all(|(i, &x)| i.contains(x))
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.intervals.iter().map(Interval::mid).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complexes_are_interned() {
        let net = ReactionNetwork::from_integer_reactions(&["A", "B"], &[(&[1, 0], &[0, 1]), (&[0, 1], &[1, 0])]).unwrap();
        assert_eq!(net.complexes().len(), 2);
        assert_eq!(net.reactions()[1], Reaction { source: 1, target: 0 });
    }

    #[test]
    fn self_loop_is_kept() {
        let net = ReactionNetwork::from_integer_reactions(&["A"], &[(&[1], &[1])]).unwrap();
        assert!(net.reactions()[0].is_self_loop());
        assert!(net.reaction_vector(0).iter().all(Zero::is_zero));
    }

    #[test]
    fn wrong_length_complex_rejected() {
        let err = ReactionNetwork::from_integer_reactions(&["A", "B"], &[(&[1], &[0, 1])]).unwrap_err();
        assert_eq!(err, NetworkError::ComplexLength { expected: 2, found: 1 });
    }

    #[test]
    fn duplicate_species_rejected() {
        let err = ReactionNetwork::from_integer_reactions(&["A", "A"], &[]).unwrap_err();
        assert_eq!(err, NetworkError::DuplicateSpecies("A".into()));
    }

    #[test]
    fn tempering_validation() {
        let net = ReactionNetwork::from_integer_reactions(&["A"], &[(&[1], &[0])]).unwrap();
        assert!(Tempering::new(&net, vec![(1.0, 2.0)]).is_ok());
        assert!(Tempering::new(&net, vec![(0.0, 2.0)]).is_err());
        assert!(Tempering::new(&net, vec![(3.0, 2.0)]).is_err());
        assert!(Tempering::new(&net, vec![]).is_err());
    }
}
