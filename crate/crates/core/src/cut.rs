//! Linear cuts `w >= pi0 + pi · x` and permutations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `[n]`, stored 0-based as the visiting order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::Input(format!("{order:?} is not a permutation of 0..{n}")));
            }
            seen[i] = true;
        }
        Ok(Self(order))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Parses a comma-separated 1-based list such as `"5,2,3,1,4,6"`.
    pub fn from_one_based(text: &str) -> Result<Self> {
        let order = text
            .split(',')
            .map(|t| {
                let v: usize = t.trim().parse().map_err(|_| Error::Parse(format!("bad permutation entry {t:?}")))?;
                v.checked_sub(1).ok_or_else(|| Error::Parse("permutation entries are 1-based".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order)
    }

    /// Sorts `[n]` by descending `key`, ties to the lower index.
    pub fn descending_by(key: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..key.len()).collect();
        order.sort_by(|&i, &j| key[j].total_cmp(&key[i]).then(i.cmp(&j)));
        Self(order)
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `pos[i]` is the position of item `i`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (p, &i) in self.0.iter().enumerate() {
            pos[i] = p;
        }
        pos
    }

    pub fn to_one_based(&self) -> String {
        self.0.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_one_based(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutFamily {
    Epi,
    LiftedEpi,
    Ali,
    Si,
    LowerSi,
    HigherSi,
    SuperAverage,
    PolarRay,
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Epi => "epi",
            Self::LiftedEpi => "lifted-epi",
            Self::Ali => "ali",
            Self::Si => "si",
            Self::LowerSi => "lower-si",
            Self::HigherSi => "higher-si",
            Self::SuperAverage => "super-average",
            Self::PolarRay => "polar-ray",
        };
        f.write_str(s)
    }
}

/// Parameters that produced a cut.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Visiting order used by the generator (0-based items).
    pub perm: Option<Permutation>,
    /// Base set of the unlifted inequality (0-based items).
    pub base_set: Vec<usize>,
    pub i0: Option<usize>,
    /// Free-form tag, e.g. the distinguished index of a k = 2 family.
    pub note: Option<String>,
}

/// The inequality `w >= pi0 + pi · x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearCut {
    /// Coefficient of `w`; always 1 after normalization.
    pub w_coeff: f64,
    pub pi0: f64,
    pub pi: Vec<f64>,
    pub family: CutFamily,
    pub provenance: Provenance,
}

impl LinearCut {
    pub fn new(pi0: f64, pi: Vec<f64>, family: CutFamily, provenance: Provenance) -> Self {
        Self { w_coeff: 1.0, pi0, pi, family, provenance }
    }

    /// Right-hand side `pi0 + pi · x`.
    pub fn rhs(&self, x: &[f64]) -> f64 {
        self.pi0 + self.pi.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Positive when `(w, x)` violates the cut.
    pub fn violation(&self, w: f64, x: &[f64]) -> f64 {
        self.rhs(x) - w
    }

    /// Right-hand side at the indicator vector of `s`.
    pub fn rhs_at_set(&self, s: &[usize]) -> f64 {
        self.pi0 + s.iter().map(|&i| self.pi[i]).sum::<f64>()
    }

    /// Max-abs normalized `(pi0, pi)`, for duplicate detection.
    pub fn normalized(&self) -> Vec<f64> {
        let v: Vec<f64> = std::iter::once(self.pi0).chain(self.pi.iter().copied()).collect();
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            v
        } else {
            v.iter().map(|x| x / scale).collect()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cut serializes")
    }
}

impl fmt::Display for LinearCut {
    /// `w >= pi0 + c1*x1 + ...` with 6 decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w >= {:.6}", self.pi0)?;
        for (i, c) in self.pi.iter().enumerate() {
            if *c < 0.0 {
                write!(f, " - {:.6}*x{}", -c, i + 1)?;
            } else {
                write!(f, " + {:.6}*x{}", c, i + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_parsing() {
        let p: Permutation = "5,2,3,1,4,6".parse().unwrap();
        assert_eq!(p.order(), &[4, 1, 2, 0, 3, 5]);
        assert_eq!(p.to_one_based(), "5,2,3,1,4,6");
        assert_eq!(p.positions()[4], 0);
        assert!("1,1".parse::<Permutation>().is_err());
        assert!("0,1".parse::<Permutation>().is_err());
        assert!("1,x".parse::<Permutation>().is_err());
    }

    #[test]
    fn descending_ties_to_lower_index() {
        let p = Permutation::descending_by(&[0.2, 0.5, 0.5, 0.9]);
        assert_eq!(p.order(), &[3, 1, 2, 0]);
    }

    #[test]
    fn display_and_violation() {
        let c = LinearCut::new(-1.0, vec![2.0, -0.5], CutFamily::PolarRay, Provenance::default());
        assert_eq!(c.to_string(), "w >= -1.000000 + 2.000000*x1 - 0.500000*x2");
        assert_eq!(c.violation(0.0, &[1.0, 1.0]), 0.5);
        assert_eq!(c.rhs_at_set(&[0]), 1.0);
        let back: LinearCut = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
