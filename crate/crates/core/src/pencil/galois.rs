use std::cmp::Reverse;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::degenerate::orbits;
use super::QuadricPencil;
use crate::error::{Error, Result};

/// Conjugacy data of a signed permutation: cycle lengths with the product of
/// the signs along each cycle.
///
/// Canonical order: longer cycles first, then `-1` before `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, i8)>", into = "Vec<(usize, i8)>")]
pub struct CycleSignature {
    cycles: Vec<(usize, i8)>,
}

impl TryFrom<Vec<(usize, i8)>> for CycleSignature {
    type Error = Error;
    fn try_from(cycles: Vec<(usize, i8)>) -> Result<Self> {
        CycleSignature::new(cycles)
    }
}

impl From<CycleSignature> for Vec<(usize, i8)> {
    fn from(s: CycleSignature) -> Self {
        s.cycles
    }
}

impl CycleSignature {
    pub fn new(mut cycles: Vec<(usize, i8)>) -> Result<CycleSignature> {
        if cycles.is_empty() {
            return Err(Error::InvalidInput("empty cycle signature".into()));
        }
        if let Some(c) = cycles.iter().find(|(m, s)| *m == 0 || (*s != 1 && *s != -1)) {
            return Err(Error::InvalidInput(format!("bad cycle {c:?}")));
        }
        cycles.sort_by_key(|&(m, s)| (Reverse(m), s));
        Ok(CycleSignature { cycles })
    }

    /// `n` fixed points with sign `+1`.
    pub fn trivial(n: usize) -> CycleSignature {
        CycleSignature {
            cycles: vec![(1, 1); n],
        }
    }

    pub fn cycles(&self) -> &[(usize, i8)] {
        &self.cycles
    }

    /// Number of points permuted.
    pub fn total(&self) -> usize {
        self.cycles.iter().map(|c| c.0).sum()
    }

    pub fn plus_cycles(&self) -> usize {
        self.cycles.iter().filter(|c| c.1 == 1).count()
    }

    /// Product of all cycle signs; `+1` exactly for classes of the even
    /// subgroup.
    pub fn parity(&self) -> i8 {
        self.cycles.iter().map(|c| c.1).product()
    }

    /// Trace of the k-th power on the signed permutation representation: a
    /// cycle `(m, s)` contributes `m s^(k/m)` when `m | k`.
    pub fn trace_power(&self, k: u32) -> i64 {
        let k = k as usize;
        self.cycles
            .iter()
            .filter(|(m, _)| k % m == 0)
            .map(|&(m, s)| {
                let sign = if s == -1 && (k / m) % 2 == 1 { -1 } else { 1 };
                m as i64 * sign
            })
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("signature serializes")
    }
}

impl fmt::Display for CycleSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (m, s)) in self.cycles.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({m},{})", if *s == 1 { "+1" } else { "-1" })?;
        }
        write!(f, "]")
    }
}

/// Frobenius on the five degenerate members, with ruling-swap signs.
///
/// Cycle lengths are the factor degrees of the discriminant quintic; a
/// cycle's sign is `+1` iff the ruling discriminant of its members is a
/// square in the residue field.
pub fn galois_signature(p: &QuadricPencil) -> Result<CycleSignature> {
    if !p.field().is_finite() {
        return Err(Error::UnsupportedField(
            "Galois signatures need a finite field; over Q only the trivial action is modeled"
                .into(),
        ));
    }
    let cycles = orbits(p)?
        .iter()
        .map(|o| (o.degree, o.sign.expect("finite field orbits carry a sign")))
        .collect();
    CycleSignature::new(cycles)
}

/// `q^(2k) + q^k (1 + tr(sigma^k)) + 1` for a surface over `F_q`.
pub fn predicted_count(sig: &CycleSignature, q: u64, k: u32) -> BigInt {
    let qk = BigInt::from(q).pow(k);
    &qk * &qk + &qk * (1 + sig.trace_power(k)) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    // sigma as a 6x6 integer matrix on (K, hbar_1..hbar_5), one cycle at a time
    fn matrix_trace_power(sig: &CycleSignature, k: u32) -> i64 {
        let n = 6;
        let mut m = vec![vec![0i64; n]; n];
        m[0][0] = 1;
        let mut start = 1;
        for &(len, s) in sig.cycles() {
            for j in 0..len {
                let from = start + j;
                let to = start + (j + 1) % len;
                // put the whole cycle sign on the closing edge
                m[to][from] = if j + 1 == len { s as i64 } else { 1 };
            }
            start += len;
        }
        let mut acc = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect::<Vec<_>>()).collect::<Vec<_>>();
        for _ in 0..k {
            acc = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|l| acc[i][l] * m[l][j]).sum()).collect())
                .collect();
        }
        (1..n).map(|i| acc[i][i]).sum()
    }

    #[test]
    fn predicted_examples() {
        let five_minus = CycleSignature::new(vec![(5, -1)]).unwrap();
        assert_eq!(predicted_count(&five_minus, 3, 5), BigInt::from(58078));
        assert_eq!(predicted_count(&five_minus, 3, 1), BigInt::from(13));
        assert_eq!(predicted_count(&CycleSignature::trivial(5), 5, 1), BigInt::from(56));
    }

    #[test]
    fn trace_matches_matrix_powers() {
        let sigs = [
            vec![(5, -1)],
            vec![(5, 1)],
            vec![(3, -1), (2, -1)],
            vec![(2, 1), (2, -1), (1, -1)],
            vec![(4, -1), (1, 1)],
            vec![(1, 1), (1, -1), (1, 1), (1, -1), (1, -1)],
        ];
        for s in sigs {
            let sig = CycleSignature::new(s).unwrap();
            for k in 1..=12 {
                assert_eq!(sig.trace_power(k), matrix_trace_power(&sig, k), "{sig} k={k}");
            }
        }
    }

    #[test]
    fn canonical_order_and_json() {
        let s = CycleSignature::new(vec![(1, 1), (2, -1), (2, 1)]).unwrap();
        assert_eq!(s.cycles(), &[(2, -1), (2, 1), (1, 1)]);
        let back: CycleSignature = serde_json::from_value(s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(CycleSignature::new(vec![(0, 1)]).is_err());
    }
}
