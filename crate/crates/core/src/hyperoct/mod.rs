//! The hyperoctahedral group B₅ of signed permutations of five pairs, its even
//! subgroup D₅, the splitting B₅ = D₅ × ⟨c⟩, and the fiber-product model of
//! the automorphism group of the surface.

mod fiber;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pencil::CycleSignature;
use crate::wpline::{all_perms5, Perm5};

pub use fiber::{aut0_matrices, fiber_product, is_closed, retract_fiber, sign_matrix, FiberElement};

/// `(sigma, eps)` acting on pairs `(i, s)` by `(sigma(i), s * eps[sigma(i)])`.
///
/// Signs are a bitmask: bit `j` set means `eps[j] = -1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    perm: Perm5,
    signs: u8,
}

pub const ORDER_B5: usize = 3840;

impl SignedPerm {
    pub fn new(perm: Perm5, signs: [i8; 5]) -> Result<SignedPerm> {
        let mut seen = [false; 5];
        for &i in &perm {
            if i >= 5 || std::mem::replace(&mut seen[i as usize], true) {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
            }
        }
        let mut mask = 0;
        for (j, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => mask |= 1 << j,
                _ => return Err(Error::InvalidInput(format!("sign {s} is not +-1"))),
            }
        }
        Ok(SignedPerm { perm, signs: mask })
    }

    pub fn from_mask(perm: Perm5, signs: u8) -> SignedPerm {
        debug_assert!(signs < 32);
        SignedPerm { perm, signs }
    }

    pub fn identity() -> SignedPerm {
        SignedPerm {
            perm: [0, 1, 2, 3, 4],
            signs: 0,
        }
    }

    /// The central element flipping every sign.
    pub fn central() -> SignedPerm {
        SignedPerm {
            perm: [0, 1, 2, 3, 4],
            signs: 0b11111,
        }
    }

    pub fn perm(&self) -> Perm5 {
        self.perm
    }

    pub fn sign(&self, j: usize) -> i8 {
        if self.signs >> j & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> [i8; 5] {
        std::array::from_fn(|j| self.sign(j))
    }

    pub fn sign_mask(&self) -> u8 {
        self.signs
    }

    /// Image of the pair `(i, s)`.
    pub fn act(&self, i: usize, s: i8) -> (usize, i8) {
        let j = self.perm[i] as usize;
        (j, s * self.sign(j))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let perm = std::array::from_fn(|i| self.perm[other.perm[i] as usize]);
        // eta_j = eps_j * delta_{sigma^-1(j)}; as masks, moved bits xor
        let mut moved = 0u8;
        for i in 0..5 {
            moved |= (other.signs >> i & 1) << self.perm[i];
        }
        SignedPerm {
            perm,
            signs: self.signs ^ moved,
        }
    }

    pub fn inverse(&self) -> SignedPerm {
        let mut perm = [0u8; 5];
        for i in 0..5 {
            perm[self.perm[i] as usize] = i as u8;
        }
        // delta_i = eps_{sigma(i)}
        let mut signs = 0u8;
        for i in 0..5 {
            signs |= (self.signs >> self.perm[i] & 1) << i;
        }
        SignedPerm { perm, signs }
    }

    /// Parity as a permutation of the ten points `(i, s)`: the number of
    /// `-1` signs mod 2.
    pub fn is_even(&self) -> bool {
        self.signs.count_ones() % 2 == 0
    }

    /// The projection B₅ → D₅ along the central element.
    pub fn retract(&self) -> SignedPerm {
        if self.is_even() {
            *self
        } else {
            SignedPerm::central().compose(self)
        }
    }

    /// Position in `0..3840`: permutation rank times 32 plus the sign mask.
    pub fn index(&self) -> usize {
        let mut rank = 0;
        let mut used = [false; 5];
        for (pos, &x) in self.perm.iter().enumerate() {
            let smaller = (0..x).filter(|&y| !used[y as usize]).count();
            rank += smaller * FACT[4 - pos];
            used[x as usize] = true;
        }
        rank * 32 + self.signs as usize
    }

    pub fn from_index(idx: usize) -> SignedPerm {
        assert!(idx < ORDER_B5);
        SignedPerm {
            perm: all_perms5()[idx / 32],
            signs: (idx % 32) as u8,
        }
    }

    /// All 3840 elements in index order.
    pub fn all() -> Vec<SignedPerm> {
        all_perms5()
            .into_iter()
            .flat_map(|perm| (0..32u8).map(move |signs| SignedPerm { perm, signs }))
            .collect()
    }

    /// The 1920 even elements in index order.
    pub fn all_even() -> Vec<SignedPerm> {
        SignedPerm::all().into_iter().filter(SignedPerm::is_even).collect()
    }

    /// Cycles of the underlying permutation with the product of the signs
    /// met along each cycle.
    pub fn cycle_signature(&self) -> CycleSignature {
        let mut seen = [false; 5];
        let mut cycles = Vec::new();
        for start in 0..5 {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut sign = 1i8;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                len += 1;
                sign *= self.sign(i);
                i = self.perm[i] as usize;
            }
            cycles.push((len, sign));
        }
        CycleSignature::new(cycles).expect("cycles of a permutation")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SignedPermJson::from(*self)).expect("serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<SignedPerm> {
        let j: SignedPermJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        j.try_into()
    }
}

const FACT: [usize; 5] = [1, 1, 2, 6, 24];

/// JSON shape: permutation of `1..=5` and signs `+-1`.
#[derive(Serialize, Deserialize)]
struct SignedPermJson {
    perm: Vec<u8>,
    signs: Vec<i8>,
}

impl From<SignedPerm> for SignedPermJson {
    fn from(s: SignedPerm) -> Self {
        SignedPermJson {
            perm: s.perm.iter().map(|&i| i + 1).collect(),
            signs: s.signs().to_vec(),
        }
    }
}

impl TryFrom<SignedPermJson> for SignedPerm {
    type Error = Error;
    fn try_from(j: SignedPermJson) -> Result<Self> {
        let perm: Perm5 = j
            .perm
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| Error::Parse("perm is 1-based".into())))
            .collect::<Result<Vec<_>>>()?
            .try_into()
            .map_err(|_| Error::Parse("perm needs 5 entries".into()))?;
        let signs: [i8; 5] = j
            .signs
            .try_into()
            .map_err(|_| Error::Parse("signs need 5 entries".into()))?;
        SignedPerm::new(perm, signs)
    }
}

impl fmt::Debug for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..5 {
            let s = if self.sign(self.perm[i] as usize) < 0 { "-" } else { "" };
            write!(f, "{}{}{}", if i > 0 { " " } else { "" }, s, self.perm[i] + 1)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // the ten points (i, s) numbered 2i + (s < 0)
    fn ten_point_parity(a: &SignedPerm) -> bool {
        let img: Vec<usize> = (0..10)
            .map(|x| {
                let (j, s) = a.act(x / 2, if x % 2 == 0 { 1 } else { -1 });
                2 * j + usize::from(s < 0)
            })
            .collect();
        let mut seen = [false; 10];
        let mut transpositions = 0;
        for start in 0..10 {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = img[i];
                len += 1;
            }
            transpositions += len.max(1) - 1;
        }
        transpositions % 2 == 0
    }

    #[test]
    fn central_element() {
        let c = SignedPerm::central();
        assert_eq!(c.compose(&c), SignedPerm::identity());
        assert!(!c.is_even());
        assert_eq!(c.retract(), SignedPerm::identity());
        for a in SignedPerm::all() {
            assert_eq!(c.compose(&a), a.compose(&c));
        }
    }

    #[test]
    fn parity_examples() {
        assert!(SignedPerm::identity().is_even());
        let flip = SignedPerm::new([0, 1, 2, 3, 4], [-1, 1, 1, 1, 1]).unwrap();
        assert!(!flip.is_even());
        assert!(!ten_point_parity(&flip));
        let pure = SignedPerm::new([1, 0, 2, 3, 4], [1; 5]).unwrap();
        assert!(pure.is_even() && ten_point_parity(&pure));
    }

    #[test]
    fn action_is_compatible_with_composition() {
        let all = SignedPerm::all();
        for (k, a) in all.iter().enumerate().step_by(37) {
            for b in all.iter().skip(k % 11).step_by(53) {
                let ab = a.compose(b);
                for i in 0..5 {
                    for s in [1, -1] {
                        let (j, t) = b.act(i, s);
                        assert_eq!(ab.act(i, s), a.act(j, t));
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_structure() {
        let all = SignedPerm::all();
        assert_eq!(all.len(), ORDER_B5);
        let mut idx: Vec<usize> = all.iter().map(SignedPerm::index).collect();
        idx.dedup();
        assert_eq!(idx, (0..ORDER_B5).collect::<Vec<_>>());
        for a in &all {
            assert_eq!(SignedPerm::from_index(a.index()), *a);
            assert_eq!(a.is_even(), ten_point_parity(a));
            assert_eq!(a.compose(&a.inverse()), SignedPerm::identity());
            assert_eq!(a.inverse().compose(a), SignedPerm::identity());
        }
        assert_eq!(SignedPerm::all_even().len(), 1920);
    }

    #[test]
    fn even_subgroup_projects_onto_s5_with_kernel_16() {
        let even = SignedPerm::all_even();
        let mut images: Vec<Perm5> = even.iter().map(SignedPerm::perm).collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 120);
        let kernel = even.iter().filter(|a| a.perm() == [0, 1, 2, 3, 4]).count();
        assert_eq!(kernel, 16);
    }

    #[test]
    fn signature_parity() {
        for a in SignedPerm::all() {
            assert_eq!(a.cycle_signature().parity() == 1, a.is_even());
            assert_eq!(a.cycle_signature().total(), 5);
        }
    }

    #[test]
    fn json_round_trip() {
        let a = SignedPerm::new([2, 0, 1, 4, 3], [1, -1, 1, -1, 1]).unwrap();
        assert_eq!(SignedPerm::from_json(&a.to_json()).unwrap(), a);
        assert_eq!(a.to_json()["perm"], serde_json::json!([3, 1, 2, 5, 4]));
    }
}
