//! The Picard lattice of a quartic del Pezzo surface: basis `H, E1..E5`,
//! form `diag(1, -1, -1, -1, -1, -1)`, canonical class `-3H + E1 + .. + E5`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{Field, Matrix};
use crate::hyperoct::SignedPerm;
use crate::pencil::CycleSignature;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct PicClass(pub [i64; 6]);

impl fmt::Debug for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["H", "E1", "E2", "E3", "E4", "E5"];
        let mut first = true;
        for (c, n) in self.0.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{n}")?;
            } else {
                write!(f, "{sign}{mag}{n}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for PicClass {
    type Output = PicClass;
    fn add(self, o: PicClass) -> PicClass {
        PicClass(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for PicClass {
    type Output = PicClass;
    fn sub(self, o: PicClass) -> PicClass {
        PicClass(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for PicClass {
    type Output = PicClass;
    fn neg(self) -> PicClass {
        PicClass(self.0.map(|x| -x))
    }
}

impl Mul<PicClass> for i64 {
    type Output = PicClass;
    fn mul(self, c: PicClass) -> PicClass {
        PicClass(c.0.map(|x| self * x))
    }
}

impl PicClass {
    pub const ZERO: PicClass = PicClass([0; 6]);

    pub fn h() -> PicClass {
        PicClass([1, 0, 0, 0, 0, 0])
    }

    /// `E_i` for `i` in `1..=5`.
    pub fn e(i: usize) -> PicClass {
        assert!((1..=5).contains(&i));
        let mut v = [0; 6];
        v[i] = 1;
        PicClass(v)
    }
}

pub fn intersect(a: &PicClass, b: &PicClass) -> i64 {
    a.0[0] * b.0[0] - (1..6).map(|i| a.0[i] * b.0[i]).sum::<i64>()
}

pub fn canonical_class() -> PicClass {
    PicClass([-3, 1, 1, 1, 1, 1])
}

fn box_search(pred: impl Fn(&PicClass) -> bool) -> Vec<PicClass> {
    let mut out = Vec::new();
    let mut v = [-3i64; 6];
    loop {
        let c = PicClass(v);
        if pred(&c) {
            out.push(c);
        }
        let mut i = 5;
        loop {
            v[i] += 1;
            if v[i] <= 3 {
                break;
            }
            v[i] = -3;
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
        }
    }
}

pub fn is_zero_class(h: &PicClass) -> bool {
    intersect(h, h) == 0 && intersect(h, &canonical_class()) == -2
}

/// The ten classes `h` with `h² = 0`, `h·K = -2`, sorted.
pub fn zero_classes() -> Vec<PicClass> {
    static CACHE: OnceLock<Vec<PicClass>> = OnceLock::new();
    CACHE.get_or_init(|| box_search(is_zero_class)).clone()
}

/// `-K - h`, the other class of the conic-bundle pair.
pub fn pair_of(h: &PicClass) -> Result<PicClass> {
    if !is_zero_class(h) {
        return Err(Error::InvalidClass(format!("{h} is not a zero-class")));
    }
    Ok(-canonical_class() - *h)
}

/// Pair representatives `h_i`, the smaller class of each pair: `H - E_i`.
pub fn pair_representatives() -> [PicClass; 5] {
    let reps: Vec<PicClass> = zero_classes()
        .into_iter()
        .filter(|h| *h < pair_of(h).expect("zero-class"))
        .collect();
    reps.try_into().expect("five pairs")
}

/// `2 hbar_i = 2 h_i + K`; the `hbar_i` are orthonormal for minus the form.
pub fn twice_hbar() -> [PicClass; 5] {
    static CACHE: OnceLock<[PicClass; 5]> = OnceLock::new();
    *CACHE.get_or_init(|| pair_representatives().map(|h| 2 * h + canonical_class()))
}

pub fn is_root(r: &PicClass) -> bool {
    intersect(r, r) == -2 && intersect(r, &canonical_class()) == 0
}

/// All forty `(-2)`-classes orthogonal to `K`, sorted.
pub fn roots() -> Vec<PicClass> {
    box_search(is_root)
}

/// `x + (x·r) r`.
pub fn reflect(r: &PicClass, x: &PicClass) -> Result<PicClass> {
    if !is_root(r) {
        return Err(Error::InvalidRoot(format!("{r} is not a root")));
    }
    Ok(*x + intersect(x, r) * *r)
}

/// Integer matrix acting on column vectors in the basis `H, E1..E5`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeAut(pub [[i64; 6]; 6]);

impl fmt::Debug for LatticeAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl LatticeAut {
    pub fn identity() -> LatticeAut {
        LatticeAut(std::array::from_fn(|i| std::array::from_fn(|j| (i == j) as i64)))
    }

    pub fn reflection(r: &PicClass) -> Result<LatticeAut> {
        let mut m = [[0; 6]; 6];
        for j in 0..6 {
            let mut e = [0; 6];
            e[j] = 1;
            let img = reflect(r, &PicClass(e))?;
            for i in 0..6 {
                m[i][j] = img.0[i];
            }
        }
        Ok(LatticeAut(m))
    }

    pub fn apply(&self, x: &PicClass) -> PicClass {
        PicClass(std::array::from_fn(|i| (0..6).map(|j| self.0[i][j] * x.0[j]).sum()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeAut) -> LatticeAut {
        LatticeAut(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..6).map(|k| self.0[i][k] * other.0[k][j]).sum())
        }))
    }

    pub fn preserves_form(&self) -> bool {
        let basis: Vec<PicClass> = (0..6)
            .map(|j| {
                let mut e = [0; 6];
                e[j] = 1;
                PicClass(e)
            })
            .collect();
        basis.iter().all(|a| {
            basis
                .iter()
                .all(|b| intersect(&self.apply(a), &self.apply(b)) == intersect(a, b))
        })
    }

    pub fn fixes_canonical(&self) -> bool {
        self.apply(&canonical_class()) == canonical_class()
    }
}

/// Closure of the forty root reflections: the Weyl group of type D₅.
pub fn weyl_group() -> Vec<LatticeAut> {
    let gens: Vec<LatticeAut> = roots()
        .iter()
        .map(|r| LatticeAut::reflection(r).expect("root"))
        .collect();
    let mut seen: HashSet<LatticeAut> = HashSet::new();
    let mut queue = VecDeque::from([LatticeAut::identity()]);
    seen.insert(LatticeAut::identity());
    while let Some(w) = queue.pop_front() {
        for g in &gens {
            let next = g.compose(&w);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<LatticeAut> = seen.into_iter().collect();
    out.sort();
    out
}

/// The signed permutation of `hbar_1..hbar_5` induced by `w`:
/// `w(hbar_i) = eps_j hbar_j` with `j = sigma(i)`.
pub fn to_signed_perm(w: &LatticeAut) -> Result<SignedPerm> {
    if !w.preserves_form() || !w.fixes_canonical() {
        return Err(Error::InvalidAut("does not preserve the form and K".into()));
    }
    let hb = twice_hbar();
    let mut perm = [0u8; 5];
    let mut signs = [1i8; 5];
    for i in 0..5 {
        let img = w.apply(&hb[i]);
        let (j, s) = (0..5)
            .find_map(|j| {
                if img == hb[j] {
                    Some((j, 1))
                } else if img == -hb[j] {
                    Some((j, -1))
                } else {
                    None
                }
            })
            .ok_or_else(|| Error::InvalidAut(format!("image of hbar_{} is not +-hbar", i + 1)))?;
        perm[i] = j as u8;
        signs[j] = s;
    }
    SignedPerm::new(perm, signs)
}

/// The rational 6×6 matrix in the basis `H, E1..E5` of the map fixing `K`
/// and acting on `hbar` by `g`. Integral exactly when `g` is even.
pub fn lattice_matrix(g: &SignedPerm) -> Matrix {
    let q = Field::rationals();
    // columns: K, 2 hbar_1 .. 2 hbar_5
    let mut cols = vec![canonical_class()];
    cols.extend(twice_hbar());
    let c = Matrix::from_rows(
        &q,
        (0..6)
            .map(|i| cols.iter().map(|v| q.int(v.0[i])).collect())
            .collect(),
    )
    .expect("square");
    let mut s = Matrix::zeros(&q, 6, 6);
    s[(0, 0)] = q.one();
    for i in 0..5 {
        let (j, sign) = g.act(i, 1);
        s[(1 + j, 1 + i)] = q.int(sign as i64);
    }
    c.try_mul(&s)
        .and_then(|cs| cs.try_mul(&c.inverse()?))
        .expect("change of basis")
}

/// `rank Pic^G = 1 + #(cycles with sign +1)`.
pub fn invariant_rank(sig: &CycleSignature) -> usize {
    1 + sig.plus_cycles()
}

/// `rank Pic^G = 1`.
pub fn is_minimal(sig: &CycleSignature) -> bool {
    invariant_rank(sig) == 1
}

/// `dim ker(M - I)` for the lattice matrix of `g`.
pub fn fixed_rank(g: &SignedPerm) -> usize {
    let m = lattice_matrix(g);
    let q = m.field().clone();
    6 - m.try_sub(&Matrix::identity(&q, 6)).expect("square").rank()
}
