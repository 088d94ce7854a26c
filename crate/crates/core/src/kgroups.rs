//! Numerical Grothendieck groups with their Euler forms.
//!
//! Surface classes use the chart `(r, c1, s2)` with `s2 = 2 ch2`. The
//! weighted line with `n` points of weight 2 uses the basis
//! `[O], [O_pt], [S_1..S_n]`, where `S_i` is the simple with `χ(O, S_i) = 1`
//! and its partner is `[O_pt] - [S_i]`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{Field, Matrix, Scalar};
use crate::hyperoct::SignedPerm;
use crate::pencil::CycleSignature;
use crate::picard::{
    canonical_class, intersect, lattice_matrix, pair_of, pair_representatives, zero_classes,
    PicClass,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct K0ClassX {
    pub r: i64,
    pub c1: PicClass,
    pub s2: i64,
}

impl K0ClassX {
    pub fn new(r: i64, c1: PicClass, s2: i64) -> K0ClassX {
        K0ClassX { r, c1, s2 }
    }

    /// Coordinates `(r, c1[0..6], s2)`.
    pub fn coords(&self) -> [i64; 8] {
        let mut v = [0; 8];
        v[0] = self.r;
        v[1..7].copy_from_slice(&self.c1.0);
        v[7] = self.s2;
        v
    }

    pub fn from_coords(v: &[i64; 8]) -> K0ClassX {
        K0ClassX {
            r: v[0],
            c1: PicClass(v[1..7].try_into().expect("six entries")),
            s2: v[7],
        }
    }

    pub fn neg(&self) -> K0ClassX {
        K0ClassX::from_coords(&self.coords().map(|x| -x))
    }
}

/// `χ(u, v)`, exact; half-integers can appear off the lattice of genuine
/// classes.
pub fn euler_x(u: &K0ClassX, v: &K0ClassX) -> BigRational {
    let k = canonical_class();
    let twice = 2 * u.r * v.r
        - (u.r * intersect(&k, &v.c1) - v.r * intersect(&k, &u.c1))
        + (u.r * v.s2 + v.r * u.s2)
        - 2 * intersect(&u.c1, &v.c1);
    BigRational::new(twice.into(), 2.into())
}

/// The class of the line bundle `O(D)`: `(1, D, D²)`.
pub fn class_of(d: &PicClass) -> K0ClassX {
    K0ClassX::new(1, *d, intersect(d, d))
}

pub fn structure_sheaf() -> K0ClassX {
    class_of(&PicClass::ZERO)
}

/// Basis of `{v : χ([O], v) = 0}`: `r` and `c1` free, `s2 = K·c1 - 2r`.
pub fn atom_sublattice() -> Vec<K0ClassX> {
    let k = canonical_class();
    (0..7)
        .map(|j| {
            let mut v = [0i64; 8];
            v[j] = 1;
            let mut c = K0ClassX::from_coords(&v);
            c.s2 = intersect(&k, &c.c1) - 2 * c.r;
            c
        })
        .collect()
}

/// Coordinates of a class of the sublattice in [`atom_sublattice`].
pub fn atom_coords(v: &K0ClassX) -> Result<[i64; 7]> {
    if !euler_x(&structure_sheaf(), v).is_zero() {
        return Err(Error::InvalidClass(format!("{v:?} is not orthogonal to O")));
    }
    let c = v.coords();
    Ok(std::array::from_fn(|i| c[i]))
}

fn rat(q: &Field, x: &BigRational) -> Scalar {
    q.from_rational(x).expect("rational field")
}

/// Gram matrix `E[i][j] = χ(b_i, b_j)` over Q.
pub fn gram(basis: &[K0ClassX]) -> Matrix {
    let q = Field::rationals();
    let rows = basis
        .iter()
        .map(|u| basis.iter().map(|v| rat(&q, &euler_x(u, v))).collect())
        .collect();
    Matrix::from_rows(&q, rows).expect("square")
}

/// Standard coordinate basis of `K_0(X)` in the `(r, c1, s2)` chart.
pub fn surface_basis() -> Vec<K0ClassX> {
    (0..8)
        .map(|j| {
            let mut v = [0i64; 8];
            v[j] = 1;
            K0ClassX::from_coords(&v)
        })
        .collect()
}

/// `S = E^{-1} E^T`, so that `χ(x, y) = χ(y, S x)` on column vectors.
pub fn serre_from_gram(e: &Matrix) -> Result<Matrix> {
    let inv = e
        .inverse()
        .map_err(|_| Error::DegenerateInput("the Euler form is degenerate".into()))?;
    inv.try_mul(&e.transpose())
}

/// Twist by `K`: `(r, D, s2) -> (r, D + rK, s2 + 2 D·K + r K²)`.
pub fn twist_by_canonical(v: &K0ClassX) -> K0ClassX {
    let k = canonical_class();
    K0ClassX::new(
        v.r,
        v.c1 + v.r * k,
        v.s2 + 2 * intersect(&v.c1, &k) + v.r * intersect(&k, &k),
    )
}

/// Euler form of the weighted projective line with `n` points of weight 2.
pub fn wpl_gram(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one weighted point".into()));
    }
    let q = Field::rationals();
    let mut e = Matrix::zeros(&q, n + 2, n + 2);
    e[(0, 0)] = q.one();
    e[(0, 1)] = q.one();
    e[(1, 0)] = q.int(-1);
    for i in 0..n {
        e[(0, 2 + i)] = q.one();
        e[(2 + i, 2 + i)] = q.one();
    }
    Ok(e)
}

/// Which lattice a Galois action is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// `Pic(X)`, rank 6.
    Picard,
    /// `K_0` of the weighted line with `n` weighted points, rank `2 + n`.
    Wpl(usize),
    /// `K_0(X)`, rank 8.
    SurfaceK0,
    /// `O^⊥` inside `K_0(X)`, rank 7.
    Atom,
    /// Classes of torsion sheaves on the weighted line, rank `1 + n`.
    Torsion(usize),
}

impl Space {
    pub fn parse(s: &str) -> Result<Space> {
        let s = s.trim().to_ascii_lowercase();
        let arg = |prefix: &str| -> Option<Result<usize>> {
            s.strip_prefix(prefix).map(|rest| {
                let rest = rest.trim_start_matches(['(', ':', '=']).trim_end_matches(')');
                if rest.is_empty() {
                    Ok(5)
                } else {
                    rest.parse().map_err(|e| Error::Parse(format!("{s}: {e}")))
                }
            })
        };
        match s.as_str() {
            "picard" | "pic" => Ok(Space::Picard),
            "surface-k0" | "surface" | "k0x" => Ok(Space::SurfaceK0),
            "atom" => Ok(Space::Atom),
            _ => {
                if let Some(n) = arg("wpl") {
                    Ok(Space::Wpl(n?))
                } else if let Some(n) = arg("torsion") {
                    Ok(Space::Torsion(n?))
                } else {
                    Err(Error::Parse(format!("unknown space {s:?}")))
                }
            }
        }
    }

    pub fn points(&self) -> usize {
        match self {
            Space::Wpl(n) | Space::Torsion(n) => *n,
            _ => 5,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Picard => write!(f, "picard"),
            Space::Wpl(n) => write!(f, "wpl({n})"),
            Space::SurfaceK0 => write!(f, "surface-k0"),
            Space::Atom => write!(f, "atom"),
            Space::Torsion(n) => write!(f, "torsion({n})"),
        }
    }
}

/// A signed permutation of `n` points, as `(perm, signs)` with the hyperoct
/// convention `(i, s) -> (perm[i], s * signs[perm[i]])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedAction {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedAction {
    /// A representative of the conjugacy class: cycles on consecutive labels
    /// with the cycle sign on the last label.
    pub fn from_signature(sig: &CycleSignature) -> SignedAction {
        let n = sig.total();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        let mut start = 0;
        for &(m, s) in sig.cycles() {
            for j in 0..m {
                perm[start + j] = start + (j + 1) % m;
            }
            signs[start + m - 1] = s;
            start += m;
        }
        SignedAction { perm, signs }
    }

    pub fn from_signed_perm(g: &SignedPerm) -> SignedAction {
        SignedAction {
            perm: g.perm().iter().map(|&i| i as usize).collect(),
            signs: g.signs().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    fn as_signed_perm(&self) -> Result<SignedPerm> {
        let perm: [u8; 5] = self
            .perm
            .iter()
            .map(|&i| i as u8)
            .collect::<Vec<_>>()
            .try_into()
            .map_err(|_| Error::InvalidInput("this space needs an action on 5 points".into()))?;
        SignedPerm::new(perm, self.signs.clone().try_into().expect("same length"))
    }
}

/// Matrix of the action on the chosen space, acting on column vectors.
pub fn action_matrix(g: &SignedAction, space: Space) -> Result<Matrix> {
    let q = Field::rationals();
    let n = g.len();
    match space {
        Space::Picard => Ok(lattice_matrix(&g.as_signed_perm()?)),
        Space::SurfaceK0 | Space::Atom => {
            let l = lattice_matrix(&g.as_signed_perm()?);
            let mut m = Matrix::identity(&q, 8);
            for i in 0..6 {
                for j in 0..6 {
                    m[(1 + i, 1 + j)] = l[(i, j)].clone();
                }
            }
            if space == Space::SurfaceK0 {
                return Ok(m);
            }
            // restrict to the invariant sublattice, in its basis
            let basis = atom_sublattice();
            let b = Matrix::from_rows(
                &q,
                (0..8)
                    .map(|i| basis.iter().map(|v| q.int(v.coords()[i])).collect())
                    .collect(),
            )?;
            let img = m.try_mul(&b)?;
            // coordinates in the sublattice basis are the first seven entries
            Ok(img.minor(&(0..7).collect::<Vec<_>>(), &(0..7).collect::<Vec<_>>()))
        }
        Space::Wpl(k) | Space::Torsion(k) => {
            if k != n {
                return Err(Error::InvalidInput(format!("action on {n} points, space has {k}")));
            }
            // basis [O], [pt], [S_i]; S_i -> S_j or pt - S_j
            let mut m = Matrix::identity(&q, n + 2);
            for i in 0..n {
                m[(2 + i, 2 + i)] = q.zero();
            }
            for i in 0..n {
                let j = g.perm[i];
                if g.signs[j] == 1 {
                    m[(2 + j, 2 + i)] = q.one();
                } else {
                    m[(2 + j, 2 + i)] = q.int(-1);
                    m[(1, 2 + i)] = q.one();
                }
            }
            if let Space::Torsion(_) = space {
                let idx: Vec<usize> = (1..n + 2).collect();
                return Ok(m.minor(&idx, &idx));
            }
            Ok(m)
        }
    }
}

/// `dim ker(M - I)` for the action on `space`.
pub fn kernel_rank(g: &SignedAction, space: Space) -> Result<usize> {
    let m = action_matrix(g, space)?;
    let n = m.rows();
    let q = m.field().clone();
    Ok(n - m.try_sub(&Matrix::identity(&q, n))?.rank())
}

/// Closed forms: Pic and torsion `1 + plus`, weighted line and atom
/// `2 + plus`, surface `3 + plus`.
pub fn closed_form_rank(sig: &CycleSignature, space: Space) -> usize {
    let plus = sig.plus_cycles();
    match space {
        Space::Picard | Space::Torsion(_) => 1 + plus,
        Space::Wpl(_) | Space::Atom => 2 + plus,
        Space::SurfaceK0 => 3 + plus,
    }
}

/// Rank of the invariant part, by exact linear algebra on a representative
/// of the signature.
pub fn g_invariant_rank(sig: &CycleSignature, space: Space) -> Result<usize> {
    if sig.total() != space.points() {
        return Err(Error::InvalidInput(format!(
            "signature on {} points for a space with {}",
            sig.total(),
            space.points()
        )));
    }
    kernel_rank(&SignedAction::from_signature(sig), space)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConicBundleRanks {
    pub k0x_rank: usize,
    pub atom_rank: usize,
}

/// Invariant ranks for a conic bundle over P¹ with `n` degenerate fibres:
/// the atom is the weighted line on `n` points, the base curve adds 2.
pub fn conic_bundle_ranks(
    n: usize,
    sig: &CycleSignature,
    relatively_minimal: bool,
) -> Result<ConicBundleRanks> {
    if sig.total() != n {
        return Err(Error::InvalidInput(format!("signature covers {} points, not {n}", sig.total())));
    }
    if relatively_minimal && sig.plus_cycles() > 0 {
        return Err(Error::InvalidInput(
            "a relatively minimal conic bundle has no plus-cycles".into(),
        ));
    }
    let atom_rank = g_invariant_rank(sig, Space::Wpl(n))?;
    Ok(ConicBundleRanks {
        k0x_rank: atom_rank + 2,
        atom_rank,
    })
}

/// `χ(e, e)` for the sum of the simples in one orbit of size `m` on the
/// weighted line.
pub fn orbit_self_pairing(n: usize, orbit: &[usize]) -> Result<BigRational> {
    let e = wpl_gram(n)?;
    let mut v = vec![BigRational::zero(); n + 2];
    for &i in orbit {
        if i >= n {
            return Err(Error::InvalidInput(format!("simple {i} out of range")));
        }
        v[2 + i] += BigRational::one();
    }
    let q = e.field().clone();
    let vs: Vec<Scalar> = v.iter().map(|x| rat(&q, x)).collect();
    Ok(e.bilinear(&vs, &vs).as_rational().expect("rational").clone())
}

/// Gram matrix of the Euler form on [`atom_sublattice`].
pub fn atom_gram() -> Matrix {
    gram(&atom_sublattice())
}

fn atom_vector(v: &K0ClassX) -> Result<Vec<Scalar>> {
    let q = Field::rationals();
    Ok(atom_coords(v)?.iter().map(|&x| q.int(x)).collect())
}

/// Result of checking the Serre operator of the atom against the ten
/// zero-classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SerreCertificate {
    /// `S(O(-h)) = -O(-h')` for every zero-class.
    pub swaps_pairs: bool,
    /// `S²(O(-h)) = O(-h)` for every zero-class.
    pub involutive: bool,
    /// The surface pairing of the ten classes equals the simples pairing.
    pub gram_match: bool,
    pub classes: usize,
}

impl SerreCertificate {
    pub fn holds(&self) -> bool {
        self.swaps_pairs && self.involutive && self.gram_match && self.classes == 10
    }
}

/// `[χ(O(-h_i), O(-h_j))]` over the zero-classes in their sorted order.
pub fn zero_class_gram() -> Vec<Vec<BigRational>> {
    let cls: Vec<K0ClassX> = zero_classes().iter().map(|h| class_of(&-*h)).collect();
    cls.iter()
        .map(|u| cls.iter().map(|v| euler_x(u, v)).collect())
        .collect()
}

/// `[χ(T_i, T_j)]` for the ten simples of the weighted line on five points,
/// ordered so that index `2i` is `S_i` and `2i + 1` is `S_i'`.
pub fn simples_gram() -> Result<Vec<Vec<BigRational>>> {
    let e = wpl_gram(5)?;
    let q = e.field().clone();
    let simples: Vec<Vec<Scalar>> = (0..5)
        .flat_map(|i| {
            let mut s = vec![q.zero(); 7];
            s[2 + i] = q.one();
            let mut sp = vec![q.zero(); 7];
            sp[1] = q.one();
            sp[2 + i] = q.int(-1);
            [s, sp]
        })
        .collect();
    Ok(simples
        .iter()
        .map(|u| {
            simples
                .iter()
                .map(|v| e.bilinear(u, v).as_rational().expect("rational").clone())
                .collect()
        })
        .collect())
}

pub fn serre_certificate() -> Result<SerreCertificate> {
    let s = serre_from_gram(&atom_gram())?;
    let hs = zero_classes();
    let mut swaps_pairs = true;
    let mut involutive = true;
    for h in &hs {
        let v = atom_vector(&class_of(&-*h))?;
        let w = atom_vector(&class_of(&-pair_of(h)?).neg())?;
        let sv = s.mul_vec(&v);
        swaps_pairs &= sv == w;
        involutive &= s.mul_vec(&sv) == v;
    }
    // matching h_i <-> simple: pair k gives (S_k, S_k'), either order
    let surface = zero_class_gram();
    let simples = simples_gram()?;
    let pairs = pair_representatives();
    let mut slot = vec![0usize; hs.len()];
    for (k, h) in pairs.iter().enumerate() {
        let i = hs.iter().position(|x| x == h).expect("listed");
        let j = hs.iter().position(|x| *x == pair_of(h).expect("zero-class")).expect("listed");
        slot[i] = 2 * k;
        slot[j] = 2 * k + 1;
    }
    let gram_match = (0..hs.len())
        .all(|i| (0..hs.len()).all(|j| surface[i][j] == simples[slot[i]][slot[j]]));
    Ok(SerreCertificate {
        swaps_pairs,
        involutive,
        gram_match,
        classes: hs.len(),
    })
}
