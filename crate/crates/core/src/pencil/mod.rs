//! Pencils of quadrics in P⁴ and the invariants of their base locus, a
//! quartic del Pezzo surface.
//!
//! The pencil is `t0 A - t1 B`. Its discriminant `det(t0 A - t1 B)` is a
//! binary quintic; its affine part in `z = t1 / t0` is stored as a [`Poly`]
//! whose coefficient `i` multiplies `t0^(5-i) t1^i`. The point `z = inf` is
//! `t0 = 0` and has multiplicity `5 - deg`.

mod degenerate;
mod galois;
mod pointcount;

use crate::error::{Error, Result};
use crate::exactfield::{Embedding, Field, Matrix, Poly, Scalar};

pub use degenerate::{
    canonical_invariant, canonical_invariant_of, degenerate_parameters, degenerate_points,
    isomorphic, normal_form, normal_form_of, parameters_in, reconstruct, simultaneous_diagonalize,
    splitting_field, DegeneratePoint, Diagonalization, IsoCertificate, NormalForm, Orbit,
    orbits,
};
pub use galois::{galois_signature, predicted_count, CycleSignature};
pub use pointcount::{count_points, pointcount_guard, GUARD_ENV};

/// Two symmetric 5×5 matrices over one field, not proportional.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadricPencil {
    field: Field,
    a: Matrix,
    b: Matrix,
}

impl QuadricPencil {
    pub fn new(a: Matrix, b: Matrix) -> Result<QuadricPencil> {
        let field = a.field().clone();
        if b.field() != &field {
            return Err(Error::DescriptorMismatch(field.to_string(), b.field().to_string()));
        }
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.rows() != 5 || m.cols() != 5 {
                return Err(Error::InvalidInput(format!("{name} must be 5x5")));
            }
            if !m.is_symmetric() {
                return Err(Error::InvalidInput(format!("{name} is not symmetric")));
            }
        }
        // proportional (or zero) iff the two matrices span at most a line
        let stacked = Matrix::from_rows(
            &field,
            vec![a.to_rows().concat(), b.to_rows().concat()],
        )?;
        if stacked.rank() < 2 {
            return Err(Error::DegeneratePencil("A and B are proportional".into()));
        }
        Ok(QuadricPencil { field, a, b })
    }

    /// The pencil `diag(a) , diag(b)`.
    pub fn diagonal(a: &[Scalar], b: &[Scalar]) -> Result<QuadricPencil> {
        let field = a
            .first()
            .ok_or_else(|| Error::InvalidInput("empty diagonal".into()))?
            .field()
            .clone();
        QuadricPencil::new(Matrix::diagonal(&field, a), Matrix::diagonal(&field, b))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    /// The member `t0 A - t1 B`, over the field of `t0` and `t1`.
    pub fn member(&self, t0: &Scalar, t1: &Scalar) -> Result<Matrix> {
        let target = t0.field();
        let emb = Embedding::new(&self.field, target)?;
        let a = self.a.map(target, |x| emb.apply(x));
        let b = self.b.map(target, |x| emb.apply(x));
        a.scale(t0).try_sub(&b.scale(t1))
    }

    /// `(M^T A M, M^T B M)`.
    pub fn congruence(&self, m: &Matrix) -> Result<QuadricPencil> {
        let mt = m.transpose();
        QuadricPencil::new(
            mt.try_mul(&self.a)?.try_mul(m)?,
            mt.try_mul(&self.b)?.try_mul(m)?,
        )
    }

    /// `(alpha A + beta B, gamma A + delta B)`.
    pub fn basis_change(&self, g: [&Scalar; 4]) -> Result<QuadricPencil> {
        let [alpha, beta, gamma, delta] = g;
        if (&(alpha * delta) - &(beta * gamma)).is_zero() {
            return Err(Error::DegenerateInput("singular pencil basis change".into()));
        }
        QuadricPencil::new(
            self.a.scale(alpha).try_add(&self.b.scale(beta))?,
            self.a.scale(gamma).try_add(&self.b.scale(delta))?,
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mat = |m: &Matrix| {
            serde_json::Value::Array(
                m.to_rows()
                    .iter()
                    .map(|r| serde_json::Value::Array(r.iter().map(Scalar::to_json).collect()))
                    .collect(),
            )
        };
        serde_json::json!({
            "field": self.field.to_json(),
            "A": mat(&self.a),
            "B": mat(&self.b),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<QuadricPencil> {
        let field = Field::from_json(
            value
                .get("field")
                .ok_or_else(|| Error::Parse("pencil needs a \"field\"".into()))?,
        )?;
        let mat = |key: &str| -> Result<Matrix> {
            let rows = value
                .get(key)
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Parse(format!("pencil needs a matrix \"{key}\"")))?;
            let rows = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| Error::Parse(format!("rows of {key} must be lists")))?
                        .iter()
                        .map(|x| Scalar::from_json(&field, x))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Matrix::from_rows(&field, rows)
        };
        QuadricPencil::new(mat("A")?, mat("B")?)
    }

    pub fn parse(text: &str) -> Result<QuadricPencil> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        QuadricPencil::from_json(&value)
    }
}

/// `det(A - z B)`; its coefficient `i` is that of `t0^(5-i) t1^i` in
/// `det(t0 A - t1 B)`.
///
/// Fails with a degenerate-pencil error when the determinant vanishes
/// identically.
pub fn discriminant_quintic(p: &QuadricPencil) -> Result<Poly> {
    let field = p.field();
    let n = 5;
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Poly::new(field, vec![p.a[(i, j)].clone(), -&p.b[(i, j)]]))
                .collect()
        })
        .collect();
    // Bareiss fraction-free elimination over F[z]
    let mut negate = false;
    let mut prev = Poly::one(field);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Err(Error::DegeneratePencil("det(t0 A - t1 B) vanishes identically".into()));
            };
            m.swap(i, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if det.is_zero() {
        return Err(Error::DegeneratePencil("det(t0 A - t1 B) vanishes identically".into()));
    }
    Ok(if negate { -&det } else { det })
}

/// The six coefficients `c0..c5` of `t0^(5-i) t1^i`.
pub fn quintic_coefficients(p: &QuadricPencil) -> Result<Vec<Scalar>> {
    let g = discriminant_quintic(p)?;
    Ok((0..6).map(|i| g.coeff(i)).collect())
}

/// Squarefree binary quintic on both charts: `g` squarefree and the point at
/// infinity at most simple.
pub fn is_smooth(p: &QuadricPencil) -> bool {
    match discriminant_quintic(p) {
        Err(_) => false,
        Ok(g) => g.degree().unwrap_or(0) >= 4 && g.squarefree().unwrap_or(false),
    }
}

pub(crate) fn require_smooth(p: &QuadricPencil) -> Result<Poly> {
    let g = discriminant_quintic(p).map_err(|e| Error::NotSmooth(e.to_string()))?;
    if g.degree().unwrap_or(0) < 4 {
        return Err(Error::NotSmooth("the degenerate member at infinity is repeated".into()));
    }
    if !g.squarefree()? {
        return Err(Error::NotSmooth("the discriminant quintic has a repeated root".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn normal_pencil(field: &Field, lambda: i64, mu: i64) -> QuadricPencil {
        let a: Vec<Scalar> = [1, 0, 1, lambda, mu].iter().map(|&x| field.int(x)).collect();
        let b: Vec<Scalar> = [0, 1, 1, 1, 1].iter().map(|&x| field.int(x)).collect();
        QuadricPencil::diagonal(&a, &b).unwrap()
    }

    // determinant by permutation expansion over F[z]
    fn leibniz(p: &QuadricPencil) -> Poly {
        let f = p.field();
        let entry = |i: usize, j: usize| Poly::new(f, vec![p.a()[(i, j)].clone(), -&p.b()[(i, j)]]);
        let mut total = Poly::zero(f);
        let mut perm = [0usize, 1, 2, 3, 4];
        fn next(perm: &mut [usize; 5]) -> bool {
            let Some(i) = (0..4).rev().find(|&i| perm[i] < perm[i + 1]) else {
                return false;
            };
            let j = (i + 1..5).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
            true
        }
        loop {
            let inversions = (0..5)
                .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let term = (0..5).fold(Poly::one(f), |acc, i| &acc * &entry(i, perm[i]));
            total = if inversions % 2 == 0 { &total + &term } else { &total - &term };
            if !next(&mut perm) {
                break;
            }
        }
        total
    }

    #[test]
    fn normal_form_discriminant() {
        let q = Field::rationals();
        let p = normal_pencil(&q, 2, 3);
        let coeffs = quintic_coefficients(&p).unwrap();
        let expect: Vec<Scalar> = [0, -6, 11, -6, 1, 0].iter().map(|&c| q.int(c)).collect();
        assert_eq!(coeffs, expect);
        assert_eq!(discriminant_quintic(&p).unwrap(), leibniz(&p));
        assert!(is_smooth(&p));
    }

    #[test]
    fn proportional_is_degenerate() {
        let q = Field::rationals();
        let r = QuadricPencil::new(Matrix::identity(&q, 5), Matrix::zeros(&q, 5, 5));
        assert!(matches!(r, Err(Error::DegeneratePencil(_))));
    }

    #[test]
    fn diagonal_over_f7() {
        let f7 = Field::prime(7).unwrap();
        let a: Vec<Scalar> = (1..=5).map(|x| f7.int(x)).collect();
        let b = vec![f7.one(); 5];
        let p = QuadricPencil::diagonal(&a, &b).unwrap();
        // det(A - zB) = prod (a_i - z)
        let expect = a
            .iter()
            .fold(Poly::one(&f7), |acc, ai| &acc * &Poly::new(&f7, vec![ai.clone(), -f7.one()]));
        assert_eq!(discriminant_quintic(&p).unwrap(), expect);
        assert_eq!(leibniz(&p), expect);
    }

    #[test]
    fn smoothness_examples() {
        let q = Field::rationals();
        assert!(!is_smooth(&normal_pencil(&q, 1, 3)));
        let a: Vec<Scalar> = [1, 1, 0, 0, 1].iter().map(|&x| q.int(x)).collect();
        let b: Vec<Scalar> = [0, 0, 1, 1, 1].iter().map(|&x| q.int(x)).collect();
        let p = QuadricPencil::diagonal(&a, &b).unwrap();
        let g = discriminant_quintic(&p).unwrap();
        // z^2 (1 - z): a double root at 0 and a double point at infinity
        assert_eq!(g, Poly::from_ints(&q, &[0, 0, 1, -1]));
        assert!(!is_smooth(&p));
    }

    #[test]
    fn bareiss_matches_leibniz_on_dense_pencils() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [3u64, 5, 7, 11] {
            let f = Field::prime(p).unwrap();
            for _ in 0..20 {
                let mut sym = || {
                    let mut m = Matrix::zeros(&f, 5, 5);
                    for i in 0..5 {
                        for j in i..5 {
                            let v = f.int(rng.gen_range(0..p as i64));
                            m[(i, j)] = v.clone();
                            m[(j, i)] = v;
                        }
                    }
                    m
                };
                let (a, b) = (sym(), sym());
                let Ok(pen) = QuadricPencil::new(a, b) else { continue };
                let l = leibniz(&pen);
                match discriminant_quintic(&pen) {
                    Ok(g) => assert_eq!(g, l),
                    Err(_) => assert!(l.is_zero()),
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = Field::extension(3, 2).unwrap();
        let t = f.generator().unwrap();
        let a = vec![f.one(), f.zero(), f.one(), t.clone(), &t + &f.one()];
        let b = vec![f.zero(), f.one(), f.one(), f.one(), f.one()];
        let p = QuadricPencil::diagonal(&a, &b).unwrap();
        let back = QuadricPencil::parse(&p.to_json().to_string()).unwrap();
        assert_eq!(back, p);
    }
}
