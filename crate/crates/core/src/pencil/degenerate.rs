use num_integer::Integer;

use super::{require_smooth, QuadricPencil};
use crate::error::{Error, Result};
use crate::exactfield::{factor, rational_roots, roots, Embedding, Field, Matrix, Poly, Scalar};
use crate::wpline::{all_perms5, pgl2_match, Moebius, PointConfiguration, ProjPoint};

/// A Frobenius orbit of degenerate members: one irreducible factor of the
/// discriminant quintic, or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// `None` for the point at infinity (the factor `t0`).
    pub factor: Option<Poly>,
    pub degree: usize,
    /// Base field extended by one root of the factor.
    pub residue_field: Field,
    /// All roots of the factor, in the residue field, sorted.
    pub points: Vec<ProjPoint>,
    /// Sign of Frobenius on the two rulings after `degree` steps; finite
    /// fields only.
    pub sign: Option<i8>,
}

/// One of the five corank-1 members of the pencil.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneratePoint {
    /// Affine parameter `z = t1 / t0`, in the residue field.
    pub parameter: ProjPoint,
    pub residue_degree: usize,
    /// Index into [`orbits`].
    pub orbit: usize,
    /// Nonzero diagonal entries of the member in congruence-diagonal form;
    /// exactly four.
    pub diagonal_entries: Vec<Scalar>,
}

impl DegeneratePoint {
    pub fn t0(&self) -> Scalar {
        self.parameter.coords().1.clone()
    }

    pub fn t1(&self) -> Scalar {
        self.parameter.coords().0.clone()
    }

    /// Product of the diagonal entries, well defined up to squares.
    pub fn ruling_discriminant(&self) -> Scalar {
        let f = self.parameter.field();
        self.diagonal_entries.iter().fold(f.one(), |acc, d| &acc * d)
    }
}

fn residue_field(base: &Field, m: usize) -> Result<Field> {
    if m == 1 {
        Ok(base.clone())
    } else {
        Field::extension(base.characteristic(), base.degree() * m)
    }
}

fn member_at(p: &QuadricPencil, z: &ProjPoint) -> Result<Matrix> {
    let (x, y) = z.coords();
    p.member(y, x)
}

fn ruling_entries(p: &QuadricPencil, z: &ProjPoint) -> Result<Vec<Scalar>> {
    let diag = member_at(p, z)?.symmetric_diagonal()?;
    let nonzero: Vec<Scalar> = diag.into_iter().filter(|d| !d.is_zero()).collect();
    if nonzero.len() != 4 {
        return Err(Error::NotSmooth(format!(
            "degenerate member at {z} has rank {} instead of 4",
            nonzero.len()
        )));
    }
    Ok(nonzero)
}

fn unsplit_over_q() -> Error {
    Error::UnsupportedSplitting(
        "the discriminant quintic does not split over Q; reduce the pencil mod p".into(),
    )
}

/// Frobenius orbits on the degenerate members, infinity first, then by factor.
pub fn orbits(p: &QuadricPencil) -> Result<Vec<Orbit>> {
    let g = require_smooth(p)?;
    let base = p.field().clone();
    let mut out = Vec::new();
    let with_sign = |points: &[ProjPoint]| -> Result<Option<i8>> {
        if !base.is_finite() {
            return Ok(None);
        }
        let d: Scalar = ruling_entries(p, &points[0])?
            .iter()
            .fold(points[0].field().one(), |acc, x| &acc * x);
        Ok(Some(if d.is_square()? { 1 } else { -1 }))
    };
    if g.degree() == Some(4) {
        let pts = vec![ProjPoint::infinity(&base)];
        out.push(Orbit {
            factor: None,
            degree: 1,
            residue_field: base.clone(),
            sign: with_sign(&pts)?,
            points: pts,
        });
    }
    if base.is_rationals() {
        let rs = rational_roots(&g)?;
        if rs.len() != g.degree().unwrap_or(0) {
            return Err(unsplit_over_q());
        }
        for r in rs {
            let pts = vec![ProjPoint::finite(r.clone())];
            out.push(Orbit {
                factor: Some(Poly::linear_root(&r)),
                degree: 1,
                residue_field: base.clone(),
                sign: None,
                points: pts,
            });
        }
        return Ok(out);
    }
    for (f, mult) in factor(&g)? {
        debug_assert_eq!(mult, 1);
        let m = f.degree().expect("nonconstant factor");
        let r = residue_field(&base, m)?;
        let emb = Embedding::new(&base, &r)?;
        let pts: Vec<ProjPoint> = roots(&emb.apply_poly(&f))?
            .into_iter()
            .map(ProjPoint::finite)
            .collect();
        debug_assert_eq!(pts.len(), m);
        out.push(Orbit {
            factor: Some(f),
            degree: m,
            residue_field: r,
            sign: with_sign(&pts)?,
            points: pts,
        });
    }
    Ok(out)
}

/// All five degenerate members, each over its own residue field.
pub fn degenerate_points(p: &QuadricPencil) -> Result<Vec<DegeneratePoint>> {
    let mut out = Vec::with_capacity(5);
    for (i, orb) in orbits(p)?.into_iter().enumerate() {
        for z in orb.points {
            out.push(DegeneratePoint {
                diagonal_entries: ruling_entries(p, &z)?,
                parameter: z,
                residue_degree: orb.degree,
                orbit: i,
            });
        }
    }
    Ok(out)
}

/// Smallest field over which all five degenerate members are defined.
pub fn splitting_field(p: &QuadricPencil) -> Result<Field> {
    let g = require_smooth(p)?;
    let base = p.field();
    if base.is_rationals() {
        if rational_roots(&g)?.len() != g.degree().unwrap_or(0) {
            return Err(unsplit_over_q());
        }
        return Ok(base.clone());
    }
    let n = factor(&g)?
        .iter()
        .map(|(f, _)| f.degree().unwrap_or(1))
        .fold(1usize, |a, d| a.lcm(&d));
    residue_field(base, n)
}

/// The degenerate parameters as points of P¹ over `w`, which must contain
/// a splitting field.
pub fn parameters_in(p: &QuadricPencil, w: &Field) -> Result<PointConfiguration> {
    let g = require_smooth(p)?;
    let emb = Embedding::new(p.field(), w)?;
    let mut pts: Vec<ProjPoint> = roots(&emb.apply_poly(&g))?
        .into_iter()
        .map(ProjPoint::finite)
        .collect();
    if g.degree() == Some(4) {
        pts.push(ProjPoint::infinity(w));
    }
    if pts.len() != 5 {
        return Err(if w.is_rationals() {
            unsplit_over_q()
        } else {
            Error::UnsupportedSplitting(format!("{w} does not split the discriminant quintic"))
        });
    }
    PointConfiguration::new(w, pts)
}

/// The weighted projective line of the pencil over its splitting field.
pub fn degenerate_parameters(p: &QuadricPencil) -> Result<PointConfiguration> {
    parameters_in(p, &splitting_field(p)?)
}

/// Simultaneous diagonal form over the splitting field.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub field: Field,
    /// Columns are kernel vectors of the degenerate members, first nonzero
    /// entry 1, in the order of the sorted parameters.
    pub m: Matrix,
    /// `(a_i, b_i)` with `M^T A M = diag(a)`, `M^T B M = diag(b)`; the
    /// i-th degenerate member is `(t0 : t1) = (b_i : a_i)`.
    pub pairs: Vec<(Scalar, Scalar)>,
}

pub fn simultaneous_diagonalize(p: &QuadricPencil) -> Result<Diagonalization> {
    let config = degenerate_parameters(p)?;
    let w = config.field().clone();
    let emb = Embedding::new(p.field(), &w)?;
    let a = p.a().map(&w, |x| emb.apply(x));
    let b = p.b().map(&w, |x| emb.apply(x));
    let mut cols = Vec::with_capacity(5);
    for z in config.points() {
        let k = member_at(p, z)?.kernel();
        if k.len() != 1 {
            return Err(Error::NotSmooth(format!("member at {z} has corank {}", k.len())));
        }
        let mut v = k.into_iter().next().expect("one kernel vector");
        let lead = v.iter().find(|x| !x.is_zero()).expect("nonzero kernel").inv()?;
        for x in v.iter_mut() {
            *x = &*x * &lead;
        }
        cols.push(v);
    }
    let m = Matrix::from_rows(&w, cols.clone())?.transpose();
    let pairs = cols
        .iter()
        .map(|v| (a.bilinear(v, v), b.bilinear(v, v)))
        .collect();
    Ok(Diagonalization { field: w, m, pairs })
}

/// `(lambda, mu)`: the images of the fourth and fifth points under the map
/// sending the first three to infinity, 0, 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalForm {
    pub lambda: Scalar,
    pub mu: Scalar,
}

impl NormalForm {
    pub fn new(lambda: Scalar, mu: Scalar) -> Result<NormalForm> {
        let nf = NormalForm { lambda, mu };
        nf.validate()?;
        Ok(nf)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.field() != self.mu.field() {
            return Err(Error::DescriptorMismatch(
                self.lambda.field().to_string(),
                self.mu.field().to_string(),
            ));
        }
        for (name, v) in [("lambda", &self.lambda), ("mu", &self.mu)] {
            if v.is_zero() || v.is_one() {
                return Err(Error::InvalidNormalForm(format!("{name} = {v} lies in {{0, 1}}")));
            }
        }
        if self.lambda == self.mu {
            return Err(Error::InvalidNormalForm("lambda = mu".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        self.lambda.field()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!([self.lambda.to_json(), self.mu.to_json()])
    }
}

impl std::fmt::Display for NormalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lambda, self.mu)
    }
}

/// Normal form of a configuration for an ordering of its sorted points.
pub fn normal_form_of(c: &PointConfiguration, ordering: &[usize; 5]) -> Result<NormalForm> {
    let mut seen = [false; 5];
    for &i in ordering {
        if i >= 5 || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidInput(format!("{ordering:?} is not a permutation")));
        }
    }
    let pts = c.points();
    let m = Moebius::to_standard(&pts[ordering[0]], &pts[ordering[1]], &pts[ordering[2]])?;
    let image = |i: usize| {
        m.apply(&pts[ordering[i]])
            .value()
            .cloned()
            .expect("only the first point goes to infinity")
    };
    Ok(NormalForm {
        lambda: image(3),
        mu: image(4),
    })
}

pub fn normal_form(p: &QuadricPencil, ordering: &[usize; 5]) -> Result<NormalForm> {
    normal_form_of(&degenerate_parameters(p)?, ordering)
}

/// All normal forms over the 120 orderings, sorted and deduplicated.
pub fn canonical_invariant_of(c: &PointConfiguration) -> Vec<NormalForm> {
    let mut out: Vec<NormalForm> = all_perms5()
        .iter()
        .map(|o| {
            let o = o.map(usize::from);
            normal_form_of(c, &o).expect("valid ordering")
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn canonical_invariant(p: &QuadricPencil) -> Result<Vec<NormalForm>> {
    Ok(canonical_invariant_of(&degenerate_parameters(p)?))
}

/// The diagonal pencil `A = diag(1,0,1,lambda,mu)`, `B = diag(0,1,1,1,1)`
/// with degenerate members at infinity, 0, 1, lambda, mu.
pub fn reconstruct(nf: &NormalForm) -> Result<QuadricPencil> {
    nf.validate()?;
    let f = nf.field();
    let a = [f.one(), f.zero(), f.one(), nf.lambda.clone(), nf.mu.clone()];
    let b = [f.zero(), f.one(), f.one(), f.one(), f.one()];
    QuadricPencil::diagonal(&a, &b)
}

/// A Möbius map carrying the degenerate members of one pencil onto those of
/// another.
#[derive(Clone, Debug)]
pub struct IsoCertificate {
    pub moebius: Moebius,
    /// Field the map is written over.
    pub field: Field,
    /// Whether the map is defined over the common base field; `None` when
    /// the pencils have different base fields.
    pub k_rational: Option<bool>,
}

impl IsoCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "moebius": self.moebius.to_json(),
            "field": self.field.to_json(),
            "k_rational": self.k_rational,
        })
    }
}

/// Field containing splitting fields of both pencils.
pub fn common_splitting_field(p1: &QuadricPencil, p2: &QuadricPencil) -> Result<Field> {
    let (f1, f2) = (p1.field(), p2.field());
    if f1.characteristic() != f2.characteristic() {
        return Err(Error::DescriptorMismatch(f1.to_string(), f2.to_string()));
    }
    let s1 = splitting_field(p1)?;
    let s2 = splitting_field(p2)?;
    if s1 == s2 {
        return Ok(s1);
    }
    if s1.is_rationals() {
        return Err(Error::DescriptorMismatch(s1.to_string(), s2.to_string()));
    }
    Field::extension(s1.characteristic(), s1.degree().lcm(&s2.degree()))
}

/// Geometric isomorphism test: the canonical invariants over a common
/// splitting field agree, certified by a Möbius map.
pub fn isomorphic(p1: &QuadricPencil, p2: &QuadricPencil) -> Result<Option<IsoCertificate>> {
    let w = common_splitting_field(p1, p2)?;
    let c1 = parameters_in(p1, &w)?;
    let c2 = parameters_in(p2, &w)?;
    if canonical_invariant_of(&c1) != canonical_invariant_of(&c2) {
        return Ok(None);
    }
    let m = pgl2_match(&c1, &c2)?
        .ok_or_else(|| Error::InvalidInput("equal invariants without a matching map".into()))?;
    let k_rational = if p1.field() == p2.field() {
        Some(m.defined_over(&Embedding::new(p1.field(), &w)?))
    } else {
        None
    };
    Ok(Some(IsoCertificate {
        moebius: m,
        field: w,
        k_rational,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::tests::normal_pencil;

    #[test]
    fn normal_form_points() {
        let q = Field::rationals();
        let p = normal_pencil(&q, 2, 3);
        let c = degenerate_parameters(&p).unwrap();
        let vals: Vec<Option<Scalar>> = c.points().iter().map(|z| z.value().cloned()).collect();
        assert_eq!(
            vals,
            vec![None, Some(q.int(0)), Some(q.int(1)), Some(q.int(2)), Some(q.int(3))]
        );
        let nf = normal_form(&p, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(nf, NormalForm::new(q.int(2), q.int(3)).unwrap());
        let swapped = normal_form(&p, &[0, 1, 2, 4, 3]).unwrap();
        assert_eq!((swapped.lambda, swapped.mu), (q.int(3), q.int(2)));
        let inv = canonical_invariant(&p).unwrap();
        assert!(inv.contains(&nf));
        // ordering (0, 1, inf, 2, 3): z -> (z - 1) / z sends 2, 3 to 1/2, 2/3
        let other = normal_form(&p, &[1, 2, 0, 3, 4]).unwrap();
        let expect = NormalForm::new(q.fraction(1, 2).unwrap(), q.fraction(2, 3).unwrap()).unwrap();
        assert_eq!(other, expect);
        assert!(inv.contains(&other));
    }

    #[test]
    fn distinct_invariants() {
        let q = Field::rationals();
        let a = canonical_invariant(&normal_pencil(&q, 2, 3)).unwrap();
        let b = canonical_invariant(&normal_pencil(&q, 2, 5)).unwrap();
        assert_ne!(a, b);
        assert!(isomorphic(&normal_pencil(&q, 2, 3), &normal_pencil(&q, 2, 5))
            .unwrap()
            .is_none());
        let same = isomorphic(&normal_pencil(&q, 2, 3), &normal_pencil(&q, 2, 3))
            .unwrap()
            .unwrap();
        assert!(same.moebius.is_identity());
        assert_eq!(same.k_rational, Some(true));
    }

    #[test]
    fn diagonal_pencil_diagonalizes_to_identity() {
        let q = Field::rationals();
        let p = normal_pencil(&q, 2, 3);
        let d = simultaneous_diagonalize(&p).unwrap();
        assert_eq!(d.m, Matrix::identity(&q, 5));
        let pairs: Vec<(i64, i64)> = vec![(1, 0), (0, 1), (1, 1), (2, 1), (3, 1)];
        let expect: Vec<(Scalar, Scalar)> =
            pairs.iter().map(|&(a, b)| (q.int(a), q.int(b))).collect();
        assert_eq!(d.pairs, expect);
    }

    #[test]
    fn eigenvectors_diagonalize_over_f11() {
        let f = Field::prime(11).unwrap();
        // rotations with c^2 + s^2 = 1: (3, 5) since 9 + 25 = 34 = 1 mod 11
        let o = Matrix::from_ints(
            &f,
            &[&[3, -5, 0, 0, 0], &[5, 3, 0, 0, 0], &[0, 0, 3, 5, 0], &[0, 0, -5, 3, 0], &[0, 0, 0, 0, 1]],
        );
        assert_eq!(o.transpose().try_mul(&o).unwrap(), Matrix::identity(&f, 5));
        let d = Matrix::diagonal(&f, &(1..=5).map(|x| f.int(x)).collect::<Vec<_>>());
        let b = o.try_mul(&d).unwrap().try_mul(&o.transpose()).unwrap();
        let p = QuadricPencil::new(Matrix::identity(&f, 5), b.clone()).unwrap();
        let dg = simultaneous_diagonalize(&p).unwrap();
        assert_eq!(dg.field, f);
        let mt = dg.m.transpose();
        for target in [p.a(), &b] {
            let c = mt.try_mul(target).unwrap().try_mul(&dg.m).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(c[(i, j)].is_zero(), i != j, "entry ({i},{j})");
                }
            }
        }
        // columns are eigenvectors of B: B v = (b_i / a_i) v
        for (i, (ai, bi)) in dg.pairs.iter().enumerate() {
            let v = dg.m.column(i);
            let ev = bi.try_div(ai).unwrap();
            assert_eq!(b.mul_vec(&v), v.iter().map(|x| x * &ev).collect::<Vec<_>>());
        }
        let mut evs: Vec<Scalar> = dg.pairs.iter().map(|(a, b)| b.try_div(a).unwrap()).collect();
        evs.sort();
        assert_eq!(evs, (1..=5).map(|x| f.int(x)).collect::<Vec<_>>());
    }

    #[test]
    fn reconstruct_checks_and_round_trips() {
        let q = Field::rationals();
        assert!(matches!(
            reconstruct(&NormalForm { lambda: q.zero(), mu: q.int(3) }),
            Err(Error::InvalidNormalForm(_))
        ));
        let nf = NormalForm::new(q.int(2), q.int(3)).unwrap();
        let p = reconstruct(&nf).unwrap();
        assert_eq!(p, normal_pencil(&q, 2, 3));
        assert!(canonical_invariant(&p).unwrap().contains(&nf));
    }

    #[test]
    fn unsplit_quintic_over_q_is_rejected() {
        let q = Field::rationals();
        // B = I; the leading block contributes z^2 - z - 1
        let a = Matrix::from_ints(
            &q,
            &[&[1, 1, 0, 0, 0], &[1, 0, 0, 0, 0], &[0, 0, 3, 0, 0], &[0, 0, 0, 5, 0], &[0, 0, 0, 0, 7]],
        );
        let p = QuadricPencil::new(a, Matrix::identity(&q, 5)).unwrap();
        assert!(matches!(splitting_field(&p), Err(Error::UnsupportedSplitting(_))));
    }

    #[test]
    fn irreducible_orbit_over_f5() {
        let f = Field::prime(5).unwrap();
        let p = crate::sample::pencil_with_shape(&f, &[5], 11).unwrap();
        let orbs = orbits(&p).unwrap();
        assert_eq!(orbs.len(), 1);
        assert_eq!(orbs[0].degree, 5);
        assert_eq!(orbs[0].residue_field.order_u64(), Some(3125));
        assert_eq!(orbs[0].points.len(), 5);
        let pts = degenerate_points(&p).unwrap();
        assert_eq!(pts.len(), 5);
        assert!(pts.iter().all(|d| d.diagonal_entries.len() == 4 && d.residue_degree == 5));
        // conjugate points share the square class of the ruling discriminant
        let classes: Vec<bool> = pts
            .iter()
            .map(|d| d.ruling_discriminant().is_square().unwrap())
            .collect();
        assert!(classes.iter().all(|&c| c == classes[0]));
        assert_eq!(splitting_field(&p).unwrap().degree(), 5);
    }
}
