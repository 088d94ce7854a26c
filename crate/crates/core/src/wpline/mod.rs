//! Five points on the projective line: the weighted projective line of type
//! (2,2,2,2,2) underlying a quartic del Pezzo surface.

mod moebius;

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactfield::{Embedding, Field, Scalar};

pub use moebius::Moebius;

/// A point `[x : y]` of P¹ with affine coordinate `z = x / y`.
///
/// Stored normalized: `[z : 1]` for finite points and `[1 : 0]` for infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    x: Scalar,
    y: Scalar,
}

impl ProjPoint {
    pub fn new(x: Scalar, y: Scalar) -> Result<ProjPoint> {
        if x.field() != y.field() {
            return Err(Error::DescriptorMismatch(x.field().to_string(), y.field().to_string()));
        }
        if y.is_zero() {
            if x.is_zero() {
                return Err(Error::DegenerateInput("[0 : 0] is not a point".into()));
            }
            return Ok(ProjPoint::infinity(x.field()));
        }
        let z = x.try_div(&y)?;
        Ok(ProjPoint::finite(z))
    }

    pub fn finite(z: Scalar) -> ProjPoint {
        let one = z.field().one();
        ProjPoint { x: z, y: one }
    }

    pub fn infinity(field: &Field) -> ProjPoint {
        ProjPoint {
            x: field.one(),
            y: field.zero(),
        }
    }

    pub fn field(&self) -> &Field {
        self.x.field()
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    /// Affine coordinate, `None` at infinity.
    pub fn value(&self) -> Option<&Scalar> {
        (!self.is_infinity()).then_some(&self.x)
    }

    pub fn coords(&self) -> (&Scalar, &Scalar) {
        (&self.x, &self.y)
    }

    pub fn embed(&self, emb: &Embedding) -> ProjPoint {
        ProjPoint {
            x: emb.apply(&self.x),
            y: emb.apply(&self.y),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(vec![self.x.to_json(), self.y.to_json()])
    }

    pub fn from_json(field: &Field, value: &serde_json::Value) -> Result<ProjPoint> {
        match value.as_array().map(Vec::as_slice) {
            Some([x, y]) => ProjPoint::new(Scalar::from_json(field, x)?, Scalar::from_json(field, y)?),
            _ => Err(Error::Parse(format!("expected a pair [x, y], got {value}"))),
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(z) => write!(f, "{z}"),
        }
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Infinity first, then the scalar order on affine coordinates.
impl Ord for ProjPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.value(), other.value()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp(b),
        }
    }
}

/// Permutation of five labels, `perm[i]` is the image of `i`.
pub type Perm5 = [u8; 5];

/// The 120 permutations of five labels in lexicographic order.
pub fn all_perms5() -> Vec<Perm5> {
    let mut out = Vec::with_capacity(120);
    let mut cur = [0u8, 1, 2, 3, 4];
    loop {
        out.push(cur);
        let Some(i) = (0..4).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..5).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

/// Five distinct points of P¹ over one field, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointConfiguration {
    field: Field,
    points: Vec<ProjPoint>,
}

impl PointConfiguration {
    pub fn new(field: &Field, points: Vec<ProjPoint>) -> Result<PointConfiguration> {
        if points.len() != 5 {
            return Err(Error::InvalidInput(format!(
                "a configuration has 5 points, got {}",
                points.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| p.field() != field) {
            return Err(Error::DescriptorMismatch(field.to_string(), p.field().to_string()));
        }
        let mut points = points;
        points.sort();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("configuration points must be distinct".into()));
        }
        Ok(PointConfiguration {
            field: field.clone(),
            points,
        })
    }

    /// Configuration from affine values, `None` standing for infinity.
    pub fn from_values(field: &Field, values: &[Option<Scalar>]) -> Result<PointConfiguration> {
        let pts = values
            .iter()
            .map(|v| match v {
                None => ProjPoint::infinity(field),
                Some(z) => ProjPoint::finite(z.clone()),
            })
            .collect();
        PointConfiguration::new(field, pts)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn index_of(&self, p: &ProjPoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn embed(&self, emb: &Embedding) -> PointConfiguration {
        PointConfiguration::new(
            emb.target(),
            self.points.iter().map(|p| p.embed(emb)).collect(),
        )
        .expect("embeddings are injective")
    }

    /// Image under `m` if it is again this configuration, as a permutation
    /// of the sorted labels.
    pub fn induced_perm(&self, m: &Moebius) -> Option<Perm5> {
        let mut perm = [0u8; 5];
        for (i, p) in self.points.iter().enumerate() {
            perm[i] = self.index_of(&m.apply(p))? as u8;
        }
        Some(perm)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": self.field.to_json(),
            "points": self.points.iter().map(ProjPoint::to_json).collect::<Vec<_>>(),
        })
    }

    /// Accepts `{"field": .., "points": [[x, y], ..]}` or a bare list of
    /// pairs read over `default_field`.
    pub fn from_json(value: &serde_json::Value, default_field: Option<&Field>) -> Result<PointConfiguration> {
        let (field, pts) = match value {
            serde_json::Value::Array(_) => (
                default_field
                    .cloned()
                    .ok_or_else(|| Error::Parse("configuration list needs a field".into()))?,
                value,
            ),
            _ => (
                Field::from_json(
                    value
                        .get("field")
                        .ok_or_else(|| Error::Parse("configuration needs a field".into()))?,
                )?,
                value
                    .get("points")
                    .ok_or_else(|| Error::Parse("configuration needs points".into()))?,
            ),
        };
        let pts = pts
            .as_array()
            .ok_or_else(|| Error::Parse("points must be a list".into()))?
            .iter()
            .map(|v| ProjPoint::from_json(&field, v))
            .collect::<Result<Vec<_>>>()?;
        PointConfiguration::new(&field, pts)
    }

    // The 60 maps sending the first three points of `self` to an ordered
    // triple of `other`, in lexicographic order of the target triple.
    fn candidates<'a>(&'a self, other: &'a PointConfiguration) -> impl Iterator<Item = Moebius> + 'a {
        let src = [&self.points[0], &self.points[1], &self.points[2]];
        (0..5).flat_map(move |i| {
            (0..5).flat_map(move |j| {
                (0..5).filter_map(move |k| {
                    if i == j || j == k || i == k {
                        return None;
                    }
                    let dst = [&other.points[i], &other.points[j], &other.points[k]];
                    Some(Moebius::three_point(src, dst).expect("distinct triples"))
                })
            })
        })
    }
}

/// A Möbius map carrying `c1` onto `c2` as sets, if one exists.
pub fn pgl2_match(c1: &PointConfiguration, c2: &PointConfiguration) -> Result<Option<Moebius>> {
    if c1.field != c2.field {
        return Err(Error::DescriptorMismatch(c1.field.to_string(), c2.field.to_string()));
    }
    Ok(c1
        .candidates(c2)
        .find(|m| c1.points.iter().all(|p| c2.index_of(&m.apply(p)).is_some())))
}

/// The stabilizer of the point set in PGL₂ of the configuration's field,
/// with induced permutations. The identity comes first.
pub fn aut_group(c: &PointConfiguration) -> Vec<(Moebius, Perm5)> {
    c.candidates(c)
        .filter_map(|m| c.induced_perm(&m).map(|perm| (m, perm)))
        .collect()
}

/// Applies `m` to `p`.
pub fn apply(m: &Moebius, p: &ProjPoint) -> ProjPoint {
    m.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(field: &Field, vals: &[Option<i64>]) -> PointConfiguration {
        let vals: Vec<Option<Scalar>> = vals.iter().map(|v| v.map(|z| field.int(z))).collect();
        PointConfiguration::from_values(field, &vals).unwrap()
    }

    #[test]
    fn reflection_about_three_halves() {
        let q = Field::rationals();
        let c = cfg(&q, &[None, Some(0), Some(1), Some(2), Some(3)]);
        // z -> 3 - z
        let m = Moebius::new(q.int(-1), q.int(3), q.zero(), q.one()).unwrap();
        let imgs: Vec<ProjPoint> = c.points().iter().map(|p| apply(&m, p)).collect();
        assert_eq!(imgs[0], ProjPoint::infinity(&q));
        assert_eq!(imgs[1], ProjPoint::finite(q.int(3)));
        assert_eq!(c.induced_perm(&m), Some([0, 4, 3, 2, 1]));
        let aut = aut_group(&c);
        assert_eq!(aut.len(), 2);
        assert!(aut[0].0.is_identity());
        assert_eq!(aut[1].0, m);
    }

    #[test]
    fn inversion_sends_zero_to_infinity() {
        let q = Field::rationals();
        let m = Moebius::new(q.zero(), q.one(), q.one(), q.zero()).unwrap();
        assert!(apply(&m, &ProjPoint::finite(q.zero())).is_infinity());
    }

    #[test]
    fn match_and_nonmatch() {
        let q = Field::rationals();
        let a = cfg(&q, &[None, Some(0), Some(1), Some(2), Some(3)]);
        let b = cfg(&q, &[None, Some(0), Some(1), Some(2), Some(5)]);
        assert!(pgl2_match(&a, &b).unwrap().is_none());
        assert!(pgl2_match(&a, &a).unwrap().unwrap().is_identity());
    }

    #[test]
    fn json_round_trip() {
        let f = Field::prime(11).unwrap();
        let c = cfg(&f, &[None, Some(0), Some(1), Some(4), Some(9)]);
        let back = PointConfiguration::from_json(&c.to_json(), None).unwrap();
        assert_eq!(back, c);
        let bare = serde_json::json!([[1, 0], [0, 1], [1, 1], [4, 1], [18, 2]]);
        assert_eq!(PointConfiguration::from_json(&bare, Some(&f)).unwrap(), c);
    }

    #[test]
    fn rejects_repeated_points() {
        let q = Field::rationals();
        let vals = [None, Some(q.zero()), Some(q.one()), Some(q.int(2)), Some(q.int(2))];
        assert!(PointConfiguration::from_values(&q, &vals).is_err());
    }
}
