use std::fmt;

use super::ProjPoint;
use crate::error::{Error, Result};
use crate::exactfield::{Embedding, Field, Scalar};

/// A projective-linear map `z -> (a z + b) / (c z + d)`.
///
/// The stored matrix is the representative whose first nonzero entry is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Moebius {
    m: [Scalar; 4],
}

impl fmt::Debug for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl fmt::Display for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Moebius {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Moebius> {
        let field = a.field().clone();
        if [&b, &c, &d].iter().any(|x| x.field() != &field) {
            return Err(Error::DescriptorMismatch(field.to_string(), "mixed entries".into()));
        }
        let det = &(&a * &d) - &(&b * &c);
        if det.is_zero() {
            return Err(Error::DegenerateInput("singular Moebius matrix".into()));
        }
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("nonsingular")
            .inv()?;
        Ok(Moebius {
            m: [&a * &lead, &b * &lead, &c * &lead, &d * &lead],
        })
    }

    pub fn identity(field: &Field) -> Moebius {
        Moebius {
            m: [field.one(), field.zero(), field.zero(), field.one()],
        }
    }

    pub fn field(&self) -> &Field {
        self.m[0].field()
    }

    /// Entries `[a, b, c, d]` of the normalized matrix.
    pub fn entries(&self) -> &[Scalar; 4] {
        &self.m
    }

    pub fn is_identity(&self) -> bool {
        self.m[0].is_one() && self.m[1].is_zero() && self.m[2].is_zero() && self.m[3].is_one()
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let [a, b, c, d] = &self.m;
        let (x, y) = p.coords();
        ProjPoint::new(&(a * x) + &(b * y), &(c * x) + &(d * y)).expect("invertible map")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Moebius::new(
            &(a * e) + &(b * g),
            &(a * f) + &(b * h),
            &(c * e) + &(d * g),
            &(c * f) + &(d * h),
        )
        .expect("product of invertible maps")
    }

    pub fn inverse(&self) -> Moebius {
        let [a, b, c, d] = &self.m;
        Moebius::new(d.clone(), -b, -c, a.clone()).expect("invertible map")
    }

    /// The unique map sending `p, q, r` to infinity, 0, 1.
    pub fn to_standard(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> Result<Moebius> {
        // L_u(z) = z_x u_y - z_y u_x vanishes exactly at u
        let l = |u: &ProjPoint, z: &ProjPoint| {
            let (ux, uy) = u.coords();
            let (zx, zy) = z.coords();
            &(zx * uy) - &(zy * ux)
        };
        let lp_r = l(p, r);
        let lq_r = l(q, r);
        if lp_r.is_zero() || lq_r.is_zero() || l(p, q).is_zero() {
            return Err(Error::DegenerateInput("three points must be distinct".into()));
        }
        let (px, py) = p.coords();
        let (qx, qy) = q.coords();
        Moebius::new(
            qy * &lp_r,
            &(-qx) * &lp_r,
            py * &lq_r,
            &(-px) * &lq_r,
        )
    }

    /// The unique map sending the triple `src` to the triple `dst` in order.
    pub fn three_point(src: [&ProjPoint; 3], dst: [&ProjPoint; 3]) -> Result<Moebius> {
        let s = Moebius::to_standard(src[0], src[1], src[2])?;
        let t = Moebius::to_standard(dst[0], dst[1], dst[2])?;
        Ok(t.inverse().compose(&s))
    }

    pub fn embed(&self, emb: &Embedding) -> Moebius {
        let [a, b, c, d] = &self.m;
        Moebius {
            m: [emb.apply(a), emb.apply(b), emb.apply(c), emb.apply(d)],
        }
    }

    /// Whether the normalized matrix has entries in the image of `emb`.
    pub fn defined_over(&self, emb: &Embedding) -> bool {
        self.m.iter().all(|x| emb.contains(x))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let [a, b, c, d] = &self.m;
        serde_json::json!([[a.to_json(), b.to_json()], [c.to_json(), d.to_json()]])
    }
}
