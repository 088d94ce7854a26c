#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{require_smooth, QuadricPencil};
use crate::error::{Error, Result};
use crate::exactfield::{Embedding, Field, Matrix, Scalar};

/// Environment variable overriding the field-size guard of [`count_points`].
pub const GUARD_ENV: &str = "QDP4_POINTCOUNT_GUARD";
const DEFAULT_GUARD: u64 = 250;

pub fn pointcount_guard() -> u64 {
    std::env::var(GUARD_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_GUARD)
}

const NONE: u16 = u16::MAX;

/// Addition, multiplication and square-root tables of a small finite field,
/// elements indexed as in [`Field::from_index`].
struct Tables {
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    // one square root, or NONE
    sqrt: Vec<u16>,
    two: u16,
}

impl Tables {
    fn new(f: &Field) -> Tables {
        let q = f.order_u64().expect("finite field") as usize;
        let elems: Vec<Scalar> = (0..q as u64).map(|i| f.from_index(i)).collect();
        let idx = |s: &Scalar| s.to_index().expect("finite field") as u16;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for i in 0..q {
            for j in i..q {
                let s = idx(&(&elems[i] + &elems[j]));
                let m = idx(&(&elems[i] * &elems[j]));
                add[i * q + j] = s;
                add[j * q + i] = s;
                mul[i * q + j] = m;
                mul[j * q + i] = m;
            }
        }
        let neg = elems.iter().map(|e| idx(&-e)).collect();
        let inv = elems
            .iter()
            .map(|e| e.inv().map_or(NONE, |v| idx(&v)))
            .collect();
        let mut sqrt = vec![NONE; q];
        for i in 0..q {
            let sq = mul[i * q + i] as usize;
            if sqrt[sq] == NONE {
                sqrt[sq] = i as u16;
            }
        }
        Tables {
            q,
            add,
            mul,
            neg,
            inv,
            sqrt,
            two: idx(&f.int(2)),
        }
    }

    #[inline]
    fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }

    /// Roots of `a s^2 + b s + c`; `None` when the polynomial vanishes
    /// identically. Characteristic is odd.
    fn quadratic_roots(&self, a: u16, b: u16, c: u16) -> Option<([u16; 2], usize)> {
        if a == 0 {
            if b == 0 {
                return if c == 0 { None } else { Some(([0, 0], 0)) };
            }
            let r = self.mul(self.neg[c as usize], self.inv[b as usize]);
            return Some(([r, 0], 1));
        }
        let four_ac = self.mul(self.mul(self.two, self.two), self.mul(a, c));
        let disc = self.add(self.mul(b, b), self.neg[four_ac as usize]);
        let s = self.sqrt[disc as usize];
        if s == NONE {
            return Some(([0, 0], 0));
        }
        let inv2a = self.inv[self.mul(self.two, a) as usize];
        let nb = self.neg[b as usize];
        let r1 = self.mul(self.add(nb, s), inv2a);
        if disc == 0 {
            return Some(([r1, 0], 1));
        }
        let r2 = self.mul(self.add(nb, self.neg[s as usize]), inv2a);
        Some(([r1, r2], 2))
    }
}

struct Quadric {
    m: [[u16; 5]; 5],
}

impl Quadric {
    fn new(t: &Tables, m: &Matrix) -> Quadric {
        let mut out = [[0u16; 5]; 5];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = m[(i, j)].to_index().expect("finite field") as u16;
            }
        }
        let _ = t;
        Quadric { m: out }
    }

    // coefficients (a, b, c) of Q(v + s e4) = a s^2 + b s + c, v_4 = 0
    fn restrict(&self, t: &Tables, v: &[u16; 5]) -> (u16, u16, u16) {
        let mut c = 0u16;
        let mut lin = 0u16;
        for i in 0..4 {
            if v[i] == 0 {
                continue;
            }
            let mut row = 0u16;
            for j in 0..4 {
                row = t.add(row, t.mul(self.m[i][j], v[j]));
            }
            c = t.add(c, t.mul(v[i], row));
            lin = t.add(lin, t.mul(self.m[4][i], v[i]));
        }
        (self.m[4][4], t.mul(t.two, lin), c)
    }
}

fn count_line(t: &Tables, qa: &Quadric, qb: &Quadric, v: &[u16; 5]) -> u64 {
    let (aa, ab, ac) = qa.restrict(t, v);
    let (ba, bb, bc) = qb.restrict(t, v);
    let eval = |a: u16, b: u16, c: u16, s: u16| t.add(t.mul(t.add(t.mul(a, s), b), s), c);
    match (t.quadratic_roots(aa, ab, ac), t.quadratic_roots(ba, bb, bc)) {
        (None, None) => t.q as u64,
        (None, Some((_, n))) => n as u64,
        (Some((r, n)), _) => r[..n].iter().filter(|&&s| eval(ba, bb, bc, s) == 0).count() as u64,
    }
}

/// Number of points of the base locus over `F_{q^k}`, `q` the size of the
/// pencil's field, by enumerating P⁴.
///
/// Each point is normalized with first nonzero coordinate 1; the last
/// coordinate is solved from the quadratic equations.
pub fn count_points(p: &QuadricPencil, k: u32) -> Result<u64> {
    let base = p.field();
    let q = base
        .order_u64()
        .ok_or_else(|| Error::UnsupportedField("point counts need a finite field".into()))?;
    if k == 0 {
        return Err(Error::InvalidInput("extension degree must be at least 1".into()));
    }
    require_smooth(p)?;
    let guard = pointcount_guard();
    let size = q.checked_pow(k).filter(|&s| s <= guard).ok_or_else(|| {
        Error::ResourceLimit(format!(
            "field of size {q}^{k} exceeds the point-count guard {guard} (set {GUARD_ENV})"
        ))
    })?;
    if size > NONE as u64 {
        return Err(Error::ResourceLimit(format!("field of size {size} is too large for tables")));
    }
    let big = if k == 1 {
        base.clone()
    } else {
        Field::extension(base.characteristic(), base.degree() * k as usize)?
    };
    let emb = Embedding::new(base, &big)?;
    let t = Tables::new(&big);
    let qa = Quadric::new(&t, &p.a().map(&big, |x| emb.apply(x)));
    let qb = Quadric::new(&t, &p.b().map(&big, |x| emb.apply(x)));
    let qn = t.q as u16;

    let mut total = 0u64;
    // lead = index of the first nonzero coordinate
    for lead in 0..4 {
        let free = 3 - lead;
        let prefixes = (t.q as u64).pow(free as u32);
        let chunk = |hi: u64| -> u64 {
            // hi enumerates the first free coordinate (or the empty prefix)
            let rest = if free == 0 { 1 } else { prefixes / t.q as u64 };
            let mut sum = 0;
            for lo in 0..rest {
                let mut v = [0u16; 5];
                v[lead] = 1;
                let mut code = lo;
                for c in (lead + 1..4).rev() {
                    if c == lead + 1 {
                        v[c] = hi as u16;
                    } else {
                        v[c] = (code % t.q as u64) as u16;
                        code /= t.q as u64;
                    }
                }
                sum += count_line(&t, &qa, &qb, &v);
            }
            sum
        };
        let outer = if free == 0 { 1 } else { qn as u64 };
        #[cfg(feature = "parallel")]
        {
            total += (0..outer).into_par_iter().map(chunk).sum::<u64>();
        }
        #[cfg(not(feature = "parallel"))]
        {
            total += (0..outer).map(chunk).sum::<u64>();
        }
    }
    // the point e_4
    if qa.m[4][4] == 0 && qb.m[4][4] == 0 {
        total += 1;
    }
    Ok(total)
}
