//! Seeded random generators for pencils, matrices and field elements, used by
//! the property suites and the self-test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactfield::{factor, Field, Matrix, Scalar};
use crate::pencil::{discriminant_quintic, is_smooth, QuadricPencil};
use crate::wpline::ProjPoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform over a finite field; small integers over Q.
pub fn scalar<R: Rng>(f: &Field, rng: &mut R) -> Scalar {
    match f.order_u64() {
        Some(q) => f.from_index(rng.gen_range(0..q)),
        None => f.int(rng.gen_range(-6..=6)),
    }
}

pub fn nonzero_scalar<R: Rng>(f: &Field, rng: &mut R) -> Scalar {
    loop {
        let x = scalar(f, rng);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn symmetric<R: Rng>(f: &Field, n: usize, rng: &mut R) -> Matrix {
    let mut m = Matrix::zeros(f, n, n);
    for i in 0..n {
        for j in i..n {
            let v = scalar(f, rng);
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}

pub fn invertible<R: Rng>(f: &Field, n: usize, rng: &mut R) -> Matrix {
    loop {
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = scalar(f, rng);
            }
        }
        if m.rank() == n {
            return m;
        }
    }
}

/// Entries `[alpha, beta, gamma, delta]` of an invertible 2×2 matrix.
pub fn gl2<R: Rng>(f: &Field, rng: &mut R) -> [Scalar; 4] {
    loop {
        let g = [scalar(f, rng), scalar(f, rng), scalar(f, rng), scalar(f, rng)];
        if !(&(&g[0] * &g[3]) - &(&g[1] * &g[2])).is_zero() {
            return g;
        }
    }
}

/// Random congruence and pencil-basis change of `p`.
pub fn disguise<R: Rng>(p: &QuadricPencil, rng: &mut R) -> QuadricPencil {
    let f = p.field().clone();
    let m = invertible(&f, 5, rng);
    let g = gl2(&f, rng);
    p.congruence(&m)
        .and_then(|q| q.basis_change([&g[0], &g[1], &g[2], &g[3]]))
        .expect("invertible changes keep a pencil valid")
}

/// The diagonal pencil with degenerate members at the given parameters.
pub fn diagonal_pencil<R: Rng>(params: &[ProjPoint], rng: &mut R) -> Result<QuadricPencil> {
    let f = params
        .first()
        .ok_or_else(|| Error::InvalidInput("no parameters".into()))?
        .field()
        .clone();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for z in params {
        // (t0 : t1) = (b : a) and z = t1 / t0
        let c = nonzero_scalar(&f, rng);
        let (x, y) = z.coords();
        a.push(x * &c);
        b.push(y * &c);
    }
    QuadricPencil::diagonal(&a, &b)
}

/// A smooth pencil whose five degenerate members are rational, disguised by
/// random changes of coordinates. Needs at least five points on P¹.
pub fn split_pencil<R: Rng>(f: &Field, rng: &mut R) -> Result<QuadricPencil> {
    let q = f
        .order_u64()
        .ok_or_else(|| Error::UnsupportedField("split_pencil samples finite fields".into()))?;
    if q < 4 {
        return Err(Error::InvalidInput(format!("P1 over {f} has fewer than 5 points")));
    }
    let mut pts: Vec<ProjPoint> = Vec::new();
    while pts.len() < 5 {
        let idx = rng.gen_range(0..=q);
        let z = if idx == q {
            ProjPoint::infinity(f)
        } else {
            ProjPoint::finite(f.from_index(idx))
        };
        if !pts.contains(&z) {
            pts.push(z);
        }
    }
    Ok(disguise(&diagonal_pencil(&pts, rng)?, rng))
}

/// Rejection-sampled smooth pencil with dense random matrices.
pub fn smooth_pencil<R: Rng>(f: &Field, rng: &mut R) -> QuadricPencil {
    loop {
        let a = symmetric(f, 5, rng);
        let b = symmetric(f, 5, rng);
        if let Ok(p) = QuadricPencil::new(a, b) {
            if is_smooth(&p) {
                return p;
            }
        }
    }
}

/// First smooth pencil (from `seed`) whose discriminant factor degrees,
/// sorted descending, equal `shape`. The point at infinity counts as degree 1.
pub fn pencil_with_shape(f: &Field, shape: &[usize], seed: u64) -> Result<QuadricPencil> {
    let mut want = shape.to_vec();
    want.sort_unstable_by(|a, b| b.cmp(a));
    let mut r = rng(seed);
    for _ in 0..20_000 {
        let p = smooth_pencil(f, &mut r);
        let g = discriminant_quintic(&p)?;
        let mut degs: Vec<usize> = factor(&g)?
            .iter()
            .map(|(h, _)| h.degree().unwrap_or(0))
            .collect();
        if g.degree() == Some(4) {
            degs.push(1);
        }
        degs.sort_unstable_by(|a, b| b.cmp(a));
        if degs == want {
            return Ok(p);
        }
    }
    Err(Error::ResourceLimit(format!("no pencil with shape {shape:?} found over {f}")))
}
