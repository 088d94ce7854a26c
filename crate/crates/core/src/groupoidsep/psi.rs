use std::collections::BTreeMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{components, injective_on_iso_classes, Check, Groupoid, GroupoidFunctor, Witness};
use crate::error::{Error, Result};

/// Default cap on the number of generator assignments tried by
/// [`find_splitting`].
pub const DEFAULT_SEARCH_BOUND: u64 = 1 << 22;

/// Above this many `(x, y, u)` triples, [`independence_check`] varies `x`
/// and `y` one at a time. For a homomorphic `ψ` the value factors as
/// `L(y) ψ(w) R(x)`, so this is equivalent.
const FULL_PRODUCT_LIMIT: usize = 1 << 22;

/// A map `ψ: Aut(Φ(X)) -> Aut(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    pub object: usize,
    pub map: BTreeMap<usize, usize>,
}

impl Splitting {
    fn dense(&self, size: usize) -> Vec<Option<usize>> {
        let mut v = vec![None; size];
        for (&u, &f) in &self.map {
            if u < size {
                v[u] = Some(f);
            }
        }
        v
    }
}

/// Base object, chosen isomorphism `base -> X` per object, and splittings at
/// the base objects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choices {
    pub base: Vec<usize>,
    pub iso: Vec<usize>,
    pub splittings: Vec<Splitting>,
}

/// The family `Ψ_{X,Y}: Hom(Φ(X), Φ(Y)) -> Hom(X, Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Psi {
    maps: BTreeMap<(usize, usize), Vec<Option<usize>>>,
}

impl Psi {
    pub fn get(&self, x: usize, y: usize, u: usize) -> Option<usize> {
        self.maps.get(&(x, y)).and_then(|v| v.get(u).copied().flatten())
    }

    pub fn insert(&mut self, x: usize, y: usize, u: usize, f: usize) {
        let v = self.maps.entry((x, y)).or_default();
        if v.len() <= u {
            v.resize(u + 1, None);
        }
        v[u] = Some(f);
    }

    /// Number of defined entries.
    pub fn len(&self) -> usize {
        self.maps.values().map(|v| v.iter().flatten().count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .maps
            .iter()
            .map(|(&(x, y), v)| {
                let pairs: Vec<[usize; 2]> = v
                    .iter()
                    .enumerate()
                    .filter_map(|(u, f)| f.map(|f| [u, f]))
                    .collect();
                serde_json::json!({ "x": x, "y": y, "map": pairs })
            })
            .collect();
        serde_json::Value::Array(entries)
    }
}

fn check_splitting(
    c: &impl Groupoid,
    d: &impl Groupoid,
    phi: &GroupoidFunctor,
    s: &Splitting,
) -> Result<()> {
    let x = s.object;
    let fx = phi.obj(x);
    let bad = |what: &str, data: &[usize]| {
        Err(Error::InvalidSplitting(format!("{what} at object {x}: {data:?}")))
    };
    let dense = s.dense(d.morphism_count());
    let h = d.aut(fx);
    for &u in &h {
        match dense[u] {
            None => return bad("ψ undefined", &[u]),
            Some(f) if f >= c.morphism_count() || c.source(f) != x || c.target(f) != x => {
                return bad("ψ leaves Aut(X)", &[u, f])
            }
            _ => {}
        }
    }
    for f in c.aut(x) {
        if dense[phi.mor(f)] != Some(f) {
            return bad("ψ∘Φ is not the identity", &[f]);
        }
    }
    for &u in &h {
        for &v in &h {
            let lhs = dense[d.comp(v, u)].expect("total");
            if lhs != c.comp(dense[v].expect("total"), dense[u].expect("total")) {
                return bad("ψ is not multiplicative", &[v, u]);
            }
        }
    }
    Ok(())
}

fn element_order(g: &impl Groupoid, f: usize) -> usize {
    let id = g.identity(g.source(f));
    let mut k = 1;
    let mut p = f;
    while p != id {
        p = g.comp(f, p);
        k += 1;
    }
    k
}

/// Search for a left inverse of `Φ: Aut(x0) -> Aut(Φ(x0))` by assigning
/// images to a generating set. `ResourceLimit` if more than `bound`
/// assignments would be needed.
pub fn find_splitting(
    c: &impl Groupoid,
    d: &impl Groupoid,
    phi: &GroupoidFunctor,
    x0: usize,
    bound: u64,
) -> Result<Option<Splitting>> {
    let g = c.aut(x0);
    let h = d.aut(phi.obj(x0));
    let mut pos = vec![usize::MAX; d.morphism_count()];
    for (i, &u) in h.iter().enumerate() {
        pos[u] = i;
    }
    let id_h = d.identity(phi.obj(x0));
    // greedy generating set
    let mut gens: Vec<usize> = Vec::new();
    let mut reached = vec![false; h.len()];
    reached[pos[id_h]] = true;
    for &u in &h {
        if reached[pos[u]] {
            continue;
        }
        gens.push(u);
        let mut queue: Vec<usize> = h.iter().copied().filter(|&w| reached[pos[w]]).collect();
        while let Some(w) = queue.pop() {
            for &s in &gens {
                let sw = d.comp(s, w);
                if !reached[pos[sw]] {
                    reached[pos[sw]] = true;
                    queue.push(sw);
                }
            }
        }
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let pre: Vec<usize> = g.iter().copied().filter(|&f| phi.mor(f) == s).collect();
            if pre.is_empty() {
                let ord = element_order(d, s);
                g.iter().copied().filter(|&f| ord % element_order(c, f) == 0).collect()
            } else {
                pre
            }
        })
        .collect();
    let total = candidates
        .iter()
        .try_fold(1u64, |acc, v| acc.checked_mul(v.len() as u64))
        .unwrap_or(u64::MAX);
    if total == 0 {
        return Ok(None);
    }
    if total > bound {
        return Err(Error::ResourceLimit(format!(
            "{total} candidate splittings at object {x0}, bound {bound}"
        )));
    }
    let id_g = c.identity(x0);
    let mut choice = vec![0usize; gens.len()];
    loop {
        if let Some(map) = extend(c, d, &h, &pos, &gens, &candidates, &choice, id_h, id_g) {
            if g.iter().all(|&f| map[pos[phi.mor(f)]] == f) {
                let map = h.iter().copied().zip(map).collect();
                return Ok(Some(Splitting { object: x0, map }));
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(None);
            }
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    c: &impl Groupoid,
    d: &impl Groupoid,
    h: &[usize],
    pos: &[usize],
    gens: &[usize],
    candidates: &[Vec<usize>],
    choice: &[usize],
    id_h: usize,
    id_g: usize,
) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; h.len()];
    map[pos[id_h]] = id_g;
    let mut queue = vec![id_h];
    while let Some(w) = queue.pop() {
        let pw = map[pos[w]];
        for (k, &s) in gens.iter().enumerate() {
            let sw = pos[d.comp(s, w)];
            let val = c.comp(candidates[k][choice[k]], pw);
            if map[sw] == usize::MAX {
                map[sw] = val;
                queue.push(h[sw]);
            } else if map[sw] != val {
                return None;
            }
        }
    }
    Some(map)
}

/// Smallest object of each class as base, the first listed isomorphism, and
/// splittings found by [`find_splitting`].
pub fn standard_choices(
    c: &impl Groupoid,
    d: &impl Groupoid,
    phi: &GroupoidFunctor,
    bound: u64,
) -> Result<Choices> {
    let comp = components(c);
    let n = c.object_count();
    let base: Vec<usize> = (0..n)
        .map(|x| (0..n).find(|&y| comp[y] == comp[x]).expect("x itself"))
        .collect();
    let iso = (0..n)
        .map(|x| {
            if base[x] == x {
                c.identity(x)
            } else {
                c.hom(base[x], x)[0]
            }
        })
        .collect();
    let mut splittings = Vec::new();
    for x0 in (0..n).filter(|&x| base[x] == x) {
        match find_splitting(c, d, phi, x0, bound)? {
            Some(s) => splittings.push(s),
            None => {
                return Err(Error::InvalidSplitting(format!(
                    "Aut of object {x0} has no left inverse to Φ"
                )))
            }
        }
    }
    Ok(Choices { base, iso, splittings })
}

fn check_choices(c: &impl Groupoid, choices: &Choices) -> Result<()> {
    let n = c.object_count();
    let comp = components(c);
    if choices.base.len() != n || choices.iso.len() != n {
        return Err(Error::InvalidInput("choices do not cover every object".into()));
    }
    for x in 0..n {
        let b = choices.base[x];
        if b >= n || comp[b] != comp[x] || choices.base[b] != b {
            return Err(Error::InvalidInput(format!("bad base object for {x}")));
        }
        if (0..n).any(|y| comp[y] == comp[x] && choices.base[y] != b) {
            return Err(Error::InvalidInput(format!("two bases in the class of {x}")));
        }
        let i = choices.iso[x];
        if i >= c.morphism_count() || c.source(i) != b || c.target(i) != x {
            return Err(Error::InvalidInput(format!("iso for {x} is not a map from its base")));
        }
    }
    Ok(())
}

struct Builder<'a, C, D> {
    c: &'a C,
    d: &'a D,
    phi: &'a GroupoidFunctor,
}

impl<C: Groupoid, D: Groupoid> Builder<'_, C, D> {
    /// `y ψ(Φ(y)⁻¹ u Φ(x)) x⁻¹`
    fn value(&self, psi: &[Option<usize>], x: usize, y: usize, u: usize) -> usize {
        let (c, d, phi) = (self.c, self.d, self.phi);
        let w = d.comp(d.inv(phi.mor(y)), d.comp(u, phi.mor(x)));
        let p = psi[w].expect("total splitting");
        c.comp(y, c.comp(p, c.inv(x)))
    }
}

/// The family `Ψ_{X,Y}(u) = y ψ(Φ(y)⁻¹ u Φ(x)) x⁻¹`.
pub fn build_psi(
    c: &impl Groupoid,
    d: &impl Groupoid,
    phi: &GroupoidFunctor,
    choices: &Choices,
) -> Result<Psi> {
    injective_on_iso_classes(c, d, phi)
        .map_err(|w| Error::InvalidInput(format!("Φ is not injective on iso classes: {w}")))?;
    check_choices(c, choices)?;
    let mut dense = BTreeMap::new();
    for s in &choices.splittings {
        check_splitting(c, d, phi, s)?;
        dense.insert(s.object, s.dense(d.morphism_count()));
    }
    let b = Builder { c, d, phi };
    let n = c.object_count();
    let mut out = Psi { maps: BTreeMap::new() };
    for x in 0..n {
        for y in 0..n {
            let hom = d.hom(phi.obj(x), phi.obj(y));
            if choices.base[x] != choices.base[y] {
                continue;
            }
            let psi = dense.get(&choices.base[x]).ok_or_else(|| {
                Error::InvalidSplitting(format!("no splitting at base {}", choices.base[x]))
            })?;
            let mut v = vec![None; hom.iter().max().map_or(0, |m| m + 1)];
            for u in hom {
                v[u] = Some(b.value(psi, choices.iso[x], choices.iso[y], u));
            }
            out.maps.insert((x, y), v);
        }
    }
    Ok(out)
}

fn first_failure<F>(items: &[usize], f: F) -> Check
where
    F: Fn(usize) -> Check + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let found = items.par_iter().find_map_first(|&i| f(i).err());
    #[cfg(not(feature = "parallel"))]
    let found = items.iter().find_map(|&i| f(i).err());
    found.map_or(Ok(()), Err)
}

/// Totality, (s1) and (s3), exhaustively.
pub fn verify_heavy_separability(
    c: &impl Groupoid,
    d: &impl Groupoid,
    phi: &GroupoidFunctor,
    psi: &Psi,
) -> Check {
    let n = c.object_count();
    for x in 0..n {
        for y in 0..n {
            for u in d.hom(phi.obj(x), phi.obj(y)) {
                match psi.get(x, y, u) {
                    Some(f) if f < c.morphism_count() && c.source(f) == x && c.target(f) == y => {}
                    _ => return Err(Witness::new("Ψ undefined or off its hom-set", vec![x, y, u])),
                }
            }
        }
    }
    for f in 0..c.morphism_count() {
        if psi.get(c.source(f), c.target(f), phi.mor(f)) != Some(f) {
            return Err(Witness::new("(s1) Ψ(Φ(f)) != f", vec![f]));
        }
    }
    for x in 0..n {
        for y in 0..n {
            let us = d.hom(phi.obj(x), phi.obj(y));
            for z in 0..n {
                let vs = d.hom(phi.obj(y), phi.obj(z));
                first_failure(&us, |u| {
                    let pu = psi.get(x, y, u).expect("total");
                    for &v in &vs {
                        let lhs = psi.get(x, z, d.comp(v, u)).expect("total");
                        if lhs != c.comp(psi.get(y, z, v).expect("total"), pu) {
                            return Err(Witness::new("(s3) Ψ(vu) != Ψ(v)Ψ(u)", vec![x, y, z, u, v]));
                        }
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(())
}

/// (s2): `Ψ(Φ(b) u Φ(a)) = b Ψ(u) a`, exhaustively. Expects a total `Ψ`.
pub fn verify_s2(c: &impl Groupoid, d: &impl Groupoid, phi: &GroupoidFunctor, psi: &Psi) -> Check {
    let n = c.object_count();
    for x in 0..n {
        for y in 0..n {
            let us = d.hom(phi.obj(x), phi.obj(y));
            for x1 in 0..n {
                let as_ = c.hom(x1, x);
                for y1 in 0..n {
                    let bs = c.hom(y, y1);
                    for &a in &as_ {
                        for &b in &bs {
                            for &u in &us {
                                let w = d.comp(phi.mor(b), d.comp(u, phi.mor(a)));
                                let rhs = c.comp(b, c.comp(psi.get(x, y, u).expect("total"), a));
                                if psi.get(x1, y1, w) != Some(rhs) {
                                    return Err(Witness::new("(s2) naturality fails", vec![a, b, u]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// `ψ_X(w) = x ψ_{X0}(Φ(x)⁻¹ w Φ(x)) x⁻¹` for every object.
pub fn transport_splittings(
    c: &impl Groupoid,
    d: &impl Groupoid,
    phi: &GroupoidFunctor,
    choices: &Choices,
) -> Result<Vec<Splitting>> {
    check_choices(c, choices)?;
    let b = Builder { c, d, phi };
    (0..c.object_count())
        .map(|x| {
            let x0 = choices.base[x];
            let s = choices
                .splittings
                .iter()
                .find(|s| s.object == x0)
                .ok_or_else(|| Error::InvalidSplitting(format!("no splitting at base {x0}")))?;
            let psi = s.dense(d.morphism_count());
            let i = choices.iso[x];
            let map = d
                .aut(phi.obj(x))
                .into_iter()
                .map(|w| (w, b.value(&psi, i, i, w)))
                .collect();
            Ok(Splitting { object: x, map })
        })
        .collect()
}

/// With one splitting per object satisfying the conjugation squares, `Ψ`
/// does not depend on the base objects or the isomorphisms chosen. The outer
/// error reports a failed precondition; the inner [`Check`] the comparison.
pub fn independence_check(
    c: &impl Groupoid,
    d: &impl Groupoid,
    phi: &GroupoidFunctor,
    family: &[Splitting],
) -> Result<Check> {
    let n = c.object_count();
    let mut dense: Vec<Option<Vec<Option<usize>>>> = vec![None; n];
    for s in family {
        if s.object >= n || dense[s.object].is_some() {
            return Err(Error::InvalidInput(format!("splitting for object {} is misplaced", s.object)));
        }
        check_splitting(c, d, phi, s)?;
        dense[s.object] = Some(s.dense(d.morphism_count()));
    }
    let dense: Vec<Vec<Option<usize>>> = dense
        .into_iter()
        .enumerate()
        .map(|(x, v)| v.ok_or_else(|| Error::InvalidInput(format!("no splitting for object {x}"))))
        .collect::<Result<_>>()?;
    injective_on_iso_classes(c, d, phi)
        .map_err(|w| Error::InvalidInput(format!("Φ is not injective on iso classes: {w}")))?;
    // compatibility squares
    let all: Vec<usize> = (0..c.morphism_count()).collect();
    first_failure(&all, |a| {
        let (x, x1) = (c.source(a), c.target(a));
        let (fa, fai, ai) = (phi.mor(a), d.inv(phi.mor(a)), c.inv(a));
        for w in d.aut(phi.obj(x)) {
            let lhs = dense[x1][d.comp(fa, d.comp(w, fai))];
            let rhs = c.comp(a, c.comp(dense[x][w].expect("total"), ai));
            if lhs != Some(rhs) {
                return Err(Witness::new("compatibility square fails", vec![a, w]));
            }
        }
        Ok(())
    })
    .map_err(|w| Error::InvalidSplitting(w.to_string()))?;

    let b = Builder { c, d, phi };
    let comp = components(c);
    for x in 0..n {
        for y in (0..n).filter(|&y| comp[y] == comp[x]) {
            let us = d.hom(phi.obj(x), phi.obj(y));
            let class: Vec<usize> = (0..n).filter(|&z| comp[z] == comp[x]).collect();
            let reference: Vec<usize> = {
                let x0 = class[0];
                let (i, j) = (c.hom(x0, x)[0], c.hom(x0, y)[0]);
                us.iter().map(|&u| b.value(&dense[x0], i, j, u)).collect()
            };
            for &x0 in &class {
                let xs = c.hom(x0, x);
                let ys = c.hom(x0, y);
                let pairs: Vec<(usize, usize)> =
                    if xs.len() * ys.len() * us.len().max(1) <= FULL_PRODUCT_LIMIT {
                        xs.iter().flat_map(|&i| ys.iter().map(move |&j| (i, j))).collect()
                    } else {
                        xs.iter()
                            .map(|&i| (i, ys[0]))
                            .chain(ys.iter().map(|&j| (xs[0], j)))
                            .collect()
                    };
                let idx: Vec<usize> = (0..pairs.len()).collect();
                let check = first_failure(&idx, |k| {
                    let (i, j) = pairs[k];
                    for (t, &u) in us.iter().enumerate() {
                        if b.value(&dense[x0], i, j, u) != reference[t] {
                            return Err(Witness::new("Ψ depends on the choices", vec![x0, x, y, i, j, u]));
                        }
                    }
                    Ok(())
                });
                if check.is_err() {
                    return Ok(check);
                }
            }
        }
    }
    Ok(Ok(()))
}
