//! Finite groupoids, functors between them, and heavily separable
//! structures.
//!
//! Morphisms are numbered `0..morphism_count()`. Composition is written
//! `compose(g, f) = g ∘ f` and is defined iff `source(g) == target(f)`.

mod psi;
pub mod random;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperoct::{SignedPerm, ORDER_B5};

pub use psi::{
    build_psi, find_splitting, independence_check, standard_choices, transport_splittings,
    verify_heavy_separability, verify_s2, Choices, Psi, Splitting, DEFAULT_SEARCH_BOUND,
};

/// A failed axiom together with the morphisms or objects that violate it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub condition: String,
    pub data: Vec<usize>,
}

impl Witness {
    pub fn new(condition: impl Into<String>, data: Vec<usize>) -> Witness {
        Witness {
            condition: condition.into(),
            data,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.condition, self.data)
    }
}

/// `Ok(())` or the first violation found.
pub type Check = std::result::Result<(), Witness>;

pub trait Groupoid: Sync {
    fn object_count(&self) -> usize;
    fn morphism_count(&self) -> usize;
    fn source(&self, f: usize) -> usize;
    fn target(&self, f: usize) -> usize;
    /// `g ∘ f`; `None` when the pair is not composable or the table has no entry.
    fn compose(&self, g: usize, f: usize) -> Option<usize>;
    fn identity(&self, x: usize) -> usize;

    fn inverse(&self, f: usize) -> Option<usize> {
        let (x, y) = (self.source(f), self.target(f));
        self.hom(y, x).into_iter().find(|&g| {
            self.compose(g, f) == Some(self.identity(x))
                && self.compose(f, g) == Some(self.identity(y))
        })
    }

    fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.morphism_count())
            .filter(|&f| self.source(f) == x && self.target(f) == y)
            .collect()
    }

    fn aut(&self, x: usize) -> Vec<usize> {
        self.hom(x, x)
    }

    /// Composition that is known to be defined.
    fn comp(&self, g: usize, f: usize) -> usize {
        self.compose(g, f).expect("composable morphisms")
    }

    fn inv(&self, f: usize) -> usize {
        self.inverse(f).expect("invertible morphism")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub source: usize,
    pub target: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupoidJson {
    objects: Vec<String>,
    morphisms: Vec<MorphismSpec>,
    identities: Vec<usize>,
    /// Triples `[g, f, g∘f]`.
    composition: Vec<[usize; 3]>,
}

/// A groupoid given by explicit tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGroupoid {
    objects: Vec<String>,
    morphisms: Vec<MorphismSpec>,
    identities: Vec<usize>,
    table: Vec<Option<usize>>,
    homs: Vec<Vec<usize>>,
    inverses: Vec<Option<usize>>,
}

impl TableGroupoid {
    /// Checks index ranges and duplicate entries only; axioms are checked by
    /// [`validate`].
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<MorphismSpec>,
        identities: Vec<usize>,
        composition: &[[usize; 3]],
    ) -> Result<TableGroupoid> {
        let n = objects.len();
        let m = morphisms.len();
        if identities.len() != n {
            return Err(Error::InvalidInput(format!("{} identities for {n} objects", identities.len())));
        }
        if let Some(f) = morphisms.iter().find(|f| f.source >= n || f.target >= n) {
            return Err(Error::InvalidInput(format!("morphism {f:?} has an unknown endpoint")));
        }
        if let Some(&i) = identities.iter().find(|&&i| i >= m) {
            return Err(Error::InvalidInput(format!("identity {i} is not a morphism")));
        }
        let mut table = vec![None; m * m];
        for &[g, f, h] in composition {
            if g >= m || f >= m || h >= m {
                return Err(Error::InvalidInput(format!("composition entry {:?} out of range", [g, f, h])));
            }
            if table[g * m + f].replace(h).is_some() {
                return Err(Error::InvalidInput(format!("composition {g}∘{f} given twice")));
            }
        }
        let mut homs = vec![Vec::new(); n * n];
        for (i, f) in morphisms.iter().enumerate() {
            homs[f.source * n + f.target].push(i);
        }
        let mut g = TableGroupoid {
            objects,
            morphisms,
            identities,
            table,
            homs,
            inverses: Vec::new(),
        };
        g.inverses = (0..m)
            .map(|f| {
                let (x, y) = (g.source(f), g.target(f));
                g.hom(y, x).into_iter().find(|&h| {
                    g.compose(h, f) == Some(g.identity(x)) && g.compose(f, h) == Some(g.identity(y))
                })
            })
            .collect();
        Ok(g)
    }

    /// The one-object groupoid of a group with multiplication table `mul`.
    pub fn from_group(mul: &[Vec<usize>], identity: usize) -> Result<TableGroupoid> {
        Self::indiscrete_product(mul, identity, 1)
    }

    /// `G × (indiscrete groupoid on n objects)`: morphism `(g, a -> b)` has
    /// index `(a * n + b) * |G| + g`.
    pub fn indiscrete_product(mul: &[Vec<usize>], identity: usize, n: usize) -> Result<TableGroupoid> {
        let k = mul.len();
        if k == 0 || n == 0 || mul.iter().any(|r| r.len() != k || r.iter().any(|&x| x >= k)) {
            return Err(Error::InvalidInput("malformed group table".into()));
        }
        let idx = |g: usize, a: usize, b: usize| (a * n + b) * k + g;
        let mut morphisms = Vec::with_capacity(n * n * k);
        for a in 0..n {
            for b in 0..n {
                for g in 0..k {
                    morphisms.push(MorphismSpec {
                        name: None,
                        source: a,
                        target: b,
                    });
                    debug_assert_eq!(morphisms.len() - 1, idx(g, a, b));
                }
            }
        }
        let mut comp = Vec::with_capacity(n * n * n * k * k);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for g in 0..k {
                        for h in 0..k {
                            comp.push([idx(g, b, c), idx(h, a, b), idx(mul[g][h], a, c)]);
                        }
                    }
                }
            }
        }
        let objects = (0..n).map(|a| format!("x{a}")).collect();
        let identities = (0..n).map(|a| idx(identity, a, a)).collect();
        TableGroupoid::new(objects, morphisms, identities, &comp)
    }

    /// Disjoint union; morphisms and objects of later parts are shifted.
    pub fn disjoint_union(parts: &[TableGroupoid]) -> Result<TableGroupoid> {
        let mut objects = Vec::new();
        let mut morphisms = Vec::new();
        let mut identities = Vec::new();
        let mut comp = Vec::new();
        for p in parts {
            let (no, nm) = (objects.len(), morphisms.len());
            objects.extend(p.objects.iter().cloned());
            morphisms.extend(p.morphisms.iter().map(|f| MorphismSpec {
                name: f.name.clone(),
                source: f.source + no,
                target: f.target + no,
            }));
            identities.extend(p.identities.iter().map(|i| i + nm));
            comp.extend(p.composition().into_iter().map(|t| t.map(|i| i + nm)));
        }
        TableGroupoid::new(objects, morphisms, identities, &comp)
    }

    /// Renumber morphisms: old morphism `f` becomes `perm[f]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<TableGroupoid> {
        let m = self.morphisms.len();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&i| i >= m || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidInput("relabelling is not a permutation".into()));
        }
        let mut morphisms = self.morphisms.clone();
        for (f, spec) in self.morphisms.iter().enumerate() {
            morphisms[perm[f]] = spec.clone();
        }
        let comp: Vec<[usize; 3]> = self
            .composition()
            .into_iter()
            .map(|t| t.map(|i| perm[i]))
            .collect();
        let identities = self.identities.iter().map(|&i| perm[i]).collect();
        TableGroupoid::new(self.objects.clone(), morphisms, identities, &comp)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[MorphismSpec] {
        &self.morphisms
    }

    /// All defined entries as `[g, f, g∘f]`.
    pub fn composition(&self) -> Vec<[usize; 3]> {
        let m = self.morphisms.len();
        self.table
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.map(|h| [i / m, i % m, h]))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GroupoidJson {
            objects: self.objects.clone(),
            morphisms: self.morphisms.clone(),
            identities: self.identities.clone(),
            composition: self.composition(),
        })
        .expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<TableGroupoid> {
        let g: GroupoidJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        TableGroupoid::new(g.objects, g.morphisms, g.identities, &g.composition)
    }
}

impl Groupoid for TableGroupoid {
    fn object_count(&self) -> usize {
        self.objects.len()
    }

    fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    fn source(&self, f: usize) -> usize {
        self.morphisms[f].source
    }

    fn target(&self, f: usize) -> usize {
        self.morphisms[f].target
    }

    fn compose(&self, g: usize, f: usize) -> Option<usize> {
        if self.source(g) != self.target(f) {
            return None;
        }
        self.table[g * self.morphisms.len() + f]
    }

    fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    fn inverse(&self, f: usize) -> Option<usize> {
        self.inverses[f]
    }

    fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        self.homs[x * self.objects.len() + y].clone()
    }
}

/// A subgroup of the signed permutations as a one-object groupoid.
#[derive(Clone, Debug)]
pub struct SignedPermGroupoid {
    elements: Vec<SignedPerm>,
    position: Vec<Option<usize>>,
}

impl SignedPermGroupoid {
    pub fn new(elements: Vec<SignedPerm>) -> Result<SignedPermGroupoid> {
        let mut position = vec![None; ORDER_B5];
        for (i, g) in elements.iter().enumerate() {
            if position[g.index()].replace(i).is_some() {
                return Err(Error::InvalidGroup(format!("{g} listed twice")));
            }
        }
        let out = SignedPermGroupoid { elements, position };
        if out.elements.iter().any(|g| {
            out.position[g.inverse().index()].is_none()
                || out.elements.iter().any(|h| out.position[g.compose(h).index()].is_none())
        }) {
            return Err(Error::InvalidGroup("elements are not closed under composition".into()));
        }
        if out.position[SignedPerm::identity().index()].is_none() {
            return Err(Error::InvalidGroup("the identity is missing".into()));
        }
        Ok(out)
    }

    pub fn b5() -> SignedPermGroupoid {
        SignedPermGroupoid::new(SignedPerm::all()).expect("group")
    }

    pub fn d5() -> SignedPermGroupoid {
        SignedPermGroupoid::new(SignedPerm::all_even()).expect("group")
    }

    pub fn element(&self, f: usize) -> SignedPerm {
        self.elements[f]
    }

    pub fn position(&self, g: &SignedPerm) -> Option<usize> {
        self.position[g.index()]
    }
}

impl Groupoid for SignedPermGroupoid {
    fn object_count(&self) -> usize {
        1
    }

    fn morphism_count(&self) -> usize {
        self.elements.len()
    }

    fn source(&self, _: usize) -> usize {
        0
    }

    fn target(&self, _: usize) -> usize {
        0
    }

    fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.position(&self.elements[g].compose(&self.elements[f]))
    }

    fn identity(&self, _: usize) -> usize {
        self.position(&SignedPerm::identity()).expect("identity")
    }

    fn inverse(&self, f: usize) -> Option<usize> {
        self.position(&self.elements[f].inverse())
    }

    fn hom(&self, _: usize, _: usize) -> Vec<usize> {
        (0..self.elements.len()).collect()
    }
}

/// Object and morphism maps of a functor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidFunctor {
    pub objects: Vec<usize>,
    pub morphisms: Vec<usize>,
}

impl GroupoidFunctor {
    pub fn identity(g: &impl Groupoid) -> GroupoidFunctor {
        GroupoidFunctor {
            objects: (0..g.object_count()).collect(),
            morphisms: (0..g.morphism_count()).collect(),
        }
    }

    pub fn obj(&self, x: usize) -> usize {
        self.objects[x]
    }

    pub fn mor(&self, f: usize) -> usize {
        self.morphisms[f]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<GroupoidFunctor> {
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Morphisms with source `x`.
pub fn out_of(g: &impl Groupoid, x: usize) -> Vec<usize> {
    (0..g.object_count()).flat_map(|z| g.hom(x, z)).collect()
}

/// Category axioms and invertibility, by exhaustion.
pub fn validate(g: &impl Groupoid) -> Check {
    let n = g.object_count();
    let m = g.morphism_count();
    for x in 0..n {
        let i = g.identity(x);
        if i >= m || g.source(i) != x || g.target(i) != x {
            return Err(Witness::new("identity has wrong endpoints", vec![x, i]));
        }
    }
    for f in 0..m {
        for h in 0..m {
            if g.source(f) != g.target(h) {
                continue;
            }
            match g.compose(f, h) {
                None => return Err(Witness::new("composition undefined", vec![f, h])),
                Some(c) if c >= m || g.source(c) != g.source(h) || g.target(c) != g.target(f) => {
                    return Err(Witness::new("composite has wrong endpoints", vec![f, h]))
                }
                Some(_) => {}
            }
        }
    }
    for f in 0..m {
        let (x, y) = (g.source(f), g.target(f));
        if g.compose(f, g.identity(x)) != Some(f) || g.compose(g.identity(y), f) != Some(f) {
            return Err(Witness::new("identity law fails", vec![f]));
        }
    }
    for h in 0..m {
        for f in out_of(g, g.target(h)) {
            let fh = g.comp(f, h);
            for e in out_of(g, g.target(f)) {
                if g.compose(e, fh) != g.compose(g.comp(e, f), h) {
                    return Err(Witness::new("associativity fails", vec![e, f, h]));
                }
            }
        }
    }
    if let Some(f) = (0..m).find(|&f| g.inverse(f).is_none()) {
        return Err(Witness::new("morphism is not invertible", vec![f]));
    }
    Ok(())
}

/// Functor laws for `phi: c -> d`, by exhaustion.
pub fn validate_functor(c: &impl Groupoid, d: &impl Groupoid, phi: &GroupoidFunctor) -> Check {
    if phi.objects.len() != c.object_count() || phi.morphisms.len() != c.morphism_count() {
        return Err(Witness::new(
            "map sizes do not match the source",
            vec![phi.objects.len(), phi.morphisms.len()],
        ));
    }
    if let Some(x) = (0..c.object_count()).find(|&x| phi.obj(x) >= d.object_count()) {
        return Err(Witness::new("object image out of range", vec![x]));
    }
    for f in 0..c.morphism_count() {
        let u = phi.mor(f);
        if u >= d.morphism_count()
            || d.source(u) != phi.obj(c.source(f))
            || d.target(u) != phi.obj(c.target(f))
        {
            return Err(Witness::new("morphism image has wrong endpoints", vec![f]));
        }
    }
    for x in 0..c.object_count() {
        if phi.mor(c.identity(x)) != d.identity(phi.obj(x)) {
            return Err(Witness::new("identity not preserved", vec![x]));
        }
    }
    for h in 0..c.morphism_count() {
        for f in out_of(c, c.target(h)) {
            if d.compose(phi.mor(f), phi.mor(h)) != Some(phi.mor(c.comp(f, h))) {
                return Err(Witness::new("composition not preserved", vec![f, h]));
            }
        }
    }
    Ok(())
}

/// Isomorphism-class label of each object, numbered by first occurrence.
pub fn components(g: &impl Groupoid) -> Vec<usize> {
    let n = g.object_count();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if label[x] != usize::MAX {
            continue;
        }
        for y in x..n {
            if label[y] == usize::MAX && !g.hom(x, y).is_empty() {
                label[y] = next;
            }
        }
        next += 1;
    }
    label
}

/// `Φ(X) ≅ Φ(Y)` implies `X ≅ Y`.
pub fn injective_on_iso_classes(c: &impl Groupoid, d: &impl Groupoid, phi: &GroupoidFunctor) -> Check {
    let cc = components(c);
    let dc = components(d);
    for x in 0..c.object_count() {
        for y in x + 1..c.object_count() {
            if cc[x] != cc[y] && dc[phi.obj(x)] == dc[phi.obj(y)] {
                return Err(Witness::new("non-isomorphic objects with isomorphic images", vec![x, y]));
            }
        }
    }
    Ok(())
}
