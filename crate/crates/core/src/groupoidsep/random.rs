//! Small finite groups and random split functors between groupoids.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{GroupoidFunctor, TableGroupoid};
use crate::error::Result;
use crate::sample::rng;

/// A group by its multiplication table; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == 0).expect("group")
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        FiniteGroup {
            table: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
        }
    }

    /// Element `(a, b)` has index `a * |H| + b`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let (m, n) = (g.order(), h.order());
        let table = (0..m * n)
            .map(|x| {
                (0..m * n)
                    .map(|y| g.mul(x / n, y / n) * n + h.mul(x % n, y % n))
                    .collect()
            })
            .collect();
        FiniteGroup { table }
    }

    /// Order `2n`; `r^i s^e` has index `e * n + i`.
    pub fn dihedral(n: usize) -> FiniteGroup {
        let table = (0..2 * n)
            .map(|x| {
                let (e, i) = (x / n, x % n);
                (0..2 * n)
                    .map(|y| {
                        let (f, j) = (y / n, y % n);
                        let k = if e == 0 { i + j } else { i + n - j } % n;
                        ((e + f) % 2) * n + k
                    })
                    .collect()
            })
            .collect();
        FiniteGroup { table }
    }

    /// `±1, ±i, ±j, ±k`; `s·u` has index `4 s + u` with units `1, i, j, k`.
    pub fn quaternion() -> FiniteGroup {
        // unit products as (sign, unit)
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let table = (0..8)
            .map(|x: usize| {
                (0..8)
                    .map(|y: usize| {
                        let (s, u) = UNIT[x % 4][y % 4];
                        ((s + x / 4 + y / 4) % 2) * 4 + u
                    })
                    .collect()
            })
            .collect();
        FiniteGroup { table }
    }

    /// The groups of order at most 8 used by [`random_instance`].
    pub fn library() -> Vec<FiniteGroup> {
        let z2 = FiniteGroup::cyclic(2);
        vec![
            FiniteGroup::cyclic(1),
            z2.clone(),
            FiniteGroup::cyclic(3),
            FiniteGroup::cyclic(4),
            FiniteGroup::product(&z2, &z2),
            FiniteGroup::dihedral(3),
            FiniteGroup::cyclic(6),
            FiniteGroup::dihedral(4),
            FiniteGroup::quaternion(),
            FiniteGroup::product(&FiniteGroup::product(&z2, &z2), &z2),
        ]
    }
}

/// Source groupoid, target groupoid and a functor between them.
#[derive(Clone, Debug)]
pub struct Instance {
    pub source: TableGroupoid,
    pub target: TableGroupoid,
    pub functor: GroupoidFunctor,
}

struct Component {
    group: FiniteGroup,
    objects: usize,
}

fn morphism(comp: &Component, g: usize, a: usize, b: usize) -> usize {
    (a * comp.objects + b) * comp.group.order() + g
}

fn morphism_count(comp: &Component) -> usize {
    comp.objects * comp.objects * comp.group.order()
}

/// A functor that is injective on iso classes and split on automorphism
/// groups, between groupoids with at most 4 objects and automorphism groups
/// of order at most 16, with shuffled morphism labels.
pub fn random_instance(seed: u64) -> Result<Instance> {
    let mut rng = rng(seed);
    let lib = FiniteGroup::library();
    let classes = rng.gen_range(1..=2);
    let mut sizes = vec![1; classes];
    for _ in 0..rng.gen_range(0..=4 - classes) {
        let i = rng.gen_range(0..classes);
        sizes[i] += 1;
    }
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    // per source component: group map G -> H and object map
    let mut maps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for &n in &sizes {
        let g = lib[rng.gen_range(0..lib.len())].clone();
        let candidates: Vec<usize> = (0..lib.len())
            .filter(|&k| g.order() * lib[k].order() <= 16)
            .collect();
        let (h, hom): (FiniteGroup, Vec<usize>) = match rng.gen_range(0..3) {
            0 => (g.clone(), (0..g.order()).collect()),
            1 => {
                let k = &lib[*candidates.choose(&mut rng).expect("trivial group fits")];
                (FiniteGroup::product(&g, k), (0..g.order()).map(|a| a * k.order()).collect())
            }
            _ if g.order() * g.order() <= 16 => (
                FiniteGroup::product(&g, &g),
                (0..g.order()).map(|a| a * g.order() + a).collect(),
            ),
            _ => {
                let k = &lib[*candidates.choose(&mut rng).expect("trivial group fits")];
                (FiniteGroup::product(k, &g), (0..g.order()).collect())
            }
        };
        let m = rng.gen_range(1..=n);
        let objs: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        src.push(Component { group: g, objects: n });
        tgt.push(Component { group: h, objects: m });
        maps.push((hom, objs));
    }
    let used: usize = tgt.iter().map(|c| c.objects).sum();
    if used < 4 && rng.gen_bool(0.5) {
        let g = lib[rng.gen_range(0..lib.len())].clone();
        tgt.push(Component { group: g, objects: 1 });
    }

    // lay out target components in a random order
    let mut order: Vec<usize> = (0..tgt.len()).collect();
    order.shuffle(&mut rng);
    let mut obj_off = vec![0; tgt.len()];
    let mut mor_off = vec![0; tgt.len()];
    let (mut no, mut nm) = (0, 0);
    for &k in &order {
        obj_off[k] = no;
        mor_off[k] = nm;
        no += tgt[k].objects;
        nm += morphism_count(&tgt[k]);
    }
    let target = TableGroupoid::disjoint_union(
        &order
            .iter()
            .map(|&k| TableGroupoid::indiscrete_product(tgt[k].group.table(), 0, tgt[k].objects))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let source = TableGroupoid::disjoint_union(
        &src.iter()
            .map(|c| TableGroupoid::indiscrete_product(c.group.table(), 0, c.objects))
            .collect::<Result<Vec<_>>>()?,
    )?;

    // Φ(g, a -> b) = (t_b φ(g) t_a⁻¹, Φa -> Φb) for a random gauge t
    let mut objects = Vec::new();
    let mut morphisms = Vec::new();
    for (i, c) in src.iter().enumerate() {
        let (hom, objs) = &maps[i];
        let d = &tgt[i];
        let h = &d.group;
        let gauge: Vec<usize> = (0..c.objects).map(|_| rng.gen_range(0..h.order())).collect();
        objects.extend(objs.iter().map(|&a| obj_off[i] + a));
        for a in 0..c.objects {
            for b in 0..c.objects {
                for g in 0..c.group.order() {
                    let val = h.mul(gauge[b], h.mul(hom[g], h.inv(gauge[a])));
                    morphisms.push(mor_off[i] + morphism(d, val, objs[a], objs[b]));
                }
            }
        }
    }

    // shuffle morphism labels on both sides
    let mut ps: Vec<usize> = (0..morphisms.len()).collect();
    ps.shuffle(&mut rng);
    let mut pt: Vec<usize> = (0..nm).collect();
    pt.shuffle(&mut rng);
    let mut relabelled = vec![0; morphisms.len()];
    for (f, &u) in morphisms.iter().enumerate() {
        relabelled[ps[f]] = pt[u];
    }
    Ok(Instance {
        source: source.relabel(&ps)?,
        target: target.relabel(&pt)?,
        functor: GroupoidFunctor { objects, morphisms: relabelled },
    })
}

#[cfg(test)]
mod tests {
    use super::super::{injective_on_iso_classes, validate, validate_functor, Groupoid};
    use super::*;

    #[test]
    fn library_groups_are_groups() {
        for g in FiniteGroup::library() {
            let t = TableGroupoid::from_group(g.table(), 0).unwrap();
            assert_eq!(validate(&t), Ok(()));
        }
        let q = FiniteGroup::quaternion();
        // i·j = k, j·i = -k, i² = -1
        assert_eq!(q.mul(1, 2), 3);
        assert_eq!(q.mul(2, 1), 7);
        assert_eq!(q.mul(1, 1), 4);
        let d4 = FiniteGroup::dihedral(4);
        assert_ne!(d4.mul(1, 4), d4.mul(4, 1));
    }

    #[test]
    fn instances_are_valid() {
        for seed in 0..25 {
            let inst = random_instance(seed).unwrap();
            let (c, d, phi) = (&inst.source, &inst.target, &inst.functor);
            assert!(c.object_count() <= 4 && d.object_count() <= 4);
            for x in 0..c.object_count() {
                assert!(c.aut(x).len() <= 16);
            }
            assert_eq!(validate(c), Ok(()));
            assert_eq!(validate(d), Ok(()));
            assert_eq!(validate_functor(c, d, phi), Ok(()), "seed {seed}");
            assert_eq!(injective_on_iso_classes(c, d, phi), Ok(()));
        }
    }
}
