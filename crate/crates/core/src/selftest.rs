//! Exhaustive consistency suites, runnable from the command line.

use std::collections::HashSet;

use serde::Serialize;

use crate::exactfield::Field;
use crate::groupoidsep::{
    build_psi, independence_check, random::random_instance, standard_choices,
    transport_splittings, verify_heavy_separability, verify_s2, DEFAULT_SEARCH_BOUND,
};
use crate::hyperoct::{fiber_product, is_closed, SignedPerm};
use crate::kgroups::{closed_form_rank, kernel_rank, serre_certificate, SignedAction, Space};
use crate::pencil::{count_points, degenerate_parameters, galois_signature, predicted_count};
use crate::picard::{intersect, canonical_class, pair_of, to_signed_perm, weyl_group, zero_classes};
use crate::sample::{rng, smooth_pencil, split_pencil};
use crate::wpline::aut_group;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub checks: u64,
    pub detail: String,
}

type Suite = fn() -> (bool, u64, String);

const SUITES: [(&str, Suite); 8] = [
    ("weyl-order-1920", weyl_order),
    ("zero-classes", zero_class_census),
    ("retract-homomorphism", retract_homomorphism),
    ("rank-formulas", rank_formulas),
    ("serre-certificate", serre),
    ("lefschetz-consistency", lefschetz),
    ("fiber-order-law", fiber_order),
    ("heavy-separability", heavy_separability),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Run the named suites, or all when `only` is empty.
pub fn run(only: &[String]) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .filter(|(name, _)| only.is_empty() || only.iter().any(|o| o == name))
        .map(|(name, suite)| {
            let (passed, checks, detail) = suite();
            SuiteOutcome { name, passed, checks, detail }
        })
        .collect()
}

fn weyl_order() -> (bool, u64, String) {
    let w = weyl_group();
    let images: HashSet<SignedPerm> = w.iter().filter_map(|g| to_signed_perm(g).ok()).collect();
    let even = images.iter().all(SignedPerm::is_even);
    let ok = w.len() == 1920 && images.len() == 1920 && even;
    (ok, w.len() as u64, format!("|W| = {}, distinct even images = {}", w.len(), images.len()))
}

fn zero_class_census() -> (bool, u64, String) {
    let hs = zero_classes();
    let k = canonical_class();
    let ok = hs.len() == 10
        && hs.iter().all(|h| {
            let p = pair_of(h).expect("zero-class");
            p != *h && *h + p == -k && intersect(h, &p) == 2
        });
    (ok, hs.len() as u64, format!("{} classes", hs.len()))
}

fn retract_homomorphism() -> (bool, u64, String) {
    let all = SignedPerm::all();
    let rs: Vec<SignedPerm> = all.iter().map(SignedPerm::retract).collect();
    let mut ok = all.iter().zip(&rs).all(|(g, r)| {
        r.is_even() && r.perm() == g.perm() && (!g.is_even() || r == g)
    });
    let mut checks = all.len() as u64;
    for (i, g) in all.iter().enumerate() {
        for (j, h) in all.iter().enumerate() {
            ok &= g.compose(h).retract() == rs[i].compose(&rs[j]);
        }
        checks += all.len() as u64;
    }
    (ok, checks, "retract over all ordered pairs of B5".into())
}

fn rank_formulas() -> (bool, u64, String) {
    let mut checks = 0;
    let mut bad = None;
    for g in SignedPerm::all() {
        let sig = g.cycle_signature();
        let act = SignedAction::from_signed_perm(&g);
        for space in [Space::Picard, Space::Wpl(5), Space::Torsion(5)] {
            checks += 1;
            if kernel_rank(&act, space).ok() != Some(closed_form_rank(&sig, space)) {
                bad.get_or_insert(format!("{g} on {space:?}"));
            }
        }
    }
    (bad.is_none(), checks, bad.unwrap_or_else(|| "kernel ranks match closed forms".into()))
}

fn serre() -> (bool, u64, String) {
    match serre_certificate() {
        Ok(c) => (c.holds(), c.classes as u64, format!("{c:?}")),
        Err(e) => (false, 0, e.to_string()),
    }
}

fn lefschetz() -> (bool, u64, String) {
    let mut checks = 0;
    for (p, seeds, ks) in [(3u64, 0..3u64, 1..=3u32), (5, 10..13, 1..=2)] {
        let f = Field::prime(p).expect("prime");
        for seed in seeds {
            let pencil = smooth_pencil(&f, &mut rng(seed));
            let sig = match galois_signature(&pencil) {
                Ok(s) => s,
                Err(e) => return (false, checks, e.to_string()),
            };
            for k in ks.clone() {
                let n = match count_points(&pencil, k) {
                    Ok(n) => n,
                    Err(e) => return (false, checks, e.to_string()),
                };
                checks += 1;
                if predicted_count(&sig, p, k) != n.into() {
                    return (false, checks, format!("F_{p} seed {seed} k {k}: counted {n}"));
                }
            }
        }
    }
    (true, checks, "point counts match the trace formula".into())
}

fn fiber_order() -> (bool, u64, String) {
    let mut checks = 0;
    let f13 = Field::prime(13).expect("prime");
    let mut r = rng(7);
    let q = Field::rationals();
    let special = crate::wpline::PointConfiguration::from_values(
        &q,
        &[None, Some(q.int(0)), Some(q.int(1)), Some(q.int(2)), Some(q.int(3))],
    )
    .expect("distinct");
    let mut configs = vec![special];
    for _ in 0..12 {
        let p = split_pencil(&f13, &mut r).expect("F13 has enough points");
        configs.push(degenerate_parameters(&p).expect("split"));
    }
    for c in configs {
        let aut = aut_group(&c);
        let fp = match fiber_product(&aut) {
            Ok(fp) => fp,
            Err(e) => return (false, checks, e.to_string()),
        };
        checks += 1;
        if fp.len() != 16 * aut.len() || !is_closed(&fp) {
            return (false, checks, format!("order {} for |Aut P| = {}", fp.len(), aut.len()));
        }
    }
    (true, checks, "|Aut X| = 16 |Aut P|".into())
}

fn heavy_separability() -> (bool, u64, String) {
    for seed in 0..10 {
        let inst = match random_instance(seed) {
            Ok(i) => i,
            Err(e) => return (false, seed, e.to_string()),
        };
        let (c, d, phi) = (&inst.source, &inst.target, &inst.functor);
        let outcome = standard_choices(c, d, phi, DEFAULT_SEARCH_BOUND).and_then(|ch| {
            let psi = build_psi(c, d, phi, &ch)?;
            let fam = transport_splittings(c, d, phi, &ch)?;
            Ok((psi, independence_check(c, d, phi, &fam)?))
        });
        match outcome {
            Ok((psi, indep)) => {
                let checks = verify_heavy_separability(c, d, phi, &psi)
                    .and_then(|_| verify_s2(c, d, phi, &psi))
                    .and(indep);
                if let Err(w) = checks {
                    return (false, seed, format!("seed {seed}: {w}"));
                }
            }
            Err(e) => return (false, seed, format!("seed {seed}: {e}")),
        }
    }
    (true, 10, "(s1), (s2), (s3) and independence on random instances".into())
}
