//! Browser bindings: the orbit grid of normal forms over a finite field, a
//! cycle-signature explorer, and the full report of one normal form.
//!
//! Each export returns a JSON string; errors come back as JS strings.

use std::collections::HashMap;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qdp4_core::exactfield::{Field, Scalar};
use qdp4_core::kgroups::{closed_form_rank, conic_bundle_ranks, g_invariant_rank, Space};
use qdp4_core::pencil::{canonical_invariant_of, predicted_count, reconstruct, CycleSignature, NormalForm};
use qdp4_core::picard::is_minimal;
use qdp4_core::report::analyze;
use qdp4_core::wpline::{aut_group, PointConfiguration};
use qdp4_core::{Error, Result};

/// Largest field the grid will enumerate.
pub const MAX_GRID_ORDER: u64 = 64;

fn finite_field(name: &str) -> Result<(Field, u64)> {
    let f = Field::parse(name)?;
    let q = f
        .order_u64()
        .ok_or_else(|| Error::UnsupportedField("the demo works over finite fields".into()))?;
    Ok((f, q))
}

fn configuration(f: &Field, lambda: &Scalar, mu: &Scalar) -> Result<PointConfiguration> {
    PointConfiguration::from_values(
        f,
        &[None, Some(f.zero()), Some(f.one()), Some(lambda.clone()), Some(mu.clone())],
    )
}

/// Every admissible `(λ, μ)` labelled by its PGL₂ class. Classes are
/// numbered by first appearance in row-major order over the field elements.
pub fn orbit_grid_json(field: &str) -> Result<Value> {
    let (f, q) = finite_field(field)?;
    if q > MAX_GRID_ORDER {
        return Err(Error::ResourceLimit(format!("grid limited to fields of order {MAX_GRID_ORDER}")));
    }
    let values: Vec<Scalar> = f.elements()?.filter(|x| !x.is_zero() && !x.is_one()).collect();
    let mut index: HashMap<NormalForm, usize> = HashMap::new();
    let mut classes: Vec<Value> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut cells = Vec::new();
    for lambda in &values {
        for mu in &values {
            if lambda == mu {
                continue;
            }
            let c = configuration(&f, lambda, mu)?;
            let inv = canonical_invariant_of(&c);
            let key = inv[0].clone();
            let class = *index.entry(key.clone()).or_insert_with(|| {
                classes.push(json!({
                    "representative": key.to_json(),
                    "aut_order": aut_group(&c).len(),
                    "invariant_size": inv.len(),
                }));
                sizes.push(0);
                classes.len() - 1
            });
            sizes[class] += 1;
            cells.push(json!([lambda.to_string(), mu.to_string(), class]));
        }
    }
    for (c, n) in classes.iter_mut().zip(&sizes) {
        c["cells"] = json!(n);
    }
    Ok(json!({
        "field": f.to_string(),
        "order": q,
        "values": values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "cells": cells,
        "classes": classes,
    }))
}

/// Accepts `[(3,-1),(2,-1)]` or `[[3,-1],[2,-1]]`.
pub fn parse_signature(s: &str) -> Result<CycleSignature> {
    let normalized = s.replace('(', "[").replace(')', "]").replace("+1", "1");
    let cycles: Vec<(usize, i8)> =
        serde_json::from_str(&normalized).map_err(|e| Error::Parse(format!("signature: {e}")))?;
    CycleSignature::new(cycles)
}

/// Ranks on every lattice, minimality, and predicted point counts over
/// `F_q`, `k = 1..4`, for a signature on five points.
pub fn signature_json(signature: &str, q: u64) -> Result<Value> {
    let sig = parse_signature(signature)?;
    if sig.total() != 5 {
        return Err(Error::InvalidInput(format!("{sig} permutes {} points, not 5", sig.total())));
    }
    let spaces = [Space::Picard, Space::Wpl(5), Space::SurfaceK0, Space::Atom, Space::Torsion(5)];
    let ranks = spaces
        .iter()
        .map(|&s| {
            Ok(json!({
                "space": s.to_string(),
                "closed_form": closed_form_rank(&sig, s),
                "computed": g_invariant_rank(&sig, s)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let minimal = is_minimal(&sig);
    let conic = if minimal {
        let cb = conic_bundle_ranks(5, &sig, true)?;
        json!({ "k0x_rank": cb.k0x_rank, "atom_rank": cb.atom_rank })
    } else {
        Value::Null
    };
    let counts: Vec<Value> = (1..=4)
        .map(|k| json!({ "k": k, "trace": sig.trace_power(k), "predicted": predicted_count(&sig, q, k).to_string() }))
        .collect();
    Ok(json!({
        "signature": sig.to_string(),
        "plus_cycles": sig.plus_cycles(),
        // odd products do not occur for Frobenius, which acts through the even subgroup
        "realizable": sig.parity() == 1,
        "minimal": minimal,
        "ranks": ranks,
        "conic_bundle": conic,
        "q": q,
        "counts": counts,
    }))
}

/// Report for the diagonal pencil with degenerate points ∞, 0, 1, λ, μ.
pub fn normal_form_json(field: &str, lambda: &str, mu: &str) -> Result<Value> {
    let (f, _) = finite_field(field)?;
    let nf = NormalForm::new(Scalar::parse(&f, lambda)?, Scalar::parse(&f, mu)?)?;
    let pencil = reconstruct(&nf)?;
    let c = configuration(&f, &nf.lambda, &nf.mu)?;
    let aut: Vec<Value> = aut_group(&c)
        .iter()
        .map(|(m, perm)| json!({ "moebius": m.to_string(), "permutation": perm.map(|i| i + 1) }))
        .collect();
    let mut out = analyze(&pencil)?.to_json();
    out["aut_p"] = json!(aut);
    Ok(out)
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn orbit_grid(field: &str) -> std::result::Result<String, JsValue> {
    to_js(orbit_grid_json(field))
}

#[wasm_bindgen]
pub fn signature_explorer(signature: &str, q: u32) -> std::result::Result<String, JsValue> {
    to_js(signature_json(signature, q as u64))
}

#[wasm_bindgen]
pub fn normal_form_report(field: &str, lambda: &str, mu: &str) -> std::result::Result<String, JsValue> {
    to_js(normal_form_json(field, lambda, mu))
}
