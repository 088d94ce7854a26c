//! Aggregated invariants of one pencil.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactfield::Embedding;
use crate::kgroups::{closed_form_rank, Space};
use crate::pencil::{
    canonical_invariant_of, galois_signature, is_smooth, normal_form_of, orbits, parameters_in,
    quintic_coefficients, splitting_field, CycleSignature, QuadricPencil,
};
use crate::picard::is_minimal;
use crate::wpline::aut_group;

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    /// `null` for the point at infinity.
    pub factor: Option<String>,
    pub degree: usize,
    pub residue_field: Value,
    pub points: Vec<Value>,
    pub sign: Option<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantRanks {
    pub picard: usize,
    pub surface_k0: usize,
    pub atom: usize,
    pub torsion: usize,
}

impl InvariantRanks {
    pub fn from_signature(sig: &CycleSignature) -> InvariantRanks {
        InvariantRanks {
            picard: closed_form_rank(sig, Space::Picard),
            surface_k0: closed_form_rank(sig, Space::SurfaceK0),
            atom: closed_form_rank(sig, Space::Atom),
            torsion: closed_form_rank(sig, Space::Torsion(5)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub field: Value,
    /// Coefficients of `det(t0 A - t1 B)`; entry `i` multiplies `t0^(5-i) t1^i`.
    pub quintic: Vec<Value>,
    pub smooth: bool,
    pub orbits: Vec<OrbitReport>,
    pub splitting_field: Option<Value>,
    /// Normal form for the sorted order of the degenerate points.
    pub normal_form: Option<Value>,
    pub canonical_invariant: Option<Vec<Value>>,
    /// Automorphisms of the point configuration over an algebraic closure.
    pub aut_p_order: Option<usize>,
    /// Those defined over the base field.
    pub aut_p_rational_order: Option<usize>,
    /// `16 |Aut(P)|`.
    pub aut_x_order: Option<usize>,
    pub cycle_signature: Option<CycleSignature>,
    pub minimal: Option<bool>,
    pub ranks: Option<InvariantRanks>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Full report; `NotSmooth` for singular pencils. Over Q a quintic that
/// does not split leaves the configuration fields empty with a note.
pub fn analyze(p: &QuadricPencil) -> Result<AnalysisReport> {
    let quintic = quintic_coefficients(p)?;
    if !is_smooth(p) {
        return Err(Error::NotSmooth(
            "the discriminant quintic has a repeated root".into(),
        ));
    }
    let mut notes = Vec::new();
    let mut report = AnalysisReport {
        field: p.field().to_json(),
        quintic: quintic.iter().map(|c| c.to_json()).collect(),
        smooth: true,
        orbits: Vec::new(),
        splitting_field: None,
        normal_form: None,
        canonical_invariant: None,
        aut_p_order: None,
        aut_p_rational_order: None,
        aut_x_order: None,
        cycle_signature: None,
        minimal: None,
        ranks: None,
        notes: Vec::new(),
    };
    match orbits(p) {
        Ok(os) => {
            report.orbits = os
                .iter()
                .map(|o| OrbitReport {
                    factor: o.factor.as_ref().map(|f| f.to_string()),
                    degree: o.degree,
                    residue_field: o.residue_field.to_json(),
                    points: o.points.iter().map(|z| z.to_json()).collect(),
                    sign: o.sign,
                })
                .collect();
            let w = splitting_field(p)?;
            let c = parameters_in(p, &w)?;
            report.splitting_field = Some(w.to_json());
            report.normal_form = Some(normal_form_of(&c, &[0, 1, 2, 3, 4])?.to_json());
            report.canonical_invariant =
                Some(canonical_invariant_of(&c).iter().map(|nf| nf.to_json()).collect());
            let aut = aut_group(&c);
            let emb = Embedding::new(p.field(), &w)?;
            report.aut_p_order = Some(aut.len());
            report.aut_p_rational_order = Some(aut.iter().filter(|(m, _)| m.defined_over(&emb)).count());
            report.aut_x_order = Some(16 * aut.len());
        }
        Err(Error::UnsupportedSplitting(msg)) => notes.push(msg),
        Err(e) => return Err(e),
    }
    if p.field().is_finite() {
        let sig = galois_signature(p)?;
        let ranks = InvariantRanks::from_signature(&sig);
        report.minimal = Some(is_minimal(&sig));
        debug_assert_eq!(is_minimal(&sig), ranks.picard == 1);
        report.ranks = Some(ranks);
        report.cycle_signature = Some(sig);
    } else {
        notes.push("Galois data is computed over finite fields only".into());
    }
    report.notes = notes;
    Ok(report)
}
