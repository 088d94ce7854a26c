//! `qdp4`: invariants of smooth intersections of two quadrics in P⁴.
//!
//! Every command writes one pretty-printed JSON document to stdout.
//! Diagnostics go to stderr. Exit codes: 0 success, 1 negative verdict,
//! 2 unreadable or invalid input, 3 singular pencil, 4 unsupported field.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qdp4_core::exactfield::{Embedding, Field, Scalar};
use qdp4_core::groupoidsep::random::random_instance;
use qdp4_core::groupoidsep::{
    build_psi, independence_check, injective_on_iso_classes, standard_choices,
    transport_splittings, validate, validate_functor, verify_heavy_separability, verify_s2,
    Check, Choices, GroupoidFunctor, Splitting, TableGroupoid, DEFAULT_SEARCH_BOUND,
};
use qdp4_core::hyperoct::aut0_matrices;
use qdp4_core::kgroups::{closed_form_rank, conic_bundle_ranks, g_invariant_rank, Space};
use qdp4_core::pencil::{
    count_points, galois_signature, isomorphic, parameters_in, predicted_count, reconstruct,
    splitting_field, CycleSignature, NormalForm, QuadricPencil,
};
use qdp4_core::picard::{invariant_rank, is_minimal};
use qdp4_core::report::analyze;
use qdp4_core::wpline::aut_group;
use qdp4_core::{selftest, Error};

#[derive(Parser)]
#[command(name = "qdp4", version, about = "Invariants of quartic del Pezzo surfaces from their pencils of quadrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full invariant report of a pencil.
    Analyze { pencil: PathBuf },
    /// Decide isomorphism of two pencils; exit 1 when not isomorphic.
    Iso { a: PathBuf, b: PathBuf },
    /// Automorphisms of the degenerate-point configuration.
    Aut { pencil: PathBuf },
    /// Frobenius cycle signature and minimality verdict.
    Minimal(MinimalArgs),
    /// Naive point count over the degree-K extension, against the trace formula.
    CountPoints {
        pencil: PathBuf,
        #[arg(long = "ext", default_value_t = 1)]
        ext: u32,
    },
    /// The diagonal pencil with degenerate points ∞, 0, 1, λ, μ.
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        /// `Q`, `F_p`, `F_p^k` or a JSON descriptor.
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Invariant ranks of numerical Grothendieck groups.
    Kgroups {
        #[command(subcommand)]
        command: KgroupsCommand,
    },
    /// Heavy separability of functors between finite groupoids.
    Groupoid {
        #[command(subcommand)]
        command: GroupoidCommand,
    },
    /// Exhaustive consistency suites; exit 1 on any failure.
    Selftest {
        /// Run only the named suite (repeatable).
        #[arg(long)]
        only: Vec<String>,
        /// List suite names and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct MinimalArgs {
    /// Pencil over a finite field.
    #[arg(required_unless_present = "signature", conflicts_with = "signature")]
    pencil: Option<PathBuf>,
    /// Cycle signature instead of a pencil, e.g. `[(3,-1),(2,-1)]`.
    #[arg(long, allow_hyphen_values = true)]
    signature: Option<String>,
}

#[derive(Subcommand)]
enum KgroupsCommand {
    /// Closed-form and computed invariant ranks for a cycle signature.
    Ranks {
        #[arg(long, allow_hyphen_values = true)]
        signature: String,
        /// Spaces to report (repeatable); defaults depend on the signature size.
        #[arg(long)]
        space: Vec<String>,
        /// Also report the conic bundle whose degenerate fibres carry the signature.
        #[arg(long)]
        conic_bundle: bool,
        #[arg(long, requires = "conic_bundle")]
        relatively_minimal: bool,
    },
}

#[derive(Subcommand)]
enum GroupoidCommand {
    /// Check `{source, target, functor, splittings?}`; exit 1 if a check fails.
    Verify {
        input: PathBuf,
        /// Include the family Ψ in the output.
        #[arg(long)]
        emit_psi: bool,
    },
    /// A random instance in the `verify` input format.
    Sample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::NotSmooth(_) | Error::DegeneratePencil(_) => 3,
            Error::UnsupportedField(_)
            | Error::UnsupportedSplitting(_)
            | Error::DescriptorMismatch(..)
            | Error::ResourceLimit(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

/// Result of a command: the document and whether the verdict was positive.
type Outcome = Result<(Value, bool), Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input_error(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn read_pencil(path: &Path) -> Result<QuadricPencil, Failure> {
    Ok(QuadricPencil::from_json(&read_json(path)?)?)
}

/// Accepts the JSON form `[[5,-1]]` and the display form `[(5,-1)]`.
fn parse_signature(s: &str) -> Result<CycleSignature, Failure> {
    let normalized = s.replace('(', "[").replace(')', "]").replace("+1", "1");
    let v: Value = serde_json::from_str(&normalized)
        .map_err(|e| input_error(format!("signature {s:?}: {e}")))?;
    serde_json::from_value(v).map_err(|e| input_error(format!("signature {s:?}: {e}")))
}

fn one_based(perm: &[u8; 5]) -> Vec<u8> {
    perm.iter().map(|i| i + 1).collect()
}

fn check_json(c: &Check) -> Value {
    match c {
        Ok(()) => json!({ "ok": true }),
        Err(w) => json!({ "ok": false, "condition": w.condition, "witness": w.data }),
    }
}

fn cmd_analyze(path: &Path) -> Outcome {
    Ok((analyze(&read_pencil(path)?)?.to_json(), true))
}

fn cmd_iso(a: &Path, b: &Path) -> Outcome {
    let (p, q) = (read_pencil(a)?, read_pencil(b)?);
    Ok(match isomorphic(&p, &q)? {
        Some(cert) => (json!({ "isomorphic": true, "certificate": cert.to_json() }), true),
        None => (json!({ "isomorphic": false }), false),
    })
}

fn cmd_aut(path: &Path) -> Outcome {
    let p = read_pencil(path)?;
    let w = splitting_field(&p)?;
    let c = parameters_in(&p, &w)?;
    let emb = Embedding::new(p.field(), &w)?;
    let aut = aut_group(&c);
    let elements: Vec<Value> = aut
        .iter()
        .map(|(m, perm)| {
            json!({
                "moebius": m.to_json(),
                "permutation": one_based(perm),
                "k_rational": m.defined_over(&emb),
            })
        })
        .collect();
    let rational = aut.iter().filter(|(m, _)| m.defined_over(&emb)).count();
    Ok((
        json!({
            "field": p.field().to_json(),
            "splitting_field": w.to_json(),
            "configuration": c.to_json(),
            "aut_p_order": aut.len(),
            "aut_p_rational_order": rational,
            "aut_x_order": 16 * aut.len(),
            "aut_p": elements,
            "aut0": aut0_matrices(),
        }),
        true,
    ))
}

fn cmd_minimal(args: &MinimalArgs) -> Outcome {
    let sig = match (&args.signature, &args.pencil) {
        (Some(s), _) => parse_signature(s)?,
        (None, Some(path)) => galois_signature(&read_pencil(path)?)?,
        (None, None) => return Err(input_error("a pencil or --signature is required".into())),
    };
    if sig.total() != 5 {
        return Err(input_error(format!("signature {sig} permutes {} points, not 5", sig.total())));
    }
    Ok((
        json!({
            "cycle_signature": sig.to_json(),
            "minimal": is_minimal(&sig),
            "picard_rank": invariant_rank(&sig),
        }),
        true,
    ))
}

fn cmd_count_points(path: &Path, k: u32) -> Outcome {
    let p = read_pencil(path)?;
    let q = p
        .field()
        .order_u64()
        .ok_or_else(|| Failure::from(Error::UnsupportedField("point counts need a finite field".into())))?;
    let sig = galois_signature(&p)?;
    let count = count_points(&p, k)?;
    let predicted = predicted_count(&sig, q, k);
    Ok((
        json!({
            "field": p.field().to_json(),
            "ext": k,
            "cycle_signature": sig.to_json(),
            "count": count.to_string(),
            "predicted": predicted.to_string(),
            "agrees": predicted == count.into(),
        }),
        true,
    ))
}

fn cmd_reconstruct(lambda: &str, mu: &str, field: &str) -> Outcome {
    let f = Field::parse(field)?;
    let nf = NormalForm::new(Scalar::parse(&f, lambda)?, Scalar::parse(&f, mu)?)?;
    Ok((reconstruct(&nf)?.to_json(), true))
}

fn cmd_ranks(signature: &str, spaces: &[String], conic: bool, relatively_minimal: bool) -> Outcome {
    let sig = parse_signature(signature)?;
    let n = sig.total();
    let spaces: Vec<Space> = if spaces.is_empty() {
        if n == 5 {
            vec![Space::Picard, Space::Wpl(5), Space::SurfaceK0, Space::Atom, Space::Torsion(5)]
        } else {
            vec![Space::Wpl(n), Space::Torsion(n)]
        }
    } else {
        spaces.iter().map(|s| Space::parse(s)).collect::<Result<_, _>>()?
    };
    let ranks = spaces
        .iter()
        .map(|&s| {
            Ok(json!({
                "space": s.to_string(),
                "closed_form": closed_form_rank(&sig, s),
                "computed": g_invariant_rank(&sig, s)?,
            }))
        })
        .collect::<Result<Vec<Value>, Error>>()?;
    let mut out = json!({ "cycle_signature": sig.to_json(), "plus_cycles": sig.plus_cycles(), "ranks": ranks });
    if conic {
        let cb = conic_bundle_ranks(n, &sig, relatively_minimal)?;
        out["conic_bundle"] = json!({ "degenerate_fibres": n, "k0x_rank": cb.k0x_rank, "atom_rank": cb.atom_rank });
    }
    Ok((out, true))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, Failure> {
    v.get(key).ok_or_else(|| input_error(format!("missing \"{key}\"")))
}

fn cmd_groupoid_verify(path: &Path, emit_psi: bool) -> Outcome {
    let input = read_json(path)?;
    let c = TableGroupoid::from_json(field(&input, "source")?)?;
    let d = TableGroupoid::from_json(field(&input, "target")?)?;
    let phi = GroupoidFunctor::from_json(field(&input, "functor")?)?;
    let family: Option<Vec<Splitting>> = input
        .get("splittings")
        .map(|v| serde_json::from_value(v.clone()).map_err(|e| input_error(format!("splittings: {e}"))))
        .transpose()?;

    let structure = [
        ("source", validate(&c)),
        ("target", validate(&d)),
        ("functor", validate_functor(&c, &d, &phi)),
    ];
    let mut out = json!({});
    for (name, check) in &structure {
        out[*name] = check_json(check);
    }
    if structure.iter().any(|(_, c)| c.is_err()) {
        return Ok((out, false));
    }
    let injective = injective_on_iso_classes(&c, &d, &phi);
    out["injective_on_iso_classes"] = check_json(&injective);
    if injective.is_err() {
        return Ok((out, false));
    }

    let standard = match standard_choices(&c, &d, &phi, DEFAULT_SEARCH_BOUND) {
        Ok(ch) => ch,
        Err(Error::InvalidSplitting(msg)) => {
            out["split"] = json!({ "ok": false, "condition": msg });
            return Ok((out, false));
        }
        Err(e) => return Err(e.into()),
    };
    let family = match family {
        Some(f) => f,
        None => transport_splittings(&c, &d, &phi, &standard)?,
    };
    let independence = match independence_check(&c, &d, &phi, &family) {
        Ok(check) => check,
        Err(Error::InvalidSplitting(msg)) => Err(qdp4_core::groupoidsep::Witness::new(msg, vec![])),
        Err(e) => return Err(e.into()),
    };
    out["independence"] = check_json(&independence);
    let base_splittings = family
        .iter()
        .filter(|s| standard.base[s.object] == s.object)
        .cloned()
        .collect();
    let choices = Choices {
        splittings: base_splittings,
        ..standard
    };
    let psi = build_psi(&c, &d, &phi, &choices)?;
    let s13 = verify_heavy_separability(&c, &d, &phi, &psi);
    let s2 = verify_s2(&c, &d, &phi, &psi);
    out["s1_s3"] = check_json(&s13);
    out["s2"] = check_json(&s2);
    out["psi_entries"] = json!(psi.len());
    if emit_psi {
        out["psi"] = psi.to_json();
    }
    let ok = independence.is_ok() && s13.is_ok() && s2.is_ok();
    out["heavily_separable"] = json!(ok);
    Ok((out, ok))
}

fn cmd_groupoid_sample(seed: u64) -> Outcome {
    let inst = random_instance(seed)?;
    Ok((
        json!({
            "source": inst.source.to_json(),
            "target": inst.target.to_json(),
            "functor": inst.functor.to_json(),
        }),
        true,
    ))
}

fn cmd_selftest(only: &[String], list: bool) -> Outcome {
    let names = selftest::suite_names();
    if list {
        return Ok((json!(names), true));
    }
    if let Some(bad) = only.iter().find(|o| !names.contains(&o.as_str())) {
        return Err(input_error(format!("unknown suite {bad:?}")));
    }
    let outcomes = selftest::run(only);
    for o in &outcomes {
        eprintln!("{} {} ({} checks)", if o.passed { "PASS" } else { "FAIL" }, o.name, o.checks);
    }
    let ok = outcomes.iter().all(|o| o.passed);
    Ok((json!({ "suites": outcomes, "passed": ok }), ok))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Analyze { pencil } => cmd_analyze(&pencil),
        Command::Iso { a, b } => cmd_iso(&a, &b),
        Command::Aut { pencil } => cmd_aut(&pencil),
        Command::Minimal(args) => cmd_minimal(&args),
        Command::CountPoints { pencil, ext } => cmd_count_points(&pencil, ext),
        Command::Reconstruct { lambda, mu, field } => cmd_reconstruct(&lambda, &mu, &field),
        Command::Kgroups {
            command: KgroupsCommand::Ranks { signature, space, conic_bundle, relatively_minimal },
        } => cmd_ranks(&signature, &space, conic_bundle, relatively_minimal),
        Command::Groupoid { command } => match command {
            GroupoidCommand::Verify { input, emit_psi } => cmd_groupoid_verify(&input, emit_psi),
            GroupoidCommand::Sample { seed } => cmd_groupoid_sample(seed),
        },
        Command::Selftest { only, list } => cmd_selftest(&only, list),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((doc, ok)) => {
            let text = serde_json::to_string_pretty(&doc).expect("JSON value serializes");
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("qdp4: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
