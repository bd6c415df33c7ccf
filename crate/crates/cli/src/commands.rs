use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde_json::{json, Value};

use qmonoidal::cocycle::{build_cocycle, coboundary_equivalent};
use qmonoidal::fmatrix::{self, FMatrix, Sign};
use qmonoidal::io::{self, MatrixJson};
use qmonoidal::linalg::{self, CMat};
use qmonoidal::linking::{default_level, LinkingAlgebra};
use qmonoidal::random::random_unitary;
use qmonoidal::{verify, Realization, Result, Tolerances, Variant, Word};

use crate::report::{Check, Outcome};

/// A matrix read from disk together with its canonical serialization, used
/// for hashing.
pub struct Input {
    pub matrix: FMatrix,
    pub canonical: String,
}

pub fn read_input(path: &Path) -> Result<Input> {
    let m = io::read_matrix(path)?;
    let canonical = io::matrix_to_string(&m)?;
    Ok(Input { matrix: FMatrix::new(m)?, canonical })
}

fn matrix_json(m: &CMat) -> Value {
    serde_json::to_value(MatrixJson::from_matrix(m).expect("square")).expect("serializes")
}

fn realization(variant: Variant, f: &FMatrix, tol: &Tolerances) -> Result<Realization> {
    Realization::new(variant, f, tol)
}

pub fn classify_ao(f: &FMatrix, tol: &Tolerances) -> Result<Outcome> {
    let p = fmatrix::validate_ao(f, tol)?;
    let cf = fmatrix::canonical_form_ao(&fmatrix::normalize_ao(f, tol)?, tol)?;
    let mut out = Outcome::new(json!({
        "n": f.n(),
        "sign": p.sign.value() as i32,
        "c": p.c,
        "trace": p.trace,
        "beta": p.beta,
        "qdim": p.qdim,
        "canonical": {"lambdas": cf.lambdas, "fixed_block": cf.fixed_block},
    }));
    out.residual("admissibility", p.residual, tol.check);
    out.residual("canonical_form", cf.residual, tol.check);
    Ok(out)
}

pub fn classify_au(f: &FMatrix, tol: &Tolerances) -> Result<Outcome> {
    let p = fmatrix::validate_au(f, tol)?;
    let s = fmatrix::canonical_form_au(f, tol)?;
    let g = fmatrix::validate_au(&fmatrix::normalize_au(f, tol)?, tol)?;
    let mut out = Outcome::new(json!({
        "n": f.n(),
        "trace": p.trace,
        "inv_trace": p.inv_trace,
        "qdim": p.qdim,
        "singular_values": s,
    }));
    out.residual("balance", (g.trace - g.inv_trace).abs() / g.trace, tol.check);
    Ok(out)
}

pub fn mon_equiv(variant: Variant, f1: &FMatrix, f2: &FMatrix, tol: &Tolerances) -> Result<Outcome> {
    let result = match variant {
        Variant::Ao => {
            let e = fmatrix::equivalent_ao(f1, f2, tol)?;
            json!({
                "variant": "ao",
                "equivalent": e.equivalent,
                "scale_modulus": e.scale_modulus,
                "monoidally_equivalent": fmatrix::monoidally_equivalent_ao(f1, f2, tol)?,
            })
        }
        Variant::Au => json!({
            "variant": "au",
            "equivalent": fmatrix::equivalent_au(f1, f2, tol)?,
            "monoidally_equivalent": fmatrix::monoidally_equivalent_au(f1, f2, tol)?,
        }),
    };
    Ok(Outcome::new(result))
}

pub fn construct_companion(sign: Sign, trace: f64, n: usize, tol: &Tolerances) -> Result<(Outcome, CMat)> {
    let f = fmatrix::construct_ao_companion(sign, trace, n, tol)?;
    let cf = fmatrix::canonical_form_ao(&f, tol)?;
    let ff = f.matrix() * f.conj() - CMat::identity(n, n) * linalg::real(sign.value());
    let mut out = Outcome::new(json!({
        "sign": sign.value() as i32,
        "trace": f.trace(),
        "n": n,
        "lambdas": cf.lambdas,
        "fixed_block": cf.fixed_block,
        "matrix": matrix_json(f.matrix()),
    }));
    out.residual("conjugation", linalg::frob(&ff), tol.check);
    out.residual("trace", (f.trace() - trace).abs(), tol.check);
    Ok((out, f.into_matrix()))
}

pub fn category(variant: Variant, f: &FMatrix, level: Option<usize>, sixj: bool, tol: &Tolerances) -> Result<Outcome> {
    let r = realization(variant, f, tol)?;
    let cap = r.level_cap();
    let level = level.unwrap_or(cap);
    let r = r.with_level_cap(level.max(cap));
    let labels = variant.labels_up_to(level);
    let table: Vec<Value> = labels
        .par_iter()
        .map(|x| -> Result<Value> {
            Ok(json!({"label": x.to_string(), "dim": r.carrier_dim(x)?, "qdim": r.irrep_qdim(x)?}))
        })
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for y in &labels {
        for z in &labels {
            if y.len() + z.len() <= level {
                pairs.push((y.clone(), z.clone()));
            }
        }
    }
    let mut out = Outcome::default();
    let mut fusion = Vec::new();
    let mut completeness: f64 = 0.0;
    let mut orthogonality: f64 = 0.0;
    let fusions = pairs.par_iter().map(|(y, z)| r.fusion(y, z)).collect::<Result<Vec<_>>>()?;
    for ((y, z), fu) in pairs.iter().zip(&fusions) {
        let channels: Vec<Value> = fu
            .channels
            .iter()
            .map(|c| json!({"label": c.label.to_string(), "multiplicity": c.maps.len()}))
            .collect();
        completeness = completeness.max(fu.completeness_residual);
        orthogonality = orthogonality.max(fu.orthogonality_residual);
        fusion.push(json!({"left": y.to_string(), "right": z.to_string(), "channels": channels}));
    }
    out.residual("fusion_completeness", completeness, tol.check);
    out.residual("fusion_orthogonality", orthogonality, tol.check);
    let mut result = json!({
        "variant": variant.name(),
        "n": r.n(),
        "beta": r.beta(),
        "qdim": r.qdim(),
        "level": level,
        "labels": table,
        "fusion": fusion,
    });
    if sixj {
        let mut dump = Vec::new();
        let mut unitarity: f64 = 0.0;
        for x in &labels {
            for y in &labels {
                for z in &labels {
                    if x.len() + y.len() + z.len() > level {
                        continue;
                    }
                    for a in &labels {
                        match r.sixj(a, x, y, z) {
                            Ok(m) => {
                                unitarity = unitarity.max(linalg::unitarity_residual(&m));
                                let entries: Vec<Vec<[f64; 2]>> = (0..m.nrows())
                                    .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                                    .collect();
                                dump.push(json!({
                                    "a": a.to_string(), "x": x.to_string(), "y": y.to_string(), "z": z.to_string(),
                                    "entries": entries,
                                }));
                            }
                            Err(qmonoidal::Error::ZeroSpace(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        out.residual("sixj_unitarity", unitarity, tol.check);
        result["sixj"] = Value::Array(dump);
    }
    out.result = result;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LinkingAction {
    Gram,
    Relations,
    Multiplicities,
    Kms,
    All,
}

pub fn linking(
    variant: Variant,
    f1: &FMatrix,
    f2: &FMatrix,
    level: Option<usize>,
    action: LinkingAction,
    tol: &Tolerances,
) -> Result<Outcome> {
    let source = Arc::new(realization(variant, f1, tol)?);
    let target = Arc::new(realization(variant, f2, tol)?);
    let level = level.unwrap_or_else(|| default_level(f1.n()));
    let l = LinkingAlgebra::build(source, target, level)?;
    let wants = |a: LinkingAction| action == a || action == LinkingAction::All;
    let sizes: BTreeMap<String, usize> = l.basis_sizes().into_iter().map(|(x, s)| (x.to_string(), s)).collect();
    let mut out = Outcome::default();
    let mut result = json!({"variant": variant.name(), "level": level, "basis_sizes": sizes, "dim": l.dim()});
    let mut residuals = serde_json::Map::new();
    if wants(LinkingAction::Gram) {
        let g = l.gram_report()?;
        result["min_gram_eig"] = json!(g.min_eigenvalue);
        out.checks.push(Check::above("min_gram_eig", g.min_eigenvalue, 0.0));
        out.residual("gram_agreement", g.agreement, tol.check);
        out.residual("gram_hermitian", g.hermitian_residual, tol.check);
        residuals.insert("gram".into(), json!(g.agreement));
    }
    if wants(LinkingAction::Relations) {
        let r = l.check_relations()?;
        for (k, v) in [
            ("assoc", r.associativity),
            ("unitarity", r.unitarity),
            ("conjugation", r.conjugation),
            ("anti_multiplicativity", r.anti_multiplicativity),
            ("involution", r.involution),
            ("unit", r.unit),
        ] {
            out.residual(k, v, tol.check);
            residuals.insert(k.into(), json!(v));
        }
    }
    if wants(LinkingAction::Multiplicities) {
        let labels: Vec<Word> = l.labels().iter().filter(|x| 2 * x.len() <= level).cloned().collect();
        let spectral = labels.par_iter().map(|x| l.spectral_quantities(x)).collect::<Result<Vec<_>>>()?;
        let mut table = serde_json::Map::new();
        let mut chain: f64 = 0.0;
        let mut full: f64 = 0.0;
        for s in &spectral {
            table.insert(s.label.to_string(), json!({"mult": s.mult, "mult_q": s.mult_q, "dim_q": s.dim_q}));
            chain = chain.max(s.mult as f64 - s.mult_q).max(s.mult_q - s.dim_q);
            full = full.max((s.mult_q - s.dim_q).abs() / s.dim_q);
        }
        result["multiplicities"] = Value::Object(table);
        out.residual("multiplicity_chain", chain.max(0.0), tol.check);
        out.residual("full_quantum_multiplicity", full, tol.check);
    }
    if wants(LinkingAction::Kms) {
        let k = l.kms_check()?;
        out.residual("kms", k, tol.kms);
        residuals.insert("kms".into(), json!(k));
    }
    result["residuals"] = Value::Object(residuals);
    out.result = result;
    Ok(out)
}

pub fn cocycle(
    variant: Variant,
    f1: &FMatrix,
    f2: &FMatrix,
    level: usize,
    seed: Option<u64>,
    tol: &Tolerances,
) -> Result<Outcome> {
    let source = Arc::new(realization(variant, f1, tol)?);
    let target = Arc::new(realization(variant, f2, tol)?);
    let mut u = BTreeMap::new();
    if let Some(seed) = seed {
        let mut rng = StdRng::seed_from_u64(seed);
        for x in variant.labels_up_to(level).into_iter().filter(|x| !x.is_empty()) {
            let d = source.carrier_dim(&x)?;
            u.insert(x, random_unitary(d, &mut rng));
        }
    }
    let (c, normalization) = build_cocycle(&source, &target, level, &u)?;
    let rep = c.report(normalization)?;
    let decision = match variant {
        Variant::Ao => {
            let (g1, g2) = (fmatrix::normalize_ao(f1, tol)?, fmatrix::normalize_ao(f2, tol)?);
            match coboundary_equivalent(&g1, &g2, tol) {
                Ok(b) => json!(b),
                Err(e) => json!({"undecided": e.to_string()}),
            }
        }
        Variant::Au => Value::Null,
    };
    let mut out = Outcome::new(json!({
        "variant": variant.name(),
        "level": level,
        "seed": seed,
        "blocks": rep.blocks,
        "normalization": rep.normalization,
        "coboundary_equivalent": decision,
    }));
    out.residual("unitarity", rep.unitarity, tol.check);
    out.residual("identity", rep.identity, tol.check);
    Ok(out)
}

pub fn verify_all(only: &[usize], tol: &Tolerances) -> Outcome {
    let ids: Vec<usize> =
        verify::CRITERIA.iter().map(|c| c.0).filter(|id| only.is_empty() || only.contains(id)).collect();
    let outcomes: Vec<verify::Outcome> = ids.par_iter().map(|&id| verify::run(id, tol)).collect();
    let mut out = Outcome::new(json!({ "criteria": outcomes }));
    for o in &outcomes {
        out.checks.push(Check {
            name: format!("criterion {} ({})", o.id, o.name),
            passed: o.passed,
            value: o.failures.len() as f64,
            bound: 0.0,
        });
    }
    out
}
