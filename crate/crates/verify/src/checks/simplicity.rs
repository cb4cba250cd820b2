use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use fquad_core::f2::Echelon;
use fquad_core::family::endomorphisms;
use fquad_core::functors::exterior::{k_functor, lambda_iso};
use fquad_core::functors::{l_functor, Functor};
use fquad_core::{F2Matrix, F2Vector, QuadSpace, Result};

use super::bit;
use crate::{Check, CheckConfig, Outcome, RosterEntry, Row};

/// Values of at most this dimension are scanned vector by vector.
const EXHAUSTIVE_MAX_DIM: usize = 12;

/// Generation evidence for `Lⁿ_α`: every tested nonzero vector of `Lⁿ_α(V)`
/// generates all of `Lⁿ_α(V)` under a finite endomorphism family. This is
/// evidence at a morphism budget, not a proof of simplicity. Each row also
/// records the smallest extra apex dimension at which generation holds.
pub struct SimplicityEvidence;

impl Check for SimplicityEvidence {
    fn name(&self) -> &'static str {
        "check_simplicity_evidence"
    }

    fn summary(&self) -> &'static str {
        "every tested vector of L^n(V) generates L^n(V) under Hom(V, V)"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        let small = CheckConfig {
            roster: cfg
                .roster
                .iter()
                .filter(|e| e.space.dim() <= cfg.simplicity_max_dim)
                .cloned()
                .collect(),
            ..cfg.clone()
        };
        let parts = small
            .roster
            .par_iter()
            .map(|e| object_rows(e, cfg))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        let mut drawn = Map::new();
        for (r, s) in parts {
            rows.extend(r);
            drawn.extend(s);
        }
        rows.push(negative_control(cfg)?);
        Ok(Outcome {
            rows,
            status: Some(format!("evidence at budget {}", cfg.apex_budget)),
            samples: Some(Value::Object(drawn)),
        })
    }
}

/// Rows for one object, plus the family composition and any sampled test
/// vectors keyed by object, α and n.
fn object_rows(e: &RosterEntry, cfg: &CheckConfig) -> Result<(Vec<Row>, Map<String, Value>)> {
    let w = &e.space;
    let (family, counts) = endomorphisms(w, cfg.seed, cfg.apex_budget)?;
    let apex_extra: Vec<usize> = family.iter().map(|t| t.apex().dim() - w.dim()).collect();
    let mut rows = Vec::new();
    let mut drawn = Map::new();
    drawn.insert(
        format!("{}:family", e.name),
        json!({
            "identity": counts.identity,
            "isometries": counts.isometries,
            "projectors": counts.projectors,
            "lifts": counts.lifts,
            "through_blocks": counts.through_blocks,
            "random": counts.random,
        }),
    );
    for &alpha in &cfg.alphas {
        for n in 1..=2 {
            let l = l_functor(alpha, n);
            let dim = l.dim(w)?;
            let mut row = Row::new(&e.name)
                .with("alpha", bit(alpha))
                .with("n", n)
                .with("dim_L", dim)
                .with("family", family.len());
            if dim == 0 {
                row.set("vectors", 0);
                rows.push(row);
                continue;
            }
            let maps = family
                .iter()
                .map(|t| Ok(l.on_morphism(t)?.matrix))
                .collect::<Result<Vec<_>>>()?;
            let vectors = test_vectors(dim, cfg, w, alpha, n);
            let exhaustive = dim <= EXHAUSTIVE_MAX_DIM;
            if !exhaustive {
                drawn.insert(
                    format!("{}:a={}:n={n}", e.name, bit(alpha)),
                    Value::Array(vectors.iter().map(|v| Value::String(v.to_string())).collect()),
                );
            }
            let mut max_rounds = 0;
            let mut stable = None;
            for extra in 0..=cfg.apex_budget {
                let allowed: Vec<F2Matrix> = maps
                    .iter()
                    .zip(&apex_extra)
                    .filter(|(_, &x)| x <= extra)
                    .map(|(m, _)| m.clone())
                    .collect();
                let mut generate = true;
                let mut rounds = 0;
                for v in &vectors {
                    let (full, r) = closure(v, &allowed);
                    rounds = rounds.max(r);
                    if !full {
                        generate = false;
                        break;
                    }
                }
                if generate {
                    stable = Some(extra);
                    max_rounds = rounds;
                    break;
                }
            }
            row.set("vectors", vectors.len());
            row.set("exhaustive", exhaustive);
            row.set("max_rounds", max_rounds);
            row.set("stable_budget", stable.map(|b| b as i64).unwrap_or(-1));
            row.require("all_generate", stable.is_some());
            rows.push(row);
        }
    }
    Ok((rows, drawn))
}

fn test_vectors(dim: usize, cfg: &CheckConfig, w: &QuadSpace, alpha: bool, n: usize) -> Vec<F2Vector> {
    if dim <= EXHAUSTIVE_MAX_DIM {
        return (1..1u64 << dim).map(|x| F2Vector::from_u64(dim, x)).collect();
    }
    let salt = (w.dim() as u64) << 32 ^ w.q_diag() ^ (alpha as u64) << 48 ^ (n as u64) << 52;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ salt);
    let mut out: Vec<F2Vector> = (0..dim).map(|i| F2Vector::unit(dim, i)).collect();
    while out.len() < dim + cfg.vector_samples {
        let v = F2Vector::from_indices(dim, (0..dim).filter(|_| rng.gen()));
        if !v.is_zero() {
            out.push(v);
        }
    }
    out
}

/// Closes `span{v}` under `maps`; returns whether the span fills the whole
/// value and how many rounds it took to stabilize.
fn closure(v: &F2Vector, maps: &[F2Matrix]) -> (bool, usize) {
    let dim = v.len();
    let mut span = Echelon::new(dim);
    span.insert(v.clone());
    let mut frontier = vec![v.clone()];
    let mut rounds = 0;
    while !frontier.is_empty() && !span.is_full() {
        rounds += 1;
        let mut next = Vec::new();
        for u in &frontier {
            for m in maps {
                let image = m.mul_vec(u);
                if span.insert(image.clone()) {
                    next.push(image);
                }
            }
        }
        frontier = next;
    }
    (span.is_full(), rounds)
}

/// `Λ¹ ⊗ iso_α` is not simple: a vector of `K¹_α` stays inside `K¹_α`.
fn negative_control(cfg: &CheckConfig) -> Result<Row> {
    let w = QuadSpace::parse("H0+H0")?;
    let alpha = true;
    let (family, _) = endomorphisms(&w, cfg.seed, cfg.apex_budget)?;
    let f = lambda_iso(alpha, 1);
    let maps = family
        .iter()
        .map(|t| Ok(f.on_morphism(t)?.matrix))
        .collect::<Result<Vec<_>>>()?;
    let k1 = k_functor(alpha, 1).subspace(&w)?;
    let v = k1.basis()[0].clone();
    let (full, rounds) = closure(&v, &maps);
    let mut row = Row::new("H0+H0")
        .with("alpha", bit(alpha))
        .with("n", "control: Lambda^1(x)iso from a K^1 vector")
        .with("dim_value", f.dim(&w)?)
        .with("family", family.len())
        .with("vectors", 1)
        .with("max_rounds", rounds);
    row.require("control_fails_to_generate", !full);
    Ok(row)
}
