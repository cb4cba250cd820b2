use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use fquad_core::f2::enumerate_subspaces;
use fquad_core::functors::filtration::kd_m;
use fquad_core::functors::{k_functor, l_functor, FunctorRef, Iso, Lambda, MixAB};
use fquad_core::quad::{enumerate_embeddings, random_embedding, witt_extend};
use fquad_core::{F2Vector, IsoMap, QuadSpace, Result, TqMorphism};

use crate::{Check, CheckConfig, Outcome, Row};

/// Objects used for sampled laws are capped at this dimension so every
/// value stays small.
const LAW_MAX_DIM: usize = 4;

/// Category laws of Tq and functoriality of the basic functors on seeded
/// morphisms, plus exhaustive Witt extension on small objects.
pub struct CategoryLaws;

impl Check for CategoryLaws {
    fn name(&self) -> &'static str {
        "check_category_laws"
    }

    fn summary(&self) -> &'static str {
        "units, associativity, relation moves, functoriality and Witt extension"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        let mut objects = vec![("0".to_string(), QuadSpace::zero())];
        objects.extend(
            cfg.roster
                .iter()
                .filter(|e| e.space.dim() <= LAW_MAX_DIM)
                .map(|e| (e.name.clone(), e.space.clone())),
        );
        let functors = functors();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut tally = Tally::default();
        let mut drawn = Vec::with_capacity(cfg.samples);
        for _ in 0..cfg.samples {
            let pick = |rng: &mut ChaCha8Rng| objects[rng.gen_range(0..objects.len())].clone();
            let (na, a) = pick(&mut rng);
            let (nb, b) = pick(&mut rng);
            let (nc, c) = pick(&mut rng);
            let (nd, d) = pick(&mut rng);
            let t1 = sample(&a, &b, &mut rng)?;
            let t2 = sample(&b, &c, &mut rng)?;
            let t3 = sample(&c, &d, &mut rng)?;
            let t21 = t1.then(&t2)?;
            tally.record("epsilon_composes", t21.epsilon() == t2.epsilon().mul(&t1.epsilon()));
            let left = t21.then(&t3)?;
            let right = t1.then(&t2.then(&t3)?)?;
            let pre = TqMorphism::identity(&a).then(&t1)?;
            let post = t1.then(&TqMorphism::identity(&b))?;
            tally.record("epsilon_associative", left.epsilon() == right.epsilon());
            let mut moves = vec![IsoMap::first_summand(t1.apex(), &QuadSpace::h0())];
            if let Some(g) = random_embedding(t1.apex(), t1.apex(), &mut rng) {
                moves.push(g);
            }
            let moved = moves.iter().map(|g| t1.relation_move(g)).collect::<Result<Vec<_>>>()?;
            for f in &functors {
                let m1 = f.on_morphism(&t1)?.matrix;
                let m2 = f.on_morphism(&t2)?.matrix;
                tally.record("functoriality", f.on_morphism(&t21)?.matrix == m2.mul(&m1));
                tally.record(
                    "associativity",
                    f.on_morphism(&left)?.matrix == f.on_morphism(&right)?.matrix,
                );
                tally.record("left_unit", f.on_morphism(&pre)?.matrix == m1);
                tally.record("right_unit", f.on_morphism(&post)?.matrix == m1);
                tally.record(
                    "identity_to_identity",
                    f.on_morphism(&TqMorphism::identity(&a))?.matrix.is_identity(),
                );
                for mv in &moved {
                    tally.record("relation_moves", f.on_morphism(mv)?.matrix == m1);
                }
            }
            let images: Vec<u64> = (0..a.dim()).map(|_| rng.gen_range(0..b.size())).collect();
            let lift = TqMorphism::lift_linear_images(&a, &b, &images)?;
            tally.record("lift_epsilon", lift.epsilon_images() == images);
            drawn.push(json!({
                "objects": [na, nb, nc, nd],
                "morphisms": [cospan(&t1), cospan(&t2), cospan(&t3)],
                "moves": moves.iter().map(|g| g.images().to_vec()).collect::<Vec<_>>(),
                "lift_images": images,
            }));
        }
        let mut rows = tally.rows(functors.len());
        for s in ["H0", "H1", "H0+H0", "H0+H1", "H1+H1"] {
            rows.push(witt_row(s)?);
        }
        Ok(Outcome {
            rows,
            status: None,
            samples: Some(Value::Array(drawn)),
        })
    }
}

/// A cospan representative as apex form plus the images of both legs.
fn cospan(t: &TqMorphism) -> Value {
    json!({
        "apex": serde_json::from_str::<Value>(&t.apex().to_json()).expect("space json"),
        "left": t.left().images(),
        "right": t.right().images(),
    })
}

fn functors() -> Vec<FunctorRef> {
    let mut out: Vec<FunctorRef> = vec![Arc::new(Iso::line(false)), Arc::new(Iso::line(true))];
    for a in [false, true] {
        for b in [false, true] {
            out.push(Arc::new(MixAB::new(a, b)));
        }
    }
    for n in 0..=4 {
        out.push(Arc::new(Lambda::new(n)));
    }
    for a in [false, true] {
        out.push(k_functor(a, 2));
        out.push(l_functor(a, 2));
        out.push(kd_m(a, 1));
    }
    out
}

fn sample(v: &QuadSpace, w: &QuadSpace, rng: &mut ChaCha8Rng) -> Result<TqMorphism> {
    if rng.gen_bool(0.3) {
        let images: Vec<u64> = (0..v.dim()).map(|_| rng.gen_range(0..w.size())).collect();
        TqMorphism::lift_linear_images(v, w, &images)
    } else {
        TqMorphism::random(v, w, v.dim().max(w.dim()) + 4, rng)
    }
}

#[derive(Default)]
struct Tally {
    entries: Vec<(&'static str, usize, usize)>,
}

impl Tally {
    fn record(&mut self, law: &'static str, holds: bool) {
        let i = match self.entries.iter().position(|e| e.0 == law) {
            Some(i) => i,
            None => {
                self.entries.push((law, 0, 0));
                self.entries.len() - 1
            }
        };
        self.entries[i].1 += 1;
        if !holds {
            self.entries[i].2 += 1;
        }
    }

    fn rows(&self, functors: usize) -> Vec<Row> {
        self.entries
            .iter()
            .map(|&(law, checked, failed)| {
                let mut row = Row::new(law)
                    .with("functors", functors)
                    .with("checked", checked)
                    .with("failed", failed);
                row.require("holds", checked > 0 && failed == 0);
                row
            })
            .collect()
    }
}

/// Every isometry between subspaces of `V` extends to `O(V)`.
fn witt_row(name: &str) -> Result<Row> {
    let v = QuadSpace::parse(name)?;
    let n = v.dim();
    let (mut checked, mut failed) = (0usize, 0usize);
    for k in 1..=n {
        for sub in enumerate_subspaces(n, k) {
            let basis: Vec<u64> = sub.basis().iter().map(F2Vector::to_u64).collect();
            let d = v.restrict(&basis);
            for h in enumerate_embeddings(&d, &v) {
                checked += 1;
                let ok = match witt_extend(&v, &basis, h.images()) {
                    Ok(g) => {
                        basis.iter().zip(h.images()).all(|(b, img)| g.apply(*b) == *img)
                            && g.preserves_q_exhaustively()
                    }
                    Err(_) => false,
                };
                failed += !ok as usize;
            }
        }
    }
    let mut row = Row::new(name)
        .with("law", "witt_extension")
        .with("checked", checked)
        .with("failed", failed);
    row.require("holds", checked > 0 && failed == 0);
    Ok(row)
}
