//! Finite families of endomorphisms used as stand-ins for `Hom_Tq(V, V)`
//! when testing naturality and generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::TqMorphism;
use crate::error::Result;
use crate::f2::F2Matrix;
use crate::quad::{orthogonal_group, random_embedding, QuadSpace};

/// Extra apex dimension allowed over the object itself.
pub const APEX_BUDGET: usize = 6;

#[derive(Clone, Debug, Default)]
pub struct FamilyCounts {
    pub identity: usize,
    pub isometries: usize,
    pub projectors: usize,
    pub lifts: usize,
    pub through_blocks: usize,
    pub random: usize,
}

impl FamilyCounts {
    pub fn total(&self) -> usize {
        self.identity + self.isometries + self.projectors + self.lifts + self.through_blocks + self.random
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Identity,
    Isometry,
    Projector,
    Lift,
    Block,
    Random,
}

/// Endomorphisms of `V`: the identity, `O(V)` (all of it up to dimension
/// 4, a seeded sample above), the line projectors `T_u`, lifts of seeded
/// linear endomorphisms, the composites `V → V⊥H0^k →g V⊥H0^k → V` for
/// seeded isometries `g`, and seeded random cospans. Members whose apex
/// exceeds `dim V + budget` are dropped.
pub fn endomorphisms(v: &QuadSpace, seed: u64, budget: usize) -> Result<(Vec<TqMorphism>, FamilyCounts)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((v.dim() as u64) << 32) ^ v.q_diag());
    let mut all = vec![(Kind::Identity, TqMorphism::identity(v))];
    if v.dim() > 0 {
        if v.dim() <= 4 {
            for g in orthogonal_group(v)? {
                all.push((Kind::Isometry, TqMorphism::from_isometry(&g)?));
            }
        } else {
            for _ in 0..48 {
                if let Some(g) = random_embedding(v, v, &mut rng) {
                    all.push((Kind::Isometry, TqMorphism::from_isometry(&g)?));
                }
            }
        }
        if 2 * (v.dim() - 1) <= budget {
            for u in 1..v.size() {
                all.push((Kind::Projector, TqMorphism::line_projector(v, u)?));
            }
        }
        all.push((Kind::Lift, TqMorphism::lift_linear(&F2Matrix::zeros(v.dim(), v.dim()), v, v)?));
        for _ in 0..24 {
            let images: Vec<u64> = (0..v.dim()).map(|_| rng.gen_range(0..v.size())).collect();
            all.push((Kind::Lift, TqMorphism::lift_linear_images(v, v, &images)?));
        }
        for k in 1..=budget / 2 {
            let extra = QuadSpace::h0_power(k);
            let big = v.orthogonal_sum(&extra);
            let incl = TqMorphism::inclusion(v, &extra)?;
            let retr = TqMorphism::retraction(v, &extra)?;
            all.push((Kind::Block, incl.then(&retr)?));
            for _ in 0..6 {
                if let Some(g) = random_embedding(&big, &big, &mut rng) {
                    let t = incl.then(&TqMorphism::from_isometry(&g)?)?.then(&retr)?;
                    all.push((Kind::Block, t));
                }
            }
        }
        for _ in 0..16 {
            all.push((Kind::Random, TqMorphism::random(v, v, v.dim() + budget, &mut rng)?));
        }
    }
    let mut counts = FamilyCounts::default();
    let mut out = Vec::with_capacity(all.len());
    for (kind, t) in all {
        if t.apex().dim() > v.dim() + budget {
            continue;
        }
        match kind {
            Kind::Identity => counts.identity += 1,
            Kind::Isometry => counts.isometries += 1,
            Kind::Projector => counts.projectors += 1,
            Kind::Lift => counts.lifts += 1,
            Kind::Block => counts.through_blocks += 1,
            Kind::Random => counts.random += 1,
        }
        out.push(t);
    }
    Ok((out, counts))
}
