use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use fquad_core::family::endomorphisms;
use fquad_core::functors::{l_functor, Functor};
use fquad_core::{F2Matrix, QuadSpace, Result};

use super::bit;
use crate::{Check, CheckConfig, Outcome, Row};

/// The `Lⁿ_α` are pairwise non-isomorphic: any two differ in the first
/// `H0^{⊥m}` where they are nonzero, in their dimension there, or on some
/// endomorphism `T` there (one kills `T` and the other does not, or their
/// traces differ). Witnesses are indices into the endomorphism family.
pub struct PairwiseNoniso;

struct Profile {
    alpha: bool,
    n: usize,
    /// First `m` with `Lⁿ_α(H0^{⊥m}) ≠ 0`.
    d: Option<usize>,
    dims: BTreeMap<usize, usize>,
}

impl Check for PairwiseNoniso {
    fn name(&self) -> &'static str {
        "check_pairwise_noniso"
    }

    fn summary(&self) -> &'static str {
        "L^n_a and L^n'_a' are distinguished by d, by dimension, or by a trace"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        let m_max = cfg.n_max.max(1);
        let spaces: Vec<QuadSpace> = (0..=m_max).map(QuadSpace::h0_power).collect();
        let mut profiles = Vec::new();
        let mut rows = Vec::new();
        for &alpha in &cfg.alphas {
            for n in 1..=cfg.n_max {
                let l = l_functor(alpha, n);
                let mut dims = BTreeMap::new();
                for (m, w) in spaces.iter().enumerate() {
                    dims.insert(m, l.dim(w)?);
                }
                let d = dims.iter().find(|(_, &v)| v > 0).map(|(&m, _)| m);
                let mut row = Row::new(format!("L^{n}_{}", bit(alpha)))
                    .with("alpha", bit(alpha))
                    .with("n", n)
                    .with("d", d.map(|x| x as i64).unwrap_or(-1));
                for (m, v) in &dims {
                    row.set(&format!("dim_H0^{m}"), *v);
                }
                row.require("nonzero_somewhere", d.is_some());
                rows.push(row);
                profiles.push(Profile { alpha, n, d, dims });
            }
        }

        let mut families: BTreeMap<usize, Vec<fquad_core::TqMorphism>> = BTreeMap::new();
        for (i, a) in profiles.iter().enumerate() {
            for b in &profiles[i + 1..] {
                let mut row = Row::new(format!("L^{}_{} vs L^{}_{}", a.n, bit(a.alpha), b.n, bit(b.alpha)))
                    .with("d_left", a.d.map(|x| x as i64).unwrap_or(-1))
                    .with("d_right", b.d.map(|x| x as i64).unwrap_or(-1));
                let d_differs = a.d != b.d;
                let at = a.d.max(b.d).unwrap_or(0);
                let dims_differ = a.dims.get(&at) != b.dims.get(&at);
                row.set("d_differs", d_differs);
                row.set("dims_differ", dims_differ);
                let w = &spaces[at];
                if let Entry::Vacant(slot) = families.entry(at) {
                    slot.insert(endomorphisms(w, cfg.seed, cfg.apex_budget)?.0);
                }
                let fam = &families[&at];
                let (la, lb) = (l_functor(a.alpha, a.n), l_functor(b.alpha, b.n));
                let (mut zero_witness, mut trace_witness) = (None, None);
                for (k, t) in fam.iter().enumerate() {
                    let ma = la.on_morphism(t)?.matrix;
                    let mb = lb.on_morphism(t)?.matrix;
                    if zero_witness.is_none() && ma.is_zero() != mb.is_zero() {
                        zero_witness = Some(k);
                    }
                    if trace_witness.is_none() && trace(&ma) != trace(&mb) {
                        trace_witness = Some(k);
                    }
                    if zero_witness.is_some() && trace_witness.is_some() {
                        break;
                    }
                }
                let index = |w: Option<usize>| w.map(|k| k as i64).unwrap_or(-1);
                row.set("zero_witness", index(zero_witness));
                row.set("trace_witness", index(trace_witness));
                row.require(
                    "distinguished",
                    d_differs || dims_differ || zero_witness.is_some() || trace_witness.is_some(),
                );
                rows.push(row);
            }
        }
        Ok(rows.into())
    }
}

fn trace(m: &F2Matrix) -> bool {
    (0..m.rows().min(m.cols())).fold(false, |acc, i| acc ^ m.get(i, i))
}
