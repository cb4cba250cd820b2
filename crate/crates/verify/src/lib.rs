//! Named checks that recompute exact sequences, filtrations and
//! composition-series statements as rank and dimension equalities on a
//! roster of small quadratic spaces.

use std::time::Instant;

use rayon::prelude::*;

use fquad_core::{QuadSpace, Result};

pub mod checks;
pub mod report;

pub use report::{CheckReport, Row};

/// Seed for every sampled family (random cospans, lifted linear maps,
/// sampled isometries and sampled test vectors). Reports echo it so a run
/// can be reproduced exactly.
pub const DEFAULT_SEED: u64 = 0x00F2_5EED;

/// Covers both Arf classes up to dimension 6.
pub const DEFAULT_ROSTER: [&str; 5] = ["H0", "H1", "H0+H0", "H0+H1", "H0+H0+H0"];

#[derive(Clone, Debug)]
pub struct RosterEntry {
    pub name: String,
    pub space: QuadSpace,
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub roster: Vec<RosterEntry>,
    pub alphas: Vec<bool>,
    pub n_max: usize,
    pub d_max: usize,
    pub seed: u64,
    /// Seeded morphism pairs for the category laws.
    pub samples: usize,
    /// Extra apex dimension allowed in endomorphism families.
    pub apex_budget: usize,
    /// Test vectors per object when a value is too large to scan.
    pub vector_samples: usize,
    /// Largest object dimension used for generation evidence.
    pub simplicity_max_dim: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            roster: parse_roster(&DEFAULT_ROSTER.join(",")).expect("default roster parses"),
            alphas: vec![false, true],
            n_max: 3,
            d_max: 2,
            seed: DEFAULT_SEED,
            samples: 100,
            apex_budget: fquad_core::family::APEX_BUDGET,
            vector_samples: 200,
            simplicity_max_dim: 4,
        }
    }
}

impl CheckConfig {
    pub fn roster_names(&self) -> Vec<String> {
        self.roster.iter().map(|e| e.name.clone()).collect()
    }
}

/// Comma-separated space expressions; `default` names the default roster.
pub fn parse_roster(text: &str) -> Result<Vec<RosterEntry>> {
    let text = if text.trim() == "default" {
        DEFAULT_ROSTER.join(",")
    } else {
        text.to_string()
    };
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            Ok(RosterEntry {
                name: s.to_string(),
                space: QuadSpace::parse(s)?,
            })
        })
        .collect()
}

/// What a check hands back before timing and bookkeeping are attached.
#[derive(Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub status: Option<String>,
    pub samples: Option<serde_json::Value>,
}

impl From<Vec<Row>> for Outcome {
    fn from(rows: Vec<Row>) -> Self {
        Self {
            rows,
            ..Self::default()
        }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, cfg: &CheckConfig) -> Result<Outcome>;
}

/// Checks registered by name, run in registration order.
pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self { checks: Vec::new() };
        r.register(Box::new(checks::decomposition::Decomposition));
        r.register(Box::new(checks::s2::S2Ses));
        r.register(Box::new(checks::complex::MuComplex));
        r.register(Box::new(checks::kl::KlSes));
        r.register(Box::new(checks::layers::Layers));
        r.register(Box::new(checks::simplicity::SimplicityEvidence));
        r.register(Box::new(checks::noniso::PairwiseNoniso));
        r.register(Box::new(checks::category::CategoryLaws));
        r
    }
}

impl CheckRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a check, replacing any check with the same name.
    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn run(&self, name: &str, cfg: &CheckConfig) -> Option<CheckReport> {
        self.get(name).map(|c| run_check(c, cfg))
    }

    /// Runs the named checks in parallel; reports come back in the order
    /// the names were given.
    pub fn run_many(&self, names: &[&str], cfg: &CheckConfig) -> Vec<CheckReport> {
        let selected: Vec<&dyn Check> = names.iter().filter_map(|n| self.get(n)).collect();
        selected.par_iter().map(|c| run_check(*c, cfg)).collect()
    }

    pub fn run_all(&self, cfg: &CheckConfig) -> Vec<CheckReport> {
        self.run_many(&self.names(), cfg)
    }
}

fn run_check(check: &dyn Check, cfg: &CheckConfig) -> CheckReport {
    let start = Instant::now();
    let outcome = check.run(cfg);
    let runtime_ms = start.elapsed().as_millis() as u64;
    let (rows, status, samples, error) = match outcome {
        Ok(o) => (o.rows, o.status, o.samples, None),
        Err(e) => (Vec::new(), None, None, Some(e.to_string())),
    };
    CheckReport {
        check: check.name().to_string(),
        roster: cfg.roster_names(),
        passed: error.is_none() && !rows.is_empty() && rows.iter().all(|r| r.ok),
        rows,
        seed: cfg.seed,
        status,
        error,
        samples,
        runtime_ms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_parsing() {
        assert_eq!(parse_roster("default").unwrap().len(), DEFAULT_ROSTER.len());
        let r = parse_roster(" H0 , H0+x1,").unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].name, "H0+x1");
        assert_eq!(r[1].space.dim(), 3);
        assert!(parse_roster("H0,H7").is_err());
    }

    #[test]
    fn failing_rows_fail_the_report() {
        struct Broken;
        impl Check for Broken {
            fn name(&self) -> &'static str {
                "broken"
            }
            fn summary(&self) -> &'static str {
                "always fails one row"
            }
            fn run(&self, _: &CheckConfig) -> Result<Outcome> {
                let mut row = Row::new("H0");
                row.require("holds", false);
                Ok(vec![Row::new("H1"), row].into())
            }
        }
        let mut reg = CheckRegistry::new();
        reg.register(Box::new(Broken));
        let rep = reg.run("broken", &CheckConfig::default()).unwrap();
        assert!(!rep.passed);
        assert!(rep.rows[0].ok && !rep.rows[1].ok);
    }
}
