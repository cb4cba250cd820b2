use fquad_verify::{parse_roster, CheckConfig, CheckRegistry, DEFAULT_SEED};

#[test]
fn every_registered_check_passes_on_the_default_roster() {
    let reg = CheckRegistry::new();
    let cfg = CheckConfig::default();
    for rep in reg.run_all(&cfg) {
        assert!(rep.passed, "{}", rep.to_text());
        assert_eq!(rep.seed, DEFAULT_SEED);
    }
}

#[test]
fn registry_names_are_stable() {
    let reg = CheckRegistry::new();
    assert_eq!(
        reg.names(),
        [
            "check_decomposition",
            "check_s2_ses",
            "check_mu_complex",
            "check_KL_ses",
            "check_layers",
            "check_simplicity_evidence",
            "check_pairwise_noniso",
            "check_category_laws",
        ]
    );
    assert!(reg.get("bogus").is_none());
}

#[test]
fn reports_are_deterministic() {
    let reg = CheckRegistry::new();
    let cfg = CheckConfig {
        roster: parse_roster("H0,H0+H1").unwrap(),
        samples: 20,
        ..CheckConfig::default()
    };
    for name in ["check_KL_ses", "check_category_laws", "check_simplicity_evidence"] {
        let a = reg.run(name, &cfg).unwrap();
        let b = reg.run(name, &cfg).unwrap();
        assert_eq!(a.deterministic_json(), b.deterministic_json());
        assert_eq!(a.to_csv(), b.to_csv());
    }
}

#[test]
fn seed_changes_sampled_rows_only_through_the_seed() {
    let reg = CheckRegistry::new();
    let mut cfg = CheckConfig {
        roster: parse_roster("H0+H0").unwrap(),
        samples: 10,
        ..CheckConfig::default()
    };
    cfg.seed = 1;
    let rep = reg.run("check_category_laws", &cfg).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.seed, 1);
}
