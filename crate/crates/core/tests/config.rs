use hyperbolic_cgc::config::{parse_config, BcMode, DomainSpec, Mode};
use hyperbolic_cgc::Error;

#[test]
fn minimal_config_is_valid() {
    let cfg = parse_config("K = -0.75\nQ = [[0, 0]]\nN = 65\nr = 0.8\n").unwrap();
    assert_eq!(cfg.k, -0.75);
    assert_eq!(cfg.n, 65);
    assert_eq!(cfg.domain, DomainSpec::Inscribed(0.8));
    assert_eq!(cfg.bc, BcMode::Heuristic);
    assert_eq!(cfg.mode, Mode::Direct);
    assert!(cfg.q.is_zero());
}

#[test]
fn curvature_out_of_range() {
    match parse_config("K = -1.5\nN = 65\nr = 0.8\n") {
        Err(Error::Validation { key, .. }) => assert_eq!(key, "K"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn even_grid() {
    match parse_config("K = -0.75\nN = 64\nr = 0.8\n") {
        Err(Error::Validation { key, message }) => {
            assert_eq!(key, "N");
            assert!(message.contains("odd"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn errors_are_itemized() {
    let err = parse_config("K = 0\nN = 4\nr = 0.8\nbogus = 1\n").unwrap_err();
    let Error::Invalid { items } = &err else { panic!("{err:?}") };
    let keys: Vec<&str> = items.iter().map(|(k, _)| k.as_str()).collect();
    for k in ["K", "N", "bogus"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
}

#[test]
fn syntax_errors_are_parse_errors() {
    assert!(matches!(parse_config("K = = 1"), Err(Error::Parse(_))));
}

#[test]
fn rectangle_must_stay_inside_the_disk() {
    let err = parse_config("K = -0.5\nN = 33\nrect = [-0.8, 0.8, -0.8, 0.8]\n").unwrap_err();
    assert!(matches!(err, Error::Validation { ref key, .. } if key == "rect"), "{err:?}");
    assert!(parse_config("K = -0.5\nN = 33\nrect = [-0.8, 0.8, -0.8, 0.8]\ndomain = \"plane\"\n").is_ok());
}

#[test]
fn converse_mode_derives_k() {
    let cfg = parse_config("N = 33\nr = 0.8\nmode = \"converse\"\ntarget = \"S2\"\nlambda1 = [3, 0]\n").unwrap();
    // c = (1 - 9)/6, K = 1/c^2
    assert!((cfg.k - 9.0 / 16.0).abs() < 1e-15);
    assert!(parse_config("K = -0.5\nN = 33\nr = 0.8\nmode = \"converse\"\nlambda1 = [3, 0]\n").is_err());
}

#[test]
fn tolerance_overrides() {
    let cfg = parse_config("K = 2\nN = 33\nr = 0.5\ndomain = \"plane\"\ntol.det = 1e-6\ntol.k_spread = 0.1\n").unwrap();
    assert_eq!(cfg.tol.det, 1e-6);
    assert_eq!(cfg.tol.k_spread, 0.1);
    assert!(parse_config("K = 2\nN = 33\nr = 0.5\ntol.nope = 1\n").is_err());
}
