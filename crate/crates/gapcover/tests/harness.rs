use gapcover::generate::{corpus, gen_random, GenError, Kind, Params};
use gapcover::run::{aggregate, exit_code, run_batch, Flags, Status, EXIT_CERT_FAILURE, EXIT_OK};
use gapcover::spec::{parse_instance, parse_items, BodySpec, Item};
use gapcover_core::enumerate::Gap;
use gapcover_core::exactalg::{self, Mat};

#[test]
fn parses_ball_and_vertices() {
    let s = parse_instance(r#"{"dim":2,"body":{"type":"ball","radius":"2"}}"#).unwrap();
    assert_eq!(s.dim, 2);
    assert!(matches!(s.body, BodySpec::Ball(_)));
    let s = parse_instance(r#"{"dim":2,"body":{"type":"vertices","points":[[2,1],[1,2]]}}"#).unwrap();
    assert!(matches!(s.body, BodySpec::Vertices(ref p) if p.len() == 2));
}

#[test]
fn ragged_form_reports_path() {
    let e = parse_instance(r#"{"dim":2,"body":{"type":"ellipsoid","form":[[1,0],[0]]}}"#).unwrap_err();
    assert_eq!(e.path, "body.form[1]");
}

#[test]
fn rejects_bad_inputs() {
    for text in [
        r#"{"dim":2,"body":{"type":"ball","radius":"2"},"extra":1}"#,
        r#"{"dim":2,"body":{"type":"box","halfwidths":[1]}}"#,
        r#"{"dim":2,"body":{"type":"ellipsoid","form":[[1,1],[0,1]]}}"#,
        r#"{"dim":2,"body":{"type":"ball","radius":"-1"}}"#,
        r#"{"dim":2,"body":{"type":"ball","radius":"2"},"eps":"x"}"#,
        "not json",
    ] {
        assert!(parse_instance(text).is_err(), "{text}");
    }
}

#[test]
fn spec_json_round_trips() {
    for s in corpus(&[1, 2, 3], 6, 11).unwrap() {
        let back = parse_instance(&s.to_json().to_string()).unwrap();
        assert_eq!(back, s);
    }
}

#[test]
fn generation_is_seed_deterministic() {
    let p = Params { h: 3, radius: exactalg::rat(4), ..Params::default() };
    let a = gen_random(Kind::LatticeBall, 2, 7, &p).unwrap();
    assert_eq!(a, gen_random(Kind::LatticeBall, 2, 7, &p).unwrap());
    assert_ne!(a, gen_random(Kind::LatticeBall, 2, 8, &p).unwrap());
    assert!(matches!(a.body, BodySpec::Ellipsoid(_)));
}

#[test]
fn random_vertices_span() {
    let p = Params { points: 6, bound: 5, ..Params::default() };
    let s = gen_random(Kind::RandomVertices, 3, 1, &p).unwrap();
    let BodySpec::Vertices(pts) = &s.body else { panic!("vertices expected") };
    assert_eq!(pts.len(), 6);
    assert_eq!(exactalg::rank(&Mat::from_rows(pts.clone()).unwrap()), 3);
}

#[test]
fn one_dimensional_ellipsoid_is_an_interval() {
    for seed in 0..5 {
        let s = gen_random(Kind::RandomEllipsoid, 1, seed, &Params::default()).unwrap();
        assert!(matches!(s.body, BodySpec::Box(ref h) if h.len() == 1));
    }
}

#[test]
fn generation_errors() {
    assert_eq!(gen_random(Kind::LatticeBall, 0, 0, &Params::default()), Err(GenError::Dimension));
    // With h = 0 no matrix is ever nonsingular.
    let p = Params { h: 0, ..Params::default() };
    assert!(gen_random(Kind::LatticeBall, 2, 0, &p).is_err());
}

#[test]
fn lattice_ball_batch_certifies() {
    let items: Vec<Item> = corpus(&[3], 12, 0)
        .unwrap()
        .into_iter()
        .filter(|s| s.kind.as_deref() == Some("lattice-ball"))
        .map(|instance| Item { instance, gap: None })
        .collect();
    assert_eq!(items.len(), 4);
    let out = run_batch(&items, &Flags::default());
    assert_eq!(exit_code(&out, false), EXIT_OK);
    let a = aggregate(&out);
    assert_eq!(a.certified, 4);
    let max = out.iter().map(|o| o.headline().unwrap().ratio.clone()).max().unwrap();
    assert_eq!(a.max_ratio, Some(max));
}

#[test]
fn injected_failure_is_reported_and_batch_continues() {
    let mut items = parse_items(
        r#"[{"dim":2,"body":{"type":"ball","radius":"2"}},
            {"dim":2,"body":{"type":"box","halfwidths":[2,3]}}]"#,
    )
    .unwrap();
    items[0].gap = Some(Gap::new(vec![0, 0], vec![vec![1, 0], vec![0, 1]], vec![1, 1]).unwrap());
    let out = run_batch(&items, &Flags::default());
    assert_eq!(out[0].status(), Status::Failed);
    assert_eq!(out[0].witness(), Some(&[2i64, 0][..]));
    assert_eq!(out[1].status(), Status::Certified);
    assert_eq!(exit_code(&out, false), EXIT_CERT_FAILURE);
    assert_eq!(exit_code(&out, true), EXIT_CERT_FAILURE);
}
