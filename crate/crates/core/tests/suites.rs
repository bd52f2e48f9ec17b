use relift::verify::{constant_map_images, lj_coincidences, run_suites, Bounds, Suite};

fn failures(suite: Suite, bounds: &Bounds) -> Vec<String> {
    run_suites(&[suite], bounds)
        .unwrap()
        .into_iter()
        .filter(|c| c.is_failure())
        .map(|c| c.name)
        .collect()
}

#[test]
fn suite_names_parse() {
    assert_eq!(Suite::parse_list("all").unwrap().len(), Suite::ALL.len());
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert_eq!(Suite::parse_list("cospan, bisim").unwrap(), [Suite::Cospan, Suite::Bisim]);
    assert!(Suite::parse_list("cospan,lattices").is_err());
    assert!("lattices".parse::<Suite>().is_err());
}

#[test]
fn passing_suites_have_no_failures() {
    let b = Bounds::default();
    for s in [Suite::BarrMinimal, Suite::MtildeMinimal, Suite::DistlawBijection, Suite::Transport, Suite::Bisim] {
        assert_eq!(failures(s, &b), Vec::<String>::new(), "{s}");
    }
}

#[test]
fn lattice_and_cospan_pass() {
    assert!(failures(Suite::Lattice, &Bounds::default()).is_empty());
    assert!(failures(Suite::Cospan, &Bounds::uniform(1, 3)).is_empty());
}

#[test]
fn lj_classification_fails_exactly_where_the_conjunction_reading_collapses() {
    let fails = failures(Suite::LjClassification, &Bounds::default());
    assert_eq!(fails.len(), 3, "{fails:?}");
    assert!(fails[0].contains("pairwise distinct"));
    assert!(fails[1].contains("⟹ J ⊇ J'"));
    assert!(fails[2].contains("common ρ"));
}

#[test]
fn lj_coincidence_classes() {
    let groups = lj_coincidences().unwrap();
    assert_eq!(groups.len(), 10);
    assert!(groups.contains(&vec![6, 7, 9, 11, 13, 14, 15]));
    assert!(groups.iter().filter(|g| g.len() == 1).count() == 9);
}

#[test]
fn constant_map_case_analysis() {
    let images: Vec<String> = constant_map_images().unwrap().into_iter().map(|(k, v)| format!("{k:?} {v}")).collect();
    assert_eq!(
        images,
        [
            "(false, false) {}",
            "(false, true) {{a10},{a10,a11}}",
            "(true, false) {{},{a11}}",
            "(true, true) {{},{a10},{a10,a11},{a11}}",
        ]
    );
}
