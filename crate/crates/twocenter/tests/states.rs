use twocenter::oracle::solve_bispectral_from;
use twocenter::reproduce::StateBank;
use twocenter::united_atom::{limit_convergence_probe_at, limit_form, nodal_structure_matches};
use twocenter::variational::store::{self, StoredParams};
use twocenter::variational::OptimizeConfig;
use twocenter::{Parity, StateLabel};

fn nodeless() -> Vec<StateLabel> {
    (0..3).flat_map(|l| [StateLabel::new(0, 0, l, Parity::Plus), StateLabel::new(0, 0, l, Parity::Minus)]).collect()
}

#[test]
fn variational_energies_bound_the_exact_ones_from_above() {
    let distances = [1.0, 4.0, 10.0];
    let mut points: Vec<_> = nodeless().into_iter().flat_map(|l| distances.map(|r| (l, r))).collect();
    points.extend(distances.map(|r| (StateLabel::new(1, 0, 0, Parity::Plus), r)));
    let bank = StateBank::build(points.iter().copied(), &OptimizeConfig::default());
    for (label, r) in points {
        let var = bank.get(&label, r).unwrap().as_ref().unwrap();
        let exact = solve_bispectral_from(&label, &var.setup, Some(var.params.p)).unwrap();
        let gap = var.energy.e_total - exact.e_total;
        let tol = 5e-10;
        assert!(gap > -1e-11, "{label} R={r}: variational below exact by {gap}");
        assert!(gap < tol * exact.e_total.abs().max(1.0), "{label} R={r}: gap {gap}");
    }
}

#[test]
fn stored_parameters_round_trip() {
    let bank = StateBank::build([(StateLabel::new(0, 0, 1, Parity::Minus), 3.0)], &OptimizeConfig::default());
    let res = bank.get(&StateLabel::new(0, 0, 1, Parity::Minus), 3.0).unwrap().as_ref().unwrap();
    let doc = StoredParams::from_result(res, Some(1.25), 64);
    let dir = std::env::temp_dir().join(format!("twocenter-store-{}", std::process::id()));
    let path = store::save(&dir, &doc).unwrap();
    let back = store::load(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.designation.as_deref(), Some("3dπg"));
    assert_eq!(back.params.as_vector(), res.params.as_vector());
}

#[test]
fn small_distance_limit_is_hydrogenic() {
    for c in twocenter::model::CORRESPONDENCE.iter() {
        assert!(nodal_structure_matches(&c.label).unwrap(), "{}", c.designation);
        let form = limit_form(&c.label).unwrap();
        let (n, l, m) = c.hydrogenic;
        assert_eq!(form.node_counts(), ((n - l - 1) as usize, (l - m) as usize), "{}", c.designation);
    }
    let report = limit_convergence_probe_at(&StateLabel::new(0, 0, 0, Parity::Plus), &[0.2, 0.1, 0.05]).unwrap();
    let (dr, de, da) = report.final_deviation().unwrap();
    assert!(dr.abs() < 0.05 && de.abs() < 0.05 && da.abs() < 0.05, "{dr} {de} {da}");
    // deviations shrink at least linearly in R
    assert!(report.e_prime_orders.iter().all(|&o| o > 0.8), "{:?}", report.e_prime_orders);
}
