//! Acceptance report: one PASS/FAIL line per criterion, with the numbers behind it.
//!
//! The report always exits successfully so that a failing criterion is visible
//! without aborting the rest of the test suite. Set `TWOCENTER_ACCEPTANCE_STRICT=1`
//! to turn any FAIL into a non-zero exit status.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use twocenter::model::{Parity, PhysicalSetup, StateLabel};
use twocenter::nonlinearization::{analyze, pt_stability, riccati_residual_eta, riccati_residual_xi, PtOptions};
use twocenter::oracle::{angular_eigenvalue, solve_bispectral_from, OracleOrbital};
use twocenter::quadrature::{norm_squared, rayleigh_energy, RuleSet, DEFAULT_NODES};
use twocenter::reproduce::{reproduce_tables, GoldenRow, Grid, Selection, Settings, StateBank, TableId};
use twocenter::summation::Precision;
use twocenter::transitions::{selection_allowed, transition, TransitionKind, TransitionState};
use twocenter::trialfn::{TrialOrbital, TrialParams};
use twocenter::variational::{node_orthogonality, optimize_from_seed, OptimizationResult, OptimizeConfig};

struct Line {
    number: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

fn st(name: &str) -> StateLabel {
    name.parse().expect("known state")
}

fn golden(table: TableId) -> Vec<GoldenRow> {
    table.golden().expect("bundled table parses")
}

/// The first row matching state, R and quantity.
fn reference(rows: &[GoldenRow], state: &str, r: f64, quantity: &str) -> Option<f64> {
    rows.iter()
        .find(|g| g.state == state && g.r == r && g.quantity == quantity)
        .map(|g| g.reference().expect("numeric reference"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Bank {
    states: StateBank,
}

impl Bank {
    fn get(&self, name: &str, r: f64) -> &OptimizationResult {
        match self.states.get(&st(name), r) {
            Some(Ok(s)) => s,
            Some(Err(e)) => panic!("{name} at R = {r}: {e}"),
            None => panic!("{name} at R = {r} was not requested"),
        }
    }

    fn strength(&self, kind: TransitionKind, final_state: &str, r: f64) -> twocenter::Result<f64> {
        let i = TransitionState::corrected(self.get("1sσg", r))?;
        let f = TransitionState::corrected(self.get(final_state, r))?;
        Ok(transition(kind, &i, &f, &PhysicalSetup::h2plus(r), DEFAULT_NODES)?.f)
    }
}

/// Strength between the direct-solver eigenfunctions, a reference free of trial-function error.
fn exact_strength(kind: TransitionKind, final_state: &str, r: f64, bank: &Bank) -> twocenter::Result<f64> {
    let setup = PhysicalSetup::h2plus(r);
    let state = |name: &str| -> twocenter::Result<TransitionState> {
        let guess = bank.get(name, r).params.p;
        let o = solve_bispectral_from(&st(name), &setup, Some(guess))?;
        Ok(TransitionState::from_orbital(st(name), o.e_total, o.p, Arc::new(OracleOrbital::new(&o)?)))
    };
    let (i, f) = (state("1sσg")?, state(final_state)?);
    Ok(transition(kind, &i, &f, &setup, DEFAULT_NODES)?.f)
}

fn energy_line(number: u32, title: &'static str, table: TableId, cases: &[(&str, f64, f64)], bank: &Bank) -> Line {
    let rows = golden(table);
    let mut pass = true;
    let mut worst = (0.0f64, String::new());
    let mut notes = vec![];
    for &(state, r, tol) in cases {
        let e = bank.get(state, r).energy.e_total;
        let Some(refv) = reference(&rows, state, r, "E") else {
            pass = false;
            notes.push(format!("{state} R={r}: no reference row"));
            continue;
        };
        let d = (e - refv).abs();
        if d > tol {
            pass = false;
            notes.push(format!("{state} R={r}: E={e:.12} ref={refv} |dE|={d:.2e} > {tol:.0e}"));
        }
        if d > worst.0 {
            worst = (d, format!("{state} R={r}"));
        }
    }
    Line {
        number,
        title,
        pass,
        detail: format!("{} points, max |dE| = {:.2e} Ry ({})", cases.len(), worst.0, worst.1),
        notes,
    }
}

fn criterion1(bank: &Bank) -> Line {
    let cfg = OptimizeConfig::default();
    let mut slowest = 0.0f64;
    for r in [1.0, 2.0, 6.0, 10.0, 50.0] {
        let t = Instant::now();
        optimize_from_seed(&st("1sσg"), &PhysicalSetup::h2plus(r), &cfg).expect("ground state optimizes");
        slowest = slowest.max(t.elapsed().as_secs_f64());
    }
    let cases: Vec<(&str, f64, f64)> =
        [1.0, 2.0, 6.0, 10.0, 50.0].iter().map(|&r| ("1sσg", r, if r == 50.0 { 5e-9 } else { 5e-10 })).collect();
    let mut line = energy_line(1, "ground-state energies", TableId::I, &cases, bank);
    line.detail.push_str(&format!("; slowest point {slowest:.2} s (limit 120 s)"));
    line.pass &= slowest <= 120.0;
    line
}

fn lambda_cases() -> Vec<(&'static str, f64, f64)> {
    let rows = golden(TableId::V);
    let mut cases = vec![];
    for state in ["2pπu", "3dπg", "3dδg", "4fδu"] {
        for r in [4.0, 6.0, 10.0] {
            // only rows printed with an explicit minus sign enter the comparison
            if reference(&rows, state, r, "E").is_some_and(|e| e < 0.0) {
                cases.push((state, r, 5e-9));
            }
        }
    }
    cases
}

fn criterion4(bank: &Bank) -> Line {
    let cases: Vec<(&str, f64, f64)> =
        ["2sσg", "3pσu"].iter().flat_map(|&s| [4.0, 10.0].map(|r| (s, r, 5e-9))).collect();
    let mut line = energy_line(4, "node states: energies, node positions, orthogonality", TableId::VI, &cases, bank);
    let rows = golden(TableId::VI);
    let mut worst_xi = 0.0f64;
    let mut worst_overlap = 0.0f64;
    for &(state, r, _) in &cases {
        let res = bank.get(state, r);
        let xi0 = res.params.xi0.expect("node state has a node");
        let refv = reference(&rows, state, r, "xi0").expect("node reference");
        let d = (xi0 - refv).abs();
        worst_xi = worst_xi.max(d);
        if d > 1e-5 {
            line.pass = false;
            line.notes.push(format!("{state} R={r}: xi0={xi0:.9} ref={refv} diff {d:.2e}"));
        }
        let ground = bank.get(st(state).sector_ground().designation().expect("named"), r);
        let rules = RuleSet::new(res.params.p.min(ground.params.p), DEFAULT_NODES).expect("rule");
        let ov = node_orthogonality(&res.label, &res.setup, &res.params, &ground.params, &rules).expect("overlap").abs();
        worst_overlap = worst_overlap.max(ov);
        if ov > 1e-10 {
            line.pass = false;
            line.notes.push(format!("{state} R={r}: overlap {ov:.2e}"));
        }
    }
    line.detail.push_str(&format!("; max |d xi0| = {worst_xi:.2e}; max overlap = {worst_overlap:.2e}"));
    line
}

fn criterion5(bank: &Bank) -> Line {
    let rows = golden(TableId::VII);
    let mut pass = true;
    let mut notes = vec![];
    let (mut worst_ref, mut worst_cons) = (0.0f64, 0.0f64);
    for state in ["1sσg", "2pσu"] {
        for r in [2.0, 6.0, 10.0] {
            let res = bank.get(state, r);
            let a = analyze(&res.params, &res.label, &res.setup, &PtOptions { tabulate: false, ..PtOptions::default() })
                .expect("perturbation theory");
            let a_ref = reference(&rows, state, r, "A_ref").expect("third line");
            let d_xi = rel(a.xi.a1, a_ref);
            let d_eta = rel(a.eta.a1, a_ref);
            let cons = a.consistency().relative;
            worst_ref = worst_ref.max(d_xi).max(d_eta);
            worst_cons = worst_cons.max(cons);
            if d_xi > 1e-7 || d_eta > 1e-7 || cons > 1e-7 {
                pass = false;
                notes.push(format!(
                    "{state} R={r}: A_xi={:.12} A_eta={:.12} ref={a_ref} (rel {d_xi:.2e}, {d_eta:.2e}; consistency {cons:.2e})",
                    a.xi.a1, a.eta.a1
                ));
            }
        }
    }
    Line {
        number: 5,
        title: "separation constants",
        pass,
        detail: format!("max rel vs reference {worst_ref:.2e}; max channel mismatch {worst_cons:.2e}"),
        notes,
    }
}

fn criterion6(bank: &Bank) -> Line {
    let res = bank.get("1sσg", 2.0);
    let a = analyze(&res.params, &res.label, &res.setup, &PtOptions::default()).expect("perturbation theory");
    let s = pt_stability(&a, DEFAULT_NODES, Precision::Standard).expect("stability");
    let pass = s.delta_e.abs() <= 1e-8 && s.delta_p_relative <= 1e-9;
    Line {
        number: 6,
        title: "stability under the first-order correction",
        pass,
        detail: format!("|dE| = {:.2e} Ry (limit 1e-8), |dp|/p = {:.2e} (limit 1e-9)", s.delta_e.abs(), s.delta_p_relative),
        notes: vec![],
    }
}

fn criterion7(bank: &Bank, points: &[(&'static str, f64)]) -> Line {
    let mut pass = true;
    let mut notes = vec![];
    let mut worst = 0.0f64;
    let mut worst_above = f64::NEG_INFINITY;
    for &(state, r) in points {
        let res = bank.get(state, r);
        let o = solve_bispectral_from(&res.label, &res.setup, Some(res.params.p)).expect("direct solver");
        let d = res.energy.e_total - o.e_total;
        worst = worst.max(d.abs());
        let lowest = res.label.n == 0;
        if lowest {
            worst_above = worst_above.max(-d);
        }
        if d.abs() > 1e-9 || (lowest && o.e_total > res.energy.e_total + 5e-11) {
            pass = false;
            notes.push(format!("{state} R={r}: variational {:.13} direct {:.13}", res.energy.e_total, o.e_total));
        }
    }
    Line {
        number: 7,
        title: "direct-solver cross-validation",
        pass,
        detail: format!(
            "{} points, max |E_var - E_direct| = {worst:.2e} Ry; max (E_direct - E_var) over sector-lowest = {worst_above:.2e}",
            points.len()
        ),
        notes,
    }
}

fn strength_line(
    number: u32,
    title: &'static str,
    table: TableId,
    kind: TransitionKind,
    cases: &[(&str, f64)],
    tol: f64,
    bank: &Bank,
) -> (Line, BTreeMap<(String, u64), f64>) {
    let rows = golden(table);
    let mut pass = true;
    let mut notes = vec![];
    let mut worst = (0.0f64, String::new());
    let mut values = BTreeMap::new();
    for &(state, r) in cases {
        let f = bank.strength(kind, state, r).expect("transition");
        values.insert((state.to_string(), r.to_bits()), f);
        let refv = reference(&rows, state, r, "f").expect("reference strength");
        let d = rel(f, refv);
        if d > worst.0 {
            worst = (d, format!("{state} R={r}"));
        }
        if d > tol {
            pass = false;
            let mut note = format!("{state} R={r}: f={f:.10e} table={refv:e} rel {d:.2e} > {tol:.0e}");
            match exact_strength(kind, state, r, bank) {
                Ok(x) => note.push_str(&format!(
                    "; direct-solver eigenfunctions give {x:.10e} (rel {:.2e} from table, {:.2e} from ours)",
                    rel(x, refv),
                    rel(f, x)
                )),
                Err(e) => note.push_str(&format!("; direct-solver reference unavailable: {e}")),
            }
            if let Some(lit) = reference(&rows, state, r, "f_ref") {
                note.push_str(&format!("; literature column {lit:e} (rel {:.2e} from ours)", rel(f, lit)));
            }
            notes.push(note);
        }
    }
    let line = Line {
        number,
        title,
        pass,
        detail: format!("{} strengths, max rel = {:.2e} ({}) vs limit {tol:.0e}", cases.len(), worst.0, worst.1),
        notes,
    };
    (line, values)
}

fn criterion8(bank: &Bank) -> Line {
    let cases: Vec<(&str, f64)> = [1.0, 2.0, 6.0, 20.0].iter().map(|&r| ("2pπu", r)).collect();
    let (mut line, _) = strength_line(8, "electric dipole strengths", TableId::VIII, TransitionKind::E1, &cases, 2e-6, bank);
    let f2 = bank.strength(TransitionKind::E1, "3pσu", 2.0).expect("transition");
    let f4 = bank.strength(TransitionKind::E1, "3pσu", 4.0).expect("transition");
    let ratio = f4 / f2;
    line.pass &= (ratio - 19.57).abs() <= 0.1;
    line.detail.push_str(&format!("; 3pσu f(R=4)/f(R=2) = {ratio:.4} (target 19.57 ± 0.1)"));
    line
}

fn round_sig(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn criterion9(bank: &Bank) -> Line {
    let cases: Vec<(&str, f64)> = [2.0, 4.0, 10.0].iter().map(|&r| ("3dπg", r)).collect();
    let (mut line, values) =
        strength_line(9, "magnetic dipole strengths", TableId::IX, TransitionKind::B1, &cases, 5e-6, bank);
    let rows = golden(TableId::IX);
    for r in [2.0, 4.0] {
        let f = values[&("3dπg".to_string(), f64::to_bits(r))];
        let lit = reference(&rows, "3dπg", r, "f_ref").expect("literature value");
        let ok = rel(round_sig(f, 3), lit) < 1e-12;
        line.pass &= ok;
        line.detail.push_str(&format!("; R={r} to 3 s.d. {:e} vs {lit:e}", round_sig(f, 3)));
    }
    line
}

fn criterion10(bank: &Bank) -> Line {
    let cases: Vec<(&str, f64)> =
        [1.0, 2.0, 10.0].iter().flat_map(|&r| ["3dπg", "3dδg", "2sσg"].map(|s| (s, r))).collect();
    strength_line(10, "electric quadrupole strengths", TableId::X, TransitionKind::E2, &cases, 5e-6, bank).0
}

fn criterion11(bank: &Bank) -> Line {
    let mut checks: Vec<(String, bool)> = vec![];
    let r = 2.0;
    let setup = PhysicalSetup::h2plus(r);
    let names = ["1sσg", "2pσu", "2pπu", "3dπg", "3dδg", "4fδu", "2sσg", "3pσu"];

    // forbidden transitions are exact zeros
    let mut zeros = 0;
    let mut exact = true;
    for kind in [TransitionKind::E1, TransitionKind::B1, TransitionKind::E2] {
        for a in names {
            for b in names {
                let (sa, sb) = (bank.get(a, r), bank.get(b, r));
                if sa.energy.e_total >= sb.energy.e_total || selection_allowed(kind, &sa.label, &sb.label) {
                    continue;
                }
                let t = transition(
                    kind,
                    &TransitionState::plain(sa).expect("state"),
                    &TransitionState::plain(sb).expect("state"),
                    &setup,
                    DEFAULT_NODES,
                )
                .expect("record");
                zeros += 1;
                exact &= t.f == 0.0 && t.s == 0.0 && t.forbidden;
            }
        }
    }
    checks.push((format!("{zeros} forbidden strengths exactly zero"), exact));

    // norms are positive
    let positive = names.iter().all(|n| {
        let s = bank.get(n, r);
        let orb = TrialOrbital::new(s.params.clone(), s.label, s.setup).expect("orbital");
        norm_squared(&orb, &setup, &RuleSet::new(s.params.p, DEFAULT_NODES).expect("rule")).is_ok_and(|v| v > 0.0)
    });
    checks.push(("norms positive".into(), positive));

    // energy plateau under node doubling
    let mut plateau = 0.0f64;
    for n in ["1sσg", "2pσu", "2pπu", "3dδg"] {
        let s = bank.get(n, r);
        let orb = TrialOrbital::new(s.params.clone(), s.label, s.setup).expect("orbital");
        let rules = RuleSet::new(s.params.p, DEFAULT_NODES).expect("rule");
        let e1 = rayleigh_energy(&orb, &setup, &rules).expect("energy");
        let e2 = rayleigh_energy(&orb, &setup, &rules.refined().expect("refined")).expect("energy");
        plateau = plateau.max((e1 - e2).abs() / e2.abs());
    }
    checks.push((format!("quadrature plateau {plateau:.1e}"), plateau <= 1e-12));

    // Riccati residuals of exactly solvable fixtures
    let mut residual = 0.0f64;
    for lambda in 0..3u32 {
        // X = e^{−pξ} when R = (Λ+1)p and α = pγ
        let p = 1.3;
        let rr = (lambda as f64 + 1.0) * p;
        let label = StateLabel::new(0, 0, lambda, Parity::Plus);
        let params = TrialParams::reduced(p * 0.7, 0.7, 0.0, p);
        let fx = PhysicalSetup::h2plus(rr);
        for xi in [1.05, 1.5, 3.0, 8.0] {
            let v = riccati_residual_xi(&params, &label, &fx, p * p, xi)
                .expect("residual");
            residual = residual.max(v.abs());
        }
        // Y = (1−η²)^{Λ/2} [1 | η] are the p → 0 angular eigenfunctions
        for (parity, a1, l) in [(Parity::Plus, 0.0, lambda), (Parity::Minus, 1e-7, lambda + 1)] {
            let label = StateLabel::new(0, 0, lambda, parity);
            let params = TrialParams::reduced(0.1, 0.5, a1, 1e-7);
            let a = -(((l - lambda) * (l + lambda + 1)) as f64);
            for eta in [-0.9, -0.3, 0.2, 0.7] {
                let v = riccati_residual_eta(&params, &label, &setup, a, eta).expect("residual");
                residual = residual.max(v.abs());
            }
        }
    }
    checks.push((format!("Riccati residual on solvable fixtures {residual:.1e}"), residual <= 1e-10));

    // united-atom separation constants
    let mut ua = 0.0f64;
    for lambda in 0..4u32 {
        for m in 0..3u32 {
            for parity in [Parity::Plus, Parity::Minus] {
                let l = lambda + 2 * m + u32::from(parity == Parity::Minus);
                let exact = -(((l - lambda) * (l + lambda + 1)) as f64);
                let a = angular_eigenvalue(0.0, lambda, m, parity).expect("angular eigenvalue");
                ua = ua.max((a - exact).abs());
            }
        }
    }
    checks.push((format!("A(p=0) deviation {ua:.1e}"), ua <= 1e-12));

    // determinism
    let sel = Selection { grid: Grid::Acceptance, r_values: Some(vec![2.0]), states: None };
    let run = || {
        reproduce_tables(&[TableId::I, TableId::X], &sel, &Settings::default())
            .expect("tables")
            .iter()
            .map(|t| t.to_csv().expect("csv"))
            .collect::<Vec<_>>()
    };
    checks.push(("byte-identical reruns".into(), run() == run()));

    let pass = checks.iter().all(|c| c.1);
    let failed: Vec<String> = checks.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
    Line {
        number: 11,
        title: "property suite",
        pass,
        detail: checks.iter().map(|c| c.0.clone()).collect::<Vec<_>>().join("; "),
        notes: failed.into_iter().map(|f| format!("failed: {f}")).collect(),
    }
}

fn main() {
    let start = Instant::now();
    let mut points: Vec<(&'static str, f64)> = vec![];
    points.extend([1.0, 2.0, 6.0, 10.0, 50.0].map(|r| ("1sσg", r)));
    points.extend([1.0, 4.0, 10.0, 20.0].map(|r| ("2pσu", r)));
    for s in ["2pπu", "3dπg", "3dδg", "4fδu"] {
        points.extend([4.0, 6.0, 10.0].map(|r| (s, r)));
    }
    points.extend([4.0, 10.0].map(|r| ("2sσg", r)));
    points.extend([4.0, 10.0].map(|r| ("3pσu", r)));
    let energy_points = points.clone();

    let mut extra: Vec<(&'static str, f64)> = vec![];
    extra.extend([1.0, 2.0, 6.0, 20.0].map(|r| ("2pπu", r)));
    extra.extend([2.0, 6.0, 10.0].map(|r| ("2pσu", r)));
    extra.extend([2.0, 4.0].map(|r| ("3pσu", r)));
    extra.extend([2.0, 4.0, 10.0].map(|r| ("3dπg", r)));
    for r in [1.0, 2.0, 10.0] {
        extra.extend(["3dπg", "3dδg", "2sσg"].map(|s| (s, r)));
    }
    for r in [1.0, 2.0, 4.0, 6.0, 10.0, 20.0] {
        extra.push(("1sσg", r));
    }
    extra.extend(["2pσu", "2pπu", "3dπg", "3dδg", "4fδu", "2sσg", "3pσu"].map(|s| (s, 2.0)));
    points.extend(extra);

    let bank = Bank {
        states: StateBank::build(points.iter().map(|&(s, r)| (st(s), r)), &OptimizeConfig::default()),
    };

    let lines = vec![
        criterion1(&bank),
        energy_line(2, "2pσu energies", TableId::II, &[1.0, 4.0, 10.0, 20.0].map(|r| ("2pσu", r, 5e-10)), &bank),
        energy_line(3, "Λ = 1, 2 energies", TableId::V, &lambda_cases(), &bank),
        criterion4(&bank),
        criterion5(&bank),
        criterion6(&bank),
        criterion7(&bank, &energy_points),
        criterion8(&bank),
        criterion9(&bank),
        criterion10(&bank),
        criterion11(&bank),
    ];

    for l in &lines {
        println!("criterion {:>2} {}: {}: {}", l.number, if l.pass { "PASS" } else { "FAIL" }, l.title, l.detail);
        for n in &l.notes {
            println!("    {n}");
        }
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("acceptance: {} passed, {failed} failed ({:.1} s)", lines.len() - failed, start.elapsed().as_secs_f64());
    let strict = std::env::var("TWOCENTER_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
