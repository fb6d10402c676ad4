//! The subcommands. Each one evaluates its grid points in parallel, collects
//! the records in grid order and renders them in one go.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use twocenter::model::CORRESPONDENCE;
use twocenter::nonlinearization::{analyze, pt_stability, PtOptions, StabilityReport};
use twocenter::oracle::solve_bispectral;
use twocenter::reproduce::{self, Grid, Selection, Settings, StateBank, TableId, TableReport};
use twocenter::transitions::{transition, TransitionKind, TransitionState};
use twocenter::united_atom::{limit_convergence_probe_at, limit_form, Hydrogenic, UNITED_CHARGE, PROBE_DISTANCES};
use twocenter::variational::store::{self, StoredParams};
use twocenter::variational::{optimize_from_seed, scan_r, OptimizationResult, OptimizeConfig};
use twocenter::{Error, PhysicalSetup, Result, StateLabel};

use crate::config::{override_flag, Common, ConfigFile, Format};
use crate::output::{emit, render, to_values};

/// How a command finished when it did not fail outright.
#[derive(Debug)]
pub enum Outcome {
    Complete,
    /// Output was written but some optimization ran out of budget.
    Unconverged(String),
    /// Output for the successful points was written; this is the first failure.
    Failed(Error),
}

fn load_config(common: &mut Common) -> Result<ConfigFile> {
    let cfg = match &common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    cfg.apply(common);
    Ok(cfg)
}

fn optimize_config(common: &Common) -> OptimizeConfig {
    OptimizeConfig { rules_n: common.quad_n(), precision: common.precision(), ..OptimizeConfig::default() }
}

fn pt_options(common: &Common, tabulate: bool) -> PtOptions {
    PtOptions { rules_n: common.quad_n(), precision: common.precision(), p_channel: None, tabulate }
}

fn designation(label: &StateLabel) -> String {
    label.designation().map(str::to_string).unwrap_or_else(|| label.to_string())
}

fn check_nodes(common: &Common) -> Result<()> {
    let n = common.quad_n();
    twocenter::quadrature::RuleSet::new(1.0, n).map(|_| ())
}

/// Writes the records that succeeded and turns the rest into an outcome.
fn finish<T: Serialize>(points: Vec<Result<T>>, common: &Common, unconverged: Vec<String>) -> Result<Outcome> {
    let mut records = vec![];
    let mut first_error = None;
    for p in points {
        match p {
            Ok(r) => records.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    if !records.is_empty() {
        emit(&render(&to_values(&records)?, common.format())?, common.out.as_deref())?;
    }
    Ok(match (first_error, unconverged.is_empty()) {
        (Some(e), _) => Outcome::Failed(e),
        (None, false) => Outcome::Unconverged(unconverged.join("; ")),
        (None, true) => Outcome::Complete,
    })
}

fn unconverged_of(results: &[Result<OptimizationResult>]) -> Vec<String> {
    results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| !r.converged)
        .map(|r| format!("{} at R = {} stopped after {} evaluations", designation(&r.label), r.setup.r, r.iterations))
        .collect()
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Start each grid point from the previous optimum (sequential scan).
    #[arg(long)]
    pub warm_start: bool,
    /// Also write one parameter file per point into the store directory (TWOCENTER_DATA_DIR).
    #[arg(long)]
    pub save: bool,
}

pub fn optimize(mut a: OptimizeArgs) -> Result<Outcome> {
    let cfg_file = load_config(&mut a.common)?;
    override_flag(&mut a.warm_start, &cfg_file.warm_start);
    override_flag(&mut a.save, &cfg_file.save);
    let c = &a.common;
    check_nodes(c)?;
    let label = c.state()?;
    let grid = c.required_distances()?;
    let cfg = optimize_config(c);
    let results = scan_r(&label, &grid, a.warm_start, &cfg);
    let unconverged = unconverged_of(&results);
    let pt = pt_options(c, false);
    let docs: Vec<Result<StoredParams>> = results
        .into_par_iter()
        .map(|r| {
            let res = r?;
            let sep = analyze(&res.params, &res.label, &res.setup, &pt).ok().map(|x| x.xi.a1);
            Ok(StoredParams::from_result(&res, sep, cfg.rules_n))
        })
        .collect();
    if a.save {
        let dir = store::data_dir();
        for doc in docs.iter().flatten() {
            let path = store::save(&dir, doc)?;
            eprintln!("saved {}", path.display());
        }
    }
    finish(docs, c, unconverged)
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also optimize the trial function and report the energy difference.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Serialize)]
struct OracleRecord {
    label: String,
    designation: String,
    #[serde(rename = "R")]
    r: f64,
    energy: f64,
    #[serde(rename = "A")]
    a: f64,
    p: f64,
    angular_basis_size: usize,
    radial_mismatch: f64,
    radial_nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    variational_energy: Option<f64>,
    /// Variational minus oracle energy.
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_gap: Option<f64>,
}

pub fn oracle(mut a: OracleArgs) -> Result<Outcome> {
    let cfg_file = load_config(&mut a.common)?;
    override_flag(&mut a.compare, &cfg_file.compare);
    let c = &a.common;
    let label = c.state()?;
    let grid = c.required_distances()?;
    let cfg = optimize_config(c);
    if a.compare {
        check_nodes(c)?;
    }
    let points: Vec<Result<(OracleRecord, Option<OptimizationResult>)>> = grid
        .par_iter()
        .map(|&r| {
            let setup = PhysicalSetup::h2plus(r);
            let o = solve_bispectral(&label, &setup)?;
            let var = if a.compare { Some(optimize_from_seed(&label, &setup, &cfg)?) } else { None };
            let ve = var.as_ref().map(|v| v.energy.e_total);
            let rec = OracleRecord {
                label: label.to_string(),
                designation: designation(&label),
                r,
                energy: o.e_total,
                a: o.a,
                p: o.p,
                angular_basis_size: o.angular_basis_size,
                radial_mismatch: o.radial_mismatch,
                radial_nodes: o.radial_nodes,
                variational_energy: ve,
                energy_gap: ve.map(|v| v - o.e_total),
            };
            Ok((rec, var))
        })
        .collect();
    let opt: Vec<Result<OptimizationResult>> =
        points.iter().filter_map(|p| p.as_ref().ok().and_then(|(_, v)| v.clone())).map(Ok).collect();
    let unconverged = unconverged_of(&opt);
    finish(points.into_iter().map(|p| p.map(|(r, _)| r)).collect(), c, unconverged)
}

#[derive(Debug, Args)]
pub struct PtArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also measure how much the first-order correction moves the energy and the optimal p.
    #[arg(long)]
    pub stability: bool,
    /// Directory for the tabulated first-order corrections, one CSV per channel and point.
    #[arg(long, value_name = "DIR")]
    pub tables: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct PtRecord {
    label: String,
    designation: String,
    #[serde(rename = "R")]
    r: f64,
    energy: f64,
    p_trial: f64,
    p_channel: f64,
    #[serde(rename = "A_xi")]
    a_xi: f64,
    #[serde(rename = "A_eta")]
    a_eta: f64,
    #[serde(rename = "A_xi_weak")]
    a_xi_weak: f64,
    #[serde(rename = "A_eta_weak")]
    a_eta_weak: f64,
    consistency_abs: f64,
    consistency_rel: f64,
    plateau_xi: f64,
    plateau_eta: f64,
    bound_xi: f64,
    bound_eta: f64,
    node_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability: Option<StabilityReport>,
}

pub fn pt(mut a: PtArgs) -> Result<Outcome> {
    let cfg_file = load_config(&mut a.common)?;
    override_flag(&mut a.stability, &cfg_file.stability);
    let c = &a.common;
    check_nodes(c)?;
    let label = c.state()?;
    let grid = c.required_distances()?;
    let cfg = optimize_config(c);
    let opts = pt_options(c, a.tables.is_some() || a.stability);
    let results = scan_r(&label, &grid, false, &cfg);
    let unconverged = unconverged_of(&results);
    let points: Vec<Result<PtRecord>> = results
        .into_par_iter()
        .map(|r| {
            let res = r?;
            let an = analyze(&res.params, &res.label, &res.setup, &opts)?;
            if let Some(dir) = &a.tables {
                write_correction_tables(dir, &res, &an)?;
            }
            let stability = if a.stability { Some(pt_stability(&an, cfg.rules_n, cfg.precision)?) } else { None };
            let k = an.consistency();
            Ok(PtRecord {
                label: label.to_string(),
                designation: designation(&label),
                r: res.setup.r,
                energy: an.energy,
                p_trial: res.params.p,
                p_channel: an.p_channel,
                a_xi: an.xi.a1,
                a_eta: an.eta.a1,
                a_xi_weak: an.xi.a1_weak,
                a_eta_weak: an.eta.a1_weak,
                consistency_abs: k.absolute,
                consistency_rel: k.relative,
                plateau_xi: an.xi.a1_plateau,
                plateau_eta: an.eta.a1_plateau,
                bound_xi: an.xi.bound_c,
                bound_eta: an.eta.bound_c,
                node_shift: an.xi.node_shift,
                stability,
            })
        })
        .collect();
    finish(points, c, unconverged)
}

fn write_correction_tables(dir: &Path, res: &OptimizationResult, an: &twocenter::nonlinearization::PtAnalysis) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let stem = format!("{}_R{}", res.label.key(), res.setup.r);
    for (name, var, channel) in [("phi1", "xi", &an.xi), ("rho1", "eta", &an.eta)] {
        if let Some(t) = &channel.correction {
            let path = dir.join(format!("{name}_{stem}.csv"));
            std::fs::write(&path, t.to_csv(var, name)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "E1")]
    E1,
    #[value(name = "B1")]
    B1,
    #[value(name = "E2")]
    E2,
}

impl From<KindArg> for TransitionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::E1 => TransitionKind::E1,
            KindArg::B1 => TransitionKind::B1,
            KindArg::E2 => TransitionKind::E2,
        }
    }
}

fn parse_kind(s: &str) -> Result<KindArg> {
    KindArg::from_str(s, true).map_err(|_| Error::ParameterDomain(format!("unknown transition kind '{s}', expected E1, B1 or E2")))
}

#[derive(Debug, Args)]
pub struct TransitionsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: Option<KindArg>,
    /// Final state.
    #[arg(long = "final", value_name = "STATE")]
    pub final_state: Option<String>,
    /// Initial state (defaults to --state, then to the ground state).
    #[arg(long)]
    pub initial: Option<String>,
    /// Use the optimized trial functions without their first-order corrections.
    #[arg(long)]
    pub plain: bool,
}

#[derive(Debug, Serialize)]
struct TransitionRow {
    kind: String,
    initial: String,
    #[serde(rename = "final")]
    final_state: String,
    #[serde(rename = "R")]
    r: f64,
    energy_initial: f64,
    energy_final: f64,
    delta_e: f64,
    #[serde(rename = "S")]
    s: f64,
    g: u32,
    f: f64,
    forbidden: bool,
    corrected: bool,
}

pub fn transitions(mut a: TransitionsArgs) -> Result<Outcome> {
    let cfg_file = load_config(&mut a.common)?;
    if let Some(k) = &cfg_file.kind {
        a.kind = Some(parse_kind(k)?);
    }
    if cfg_file.final_state.is_some() {
        a.final_state = cfg_file.final_state.clone();
    }
    if cfg_file.initial.is_some() {
        a.initial = cfg_file.initial.clone();
    }
    override_flag(&mut a.plain, &cfg_file.plain);
    let c = &a.common;
    check_nodes(c)?;
    let kind: TransitionKind = a.kind.ok_or_else(|| Error::ParameterDomain("--kind is required".into()))?.into();
    let final_state: StateLabel =
        a.final_state.as_deref().ok_or_else(|| Error::ParameterDomain("--final is required".into()))?.parse()?;
    let initial: StateLabel = match a.initial.as_deref().or(c.state.as_deref()) {
        Some(s) => s.parse()?,
        None => reproduce::transition_initial(),
    };
    let grid = c.required_distances()?;
    let cfg = optimize_config(c);
    let pt = pt_options(c, true);
    let bank = StateBank::build(grid.iter().flat_map(|&r| [(initial, r), (final_state, r)]), &cfg);
    let mut unconverged = vec![];
    for &r in &grid {
        for l in [initial, final_state] {
            if let Some(Ok(s)) = bank.get(&l, r) {
                if !s.converged {
                    unconverged.push(format!("{} at R = {r} stopped after {} evaluations", designation(&l), s.iterations));
                }
            }
        }
    }
    let n = c.quad_n();
    let plain = a.plain;
    let points: Vec<Result<TransitionRow>> = grid
        .par_iter()
        .map(|&r| {
            let get = |l: &StateLabel| -> Result<TransitionState> {
                let res = bank.get(l, r).cloned().unwrap_or_else(|| Err(Error::Unsupported("state missing".into())))?;
                if plain {
                    TransitionState::plain(&res)
                } else {
                    TransitionState::corrected_with(&res, &pt)
                }
            };
            let (si, sf) = (get(&initial)?, get(&final_state)?);
            let t = transition(kind, &si, &sf, &PhysicalSetup::h2plus(r), n)?;
            Ok(TransitionRow {
                kind: kind.to_string(),
                initial: designation(&initial),
                final_state: designation(&final_state),
                r,
                energy_initial: si.energy,
                energy_final: sf.energy,
                delta_e: t.delta_e,
                s: t.s,
                g: t.g,
                f: t.f,
                forbidden: t.forbidden,
                corrected: si.corrected && sf.corrected,
            })
        })
        .collect();
    finish(points, c, unconverged)
}

#[derive(Debug, Args)]
pub struct UnitedAtomArgs {
    #[command(flatten)]
    pub common: Common,
    /// Follow the state towards R = 0 with the direct solver (distances from --R-grid or a default halving sequence).
    #[arg(long)]
    pub probe: bool,
}

#[derive(Debug, Serialize)]
struct LimitRecord {
    label: String,
    designation: String,
    n_hat: u32,
    l: u32,
    m: u32,
    energy_limit: f64,
    #[serde(rename = "A_limit")]
    a_limit: f64,
    node_constant: Option<f64>,
    node_constant_hydrogenic: Option<f64>,
    radial_nodes: usize,
    angular_nodes: usize,
    hydrogenic_radial_nodes: usize,
    hydrogenic_angular_nodes: usize,
    nodes_match: bool,
}

#[derive(Debug, Serialize)]
struct ProbeRow {
    label: String,
    designation: String,
    #[serde(rename = "R")]
    r: f64,
    p: f64,
    r_over_p: f64,
    n_hat: f64,
    e_prime: f64,
    e_prime_limit: f64,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "A_limit")]
    a_limit: f64,
}

fn limit_record(label: &StateLabel) -> Result<LimitRecord> {
    let form = limit_form(label)?;
    let (n, l, m) = form.hydrogenic;
    let h = Hydrogenic::new(n, l, m, UNITED_CHARGE)?;
    let (rn, an) = form.node_counts();
    let (hr, ha) = h.node_counts();
    let lam = label.lambda as f64;
    Ok(LimitRecord {
        label: label.to_string(),
        designation: designation(label),
        n_hat: n,
        l,
        m,
        energy_limit: h.energy(),
        a_limit: -(l as f64 - lam) * (l as f64 + lam + 1.0) + 0.0,
        node_constant: form.c,
        node_constant_hydrogenic: form.c_hydrogenic,
        radial_nodes: rn,
        angular_nodes: an,
        hydrogenic_radial_nodes: hr,
        hydrogenic_angular_nodes: ha,
        nodes_match: (rn, an) == (hr, ha),
    })
}

pub fn united_atom(mut a: UnitedAtomArgs) -> Result<Outcome> {
    let cfg_file = load_config(&mut a.common)?;
    override_flag(&mut a.probe, &cfg_file.probe);
    let c = &a.common;
    let labels: Vec<StateLabel> = match &c.state {
        Some(_) => vec![c.state()?],
        None => CORRESPONDENCE.iter().map(|k| k.label).collect(),
    };
    if !a.probe {
        let records: Vec<Result<LimitRecord>> = labels.iter().map(limit_record).collect();
        return finish(records, c, vec![]);
    }
    let mut distances = c.distances()?.unwrap_or_else(|| PROBE_DISTANCES.to_vec());
    distances.sort_by(|x, y| y.total_cmp(x));
    let reports: Vec<Result<Vec<ProbeRow>>> = labels
        .par_iter()
        .map(|l| {
            let rep = limit_convergence_probe_at(l, &distances)?;
            Ok(rep
                .points
                .iter()
                .map(|q| ProbeRow {
                    label: l.to_string(),
                    designation: designation(l),
                    r: q.r,
                    p: q.p,
                    r_over_p: q.r_over_p,
                    n_hat: rep.n_hat,
                    e_prime: q.e_prime,
                    e_prime_limit: rep.e_prime_limit,
                    a: q.a,
                    a_limit: rep.a_limit,
                })
                .collect())
        })
        .collect();
    let mut rows = vec![];
    for r in reports {
        match r {
            Ok(v) => rows.extend(v.into_iter().map(Ok)),
            Err(e) => rows.push(Err(e)),
        }
    }
    finish(rows, c, vec![])
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Tables to regenerate (comma separated or repeated); all of them by default.
    #[arg(long, value_delimiter = ',')]
    pub which: Vec<String>,
    /// `paper` for every tabulated distance, `acceptance` for the quick subset.
    #[arg(long, default_value = "paper")]
    pub grid: String,
}

#[derive(Debug, Serialize)]
struct DiffLine<'a> {
    table: TableId,
    quantity: &'a str,
    rows: usize,
    failed: usize,
    within_resolution: usize,
    max_abs_diff: f64,
    max_rel_diff: f64,
    worst_state: Option<&'a str>,
    #[serde(rename = "worst_R")]
    worst_r: Option<f64>,
}

fn diff_lines(reports: &[TableReport]) -> Vec<DiffLine<'_>> {
    reports
        .iter()
        .flat_map(|rep| {
            rep.summary.iter().map(move |s| DiffLine {
                table: rep.table,
                quantity: &s.quantity,
                rows: s.rows,
                failed: s.failed,
                within_resolution: s.within_resolution,
                max_abs_diff: s.max_abs_diff,
                max_rel_diff: s.max_rel_diff,
                worst_state: s.worst_state.as_deref(),
                worst_r: s.worst_r,
            })
        })
        .collect()
}

pub fn reproduce_tables(mut a: ReproduceArgs) -> Result<Outcome> {
    let cfg_file = load_config(&mut a.common)?;
    override_flag(&mut a.which, &cfg_file.which);
    override_flag(&mut a.grid, &cfg_file.grid);
    let c = &a.common;
    check_nodes(c)?;
    let ids: Vec<TableId> = if a.which.is_empty() || a.which.iter().any(|w| w.eq_ignore_ascii_case("all")) {
        TableId::ALL.to_vec()
    } else {
        a.which.iter().map(|w| w.parse()).collect::<Result<_>>()?
    };
    let grid: Grid = a.grid.parse()?;
    let selection = Selection {
        grid,
        r_values: c.distances()?,
        states: match &c.state {
            Some(_) => Some(vec![c.state()?]),
            None => None,
        },
    };
    let settings = Settings::with(c.quad_n(), c.precision());
    let reports = reproduce::reproduce_tables(&ids, &selection, &settings)?;

    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("tables"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for rep in &reports {
        let (text, ext) = match c.format() {
            Format::Csv => (rep.to_csv()?, "csv"),
            Format::Json => (serde_json::to_string_pretty(&rep.rows)? + "\n", "json"),
        };
        emit(&text, Some(&dir.join(format!("table_{}.{ext}", rep.table))))?;
    }
    let lines = diff_lines(&reports);
    let values = to_values(&lines)?;
    emit(&render(&values, Format::Csv)?, Some(&dir.join("diff_report.csv")))?;
    emit(&(serde_json::to_string_pretty(&values)? + "\n"), Some(&dir.join("diff_report.json")))?;

    let mut summary = String::new();
    for l in &lines {
        summary.push_str(&format!(
            "table {:<4} {:<6} rows {:>3}  failed {:>2}  within last digit {:>3}  max |Δ| {:.3e}  max rel {:.3e}\n",
            l.table.name(),
            l.quantity,
            l.rows,
            l.failed,
            l.within_resolution,
            l.max_abs_diff,
            l.max_rel_diff
        ));
    }
    emit(&summary, None)?;

    let failed: usize = reports.iter().map(TableReport::failures).sum();
    Ok(if failed > 0 {
        Outcome::Unconverged(format!("{failed} table rows could not be computed; see the error column"))
    } else {
        Outcome::Complete
    })
}
