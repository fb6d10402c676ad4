//! Regeneration of the bundled reference tables.
//!
//! Every table ships as a CSV with one reference number per row. To reproduce
//! a table, each row is evaluated with the variational, perturbative or
//! transition machinery, and the two numbers are set side by side. States
//! needed by several rows or tables are optimized once and shared.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PhysicalSetup, StateLabel};
use crate::nonlinearization::{analyze, PtAnalysis, PtOptions};
use crate::quadrature::DEFAULT_NODES;
use crate::transitions::{transition, TransitionKind, TransitionState};
use crate::variational::{optimize_from_seed, OptimizationResult, OptimizeConfig};

/// Identifier of a bundled table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    I,
    II,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
}

impl TableId {
    pub const ALL: [TableId; 8] =
        [TableId::I, TableId::II, TableId::V, TableId::VI, TableId::VII, TableId::VIII, TableId::IX, TableId::X];

    pub fn name(self) -> &'static str {
        match self {
            TableId::I => "I",
            TableId::II => "II",
            TableId::V => "V",
            TableId::VI => "VI",
            TableId::VII => "VII",
            TableId::VIII => "VIII",
            TableId::IX => "IX",
            TableId::X => "X",
        }
    }

    /// Raw text of the bundled CSV.
    pub fn csv(self) -> &'static str {
        match self {
            TableId::I => include_str!("../data/golden/table_I.csv"),
            TableId::II => include_str!("../data/golden/table_II.csv"),
            TableId::V => include_str!("../data/golden/table_V.csv"),
            TableId::VI => include_str!("../data/golden/table_VI.csv"),
            TableId::VII => include_str!("../data/golden/table_VII.csv"),
            TableId::VIII => include_str!("../data/golden/table_VIII.csv"),
            TableId::IX => include_str!("../data/golden/table_IX.csv"),
            TableId::X => include_str!("../data/golden/table_X.csv"),
        }
    }

    pub fn golden(self) -> Result<Vec<GoldenRow>> {
        parse_golden(self.csv())
    }

    /// Separations exercised by the acceptance checks; a quick subset of the full grid.
    pub fn acceptance_grid(self) -> &'static [f64] {
        match self {
            TableId::I => &[1.0, 2.0, 6.0, 10.0, 50.0],
            TableId::II => &[1.0, 4.0, 10.0, 20.0],
            TableId::V => &[4.0, 6.0, 10.0],
            TableId::VI => &[4.0, 10.0],
            TableId::VII => &[2.0, 6.0, 10.0],
            TableId::VIII => &[1.0, 2.0, 4.0, 6.0, 20.0],
            TableId::IX => &[2.0, 4.0, 10.0],
            TableId::X => &[1.0, 2.0, 10.0],
        }
    }

    fn transition_kind(self) -> Option<TransitionKind> {
        match self {
            TableId::VIII => Some(TransitionKind::E1),
            TableId::IX => Some(TransitionKind::B1),
            TableId::X => Some(TransitionKind::E2),
            _ => None,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        TableId::ALL
            .into_iter()
            .find(|id| id.name() == t)
            .ok_or_else(|| Error::ParameterDomain(format!("unknown table '{s}', expected one of I, II, V, VI, VII, VIII, IX, X")))
    }
}

/// One row of a bundled table. The value keeps its printed form so that the
/// number of quoted digits is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub table: String,
    pub state: String,
    #[serde(rename = "R")]
    pub r: f64,
    pub quantity: String,
    pub value: String,
    pub provenance: String,
}

impl GoldenRow {
    pub fn reference(&self) -> Result<f64> {
        self.value.trim().parse().map_err(|_| Error::ParameterDomain(format!("unparsable table value '{}'", self.value)))
    }

    pub fn label(&self) -> Result<StateLabel> {
        self.state.parse()
    }

    /// One unit in the last quoted digit.
    pub fn resolution(&self) -> f64 {
        let text = self.value.trim();
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(i) => (&text[..i], text[i + 1..].parse::<i32>().unwrap_or(0)),
            None => (text, 0),
        };
        let decimals = mantissa.find('.').map_or(0, |i| mantissa.len() - i - 1) as i32;
        10f64.powi(exponent - decimals)
    }
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|row| row.map_err(|e| Error::Io(format!("golden table: {e}"))))
        .collect()
}

/// Which rows of a table to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    /// Every separation in the table.
    Paper,
    /// The subset used by the acceptance checks.
    Acceptance,
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" | "full" => Ok(Grid::Paper),
            "acceptance" | "quick" => Ok(Grid::Acceptance),
            _ => Err(Error::ParameterDomain(format!("unknown grid '{s}', expected paper or acceptance"))),
        }
    }
}

/// Row filter: a grid, optionally narrowed to given separations and states.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub grid: Grid,
    pub r_values: Option<Vec<f64>>,
    pub states: Option<Vec<StateLabel>>,
}

impl Selection {
    pub fn new(grid: Grid) -> Self {
        Selection { grid, r_values: None, states: None }
    }

    fn keeps(&self, id: TableId, row: &GoldenRow) -> bool {
        let near = |list: &[f64]| list.iter().any(|&r| (r - row.r).abs() <= 1e-9 * r.abs().max(1.0));
        let on_grid = match self.grid {
            Grid::Paper => true,
            Grid::Acceptance => near(id.acceptance_grid()),
        };
        let r_ok = self.r_values.as_deref().is_none_or(near);
        let state_ok = match (&self.states, row.label()) {
            (None, _) => true,
            (Some(list), Ok(l)) => list.contains(&l),
            (Some(_), Err(_)) => false,
        };
        on_grid && r_ok && state_ok
    }
}

/// Numerical settings shared by every evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub optimize: OptimizeConfig,
    pub pt: PtOptions,
    pub transition_nodes: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            optimize: OptimizeConfig::default(),
            pt: PtOptions { tabulate: false, ..PtOptions::default() },
            transition_nodes: DEFAULT_NODES,
        }
    }
}

impl Settings {
    /// Settings with a given node count and precision everywhere.
    pub fn with(rules_n: usize, precision: crate::summation::Precision) -> Self {
        let d = Settings::default();
        Settings {
            optimize: OptimizeConfig { rules_n, precision, ..d.optimize },
            pt: PtOptions { rules_n, precision, ..d.pt },
            transition_nodes: rules_n,
        }
    }
}

/// A separation as an exact, ordered map key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct RKey(u64);

impl RKey {
    fn new(r: f64) -> Self {
        RKey(r.to_bits())
    }

    fn r(self) -> f64 {
        f64::from_bits(self.0)
    }
}

type Point = (StateLabel, RKey);

/// Optimized states, keyed by label and separation.
#[derive(Debug, Default)]
pub struct StateBank {
    states: BTreeMap<Point, std::result::Result<OptimizationResult, Error>>,
}

impl StateBank {
    /// Optimizes every requested state in parallel. Node states reuse the
    /// sector ground state at the same separation, which is added on demand.
    pub fn build(points: impl IntoIterator<Item = (StateLabel, f64)>, cfg: &OptimizeConfig) -> Self {
        let wanted: BTreeSet<Point> = points.into_iter().map(|(l, r)| (l, RKey::new(r))).collect();
        let mut bank = StateBank::default();
        bank.extend(wanted, cfg);
        bank
    }

    fn extend(&mut self, wanted: BTreeSet<Point>, cfg: &OptimizeConfig) {
        let grounds: BTreeSet<Point> = wanted
            .iter()
            .map(|&(l, r)| if l.n == 0 { (l, r) } else { (l.sector_ground(), r) })
            .filter(|k| !self.states.contains_key(k))
            .collect();
        let done: Vec<_> = grounds
            .into_par_iter()
            .map(|(l, r)| ((l, r), optimize_from_seed(&l, &PhysicalSetup::h2plus(r.r()), cfg)))
            .collect();
        self.states.extend(done);

        let nodes: Vec<Point> = wanted.into_iter().filter(|k| k.0.n > 0 && !self.states.contains_key(k)).collect();
        let done: Vec<_> = nodes
            .into_par_iter()
            .map(|(l, r)| {
                let res = match &self.states[&(l.sector_ground(), r)] {
                    Ok(g) => {
                        let c = OptimizeConfig { ground: Some(g.params.clone()), ..cfg.clone() };
                        optimize_from_seed(&l, &PhysicalSetup::h2plus(r.r()), &c)
                    }
                    Err(e) => Err(e.clone()),
                };
                ((l, r), res)
            })
            .collect();
        self.states.extend(done);
    }

    pub fn get(&self, label: &StateLabel, r: f64) -> Option<&std::result::Result<OptimizationResult, Error>> {
        self.states.get(&(*label, RKey::new(r)))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// A reference row next to the value computed for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparedRow {
    pub table: String,
    pub state: String,
    #[serde(rename = "R")]
    pub r: f64,
    pub quantity: String,
    pub reference: f64,
    pub ours: Option<f64>,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    /// One unit in the last quoted digit of the reference.
    pub resolution: f64,
    /// Whether the difference is at most one unit in the last quoted digit.
    pub within_resolution: bool,
    pub error: Option<String>,
    pub provenance: String,
}

/// Worst-case statistics for one quantity of one table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantitySummary {
    pub quantity: String,
    pub rows: usize,
    pub failed: usize,
    pub within_resolution: usize,
    pub max_abs_diff: f64,
    pub max_rel_diff: f64,
    pub worst_state: Option<String>,
    #[serde(rename = "worst_R")]
    pub worst_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: TableId,
    pub rows: Vec<ComparedRow>,
    pub summary: Vec<QuantitySummary>,
}

impl TableReport {
    /// Rows whose value could not be computed.
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.ours.is_none()).count()
    }

    /// Largest relative difference over the rows of `quantity`.
    pub fn max_rel_diff(&self, quantity: &str) -> Option<f64> {
        self.summary.iter().find(|s| s.quantity == quantity).map(|s| s.max_rel_diff)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record([
            "table", "state", "R", "quantity", "reference", "ours", "abs_diff", "rel_diff", "within_resolution", "error",
            "provenance",
        ])
        .map_err(csv_error)?;
        let opt = |x: Option<f64>| x.map(sci17).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.table.clone(),
                r.state.clone(),
                sci17(r.r),
                r.quantity.clone(),
                sci17(r.reference),
                opt(r.ours),
                opt(r.abs_diff),
                opt(r.rel_diff),
                r.within_resolution.to_string(),
                r.error.clone().unwrap_or_default(),
                r.provenance.clone(),
            ])
            .map_err(csv_error)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Seventeen significant digits in scientific notation, enough to round-trip any `f64`.
pub fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Every state a table row needs, including the initial state of a transition.
fn needs(id: TableId, label: StateLabel, r: f64) -> Vec<(StateLabel, f64)> {
    let mut v = vec![(label, r)];
    if id.transition_kind().is_some() {
        v.push((transition_initial(), r));
    }
    v
}

/// Initial state of every tabulated transition.
pub fn transition_initial() -> StateLabel {
    StateLabel::new(0, 0, 0, crate::model::Parity::Plus)
}

/// Values computed at one (state, R) point of one table, by quantity name.
type PointValues = BTreeMap<&'static str, std::result::Result<f64, String>>;

fn evaluate_point(id: TableId, label: StateLabel, r: f64, bank: &StateBank, settings: &Settings) -> PointValues {
    let mut out = PointValues::new();
    let state = match bank.get(&label, r) {
        Some(Ok(s)) => s,
        Some(Err(e)) => {
            out.insert("*", Err(e.to_string()));
            return out;
        }
        None => {
            out.insert("*", Err("state was not optimized".into()));
            return out;
        }
    };
    match id {
        TableId::I | TableId::II | TableId::V | TableId::VI => {
            out.insert("E", Ok(state.energy.e_total));
            out.insert("E_ref", Ok(state.energy.e_total));
            out.insert("p", Ok(state.params.p));
            out.insert("xi0", state.params.xi0.ok_or_else(|| "state has no node".to_string()));
        }
        TableId::VII => match pt_analysis(state, settings) {
            Ok(a) => {
                out.insert("A_xi", Ok(a.xi.a1));
                out.insert("A_ref", Ok(a.xi.a1));
                out.insert("A_eta", Ok(a.eta.a1));
            }
            Err(e) => {
                out.insert("*", Err(e.to_string()));
            }
        },
        TableId::VIII | TableId::IX | TableId::X => {
            let kind = id.transition_kind().expect("transition table");
            let value = transition_strength(kind, state, bank, settings).map_err(|e| e.to_string());
            out.insert("f", value.clone());
            out.insert("f_ref", value);
        }
    }
    out
}

fn pt_analysis(state: &OptimizationResult, settings: &Settings) -> Result<PtAnalysis> {
    analyze(&state.params, &state.label, &state.setup, &settings.pt)
}

fn transition_strength(kind: TransitionKind, final_state: &OptimizationResult, bank: &StateBank, settings: &Settings) -> Result<f64> {
    let initial = match bank.get(&transition_initial(), final_state.setup.r) {
        Some(Ok(s)) => s,
        Some(Err(e)) => return Err(e.clone()),
        None => return Err(Error::Unsupported("initial state was not optimized".into())),
    };
    let i = TransitionState::corrected_with(initial, &settings.pt)?;
    let f = TransitionState::corrected_with(final_state, &settings.pt)?;
    Ok(transition(kind, &i, &f, &final_state.setup, settings.transition_nodes)?.f)
}

fn compare(row: &GoldenRow, values: &PointValues) -> Result<ComparedRow> {
    let reference = row.reference()?;
    let resolution = row.resolution();
    let computed = values
        .get("*")
        .or_else(|| values.get(row.quantity.as_str()))
        .cloned()
        .unwrap_or_else(|| Err(format!("no evaluator for quantity '{}'", row.quantity)));
    let (ours, error) = match computed {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e)),
    };
    let abs_diff = ours.map(|v| (v - reference).abs());
    let rel_diff = abs_diff.map(|d| if reference != 0.0 { d / reference.abs() } else { d });
    Ok(ComparedRow {
        table: row.table.clone(),
        state: row.state.clone(),
        r: row.r,
        quantity: row.quantity.clone(),
        reference,
        ours,
        abs_diff,
        rel_diff,
        resolution,
        within_resolution: abs_diff.is_some_and(|d| d <= resolution * (1.0 + 1e-9)),
        error,
        provenance: row.provenance.clone(),
    })
}

fn summarize(rows: &[ComparedRow]) -> Vec<QuantitySummary> {
    let mut order: Vec<&str> = vec![];
    for r in rows {
        if !order.contains(&r.quantity.as_str()) {
            order.push(&r.quantity);
        }
    }
    order
        .into_iter()
        .map(|q| {
            let sel: Vec<&ComparedRow> = rows.iter().filter(|r| r.quantity == q).collect();
            let worst = sel
                .iter()
                .filter(|r| r.rel_diff.is_some())
                .max_by(|a, b| a.rel_diff.partial_cmp(&b.rel_diff).expect("finite differences"));
            QuantitySummary {
                quantity: q.to_string(),
                rows: sel.len(),
                failed: sel.iter().filter(|r| r.ours.is_none()).count(),
                within_resolution: sel.iter().filter(|r| r.within_resolution).count(),
                max_abs_diff: sel.iter().filter_map(|r| r.abs_diff).fold(0.0, f64::max),
                max_rel_diff: sel.iter().filter_map(|r| r.rel_diff).fold(0.0, f64::max),
                worst_state: worst.map(|r| r.state.clone()),
                worst_r: worst.map(|r| r.r),
            }
        })
        .collect()
}

/// Reproduces the selected rows of several tables, sharing optimized states.
///
/// Points are evaluated in parallel; the rows come back in the order of the
/// bundled files, so the output does not depend on scheduling.
pub fn reproduce_tables(ids: &[TableId], selection: &Selection, settings: &Settings) -> Result<Vec<TableReport>> {
    let mut chosen: Vec<(TableId, Vec<GoldenRow>)> = vec![];
    for &id in ids {
        let rows: Vec<GoldenRow> = id.golden()?.into_iter().filter(|r| selection.keeps(id, r)).collect();
        chosen.push((id, rows));
    }

    let mut points: BTreeSet<(TableId, StateLabel, RKey)> = BTreeSet::new();
    for (id, rows) in &chosen {
        for row in rows {
            points.insert((*id, row.label()?, RKey::new(row.r)));
        }
    }
    let bank = StateBank::build(
        points.iter().flat_map(|&(id, l, r)| needs(id, l, r.r())),
        &settings.optimize,
    );
    let values: BTreeMap<(TableId, StateLabel, RKey), PointValues> = points
        .into_par_iter()
        .map(|(id, l, r)| ((id, l, r), evaluate_point(id, l, r.r(), &bank, settings)))
        .collect();

    chosen
        .into_iter()
        .map(|(id, rows)| {
            let compared = rows
                .iter()
                .map(|row| compare(row, &values[&(id, row.label()?, RKey::new(row.r))]))
                .collect::<Result<Vec<_>>>()?;
            let summary = summarize(&compared);
            Ok(TableReport { table: id, rows: compared, summary })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_table_parses_with_known_states() {
        for id in TableId::ALL {
            let rows = id.golden().unwrap();
            assert!(!rows.is_empty(), "{id}");
            for row in rows {
                assert_eq!(row.table, id.name());
                row.label().unwrap();
                assert!(row.reference().unwrap().is_finite());
                assert!(!row.provenance.is_empty());
            }
        }
    }

    #[test]
    fn resolution_follows_quoted_digits() {
        let row = |v: &str| GoldenRow {
            table: "I".into(),
            state: "1sσg".into(),
            r: 1.0,
            quantity: "E".into(),
            value: v.into(),
            provenance: String::new(),
        };
        assert_eq!(row("-1.20526842899").resolution(), 1e-11);
        assert!((row("3.93437022e-1").resolution() - 1e-9).abs() < 1e-24);
        assert!((row("1.5573573e-06").resolution() - 1e-13).abs() < 1e-28);
        assert_eq!(row("12").resolution(), 1.0);
    }

    #[test]
    fn table_names_round_trip() {
        for id in TableId::ALL {
            assert_eq!(id.name().parse::<TableId>().unwrap(), id);
        }
        assert_eq!("vii".parse::<TableId>().unwrap(), TableId::VII);
        assert!("III".parse::<TableId>().is_err());
        assert_eq!("paper".parse::<Grid>().unwrap(), Grid::Paper);
    }

    #[test]
    fn acceptance_grid_is_a_subset_of_each_table() {
        for id in TableId::ALL {
            let rows = id.golden().unwrap();
            for &r in id.acceptance_grid() {
                assert!(rows.iter().any(|row| row.r == r), "{id} lacks R = {r}");
            }
        }
    }

    #[test]
    fn ground_state_row_reproduces() {
        let sel = Selection { grid: Grid::Paper, r_values: Some(vec![2.0]), states: None };
        let reports = reproduce_tables(&[TableId::I], &sel, &Settings::default()).unwrap();
        let e = reports[0].rows.iter().find(|r| r.quantity == "E").unwrap();
        assert!(e.abs_diff.unwrap() < 5e-10, "{e:?}");
        assert_eq!(reports[0].failures(), 0);
    }
}
