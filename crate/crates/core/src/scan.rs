//! Sweeps over the `(n_a, n_b)` plane recording where stable arrangements exist.

use rayon::prelude::*;
use serde_json::json;

use crate::error::{BlottoError, Result};
use crate::format::format_arrangement;
use crate::model::{AgentClass, Arrangement, Instance, Outcome};
use crate::number::Number;
use crate::stability::{arrangement_count, find_stable_canonical, SearchMode};

pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum CuPolicy {
    /// 1.1 times the empty-item threshold of biases `(1, -1)` under the weights.
    AboveThreshold,
    Explicit(Number),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub num_items: usize,
    pub outcome: Outcome,
    pub n_max: u32,
    /// `None` means unit weights.
    pub weights: Option<Vec<Number>>,
    pub cu_policy: CuPolicy,
    pub cell_budget: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl ScanConfig {
    pub fn new(num_items: usize, outcome: Outcome, n_max: u32) -> Self {
        ScanConfig {
            num_items,
            outcome,
            n_max,
            weights: None,
            cu_policy: CuPolicy::AboveThreshold,
            cell_budget: DEFAULT_CELL_BUDGET,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Computed {
        stable_exists: bool,
        /// Stable arrangements counted with their item-permutation multiplicity.
        num_stable_canonical: u64,
        /// First stable canonical representative, if any.
        sample_witness: Option<Arrangement>,
    },
    /// The cell's arrangement space exceeded the budget.
    Skipped { size: u128 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub n_a: u32,
    pub n_b: u32,
    pub status: CellStatus,
}

impl Cell {
    pub fn stable_exists(&self) -> Option<bool> {
        match self.status {
            CellStatus::Computed { stable_exists, .. } => Some(stable_exists),
            CellStatus::Skipped { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionMap {
    pub num_items: usize,
    pub outcome: Outcome,
    pub weights: Vec<Number>,
    pub unlabeled_cost: Number,
    pub n_max: u32,
    /// Every `(n_a, n_b)` with `n_max >= n_a >= n_b >= 0` and `n_a >= 1`, sorted.
    pub cells: Vec<Cell>,
}

impl RegionMap {
    pub fn cell(&self, n_a: u32, n_b: u32) -> Option<&Cell> {
        self.cells.iter().find(|c| c.n_a == n_a && c.n_b == n_b)
    }
}

fn cell_instance(config: &ScanConfig, weights: &[Number], cu: &Number, n_a: u32, n_b: u32) -> Result<Instance> {
    let classes = vec![AgentClass::new(Number::integer(1), n_a), AgentClass::new(Number::integer(-1), n_b)];
    Instance::new(config.num_items, Some(weights.to_vec()), classes, cu.clone(), config.outcome)
}

fn resolve_cost(config: &ScanConfig, weights: &[Number]) -> Result<Number> {
    match &config.cu_policy {
        CuPolicy::Explicit(cu) => Ok(cu.clone()),
        CuPolicy::AboveThreshold => {
            let probe = cell_instance(config, weights, &Number::integer(0), 1, 1)?;
            Ok(crate::constructive::auto_unlabeled_cost(&probe))
        }
    }
}

fn scan_cell(config: &ScanConfig, weights: &[Number], cu: &Number, n_a: u32, n_b: u32) -> Result<Cell> {
    let instance = cell_instance(config, weights, cu, n_a, n_b)?;
    let size = arrangement_count(&instance);
    if size > u128::from(config.cell_budget) {
        return Ok(Cell { n_a, n_b, status: CellStatus::Skipped { size } });
    }
    let stable = find_stable_canonical(&instance, SearchMode::All, config.cell_budget)?;
    let total: u128 = stable.iter().map(|(_, k)| k).sum();
    Ok(Cell {
        n_a,
        n_b,
        status: CellStatus::Computed {
            stable_exists: total > 0,
            num_stable_canonical: total as u64,
            sample_witness: stable.into_iter().next().map(|(a, _)| a),
        },
    })
}

/// Scans every cell of the plane. The result does not depend on the worker count.
pub fn scan_region(config: &ScanConfig) -> Result<RegionMap> {
    if config.num_items == 0 {
        return Err(BlottoError::InvalidInstance("num_items must be at least 1".into()));
    }
    let weights = config.weights.clone().unwrap_or_else(|| vec![Number::integer(1); config.num_items]);
    let cu = resolve_cost(config, &weights)?;
    let coords: Vec<(u32, u32)> = (1..=config.n_max).flat_map(|a| (0..=a).map(move |b| (a, b))).collect();
    let work = || -> Result<Vec<Cell>> {
        coords.par_iter().map(|&(a, b)| scan_cell(config, &weights, &cu, a, b)).collect()
    };
    let mut cells = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| BlottoError::InvalidInstance(format!("cannot start {n} workers: {e}")))?
            .install(work)?,
        None => work()?,
    };
    cells.sort_by_key(|c| (c.n_a, c.n_b));
    Ok(RegionMap {
        num_items: config.num_items,
        outcome: config.outcome,
        weights,
        unlabeled_cost: cu,
        n_max: config.n_max,
        cells,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    JsonLines,
}

/// CSV (`n_a,n_b,stable_exists,num_stable_canonical`, booleans as 1/0,
/// skipped cells as `skipped`) or one JSON object per line with the sample
/// witness in arrangement text form.
pub fn export_region(map: &RegionMap, format: ExportFormat) -> String {
    let mut out = String::new();
    if format == ExportFormat::Csv {
        out.push_str("n_a,n_b,stable_exists,num_stable_canonical\n");
    }
    for cell in &map.cells {
        let line = match (format, &cell.status) {
            (ExportFormat::Csv, CellStatus::Computed { stable_exists, num_stable_canonical, .. }) => {
                format!("{},{},{},{}", cell.n_a, cell.n_b, u8::from(*stable_exists), num_stable_canonical)
            }
            (ExportFormat::Csv, CellStatus::Skipped { .. }) => format!("{},{},skipped,skipped", cell.n_a, cell.n_b),
            (ExportFormat::JsonLines, CellStatus::Computed { stable_exists, num_stable_canonical, sample_witness }) => {
                json!({
                    "n_a": cell.n_a,
                    "n_b": cell.n_b,
                    "status": "computed",
                    "stable_exists": stable_exists,
                    "num_stable_canonical": num_stable_canonical,
                    "sample_witness": sample_witness.as_ref().map(format_arrangement),
                })
                .to_string()
            }
            (ExportFormat::JsonLines, CellStatus::Skipped { size }) => json!({
                "n_a": cell.n_a,
                "n_b": cell.n_b,
                "status": "skipped",
                "stable_exists": null,
                "num_stable_canonical": null,
                "sample_witness": null,
                "arrangements": size.to_string(),
            })
            .to_string(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_two_items_odd_gap_two_cells_are_unstable() {
        let map = scan_region(&ScanConfig::new(2, Outcome::Mean, 11)).unwrap();
        for (a, b) in [(3, 1), (5, 3), (7, 5), (9, 7), (11, 9)] {
            assert_eq!(map.cell(a, b).unwrap().stable_exists(), Some(false), "({a},{b})");
        }
        let csv = export_region(&map, ExportFormat::Csv);
        assert!(csv.lines().any(|l| l == "3,1,0,0"));
        assert_eq!(csv.lines().count(), 1 + map.cells.len());
    }

    #[test]
    fn cells_cover_the_half_plane() {
        let map = scan_region(&ScanConfig::new(2, Outcome::Median, 4)).unwrap();
        let coords: Vec<_> = map.cells.iter().map(|c| (c.n_a, c.n_b)).collect();
        assert_eq!(coords.len(), 14);
        assert!(coords.windows(2).all(|w| w[0] < w[1]));
        assert!(coords.iter().all(|&(a, b)| a >= b && (1..=4).contains(&a)));
    }

    #[test]
    fn empty_map_exports_header_only() {
        let map = scan_region(&ScanConfig::new(2, Outcome::Mean, 0)).unwrap();
        assert_eq!(export_region(&map, ExportFormat::Csv), "n_a,n_b,stable_exists,num_stable_canonical\n");
        assert_eq!(export_region(&map, ExportFormat::JsonLines), "");
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut config = ScanConfig::new(3, Outcome::Mean, 6);
        config.workers = Some(1);
        let one = export_region(&scan_region(&config).unwrap(), ExportFormat::JsonLines);
        config.workers = Some(4);
        let four = export_region(&scan_region(&config).unwrap(), ExportFormat::JsonLines);
        assert_eq!(one, four);
    }

    #[test]
    fn over_budget_cells_are_skipped() {
        let mut config = ScanConfig::new(4, Outcome::Median, 6);
        config.cell_budget = 500;
        let map = scan_region(&config).unwrap();
        assert!(map.cells.iter().any(|c| matches!(c.status, CellStatus::Skipped { .. })));
        assert!(export_region(&map, ExportFormat::Csv).contains("skipped,skipped"));
    }
}
