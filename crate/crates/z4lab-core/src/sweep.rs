//! Parallel, checkpointed 2D parameter sweeps of the Lyapunov spectrum.
//!
//! Cells are pure functions of `(coefficients, grid, config)`: each cell
//! converts its physical parameters to the rescaled ones, launches an orbit
//! offset from the upper saddle along its unstable eigendirection, and runs
//! the spectrum. A work queue feeds cells to worker threads; the coordinator
//! thread is the only writer of the checkpoint file (JSON lines, one cell per
//! line, idempotent on replay). Output is deterministic: independent of the
//! worker count and of interruption/resume.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write as IoWrite};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::fmt_g17;
use crate::lyapunov::{lyapunov_spectrum, LyapunovError, LyapunovOutcome};
use crate::normal_form::phys_to_rescaled;
use crate::systems::{EquilibriumId, RescaledField};
use crate::types::{
    IntegratorConfig, LyapunovConfig, PhysParams, State3, SystemCoefficients, ValidationError,
};

/// Default top-exponent threshold separating numerical zero from expansion.
pub const CHAOS_THRESHOLD: f64 = 5e-3;
/// Offset of the launch point from the saddle along its unstable direction.
pub const LAUNCH_OFFSET: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint does not match the grid: {0}")]
    IncompatibleCheckpoint(String),
    #[error("worker thread failed")]
    WorkerFailed,
}

/// One linearly spaced swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    /// One of `gamma`, `beta`, `mu`.
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl ParamRange {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !matches!(self.name.as_str(), "gamma" | "beta" | "mu") {
            return Err(ValidationError::OutOfRange(
                "sweep parameter name must be gamma, beta, or mu",
            ));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(ValidationError::OutOfRange(
                "sweep range must be finite with min <= max",
            ));
        }
        if self.count == 0 {
            return Err(ValidationError::OutOfRange("sweep count must be at least 1"));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }
}

/// A 2D grid over two distinct physical parameters, the third fixed by `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub x: ParamRange,
    pub y: ParamRange,
    pub base: PhysParams,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.x.validate()?;
        self.y.validate()?;
        if self.x.name == self.y.name {
            return Err(ValidationError::OutOfRange(
                "sweep axes must use distinct parameters",
            ));
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.x.count * self.y.count
    }

    pub fn params_at(&self, i: usize, j: usize) -> PhysParams {
        let mut p = self.base;
        for (name, v) in [(&self.x.name, self.x.value(i)), (&self.y.name, self.y.value(j))] {
            match name.as_str() {
                "gamma" => p.gamma = v,
                "beta" => p.beta = v,
                "mu" => p.mu = v,
                _ => unreachable!("validated"),
            }
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Done,
    Pending,
}

/// One computed sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub i: usize,
    pub j: usize,
    pub px: f64,
    pub py: f64,
    /// Exponents, descending; empty for divergent/invalid cells.
    pub exponents: Vec<f64>,
    pub label: String,
    pub status: CellStatus,
}

/// Per-cell computation settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub lyapunov: LyapunovConfig,
    pub integrator: IntegratorConfig,
    /// Top exponent above which a bounded cell is labeled `chaotic`.
    pub chaos_threshold: f64,
    /// Offset from the saddle along its unstable direction at launch.
    pub launch_offset: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lyapunov: LyapunovConfig::default(),
            integrator: IntegratorConfig::default(),
            chaos_threshold: CHAOS_THRESHOLD,
            launch_offset: LAUNCH_OFFSET,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.lyapunov.validate()?;
        self.integrator.validate()?;
        if !(self.chaos_threshold > 0.0 && self.launch_offset > 0.0) {
            return Err(ValidationError::OutOfRange(
                "chaos_threshold and launch_offset must be positive",
            ));
        }
        Ok(())
    }
}

/// Computes one cell. Pure: the result depends only on the arguments.
pub fn compute_cell(
    c: &SystemCoefficients,
    grid: &SweepGrid,
    cfg: &SweepConfig,
    i: usize,
    j: usize,
) -> Result<SweepCell, SweepError> {
    let p = grid.params_at(i, j);
    let (px, py) = (grid.x.value(i), grid.y.value(j));
    let done = |exponents: Vec<f64>, label: &str| SweepCell {
        i,
        j,
        px,
        py,
        exponents,
        label: label.to_string(),
        status: CellStatus::Done,
    };

    // Parameter points outside the rescaling's domain (mu <= 0) are recorded,
    // not fatal.
    let Ok(r) = phys_to_rescaled(c, &p) else {
        return Ok(done(Vec::new(), "invalid"));
    };
    let field = match RescaledField::new(c, r) {
        Ok(f) => f,
        Err(_) => return Ok(done(Vec::new(), "invalid")),
    };
    // Launch near the upper saddle along its unstable plane direction; when
    // the plane spectrum there is complex (no real unstable direction), fall
    // back to a fixed plane offset — the saddle is then a focus and the
    // offset direction is immaterial.
    let dir = field
        .unstable_direction(EquilibriumId::OPlus)
        .map(|(v, _)| v)
        .unwrap_or_else(|_| State3::new(1.0, 0.0, 0.0));
    let s0 = EquilibriumId::OPlus.state().add(dir.scale(cfg.launch_offset));
    let outcome = lyapunov_spectrum(
        &|s: &State3| field.eval(*s),
        &|s: &State3| field.jacobian(*s),
        s0,
        &cfg.lyapunov,
        &cfg.integrator,
    )?;
    Ok(match outcome {
        LyapunovOutcome::Divergent { .. } => done(Vec::new(), "divergent"),
        LyapunovOutcome::Spectrum(exps) => {
            let label = if exps[0] > cfg.chaos_threshold {
                "chaotic"
            } else {
                "stable"
            };
            done(exps, label)
        }
    })
}

/// Loads a checkpoint file: parseable lines become cells (later duplicates
/// win); an unparseable trailing line (a crash mid-append) is ignored.
fn load_checkpoint(
    path: &Path,
    grid: &SweepGrid,
) -> Result<HashMap<(usize, usize), SweepCell>, SweepError> {
    let mut cells = HashMap::new();
    if !path.exists() {
        return Ok(cells);
    }
    let reader = BufReader::new(File::open(path)?);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let Ok(cell) = serde_json::from_str::<SweepCell>(&line) else {
            continue; // torn append from an interrupted run
        };
        if cell.i >= grid.x.count || cell.j >= grid.y.count {
            return Err(SweepError::IncompatibleCheckpoint(format!(
                "cell ({}, {}) outside the {}x{} grid",
                cell.i, cell.j, grid.x.count, grid.y.count
            )));
        }
        // Cell parameters are recomputed from the same formula, so a matching
        // checkpoint reproduces them bit-for-bit.
        if cell.px != grid.x.value(cell.i) || cell.py != grid.y.value(cell.j) {
            return Err(SweepError::IncompatibleCheckpoint(format!(
                "cell ({}, {}) has parameters ({}, {}), grid expects ({}, {})",
                cell.i,
                cell.j,
                cell.px,
                cell.py,
                grid.x.value(cell.i),
                grid.y.value(cell.j)
            )));
        }
        if cell.status == CellStatus::Done {
            cells.insert((cell.i, cell.j), cell);
        }
    }
    Ok(cells)
}

/// Runs (or resumes) a sweep. Completed cells found in the checkpoint are
/// not recomputed; newly computed cells are appended to it through the
/// coordinator thread. Returns all cells in row-major order (`j` outer,
/// `i` inner), matching the CSV and heatmap layouts.
pub fn run_sweep(
    c: &SystemCoefficients,
    grid: &SweepGrid,
    cfg: &SweepConfig,
    checkpoint: Option<&Path>,
    workers: usize,
) -> Result<Vec<SweepCell>, SweepError> {
    grid.validate()?;
    cfg.validate()?;
    let workers = workers.max(1);

    let mut existing = match checkpoint {
        Some(path) => load_checkpoint(path, grid)?,
        None => HashMap::new(),
    };
    let pending: Vec<(usize, usize)> = (0..grid.y.count)
        .flat_map(|j| (0..grid.x.count).map(move |i| (i, j)))
        .filter(|key| !existing.contains_key(key))
        .collect();

    let mut sink = match checkpoint {
        Some(path) => Some(BufWriter::new(
            OpenOptions::new().create(true).append(true).open(path)?,
        )),
        None => None,
    };

    if !pending.is_empty() {
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel::<Result<SweepCell, SweepError>>();
        std::thread::scope(|scope| -> Result<(), SweepError> {
            for _ in 0..workers.min(pending.len()) {
                let tx = tx.clone();
                let next = &next;
                let pending = &pending;
                scope.spawn(move || loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&(i, j)) = pending.get(idx) else {
                        break;
                    };
                    if tx.send(compute_cell(c, grid, cfg, i, j)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for _ in 0..pending.len() {
                let cell = rx.recv().map_err(|_| SweepError::WorkerFailed)??;
                if let Some(w) = sink.as_mut() {
                    serde_json::to_writer(&mut *w, &cell)
                        .map_err(|e| std::io::Error::new(std::io::ErrorKind::Other, e))?;
                    w.write_all(b"\n")?;
                    w.flush()?;
                }
                existing.insert((cell.i, cell.j), cell);
            }
            Ok(())
        })?;
    }

    let mut cells = Vec::with_capacity(grid.n_cells());
    for j in 0..grid.y.count {
        for i in 0..grid.x.count {
            cells.push(
                existing
                    .remove(&(i, j))
                    .expect("every cell computed or loaded"),
            );
        }
    }
    Ok(cells)
}

/// Writes the sweep CSV: `i,j,<px>,<py>,le1,le2,le3,label` with the axis
/// names in the header and 17-significant-digit floats; missing exponents
/// (divergent/invalid cells) leave their fields empty.
pub fn write_sweep_csv<W: IoWrite>(
    grid: &SweepGrid,
    cells: &[SweepCell],
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "i,j,{},{},le1,le2,le3,label", grid.x.name, grid.y.name)?;
    for cell in cells {
        let le = |k: usize| cell.exponents.get(k).map(|v| fmt_g17(*v)).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            cell.i,
            cell.j,
            fmt_g17(cell.px),
            fmt_g17(cell.py),
            le(0),
            le(1),
            le(2),
            cell.label
        )?;
    }
    Ok(())
}

/// Top-exponent values in heatmap layout (row-major, `j` increasing
/// downward); divergent/invalid cells map to NaN.
pub fn top_exponent_grid(grid: &SweepGrid, cells: &[SweepCell]) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![f64::NAN; grid.x.count]; grid.y.count];
    for cell in cells {
        rows[cell.j][cell.i] = cell.exponents.first().copied().unwrap_or(f64::NAN);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> SweepGrid {
        SweepGrid {
            x: ParamRange {
                name: "beta".into(),
                min: 0.02,
                max: 0.18,
                count: 3,
            },
            y: ParamRange {
                name: "gamma".into(),
                min: 0.05,
                max: 0.09,
                count: 2,
            },
            base: PhysParams::new(f64::NAN, f64::NAN, 0.02),
        }
    }

    fn fast_cfg() -> SweepConfig {
        SweepConfig {
            lyapunov: LyapunovConfig {
                t_transient: 20.0,
                t_total: 120.0,
                ..LyapunovConfig::default()
            },
            integrator: IntegratorConfig::with_tols(1e-8, 1e-10),
            ..SweepConfig::default()
        }
    }

    fn csv_string(grid: &SweepGrid, cells: &[SweepCell]) -> String {
        let mut buf = Vec::new();
        write_sweep_csv(grid, cells, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn range_endpoints_and_single_count() {
        let r = ParamRange {
            name: "mu".into(),
            min: 0.1,
            max: 0.5,
            count: 5,
        };
        assert_eq!(r.value(0), 0.1);
        assert_eq!(r.value(4), 0.5);
        let single = ParamRange {
            name: "mu".into(),
            min: 0.3,
            max: 0.9,
            count: 1,
        };
        assert_eq!(single.value(0), 0.3);
    }

    #[test]
    fn worker_count_does_not_change_the_csv() {
        let c = SystemCoefficients::concrete();
        let grid = small_grid();
        let cfg = fast_cfg();
        let one = run_sweep(&c, &grid, &cfg, None, 1).unwrap();
        let four = run_sweep(&c, &grid, &cfg, None, 4).unwrap();
        let csv1 = csv_string(&grid, &one);
        let csv4 = csv_string(&grid, &four);
        assert_eq!(csv1, csv4, "CSV must be byte-identical across worker counts");
        assert_eq!(one.len(), grid.n_cells());
    }

    #[test]
    fn interrupted_checkpoint_resumes_to_identical_csv() {
        let c = SystemCoefficients::concrete();
        let grid = small_grid();
        let cfg = fast_cfg();
        let dir = tempfile::tempdir().unwrap();

        // Uninterrupted reference run.
        let full_path = dir.path().join("full.jsonl");
        let reference = run_sweep(&c, &grid, &cfg, Some(&full_path), 2).unwrap();
        let ref_csv = csv_string(&grid, &reference);

        // Simulate a crash: keep only the first three checkpoint lines plus a
        // torn partial line.
        let ckpt = std::fs::read_to_string(&full_path).unwrap();
        let lines: Vec<&str> = ckpt.lines().collect();
        assert_eq!(lines.len(), grid.n_cells());
        let partial_path = dir.path().join("partial.jsonl");
        let mut torn = lines[..3].join("\n");
        torn.push('\n');
        torn.push_str(&lines[3][..lines[3].len() / 2]);
        std::fs::write(&partial_path, &torn).unwrap();

        let resumed = run_sweep(&c, &grid, &cfg, Some(&partial_path), 3).unwrap();
        assert_eq!(csv_string(&grid, &resumed), ref_csv);
    }

    #[test]
    fn complete_checkpoint_resumes_without_recomputation() {
        let c = SystemCoefficients::concrete();
        let grid = small_grid();
        let cfg = fast_cfg();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.jsonl");
        let first = run_sweep(&c, &grid, &cfg, Some(&path), 2).unwrap();
        let size_after = std::fs::metadata(&path).unwrap().len();

        let second = run_sweep(&c, &grid, &cfg, Some(&path), 2).unwrap();
        assert_eq!(first, second);
        // No new appends: everything was loaded.
        assert_eq!(std::fs::metadata(&path).unwrap().len(), size_after);
    }

    #[test]
    fn incompatible_checkpoint_is_rejected() {
        let c = SystemCoefficients::concrete();
        let grid = small_grid();
        let cfg = fast_cfg();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.jsonl");
        run_sweep(&c, &grid, &cfg, Some(&path), 1).unwrap();

        let mut other = grid.clone();
        other.x.max = 0.5; // different axis values
        let err = run_sweep(&c, &other, &cfg, Some(&path), 1).unwrap_err();
        assert!(matches!(err, SweepError::IncompatibleCheckpoint(_)));
    }

    #[test]
    fn invalid_mu_cell_is_marked_invalid() {
        let c = SystemCoefficients::concrete();
        let grid = SweepGrid {
            x: ParamRange {
                name: "mu".into(),
                min: -0.01,
                max: 0.02,
                count: 2,
            },
            y: ParamRange {
                name: "beta".into(),
                min: 0.16,
                max: 0.16,
                count: 1,
            },
            base: PhysParams::new(0.07, f64::NAN, f64::NAN),
        };
        let cells = run_sweep(&c, &grid, &fast_cfg(), None, 1).unwrap();
        assert_eq!(cells[0].label, "invalid");
        assert!(cells[0].exponents.is_empty());
        assert_ne!(cells[1].label, "invalid");
    }

    #[test]
    fn csv_includes_axis_names_and_full_precision() {
        let grid = small_grid();
        let cells = vec![SweepCell {
            i: 0,
            j: 0,
            px: 0.02,
            py: 0.05,
            exponents: vec![0.0123456789012345678, -0.1, -0.5],
            label: "chaotic".into(),
            status: CellStatus::Done,
        }];
        let csv = csv_string(&grid, &cells);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "i,j,beta,gamma,le1,le2,le3,label");
        let row = lines.next().unwrap();
        assert!(row.starts_with("0,0,"));
        assert!(row.ends_with(",chaotic"));
        // 17 significant digits survive a parse round trip.
        let le1: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(le1, 0.0123456789012345678);
    }

    #[test]
    fn checkpoint_lines_round_trip_serde() {
        let cell = SweepCell {
            i: 2,
            j: 1,
            px: 0.1,
            py: 0.2,
            exponents: vec![],
            label: "divergent".into(),
            status: CellStatus::Done,
        };
        let line = serde_json::to_string(&cell).unwrap();
        let back: SweepCell = serde_json::from_str(&line).unwrap();
        assert_eq!(cell, back);
    }

    // Keep the unused-field warning away: the heatmap projection is exercised
    // here and by the CLI.
    #[test]
    fn heatmap_grid_layout_is_row_major() {
        let grid = small_grid();
        let c = SystemCoefficients::concrete();
        let cells = run_sweep(&c, &grid, &fast_cfg(), None, 2).unwrap();
        let rows = top_exponent_grid(&grid, &cells);
        assert_eq!(rows.len(), grid.y.count);
        assert_eq!(rows[0].len(), grid.x.count);
        for cell in &cells {
            let v = rows[cell.j][cell.i];
            match cell.exponents.first() {
                Some(e) => assert_eq!(v, *e),
                None => assert!(v.is_nan()),
            }
        }
    }
}
