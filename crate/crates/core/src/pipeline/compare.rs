use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{chromatic_number, SolveStatus};
use crate::graph::{Coloring, Graph};
use crate::heuristics::dsatur;
use crate::hybrid::{ensemble_predict, ColorPredictor, HybridColoring, NodeOrder};
use crate::io::sample::{write_csv_to, SampleRow};

/// Append-only sample CSV collecting graphs the baseline colored better than the model.
pub struct FeedbackStore {
    path: PathBuf,
    max_nodes: usize,
    lock: Mutex<()>,
}

impl FeedbackStore {
    /// Creates the file if needed; fails if it cannot be opened for appending.
    pub fn open(path: &Path, max_nodes: usize) -> Result<Self> {
        Self::open_append(path)?;
        Ok(FeedbackStore { path: path.to_path_buf(), max_nodes, lock: Mutex::new(()) })
    }

    fn open_append(path: &Path) -> Result<File> {
        OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::io(path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, g: &Graph, label: &Coloring) -> Result<()> {
        let row = SampleRow::training(g, label, self.max_nodes)?;
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let file = Self::open_append(&self.path)?;
        file.lock().map_err(|e| Error::io(&self.path, e))?;
        let written = write_csv_to(&file, &[row]);
        let unlocked = file.unlock();
        written.and(unlocked).map_err(|e| Error::io(&self.path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Hybrid,
    Dsatur,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutcome {
    pub winner: Winner,
    pub chosen: Coloring,
    pub hybrid: HybridColoring,
    pub dsatur_colors: usize,
    /// Set when the graph went to the feedback store: how its label was obtained.
    pub stored_label: Option<SolveStatus>,
}

impl CompareOutcome {
    pub fn hybrid_colors(&self) -> usize {
        self.hybrid.colors_after()
    }
}

/// Colors `g` both ways and keeps the coloring with fewer colors (the hybrid wins ties).
/// When the baseline wins and a store is given, the graph is appended with the exact
/// optimum if the solver finishes in `timeout`, else with the baseline coloring.
pub fn compare<P: ColorPredictor>(
    models: &[P],
    g: &Graph,
    store: Option<&FeedbackStore>,
    order: NodeOrder,
    timeout: Duration,
) -> Result<CompareOutcome> {
    let (_, hybrid) = ensemble_predict(models, g, order)?;
    let baseline = dsatur(g);
    let dsatur_colors = baseline.colors_used();
    if hybrid.colors_after() <= dsatur_colors {
        return Ok(CompareOutcome {
            winner: Winner::Hybrid,
            chosen: hybrid.corrected.clone(),
            hybrid,
            dsatur_colors,
            stored_label: None,
        });
    }
    let mut stored_label = None;
    if let Some(store) = store {
        let exact = chromatic_number(g, timeout);
        let label = match exact.status {
            SolveStatus::Exact => exact.coloring,
            SolveStatus::TimedOut => baseline.clone(),
        };
        store.append(g, &label)?;
        stored_label = Some(exact.status);
    }
    Ok(CompareOutcome { winner: Winner::Dsatur, chosen: baseline, hybrid, dsatur_colors, stored_label })
}
