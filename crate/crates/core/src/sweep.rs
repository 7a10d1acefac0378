//! Batches of average cells with a resumable journal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use crate::averages::{required_terms, run_cell, AverageReport, Cell};
use crate::coeffs::{make_provider, CoefficientSeries};
use crate::error::{Error, Result};

/// Outcome of one cell: a report, or the error that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub cell: Cell,
    pub report: Option<AverageReport>,
    pub error: Option<String>,
    /// Exit code class of the error (2 domain, 3 tolerance).
    #[serde(default)]
    pub error_code: Option<i32>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// One entry per input cell, in input order.
    pub entries: Vec<SweepEntry>,
    /// Cells evaluated in this run, as opposed to read back from the journal.
    pub evaluated: usize,
}

fn read_journal(path: &Path) -> Result<HashMap<String, SweepEntry>> {
    let mut done = HashMap::new();
    if !path.exists() {
        return Ok(done);
    }
    let file = File::open(path).map_err(|e| Error::Invalid(format!("journal {}: {e}", path.display())))?;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::Invalid(format!("journal {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn last line from an interrupted run is skipped and recomputed
        if let Ok(entry) = serde_json::from_str::<SweepEntry>(&line) {
            done.insert(entry.cell.key(), entry);
        }
    }
    Ok(done)
}

/// Run `cells` on the current rayon pool. Cells already present in `journal`
/// are not recomputed; new outcomes are appended to it as they finish.
pub fn sweep(cells: &[Cell], journal: Option<&Path>) -> Result<SweepOutcome> {
    let done = match journal {
        Some(p) => read_journal(p)?,
        None => HashMap::new(),
    };
    let pending: Vec<&Cell> = cells.iter().filter(|c| !done.contains_key(&c.key())).collect();

    let mut sizes: Vec<(usize, Result<usize>)> = pending.par_iter().enumerate().map(|(i, c)| (i, required_terms(c))).collect();
    sizes.sort_by_key(|(i, _)| *i);
    let mut bounds: BTreeMap<String, (usize, &Cell)> = BTreeMap::new();
    for (i, n) in &sizes {
        if let Ok(n) = n {
            let cell = pending[*i];
            let e = bounds.entry(cell.provider.label()).or_insert((0, cell));
            e.0 = e.0.max(*n);
        }
    }
    let providers: HashMap<String, Result<CoefficientSeries>> =
        bounds.into_iter().map(|(label, (n, cell))| (label, make_provider(&cell.provider, n))).collect();

    let writer = match journal {
        Some(p) => Some(Mutex::new(
            OpenOptions::new().create(true).append(true).open(p).map_err(|e| Error::Invalid(format!("journal {}: {e}", p.display())))?,
        )),
        None => None,
    };
    let fresh: Vec<SweepEntry> = pending
        .par_iter()
        .zip(sizes.par_iter())
        .map(|(cell, (_, size))| {
            let result = match size {
                Err(e) => Err(e.clone()),
                Ok(_) => match &providers[&cell.provider.label()] {
                    Ok(pi) => run_cell(cell, pi),
                    Err(e) => Err(e.clone()),
                },
            };
            let entry = match result {
                Ok(r) => SweepEntry { cell: (*cell).clone(), report: Some(r), error: None, error_code: None },
                Err(e) => SweepEntry { cell: (*cell).clone(), report: None, error: Some(e.to_string()), error_code: Some(e.exit_code()) },
            };
            if let Some(w) = &writer {
                let line = serde_json::to_string(&entry).expect("entry serialises");
                let mut f = w.lock().expect("journal lock");
                let _ = writeln!(f, "{line}").and_then(|_| f.flush());
            }
            entry
        })
        .collect();

    let evaluated = fresh.len();
    let mut by_key: HashMap<String, SweepEntry> = done;
    for e in fresh {
        by_key.insert(e.cell.key(), e);
    }
    let entries = cells.iter().map(|c| by_key[&c.key()].clone()).collect();
    Ok(SweepOutcome { entries, evaluated })
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two distinct `x`.
pub fn trend_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// `(ln |D_K|, ln rel_error)` for every entry with a finite positive relative error.
pub fn plot_points(entries: &[SweepEntry]) -> Vec<(f64, f64)> {
    entries
        .iter()
        .filter_map(|e| e.report.as_ref())
        .filter(|r| r.rel_error.is_finite() && r.rel_error > 0.0)
        .map(|r| (((r.cell.d0.unsigned_abs() * r.cell.c * r.cell.c) as f64).ln(), r.rel_error.ln()))
        .collect()
}

/// Plot data as CSV: `provider,kind,d0,c,x,y` with `x = ln|D|`, `y = ln rel_error`.
pub fn plot_csv(entries: &[SweepEntry]) -> String {
    let mut out = String::from("provider,kind,d0,c,x_ln_abs_d,y_ln_rel_error\n");
    for r in entries.iter().filter_map(|e| e.report.as_ref()) {
        if !(r.rel_error.is_finite() && r.rel_error > 0.0) {
            continue;
        }
        let kind = serde_json::to_value(r.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let x = ((r.cell.d0.unsigned_abs() * r.cell.c * r.cell.c) as f64).ln();
        out.push_str(&format!("{},{},{},{},{:.12},{:.12}\n", r.cell.provider.label(), kind, r.cell.d0, r.cell.c, x, r.rel_error.ln()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::{class_average, AverageKind};
    use crate::coeffs::ProviderKind;
    use crate::cutoff::CutoffSpec;
    use crate::quadclass::{class_group, Discriminant};
    use num_complex::Complex64;

    fn cell(d0: i64) -> Cell {
        Cell {
            kind: AverageKind::ClassAverage,
            provider: ProviderKind::Weight2Level11,
            d0,
            c: 1,
            l: None,
            delta_re: 0.5,
            delta_im: 0.0,
            xi: None,
            cutoff: CutoffSpec::central(0.1),
        }
    }

    #[test]
    fn empty_plan() {
        let out = sweep(&[], None).unwrap();
        assert!(out.entries.is_empty());
        assert_eq!(out.evaluated, 0);
    }

    #[test]
    fn single_cell_matches_direct_call() {
        let c = cell(-4);
        let out = sweep(std::slice::from_ref(&c), None).unwrap();
        let r = out.entries[0].report.as_ref().unwrap();
        let pi = make_provider(&ProviderKind::Weight2Level11, required_terms(&c).unwrap()).unwrap();
        let g = class_group(Discriminant::fundamental(-4).unwrap()).unwrap();
        let direct = class_average(&pi, &g, Complex64::new(0.5, 0.0), &c.cutoff).unwrap();
        assert_eq!(r.computed, direct.computed);
    }

    #[test]
    fn journal_resumes_without_work() {
        let path = std::env::temp_dir().join(format!("twistlab-journal-{}.jsonl", std::process::id()));
        let _ = std::fs::remove_file(&path);
        let cells = vec![cell(-7), cell(-4), cell(-11)];
        let first = sweep(&cells, Some(&path)).unwrap();
        assert_eq!(first.evaluated, 3);
        assert!(first.entries[2].error.is_some());
        let again = sweep(&cells, Some(&path)).unwrap();
        assert_eq!(again.evaluated, 0);
        // NaN fields compare unequal, so compare the serialised entries
        assert_eq!(serde_json::to_string(&again.entries).unwrap(), serde_json::to_string(&first.entries).unwrap());
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        assert!((trend_slope(&pts).unwrap() + 0.5).abs() < 1e-12);
        assert!(trend_slope(&pts[..1]).is_none());
    }
}
