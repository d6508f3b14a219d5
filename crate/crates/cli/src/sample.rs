//! Seeded ensemble sampling to CSV.

use std::io::Write;
use std::path::Path;

use cweight::qubit;
use cweight::states::{self, EnsembleSpec, DEFAULT_COHERENCE_RANK_TOL};
use cweight::weight::{self, SolverConfig};
use rayon::prelude::*;
use serde_json::json;

use crate::{write_atomic, Failure, SampleArgs};

pub const CSV_HEADER: &str =
    "dim,state_index,cw,cl1,mixedness,participation_ratio,min_eigenvalue,second_min_eigenvalue,kernel_coherence_rank,gap";

/// Weight at or above this is tallied as near-maximal in the summary.
const NEAR_MAX_WEIGHT: f64 = 0.999;

struct Record {
    dim: usize,
    state_index: u64,
    cw: f64,
    cl1: f64,
    mixedness: f64,
    participation_ratio: f64,
    min_eigenvalue: f64,
    second_min_eigenvalue: f64,
    kernel_coherence_rank: usize,
    gap: f64,
    /// `C_w = C_l1` by the closed form; qubits only.
    on_line: Option<bool>,
}

impl Record {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
            self.dim,
            self.state_index,
            self.cw,
            self.cl1,
            self.mixedness,
            self.participation_ratio,
            self.min_eigenvalue,
            self.second_min_eigenvalue,
            self.kernel_coherence_rank,
            self.gap
        )
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "dim": self.dim,
            "state_index": self.state_index,
            "cw": self.cw,
            "cl1": self.cl1,
            "mixedness": self.mixedness,
            "participation_ratio": self.participation_ratio,
            "min_eigenvalue": self.min_eigenvalue,
            "second_min_eigenvalue": self.second_min_eigenvalue,
            "kernel_coherence_rank": self.kernel_coherence_rank,
            "gap": self.gap,
        })
    }
}

fn record(spec: &EnsembleSpec, cfg: &SolverConfig, index: u64) -> cweight::Result<Record> {
    let rho = states::sample_one(spec.kind, spec.dim, spec.seed, index)?;
    let diag = states::diagnostics(&rho, DEFAULT_COHERENCE_RANK_TOL)?;
    let dec = weight::coherence_weight(&rho, cfg)?;
    let on_line = if spec.dim == 2 { Some(qubit::l1_comparison(&rho)?.on_line) } else { None };
    Ok(Record {
        dim: spec.dim,
        state_index: index,
        cw: dec.weight,
        cl1: diag.l1_coherence,
        mixedness: diag.mixedness,
        participation_ratio: diag.participation_ratio,
        min_eigenvalue: diag.min_eigenvalue,
        second_min_eigenvalue: diag.second_min_eigenvalue,
        kernel_coherence_rank: diag.min_eigvec_coherence_rank,
        gap: dec.gap,
        on_line,
    })
}

fn summary(spec: &EnsembleSpec, rows: &[Record]) -> serde_json::Value {
    // First index wins ties, so the choice is independent of scheduling.
    let best = rows.iter().fold(&rows[0], |b, r| if r.cw > b.cw { r } else { b });
    let min_eig = rows.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min);
    let mut v = json!({
        "dim": spec.dim,
        "count": spec.count,
        "ensemble": spec.kind.name(),
        "seed": spec.seed,
        "max_cw": best.to_json(),
        "min_eigenvalue_in_sample": min_eig,
        "mean_cw": rows.iter().map(|r| r.cw).sum::<f64>() / rows.len() as f64,
        "near_maximal_count": rows.iter().filter(|r| r.cw >= NEAR_MAX_WEIGHT).count(),
        "max_gap": rows.iter().map(|r| r.gap).fold(0.0, f64::max),
    });
    if spec.dim == 2 {
        let equal = rows.iter().filter(|r| r.on_line == Some(true)).count();
        let strict = rows.len() - equal;
        v["on_line"] = json!(equal);
        v["off_line"] = json!(strict);
        v["off_to_on_ratio"] = if equal > 0 { json!(strict as f64 / equal as f64) } else { json!(null) };
    }
    v
}

pub fn cmd_sample(seed: u64, out: Option<&Path>, cfg: &SolverConfig, args: &SampleArgs) -> Result<(), Failure> {
    let spec = EnsembleSpec { kind: args.ensemble, dim: args.dim, count: args.count, seed };
    spec.validate()?;
    let rows: Vec<Record> = (0..spec.count as u64)
        .into_par_iter()
        .map(|i| record(&spec, cfg, i))
        .collect::<cweight::Result<_>>()?;

    let mut csv = String::with_capacity(rows.len() * 220 + CSV_HEADER.len() + 1);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
    }
    let summary = serde_json::to_string_pretty(&summary(&spec, &rows)).expect("summary serializes");

    match out {
        Some(path) => {
            write_atomic(path, csv.as_bytes())?;
            println!("{summary}");
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let written = stdout.write_all(csv.as_bytes()).and_then(|_| writeln!(stdout, "\n{summary}"));
            written.map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}
