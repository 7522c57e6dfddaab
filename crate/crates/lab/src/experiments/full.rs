//! Every suite in one run, sharing the kernel, the Lipschitz cells, the
//! theorem2 cells and the growth fits with the chain.

use std::path::{Path, PathBuf};

use super::{chain, growth, kernel, lipschitz, reconstruction, reduction, theorem2};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::report::{parameter_hash, write_json, ExperimentReport};

pub fn run(config: &RunConfig) -> LabResult<Vec<ExperimentReport>> {
    let kernel = kernel::build(&config.kernel)?;
    let (residuals, _) = kernel::residual_report(config, &kernel)?;
    let moments = kernel::moment_report(config, &kernel)?;
    let lipschitz = lipschitz::run(config)?;
    let theorem2 = theorem2::run(config)?;

    let growth_pairs = growth::suite_pairs(config);
    let mut pairs = growth_pairs.clone();
    for pair in chain::bound_pairs(config) {
        if !pairs.iter().any(|q| q.0 == pair.0 && q.1 == pair.1) {
            pairs.push(pair);
        }
    }
    let fits = growth::run_fits(config, &pairs)?;
    let growth_report = growth::report(config, "lemma-growth", &growth_pairs, &fits);

    let reconstruction = reconstruction::run(config, &kernel)?;
    let reduction = reduction::run_reduction(config)?;
    let restriction = reduction::run_restriction(config)?;
    let chain = chain::run(config, &lipschitz, &theorem2, &kernel, &fits)?;
    Ok(vec![
        residuals,
        moments,
        lipschitz.report,
        theorem2.report,
        growth_report,
        reconstruction,
        reduction,
        restriction,
        chain,
    ])
}

/// Writes every report and an index `full-<hash>.json`; returns the index path.
pub fn write_all(
    config: &RunConfig,
    reports: &[ExperimentReport],
    dir: &Path,
) -> LabResult<PathBuf> {
    let mut entries = Vec::new();
    for report in reports {
        report.write(dir)?;
        entries.push(serde_json::json!({
            "experiment_id": report.experiment_id,
            "file_stem": report.file_stem(),
            "rows": report.table.rows.len(),
            "passed": report.passed(),
            "failures": report.failures.len(),
        }));
    }
    let parameters = config.echo();
    let path = dir.join(format!("full-{}.json", parameter_hash(&parameters)));
    write_json(
        &path,
        &serde_json::json!({
            "experiment_id": "full",
            "parameters": parameters,
            "reports": entries,
            "passed": reports.iter().all(ExperimentReport::passed),
        }),
    )?;
    Ok(path)
}
