//! Kernel build checks: representation residuals, symmetry, tails and the
//! grid stability of the moments.

use schatten_core::kernel::{
    build_kernel, kernel_moment, representation_residuals, standard_ratio_grid, ResidualTable,
    REPRESENTATION_TOLERANCE,
};
use schatten_core::{KernelG, KernelParams};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::report::{Cell, ExperimentReport, Table};

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
pub const TAIL_TOLERANCE: f64 = 1e-10;
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;
/// Allowed relative change of a moment under grid refinement.
pub const MOMENT_STABILITY: f64 = 0.01;
pub const MOMENT_ORDERS: [u32; 5] = [0, 1, 2, 3, 4];

pub fn residual_report(
    config: &RunConfig,
    kernel: &KernelG,
) -> LabResult<(ExperimentReport, ResidualTable)> {
    let residuals = representation_residuals(kernel, &standard_ratio_grid())?;
    let mut table = Table::new(&[
        "ratio",
        "re_representation",
        "im_representation",
        "residual",
    ]);
    for r in &residuals.rows {
        table.push(vec![
            Cell::from(r.ratio),
            Cell::from(r.value.re),
            Cell::from(r.value.im),
            Cell::from(r.residual),
        ]);
    }
    let mut report = ExperimentReport::new("kernel-residuals", config.echo(), table);
    for (i, r) in residuals.rows.iter().enumerate() {
        report.check(
            r.residual <= REPRESENTATION_TOLERANCE,
            Some(i),
            "representation residual",
            || {
                format!(
                    "ratio {}: residual {:e} > {:e}",
                    r.ratio, r.residual, REPRESENTATION_TOLERANCE
                )
            },
        );
    }
    report.summary = json!({
        "max_residual": residuals.max_residual(),
        "max_imaginary": residuals.max_imaginary(),
        "points": kernel.len(),
        "build_params": kernel.params,
    });
    Ok((report, residuals))
}

/// Moments on the configured grid and on the refined one.
pub fn moment_report(config: &RunConfig, kernel: &KernelG) -> LabResult<ExperimentReport> {
    let refined = build_kernel(&kernel.params.refined())?;
    let mut table = Table::new(&["moment", "value", "refined_value", "relative_change"]);
    let mut entries = Vec::new();
    for m in MOMENT_ORDERS {
        entries.push((
            format!("m{m}"),
            kernel_moment(kernel, m)?,
            kernel_moment(&refined, m)?,
        ));
    }
    entries.push((
        "weighted".into(),
        kernel.weighted_moment(),
        refined.weighted_moment(),
    ));
    let mut report_rows = Vec::new();
    for (name, a, b) in entries {
        let change = (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
        table.push(vec![
            Cell::from(name.clone()),
            Cell::from(a),
            Cell::from(b),
            Cell::from(change),
        ]);
        report_rows.push((name, a, change));
    }
    let mut report = ExperimentReport::new("kernel-moments", config.echo(), table);
    for (i, (name, value, change)) in report_rows.iter().enumerate() {
        report.check(value.is_finite(), Some(i), "finite moment", || {
            format!("{name} = {value}")
        });
        report.check(
            *change < MOMENT_STABILITY,
            Some(i),
            "grid stability",
            || format!("{name} changes by {:.3}% under refinement", 100.0 * change),
        );
    }
    let symmetry = kernel.conjugate_symmetry_defect();
    let tail = kernel.tail_ratio();
    report.check(
        symmetry <= SYMMETRY_TOLERANCE,
        None,
        "conjugate symmetry",
        || format!("defect {symmetry:e}"),
    );
    report.check(tail <= TAIL_TOLERANCE, None, "tail smallness", || {
        format!("tail ratio {tail:e}")
    });
    report.summary = json!({
        "weighted_moment": kernel.weighted_moment(),
        "conjugate_symmetry_defect": symmetry,
        "tail_ratio": tail,
        "build_params": kernel.params,
        "refined_params": refined.params,
    });
    Ok(report)
}

pub fn build(params: &KernelParams) -> LabResult<KernelG> {
    Ok(build_kernel(params)?)
}
