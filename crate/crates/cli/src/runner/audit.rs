use matconc_core::mc::{inequality_audit, AuditOptions};
use matconc_core::samplers::EnsembleSpec;
use matconc_core::SeedSpec;

use crate::error::Result;
use crate::report::{Report, Table};

pub(super) fn run(report: &mut Report, spec: &EnsembleSpec, opts: &AuditOptions, trials: usize, seed: SeedSpec) -> Result<()> {
    let e = spec.build()?;
    let audit = inequality_audit(&e, trials, seed, opts)?;
    for check in audit.checks() {
        let mut table = Table::new(check.name.clone(), &["t", "s", "lhs", "rhs", "tolerance", "ok"]);
        for p in &check.points {
            table.push(vec![
                Some(p.t),
                p.s,
                Some(p.lhs),
                Some(p.rhs),
                Some(p.tolerance),
                Some(if p.ok { 1.0 } else { 0.0 }),
            ]);
        }
        let failed = check.points.iter().filter(|p| !p.ok).count();
        report.add_table(table);
        report.add_verdict(
            check.name.clone(),
            check.passed,
            &check.name,
            format!(
                "{failed} of {} points exceed rhs + tolerance ({} target)",
                check.points.len(),
                audit.target
            ),
        );
    }
    report.values.insert("split_trials".into(), if audit.split_trials { 1.0 } else { 0.0 });
    Ok(())
}
