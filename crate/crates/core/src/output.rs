//! CSV writers. Every file starts with `# key = value` lines echoing the
//! resolved configuration; numbers are printed with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::norms::DiagnosticsRecord;
use crate::cases::{Problem, RunOutput, StudyResult};
use crate::lattice::{GridSpec, MomentField};
use crate::Result;

fn metadata_block(meta: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s
}

pub fn diagnostics_csv(meta: &[(String, String)], records: &[DiagnosticsRecord]) -> String {
    let mut s = metadata_block(meta);
    s.push_str(&DiagnosticsRecord::HEADER.join(","));
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Cell-center coordinates followed by the moments.
pub fn snapshot_csv(meta: &[(String, String)], grid: &GridSpec, moments: &MomentField) -> String {
    let mut s = metadata_block(meta);
    let m = moments.components;
    let mut header: Vec<String> = vec!["x".into()];
    if grid.dim == 2 {
        header.push("y".into());
    }
    header.extend((1..=m).map(|c| format!("u_{c}")));
    s.push_str(&header.join(","));
    s.push('\n');
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let _ = write!(s, "{:.16e}", grid.x_center(ix));
            if grid.dim == 2 {
                let _ = write!(s, ",{:.16e}", grid.y_center(iy));
            }
            for v in moments.at(ix, iy) {
                let _ = write!(s, ",{v:.16e}");
            }
            s.push('\n');
        }
    }
    s
}

pub fn study_csv(meta: &[(String, String)], result: &StudyResult) -> String {
    let mut s = metadata_block(meta);
    let _ = writeln!(s, "# target = {:?}", result.target);
    match result.slope {
        Some(v) => {
            let _ = writeln!(s, "# slope = {v:.16e}");
        }
        None => s.push_str("# slope = none\n"),
    }
    s.push_str("j,dx,l1_error\n");
    for r in &result.rows {
        let _ = writeln!(s, "{},{:.16e},{:.16e}", r.j, r.dx, r.error);
    }
    s
}

/// Writes diagnostics, snapshots, the final state and a summary into `dir`;
/// returns the written paths.
pub fn write_run(dir: &Path, problem: &Problem, output: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let meta = output.metadata.entries();
    let name = &problem.name;
    let mut written = Vec::new();
    let mut put = |file: String, contents: String| -> Result<()> {
        let path = dir.join(file);
        fs::write(&path, contents)?;
        written.push(path);
        Ok(())
    };
    if !output.diagnostics.is_empty() {
        put(format!("{name}_diagnostics.csv"), diagnostics_csv(&meta, &output.diagnostics))?;
    }
    for snap in &output.snapshots {
        let mut m = meta.clone();
        m.push(("snapshot_step".into(), snap.step.to_string()));
        m.push(("snapshot_time".into(), format!("{:.16e}", snap.time)));
        put(format!("{name}_snapshot_{:06}.csv", snap.step), snapshot_csv(&m, &problem.grid, &snap.moments))?;
    }
    put(format!("{name}_final.csv"), snapshot_csv(&meta, &problem.grid, &output.final_moments))?;
    put(format!("{name}_summary.txt"), format!("{}{}\n", metadata_block(&meta), output.metadata.report))?;
    Ok(written)
}
