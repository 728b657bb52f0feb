use std::collections::HashMap;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::SolverError;
use crate::mip::{export_lp, MilpModel};

/// A user-supplied command line. `{lp}` and `{sol}` are replaced by the
/// model file and the expected solution file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolver {
    pub command: String,
    pub workdir: Option<PathBuf>,
}

static COUNTER: AtomicUsize = AtomicUsize::new(0);

/// Reads `name=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_solution(model: &MilpModel, text: &str) -> Result<Vec<f64>, SolverError> {
    let index: HashMap<&str, usize> = model.vars.iter().enumerate().map(|(j, v)| (v.name.as_str(), j)).collect();
    let mut x = vec![0.0; model.vars.len()];
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || SolverError::External(format!("solution line {}: `{line}`", no + 1));
        let (name, value) = line.split_once('=').ok_or_else(bad)?;
        let j = *index.get(name.trim()).ok_or_else(bad)?;
        x[j] = value.trim().parse().map_err(|_| bad())?;
    }
    Ok(x)
}

/// Writes the model, runs the command and reads the solution back.
pub fn solve_external(model: &MilpModel, solver: &ExternalSolver) -> Result<Vec<f64>, SolverError> {
    let dir = solver.workdir.clone().unwrap_or_else(std::env::temp_dir);
    let tag = format!("parl-{}-{}", std::process::id(), COUNTER.fetch_add(1, Ordering::Relaxed));
    let lp = dir.join(format!("{tag}.lp"));
    let sol = dir.join(format!("{tag}.sol"));
    std::fs::write(&lp, export_lp(model)?)?;
    let mut parts = solver.command.split_whitespace().map(|p| {
        p.replace("{lp}", &lp.to_string_lossy()).replace("{sol}", &sol.to_string_lossy())
    });
    let program = parts.next().ok_or_else(|| SolverError::External("empty command".into()))?;
    let status = Command::new(program).args(parts).status()?;
    let _ = std::fs::remove_file(&lp);
    if !status.success() {
        return Err(SolverError::External(format!("command exited with {status}")));
    }
    let text = std::fs::read_to_string(&sol)?;
    let _ = std::fs::remove_file(&sol);
    let x = parse_solution(model, &text)?;
    let viol = model.max_violation(&x, true);
    if viol > 1e-6 {
        return Err(SolverError::External(format!("returned point violates the model by {viol}")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::VarKind;

    #[test]
    fn solution_lines_are_parsed() {
        let mut m = MilpModel::new();
        m.add_var("x", VarKind::Integer, 0.0, 5.0);
        m.add_var("y", VarKind::Continuous, 0.0, 5.0);
        let x = parse_solution(&m, "# header\nx = 3\n\ny=1.5\n").unwrap();
        assert_eq!(x, vec![3.0, 1.5]);
        assert!(parse_solution(&m, "z=1").is_err());
    }
}
