//! Text report for the exact policy-enumeration check.

use retcap_core::oracle::{verify_cap_optimality, CapOptimalityReport, TinyMdp};
use std::fmt::Write as _;

fn policy_text(mdp: &TinyMdp, policy: &[usize]) -> String {
    let states = mdp.decision_states();
    let parts: Vec<String> = states
        .iter()
        .zip(policy)
        .map(|(d, &a)| format!("t{} {} R={}: {}", d.time, mdp.states[d.state], d.running_return, mdp.actions[a]))
        .collect();
    parts.join("; ")
}

/// Runs the check at `alpha` (or the file's own level) and renders it.
pub fn run(mdp: &TinyMdp, alpha: Option<f64>) -> retcap_core::Result<(CapOptimalityReport, String)> {
    let alpha = alpha
        .or(mdp.alpha)
        .ok_or_else(|| retcap_core::Error::InvalidInput("no alpha given and the file sets none".into()))?;
    let report = verify_cap_optimality(mdp, alpha)?;
    let mut out = String::new();
    let best = report.optimal_policy();
    let _ = writeln!(out, "policies enumerated: {}", report.policy_count);
    let _ = writeln!(out, "alpha: {alpha}");
    let _ = writeln!(out, "optimal cvar: {:?}", report.optimal_cvar);
    let _ = writeln!(out, "optimal policy: {}", policy_text(mdp, &best.policy));
    let _ = writeln!(out, "optimal var: {:?}", best.var);
    for cap in &report.caps {
        let _ = writeln!(
            out,
            "cap {:?}: best capped mean {:?}, {} maximiser(s), {}",
            cap.cap,
            cap.best_capped,
            cap.argmax.len(),
            if cap.all_cvar_optimal { "all cvar-optimal" } else { "NOT all cvar-optimal" }
        );
        if let Some(i) = cap.offending {
            let _ = writeln!(out, "  offending policy: {}", policy_text(mdp, &report.values[i].policy));
        }
    }
    let _ = writeln!(out, "result: {}", if report.pass { "pass" } else { "fail" });
    Ok((report, out))
}
