//! Exact policy enumeration on tiny finite-horizon MDPs.
//!
//! Policies act on the augmented state (time, state, return so far), so every
//! deterministic history-aware policy that matters for static CVaR is covered.
//!
//! File format (`retcap-tinymdp v1`), one directive or transition per line:
//!
//! ```text
//! retcap-tinymdp v1
//! actions a b            ; action names
//! initial s0
//! horizon 2              ; at most this many decisions
//! alpha 0.25             ; optional default risk level
//! s0 a 0.8 s1 1          ; state action probability next reward
//! ```
//!
//! A state with no transition rows is terminal. Every action must be defined
//! for every non-terminal state, with probabilities summing to one.

use crate::error::{Error, Result};
use crate::stats::{exact_var_cvar, ExactDistribution};
use rand::Rng;
use std::collections::HashMap;

/// Largest number of deterministic policies [`enumerate_policies`] will produce.
pub const POLICY_LIMIT: u64 = 1_000_000;
/// Tolerance for comparing objective values.
pub const TOLERANCE: f64 = 1e-9;
/// Running returns are identified on this grid when merging augmented states.
const RETURN_GRID: f64 = 1e-9;

pub const SUITE: [(&str, &str); 6] = [
    ("single_action", include_str!("../../data/oracle/single_action.tmdp")),
    ("three_arms", include_str!("../../data/oracle/three_arms.tmdp")),
    ("mini_betting_2", include_str!("../../data/oracle/mini_betting_2.tmdp")),
    ("mini_betting_3", include_str!("../../data/oracle/mini_betting_3.tmdp")),
    ("guarded_corridor", include_str!("../../data/oracle/guarded_corridor.tmdp")),
    ("recovery", include_str!("../../data/oracle/recovery.tmdp")),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub prob: f64,
    pub next: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TinyMdp {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub initial: usize,
    pub horizon: usize,
    pub alpha: Option<f64>,
    /// `transitions[state][action]`; empty for terminal states.
    transitions: Vec<Vec<Vec<Outcome>>>,
}

/// A reachable decision point: (time, state, return so far).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionState {
    pub time: usize,
    pub state: usize,
    pub running_return: f64,
}

type Key = (usize, usize, i64);

fn key(time: usize, state: usize, ret: f64) -> Key {
    (time, state, (ret / RETURN_GRID).round() as i64)
}

impl TinyMdp {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split(';').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "retcap-tinymdp v1")) => {}
            Some((n, l)) => return Err(Error::parse(n, format!("expected \"retcap-tinymdp v1\", found {l:?}"))),
            None => return Err(Error::parse(1, "empty file")),
        }
        let mut actions: Vec<String> = Vec::new();
        let mut states: Vec<String> = Vec::new();
        let mut initial = None;
        let mut horizon = None;
        let mut alpha = None;
        let mut rows: Vec<(usize, usize, usize, f64, usize, f64)> = Vec::new();
        let intern = |name: &str, states: &mut Vec<String>| match states.iter().position(|s| s == name) {
            Some(i) => i,
            None => {
                states.push(name.to_string());
                states.len() - 1
            }
        };
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["actions", names @ ..] if !names.is_empty() => {
                    if !actions.is_empty() {
                        return Err(Error::parse(n, "actions declared twice"));
                    }
                    actions = names.iter().map(|s| s.to_string()).collect();
                }
                ["initial", s] => initial = Some(intern(s, &mut states)),
                ["horizon", h] => {
                    let h: usize = h.parse().map_err(|_| Error::parse(n, format!("bad horizon {h:?}")))?;
                    if h == 0 {
                        return Err(Error::parse(n, "horizon must be at least 1"));
                    }
                    horizon = Some(h);
                }
                ["alpha", a] => {
                    let a: f64 = a.parse().map_err(|_| Error::parse(n, format!("bad alpha {a:?}")))?;
                    if !(a > 0.0 && a <= 1.0) {
                        return Err(Error::parse(n, format!("alpha must lie in (0, 1], got {a}")));
                    }
                    alpha = Some(a);
                }
                [s, a, p, next, r] => {
                    let action = actions
                        .iter()
                        .position(|x| x == a)
                        .ok_or_else(|| Error::parse(n, format!("undeclared action {a:?}")))?;
                    let p: f64 = p.parse().map_err(|_| Error::parse(n, format!("bad probability {p:?}")))?;
                    let r: f64 = r.parse().map_err(|_| Error::parse(n, format!("bad reward {r:?}")))?;
                    if !(0.0..=1.0).contains(&p) || !r.is_finite() {
                        return Err(Error::parse(n, "probability must lie in [0, 1] and reward must be finite"));
                    }
                    let s = intern(s, &mut states);
                    let next = intern(next, &mut states);
                    rows.push((n, s, action, p, next, r));
                }
                _ => return Err(Error::parse(n, format!("unrecognised line {line:?}"))),
            }
        }
        if actions.is_empty() {
            return Err(Error::parse(1, "missing actions line"));
        }
        let initial = initial.ok_or_else(|| Error::parse(1, "missing initial line"))?;
        let horizon = horizon.ok_or_else(|| Error::parse(1, "missing horizon line"))?;
        let mut transitions = vec![Vec::new(); states.len()];
        let mut last_line = vec![0; states.len()];
        for &(n, s, a, p, next, r) in &rows {
            if transitions[s].is_empty() {
                transitions[s] = vec![Vec::new(); actions.len()];
            }
            transitions[s][a].push(Outcome { prob: p, next, reward: r });
            last_line[s] = n;
        }
        for (s, per_action) in transitions.iter().enumerate() {
            for (a, outcomes) in per_action.iter().enumerate() {
                let total: f64 = outcomes.iter().map(|o| o.prob).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::parse(
                        last_line[s],
                        format!("probabilities of {} / {} sum to {total}", states[s], actions[a]),
                    ));
                }
            }
        }
        Ok(Self {
            states,
            actions,
            initial,
            horizon,
            alpha,
            transitions,
        })
    }

    pub fn is_terminal(&self, state: usize) -> bool {
        self.transitions[state].is_empty()
    }

    pub fn outcomes(&self, state: usize, action: usize) -> &[Outcome] {
        &self.transitions[state][action]
    }

    /// Reachable decision states in breadth-first order.
    pub fn decision_states(&self) -> Vec<DecisionState> {
        let mut seen: HashMap<Key, usize> = HashMap::new();
        let mut out = Vec::new();
        let start = DecisionState {
            time: 0,
            state: self.initial,
            running_return: 0.0,
        };
        if self.is_terminal(self.initial) {
            return out;
        }
        seen.insert(key(0, self.initial, 0.0), 0);
        out.push(start);
        let mut i = 0;
        while i < out.len() {
            let d = out[i];
            i += 1;
            if d.time + 1 >= self.horizon {
                continue;
            }
            for a in 0..self.actions.len() {
                for o in self.outcomes(d.state, a) {
                    if o.prob == 0.0 || self.is_terminal(o.next) {
                        continue;
                    }
                    let ret = d.running_return + o.reward;
                    let k = key(d.time + 1, o.next, ret);
                    if !seen.contains_key(&k) {
                        seen.insert(k, out.len());
                        out.push(DecisionState {
                            time: d.time + 1,
                            state: o.next,
                            running_return: ret,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn policy_count(&self) -> f64 {
        (self.actions.len() as f64).powi(self.decision_states().len() as i32)
    }

    fn index(&self) -> (Vec<DecisionState>, HashMap<Key, usize>) {
        let states = self.decision_states();
        let map = states
            .iter()
            .enumerate()
            .map(|(i, d)| (key(d.time, d.state, d.running_return), i))
            .collect();
        (states, map)
    }
}

/// Every deterministic policy, as one action index per decision state
/// (in [`TinyMdp::decision_states`] order).
pub fn enumerate_policies(mdp: &TinyMdp) -> Result<PolicyIter> {
    let n = mdp.decision_states().len();
    let count = mdp.policy_count();
    if count > POLICY_LIMIT as f64 {
        return Err(Error::EnumerationBound {
            count,
            limit: POLICY_LIMIT,
        });
    }
    Ok(PolicyIter {
        radix: mdp.actions.len(),
        current: Some(vec![0; n]),
    })
}

/// Mixed-radix counter over action assignments.
#[derive(Debug, Clone)]
pub struct PolicyIter {
    radix: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for PolicyIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == next.len() {
                self.current = None;
                break;
            }
            next[i] += 1;
            if next[i] < self.radix {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// Return distribution of a stochastic policy given as action probabilities
/// per decision state.
pub fn stochastic_return_distribution(mdp: &TinyMdp, policy: &[Vec<f64>]) -> Result<ExactDistribution> {
    let (states, map) = mdp.index();
    if policy.len() != states.len() || policy.iter().any(|p| p.len() != mdp.actions.len()) {
        return Err(Error::invalid(format!(
            "policy must give {} action probabilities for each of {} decision states",
            mdp.actions.len(),
            states.len()
        )));
    }
    let mut mass = vec![0.0; states.len()];
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    if states.is_empty() {
        return ExactDistribution::new(vec![(0.0, 1.0)]);
    }
    mass[0] = 1.0;
    // Decision states are in breadth-first order, so time never decreases.
    for (i, d) in states.iter().enumerate() {
        if mass[i] == 0.0 {
            continue;
        }
        for (a, &pa) in policy[i].iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for o in mdp.outcomes(d.state, a) {
                let p = mass[i] * pa * o.prob;
                if p == 0.0 {
                    continue;
                }
                let ret = d.running_return + o.reward;
                let ends = mdp.is_terminal(o.next) || d.time + 1 >= mdp.horizon;
                if ends {
                    atoms.push((ret, p));
                } else {
                    mass[map[&key(d.time + 1, o.next, ret)]] += p;
                }
            }
        }
    }
    ExactDistribution::new(atoms)
}

/// Return distribution of a deterministic policy.
pub fn exact_return_distribution(mdp: &TinyMdp, policy: &[usize]) -> Result<ExactDistribution> {
    let probs: Vec<Vec<f64>> = policy
        .iter()
        .map(|&a| {
            let mut p = vec![0.0; mdp.actions.len()];
            if let Some(slot) = p.get_mut(a) {
                *slot = 1.0;
            }
            p
        })
        .collect();
    if policy.iter().any(|&a| a >= mdp.actions.len()) {
        return Err(Error::invalid("policy uses an undeclared action"));
    }
    stochastic_return_distribution(mdp, &probs)
}

/// `E[min(R, cap)]`.
pub fn capped_expectation(dist: &ExactDistribution, cap: f64) -> f64 {
    dist.capped_mean(cap)
}

/// Samples episode returns of a deterministic policy.
pub fn sample_returns<R: Rng + ?Sized>(mdp: &TinyMdp, policy: &[usize], episodes: usize, rng: &mut R) -> Vec<f64> {
    let (_, map) = mdp.index();
    (0..episodes)
        .map(|_| {
            let (mut time, mut state, mut ret) = (0, mdp.initial, 0.0);
            while !mdp.is_terminal(state) && time < mdp.horizon {
                let a = policy[map[&key(time, state, ret)]];
                let u: f64 = rng.random();
                let outs = mdp.outcomes(state, a);
                let mut cum = 0.0;
                let mut pick = outs[outs.len() - 1];
                for o in outs {
                    cum += o.prob;
                    if u < cum {
                        pick = *o;
                        break;
                    }
                }
                ret += pick.reward;
                state = pick.next;
                time += 1;
            }
            ret
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyValue {
    pub policy: Vec<usize>,
    pub var: f64,
    pub cvar: f64,
    pub mean: f64,
    pub distribution: ExactDistribution,
}

/// Exact statistics of every deterministic policy.
pub fn evaluate_all(mdp: &TinyMdp, alpha: f64) -> Result<Vec<PolicyValue>> {
    enumerate_policies(mdp)?
        .map(|policy| {
            let distribution = exact_return_distribution(mdp, &policy)?;
            let (var, cvar) = exact_var_cvar(&distribution, alpha)?;
            Ok(PolicyValue {
                mean: distribution.mean(),
                policy,
                var,
                cvar,
                distribution,
            })
        })
        .collect()
}

/// Maximisers of the capped expectation at one cap.
#[derive(Debug, Clone, PartialEq)]
pub struct CapReport {
    pub cap: f64,
    pub best_capped: f64,
    /// Indices into the enumeration order.
    pub argmax: Vec<usize>,
    /// Whether every maximiser attains the optimal CVaR.
    pub all_cvar_optimal: bool,
    /// First maximiser that is not CVaR-optimal.
    pub offending: Option<usize>,
}

fn cap_report(values: &[PolicyValue], best_cvar: f64, cap: f64) -> CapReport {
    let capped: Vec<f64> = values.iter().map(|v| capped_expectation(&v.distribution, cap)).collect();
    let best_capped = capped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax: Vec<usize> = (0..values.len())
        .filter(|&i| capped[i] >= best_capped - TOLERANCE)
        .collect();
    let offending = argmax.iter().copied().find(|&i| values[i].cvar < best_cvar - TOLERANCE);
    CapReport {
        cap,
        best_capped,
        argmax,
        all_cvar_optimal: offending.is_none(),
        offending,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapOptimalityReport {
    pub pass: bool,
    pub policy_count: usize,
    pub optimal_cvar: f64,
    /// CVaR-optimal policies (indices into the enumeration order).
    pub optimal_set: Vec<usize>,
    /// One report per distinct VaR among the CVaR-optimal policies.
    pub caps: Vec<CapReport>,
    pub values: Vec<PolicyValue>,
}

impl CapOptimalityReport {
    pub fn optimal_policy(&self) -> &PolicyValue {
        &self.values[self.optimal_set[0]]
    }
}

/// Checks that capping returns at the VaR of a CVaR-optimal policy makes
/// every maximiser of the capped expectation CVaR-optimal.
pub fn verify_cap_optimality(mdp: &TinyMdp, alpha: f64) -> Result<CapOptimalityReport> {
    let values = evaluate_all(mdp, alpha)?;
    let optimal_cvar = values.iter().map(|v| v.cvar).fold(f64::NEG_INFINITY, f64::max);
    let optimal_set: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].cvar >= optimal_cvar - TOLERANCE)
        .collect();
    let mut var_levels: Vec<f64> = optimal_set.iter().map(|&i| values[i].var).collect();
    var_levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    var_levels.dedup_by(|a, b| (*a - *b).abs() <= TOLERANCE);
    let caps: Vec<CapReport> = var_levels
        .iter()
        .map(|&c| cap_report(&values, optimal_cvar, c))
        .collect();
    Ok(CapOptimalityReport {
        pass: caps.iter().all(|c| c.all_cvar_optimal),
        policy_count: values.len(),
        optimal_cvar,
        optimal_set,
        caps,
        values,
    })
}

/// Capped-expectation maximisers at an arbitrary cap, for sensitivity studies.
pub fn cap_sensitivity(mdp: &TinyMdp, alpha: f64, cap: f64) -> Result<CapReport> {
    let values = evaluate_all(mdp, alpha)?;
    let best = values.iter().map(|v| v.cvar).fold(f64::NEG_INFINITY, f64::max);
    Ok(cap_report(&values, best, cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn load(name: &str) -> TinyMdp {
        let text = SUITE.iter().find(|(n, _)| *n == name).unwrap().1;
        TinyMdp::parse(text).unwrap()
    }

    fn atoms(d: &ExactDistribution) -> Vec<(f64, f64)> {
        d.atoms().to_vec()
    }

    #[test]
    fn policy_counts() {
        assert_eq!(enumerate_policies(&load("three_arms")).unwrap().count(), 3);
        assert_eq!(enumerate_policies(&load("single_action")).unwrap().count(), 1);
        let two = TinyMdp::parse(
            "retcap-tinymdp v1\nactions a b\ninitial s\nhorizon 2\ns a 1 t 0\ns b 1 t 1\nt a 1 end 0\nt b 1 end 0\n",
        )
        .unwrap();
        assert_eq!(two.decision_states().len(), 2 + 1);
        let chain = TinyMdp::parse(
            "retcap-tinymdp v1\nactions a b\ninitial s\nhorizon 2\ns a 1 t 0\ns b 1 t 0\nt a 1 end 0\nt b 1 end 0\n",
        )
        .unwrap();
        assert_eq!(enumerate_policies(&chain).unwrap().count(), 4);
    }

    #[test]
    fn enumeration_is_exhaustive_and_distinct() {
        let mdp = load("mini_betting_3");
        let all: Vec<Vec<usize>> = enumerate_policies(&mdp).unwrap().collect();
        assert_eq!(all.len(), 64);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 64);
    }

    #[test]
    fn mini_betting_reachability() {
        let mdp = load("mini_betting_2");
        // (0,w1,0), (1,w1,0), (1,w2,1)
        assert_eq!(mdp.decision_states().len(), 3);
        assert_eq!(enumerate_policies(&mdp).unwrap().count(), 8);
        assert_eq!(load("mini_betting_3").decision_states().len(), 6);
    }

    #[test]
    fn betting_distributions() {
        let mdp = load("mini_betting_2");
        let zero = exact_return_distribution(&mdp, &[0, 0, 0]).unwrap();
        assert_eq!(atoms(&zero), vec![(0.0, 1.0)]);
        let all_in = exact_return_distribution(&mdp, &[1, 1, 1]).unwrap();
        let a = atoms(&all_in);
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].0, -1.0);
        assert!((a[0].1 - 0.36).abs() < 1e-12);
        assert_eq!(a[1].0, 3.0);
        assert!((a[1].1 - 0.64).abs() < 1e-12);
        let once = TinyMdp::parse(&SUITE[2].1.replace("horizon 2", "horizon 1")).unwrap();
        let d = exact_return_distribution(&once, &[1]).unwrap();
        let a = atoms(&d);
        assert_eq!((a[0].0, a[1].0), (-1.0, 1.0));
        assert!((a[0].1 - 0.2).abs() < 1e-12 && (a[1].1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn capped_expectation_examples() {
        let d = ExactDistribution::new(vec![(-1.0, 0.36), (3.0, 0.64)]).unwrap();
        assert!((capped_expectation(&d, 1.0) - 0.28).abs() < 1e-12);
        assert!((capped_expectation(&d, 10.0) - d.mean()).abs() < 1e-12);
        assert_eq!(capped_expectation(&d, -2.0), -2.0);
    }

    #[test]
    fn suite_passes() {
        for (name, text) in SUITE {
            let mdp = TinyMdp::parse(text).unwrap();
            let r = verify_cap_optimality(&mdp, mdp.alpha.unwrap()).unwrap();
            assert!(r.pass, "{name}: {:?}", r.caps);
            for v in &r.values {
                let total: f64 = v.distribution.atoms().iter().map(|a| a.1).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corridor_risk_neutral_and_cvar_optima_differ() {
        let mdp = load("guarded_corridor");
        let r = verify_cap_optimality(&mdp, 0.2).unwrap();
        let best_mean = r.values.iter().map(|v| v.mean).fold(f64::NEG_INFINITY, f64::max);
        let neutral: Vec<&PolicyValue> = r.values.iter().filter(|v| v.mean >= best_mean - 1e-9).collect();
        assert!((best_mean - 2.2).abs() < 1e-12);
        assert!(neutral.iter().all(|v| (v.cvar - -1.0).abs() < 1e-12));
        assert!((r.optimal_cvar - 1.0).abs() < 1e-12);
        // a cap far above the optimal VaR selects the risk-neutral route
        let loose = cap_sensitivity(&mdp, 0.2, r.caps[0].cap + 100.0).unwrap();
        assert!(!loose.all_cvar_optimal);
    }

    #[test]
    fn stochastic_policies_never_beat_deterministic_optimum() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (_, text) in SUITE {
            let mdp = TinyMdp::parse(text).unwrap();
            let alpha = mdp.alpha.unwrap();
            let r = verify_cap_optimality(&mdp, alpha).unwrap();
            let n = mdp.decision_states().len();
            for _ in 0..200 {
                let policy: Vec<Vec<f64>> = (0..n)
                    .map(|_| {
                        let raw: Vec<f64> = (0..mdp.actions.len()).map(|_| rng.random::<f64>()).collect();
                        let s: f64 = raw.iter().sum();
                        raw.iter().map(|x| x / s).collect()
                    })
                    .collect();
                let d = stochastic_return_distribution(&mdp, &policy).unwrap();
                let (_, cvar) = exact_var_cvar(&d, alpha).unwrap();
                assert!(cvar <= r.optimal_cvar + TOLERANCE);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_within_three_standard_errors() {
        use crate::stats::empirical_cvar;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (name, text) in SUITE {
            let mdp = TinyMdp::parse(text).unwrap();
            let alpha = mdp.alpha.unwrap();
            for v in evaluate_all(&mdp, alpha).unwrap().iter().take(8) {
                let n = 100_000;
                let samples = sample_returns(&mdp, &v.policy, n, &mut rng);
                let est = empirical_cvar(&samples, alpha).unwrap();
                // conservative standard error that also covers atoms sitting on the quantile
                let m = samples.iter().sum::<f64>() / n as f64;
                let var = samples.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / n as f64;
                let se = var.sqrt() / (alpha * (n as f64).sqrt());
                assert!((est - v.cvar).abs() <= 3.0 * se + 1e-12, "{name}: {est} vs {} (se {se})", v.cvar);
            }
        }
    }

    #[test]
    fn enumeration_bound() {
        let mut text = String::from("retcap-tinymdp v1\nactions a b c d\ninitial s0\nhorizon 12\n");
        for i in 0..12 {
            for a in ["a", "b", "c", "d"] {
                text.push_str(&format!("s{i} {a} 1 s{} {}\n", i + 1, if a == "a" { 1 } else { 0 }));
            }
        }
        let mdp = TinyMdp::parse(&text).unwrap();
        match enumerate_policies(&mdp) {
            Err(Error::EnumerationBound { count, limit }) => {
                assert!(count > limit as f64);
            }
            other => panic!("expected bound error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad_prob = "retcap-tinymdp v1\nactions a\ninitial s\nhorizon 1\ns a 0.5 t 1\n";
        assert!(matches!(TinyMdp::parse(bad_prob), Err(Error::Parse { line: 5, .. })));
        let bad_action = "retcap-tinymdp v1\nactions a\ninitial s\nhorizon 1\ns z 1 t 1\n";
        assert!(matches!(TinyMdp::parse(bad_action), Err(Error::Parse { line: 5, .. })));
        assert!(TinyMdp::parse("retcap-tinymdp v2\n").is_err());
        let missing = "retcap-tinymdp v1\nactions a b\ninitial s\nhorizon 1\ns a 1 t 1\n";
        assert!(TinyMdp::parse(missing).is_err());
    }
}
