use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retcap_core::oracle::{
    capped_expectation, enumerate_policies, exact_return_distribution, sample_returns, verify_cap_optimality, TinyMdp,
    SUITE,
};
use retcap_core::stats::{empirical_cvar, exact_var_cvar};
use std::collections::{HashSet, VecDeque};

/// Independent reachability count: walk (time, state, return) triples.
fn bfs_count(mdp: &TinyMdp) -> usize {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    if !mdp.is_terminal(mdp.initial) {
        queue.push_back((0usize, mdp.initial, 0i64));
    }
    while let Some((t, s, r)) = queue.pop_front() {
        if !seen.insert((t, s, r)) || t + 1 >= mdp.horizon {
            continue;
        }
        for a in 0..mdp.actions.len() {
            for o in mdp.outcomes(s, a) {
                if o.prob > 0.0 && !mdp.is_terminal(o.next) {
                    queue.push_back((t + 1, o.next, r + (o.reward * 1e6).round() as i64));
                }
            }
        }
    }
    seen.len()
}

#[test]
fn counts_agree_with_reachability() {
    for (name, text) in SUITE {
        let mdp = TinyMdp::parse(text).unwrap();
        let states = bfs_count(&mdp);
        let policies = enumerate_policies(&mdp).unwrap().count();
        assert_eq!(policies, mdp.actions.len().pow(states as u32), "{name}");
    }
}

#[test]
fn every_distribution_is_normalised_and_monte_carlo_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mdp = TinyMdp::parse(SUITE.iter().find(|s| s.0 == "recovery").unwrap().1).unwrap();
    let alpha = mdp.alpha.unwrap();
    for policy in enumerate_policies(&mdp).unwrap() {
        let d = exact_return_distribution(&mdp, &policy).unwrap();
        let mass: f64 = d.atoms().iter().map(|a| a.1).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        let (_, cvar) = exact_var_cvar(&d, alpha).unwrap();
        let samples = sample_returns(&mdp, &policy, 100_000, &mut rng);
        let n = samples.len() as f64;
        let m = samples.iter().sum::<f64>() / n;
        let sd = (samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).sqrt();
        let est = empirical_cvar(&samples, alpha).unwrap();
        assert!((est - cvar).abs() <= 3.0 * sd / (alpha * n.sqrt()) + 1e-12, "{policy:?}: {est} vs {cvar}");
    }
}

#[test]
fn mini_betting_two_rounds() {
    let mdp = TinyMdp::parse(SUITE.iter().find(|s| s.0 == "mini_betting_2").unwrap().1).unwrap();
    let d = exact_return_distribution(&mdp, &[1, 1, 1]).unwrap();
    assert!((capped_expectation(&d, 1.0) - 0.28).abs() < 1e-12);
    let r = verify_cap_optimality(&mdp, 0.25).unwrap();
    assert!(r.pass);
    assert_eq!(r.policy_count, 8);
}
