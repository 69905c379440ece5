//! Phase planning: how many program rounds to fast-forward per gather.
//!
//! A phase of length `l` lets ball simulation replace `l` communication
//! rounds with one gather + local work, at the price of balls of radius
//! about `l`. The planners pick `l` from the activity growth factor `alpha`
//! promised by the program, the graph size, and the machine exponent
//! `epsilon`, so that a ball of the predicted size fits one machine.

use crate::congest::EngineError;
use crate::Round;

/// Who owns a ball in a phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CenterRule {
    /// Every non-halted node gathers its own ball.
    AllActive,
    /// Nodes whose degree exceeds the threshold, plus every marked node,
    /// gather balls with one extra hop of radius; other nodes are adopted
    /// into a neighboring center's ball or, with no marked neighbor in
    /// reach, evolve with provably empty inboxes.
    DegreeAbove(f64),
}

#[derive(Clone, Copy, Debug)]
pub struct PhasePlan {
    /// First program round of the phase (1-based).
    pub start: Round,
    /// Rounds the phase advances.
    pub len: Round,
    /// Per-round activity growth factor used in the ball-size bound.
    pub alpha: f64,
    /// Degree-ordered stage this phase belongs to (1-based; 0 = unstaged).
    pub stage: u32,
    pub center_rule: CenterRule,
}

impl PhasePlan {
    /// Ball radius: adopted-node coverage needs one extra hop.
    pub fn radius(&self) -> u32 {
        match self.center_rule {
            CenterRule::AllActive => self.len,
            CenterRule::DegreeAbove(_) => self.len + 1,
        }
    }
}

fn check_common(alpha: f64, n: usize, eps: f64) -> Result<(), EngineError> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(EngineError::Plan(format!("growth factor alpha must exceed 1, got {alpha}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(EngineError::Plan(format!("epsilon must be in (0, 1], got {eps}")));
    }
    if n < 2 {
        return Err(EngineError::Plan(format!("need at least 2 nodes, got {n}")));
    }
    Ok(())
}

/// Phase length for uniform (unstaged) compression:
/// `max(1, floor(sqrt((eps/8) * log_alpha n)))`.
pub fn phase_len_v1(alpha: f64, n: usize, eps: f64) -> Round {
    let log_alpha_n = (n as f64).ln() / alpha.ln();
    let l = ((eps / 8.0) * log_alpha_n).sqrt().floor();
    (l as Round).max(1)
}

/// Chops `r_total` rounds into uniform phases of `phase_len_v1` (the last
/// one shorter if needed), every non-halted node a center.
pub fn plan_phases_v1(
    r_total: Round,
    alpha: f64,
    n: usize,
    eps: f64,
) -> Result<Vec<PhasePlan>, EngineError> {
    check_common(alpha, n, eps)?;
    let l = phase_len_v1(alpha, n, eps);
    Ok(chop(1, r_total, l, alpha, 0, CenterRule::AllActive))
}

fn chop(
    first: Round,
    total: Round,
    l: Round,
    alpha: f64,
    stage: u32,
    center_rule: CenterRule,
) -> Vec<PhasePlan> {
    let mut plans = Vec::new();
    let mut start = first;
    let end = first + total;
    while start < end {
        let len = l.min(end - start);
        plans.push(PhasePlan { start, len, alpha, stage, center_rule });
        start += len;
    }
    plans
}

/// Splits `total` rounds into at most `max_stages` spans, each at most half
/// the previous, first span absorbing the remainder. Every span length is
/// positive; fewer stages are returned when `total` is small.
pub fn halving_partition(total: Round, max_stages: u32) -> Vec<Round> {
    assert!(total >= 1);
    // largest s with 2^s - 1 <= total
    let mut s = max_stages.max(1);
    while s > 1 && (1u64 << s) - 1 > u64::from(total) {
        s -= 1;
    }
    let unit = total / ((1 << s) - 1);
    let mut spans: Vec<Round> = (0..s).map(|i| unit << (s - 1 - i)).collect();
    let used: Round = spans.iter().sum();
    spans[0] += total - used;
    spans
}

/// Staged planner for the degree-ordered engine. `stage_rounds[i]` is the
/// round span of stage `i+1` and must be at most half the previous span.
/// Stage `i` centers are nodes of degree above `delta^(1/2^i)`; its phase
/// length uses the uniform formula while that threshold is at least
/// `n^(eps/2)`, and otherwise a tighter ball budget of
/// `max(1, floor(sqrt(log_{alpha'}(delta^(1/2^(i+1))) / 2)))` with
/// `alpha' = alpha * log2(n)^2`.
pub fn plan_phases_v2(
    stage_rounds: &[Round],
    alpha: f64,
    delta: u32,
    n: usize,
    eps: f64,
) -> Result<Vec<PhasePlan>, EngineError> {
    check_common(alpha, n, eps)?;
    if stage_rounds.is_empty() {
        return Ok(Vec::new());
    }
    for (i, &r) in stage_rounds.iter().enumerate() {
        if r == 0 {
            return Err(EngineError::Plan(format!("stage {} has zero rounds", i + 1)));
        }
        if i > 0 && 2 * r > stage_rounds[i - 1] + 1 {
            return Err(EngineError::Plan(format!(
                "stage spans must halve: stage {} has {} rounds after {}",
                i + 1,
                r,
                stage_rounds[i - 1]
            )));
        }
    }
    let delta = f64::from(delta.max(1));
    let lg = (n as f64).log2();
    let mut plans = Vec::new();
    let mut start: Round = 1;
    for (idx, &rounds) in stage_rounds.iter().enumerate() {
        let stage = (idx + 1) as u32;
        let threshold = delta.powf(1.0 / f64::from(1u32 << stage));
        let l = if threshold >= (n as f64).powf(eps / 2.0) {
            phase_len_v1(alpha, n, eps)
        } else {
            let alpha_prime = alpha * lg * lg;
            let next_threshold = delta.powf(1.0 / f64::from(1u32 << (stage + 1)));
            let budget = next_threshold.max(2.0).ln() / alpha_prime.ln();
            (((budget / 2.0).sqrt().floor()) as Round).max(1)
        };
        plans.extend(chop(start, rounds, l, alpha, stage, CenterRule::DegreeAbove(threshold)));
        start += rounds;
    }
    Ok(plans)
}

/// Overrides every planned phase length with a fixed target, re-chopping
/// each stage span. Used by the `--force-ell` knob.
pub fn force_phase_len(plans: &[PhasePlan], l: Round) -> Vec<PhasePlan> {
    assert!(l >= 1);
    let mut out = Vec::new();
    let mut i = 0;
    while i < plans.len() {
        // find the contiguous run with the same stage
        let stage = plans[i].stage;
        let rule = plans[i].center_rule;
        let alpha = plans[i].alpha;
        let first = plans[i].start;
        let mut total = 0;
        while i < plans.len() && plans[i].stage == stage {
            total += plans[i].len;
            i += 1;
        }
        out.extend(chop(first, total, l, alpha, stage, rule));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_phase_length_examples() {
        // eps/8 * log2(n) = 0.0625 * 32 = 2, sqrt = 1.41 -> 1
        assert_eq!(phase_len_v1(2.0, 1usize << 32, 0.5), 1);
        // 0.1 * 40 = 4, sqrt = 2
        assert_eq!(phase_len_v1(2.0, 1usize << 40, 0.8), 2);
        // tiny budget clamps to 1
        assert_eq!(phase_len_v1(2.0, 1usize << 10, 0.5), 1);
    }

    #[test]
    fn uniform_plans_cover_rounds_exactly_once() {
        let plans = plan_phases_v1(32, 2.0, 1usize << 32, 0.5).unwrap();
        assert_eq!(plans.len(), 32);
        let plans = plan_phases_v1(10, 2.0, 1usize << 40, 0.8).unwrap();
        assert_eq!(plans.len(), 5);
        assert!(plans.iter().all(|p| p.len == 2));
        let mut next = 1;
        for p in &plans {
            assert_eq!(p.start, next);
            assert_eq!(p.center_rule, CenterRule::AllActive);
            assert_eq!(p.radius(), p.len);
            next += p.len;
        }
        assert_eq!(next, 11);
        // 5 rounds at l=1: five singleton phases
        let plans = plan_phases_v1(5, 2.0, 1usize << 10, 0.5).unwrap();
        assert_eq!(plans.len(), 5);
    }

    #[test]
    fn halving_partition_examples() {
        assert_eq!(halving_partition(33, 3), vec![21, 8, 4]);
        assert_eq!(halving_partition(7, 3), vec![4, 2, 1]);
        assert_eq!(halving_partition(1, 3), vec![1]);
        assert_eq!(halving_partition(2, 3), vec![2]);
        assert_eq!(halving_partition(100, 2), vec![67, 33]);
        for total in 1..200u32 {
            for stages in 1..5u32 {
                let spans = halving_partition(total, stages);
                assert_eq!(spans.iter().sum::<u32>(), total);
                assert!(spans.iter().all(|&s| s >= 1));
                for w in spans.windows(2) {
                    assert!(2 * w[1] <= w[0] + 1, "{spans:?}");
                }
            }
        }
    }

    #[test]
    fn staged_planner_validates_halving() {
        let err = plan_phases_v2(&[10, 6], 2.0, 1 << 16, 1 << 16, 0.5).unwrap_err();
        assert!(err.to_string().contains("halve"));
        assert!(plan_phases_v2(&[10, 5], 2.0, 1 << 16, 1 << 16, 0.5).is_ok());
    }

    #[test]
    fn staged_planner_switches_cases_by_threshold() {
        // delta = 2^16, n = 2^16, eps = 0.5: thresholds 2^8, 2^4, 2^2 vs
        // n^(eps/2) = 16. Stages 1-2 use the uniform formula, stage 3 the
        // tighter budget (which also clamps to 1 here).
        let plans = plan_phases_v2(&[16, 8, 4], 2.0, 1 << 16, 1 << 16, 0.5).unwrap();
        let stage_of: Vec<u32> = plans.iter().map(|p| p.stage).collect();
        assert!(stage_of.windows(2).all(|w| w[0] <= w[1]));
        let covered: u32 = plans.iter().map(|p| p.len).sum();
        assert_eq!(covered, 28);
        for p in &plans {
            match p.center_rule {
                CenterRule::DegreeAbove(t) => {
                    let want = f64::from(1u32 << 16).powf(1.0 / f64::from(1u32 << p.stage));
                    assert!((t - want).abs() < 1e-9);
                }
                CenterRule::AllActive => panic!("staged plans gate centers by degree"),
            }
            assert_eq!(p.radius(), p.len + 1);
        }
    }

    #[test]
    fn forcing_phase_length_rechops() {
        let plans = plan_phases_v1(10, 2.0, 1usize << 40, 0.8).unwrap();
        assert!(plans.iter().all(|p| p.len == 2));
        let forced = force_phase_len(&plans, 3);
        let lens: Vec<Round> = forced.iter().map(|p| p.len).collect();
        assert_eq!(lens, vec![3, 3, 3, 1]);
        let starts: Vec<Round> = forced.iter().map(|p| p.start).collect();
        assert_eq!(starts, vec![1, 4, 7, 10]);
    }
}
