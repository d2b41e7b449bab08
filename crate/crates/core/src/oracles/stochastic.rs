use std::collections::HashMap;

use super::{check_cap, OracleLimits};
use crate::error::Result;
use crate::scalar::Reward;
use crate::stoch::{exact_policy_value, StochOrientInstance};

/// Hard vertex cap for the non-adaptive enumeration.
pub const NONADAPTIVE_MAX_N: usize = 6;
/// Caps for the adaptive DP.
pub const ADAPTIVE_MAX_N: usize = 4;
pub const ADAPTIVE_MAX_SUPPORT: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct NonAdaptiveOptimum<F> {
    pub order: Vec<usize>,
    pub value: F,
}

fn check_budget<F>(instance: &StochOrientInstance<F>, limits: &OracleLimits) -> Result<()> {
    check_cap("budget", instance.budget.max(0) as usize, limits.max_state_budget.max(0) as usize)
}

/// Best fixed visiting order, by enumerating every ordered subset of jobs.
pub fn oracle_nonadaptive_stoch<F: Reward>(
    instance: &StochOrientInstance<F>,
    limits: &OracleLimits,
) -> Result<NonAdaptiveOptimum<F>> {
    let n = instance.space.len();
    check_cap("vertex count", n, NONADAPTIVE_MAX_N)?;
    check_budget(instance, limits)?;
    instance.check_feasible()?;

    fn go<F: Reward>(
        instance: &StochOrientInstance<F>,
        order: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut NonAdaptiveOptimum<F>,
    ) -> Result<()> {
        let value = exact_policy_value(instance, order)?;
        if value > best.value {
            *best = NonAdaptiveOptimum { order: order.clone(), value };
        }
        for v in 0..used.len() {
            if used[v] {
                continue;
            }
            used[v] = true;
            order.push(v);
            go(instance, order, used, best)?;
            order.pop();
            used[v] = false;
        }
        Ok(())
    }

    let mut best = NonAdaptiveOptimum { order: Vec::new(), value: F::zero() };
    go(instance, &mut Vec::new(), &mut vec![false; n], &mut best)?;
    Ok(best)
}

/// Optimal adaptive expected reward: after each job finishes, the policy sees
/// the clock and chooses the next job (or stops).
pub fn oracle_adaptive_stoch<F: Reward>(instance: &StochOrientInstance<F>, limits: &OracleLimits) -> Result<F> {
    let n = instance.space.len();
    check_cap("vertex count", n, ADAPTIVE_MAX_N)?;
    let widest = instance.sizes.iter().map(|d| d.support().len()).max().unwrap_or(0);
    check_cap("support size", widest, ADAPTIVE_MAX_SUPPORT)?;
    check_budget(instance, limits)?;
    instance.check_feasible()?;

    struct Dp<'a, F> {
        instance: &'a StochOrientInstance<F>,
        memo: HashMap<(usize, u32, i64), F>,
    }

    impl<F: Reward> Dp<'_, F> {
        fn value(&mut self, at: usize, done: u32, clock: i64) -> F {
            if let Some(v) = self.memo.get(&(at, done, clock)) {
                return v.clone();
            }
            let inst = self.instance;
            let budget = inst.budget;
            let mut best = F::zero();
            for j in 0..inst.space.len() {
                if done & (1 << j) != 0 {
                    continue;
                }
                let arrive = clock + inst.space.dist(at, j);
                if arrive > budget {
                    continue;
                }
                let mut total = F::zero();
                for (size, p) in inst.sizes[j].support() {
                    let finish = arrive + size;
                    let mut gain = F::zero();
                    if finish + inst.space.dist(j, inst.terminal) <= budget {
                        gain = inst.rewards[j].clone();
                    }
                    if finish <= budget {
                        gain = gain + self.value(j, done | 1 << j, finish);
                    }
                    total = total + p.clone() * gain;
                }
                if total > best {
                    best = total;
                }
            }
            self.memo.insert((at, done, clock), best.clone());
            best
        }
    }

    let mut dp = Dp { instance, memo: HashMap::new() };
    Ok(dp.value(instance.start, 0, 0))
}
