use super::{Diagnostics, Policy, PolicyDecision};
use crate::cvar::c_star;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::stats::RngStream;

/// Plays an arm chosen uniformly at random every round. A harness sanity
/// baseline; its flag is the plug-in test with sample mean and sample std.
pub struct UniformRandom {
    sums: Vec<(u64, f64, f64)>,
    alpha: f64,
    tau: f64,
}

impl UniformRandom {
    pub fn new(instance: &Instance) -> Self {
        Self { sums: vec![(0, 0.0, 0.0); instance.num_arms()], alpha: instance.alpha(), tau: instance.tau() }
    }
}

impl Policy for UniformRandom {
    fn name(&self) -> &str {
        "Uniform"
    }

    fn select(&mut self, _round: usize, rng: &mut RngStream) -> Result<PolicyDecision> {
        let k = self.sums.len() as u64;
        // Rejection sampling keeps the choice exactly uniform.
        let zone = u64::MAX - u64::MAX % k;
        let arm = loop {
            let x = rng.next_u64();
            if x < zone {
                break (x % k) as usize;
            }
        };
        Ok(PolicyDecision { arm, sampled_feasible_set: Vec::new(), diagnostics: Diagnostics::None })
    }

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()> {
        if !loss.is_finite() {
            return Err(Error::Input(format!("observed loss {loss} is not finite")));
        }
        let s = self.sums.get_mut(arm).ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?;
        s.0 += 1;
        s.1 += loss;
        s.2 += loss * loss;
        Ok(())
    }

    fn feasibility_flag(&mut self, _horizon: usize, _rng: &mut RngStream) -> Result<bool> {
        let cs = c_star(self.alpha)?;
        let w = self.alpha / (1.0 - self.alpha);
        Ok(self.sums.iter().filter(|s| s.0 > 0).any(|&(n, sum, sq)| {
            let n = n as f64;
            let mean = sum / n;
            let var = if n > 1.0 { ((sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
            mean * w + var.sqrt() * cs <= self.tau
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::simulate;
    use crate::presets::Preset;

    #[test]
    fn spreads_pulls_evenly() {
        let inst = Preset::FeasibleHighVar.instance();
        let rec = simulate(&mut UniformRandom::new(&inst), &inst, 15_015, &mut RngStream::new(1)).unwrap();
        // Each arm: 1 warm-up pull plus Binomial(15000, 1/15), std ≈ 30.6.
        for &c in &rec.pull_counts {
            assert!((c as f64 - 1001.0).abs() < 5.0 * 30.6, "{c}");
        }
        assert!(rec.flag);
    }
}
