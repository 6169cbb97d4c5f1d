//! Draw from the Broome prior, keep only the trials where A shows 4, and
//! compare with the exact posterior.

use two_envelopes::posterior::conditional_expectation;
use two_envelopes::prior::DiscretePrior;
use two_envelopes::simulate::run_prior_conditioned;
use two_envelopes::Amount;

fn main() -> two_envelopes::Result<()> {
    let prior = DiscretePrior::broome();
    let a = Amount::from(4);
    let exact = conditional_expectation(&prior, &a)?;
    let r = run_prior_conditioned(&prior, &a, 100_000, 42)?;
    println!("exact E[B|A=4] = {exact} = {:.4}", exact.to_f64());
    println!("simulated      = {:.4} +- {:.4}", r.b.mean, r.b.ci95_halfwidth);
    println!("kept {} of {} draws (rate {:.5}, exact 5/27 = {:.5})", r.n, r.attempts, r.acceptance_rate, 5.0 / 27.0);
    Ok(())
}
