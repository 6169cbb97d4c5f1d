//! The two switching rules side by side on a few priors, discrete and continuous.

use two_envelopes::posterior::{ContinuousReport, DiscreteReport};
use two_envelopes::prior::{ContinuousPrior, DiscretePrior};
use two_envelopes::rational::render;
use two_envelopes::Amount;

fn main() -> two_envelopes::Result<()> {
    let uniform = DiscretePrior::uniform([1u64, 2, 4, 8].map(Amount::from))?;
    let broome = DiscretePrior::broome();
    for (prior, observations) in [(&uniform, vec![1u64, 2, 8, 16]), (&broome, vec![1, 2, 64])] {
        println!("prior {}", prior.label());
        for a in observations {
            let r = DiscreteReport::compute(prior, &Amount::from(a))?;
            println!(
                "  a = {:>3}: split ({}, {}), E[B|A=a] = {}, expectation says {}, probability says {}",
                a,
                render(&r.p_up),
                render(&r.p_down),
                r.conditional_expectation,
                r.decide_expectation,
                r.decide_probability_of_larger
            );
        }
    }
    let exp = ContinuousPrior::exponential(1.0)?;
    println!("prior {}", exp.label());
    // The probability rule flips at 2 ln 2, the expectation rule at 4 ln 2.
    for a in [0.5, 2.0 * std::f64::consts::LN_2, 2.0, 4.0 * std::f64::consts::LN_2, 3.0] {
        let r = ContinuousReport::compute(&exp, a)?;
        println!(
            "  a = {:.4}: P(up) = {:.4}, E[B|A=a] = {:.4}, expectation says {}, probability says {}",
            a, r.p_up, r.conditional_expectation, r.decide_expectation, r.decide_probability_of_larger
        );
    }
    Ok(())
}
