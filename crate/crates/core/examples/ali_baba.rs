//! Ali holds x; Baba's envelope is refilled with x/2 or 2x. Each side's
//! switching estimate is right on its own, but the two do not add up.

use two_envelopes::simulate::{alibaba_asymmetry, run_alibaba};
use two_envelopes::Amount;

fn main() -> two_envelopes::Result<()> {
    let x = Amount::from(100);
    let r = run_alibaba(&x, 1_000_000, 42)?;
    println!("Baba's content      {:.3} +- {:.3} (5/4 x = 125)", r.baba.mean, r.baba.ci95_halfwidth);
    println!("Ali / Baba          {:.4} +- {:.4} (5/4)", r.ali_over_baba.mean, r.ali_over_baba.ci95_halfwidth);
    let asym = alibaba_asymmetry(&x)?;
    for b in &asym.branches {
        println!(
            "Baba = {:>3}: contents sum {:>3}, estimates sum {:>6}",
            b.baba.to_string(),
            b.sum_of_contents.to_string(),
            b.sum_of_estimates.to_string()
        );
    }
    println!(
        "mean contents {} vs mean of the two estimates {}",
        asym.mean_sum_of_contents, asym.mean_sum_of_estimates
    );
    Ok(())
}
