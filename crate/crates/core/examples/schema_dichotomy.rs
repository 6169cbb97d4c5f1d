//! What gets repeated decides the answer. Refilling around a fixed A gives
//! 5/4 x for the other envelope; re-dealing a fixed pair gives no swap gain.

use two_envelopes::simulate::{run_conditional_fill, run_fixed_pair};
use two_envelopes::Amount;

fn main() -> two_envelopes::Result<()> {
    let x = Amount::from(20);
    let n = 1_000_000;
    let cond = run_conditional_fill(&x, n, 42)?;
    println!(
        "conditional fill, A = 20: other envelope {:.4} +- {:.4} (exact mean of sample {})",
        cond.b.mean,
        cond.b.ci95_halfwidth,
        cond.b.exact_mean.as_ref().map(two_envelopes::rational::render).unwrap_or_default()
    );
    let fixed = run_fixed_pair(&x, n, 42)?;
    println!("fixed pair {{20, 40}}: swap gain {:.4} +- {:.4}", fixed.gain.mean, fixed.gain.ci95_halfwidth);
    println!("fixed pair {{20, 40}}: envelope content {:.4} +- {:.4}", fixed.a.mean, fixed.a.ci95_halfwidth);
    Ok(())
}
