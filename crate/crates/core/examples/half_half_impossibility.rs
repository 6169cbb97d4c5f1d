//! No proper prior makes every observation an even bet, and the uniform
//! prior over all powers of two is not a prior at all.

use two_envelopes::prior::{find_half_half_violation, DiscretePrior, ImproperDyadicUniform};
use two_envelopes::rational::render;
use two_envelopes::Amount;

fn main() -> two_envelopes::Result<()> {
    let priors = [
        DiscretePrior::point_mass(Amount::from(1))?,
        DiscretePrior::uniform([1u64, 2, 4].map(Amount::from))?,
        DiscretePrior::uniform((0..20).map(|k| Amount::from(1u64 << k)))?,
        DiscretePrior::broome(),
    ];
    for p in &priors {
        let w = find_half_half_violation(p)?;
        println!("{:<40} uneven at a = {:>7}: ({}, {})", p.label(), w.a.to_string(), render(&w.split.p_up), render(&w.split.p_down));
    }
    for weight in ["1/1000", "0"] {
        let u = ImproperDyadicUniform { weight: two_envelopes::rational::parse(weight)? };
        match u.check_proper() {
            Ok(p) => println!("uniform with weight {weight}: total mass {}", render(&p.total_mass)),
            Err(e) => println!("uniform with weight {weight}: {e}"),
        }
    }
    Ok(())
}
