//! Against any fixed threshold law the arranger can push the edge below any
//! epsilon by moving the pair outwards, so no strategy guarantees a uniform edge.

use two_envelopes::game::{cover_vs_arranger, exact_win_value, shift_adversary_report, ArrangerStrategy, PlayerStrategy};
use two_envelopes::cover::Probe;
use two_envelopes::rational::render;
use two_envelopes::Amount;

fn main() -> two_envelopes::Result<()> {
    let arranger = ArrangerStrategy::uniform([1u64, 2, 4].map(Amount::from))?;
    for (name, player) in [
        ("always switch", PlayerStrategy::always_switch()),
        ("never switch", PlayerStrategy::never_switch()),
        ("switch on 1 only", PlayerStrategy::from_json(r#"{"q":{"1":"1"},"default_q":"0"}"#)?),
    ] {
        println!("{name:>16}: {}", render(&exact_win_value(&arranger, &player)));
    }
    let probe = Probe::default();
    println!("threshold strategy vs the same arranger: {:.5}", cover_vs_arranger(&arranger, &probe)?);
    for eps in [0.1, 0.01, 1e-3, 1e-6, 1e-12] {
        let r = shift_adversary_report(&probe, eps)?;
        println!("epsilon {eps:>6e}: pair ({:.4}, {:.4}) leaves edge {:.3e}", r.k, 2.0 * r.k, r.advantage);
    }
    Ok(())
}
