//! Switch iff a private exponential threshold exceeds what A shows. The win
//! rate beats 1/2 on every pair, by an amount that fades as the pair moves out.

use two_envelopes::cover::{estimate_win_rate, win_advantage, Probe};

fn main() -> two_envelopes::Result<()> {
    let probe = Probe::default();
    let pairs = [(1.0, 2.0), (0.5, 4.0), (5.0, 10.0), (100.0, 200.0)];
    println!("{:>6} {:>6} {:>9} {:>9} {:>8}  strata (below, between, above)", "a", "b", "exact", "simulated", "ci95");
    for e in estimate_win_rate(&pairs, &probe, 1_000_000, 42)? {
        let strata: Vec<String> = e
            .strata
            .iter()
            .map(|s| if s.n == 0 { "-".into() } else { format!("{:.4}", s.mean) })
            .collect();
        println!(
            "{:>6} {:>6} {:>9.5} {:>9.5} {:>8.5}  ({})",
            e.a,
            e.b,
            e.exact_p,
            e.win.mean,
            e.win.ci95_halfwidth,
            strata.join(", ")
        );
    }
    let edge = win_advantage(100.0, 200.0, &probe)?;
    println!("edge at (100, 200): {edge:e}, invisible at this sample size");
    Ok(())
}
