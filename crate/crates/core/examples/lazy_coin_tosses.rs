//! Deciding Z > a for Z = -ln(U) from a handful of fair coin tosses.

use two_envelopes::lazy::{lazy_compare_threshold, BitStream, NegExpThreshold};

fn main() -> two_envelopes::Result<()> {
    for a in [0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
        let threshold = NegExpThreshold::new(a)?;
        let runs = 200_000u64;
        let mut exceeds = 0u64;
        let mut bits = 0u64;
        for i in 0..runs {
            let v = lazy_compare_threshold(&mut BitStream::seeded(7, i), &threshold)?;
            exceeds += v.z_exceeds_a as u64;
            bits += v.bits_used as u64;
        }
        println!(
            "a = {a:>4}: P(Z > a) ~ {:.5} (exp(-a) = {:.5}), mean tosses {:.3}",
            exceeds as f64 / runs as f64,
            (-a).exp(),
            bits as f64 / runs as f64
        );
    }
    Ok(())
}
