//! Exact posteriors under the Broome prior: the other envelope is more
//! likely smaller, yet its expected content is 11/10 of what you see.

use two_envelopes::cli::broome_table;
use two_envelopes::rational::render;

fn main() -> two_envelopes::Result<()> {
    println!("{:>3} {:>6} {:>12} {:>6} {:>6} {:>10} {:>6}  by E      by P(larger)", "n", "a", "p(n)", "p_up", "p_down", "E[B|A]", "E/a");
    for row in broome_table(8)? {
        println!(
            "{:>3} {:>6} {:>12} {:>6} {:>6} {:>10} {:>6}  {:<8}{}",
            row.n,
            row.a.to_string(),
            render(&row.p_n),
            render(&row.p_up),
            render(&row.p_down),
            row.conditional_expectation.to_string(),
            render(&row.expectation_over_a),
            row.decide_expectation.to_string(),
            row.decide_probability_of_larger,
        );
    }
    Ok(())
}
