//! The Broome prior is proper but each envelope has infinite expected
//! content: the partial means grow like (4/3)^N.

use two_envelopes::prior::BroomePrior;
use two_envelopes::rational::{decimal, render};
use two_envelopes::simulate::diverging_mean_diagnostic;

fn main() {
    let d = diverging_mean_diagnostic(&BroomePrior, 30);
    for r in d.rows.iter().step_by(5) {
        println!("N = {:>2}: {:>28} ~ {}", r.terms, render(&r.partial_mean), decimal(&r.partial_mean));
    }
    let bound = num_rational::BigRational::from_integer(1000.into());
    println!("first N above 1000: {:?}", d.first_exceeding(&bound));
}
