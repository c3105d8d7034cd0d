//! How many comparisons until every arm has shown up in the data.

use prefbandit::theory::{coupon_all_prob, expected_collection_time};

fn main() -> prefbandit::Result<()> {
    let uniform = vec![0.2; 5];
    let h5: f64 = (1..=5).map(|i| 1.0 / i as f64).sum();
    println!("E[T] uniform n=5: {:.6} (5·H5 = {:.6})", expected_collection_time(&uniform)?, 5.0 * h5);
    println!("E[T] skewed:      {:.6}", expected_collection_time(&[0.5, 0.2, 0.2, 0.05, 0.05])?);
    for draws in [5, 10, 20, 40] {
        println!("P(all 10 seen after {draws:>2} draws) = {:.6}", coupon_all_prob(10, draws)?);
    }
    Ok(())
}
