//! How often the optimal arm drops out of the informativeness set, compared
//! with the analytic bounds.

use prefbandit::harness::{informativeness_setup, ExperimentConfig};
use prefbandit::rng::substream;
use prefbandit::theory::informativeness_check;

fn main() -> prefbandit::Result<()> {
    let setup = informativeness_setup(&ExperimentConfig::default())?;
    let r = informativeness_check(&setup, 1000, &mut substream(0, "informativeness"))?;
    println!("miss rate {:.4} vs f1 {:.4} ({})", r.empirical_miss_rate, r.f1, r.miss_within_bound);
    println!("mean |U|  {:.4} vs f2 {:.4} ({})", r.empirical_mean_card, r.f2, r.card_within_bound);
    Ok(())
}
