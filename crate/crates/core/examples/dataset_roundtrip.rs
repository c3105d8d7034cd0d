//! Generate an offline dataset, save it, read it back and build the
//! informativeness set.

use prefbandit::harness::{draw_seed, ExperimentConfig};
use prefbandit::offline_data::read_dataset;
use prefbandit::theory::build_info_set;

fn main() -> prefbandit::Result<()> {
    let cfg = ExperimentConfig::default();
    let draw = draw_seed(&cfg, 0)?;
    let text = draw.d0.to_text(cfg.d);
    print!("{text}");
    let back = read_dataset(text.as_bytes())?.into_dataset(None)?;
    assert_eq!(back.tuples(), draw.d0.tuples());
    let u = build_info_set(&back, cfg.k);
    println!("U = {:?}, optimal arm {}", u.member_indices, draw.env.optimal_index());
    Ok(())
}
