use clap::Args;
use embodied::env::derive_seed;
use embodied::games::{generate_level, LevelSpec};

use crate::CliError;

#[derive(Args)]
pub struct GenLevelsArgs {
    #[arg(long, default_value_t = 1)]
    pub difficulty: u8,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Level k is generated from a seed derived from (seed, k).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn gen_levels_cmd(args: &GenLevelsArgs) -> Result<(), CliError> {
    let spec = LevelSpec::for_difficulty(args.difficulty).map_err(|e| CliError::Usage(e.to_string()))?;
    for k in 0..args.count {
        let level = generate_level(derive_seed(args.seed, k), &spec).map_err(|e| CliError::Failed(e.to_string()))?;
        println!("; {k}");
        print!("{}", level.to_text());
        println!();
    }
    Ok(())
}
