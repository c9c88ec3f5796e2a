use fracdiff_core::forward::ObservationSeries;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::CliError;

/// h_j ← h_j (1 + level ξ_j), ξ_j standard normal from a ChaCha8 stream
/// seeded with `seed`. Level 0 returns the series untouched.
pub fn add_noise(
    series: &ObservationSeries,
    level: f64,
    seed: u64,
) -> Result<ObservationSeries, CliError> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(CliError::Config(format!(
            "noise.level: must be a finite nonnegative number, got {level}"
        )));
    }
    if level == 0.0 {
        return Ok(series.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = series
        .values()
        .iter()
        .map(|&h| {
            let xi: f64 = StandardNormal.sample(&mut rng);
            h * (1.0 + level * xi)
        })
        .collect();
    series
        .with_values(values)
        .map_err(|e| CliError::Solver(e.to_string()))
}
