//! Benchmark fixtures shared by the criterion targets.

use ganlab::numerics::SeededRng;

/// Paired real and latent samples of size `n` for the named model.
pub fn samples(model: &str, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let p = ganlab::families::model(model).expect("known model");
    let mut rng = SeededRng::new(seed);
    let xs = p.target.sample(&mut rng, n);
    let zs = p.noise.sample(&mut rng, n);
    (xs, zs)
}
