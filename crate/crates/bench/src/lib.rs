//! Shared fixtures for the benchmarks.

use lasvm_core::synth::{generate, SynthData};
use lasvm_core::SynthSpec;

/// Two-class synthetic data with 4 informative and 37 noise columns, the
/// same width as a KDD'99 record.
pub fn kdd_shaped(samples: usize, seed: u64) -> SynthData {
    generate(&SynthSpec {
        samples,
        informative: 4,
        noise: 37,
        seed,
        ..Default::default()
    })
    .expect("valid synthetic spec")
}
