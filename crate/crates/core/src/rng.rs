//! Seeded random instances.
//!
//! Every random instance `i` of a run with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`. ChaCha is a
//! counter-based generator, so instances are independent of each other and
//! of evaluation order.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blockalg::{AlgebraElement, BlockAlgebra};
use crate::{CMat, CVec, C64};

pub type InstanceRng = ChaCha8Rng;

pub fn instance_rng(seed: u64, stream: u64) -> InstanceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex number with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_element(alg: &Arc<BlockAlgebra>, rng: &mut impl Rng) -> AlgebraElement {
    let blocks = alg
        .block_dims()
        .iter()
        .map(|&d| CMat::from_fn(d, d, |_, _| random_complex(rng)))
        .collect();
    alg.element(blocks).expect("shapes follow the algebra")
}

/// Unit vector of length `dim` with coordinate 0 zero (a unit vector of `H°`).
pub fn random_centered_unit(dim: usize, rng: &mut impl Rng) -> CVec {
    loop {
        let mut v = CVec::from_fn(dim, |_, _| random_complex(rng));
        v[0] = C64::new(0.0, 0.0);
        let n = v.norm();
        if n > 1e-3 {
            return v / C64::new(n, 0.0);
        }
    }
}
