use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the cell `(size_index, run)` of `problem` under `seed`.
/// Cells are independent, so adding sizes or runs leaves others unchanged.
pub fn substream_seed(seed: u64, problem: &str, size_index: u64, run: u64) -> u64 {
    let mut h = splitmix64(seed);
    for byte in problem.bytes() {
        h = splitmix64(h ^ u64::from(byte));
    }
    h = splitmix64(h ^ size_index);
    splitmix64(h ^ run.rotate_left(32))
}

pub fn cell_rng(seed: u64, problem: &str, size_index: u64, run: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, problem, size_index, run))
}
