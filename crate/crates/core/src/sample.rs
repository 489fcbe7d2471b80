//! Seeded random configurations and rules for tests and experiments.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Configuration;
use crate::height::{Finite, NegInf, PosInf};
use crate::rule::{range_count, SaRule};
use crate::Height;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of random one-dimensional configurations.
#[derive(Clone, Debug)]
pub struct LineParams {
    pub max_core: usize,
    pub lo: i64,
    pub hi: i64,
    /// Probability that a cell is infinite.
    pub p_inf: f64,
    /// Allow different backgrounds on the two sides.
    pub split_background: bool,
}

impl Default for LineParams {
    fn default() -> Self {
        LineParams { max_core: 8, lo: -6, hi: 6, p_inf: 0.1, split_background: true }
    }
}

pub fn random_height<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, p_inf: f64) -> Height {
    if p_inf > 0.0 && rng.gen_bool(p_inf) {
        if rng.gen_bool(0.5) { PosInf } else { NegInf }
    } else {
        Finite(rng.gen_range(lo..=hi))
    }
}

pub fn random_line<R: Rng + ?Sized>(rng: &mut R, p: &LineParams) -> Configuration {
    let left = random_height(rng, p.lo, p.hi, p.p_inf);
    let right = if p.split_background { random_height(rng, p.lo, p.hi, p.p_inf) } else { left };
    let len = rng.gen_range(0..=p.max_core);
    let origin = rng.gen_range(-(len as i64) - 2..=2);
    let core = (0..len).map(|_| random_height(rng, p.lo, p.hi, p.p_inf)).collect();
    Configuration::line(left, right, origin, core)
}

/// Bounded configuration whose background is the minimum height.
pub fn random_bounded_line<R: Rng + ?Sized>(rng: &mut R, max_width: usize, lo: i64, hi: i64) -> Configuration {
    let len = rng.gen_range(1..=max_width);
    let core: Vec<i64> = (0..len).map(|_| rng.gen_range(lo..=hi)).collect();
    let min = *core.iter().min().expect("non-empty core");
    let origin = rng.gen_range(-(len as i64)..=0);
    Configuration::from_ints(min, origin, &core)
}

pub fn random_periodic<R: Rng + ?Sized>(rng: &mut R, max_period: usize, lo: i64, hi: i64, p_inf: f64) -> Configuration {
    let p = rng.gen_range(1..=max_period);
    let cells = (0..p).map(|_| random_height(rng, lo, hi, p_inf)).collect();
    Configuration::periodic(cells).expect("non-empty period")
}

pub fn random_plane<R: Rng + ?Sized>(rng: &mut R, max_side: usize, lo: i64, hi: i64, p_inf: f64) -> Configuration {
    let bg = random_height(rng, lo, hi, p_inf);
    let shape = [rng.gen_range(0..=max_side), rng.gen_range(0..=max_side)];
    let origin = [rng.gen_range(-(shape[0] as i64) - 1..=1), rng.gen_range(-(shape[1] as i64) - 1..=1)];
    let core = (0..shape[0] * shape[1]).map(|_| random_height(rng, lo, hi, p_inf)).collect();
    Configuration::plane(bg, origin, shape, core)
}

/// Uniformly random dense-table rule. Panics if the table is larger than 2^20.
pub fn random_table_rule<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: u32) -> SaRule {
    let count = range_count(radius, dim).filter(|&c| c <= 1 << 20).expect("table too large to sample");
    let r = radius as i32;
    let values = (0..count).map(|_| rng.gen_range(-r..=r)).collect();
    SaRule::table(dim, radius, values).expect("values in range")
}
