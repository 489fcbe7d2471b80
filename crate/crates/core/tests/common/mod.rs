#![allow(dead_code)]

use proptest::prelude::*;
use sandlab_core::config::Configuration;
use sandlab_core::height::{Finite, NegInf, PosInf};
use sandlab_core::Height;

pub fn height(lo: i64, hi: i64) -> impl Strategy<Value = Height> {
    prop_oneof![
        8 => (lo..=hi).prop_map(Finite),
        1 => Just(PosInf),
        1 => Just(NegInf),
    ]
}

pub fn bounded_height(lo: i64, hi: i64) -> impl Strategy<Value = Height> {
    (lo..=hi).prop_map(Finite)
}

pub fn line() -> impl Strategy<Value = Configuration> {
    (height(-6, 6), height(-6, 6), -6i64..6, prop::collection::vec(height(-6, 6), 0..8))
        .prop_map(|(l, r, o, core)| Configuration::line(l, r, o, core))
}

pub fn periodic() -> impl Strategy<Value = Configuration> {
    prop::collection::vec(height(-6, 6), 1..6).prop_map(|c| Configuration::periodic(c).unwrap())
}

pub fn plane() -> impl Strategy<Value = Configuration> {
    (height(-5, 5), -4i64..4, -4i64..4, 0usize..4, 0usize..4)
        .prop_flat_map(|(bg, a, b, w, h)| {
            prop::collection::vec(height(-5, 5), w * h)
                .prop_map(move |core| Configuration::plane(bg, [a, b], [w, h], core))
        })
}

pub fn any_config() -> impl Strategy<Value = Configuration> {
    prop_oneof![4 => line(), 1 => periodic(), 2 => plane()]
}

pub fn one_dim() -> impl Strategy<Value = Configuration> {
    prop_oneof![4 => line(), 1 => periodic()]
}

pub fn fig() -> Configuration {
    Configuration::from_ints(0, -3, &[5, -2, 1, 4, 2, 2, 5])
}
