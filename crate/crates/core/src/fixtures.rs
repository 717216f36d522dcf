// SPDX-License-Identifier: Apache-2.0

//! Circuits bundled with the crate.

/// 4-bit shift register with one data input and a buffered output.
pub const SR4: &str = include_str!("../fixtures/sr4.v");

/// 50 flip-flop LFSR + comparator design used for the scaled-down experiments.
pub const LFSR_CMP: &str = include_str!("../fixtures/lfsr_cmp.v");

pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "sr4" => Some(SR4),
        "lfsr_cmp" => Some(LFSR_CMP),
        _ => None,
    }
}
