mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(f: fn(&staircase::BchCode, &mut ChaCha8Rng) -> Result<String, String>, seeds: std::ops::Range<u64>) {
    let code = big_code();
    for seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Err(e) = f(&code, &mut rng) {
            panic!("seed {seed}: {e}");
        }
    }
}

#[test]
fn flip_onto_zero_syndrome_crossing_word_is_rejected() {
    run(scenario_zero_syndrome, 0..5);
}

#[test]
fn flip_onto_reliable_bit_is_rejected() {
    run(scenario_hrb, 0..5);
}

#[test]
fn failure_recovered_by_single_hub_flip() {
    run(scenario_case1, 0..20);
}

#[test]
fn weight_one_miscorrection_recovered_by_three_hub_flips() {
    run(scenario_case2, 0..5);
}

#[test]
fn rejected_recoveries_leave_window_untouched() {
    run(scenario_rejections_are_inert, 0..2);
}
