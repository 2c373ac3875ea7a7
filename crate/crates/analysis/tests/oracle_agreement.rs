//! The zone engine and the integer-time oracle agree on reachability for
//! random small networks with closed clock constraints, and every
//! reachable answer comes with a concrete trace that replays.

mod common;

use common::networks::{agree, random_network};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn engine_agrees_with_oracle_on_random_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut checked, mut reachable) = (0, 0);
    for round in 0..200 {
        let net = random_network(&mut rng);
        match agree(&net) {
            Ok(r) => reachable += r as usize,
            Err(e) => panic!("round {round}: {e}\n{}", net.source),
        }
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} networks checked");
    assert!(
        reachable > 0 && reachable < checked,
        "{reachable} of {checked} reachable"
    );
}
