mod common;

use common::oracles::run_discovery_oracles;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn discovery_matches_exhaustive_enumeration(seed in any::<u64>()) {
        if let Err(e) = run_discovery_oracles(seed, 1) {
            prop_assert!(false, "{}", e);
        }
    }
}
