use polarsec_core::bounds::{leakage_ub_nldls, pb_ub_nldls, phi_rate};
use polarsec_core::partition::{delta, partition_nldls, scaled_rates, set_size, CodeParameters, NldlsProfiles};
use polarsec_core::profile::bec_bhattacharyya_profile;
use polarsec_core::{BroadcastChannelSpec, Error, IndexPartition, Role};
use proptest::prelude::*;

/// Sorted channel chain `(y2, y1, z2, z1)` drawn from four cut points.
fn chain() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0f64..0.6).prop_map(|mut c| {
        c.sort_by(f64::total_cmp);
        c
    })
}

fn check_cover(p: &IndexPartition) {
    let n = p.len();
    let mut seen = vec![0u8; n];
    let msgs = (0..p.message_sizes().len()).flat_map(|m| p.message_indices(m));
    for j in msgs.chain(p.local_indices()).chain(p.common_indices()).chain(p.transition_indices()) {
        seen[j] += 1;
    }
    assert!(seen.iter().all(|&c| c == 1), "sets overlap or leave gaps");
    let cand = p.candidate_indices();
    for j in 0..n {
        let in_cand = cand.binary_search(&j).is_ok();
        assert_eq!(in_cand, !matches!(p.roles()[j], Role::Common), "index {j}");
    }
    for j in p.phi_indices() {
        assert!(!p.is_decoded(j) && p.roles()[j] != Role::Common);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nldls_partition_is_a_partition(
        c in chain(),
        log_n in 4u32..12,
        beta_r in 0.05f64..0.45,
        beta_s in 0.05f64..0.45,
        rho in 0.0f64..1.0,
    ) {
        let n = 1usize << log_n;
        let spec = BroadcastChannelSpec::erasure(vec![c[1], c[0]], vec![c[3], c[2]]).unwrap();
        let corner = polarsec_core::channel::secrecy_rates_nldls(&spec).unwrap();
        let rates = scaled_rates(&corner, rho);
        let y = bec_bhattacharyya_profile(c[1], n).unwrap();
        let z: Vec<_> = [c[3], c[2]].iter().map(|&e| bec_bhattacharyya_profile(e, n).unwrap()).collect();
        let params = CodeParameters::nldls(n, beta_r, beta_s, rates.clone()).unwrap();
        match partition_nldls(&NldlsProfiles { receiver: &y, eavesdroppers: &[&z[0], &z[1]] }, &params) {
            Ok(p) => {
                check_cover(&p);
                for (m, &r) in rates.iter().enumerate() {
                    prop_assert_eq!(p.message_indices(m).len(), set_size(n, r));
                }
                let pb = pb_ub_nldls(&p, &y).unwrap();
                prop_assert!(pb >= 0.0);
                for (m, zm) in z.iter().enumerate() {
                    let l = leakage_ub_nldls(&p, zm, m + 1).unwrap();
                    prop_assert!(l >= 0.0 && l <= n as f64);
                }
                prop_assert!((0.0..=1.0).contains(&phi_rate(&p)));
            }
            Err(Error::InfeasibleRate { needed, available, .. }) => prop_assert!(needed > available),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn degraded_profiles_are_ordered(a in 0.0f64..1.0, b in 0.0f64..1.0, log_n in 1u32..14) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let n = 1usize << log_n;
        let good = bec_bhattacharyya_profile(lo, n).unwrap();
        let bad = bec_bhattacharyya_profile(hi, n).unwrap();
        for j in 0..n {
            prop_assert!(good.values()[j] <= bad.values()[j] + 1e-12);
            prop_assert!(good.complements()[j] + 1e-12 >= bad.complements()[j]);
        }
    }

    #[test]
    fn bec_recursion_preserves_mean(e in 0.0f64..1.0, log_n in 0u32..14) {
        let n = 1usize << log_n;
        let p = bec_bhattacharyya_profile(e, n).unwrap();
        let mean = p.values().iter().sum::<f64>() / n as f64;
        let cmean = p.complements().iter().sum::<f64>() / n as f64;
        prop_assert!((mean - e).abs() < 1e-12);
        prop_assert!((cmean - (1.0 - e)).abs() < 1e-12);
    }
}

#[test]
fn delta_and_set_size() {
    assert_eq!(delta(1024, 0.0), 0.5);
    assert_eq!(delta(1 << 16, 0.25), 2f64.powi(-16));
    assert_eq!(set_size(1024, 0.15 * 0.9), 139);
    assert_eq!(set_size(1024, 0.0), 0);
}

#[test]
fn infeasible_rate_is_reported() {
    let n = 64;
    let y = bec_bhattacharyya_profile(0.5, n).unwrap();
    let z = bec_bhattacharyya_profile(0.6, n).unwrap();
    let params = CodeParameters::nldls(n, 0.3, 0.3, vec![0.9]).unwrap();
    let err = partition_nldls(&NldlsProfiles { receiver: &y, eavesdroppers: &[&z] }, &params).unwrap_err();
    assert!(matches!(err, Error::InfeasibleRate { .. }), "{err}");
}
