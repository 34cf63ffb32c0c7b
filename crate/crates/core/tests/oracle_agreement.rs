use polarsec_core::channel::{Component, ObservationChannel};
use polarsec_core::math::entropy_from_llr;
use polarsec_core::oracle::enumerate_for_channel;
use polarsec_core::profile::{bec_bhattacharyya_profile, mc_entropy_profile_for};

fn bec(e: f64) -> ObservationChannel {
    ObservationChannel::new(vec![Component::Erasure(e)])
}

fn bsc(a: f64) -> ObservationChannel {
    ObservationChannel::new(vec![Component::Crossover(a)])
}

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[test]
fn erasure_recursion_equals_enumeration() {
    for n in [2, 4, 8] {
        for e in [0.1, 0.35, 0.5] {
            let exact = bec_bhattacharyya_profile(e, n).unwrap();
            let table = enumerate_for_channel(&bec(e), n).unwrap();
            for j in 0..n {
                assert!((exact.values()[j] - table.entropies[j]).abs() < 1e-10, "n={n} e={e} j={j}");
                assert!((exact.values()[j] - table.bhattacharyya[j]).abs() < 1e-10, "n={n} e={e} j={j}");
            }
        }
    }
}

#[test]
fn single_use_oracle_is_channel_entropy() {
    for a in [0.0, 0.05, 0.11, 0.5] {
        let t = enumerate_for_channel(&bsc(a), 1).unwrap();
        assert!((t.entropies[0] - h2(a)).abs() < 1e-12);
        assert!((t.bhattacharyya[0] - 2.0 * (a * (1.0 - a)).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn entropy_sums_to_block_entropy() {
    // Chain rule: the per-index entropies add up to n · H(X|Y).
    for n in [2, 4, 8] {
        for a in [0.05, 0.25] {
            let t = enumerate_for_channel(&bsc(a), n).unwrap();
            let total: f64 = t.entropies.iter().sum();
            assert!((total - n as f64 * h2(a)).abs() < 1e-10, "n={n} a={a}");
        }
    }
}

#[test]
fn monte_carlo_tracks_enumeration() {
    let trials = 20_000;
    for (i, ch) in [bec(0.35), bsc(0.1), bsc(0.25)].iter().enumerate() {
        let table = enumerate_for_channel(ch, 8).unwrap();
        let mc = mc_entropy_profile_for(ch, 8, trials, 11 + i as u64).unwrap();
        let se = mc.std_errors().unwrap();
        for (j, (&got, &want)) in mc.values().iter().zip(&table.entropies).enumerate() {
            let gap = (got - want).abs();
            assert!(gap <= 5.0 * se[j] + 1e-3, "channel {i} j={j}: gap {gap}, se {}", se[j]);
        }
    }
}

#[test]
fn llr_entropy_is_accurate_far_out() {
    // For LLR l, the posterior error is p = 1/(1+e^l); h and 1−h both stay
    // accurate when p is tiny.
    for l in [0.0f64, 0.5, 3.0, 20.0, 35.0] {
        let p = 1.0 / (1.0 + l.exp());
        let (h, c) = entropy_from_llr(l);
        assert!((h - h2(p)).abs() <= 1e-12 * h2(p).max(1e-300) + 1e-15, "l={l}");
        assert!((c - (1.0 - h2(p))).abs() < 1e-12, "l={l}");
    }
}
