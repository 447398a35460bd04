mod common;

use boa_core::bayesnet::{dump, learn_network, parse_dump, topological_order, Sampler};
use boa_core::rng::derive_stream;
use boa_core::{BitString, Metric, NetworkMode, ScoreParams};
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn learned_distributions_sum_to_one() {
    let mut rng = derive_stream(201, 0);
    for k in 0..40 {
        let n = 1 + k % 12;
        let net = random_learned_network(n, &mut rng);
        let mut total = 0.0;
        for bits in all_strings(n) {
            let p = net.joint_probability(&bits);
            assert!((p - brute_force_joint(&net, &bits)).abs() < 1e-12);
            total += p;
        }
        assert!((total - 1.0).abs() < 1e-9, "n={n}: {total}");
    }
}

#[test]
fn samples_follow_the_encoded_distribution() {
    let mut rng = derive_stream(202, 0);
    for k in 0..6 {
        let n = 1 + k % 4;
        let net = random_learned_network(n, &mut rng);
        let sampler = Sampler::new(&net).unwrap();
        let draws = 100_000;
        let mut hist = vec![0usize; 1 << n];
        for _ in 0..draws {
            let b = sampler.sample(&mut rng).unwrap();
            hist[(0..n).map(|i| (b.get(i) as usize) << i).sum::<usize>()] += 1;
        }
        let tv: f64 = all_strings(n)
            .enumerate()
            .map(|(k, bits)| (hist[k] as f64 / draws as f64 - brute_force_joint(&net, &bits)).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "n={n}: tv={tv}");
    }
}

#[test]
fn copy_data_gives_one_edge() {
    let mut rng = derive_stream(203, 0);
    for mode in [NetworkMode::Tree, NetworkMode::FullCpt] {
        let data: Vec<BitString> = (0..1000)
            .map(|_| {
                let mut b = BitString::random(2, &mut rng);
                b.set(1, b.get(0));
                b
            })
            .collect();
        let net = learn_network::<f64>(&data, &ScoreParams::new(Metric::BdePenalized, 1000), mode).unwrap();
        assert_eq!(net.edge_count(), 1, "{mode:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn learned_networks_are_acyclic_and_ordered(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = derive_stream(seed, 3);
        let net = random_learned_network(n, &mut rng);
        let order = topological_order(&net).unwrap();
        let mut pos = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        for (from, to) in net.edges() {
            prop_assert!(pos[from] < pos[to]);
            prop_assert!(!net.has_path(to, from));
        }
        for tree in net.trees() {
            tree.validate().unwrap();
        }
    }

    #[test]
    fn dumps_round_trip(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = derive_stream(seed, 4);
        let net = random_learned_network(n, &mut rng);
        let text = dump(&net);
        let back = parse_dump::<f64>(&text, n, net.mode()).unwrap();
        prop_assert_eq!(dump(&back), text);
        let bits = BitString::random(n, &mut rng);
        prop_assert_eq!(back.joint_probability(&bits), net.joint_probability(&bits));
    }

    #[test]
    fn leaf_counts_partition_the_data(seed in any::<u64>(), n in 1usize..9, rows in 1usize..200) {
        let mut rng = derive_stream(seed, 5);
        let data = correlated_data(n, rows, &mut rng);
        let metric = if rng.random() { Metric::Bic } else { Metric::BdePenalized };
        let net = learn_network::<f64>(&data, &ScoreParams::new(metric, rows), NetworkMode::Tree).unwrap();
        for tree in net.trees() {
            let total: u64 = tree.leaf_ids().iter().map(|&l| {
                let leaf = tree.leaf(l).unwrap();
                leaf.count0 + leaf.count1
            }).sum();
            prop_assert_eq!(total, rows as u64);
        }
    }
}
