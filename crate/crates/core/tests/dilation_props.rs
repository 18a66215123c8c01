use gmnl::dilation::{dilate_party_in_strategy, dilate_povm, trine_povm};
use gmnl::linalg::{dot, random_povm, random_state, CMat};
use gmnl::quantum::{behavior_from_strategy, build_theorem1_strategy, Matrix, Povm};
use gmnl::Backend;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_entry_diff(a: &gmnl::Behavior, b: &gmnl::Behavior) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x.to_f64() - y.to_f64()).abs()).fold(0.0, f64::max)
}

#[test]
fn projective_party_passes_through() {
    let s = build_theorem1_strategy();
    let (d, md) = dilate_party_in_strategy(&s, 0).unwrap();
    assert_eq!(md.ancilla_dim(), 1);
    assert!(d.is_bipartite_product());
    let b0 = behavior_from_strategy(&s).unwrap();
    let b1 = behavior_from_strategy(&d).unwrap();
    assert!(max_entry_diff(&b0, &b1) < 1e-12);
}

#[test]
fn nonprojective_alice_keeps_behavior_and_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut s = build_theorem1_strategy().to_backend(Backend::Float).unwrap();
    s.povms[0] = (0..2).map(|_| Povm::new(random_povm(2, 2, &mut rng).iter().map(Matrix::from_cmat).collect()).unwrap()).collect();
    let (d, md) = dilate_party_in_strategy(&s, 0).unwrap();
    assert!(md.ancilla_dim() > 1);
    assert!(d.is_bipartite_product());
    assert!(d.povms[0].iter().all(Povm::is_projective));
    // The ancilla joins the Alice–Bob source.
    let anc = d.layout.index_of("A_b_anc").unwrap();
    assert!(d.sources[0].registers.contains(&anc));
    let b0 = behavior_from_strategy(&s).unwrap();
    let b1 = behavior_from_strategy(&d).unwrap();
    assert!(max_entry_diff(&b0, &b1) < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dilations_preserve_statistics(seed in any::<u64>(), d in 2usize..4, k in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_povm(d, k, &mut rng);
        let res = dilate_povm(&e, None).unwrap();
        prop_assert!(res.report.passed);
        for _ in 0..100 {
            let psi = random_state(d, &mut rng);
            let up = res.isometry.mul_vec(&psi);
            for (ek, pk) in e.iter().zip(&res.pvm) {
                let (a, b) = (dot(&psi, &ek.mul_vec(&psi)).re, dot(&up, &pk.mul_vec(&up)).re);
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn trine_complement_vanishes_on_range() {
    let res = dilate_povm(&trine_povm(), None).unwrap();
    let total = res.pvm.iter().fold(CMat::zeros(4, 4), |acc, p| &acc + p);
    assert!(total.max_abs_diff(&CMat::identity(4)) < 1e-12);
    assert!(res.report.complement_error < 1e-12);
}
