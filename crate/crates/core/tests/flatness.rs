use dgtor::dg::{examples, DgAlgebra, DgModule};
use dgtor::flatness::{equivalence_harness, h0_lemma, homology_tensor_h0, strongly_flat, AlgebraHomology, HarnessConfig};
use dgtor::flatness::harness::random_strongly_flat;
use dgtor::gen::{self, AlgebraShape};
use dgtor::Complex;
use rand::Rng;

fn config(seed: u64) -> HarnessConfig {
    HarnessConfig { window: 4, p_max: 4, seed, random_modules: 2, random_maps: 2, max_top: 2 }
}

#[test]
fn curated_suite_agrees() {
    let eps = examples::dual_numbers();
    let ext = examples::exterior(1);
    let k = DgAlgebra::ground();
    let cases: Vec<(DgModule, bool)> = vec![
        (DgModule::free_rank_one(&eps), true),
        (examples::residue_module(&eps), false),
        (examples::residue_module(&ext), false),
        (DgModule::free_rank_one(&ext).power(2), true),
        (DgModule::free_rank_one(&eps).direct_sum(&examples::residue_module(&eps)), false),
        (DgModule::free_rank_one(&examples::koszul_dual_numbers()), true),
        (gen::over_ground(&Complex::sphere(0).direct_sum(&Complex::disk(2))), true),
        (gen::over_ground(&Complex::sphere(1)), false),
        (DgModule::free_rank_one(&k).suspension(), false),
    ];
    for (i, (m, flat)) in cases.iter().enumerate() {
        let ah = AlgebraHomology::new(m.algebra()).unwrap();
        let v = equivalence_harness(&ah, m, &config(i as u64)).unwrap();
        assert!(v.agree, "case {i}: {:?}", v.counterexample);
        assert_eq!(v.flat(), *flat, "case {i}");
    }
}

#[test]
fn random_instances_agree() {
    let mut rng = gen::rng(41);
    for i in 0..30 {
        let a = gen::random_algebra(&mut rng, AlgebraShape::default());
        let ah = AlgebraHomology::new(&a).unwrap();
        let m = if rng.random_bool(0.5) {
            random_strongly_flat(&mut rng, &a, 2).unwrap().1
        } else {
            gen::random_module(&mut rng, &a, 2)
        };
        let v = equivalence_harness(&ah, &m, &config(i)).unwrap();
        assert!(v.agree, "instance {i}: {:?}", v.counterexample);
    }
}

#[test]
fn strongly_flat_modules_satisfy_the_comparison() {
    let mut rng = gen::rng(8);
    for _ in 0..6 {
        let a = gen::random_algebra(&mut rng, AlgebraShape::default());
        let ah = AlgebraHomology::new(&a).unwrap();
        let (_, m) = random_strongly_flat(&mut rng, &a, 2).unwrap();
        assert!(strongly_flat(&ah, &m).unwrap().strongly_flat);
        let n = gen::random_module(&mut rng, &a, 2);
        assert!(homology_tensor_h0(&ah, &n, &m, 3).unwrap().holds());
    }
}

#[test]
fn degree_zero_tensor_lemma() {
    let mut rng = gen::rng(17);
    for _ in 0..10 {
        let a = gen::random_algebra(&mut rng, AlgebraShape::default());
        let ah = AlgebraHomology::new(&a).unwrap();
        let m = gen::random_module(&mut rng, &a, 2);
        let n = examples::residue_module(&a);
        assert!(h0_lemma(&ah, &n, &m).unwrap().holds());
    }
}
