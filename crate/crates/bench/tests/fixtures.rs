use vpair_bench::fixture;
use vpair_core::functionals::Assembler;
use vpair_core::{Model, PairKind};

#[test]
fn fixtures_are_valid_and_assemble() {
    for model in [Model::Euler, Model::Gsqg] {
        for pair in [PairKind::Corotating, PairKind::Counter] {
            let (spec, a) = fixture(model, pair, 0.1);
            spec.validate().unwrap();
            assert_eq!(a.len(), spec.modes);
            let (_, r) = Assembler::new(&spec).unwrap().reduced(&a).unwrap();
            assert!(r.reduced_inf().is_finite());
        }
    }
}
