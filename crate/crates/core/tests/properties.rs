//! Property-based invariants.

mod common;

use common::*;
use multiloop::classify::{classify, decide_iso, transform_spec, IsoWitness};
use multiloop::lattice::Lattice;
use multiloop::liedata::Series;
use multiloop::psi::{support_lattice, PsiSpec};
use multiloop::scalar::{rat, CycScalar};
use proptest::prelude::*;

fn spec_from_seed(seed: u64) -> PsiSpec {
    let mut rng = rng(seed);
    let g = if seed % 2 == 0 {
        algebra(Series::A, 1)
    } else {
        algebra(Series::A, 2)
    };
    random_spec(&mut rng, &g, 2, 3, 2)
}

fn scalar() -> impl Strategy<Value = CycScalar> {
    (-4i64..=4, 1i64..=3, 0i64..24, prop::sample::select(vec![1u32, 2, 3, 4, 6, 8, 12]))
        .prop_filter("nonzero", |(q, _, _, _)| *q != 0)
        .prop_map(|(q, d, e, l)| CycScalar::new(rat(q, d), e, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_is_a_subgroup(seed in any::<u64>(), a in prop::collection::vec(-4i64..=4, 2), b in prop::collection::vec(-4i64..=4, 2)) {
        let spec = spec_from_seed(seed);
        if let Ok(gamma) = support_lattice(&spec) {
            let n = spec.n();
            let (a, b) = (&a[..n], &b[..n]);
            if gamma.contains(a) && gamma.contains(b) {
                let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let neg: Vec<i64> = a.iter().map(|x| -x).collect();
                prop_assert!(gamma.contains(&sum) && gamma.contains(&neg));
            }
            for (axis, &r) in gamma.periods.iter().enumerate() {
                let mut m = vec![0; n];
                m[axis] = r;
                prop_assert!(spec.functional_nonzero(&m));
            }
        }
    }

    #[test]
    fn support_invariant_under_axis_scaling(seed in any::<u64>(), s in scalar()) {
        let spec = spec_from_seed(seed);
        let w = IsoWitness {
            taus: spec.dims().iter().map(|&d| (0..d).collect()).collect(),
            scalings: (0..spec.n()).map(|_| s.clone()).collect(),
            shift: vec![0; spec.n()],
        };
        let scaled = transform_spec(&spec, &w).unwrap();
        match (support_lattice(&spec), support_lattice(&scaled)) {
            (Ok(a), Ok(b)) => prop_assert!(a.lattice.same_group(&b.lattice)),
            (Err(a), Err(b)) => prop_assert_eq!(a.is_structural(), b.is_structural()),
            _ => prop_assert!(false, "scaling changed the support outcome"),
        }
    }

    #[test]
    fn shift_parameter_irrelevant_to_support(seed in any::<u64>(), num in -5i64..=5, den in 1i64..=4) {
        let spec = spec_from_seed(seed);
        let shifted = PsiSpec::new(
            spec.algebra().clone(),
            spec.dims().to_vec(),
            spec.weights().to_vec(),
            spec.evals().to_vec(),
            vec![rat(num, den); spec.n()],
        ).unwrap();
        let (a, b) = (classify(&spec), classify(&shifted));
        prop_assert_eq!(a.as_ref().map(|d| d.p).ok(), b.as_ref().map(|d| d.p).ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(a.gamma.lattice.same_group(&b.gamma.lattice));
        }
    }

    #[test]
    fn classification_is_isomorphism_invariant(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let spec = spec_from_seed(seed);
        if let Ok(d) = classify(&spec) {
            let mut rng = rng(perm_seed);
            let taus = spec.dims().iter().map(|&n| {
                let mut t: Vec<usize> = (0..n).collect();
                rand::seq::SliceRandom::shuffle(&mut t[..], &mut rng);
                t
            }).collect();
            let w = IsoWitness { taus, scalings: vec![sc(2, 0, 1); spec.n()], shift: vec![0; spec.n()] };
            let t = classify(&transform_spec(&spec, &w).unwrap()).unwrap();
            prop_assert_eq!(t.p, d.p);
            prop_assert!(decide_iso(&d, &t).unwrap().witness().is_some());
            prop_assert!(decide_iso(&t, &d).unwrap().witness().is_some());
        }
    }

    #[test]
    fn hermite_form_is_unique(gens in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..5), extra in prop::collection::vec(-2i64..=2, 4)) {
        let mut gens = gens;
        gens.push(vec![5, 0, 0]);
        gens.push(vec![0, 7, 0]);
        gens.push(vec![0, 0, 3]);
        let l = Lattice::from_generators(3, &gens, None).unwrap();
        // Adding integer combinations and reordering keeps the Hermite form.
        let mut more = gens.clone();
        let combo: Vec<i64> = (0..3).map(|c| gens.iter().zip(&extra).map(|(g, k)| g[c] * k).sum()).collect();
        more.push(combo);
        more.reverse();
        let l2 = Lattice::from_generators(3, &more, None).unwrap();
        prop_assert_eq!(l.basis(), l2.basis());
        for g in &gens {
            prop_assert!(l.contains(g));
        }
    }

    #[test]
    fn scalar_power_laws(a in scalar(), b in scalar(), j in -5i64..=5, k in -5i64..=5) {
        let order = multiloop::scalar::lcm(a.order(), b.order());
        let (a, b) = (a.lift(order).unwrap(), b.lift(order).unwrap());
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.pow(k), a.pow(k).mul(&b.pow(k)).unwrap());
        prop_assert_eq!(a.pow(j + k), a.pow(j).mul(&a.pow(k)).unwrap());
        prop_assert!(a.mul(&a.inv()).unwrap().is_one());
        prop_assert_eq!(a.pow(0), CycScalar::one(a.order()));
        let (x, y) = (a.to_complex(), a.lift(a.order() * 2).unwrap().to_complex());
        prop_assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
        prop_assert!(a.div(&a).unwrap().is_one());
    }
}
