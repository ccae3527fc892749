use proptest::prelude::*;
use rand::seq::SliceRandom;
use num::Zero;
use rand::Rng;

use vdp_core::algebra::{parse_poly, z, GaussianRational, Poly};
use vdp_core::approx::{build_dictionary, fit_field};
use vdp_core::calculus::VectorField;
use vdp_core::criterion::{compatible_bracket_check, semicompat_certificate, spanning_rank, verify_kernel};
use vdp_core::lifting::{check_basepoint, jo_family, lift, lift_pair, lift_pairs, twist_field, BaseField, BasePair, Orientation, Side};
use vdp_core::random::Fuzz;
use vdp_core::scenario::Scenario;
use vdp_core::suspension::{divergence_on_suspension, make_suspension, sample_points, Exactness, Region, SampleSpec, SuspensionContext, SuspensionField};

fn p(s: &str, n: usize) -> Poly {
    parse_poly(s, n).unwrap()
}

fn random_context(fz: &mut Fuzz, n: usize) -> SuspensionContext {
    let zs: Vec<usize> = (1..=n).map(z).collect();
    loop {
        let f = fz.nonzero_poly(n + 2, &zs, 2, 3);
        if let Ok(ctx) = make_suspension(n, f) {
            return ctx;
        }
    }
}

fn random_base(fz: &mut Fuzz, n: usize) -> BaseField {
    let zs: Vec<usize> = (1..=n).map(z).collect();
    BaseField::from_ambient(&fz.divergence_free_field(n + 2, &zs, 2)).unwrap()
}

fn coordinate_pair() -> BasePair {
    BasePair {
        alpha: BaseField::coordinate(2, 1),
        beta: BaseField::coordinate(2, 2),
        ker_alpha: vec![p("z2", 2)],
        ker_beta: vec![p("z1", 2)],
        ideal: vec![Poly::one(4)],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_ignores_multiples_of_the_defining_polynomial(seed in any::<u64>()) {
        let mut fz = Fuzz::new(seed);
        let ctx = random_context(&mut fz, 2);
        let all: Vec<usize> = (0..4).collect();
        let a = fz.poly(4, &all, 3, 4);
        let q = fz.poly(4, &all, 2, 3);
        let shifted = &a + &(&q * ctx.defining());
        let nf = ctx.normal_form(&a);
        prop_assert_eq!(ctx.normal_form(&shifted), nf.clone());
        prop_assert_eq!(ctx.normal_form(&nf), nf);
    }

    #[test]
    fn divergence_does_not_depend_on_the_representative(seed in any::<u64>()) {
        let mut fz = Fuzz::new(seed);
        let ctx = random_context(&mut fz, 2);
        let theta = lift(&random_base(&mut fz, 2), &ctx, if seed % 2 == 0 { Side::U } else { Side::V }).unwrap();
        // add a field vanishing on the surface, and a twist multiple
        let w = fz.field(4, 1).scale(ctx.defining());
        let h = fz.poly(4, &[z(1), z(2)], 2, 2);
        let base = theta.ambient().add(&twist_field(&ctx).scale(&h));
        let a = SuspensionField::new(base.clone(), &ctx).unwrap();
        let b = SuspensionField::new(base.add(&w), &ctx).unwrap();
        prop_assert_eq!(divergence_on_suspension(&a, &ctx).unwrap(), divergence_on_suspension(&b, &ctx).unwrap());
    }

    #[test]
    fn lifts_of_divergence_free_fields_are_divergence_free(seed in any::<u64>(), n in 1usize..=3) {
        let mut fz = Fuzz::new(seed);
        let ctx = random_context(&mut fz, n);
        let theta = random_base(&mut fz, n);
        for side in [Side::U, Side::V] {
            let l = lift(&theta, &ctx, side).unwrap();
            prop_assert!(divergence_on_suspension(&l, &ctx).unwrap().is_zero());
        }
    }

    #[test]
    fn scenario_text_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let mut fz = Fuzz::new(seed);
        let ctx = random_context(&mut fz, n);
        let zs: Vec<usize> = (1..=n).map(z).collect();
        let mut sc = Scenario::new(n, ctx.f().clone());
        for _ in 0..fz.rng().gen_range(0..3) {
            sc.pairs.push(BasePair {
                alpha: random_base(&mut fz, n),
                beta: random_base(&mut fz, n),
                ker_alpha: (0..fz.rng().gen_range(0..3)).map(|_| fz.nonzero_poly(n + 2, &zs, 2, 2)).collect(),
                ker_beta: (0..fz.rng().gen_range(0..3)).map(|_| fz.nonzero_poly(n + 2, &zs, 2, 2)).collect(),
                ideal: vec![fz.nonzero_poly(n + 2, &zs, 1, 2)],
            });
        }
        sc.seed = fz.rng().gen();
        sc.samples = fz.rng().gen_range(1..200);
        sc.degree_bound = fz.rng().gen_range(0..8);
        sc.region = Region::symmetric(fz.rng().gen_range(1..5), fz.rng().gen_range(1..5));
        sc.exactness = if fz.rng().gen() { Exactness::Exact } else { Exactness::Float };
        if fz.rng().gen() {
            sc.basepoint = Some((0..n + 2).map(|_| fz.small_scalar()).collect());
            sc.twist = Some(fz.nonzero_poly(n + 2, &zs, 1, 2));
        }
        let all: Vec<usize> = (0..n + 2).collect();
        if fz.rng().gen() {
            sc.target = Some((0..n + 2).map(|_| fz.poly(n + 2, &all, 2, 3)).collect());
        }
        let text = sc.to_text();
        let back = Scenario::parse(&text).unwrap();
        prop_assert_eq!(&back, &sc);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn samples_are_reproducible_and_on_the_surface(seed in any::<u64>()) {
        let mut fz = Fuzz::new(seed);
        let ctx = random_context(&mut fz, 2);
        let spec = SampleSpec::new(8, seed, Region::symmetric(2, 2));
        let a = sample_points(&ctx, &spec).unwrap();
        prop_assert_eq!(&a, &sample_points(&ctx, &spec).unwrap());
        for s in &a {
            prop_assert!(ctx.defining().eval(s.as_exact().unwrap()).is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn spanning_rank_is_invariant_under_permutation_and_scaling(seed in any::<u64>()) {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        let pairs = [coordinate_pair()];
        let pts = sample_points(&ctx, &SampleSpec::new(10, seed, Region::symmetric(2, 2))).unwrap();
        let Some(pt) = pts.iter().map(|s| s.as_exact().unwrap().to_vec()).find(|x| check_basepoint(&pairs, &ctx, x).is_ok()) else {
            return Ok(());
        };
        let fam = jo_family(&pairs, &ctx, &pt, None).unwrap();
        let base = spanning_rank(&fam.at_point, &pt, &ctx).unwrap().rank;
        let mut fz = Fuzz::new(seed);
        let mut changed = fam.at_point.clone();
        changed.shuffle(fz.rng());
        for pp in &mut changed {
            let c = fz.nonzero_small_scalar();
            pp.a = pp.a.iter().map(|x| x * &c).collect();
            let d = fz.nonzero_small_scalar();
            pp.ideal_value = &pp.ideal_value * &d;
        }
        prop_assert_eq!(spanning_rank(&changed, &pt, &ctx).unwrap().rank, base);
    }

    #[test]
    fn compatible_bracket_identity_on_coordinate_fields(seed in any::<u64>()) {
        let mut fz = Fuzz::new(seed);
        let nvars = 5;
        let mut idx = vec![1usize, 2, 3];
        idx.shuffle(fz.rng());
        let (i, j, k) = (z(idx[0]), z(idx[1]), z(idx[2]));
        let nu = VectorField::coordinate(nvars, i);
        let mu = VectorField::coordinate(nvars, j);
        // h affine in z_i, free of z_j; f free of z_i; g free of z_j
        let a = fz.poly(nvars, &[k], 3, 2);
        let b = fz.poly(nvars, &[k], 3, 2);
        let h = &a + &(&Poly::var(nvars, i) * &b);
        let f = fz.poly(nvars, &[j, k], 3, 3);
        let g = fz.poly(nvars, &[i, k], 3, 3);
        let check = compatible_bracket_check(&nu, &mu, &h, &f, &g).unwrap();
        prop_assert!(check.holds());
    }

    #[test]
    fn fit_is_invariant_under_permutations(seed in any::<u64>()) {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        let lifted = lift_pairs(&[coordinate_pair()], &ctx).unwrap();
        let dict = build_dictionary(&ctx, &lifted, 1, true).unwrap();
        let mut spec = SampleSpec::new(16, seed, Region::symmetric(1, 2));
        spec.exactness = Exactness::Float;
        let samples = sample_points(&ctx, &spec).unwrap();
        let mut fz = Fuzz::new(seed);
        // an arbitrary divergence-free target: a lift of a random field
        let theta = random_base(&mut fz, 2);
        let target = lift(&theta, &ctx, Side::U).unwrap();
        let fit = fit_field(&target, &dict, &samples, &ctx).unwrap();

        let mut order: Vec<usize> = (0..dict.len()).collect();
        order.shuffle(fz.rng());
        let mut shuffled = samples.clone();
        shuffled.shuffle(fz.rng());
        let fit2 = fit_field(&target, &dict.permuted(&order), &shuffled, &ctx).unwrap();
        let tol = 1e-9 * (1.0 + fit.sup_residual);
        prop_assert!((fit.sup_residual - fit2.sup_residual).abs() <= tol, "{} vs {}", fit.sup_residual, fit2.sup_residual);
        prop_assert!((fit.l2_residual - fit2.l2_residual).abs() <= tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn certificates_stay_successful_when_the_degree_grows(d in 0u32..3, orientation in prop_oneof![Just(Orientation::Uv), Just(Orientation::Vu)]) {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        let lp = lift_pair(&coordinate_pair(), &ctx, orientation, 0).unwrap();
        let ka = verify_kernel(lp.first.ambient(), &lp.ker_first).unwrap();
        let kb = verify_kernel(lp.second.ambient(), &lp.ker_second).unwrap();
        let lo = semicompat_certificate(&ka, &kb, &lp.ideal, d, Some(ctx.reducer()), None).unwrap();
        let hi = semicompat_certificate(&ka, &kb, &lp.ideal, d + 1, Some(ctx.reducer()), None).unwrap();
        prop_assert!(!lo.success() || hi.success());
    }
}

#[test]
fn basepoint_with_vanishing_u_is_rejected() {
    let ctx = make_suspension(2, p("z1", 2)).unwrap();
    let g = GaussianRational::from_int;
    let pt = vec![g(0), g(1), g(0), g(3)];
    assert!(ctx.defining().eval(&pt).is_zero());
    let err = check_basepoint(&[coordinate_pair()], &ctx, &pt).unwrap_err();
    assert!(err.to_string().contains("u = 0"), "{err}");
}
