//! Built-in invariant suite: a fast pass over every subsystem, one line per
//! check. All randomness flows from the single seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use num_rational::BigRational;

use padic_prep::exact::QPoly;
use padic_prep::frobenius::{homogenize_eigen, trivialize_unit};
use padic_prep::homology::{supp_equals_support, FreeComplex, ModulePresentation};
use padic_prep::linearize::{
    self, character_on_line, IdealPresentation, RingFlavor,
};
use padic_prep::weierstrass;
use padic_prep::{
    Context, Coords, Error, FrobeniusAction, MultiSeries, PadicScalar, Result,
};

fn check(name: &str, ok: bool) -> Result<()> {
    println!("selftest {name}: {}", if ok { "ok" } else { "FAILED" });
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("selftest {name} failed")))
    }
}

fn random_series(
    rng: &mut ChaCha8Rng,
    ctx: Context,
    nvars: usize,
    coords: Coords,
    terms: usize,
    max_deg: u32,
    with_unit: bool,
) -> MultiSeries {
    let mut s = MultiSeries::zero(ctx, nvars, coords);
    let mut raw: Vec<(Vec<u32>, i64)> = Vec::new();
    if with_unit {
        raw.push((vec![0; nvars], 1 + rng.gen_range(0..4) as i64));
    }
    for _ in 0..terms {
        let mut exp = vec![0u32; nvars];
        let mut left = max_deg;
        for e in exp.iter_mut() {
            *e = rng.gen_range(0..=left);
            left -= *e;
        }
        let c = rng.gen_range(-9i64..=9);
        if c != 0 {
            raw.push((exp, c));
        }
    }
    for (e, c) in raw {
        s = s
            .add(&MultiSeries::from_int_terms(ctx, nvars, coords, &[(e, c)]).unwrap())
            .unwrap();
    }
    s
}

pub fn run(seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Scalar field axioms and exp/log.
    let ctx = Context::new(5, 8, 6)?;
    let mut ok = true;
    for _ in 0..100 {
        let a = PadicScalar::from_integer(ctx, rng.gen_range(-200..200));
        let b = PadicScalar::from_integer(ctx, rng.gen_range(-200..200));
        let c = PadicScalar::from_integer(ctx, rng.gen_range(-200..200));
        let lhs = a.add(&b)?.mul(&c)?;
        let rhs = a.mul(&c)?.add(&b.mul(&c)?)?;
        ok &= lhs.congruent(&rhs);
        if !a.is_zero() {
            ok &= a.inv()?.mul(&a)?.congruent(&PadicScalar::one(ctx));
        }
    }
    let five = PadicScalar::from_integer(ctx, 5);
    ok &= five.exp()?.log()?.congruent(&five);
    check("scalar-field", ok)?;

    // Division identity and order invariance.
    let mut ok = true;
    for _ in 0..10 {
        let f = {
            let mut f = random_series(&mut rng, ctx, 3, Coords::T, 4, 4, false);
            let a = rng.gen_range(1..=3u32);
            f = f
                .add(&MultiSeries::from_int_terms(ctx, 3, Coords::T, &[(vec![a, 0, 0], 1)]).unwrap())
                .unwrap();
            f
        };
        if weierstrass::regularity_order(&f).is_err() {
            continue;
        }
        let g = random_series(&mut rng, ctx, 3, Coords::T, 5, 6, false);
        if g.is_zero() {
            continue;
        }
        let asc = weierstrass::divide_with_order(&g, &f, weierstrass::SweepOrder::Ascending)?;
        let dsc = weierstrass::divide_with_order(&g, &f, weierstrass::SweepOrder::Descending)?;
        ok &= weierstrass::recompose(&asc, &f)? == g;
        ok &= asc.quotient == dsc.quotient && asc.remainders == dsc.remainders;
    }
    check("weierstrass-division", ok)?;

    // Preparation round trip.
    let mut ok = true;
    for _ in 0..10 {
        let a = rng.gen_range(1..=2u32);
        let mut w = MultiSeries::from_int_terms(ctx, 2, Coords::T, &[(vec![a, 0], 1)]).unwrap();
        for i in 0..a {
            let c = rng.gen_range(-4i64..=4);
            if c != 0 {
                w = w
                    .add(
                        &MultiSeries::from_int_terms(ctx, 2, Coords::T, &[(vec![i, 1], c)])
                            .unwrap(),
                    )
                    .unwrap();
            }
        }
        let u = random_series(&mut rng, ctx, 2, Coords::T, 3, 2, true);
        let f = w.mul(&u)?;
        let fact = weierstrass::prepare(&f)?;
        ok &= fact.distinguished == w && fact.unit == u;
    }
    check("weierstrass-preparation", ok)?;

    // Unit trivialization: an explicit cocycle recovers its cofactor, and the
    // defining identity re-verifies through the action.
    let phi = FrobeniusAction::from_strs(ctx, &["2", "2"], 1, 1)?;
    let one_plus = MultiSeries::from_int_terms(ctx, 2, Coords::X, &[(vec![0, 0], 1), (vec![0, 1], 1)])
        .unwrap();
    let h_true = one_plus.invert()?;
    let u = MultiSeries::from_int_terms(ctx, 2, Coords::X, &[(vec![0, 0], 2), (vec![0, 1], 4)])
        .unwrap()
        .mul(&h_true)?;
    let t = trivialize_unit(&u, &phi)?;
    let lhs = u.mul(&phi.apply(&t.cofactor)?)?;
    let rhs = t.cofactor.scalar_mul(&t.constant)?;
    check(
        "unit-trivialization",
        lhs == rhs && t.cofactor == h_true && t.constant.congruent(&PadicScalar::from_integer(ctx, 2)),
    )?;

    // The quotient of an equivariant generator by itself trivializes too.
    let f = MultiSeries::from_int_terms(ctx, 2, Coords::X, &[(vec![1, 0], 1), (vec![1, 1], 1)])
        .unwrap();
    let u = phi.apply(&f)?.divide_exact(&f)?.expect("equivariant generator");
    let t = trivialize_unit(&u, &phi)?;
    let lhs = u.mul(&phi.apply(&t.cofactor)?)?;
    let rhs = t.cofactor.scalar_mul(&t.constant)?;
    check("unit-trivialization-quotient", lhs == rhs)?;

    // Eigen-homogenization.
    let r = homogenize_eigen(&f, &phi)?;
    check(
        "eigen-homogenization",
        r.degree == 1
            && r.homogeneous
                == MultiSeries::from_int_terms(ctx, 2, Coords::X, &[(vec![1, 0], 1)]).unwrap(),
    )?;

    // Linearization recovers a known kernel.
    let phi3 = FrobeniusAction::from_strs(ctx, &["2", "2", "2"], 1, 1)?;
    let ideal = IdealPresentation::new(
        RingFlavor::An,
        vec![
            MultiSeries::from_int_terms(ctx, 3, Coords::X, &[(vec![1, 0, 0], 2), (vec![0, 1, 0], -1)])
                .unwrap(),
            MultiSeries::from_int_terms(ctx, 3, Coords::X, &[(vec![1, 0, 0], 3), (vec![0, 0, 1], -1)])
                .unwrap(),
        ],
        true,
        true,
    )?;
    let map = linearize::linearize_phi_ideal(&ideal, &phi3)?;
    let lam = map.lambdas_exact().expect("exact path");
    check(
        "linearize-kernel-recovery",
        linearize::verify_evaluation(&ideal, &map)?
            && lam[1] == BigRational::from_integer(2.into())
            && lam[2] == BigRational::from_integer(3.into()),
    )?;

    // The maximal ideal is refused.
    let m = IdealPresentation::new(
        RingFlavor::An,
        vec![
            MultiSeries::variable(ctx, 2, Coords::X, 0),
            MultiSeries::variable(ctx, 2, Coords::X, 1),
        ],
        true,
        true,
    )?;
    let phi2 = FrobeniusAction::from_strs(ctx, &["2", "2"], 1, 1)?;
    check(
        "maximal-ideal-refused",
        matches!(linearize::linearize_phi_ideal(&m, &phi2), Err(Error::MaximalIdeal)),
    )?;

    // End-to-end: the T-coordinate fixture through the whole pipeline.
    let p = MultiSeries::from_int_terms(
        ctx,
        2,
        Coords::T,
        &[(vec![1, 0], 1), (vec![0, 1], -3), (vec![0, 2], -3), (vec![0, 3], -1)],
    )
    .unwrap();
    let ideal_t = IdealPresentation::new(RingFlavor::Rn, vec![p], false, true)?;
    let ideal_x = ideal_t.change_coords(Coords::X)?;
    let map = linearize::linearize_phi_ideal(&ideal_x, &phi2)?;
    let x = PadicScalar::from_integer(ctx, 5);
    let chi = character_on_line(&map, &x)?;
    let values = padic_prep::characters::eval_ideal_at_char(&ideal_t, &chi)?;
    check(
        "end-to-end-fixture",
        map.lambdas()[1].congruent(&PadicScalar::from_integer(ctx, 3).inv()?)
            && values.iter().all(|v| v.is_negligible()),
    )?;

    // Koszul ranks and windows.
    let mut ok = true;
    for n in 1..=4 {
        let kos = FreeComplex::koszul(n)?;
        let profile = kos.reduce_and_cohomology();
        ok &= profile.dim(-(n as i64)) == 1;
        ok &= profile.euler_characteristic() == 0;
        if n <= 3 {
            ok &= kos.check_window()?.window_ok;
        }
    }
    check("koszul-window", ok)?;

    // Support coincidence on a hypersurface module.
    let module = ModulePresentation::new(2, 1, vec![vec![QPoly::variable(2, 0)]])?;
    let points: Vec<Vec<BigRational>> = (0..10)
        .map(|_| {
            vec![
                BigRational::from_integer(rng.gen_range(-2i64..=2).into()),
                BigRational::from_integer(rng.gen_range(-2i64..=2).into()),
            ]
        })
        .collect();
    check("supp-coincidence", supp_equals_support(&module, &points))?;
    Ok(())
}
