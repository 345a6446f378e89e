use hopf_core::{
    assemble_rhs, homological_residuals, make_frame, run_ladder, CVec, ComplexVec,
    EigenvectorConvention, Jet, JetBuilder, LadderOptions, C,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

/// Jacobian with eigenvalues `+-i omega` and `-d_1, .., -d_{n-2}` in a
/// random well-conditioned basis; every higher derivative drawn from
/// `[-1, 1] / r!`.
fn random_jet(seed: u64, n: usize, order: usize) -> Jet {
    let mut rng = StdRng::seed_from_u64(seed);
    let omega = rng.gen_range(0.5..2.0);
    let mut core = DMatrix::zeros(n, n);
    core[(0, 1)] = -omega;
    core[(1, 0)] = omega;
    for i in 2..n {
        core[(i, i)] = -rng.gen_range(0.3..2.0);
    }
    let s = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            0.3 * rng.gen_range(-1.0..1.0)
        }
    });
    let a = &s * core * s.clone().try_inverse().unwrap();
    let mut b = JetBuilder::new(n, order).unwrap();
    let mut fact = vec![1.0f64];
    for r in 1..=order {
        fact.push(fact[r - 1] * r as f64);
    }
    b.fill(|_, m| Ok(rng.gen_range(-1.0..1.0) / fact[m.len()]))
        .unwrap();
    b.jacobian(&a);
    b.build()
}

fn random_cvec(rng: &mut StdRng, n: usize) -> CVec {
    ComplexVec(
        (0..n)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

fn rel(a: &CVec, b: &CVec) -> f64 {
    (a - b).max_abs() / b.max_abs().max(a.max_abs()).max(1e-300)
}

/// Brute-force contraction over every ordered index tuple.
fn contract_all(jet: &Jet, order: usize, args: &[&CVec]) -> CVec {
    let t = jet.tensor(order).unwrap();
    let n = jet.dim();
    let mut out = CVec::zeros(n);
    let mut idx = vec![0usize; order];
    loop {
        let mut w = C::new(1.0, 0.0);
        for (s, &i) in idx.iter().enumerate() {
            w *= args[s][i];
        }
        for c in 0..n {
            out.0[c] += w * t.get(c, &idx);
        }
        let mut s = 0;
        while s < order {
            idx[s] += 1;
            if idx[s] < n {
                break;
            }
            idx[s] = 0;
            s += 1;
        }
        if s == order {
            return out;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tensor_entries_are_permutation_symmetric(seed in any::<u64>(), n in 2usize..5, order in 2usize..6) {
        let jet = random_jet(seed, n, order);
        let t = jet.tensor(order).unwrap();
        let mut rng = StdRng::seed_from_u64(seed ^ 1);
        for _ in 0..20 {
            let mut idx: Vec<usize> = (0..order).map(|_| rng.gen_range(0..n)).collect();
            let c = rng.gen_range(0..n);
            let v = t.get(c, &idx);
            idx.reverse();
            prop_assert_eq!(t.get(c, &idx), v);
            idx.rotate_left(1);
            prop_assert_eq!(t.get(c, &idx), v);
        }
    }

    #[test]
    fn forms_are_symmetric_and_multilinear(seed in any::<u64>(), n in 2usize..5, order in 1usize..6) {
        let jet = random_jet(seed, n, order.max(1));
        let mut rng = StdRng::seed_from_u64(seed ^ 2);
        let args: Vec<CVec> = (0..order).map(|_| random_cvec(&mut rng, n)).collect();
        let refs: Vec<&CVec> = args.iter().collect();
        let v = jet.eval_form(order, &refs).unwrap();
        prop_assert!(rel(&v, &contract_all(&jet, order, &refs)) < 1e-12);

        let mut perm = refs.clone();
        perm.reverse();
        prop_assert!(rel(&jet.eval_form(order, &perm).unwrap(), &v) < 1e-12);

        let u = random_cvec(&mut rng, n);
        let a = C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let mixed = &args[0].scale(a) + &u;
        let mut r1 = refs.clone();
        r1[0] = &mixed;
        let mut r2 = refs.clone();
        r2[0] = &u;
        let lhs = jet.eval_form(order, &r1).unwrap();
        let rhs = &v.scale(a) + &jet.eval_form(order, &r2).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn ladder_invariants_on_random_fields(seed in any::<u64>(), n in 2usize..5) {
        let jet = random_jet(seed, n, 9);
        let frame = make_frame(&jet, EigenvectorConvention::default()).unwrap();
        let (rq, rp, rn) = frame.residuals();
        prop_assert!(rq < 1e-12 && rp < 1e-12 && rn < 1e-12);
        let lad = run_ladder(&frame, LadderOptions::default()).unwrap();

        for r in homological_residuals(&frame, &lad) {
            prop_assert!(r.relative() < 1e-8, "({}, {}) residual {}", r.j, r.k, r.relative());
        }

        // conjugate symmetry against an independent solve of the (k, j) equation
        let a = frame.jacobian.map(|v| C::new(v, 0.0));
        let w = frame.omega0;
        for ((j, k), h) in lad.h_entries() {
            if j <= k || j == k + 1 {
                continue;
            }
            let rhs = assemble_rhs(&frame, &lad, k, j).unwrap();
            let m = DMatrix::identity(n, n) * C::new(0.0, (k as f64 - j as f64) * w) - &a;
            let sol = m.lu().solve(&DVector::from_column_slice(&rhs.0)).unwrap();
            let mine = ComplexVec(sol.iter().copied().collect());
            prop_assert!(rel(&mine, &h.conj()) < 1e-9, "h_{}{} vs conj h_{}{}", k, j, j, k);
        }

        // solvability: resonant solutions carry no q component
        for m in 1..=3usize {
            let h = lad.h(m + 1, m).unwrap();
            prop_assert!(frame.p.inner(h).norm() < 1e-9 * h.max_abs().max(1.0));
        }
    }

    #[test]
    fn eigenvector_rescaling_scales_g_by_modulus_powers(seed in any::<u64>(), n in 2usize..5, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        prop_assume!(re.hypot(im) > 0.2);
        let jet = random_jet(seed, n, 9);
        let frame = make_frame(&jet, EigenvectorConvention::default()).unwrap();
        let c = C::new(re, im);
        let base = run_ladder(&frame, LadderOptions::default()).unwrap();
        let scaled = run_ladder(&frame.rescaled(c), LadderOptions::default()).unwrap();
        for m in 1..=4usize {
            let f = c.norm().powi(2 * m as i32);
            let (g0, g1) = (base.g(m).unwrap(), scaled.g(m).unwrap());
            prop_assert!((g1 - g0 * f).norm() <= 1e-8 * (g0 * f).norm().max(1e-12), "m={} {} vs {}", m, g1, g0 * f);
        }
        let (h0, h1) = (base.h(2, 1).unwrap(), scaled.h(2, 1).unwrap());
        prop_assert!(rel(h1, &h0.scale(c * c * c.conj())) < 1e-8);

        let unit = run_ladder(&make_frame(&jet, EigenvectorConvention::UnitNorm).unwrap(), LadderOptions::default()).unwrap();
        for m in 1..=4usize {
            let (a, b) = (base.l(m).unwrap(), unit.l(m).unwrap());
            prop_assert!(a.abs() < 1e-12 || a.signum() == b.signum());
        }
    }
}

#[test]
fn f32_ladder_tracks_f64() {
    let jet = random_jet(7, 3, 5);
    let l64 = run_ladder(
        &make_frame(&jet, EigenvectorConvention::default()).unwrap(),
        LadderOptions::up_to(2),
    )
    .unwrap()
    .lyapunov();
    let frame32 = make_frame(&jet.cast::<f32>(), EigenvectorConvention::default()).unwrap();
    let l32 = run_ladder(&frame32, LadderOptions::up_to(2))
        .unwrap()
        .lyapunov();
    for (a, b) in l64.iter().zip(&l32) {
        assert!(
            (*b as f64 - a).abs() < 1e-3 * a.abs().max(1.0),
            "{a} vs {b}"
        );
    }
}

#[test]
fn json_dump_is_complete_and_stable() {
    let jet = random_jet(11, 3, 9);
    let frame = make_frame(&jet, EigenvectorConvention::default()).unwrap();
    let lad = run_ladder(&frame, LadderOptions::default()).unwrap();
    let v = lad.to_json();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["convention"]["transport"], "full");
    let hs = v["h_jk"].as_object().unwrap();
    // every (j, k) with 2 <= j + k <= 8
    assert_eq!(hs.len(), (2..=8).map(|d| d + 1).sum::<usize>());
    assert_eq!(hs["h_21"].as_array().unwrap().len(), 3);
    for m in 1..=4 {
        let l = v[format!("l{m}")].as_f64().unwrap();
        assert_eq!(l, lad.l(m).unwrap());
    }
    let again = run_ladder(&frame, LadderOptions::default())
        .unwrap()
        .to_json();
    assert_eq!(
        serde_json::to_string(&v).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}
