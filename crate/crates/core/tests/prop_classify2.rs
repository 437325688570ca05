use redmod_core::classify2::{phi_pair_module, wave_coorder, wave_singularity_condition, Kind, QuasiLinear2};
use redmod_core::gen::Gen;
use redmod_core::jet::{JetContext, Split};
use redmod_core::manifold::strong_coorder;
use redmod_core::vfmod::{phi_family_member, PhiVariant, VFModule, VectorField};
use redmod_core::{Error, Expr};

fn base_vars(n: usize) -> Vec<Expr> {
    (0..n).map(Expr::coord).chain([Expr::u()]).collect()
}

/// `u_t = a^{ij} u_ij + b` with `a = I + B Bᵀ` over the spatial slots.
fn evolution(g: &mut Gen, ns: usize, ctx: &JetContext) -> QuasiLinear2 {
    let vars = base_vars(ns + 1);
    let b: Vec<Vec<Expr>> = (0..ns).map(|_| (0..ns).map(|_| g.poly(&vars, 1, 1)).collect()).collect();
    let a = (0..ns)
        .map(|i| {
            (0..ns)
                .map(|j| {
                    let id = if i == j { Expr::one() } else { Expr::zero() };
                    (0..ns).fold(id, |s, k| s + &b[i][k] * &b[j][k])
                })
                .collect()
        })
        .collect();
    QuasiLinear2::new(Kind::Evolution, a, g.poly(&vars, 2, 2), ctx).unwrap()
}

#[test]
fn evolution_kind_coorders() {
    let mut g = Gen::new(41);
    for k in 0..20 {
        let ns = 1 + k % 2;
        let n = ns + 1;
        let ctx = JetContext::with_time(ns);
        let l = evolution(&mut g, ns, &ctx).equation(&ctx);
        let spatial: Vec<usize> = (1..n).collect();
        let family = phi_family_member(&g.phi(n), &Split::from_checked(n, &spatial), &PhiVariant::Involutive).unwrap();
        assert_eq!(strong_coorder(&l, &family, &ctx).unwrap().strong_coorder, 1, "{}", ctx.show(&l));

        let checked: &[usize] = if ns == 2 && k % 4 == 1 { &[0, 1] } else { &[0] };
        let with_t = phi_family_member(&g.phi(n), &Split::from_checked(n, checked), &PhiVariant::Involutive).unwrap();
        assert_eq!(strong_coorder(&l, &with_t, &ctx).unwrap().strong_coorder, 2, "{}", ctx.show(&l));

        let vars = base_vars(n);
        let mut xi: Vec<Expr> = (0..n).map(|_| g.poly(&vars, 2, 1)).collect();
        xi[0] = Expr::int(g.nonzero_int(3)) + g.poly(&vars[1..], 1, 1) * g.poly(&vars[1..], 1, 1);
        let line = VFModule::new(vec![VectorField::new(xi, g.poly(&vars, 2, 2)).unwrap()], n).unwrap();
        assert_eq!(strong_coorder(&l, &line, &ctx).unwrap().strong_coorder, 2, "{}", ctx.show(&l));
    }
}

#[test]
fn phi_pair_modules_are_involutive() {
    let mut g = Gen::new(42);
    let mut built = 0;
    for k in 0..50 {
        let ns = 1 + k % 2;
        let n = ns + 1;
        let ctx = JetContext::with_time(ns);
        let phi1 = if k % 3 == 0 { g.poly(&base_vars(n)[..n], 2, 2) } else { g.phi(n) };
        let phi2 = g.phi(n);
        match phi_pair_module(&phi1, &phi2, &ctx) {
            Ok(m) => {
                assert!(m.is_involutive(), "Φ¹ = {}, Φ² = {}", ctx.show(&phi1), ctx.show(&phi2));
                assert!(m.basis().iter().all(|q| q.apply(&phi1).is_zero() && q.apply(&phi2).is_zero()));
                built += 1;
            }
            Err(Error::DegenerateJacobian) => {}
            Err(e) => panic!("Φ¹ = {}, Φ² = {}: {e}", ctx.show(&phi1), ctx.show(&phi2)),
        }
    }
    assert!(built >= 40, "{built}");
}

fn wave(ctx: &JetContext, a: Vec<Vec<Expr>>) -> QuasiLinear2 {
    QuasiLinear2::new(Kind::Wave, a, Expr::zero(), ctx).unwrap()
}

#[test]
fn wave_condition_is_necessary() {
    let ctx = JetContext::with_time(1);
    let mut g = Gen::new(43);
    let vars = base_vars(2);
    let (mut singular, mut regular) = (0, 0);
    for k in 0..30 {
        let speed = match k % 3 {
            0 => Expr::int(g.nonzero_int(3)),
            1 => Expr::one() + Expr::coord(1) * Expr::coord(1),
            _ => Expr::int(2) + Expr::coord(0) * Expr::coord(0),
        };
        let w = wave(&ctx, vec![vec![&speed * &speed]]);
        let eta = vec![g.poly(&vars, 2, 2)];
        let tau = if k % 2 == 0 { vec![Expr::int(g.nonzero_int(1)) / &speed] } else { vec![g.poly(&vars, 2, 1)] };
        let cond = wave_singularity_condition(&w, &tau, &eta, &ctx).unwrap();
        let co = wave_coorder(&w, &tau, &eta, &ctx).unwrap().strong_coorder;
        if cond.singular() {
            assert!(co <= 1, "τ = {}, η = {}", ctx.show(&tau[0]), ctx.show(&eta[0]));
            singular += 1;
        } else {
            assert_eq!(co, 2, "τ = {}, η = {}", ctx.show(&tau[0]), ctx.show(&eta[0]));
            regular += 1;
        }
    }
    assert!(singular >= 15 && regular >= 10, "{singular} singular, {regular} regular");

    let ctx = JetContext::with_time(2);
    let w = wave(&ctx, vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::one()]]);
    for (p, q, r) in [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)] {
        let (c, s) = (Expr::int(p) / Expr::int(r), Expr::int(q) / Expr::int(r));
        let eta = vec![Expr::int(g.nonzero_int(3)), Expr::int(g.int(-3, 3))];
        let tau = vec![c.clone(), s.clone()];
        assert!(wave_singularity_condition(&w, &tau, &eta, &ctx).unwrap().singular());
        assert!(wave_coorder(&w, &tau, &eta, &ctx).unwrap().strong_coorder <= 1);
        let off = vec![c, s + Expr::int(1)];
        assert!(!wave_singularity_condition(&w, &off, &eta, &ctx).unwrap().singular());
        assert_eq!(wave_coorder(&w, &off, &eta, &ctx).unwrap().strong_coorder, 2);
    }
}
