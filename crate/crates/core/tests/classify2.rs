use redmod_core::classify2::{
    certify_positive, eiconal_residual, eiconal_submodule, elliptic_coorder, is_submodule, meta_module_from_eiconal,
    phi_pair_coefficients, phi_pair_module, wave_coorder, wave_singularity_condition, Kind, QuasiLinear2,
};
use redmod_core::jet::JetContext;
use redmod_core::manifold::strong_coorder;
use redmod_core::vfmod::{VFModule, VectorField};
use redmod_core::{Error, Expr};

fn exprs(ctx: &JetContext, xs: &[&str]) -> Vec<Expr> {
    xs.iter().map(|s| ctx.parse(s).unwrap()).collect()
}

fn matrix(ctx: &JetContext, rows: &[&[&str]]) -> Vec<Vec<Expr>> {
    rows.iter().map(|r| exprs(ctx, r)).collect()
}

fn field(ctx: &JetContext, xi: &[&str], eta: &str) -> VectorField {
    VectorField::new(exprs(ctx, xi), ctx.parse(eta).unwrap()).unwrap()
}

fn laplace(ctx: &JetContext) -> QuasiLinear2 {
    let a = matrix(ctx, &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]);
    QuasiLinear2::new(Kind::Elliptic, a, Expr::zero(), ctx).unwrap().with_positivity(10, 7, ctx).unwrap()
}

#[test]
fn laplace_shift() {
    let ctx = JetContext::new(3);
    let r = elliptic_coorder(&laplace(&ctx), &VFModule::shifts(3, &[0]), &ctx).unwrap();
    assert_eq!(r.report.strong_coorder, 2);
    assert_eq!(r.report.weak_coorder, Some(2));
    assert_eq!(r.a_hat, matrix(&ctx, &[&["1", "0"], &["0", "1"]]));
    assert!(r.matches_associated && r.diagonal_is_form && r.diagonal_positive);
}

#[test]
fn laplace_tilted_module() {
    let ctx = JetContext::new(3).with_symbol("c");
    let m = VFModule::new(vec![field(&ctx, &["1", "c", "0"], "u*x3")], 3).unwrap();
    let r = elliptic_coorder(&laplace(&ctx), &m, &ctx).unwrap();
    assert_eq!(r.a_hat[0][0], ctx.parse("1 + c^2").unwrap());
    assert_eq!(r.report.strong_coorder, 2);
    assert!(r.matches_associated && r.diagonal_is_form && r.diagonal_positive);
}

#[test]
fn quasilinear_elliptic() {
    let ctx = JetContext::new(2);
    let a = matrix(&ctx, &[&["1", "0"], &["0", "1+u^2"]]);
    let e = QuasiLinear2::new(Kind::Elliptic, a, ctx.parse("u[1,0]*u").unwrap(), &ctx).unwrap().with_positivity(12, 1, &ctx).unwrap();
    assert_eq!(e.positivity.as_ref().unwrap().len(), 12);
    for (xi, eta) in [(["1", "0"], "u"), (["x2", "1"], "x1"), (["1", "u"], "0")] {
        let m = VFModule::new(vec![field(&ctx, &xi, eta)], 2).unwrap();
        let r = elliptic_coorder(&e, &m, &ctx).unwrap();
        assert_eq!(r.report.strong_coorder, 2);
        assert!(r.matches_associated && r.diagonal_is_form && r.diagonal_positive);
    }
}

#[test]
fn elliptic_errors() {
    let ctx = JetContext::new(2);
    let a = matrix(&ctx, &[&["1", "0"], &["0", "1"]]);
    let e = QuasiLinear2::new(Kind::Elliptic, a, Expr::zero(), &ctx).unwrap();
    let err = elliptic_coorder(&e, &VFModule::shifts(2, &[0]), &ctx).unwrap_err();
    assert_eq!(err, Error::PositivityCertificateMissing);
    let a = matrix(&ctx, &[&["1", "0"], &["0", "-1"]]);
    assert!(matches!(certify_positive(&a, 10, 0, &ctx), Err(Error::NotPositiveDefinite(_))));
    let a = matrix(&ctx, &[&["1", "x1"], &["0", "1"]]);
    assert!(QuasiLinear2::new(Kind::Elliptic, a, Expr::zero(), &ctx).is_err());
}

fn wave(ctx: &JetContext) -> QuasiLinear2 {
    QuasiLinear2::new(Kind::Wave, matrix(ctx, &[&["1"]]), Expr::zero(), ctx).unwrap()
}

#[test]
fn wave_conditions() {
    let ctx = JetContext::with_time(1);
    let w = wave(&ctx);
    let c = wave_singularity_condition(&w, &exprs(&ctx, &["1"]), &exprs(&ctx, &["u"]), &ctx).unwrap();
    assert!(c.singular());
    assert!(wave_coorder(&w, &exprs(&ctx, &["1"]), &exprs(&ctx, &["u"]), &ctx).unwrap().strong_coorder <= 1);
    let c = wave_singularity_condition(&w, &exprs(&ctx, &["t"]), &exprs(&ctx, &["0"]), &ctx).unwrap();
    assert_eq!(c.residuals, exprs(&ctx, &["t^2-1"]));
    assert_eq!(wave_coorder(&w, &exprs(&ctx, &["t"]), &exprs(&ctx, &["0"]), &ctx).unwrap().strong_coorder, 2);

    let w = QuasiLinear2::new(Kind::Wave, matrix(&ctx, &[&["1+u[1,0]^2"]]), Expr::zero(), &ctx).unwrap();
    let c = wave_singularity_condition(&w, &exprs(&ctx, &["1"]), &exprs(&ctx, &["0"]), &ctx).unwrap();
    assert!(c.split);
    assert_eq!(c.residuals, exprs(&ctx, &["0", "0", "1"]));
    assert!(!c.singular());
}

#[test]
fn pair_modules() {
    let ctx = JetContext::with_time(1);
    let m = phi_pair_module(&ctx.parse("t+x").unwrap(), &Expr::u(), &ctx).unwrap();
    assert_eq!(m.basis()[0], field(&ctx, &["-1", "1"], "0"));
    let m = phi_pair_module(&ctx.parse("t").unwrap(), &ctx.parse("u-x").unwrap(), &ctx).unwrap();
    assert_eq!(m.basis()[0], field(&ctx, &["0", "1"], "1"));
    assert_eq!(phi_pair_module(&Expr::u(), &Expr::u(), &ctx).unwrap_err(), Error::DegenerateJacobian);

    let ctx = JetContext::with_time(2);
    let (tau, eta) = phi_pair_coefficients(&ctx.parse("t*x1 + u").unwrap(), &ctx.parse("u^2 + x2*t^2").unwrap(), &ctx).unwrap();
    assert_eq!(tau.len(), 2);
    assert_eq!(eta.len(), 2);
    assert!(phi_pair_module(&ctx.parse("t*x1 + u").unwrap(), &ctx.parse("u^2 + x2*t^2").unwrap(), &ctx).unwrap().is_involutive());
}

#[test]
fn eiconal() {
    let ctx = JetContext::with_time(1);
    let w = wave(&ctx);
    assert!(eiconal_residual(&w, &ctx.parse("t+x").unwrap(), &ctx).unwrap().is_zero());
    assert_eq!(eiconal_residual(&w, &ctx.parse("t+2*x").unwrap(), &ctx).unwrap(), Expr::int(-3));
    let m = meta_module_from_eiconal(&w, &ctx.parse("t+x").unwrap(), &ctx).unwrap();
    assert_eq!(m.basis(), &[field(&ctx, &["-1", "1"], "0"), VectorField::d_u(2)]);
    assert!(matches!(meta_module_from_eiconal(&w, &ctx.parse("t+2*x").unwrap(), &ctx), Err(Error::EiconalViolated(_))));

    let sub = VFModule::new(vec![field(&ctx, &["-1", "1"], "u*x")], 2).unwrap();
    assert!(is_submodule(&sub, &m));
    assert!(strong_coorder(&w.equation(&ctx), &sub, &ctx).unwrap().strong_coorder <= 1);
    let sub = eiconal_submodule(&ctx.parse("t+x").unwrap(), &ctx.parse("u*exp(t)").unwrap(), &ctx).unwrap();
    assert!(is_submodule(&sub, &m));

    let ctx = JetContext::with_time(1).with_symbol("c");
    let w = QuasiLinear2::new(Kind::Wave, matrix(&ctx, &[&["c^2"]]), Expr::zero(), &ctx).unwrap();
    assert!(eiconal_residual(&w, &ctx.parse("t + x/c").unwrap(), &ctx).unwrap().is_zero());
}
