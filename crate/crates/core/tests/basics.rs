use std::collections::HashMap;

use redmod_core::expr::{factor_nonvanishing, Var};
use redmod_core::jet::{hat_order, order_of, prolong, total_derivative, JetContext, Split};
use redmod_core::vfmod::{phi_family_member, PhiVariant, VFModule, VectorField};
use redmod_core::{Error, Expr, MultiIndex};

fn ctx(n: usize) -> JetContext {
    JetContext::new(n)
}

#[test]
fn parse_and_print_round_trip() {
    let c = ctx(3);
    for s in ["x1*u[3,0,0]", "u", "exp(u[0,0,2])*(u[0,0,1]+u)", "(x1 + u)/(x2 - 1/2*u^2)", "-3/4*x1^2*u[0,1,0]^-2"] {
        let e = c.parse(s).unwrap();
        let back = c.parse(&c.show(&e)).unwrap();
        assert_eq!(e, back, "{s} -> {}", c.show(&e));
    }
}

#[test]
fn parse_errors() {
    let c = ctx(2);
    assert!(matches!(c.parse("u[1,0,0]"), Err(Error::JetLength { .. })));
    assert!(matches!(c.parse("y + 1"), Err(Error::UnknownIdentifier { .. })));
    assert!(matches!(c.parse("u +* 1"), Err(Error::Syntax { .. })));
}

#[test]
fn zero_tests() {
    let c = ctx(2);
    assert!((c.parse("u+x1").unwrap() - c.parse("x1+u").unwrap()).is_zero());
    assert!((c.parse("u*u").unwrap() - c.parse("u^2").unwrap()).is_zero());
    assert!(!(c.parse("u[1,0]").unwrap() - c.parse("u[0,1]").unwrap()).is_zero());
    let a = c.parse("(u^2 - x1^2)/(u - x1)").unwrap();
    assert_eq!(a, c.parse("u + x1").unwrap());
}

#[test]
fn partials_and_substitution() {
    let c = ctx(3);
    let e = c.parse("exp(u[0,0,2])").unwrap();
    assert_eq!(e.diff(&Var::jet(MultiIndex::new(&[0, 0, 2]))), e);
    assert_eq!(c.parse("u^2+x1").unwrap().diff(&Var::U), c.parse("2*u").unwrap());
    let c2 = ctx(2);
    let mut b = HashMap::new();
    b.insert(Var::U, Expr::int(0));
    assert!(matches!(c2.parse("1/u").unwrap().substitute(&b), Err(Error::SingularSubstitution(_))));
}

#[test]
fn factor_examples() {
    let c = ctx(3);
    let (m, core) = factor_nonvanishing(&c.parse("exp(u[0,0,2])*(u[0,0,1]+u)").unwrap(), &c);
    assert_eq!(m, c.parse("exp(u[0,0,2])").unwrap());
    assert_eq!(core, c.parse("u[0,0,1]+u").unwrap());
    let c2 = ctx(2);
    let (m, core) = factor_nonvanishing(&c2.parse("3*exp(u)*x1*u[2,0]").unwrap(), &c2);
    assert_eq!(m, c2.parse("3*exp(u)").unwrap());
    assert_eq!(core, c2.parse("x1*u[2,0]").unwrap());
}

#[test]
fn total_derivatives_and_orders() {
    let c = ctx(2);
    assert_eq!(total_derivative(&Expr::u(), 0, &c), c.parse("u[1,0]").unwrap());
    assert_eq!(total_derivative(&c.parse("x2*u[1,0]").unwrap(), 1, &c), c.parse("u[1,0]+x2*u[1,1]").unwrap());
    assert_eq!(total_derivative(&c.parse("exp(u)").unwrap(), 0, &c), c.parse("exp(u)*u[1,0]").unwrap());
    let c3 = ctx(3);
    assert_eq!(order_of(&c3.parse("u[0,3,0]+x1").unwrap()), 3);
    assert_eq!(order_of(&Expr::zero()), -1);
    assert_eq!(hat_order(&c3.parse("u[3,0,0]+u[0,0,1]").unwrap(), &Split::prefix(3, 2)), 1);
}

#[test]
fn prolongation_examples() {
    let c = ctx(2);
    let v = VectorField::new(vec![Expr::zero(), Expr::zero()], Expr::u()).unwrap();
    let pr = prolong(&v, 3, &c).unwrap();
    for (a, eta) in pr {
        assert_eq!(eta, Expr::jet(a));
    }
}

#[test]
fn module_examples() {
    let c = ctx(2);
    let v1 = VectorField::new(vec![Expr::one(), Expr::zero()], Expr::u()).unwrap();
    let v2 = VectorField::new(vec![Expr::zero(), Expr::one()], c.parse("x1").unwrap()).unwrap();
    let b = v1.commutator(&v2);
    assert_eq!(b.eta, c.parse("1 - x1").unwrap());
    assert!(b.xi.iter().all(Expr::is_zero));

    let m = VFModule::new(
        vec![
            VectorField::new(vec![Expr::one(), Expr::one()], Expr::u()).unwrap(),
            VectorField::new(vec![Expr::zero(), Expr::one()], Expr::int(-1)).unwrap(),
        ],
        2,
    )
    .unwrap();
    let cm = m.canonical_basis().unwrap();
    assert_eq!(cm.eta_hat, vec![c.parse("u+1").unwrap(), Expr::int(-1)]);
    assert!(cm.spans(&m));

    let nonvol = VFModule::new(
        vec![VectorField::d_u(2), VectorField::new(vec![Expr::one(), Expr::u()], Expr::zero()).unwrap()],
        2,
    )
    .unwrap();
    assert!(!nonvol.is_involutive());

    let c3 = ctx(2);
    let phi = c3.parse("u^2 + x1*x2").unwrap();
    assert!(phi_family_member(&phi, &Split::prefix(2, 2), &PhiVariant::Involutive).unwrap().is_involutive());
}
