use super::{add, apply, constant, div, mul, neg, pow, sub, Expr, Func};

pub(super) type OuterRule<'a> = dyn Fn(Func, &Expr) -> Option<Expr> + 'a;

pub(super) fn differentiate(e: &Expr, i: usize) -> Expr {
    differentiate_with(e, i, &|_, _| None)
}

/// `outer(f, a)` may replace the derivative of `f` evaluated at `a`.
pub(super) fn differentiate_with(e: &Expr, i: usize, outer: &OuterRule) -> Expr {
    let differentiate = |e: &Expr, i: usize| differentiate_with(e, i, outer);
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Coord(j) => constant(if *j == i { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(differentiate(a, i)),
        Expr::Add(a, b) => add(differentiate(a, i), differentiate(b, i)),
        Expr::Sub(a, b) => sub(differentiate(a, i), differentiate(b, i)),
        Expr::Mul(a, b) => add(
            mul(differentiate(a, i), (**b).clone()),
            mul((**a).clone(), differentiate(b, i)),
        ),
        Expr::Div(a, b) => {
            let da = differentiate(a, i);
            let db = differentiate(b, i);
            if db.is_zero() {
                return div(da, (**b).clone());
            }
            div(
                sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                mul((**b).clone(), (**b).clone()),
            )
        }
        Expr::Pow(a, b) => {
            let da = differentiate(a, i);
            if b.is_constant() {
                // b * a^(b-1) * a'
                let lowered = pow((**a).clone(), sub((**b).clone(), Expr::one()));
                mul(mul((**b).clone(), lowered), da)
            } else {
                // a^b * (b' ln a + b a'/a)
                let db = differentiate(b, i);
                let log_term = mul(db, apply(Func::Log, (**a).clone()));
                let base_term = div(mul((**b).clone(), da), (**a).clone());
                mul(e.clone(), add(log_term, base_term))
            }
        }
        Expr::Apply(f, a) => {
            let da = differentiate(a, i);
            if da.is_zero() {
                return Expr::zero();
            }
            let inner = (**a).clone();
            if let Some(custom) = outer(*f, &inner) {
                return mul(custom, da);
            }
            let outer = match f {
                Func::Sin => apply(Func::Cos, inner),
                Func::Cos => neg(apply(Func::Sin, inner)),
                Func::Tan => add(Expr::one(), pow(apply(Func::Tan, inner), constant(2.0))),
                Func::Exp => apply(Func::Exp, inner),
                Func::Log => return div(da, inner),
                Func::Sqrt => {
                    return div(da, mul(constant(2.0), apply(Func::Sqrt, inner)));
                }
            };
            mul(outer, da)
        }
    }
}
