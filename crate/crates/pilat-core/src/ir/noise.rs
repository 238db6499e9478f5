//! Rounding-error modeling: every additive or multiplicative node in the
//! body picks up a fresh parameter bounded by the machine epsilon times a
//! constant magnitude bound for that node.

use num_traits::{Signed, Zero};

use super::{Expr, FloatKind, FloatModel, IrError, ParamDecl, ParamOrigin, Program};
use crate::num::interval::Interval;
use crate::Rat;

/// Where the magnitude bounds B(e) come from.
#[derive(Debug, Clone, Default)]
pub struct NoiseConfig {
    /// Uniform bound applied to every rounded node when set.
    pub magnitude_bound: Option<Rat>,
}

/// Wraps every `+`, `-`, `*` node `e` of the body as `e + E` with a fresh
/// parameter `E` in `[-eps*B(e), eps*B(e)]`. `B(e)` is the configured global
/// bound, else the magnitude of `e` interval-evaluated over the declared
/// initial region. Under the real model the program is returned unchanged.
pub fn inject_rounding_noise(
    p: &Program,
    model: &FloatModel,
    cfg: &NoiseConfig,
) -> Result<Program, IrError> {
    if model.kind == FloatKind::Real || model.epsilon.is_zero() {
        return Ok(p.clone());
    }
    let mut out = p.clone();
    let mut ctx = Ctx {
        eps: model.epsilon.clone(),
        cfg,
        program: p,
        params: p.params.clone(),
        counter: 0,
    };
    let mut body = Vec::with_capacity(p.body.len());
    for expr in &p.body {
        body.push(ctx.rewrite(expr)?);
    }
    out.params = ctx.params;
    out.body = body;
    Ok(out)
}

struct Ctx<'a> {
    eps: Rat,
    cfg: &'a NoiseConfig,
    program: &'a Program,
    params: Vec<ParamDecl>,
    counter: usize,
}

impl Ctx<'_> {
    fn rewrite(&mut self, e: &Expr) -> Result<Expr, IrError> {
        Ok(match e {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => e.clone(),
            // Negation is exact in IEEE arithmetic; no parameter.
            Expr::Neg(a) => Expr::Neg(Box::new(self.rewrite(a)?)),
            Expr::Add(a, b) => {
                let inner = Expr::Add(Box::new(self.rewrite(a)?), Box::new(self.rewrite(b)?));
                self.wrap(inner)?
            }
            Expr::Sub(a, b) => {
                let inner = Expr::Sub(Box::new(self.rewrite(a)?), Box::new(self.rewrite(b)?));
                self.wrap(inner)?
            }
            Expr::Mul(a, b) => {
                let inner = Expr::Mul(Box::new(self.rewrite(a)?), Box::new(self.rewrite(b)?));
                self.wrap(inner)?
            }
        })
    }

    fn wrap(&mut self, inner: Expr) -> Result<Expr, IrError> {
        let bound = match &self.cfg.magnitude_bound {
            Some(b) => b.abs(),
            None => self.derive_bound(&inner)?,
        };
        let radius = &bound * &self.eps;
        self.counter += 1;
        let name = self.fresh_name();
        self.params.push(ParamDecl {
            name,
            lo: -radius.clone(),
            hi: radius,
            origin: ParamOrigin::Rounding,
        });
        Ok(Expr::Add(Box::new(inner), Box::new(Expr::Param(self.params.len() - 1))))
    }

    fn fresh_name(&self) -> String {
        let mut i = self.counter;
        loop {
            let cand = format!("E{i}");
            if !self.params.iter().any(|p| p.name == cand)
                && !self.program.vars.iter().any(|v| *v == cand)
            {
                return cand;
            }
            i += 1;
        }
    }

    /// Magnitude of the node over the initial region (parameters range over
    /// their declared intervals, including noise already injected below).
    fn derive_bound(&self, e: &Expr) -> Result<Rat, IrError> {
        let iv = self.interval_of(e)?;
        Ok(iv.abs_sup())
    }

    fn interval_of(&self, e: &Expr) -> Result<Interval<Rat>, IrError> {
        Ok(match e {
            Expr::Const(c) => Interval::point(c.clone()),
            Expr::Var(i) => match self.program.init.get(i) {
                Some(b) => Interval::new(b.lo.clone(), b.hi.clone()),
                None => {
                    return Err(IrError::MissingMagnitudeBound {
                        expr: self.render(e),
                    })
                }
            },
            Expr::Param(j) => {
                let d = &self.params[*j];
                Interval::new(d.lo.clone(), d.hi.clone())
            }
            Expr::Add(a, b) => self.interval_of(a)?.add(&self.interval_of(b)?),
            Expr::Sub(a, b) => self.interval_of(a)?.sub(&self.interval_of(b)?),
            Expr::Neg(a) => self.interval_of(a)?.neg(),
            Expr::Mul(a, b) => self.interval_of(a)?.mul(&self.interval_of(b)?),
        })
    }

    fn render(&self, e: &Expr) -> String {
        super::pretty::render_expr(e, &self.program.vars, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use crate::Int;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn real_model_is_identity() {
        let p = parse("while * do x := x + x; done").unwrap();
        let q = inject_rounding_noise(&p, &FloatModel::real(), &NoiseConfig::default()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn add_under_double_with_global_bound() {
        let p = parse("while * do x := x + y; y := y; done").unwrap();
        let cfg = NoiseConfig { magnitude_bound: Some(rat(16, 1)) };
        let q = inject_rounding_noise(&p, &FloatModel::double(), &cfg).unwrap();
        assert_eq!(q.params.len(), 1);
        let d = &q.params[0];
        let expect = rat(16, 1) * Rat::new(Int::from(1), Int::from(1u64 << 52));
        assert_eq!(d.hi, expect);
        assert_eq!(d.lo, -expect);
        assert_eq!(d.origin, ParamOrigin::Rounding);
    }

    #[test]
    fn mul_under_single_with_global_bound() {
        let p = parse("while * do x := x * y; y := y; done").unwrap();
        let cfg = NoiseConfig { magnitude_bound: Some(rat(4, 1)) };
        let q = inject_rounding_noise(&p, &FloatModel::single(), &cfg).unwrap();
        assert_eq!(q.params.len(), 1);
        let expect = rat(4, 1) * Rat::new(Int::from(1), Int::from(1u64 << 23));
        assert_eq!(q.params[0].hi, expect);
    }

    #[test]
    fn bounds_derived_from_init_region() {
        let p = parse("init x in [-1, 1]\ninit y in [-1, 1]\nwhile * do x := x + y; y := y; done")
            .unwrap();
        let q = inject_rounding_noise(&p, &FloatModel::double(), &NoiseConfig::default()).unwrap();
        // |x + y| <= 2 over the box.
        let expect = rat(2, 1) * Rat::new(Int::from(1), Int::from(1u64 << 52));
        assert_eq!(q.params[0].hi, expect);
    }

    #[test]
    fn missing_bound_is_an_error() {
        let p = parse("while * do x := x + x; done").unwrap();
        let err = inject_rounding_noise(&p, &FloatModel::double(), &NoiseConfig::default());
        assert!(matches!(err, Err(IrError::MissingMagnitudeBound { .. })));
    }
}
