//! Textual format for operators: the `.hop` surface syntax, its parser,
//! and the canonical printer.
//!
//! A unit declares fields, dimensions, parameters and abstract functions,
//! then gives the leading matrices (`gx`, `gy`, one per declared
//! dimension), the jet-linear `tail`, the ultralocal `omega`, optional
//! `rewrite` rules for derivatives of abstract functions, and an optional
//! `perturb { ... }` block used by necessity fixtures. Comments run from
//! `#` to end of line; whitespace and newlines are insignificant between
//! tokens.

mod lexer;
mod parser;
mod printer;

pub use lexer::ParseError;
pub use parser::{parse, ParsedUnit, SourceUnit};
pub use printer::{expr_text, print};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    const P2_TEXT: &str = "\
# two-component form with rational tail
fields u v
dims x y
func F(v)
gx = [[1, 0], [0, 0]]
gy = [[v, 0], [0, 0]]
tail = [[1/2*v_y, -(v_x + v*v_y)/u], [(v_x + v*v_y)/u, 0]]
omega = [[0, F(v)/u], [-F(v)/u, 0]]
";

    #[test]
    fn parses_p2_to_the_catalog_operator() {
        let parsed = parse(P2_TEXT).unwrap();
        let p2 = crate::catalog::get("P2").unwrap();
        let family = p2.cases[0].instantiate(&p2.op);
        for alpha in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(parsed.spec.g[alpha]
                        .at(i, j)
                        .alg_eq(family.g[alpha].at(i, j)));
                    for k in 0..2 {
                        assert!(parsed.spec.b[alpha]
                            .at(i, j, k)
                            .alg_eq(family.b[alpha].at(i, j, k)));
                    }
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!(parsed.spec.omega.at(i, j).alg_eq(family.omega.at(i, j)));
            }
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let parsed = parse(P2_TEXT).unwrap();
        let text = print(&parsed.spec);
        let again = parse(&text).unwrap();
        assert!(again.spec.omega.at(0, 1).alg_eq(parsed.spec.omega.at(0, 1)));
        assert!(again.spec.b[1]
            .at(0, 1, 1)
            .alg_eq(parsed.spec.b[1].at(0, 1, 1)));
    }

    #[test]
    fn empty_tail_means_zero_b() {
        let text = "fields u v\ndims x y\ngx = [[1,0],[0,1]]\n";
        let parsed = parse(text).unwrap();
        assert!(parsed.spec.tail().is_zero());
        assert!(parsed.spec.omega.is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("fields u v\ndims x y\ngx = [[1, $], [0, 0]]\n").unwrap_err();
        assert_eq!((err.line, err.col), (3, 11));
        let err = parse("fields u v\ndims x y\ngx = [[1, q], [0, 0]]\n").unwrap_err();
        assert!(err.message.contains("undeclared identifier"));
        assert_eq!((err.line, err.col), (3, 11));
    }

    #[test]
    fn nonlinear_tail_reported_at_conversion() {
        let err = parse("fields u v\ndims x y\ntail = [[u_x*v_y, 0], [0, 0]]\n").unwrap_err();
        assert!(err.message.contains("tail"));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let err = parse("fields u v\ndims x y\ngx = [[1, 0, 0], [0, 0, 0]]\n").unwrap_err();
        assert!(err.message.contains("2x2"));
    }

    #[test]
    fn perturb_block_binds_functions_and_params() {
        let text = "\
fields u v
dims x y
param eps
func F(v)
omega = [[0, F(v)], [-F(v), 0]]
perturb { F = v^2 + eps }
";
        let parsed = parse(text).unwrap();
        assert_eq!(parsed.unit.perturb.len(), 1);
        let (atom, image) = parsed.unit.perturb.iter().next().unwrap();
        assert_eq!(atom, &crate::expr::Atom::func("F", &[1]));
        let v = Expr::field(1);
        assert!(image.alg_eq(&v.int_pow(2).unwrap().add(&Expr::param("eps"))));
    }

    #[test]
    fn rewrite_rules_parse_and_apply() {
        let text = "\
fields u v w
dims x y
func G(v, w)
func F1(v, w)
rewrite G_w = F1(v, w)
omega = [[0, G(v,w), 0], [-G(v,w), 0, 0], [0, 0, 0]]
";
        let parsed = parse(text).unwrap();
        let d = parsed.spec.omega.at(0, 1).diff(2, &parsed.spec.rewrites);
        assert!(d.alg_eq(&Expr::func("F1", &[1, 2])));
    }

    #[test]
    fn deep_nesting_is_rejected_not_crashing() {
        let mut text = String::from("fields u v\ndims x y\ngx = [[");
        for _ in 0..10_000 {
            text.push('(');
        }
        let err = parse(&text).unwrap_err();
        assert!(err.message.contains("deep") || err.message.contains("expected"));
    }

    #[test]
    fn huge_exponent_is_rejected() {
        let err = parse("fields u v\ndims x y\ngx = [[u^99999, 0], [0, 0]]\n").unwrap_err();
        assert!(err.message.contains("exponent"));
    }
}
