use bergkern::exact;
use bergkern_cli::{parse_weight, ParseError, WeightExpr};
use num_rational::BigRational;
use proptest::prelude::*;

fn rational(lower_exclusive: i64) -> impl Strategy<Value = BigRational> {
    (-50i64..500, 1i64..20)
        .prop_map(|(p, q)| exact::ratio(p, q))
        .prop_filter("in range", move |r| *r > exact::int(lower_exclusive))
}

fn base() -> impl Strategy<Value = WeightExpr> {
    prop_oneof![rational(-1).prop_map(WeightExpr::Standard), rational(0).prop_map(WeightExpr::Gaussian)]
}

fn expr() -> impl Strategy<Value = WeightExpr> {
    (base(), 0usize..5).prop_map(|(b, d)| b.star(d))
}

/// A non-canonical spelling of `e`.
fn spelled(e: &WeightExpr, split: bool) -> String {
    let num = |r: &BigRational| {
        let d = r.denom().to_string();
        if d == "1" || d == "2" || d == "4" || d == "5" {
            format!("{}", exact::to_f64(r))
        } else {
            exact::to_string(r)
        }
    };
    match e {
        WeightExpr::Standard(a) => format!("std:{}", num(a)),
        WeightExpr::Gaussian(g) => format!("gauss:{}", num(g)),
        WeightExpr::Star { depth, base } if split && *depth > 1 => {
            format!("star ( {} )", spelled(&WeightExpr::Star { depth: depth - 1, base: base.clone() }, split))
        }
        WeightExpr::Star { depth, base } => format!(" star^{depth}( {} ) ", spelled(base, split)),
    }
}

proptest! {
    #[test]
    fn canonical_form_round_trips(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_weight(&text).unwrap(), e.clone());
        let w = e.to_weight().unwrap();
        prop_assert_eq!(w.to_string(), text);
    }

    #[test]
    fn spellings_normalize(e in expr(), split in any::<bool>()) {
        prop_assert_eq!(parse_weight(&spelled(&e, split)).unwrap(), e);
    }

    #[test]
    fn alpha_at_or_below_minus_one_is_rejected(p in 1i64..400, q in 1i64..20) {
        let a = exact::ratio(-p - q, q);
        let text = format!("star(std:{})", exact::to_string(&a));
        let rejected = matches!(parse_weight(&text), Err(ParseError::AlphaOutOfRange { offset: 9, .. }));
        prop_assert!(rejected, "{}", text);
    }

    #[test]
    fn truncated_input_is_a_positioned_syntax_error(e in expr(), cut in 0.0f64..1.0) {
        let text = e.to_string();
        let at = (cut * text.len() as f64) as usize;
        let prefix = &text[..at];
        if let Err(ParseError::Syntax { offset, expected }) = parse_weight(prefix) {
            prop_assert!(offset <= prefix.len());
            prop_assert!(!expected.is_empty());
        }
    }
}

#[test]
fn spec_examples() {
    assert_eq!(parse_weight("star^2(std:1/2)").unwrap().to_string(), "star^2(std:1/2)");
    assert!(matches!(parse_weight("std:-1"), Err(ParseError::AlphaOutOfRange { .. })));
    let w = parse_weight("star(gauss:2.0)").unwrap().to_weight().unwrap();
    assert_eq!(w.domain(), bergkern::Domain::Plane);
    assert_eq!(w.base_and_depth().1, 1);
}
