import pytest

from rszoo.lang import (Abs, App, Arrow, Atom, BForall, Eq, Forall, ForallSt,
                        N, Not, ParseError, Product, Seq, St, Var, alpha_eq,
                        alpha_eq_f, app, free_vars_f, infer_type, is_internal,
                        lam, num, parse, parse_formula, parse_term,
                        parse_type, pure, show_formula, show_term, show_type,
                        subst_f, substitute, typecheck_f)
from rszoo.lang.parser import parse_document


def test_pure_types_round_trip():
    for n in range(5):
        assert parse_type(str(n)) == pure(n)
        assert show_type(pure(n)) == str(n)


def test_type_printer_structure():
    assert show_type(parse_type("1 -> 1")) == "1 -> 1"
    # pure types print as their numeral
    assert show_type(parse_type("(0 -> 0) -> 0")) == "2"
    assert show_type(Arrow(pure(1), N)) == "2"
    assert show_type(parse_type("0 x 1*")) == "0 x 1*"
    assert show_type(parse_type("(0 x 1)*")) == "(0 x 1)*"
    assert show_type(parse_type("(0 -> 1) -> 1 x 1")) == "(0 -> 1) -> 1 x 1"


def test_type_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_type("0 -> ")
    assert "1:" in str(e.value)


def test_term_application_display():
    f = Var("f", parse_type("0 -> 0 -> 0"))
    t = app(f, num(1), num(2))
    assert show_term(t) == "f(1, 2)"
    assert parse_term("f(1, 2)", params={"f": f.ty}) == t


def test_lambda_round_trip():
    src = "\\x:0. succ(x)"
    t = parse_term(src)
    assert show_term(t) == src
    assert infer_type(t, {}) == parse_type("0 -> 0")


def test_candidate_application_brackets():
    Y = Var("Y", parse_type("0 -> 0*"))
    src = "Y[3]"
    t = parse_term(src, params={"Y": Y.ty})
    assert show_term(t) == src
    assert infer_type(t, {}) == Seq(N)


def test_substitution_avoids_capture():
    # (\y:0. plus(x, y))[x := y] must rename the binder
    t = parse_term("\\y:0. plus(x, y)", params={"x": N})
    s = substitute(t, Var("x", N), Var("y", N))
    assert alpha_eq(s, parse_term("\\z:0. plus(y, z)", params={"y": N}))
    assert not alpha_eq(s, parse_term("\\y:0. plus(y, y)"))


def test_alpha_eq_distinguishes_shadowing():
    a = lam(Var("x", N), lam(Var("x", N), Var("x", N)))
    b = lam(Var("x", N), lam(Var("y", N), Var("x", N)))
    assert not alpha_eq(a, b)
    c = lam(Var("u", N), lam(Var("v", N), Var("v", N)))
    assert alpha_eq(a, c)


def test_formula_round_trip_and_alpha():
    src = "(forall x:0) (exists y:0) plus(x, y) = 3"
    f = parse_formula(src)
    assert show_formula(f) == src
    g = parse_formula("(forall u:0) (exists v:0) plus(u, v) = 3")
    assert alpha_eq_f(f, g)


def test_neq_display():
    f = parse_formula("x != 0", params={"x": N})
    assert f == Not(Atom("=", (Var("x", N), num(0))))
    assert show_formula(f) == "x != 0"


def test_internal_flag():
    assert is_internal(parse_formula("(forall x:0) x = x"))
    assert not is_internal(parse_formula("st(0)"))
    assert not is_internal(parse_formula("(forall^st x:0) x = x"))
    assert not is_internal(
        parse_formula("(forall x:1) approx[1](x, x)"))


def test_bounded_quantifier_kinds():
    f = parse_formula("(forall i <= 4) (exists j < i) j != i")
    bf = f
    assert isinstance(bf, BForall)
    assert bf.kind == "le"
    assert show_formula(f) == "(forall i <= 4) (exists j < i) j != i"


def test_membership_bound_takes_type_from_sequence():
    f = parse_formula("(exists v in s) v = 0", params={"s": Seq(N)})
    assert show_formula(f) == "(exists v in s) v = 0"
    typecheck_f(f, {})


def test_quantifier_scope_is_maximal():
    f = parse_formula("(forall x:0) x = 0 -> x = 1")
    # the implication is inside the quantifier
    assert isinstance(f, Forall)
    assert show_formula(f) == "(forall x:0) x = 0 -> x = 1"


def test_ambiguous_quantifier_operand_rejected():
    with pytest.raises(ParseError) as e:
        parse_formula("x = 0 /\\ (forall y:0) y = y", params={"x": N})
    assert "parenthesize" in str(e.value)
    with pytest.raises(ParseError):
        parse_formula("~(forall y:0) y = y")
    # parenthesized versions are fine
    parse_formula("x = 0 /\\ ((forall y:0) y = y)", params={"x": N})
    parse_formula("~((forall y:0) y = y)")


def test_grouped_binders_share_and_split_types():
    f = parse_formula("(forall x, y:0, f:1) f(x) = y")
    assert show_formula(f) == "(forall x:0, y:0, f:1) f(x) = y"


def test_typecheck_rejects_ill_typed_atoms():
    f = Atom("=", (Var("f", pure(1)), num(0)))
    with pytest.raises(Exception):
        typecheck_f(f, {})


def test_higher_type_equality_wrapper():
    f = parse_formula("eq[1](f, g)", params={"f": pure(1), "g": pure(1)})
    assert isinstance(f, Eq)
    assert f.ty == pure(1)
    assert show_formula(f) == "eq[1](f, g)"


def test_unbound_variable_is_an_error():
    with pytest.raises(ParseError) as e:
        parse_formula("zz = 0")
    assert "zz" in str(e.value)


def test_document_stanzas_expand():
    doc = parse_document(
        """
        zero(f:1) := (forall n:0) f(n) = 0
        main := (forall^st f:1) (zero(f) -> st(f(0)))
        """)
    f = doc.formula("main")
    assert show_formula(f) == (
        "(forall^st f:1) ((forall n:0) f(n) = 0) -> st(f(0))")


def test_document_rejects_duplicates():
    with pytest.raises(ParseError):
        parse_document("a := 0 = 0\na := 1 = 1")


def test_subst_f_capture_avoiding():
    f = parse_formula("(exists y:0) y = x", params={"x": N})
    g = subst_f(f, Var("x", N), Var("y", N))
    assert alpha_eq_f(g, parse_formula("(exists z:0) z = y",
                                       params={"y": N}))


def test_free_vars_of_formula():
    f = parse_formula("(forall x:0) P(x) = y", params={"P": pure(1),
                                                       "y": N})
    assert free_vars_f(f) == {Var("P", pure(1)), Var("y", N)}
