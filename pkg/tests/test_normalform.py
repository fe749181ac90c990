import pytest
from rszoo.interp import eval_formula, parse_model_config
from rszoo.lang import parse_formula, parse_type, show_formula
from rszoo.normalform import (NormalFormError, contrapose_accept,
                              herbrandize_choice, monotone_in_witness,
                              normalize_principle, prenex_to_normal,
                              resolve_approx, trans_instance, uniformize)
from rszoo.translate import NormalForm, nf_signature, nf_to_formula, show_nf

DNR_BASE = ("(forall Z:1)(exists d:1)(forall e:0)(forall s:0)"
            "(run(Z, e, s) = 0 \\/ ~(succ(d(e)) = run(Z, e, s)))")


def small_model(extra=""):
    return parse_model_config(
        "cap = 3\nomega = 2\n"
        "table Z0: 0 1 0 0 [st]\n"
        "bind Psi0: psi_theta [st]\n"
        "bind Xi0: xi_search Psi0 [st]\n" + extra)


# -- uniformize ---------------------------------------------------------------

def test_uniformize_flips_quantifiers():
    up = uniformize(parse_formula(DNR_BASE))
    assert show_formula(up.uniform) == (
        "(exists Psi:1 -> 1) (forall Z:1, e:0, s:0) run(Z, e, s) = 0 "
        "\\/ succ(Psi(Z, e)) != run(Z, e, s)")
    assert [v.name for v in up.functionals] == ["Psi"]


def test_uniformize_strong_adds_extensionality():
    up = uniformize(parse_formula(DNR_BASE))
    assert show_formula(up.strong) == (
        "(exists^st Psi:1 -> 1) ((forall^st Z:1) (forall e:0, s:0) "
        "run(Z, e, s) = 0 \\/ succ(Psi(Z, e)) != run(Z, e, s)) /\\ "
        "((forall^st X:1, Y:1) approx[1](X, Y) -> "
        "approx[1](Psi(X), Psi(Y)))")


def test_uniformize_without_existential_degenerates():
    up = uniformize(parse_formula("(forall X:1)(forall n:0) X(n) <= 1"))
    assert up.functionals == ()
    assert show_formula(up.strong) == "(forall^st X:1, n:0) X(n) <= 1"


def test_uniformize_rejects_other_shapes():
    with pytest.raises(NormalFormError, match="contrapose_accept"):
        uniformize(parse_formula("(exists y:0) y = 0"))
    with pytest.raises(NormalFormError, match="internal"):
        uniformize(parse_formula("(forall X:1)(exists d:1) st(d(0))"))


def test_contrapose_accepts_implication_statements():
    up = contrapose_accept(parse_formula(
        "(forall g:1)(((forall n:0) g(n) <= 1) -> "
        "(exists y <= g(0)) g(y) = 0)"))
    assert show_formula(up.uniform) == (
        "(exists Psi:2) (forall g:1) ((forall n:0) g(n) <= 1) -> "
        "Psi(g) <= g(0) /\\ g(Psi(g)) = 0")
    up2 = contrapose_accept(parse_formula(
        "(forall g:1)(((forall n:0) g(n) <= 1) -> g(0) <= 1)"))
    assert up2.functionals == ()
    with pytest.raises(NormalFormError, match="implication"):
        contrapose_accept(parse_formula("(forall g:1)(exists y:0) g(y) = 0"))


# -- resolve_approx -----------------------------------------------------------

def test_resolve_approx_type_one():
    up = uniformize(parse_formula(DNR_BASE))
    out = resolve_approx(up.strong)
    assert show_formula(out).endswith(
        "((forall^st X:1, Y:1, k:0) (exists^st N:0) "
        "initseg(X, N) = initseg(Y, N) -> "
        "initseg(Psi(X), k) = initseg(Psi(Y), k))")


def test_resolve_approx_type_zero_is_plain_equality():
    f = parse_formula(
        "(forall^st a:0, b:0)(approx[0](a, b) -> approx[0](a, b))")
    out = resolve_approx(f)
    assert show_formula(out) == "(forall^st a:0, b:0) a = b -> a = b"


def test_resolve_approx_diagonalizes_two_argument_tables():
    base = parse_formula(
        "(forall R:0 -> 0 -> 0)(exists d:1)(forall i:0)(R(i, d(i)) = 1)")
    out = show_formula(resolve_approx(uniformize(base).strong))
    assert "initseg(\\i1:0. X(nunl(i1), nunr(i1)), N)" in out


def test_resolve_approx_rejects_unencodable_types():
    f = parse_formula(
        "(forall^st F:2, G:2)(approx[2](F, G) -> approx[0](F(\\x:0. x), "
        "G(\\x:0. x)))")
    with pytest.raises(NormalFormError, match="no prefix encoding"):
        resolve_approx(f)


def test_resolve_approx_rejects_stray_approx():
    f = parse_formula("approx[1](f, g)",
                      params={"f": parse_type("1"), "g": parse_type("1")})
    with pytest.raises(NormalFormError, match="outside"):
        resolve_approx(f)


# -- herbrandize_choice ---------------------------------------------------------

def test_herbrandize_collapses_numeric_witness():
    f = parse_formula(
        "(forall^st X:1, k:0)(exists^st N:0)"
        "(initseg(X, N) = initseg(X, N))")
    out = herbrandize_choice(f)
    assert show_formula(out) == (
        "(exists^st Xi:1 -> 1) (forall^st X:1, k:0) "
        "initseg(X, Xi(X, k)) = initseg(X, Xi(X, k))")


def test_herbrandize_records_sequence_stage():
    f = parse_formula("(forall^st X:1)(exists^st N:0)(X(N) = 0)")
    steps = []
    out = herbrandize_choice(f, steps=steps)
    labels = [l for l, _ in steps]
    assert labels == ["candidate-sequence"]
    assert "(exists N in W(X))" in show_formula(steps[0][1])
    assert show_formula(out) == \
        "(exists^st Xi:2) (forall^st X:1) X(Xi(X)) = 0"


def test_herbrandize_keeps_sequences_at_higher_type():
    f = parse_formula("(forall^st X:1)(exists^st g:1)(g(0) = X(0))")
    out = show_formula(herbrandize_choice(f))
    assert out == ("(exists^st W:1 -> 1*) (forall^st X:1) "
                   "(exists g in W(X)) g(0) = X(0)")


# -- prenex ---------------------------------------------------------------------

def test_prenex_consequent_first_order():
    base = parse_formula(DNR_BASE)
    nf = normalize_principle(base)
    assert [v.name for v in nf.universals] == ["f", "Psi", "Xi"]
    assert [v.name for v in nf.existentials] == ["y", "Z", "X", "Y", "k"]
    assert nf_signature(nf) == (
        ("1", "1 -> 1", "1 -> 1 -> 1"),
        ("0", "0", "1", "1", "1"))


def test_prenex_renames_clashes():
    f = parse_formula(
        "((exists^st x:0) x = 0) -> (forall^st x:0)(exists^st y:0) y <= x")
    nf = prenex_to_normal(f)
    names = [v.name for v in nf.universals + nf.existentials]
    assert len(set(names)) == len(names)


def test_prenex_reports_trapped_standard_quantifier():
    f = parse_formula("(forall n:0)(exists^st y:0) y = n")
    with pytest.raises(NormalFormError, match="trapped.*'n'"):
        prenex_to_normal(f)


def test_prenex_leaves_internal_matrix_alone():
    f = parse_formula("(forall^st w:0)(forall n:0)(exists m:0) m = n")
    nf = prenex_to_normal(f)
    assert [v.name for v in nf.universals] == ["w"]
    assert show_formula(nf.matrix) == "(forall n:0) (exists m:0) m = n"


# -- the composed pipeline --------------------------------------------------------

EXPECTED_DNR_NF = (
    "(forall^st f:1, Psi:1 -> 1, Xi:1 -> 1 -> 1) "
    "(exists^st y:0, Z:1, X:1, Y:1, k:0) "
    "((forall e:0, s:0) run(Z, e, s) = 0 \\/ succ(Psi(Z, e)) != "
    "run(Z, e, s)) /\\ (initseg(X, Xi(X, Y, k)) = initseg(Y, Xi(X, Y, k)) "
    "-> initseg(Psi(X), k) = initseg(Psi(Y), k)) -> "
    "((exists x:0) f(x) = 0) -> (exists z <= y) f(z) = 0")


def test_pipeline_output_frozen():
    nf = normalize_principle(parse_formula(DNR_BASE))
    assert show_nf(nf) == EXPECTED_DNR_NF


def test_pipeline_stage_labels():
    steps = []
    normalize_principle(parse_formula(DNR_BASE), steps=steps)
    assert [l for l, _ in steps] == [
        "input", "uniform", "strong", "prefix-resolved",
        "candidate-sequence", "choice-collapsed", "implication",
        "normal-form"]


def test_pipeline_truth_equivalent_when_true():
    steps = []
    nf = normalize_principle(parse_formula(DNR_BASE), steps=steps)
    imp = dict(steps)["implication"]
    m = small_model()
    assert eval_formula(m, imp) is True
    assert eval_formula(m, nf_to_formula(nf)) is True


def test_pipeline_truth_equivalent_when_false():
    # a standard table whose only zero lies beyond the standard cut
    # falsifies the bounded-zero target, hence both forms
    steps = []
    nf = normalize_principle(parse_formula(DNR_BASE), steps=steps)
    imp = dict(steps)["implication"]
    m = small_model("table f0: 1 1 1 0 [st]\n")
    assert eval_formula(m, imp) is False
    assert eval_formula(m, nf_to_formula(nf)) is False


# -- transfer target ---------------------------------------------------------------

def test_transfer_normal_shape():
    ti = trans_instance()
    assert show_nf(ti.normal) == (
        "(forall^st f:1) (exists^st y:0) ((exists x:0) f(x) = 0) -> "
        "(exists z <= y) f(z) = 0")
    assert show_formula(ti.transfer) == (
        "(forall^st f:1) ((forall^st x:0) f(x) != 0) -> "
        "(forall x:0) f(x) != 0")


def test_transfer_equivalence_holds_in_models():
    ti = trans_instance()
    assert ti.check_equivalence(small_model()) is True
    # still agree when both shapes go false
    assert ti.check_equivalence(small_model("table f0: 1 1 1 0 [st]\n"))
    assert ti.equivalence_checked


# -- monotonicity guard --------------------------------------------------------------

def test_monotone_guard_accepts_bounded_search_matrix():
    ti = trans_instance()
    assert monotone_in_witness(small_model(), ti.normal, "y") is True


def test_monotone_guard_rejects_exact_matrix():
    f = parse_formula("(exists^st y:0) y = 1")
    nf = prenex_to_normal(f)
    assert monotone_in_witness(small_model(), nf, "y") is False


def test_monotone_guard_needs_numeric_witness():
    f = parse_formula("(exists^st g:1) g(0) = 0")
    nf = prenex_to_normal(f)
    with pytest.raises(NormalFormError):
        monotone_in_witness(small_model(), nf, "g")
