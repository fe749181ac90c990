import gen
from rszoo.lang import (Arrow, N, Not, Seq, Var, parse_formula, parse_type,
                        pure, show_formula)
from rszoo.translate import (NormalForm, alpha_eq_nf, canon_nf,
                             golden_chain_check, nf_signature, nf_to_formula,
                             parse_nf, show_nf, show_nf_file, simplify,
                             sst_translate)


def tr(src: str, params: dict | None = None, **kw) -> str:
    ps = {k: parse_type(v) for k, v in (params or {}).items()}
    return show_nf(sst_translate(parse_formula(src, params=ps), **kw))


def test_internal_formula_comes_back_verbatim():
    f = parse_formula("(forall n:0) ((exists k <= n) k = n)")
    nf = sst_translate(f)
    assert nf.universals == () and nf.existentials == ()
    assert nf.matrix is f


def test_st_becomes_existential_witness():
    assert tr("st(y)", {"y": "0"}) == "(exists^st w:0) w = y"
    # higher type: extensional equality wrapper
    assert tr("st(f)", {"f": "1"}) == "(exists^st w:1) eq[1](w, f)"


def test_negation_herbrandizes_and_collapses():
    raw = tr("~st(y)", {"y": "0"}, simplify_steps=False)
    assert raw == "(forall^st W:0*) (forall w in W) w != y"
    assert tr("~st(y)", {"y": "0"}) == "(forall^st w:0) w != y"


def test_herbrand_functionals_depend_on_universals():
    # negating a two-block form makes each candidate sequence a
    # functional of the old universals, applied with bracket syntax
    inner = parse_formula(
        "(forall^st x:0) (exists^st y:0) Q(x, y) = 0",
        params={"Q": parse_type("0 -> 0 -> 0")})
    raw = sst_translate(Not(inner), simplify_steps=False)
    shown = show_nf(raw)
    assert "[" in shown and "]" in shown  # candidate application Y[x]
    Y = raw.universals[-1]
    assert isinstance(Y.ty, Arrow) and isinstance(Y.ty.cod, Seq)


def test_disjunction_freshens_collisions():
    nf = sst_translate(parse_formula("st(a) \\/ st(b)",
                                     params={"a": N, "b": N}))
    w1, w2 = nf.existentials
    assert w1.name != w2.name
    assert show_nf(nf) == "(exists^st w:0, w1:0) w = a \\/ w1 = b"


def test_forall_st_over_internal():
    assert tr("(forall^st n:0) f(n) = 0", {"f": "1"}) == \
        "(forall^st w:0) f(w) = 0"


def test_exists_st_over_internal():
    assert tr("(exists^st n:0) f(n) = 0", {"f": "1"}) == \
        "(exists^st w:0) f(w) = 0"


def test_transfer_shape():
    nf = sst_translate(parse_formula(
        "(forall^st f:1) (((forall^st n:0) f(n) = 0)"
        " -> (forall m:0) f(m) = 0)"))
    assert show_nf(canon_nf(nf)) == (
        "(forall^st x0:1) (exists^st y0:0)"
        " x0(y0) != 0 \\/ ((forall v0:0) x0(v0) = 0)")


def test_bounded_quantifier_with_external_body_desugars():
    got = tr("(forall i <= 2) st(i)")
    assert got == "(exists^st ws:0*) (forall i <= 2) (exists w in ws) w = i"


def test_golden_chain_all_green():
    records = golden_chain_check()
    assert len(records) == 14
    for r in records:
        assert r["ok"], f"{r['name']}: got {r['got']}, want {r['expected']}"


def test_golden_chain_stage_names():
    names = [r["name"] for r in golden_chain_check()]
    assert names == ["st", "not-st-raw", "not-st", "or", "forall-mid",
                     "forall", "exists-st-mid", "exists-st", "body",
                     "close-raw", "close-mid", "close", "close-direct",
                     "fixpoint"]


def test_simplify_is_idempotent_on_samples():
    g = gen.generator(7)
    for _ in range(150):
        nf = simplify(g.normal_form({"P": pure(1)}))
        assert alpha_eq_nf(simplify(nf), nf)


def test_internal_formulas_pass_through_1000():
    g = gen.generator(gen.SEED)
    for _ in range(1000):
        f = g.internal_formula({"P": pure(1), "a": N}, depth=6)
        nf = sst_translate(f)
        assert nf.universals == ()
        assert nf.existentials == ()
        assert nf.matrix is f


def test_normal_forms_are_fixpoints_1000():
    g = gen.generator(gen.SEED + 1)
    for _ in range(1000):
        nf = simplify(g.normal_form({"P": pure(1)}))
        back = sst_translate(nf_to_formula(nf))
        assert alpha_eq_nf(back, nf), show_nf(nf)


def test_canonical_renaming_is_stable():
    nf = parse_nf("universals: b:0, a:0\nexistentials: c:1\n"
                  "matrix: c(a) = b")
    c = canon_nf(nf)
    assert show_nf(c) == "(forall^st x0:0, x1:0) (exists^st y0:1) y0(x1) = x0"
    assert show_nf(canon_nf(c)) == show_nf(c)


def test_alpha_eq_nf_respects_block_order():
    a = parse_nf("universals: u:0, v:0\nmatrix: u <= v")
    b = parse_nf("universals: v:0, u:0\nmatrix: v <= u")
    c = parse_nf("universals: u:0, v:0\nmatrix: v <= u")
    assert alpha_eq_nf(a, b)  # same modulo renaming
    assert not alpha_eq_nf(a, c)


def test_signature_sorts_types():
    nf = parse_nf("universals: f:1, n:0\nexistentials: g:1\n"
                  "matrix: f(n) = g(n)")
    assert nf_signature(nf) == (("0", "1"), ("1",))


def test_nf_file_round_trip():
    text = ("universals: f:1, Psi:1 -> 1\n"
            "existentials: y:0, k:0\n"
            "matrix: Psi(f, k) = y -> f(y) = 0\n")
    nf = parse_nf(text)
    assert show_nf_file(nf) == text
    assert alpha_eq_nf(parse_nf(show_nf_file(nf)), nf)


def test_guard_instantiation_under_bounded_prefix():
    # (forall x) (exists w in ws) [x != v \/ m(x, w)]
    # instantiates x := v and then collapses the candidate sequence
    nf = parse_nf(
        "universals: v:0\nexistentials: ws:0*\n"
        "matrix: (forall x:0) (exists w in ws) (x != v \\/ Q(x, w) = 0)",
        {"Q": parse_type("0 -> 0 -> 0")})
    got = simplify(nf)
    want = parse_nf("universals: v:0\nexistentials: w:0\n"
                    "matrix: Q(v, w) = 0",
                    {"Q": parse_type("0 -> 0 -> 0")})
    assert alpha_eq_nf(got, want)


def test_seq_collapse_blocked_across_opposite_flavour():
    # the candidate sequence cannot be collapsed through an
    # existential quantifier: the result would pick per-instance
    nf = parse_nf(
        "universals: W:0*\nmatrix: (exists u:0) (forall w in W) w <= u")
    got = simplify(nf)
    assert got.universals[0].ty == parse_type("0*")
    assert "forall w in W" in show_nf(got)


def test_singleton_candidate_collapses():
    nf = parse_nf(
        "universals: v:0\n"
        "matrix: (exists w in append[0](empty[0], v)) w = v")
    got = simplify(nf)
    assert show_nf(got) == "(forall^st v:0) v = v"


def test_vacuous_quantifiers_dropped():
    nf = parse_nf("matrix: (forall x:0) ((exists i <= 3) 0 = 0)")
    assert show_nf(simplify(nf)) == "0 = 0"


def test_unused_block_variables_dropped():
    nf = parse_nf("universals: x:0, f:1\nexistentials: y:0\n"
                  "matrix: f(f(0)) = 0")
    got = simplify(nf)
    assert show_nf(got) == "(forall^st f:1) f(f(0)) = 0"


def test_matrix_implication_survives_round_trip():
    nf = simplify(parse_nf(
        "universals: x:0\nexistentials: u:0\n"
        "matrix: x = 0 -> u = 1"))
    back = sst_translate(nf_to_formula(nf))
    assert alpha_eq_nf(back, nf)
    assert "->" in show_formula(back.matrix)


def test_approx_at_type_one_unfolds_pointwise():
    nf = sst_translate(parse_formula("approx[1](f, g)",
                                     params={"f": pure(1), "g": pure(1)}))
    assert show_nf(nf) == "(forall^st w:0) f(w) = g(w)"
