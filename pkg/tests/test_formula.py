import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monadic.formula import (
    BOT,
    And,
    Box,
    Dia,
    Exists,
    Forall,
    Imp,
    LanguageError,
    LexError,
    Logic,
    Neg,
    Or,
    ParseError,
    Var,
    bound_profile,
    is_modal,
    parse_int,
    parse_mod,
    random_formula,
    rename,
    subformulas,
    to_text,
    variables,
    world_cap,
)

p, q = Var("p"), Var("q")


def formulas(modal: bool):
    leaves = st.sampled_from([p, q, Var("r1"), BOT])
    unary = [Neg, Forall, Exists] + ([Box, Dia] if modal else [])

    def extend(children):
        return st.one_of(
            st.builds(lambda c, a: c(a), st.sampled_from(unary), children),
            st.builds(lambda c, a, b: c(a, b), st.sampled_from([And, Or, Imp]), children, children),
        )

    return st.recursive(leaves, extend, max_leaves=12)


class TestParse:
    def test_precedence(self):
        assert parse_int("p & q | p -> q") == Imp(Or(And(p, q), p), q)
        assert parse_int("~p & q") == And(Neg(p), q)
        assert parse_int("A p -> p") == Imp(Forall(p), p)

    def test_associativity(self):
        assert parse_int("p -> q -> p") == Imp(p, Imp(q, p))
        assert parse_int("p & q & p") == And(And(p, q), p)
        assert parse_int("p | q | p") == Or(Or(p, q), p)

    def test_prefix_stacking(self):
        assert parse_mod("[]A<>E~p") == Box(Forall(Dia(Exists(Neg(p)))))

    def test_keywords(self):
        assert parse_int("false") == BOT
        assert parse_int("true") == Imp(BOT, BOT)
        assert parse_mod("true") == Neg(BOT)

    def test_identifiers(self):
        assert parse_int("p_1x") == Var("p_1x")
        with pytest.raises(ParseError):
            parse_int("P")

    def test_modal_rejected_in_int(self):
        with pytest.raises(ParseError) as exc:
            parse_int("p -> []p")
        assert exc.value.pos == 5

    @pytest.mark.parametrize("bad", ["", "p &", "(p", "p q", "p ->", "A", ")"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            parse_mod(bad)

    def test_lex_error_position(self):
        with pytest.raises(LexError) as exc:
            parse_mod("p & #")
        assert exc.value.pos == 4


class TestPrint:
    def test_minimal_parens(self):
        assert to_text(Imp(Imp(p, q), p)) == "(p -> q) -> p"
        assert to_text(Imp(p, Imp(q, p))) == "p -> q -> p"
        assert to_text(And(p, Or(q, p))) == "p & (q | p)"
        assert to_text(Forall(Imp(p, q))) == "A (p -> q)"

    def test_mcas_text(self, mcas):
        assert to_text(mcas) == "A ((p -> A p) -> A p) -> A p"

    @settings(max_examples=300, deadline=None)
    @given(formulas(modal=True))
    def test_roundtrip_mod(self, f):
        assert parse_mod(to_text(f)) == f

    @settings(max_examples=300, deadline=None)
    @given(formulas(modal=False))
    def test_roundtrip_int(self, f):
        assert parse_int(to_text(f)) == f


def _oracle_subformulas(f):
    """Naive set of subtrees, for cross-checking the ordered list."""
    out = {f}
    for c in f.children():
        out |= _oracle_subformulas(c)
    return out


class TestSubformulas:
    @settings(max_examples=200, deadline=None)
    @given(formulas(modal=True))
    def test_matches_set_oracle(self, f):
        subs = subformulas(f)
        assert len(subs) == len(set(subs))
        assert set(subs) == _oracle_subformulas(f)
        assert subs[-1] == f
        pos = {g: i for i, g in enumerate(subs)}
        assert all(pos[c] < pos[g] for g in subs for c in g.children())

    def test_mboxcas_listing(self, mboxcas):
        texts = [to_text(g) for g in subformulas(mboxcas)]
        assert texts == [
            "p",
            "[]p",
            "A p",
            "[]A p",
            "[]p -> []A p",
            "[]([]p -> []A p)",
            "[]([]p -> []A p) -> []A p",
            "A ([]([]p -> []A p) -> []A p)",
            "[]A ([]([]p -> []A p) -> []A p)",
            "[]A ([]([]p -> []A p) -> []A p) -> []A p",
        ]

    def test_variables_order(self):
        assert variables(parse_int("q -> p & q")) == ["q", "p"]

    def test_rename(self):
        assert rename(parse_int("p -> q"), {"p": "q"}) == parse_int("q -> q")

    def test_is_modal(self):
        assert is_modal(parse_mod("A []p"))
        assert not is_modal(parse_mod("A p"))


class TestBounds:
    def test_mcas_plus_ipc(self, mcas):
        prof = bound_profile(mcas, "M+IPC")
        assert (prof.m1, prof.m2, prof.m3) == (0, 2, 3)
        assert (prof.cluster_cap, prof.branch_cap, prof.depth_cap) == (3, 11, 15)
        assert prof.world_cap == 3 * sum(11**l for l in range(16))

    def test_mboxcas_plus_grz(self, mboxcas):
        prof = bound_profile(mboxcas, Logic.M_PLUS_GRZ)
        assert (prof.n, prof.m) == (10, 4)
        assert (prof.cluster_cap, prof.branch_cap, prof.depth_cap) == (1024, 4096, 4097)
        assert prof.world_cap is None
        assert "2^256" in prof.note

    def test_atom(self):
        prof = bound_profile(p, "M+IPC")
        assert (prof.m1, prof.m2, prof.m3) == (0, 0, 0)
        assert (prof.cluster_cap, prof.branch_cap, prof.depth_cap, prof.world_cap) == (1, 0, 0, 1)

    def test_no_caps_for_other_logics(self, mcas):
        prof = bound_profile(mcas, "MIPC")
        assert prof.cluster_cap is None and prof.world_cap is None
        assert "semi-decision" in prof.note

    def test_language_mismatch(self):
        with pytest.raises(LanguageError):
            bound_profile(parse_mod("[]p"), "M+IPC")

    @pytest.mark.parametrize("c,b,d", [(1, 0, 5), (2, 1, 3), (3, 2, 4), (5, 7, 2)])
    def test_world_cap_sum(self, c, b, d):
        assert world_cap(c, b, d) == c * sum(b**l for l in range(d + 1))

    def test_logic_parse(self):
        assert Logic.parse("m_plus_grz") is Logic.M_PLUS_GRZ
        assert Logic.parse("mplus_ipc") is Logic.M_PLUS_IPC
        with pytest.raises(ValueError):
            Logic.parse("K4")


def test_random_formula_respects_depth_and_language():
    rng = random.Random(7)
    for _ in range(200):
        f = random_formula(rng, 3)
        assert not is_modal(f)
        assert set(variables(f)) <= {"p", "q"}
        assert parse_int(to_text(f)) == f
