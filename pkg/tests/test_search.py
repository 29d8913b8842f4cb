import random

import pytest

from monadic.formula import LanguageError, Logic, parse_int, parse_mod, random_formula
from monadic.frame import CapExceeded, classify
from monadic.search import (
    EXHAUSTED,
    NOT_PROVABLE,
    PROVABLE,
    decide,
    search,
    search_countermodel,
    verify_translation_chain,
)


class TestSearch:
    def test_mcas_mipc(self, mcas):
        cm = search_countermodel(mcas, Logic.MIPC, 2)
        assert cm is not None and cm.frame.size == 2
        assert not classify(cm.frame).clean_clusters
        assert cm.refutes(mcas)
        assert cm.valuation == {"p": frozenset({"w1"})} and cm.world == "w0"

    def test_mboxcas_mgrz(self, mboxcas):
        cm = search_countermodel(mboxcas, "MGrz", 2)
        assert cm.refutes(mboxcas)
        assert cm.valuation == {"p": frozenset({cm.frame.worlds[1]})}

    @pytest.mark.parametrize("logic", list(Logic))
    def test_tautology(self, logic):
        assert search_countermodel(parse_int("p -> p"), logic, 3) is None

    @pytest.mark.parametrize("threads", [2, 3, 4, 8])
    def test_threads_identical(self, threads):
        rng = random.Random(9)
        for _ in range(15):
            f = random_formula(rng, 3)
            one = search(f, "MIPC", 3)
            many = search(f, "MIPC", 3, threads=threads)
            assert one.countermodel == many.countermodel

    def test_monotone_in_cap(self):
        rng = random.Random(10)
        for _ in range(20):
            f = random_formula(rng, 3)
            found = None
            for k in (1, 2, 3):
                cm = search_countermodel(f, "M+IPC", k)
                if found is not None:
                    assert cm is not None and cm.frame == found.frame and cm.valuation == found.valuation
                found = found or cm

    def test_language_and_cap_errors(self, monkeypatch):
        with pytest.raises(LanguageError):
            search(parse_mod("[]p"), "MIPC", 2)
        with pytest.raises(ValueError):
            search(parse_int("p"), "MIPC", 0)
        monkeypatch.setenv("WORKBENCH_MAX_STATES", "50")
        with pytest.raises(CapExceeded):
            search(parse_int("p"), "MS4", 3)


class TestDecide:
    def test_mcas_not_refuted(self, mcas):
        v = decide(mcas, "M+IPC", 3)
        assert v.outcome in (PROVABLE, EXHAUSTED)
        assert v.outcome == EXHAUSTED and v.searched == 3 and not v.complete

    def test_trivial(self):
        v = decide(parse_int("p -> p"), "M+Grz", 2)
        assert v.countermodel is None and v.outcome != NOT_PROVABLE

    def test_provable_reaches_cap(self):
        v = decide(parse_int("p -> p"), "M+IPC")
        assert v.outcome == PROVABLE and v.complete and v.searched == v.world_cap == 2

    def test_s5_forall_mgl(self):
        v = decide(parse_mod("A p -> p"), "MGL", 2)
        assert v.outcome == EXHAUSTED and v.countermodel is None
        assert "semi-decision" in v.note

    def test_not_provable(self):
        v = decide(parse_int("p | ~p"), "M+IPC", 3)
        assert v.outcome == NOT_PROVABLE
        assert v.countermodel.refutes(parse_int("p | ~p"))
        d = v.as_dict()
        assert d["outcome"] == NOT_PROVABLE and d["countermodel"]["world"] == v.countermodel.world

    def test_negation_counts_toward_cap(self):
        v = decide(parse_int("p | ~p"), "M+IPC")
        assert v.profile.m3 == 1 and v.world_cap == 2
        assert v.outcome == NOT_PROVABLE

    def test_provable_verdicts_are_sound(self):
        rng = random.Random(0)
        checked = 0
        for i in range(400):
            modal = i % 2 == 1
            logic = "M+Grz" if modal else "M+IPC"
            f = random_formula(rng, 2 if modal else 3, modal=modal)
            cap = decide(f, logic, 1).profile.world_cap
            if cap is not None and cap < 3 and decide(f, logic).outcome == PROVABLE:
                checked += 1
                assert search_countermodel(f, logic, 3) is None, f
        assert checked

    def test_default_semi_cap(self):
        v = decide(parse_int("p -> p"), "MIPC")
        assert v.searched == 3 and "default" in v.note

    def test_overflow_note(self, mboxcas):
        v = decide(mboxcas, "M+Grz", 2)
        assert v.world_cap is None and v.outcome == EXHAUSTED and "2^256" in v.note


class TestChain:
    def test_bot(self):
        r = verify_translation_chain(parse_int("false"), 1)
        assert r.statuses == (True, True, True)
        assert all(w.frame.size == 1 for w in (r.int_witness, r.grz_witness, r.gl_witness))
        assert r.transfers_ok

    def test_identity(self):
        r = verify_translation_chain(parse_int("p -> p"), 3)
        assert r.statuses == (False, False, False)

    def test_forall(self):
        r = verify_translation_chain(parse_int("A p"), 2)
        assert r.statuses == (True, True, True) and r.agree and r.transfers_ok

    def test_modal_rejected(self):
        with pytest.raises(LanguageError):
            verify_translation_chain(parse_mod("[]p"), 2)
