import numpy as np
import pytest

from koopmem.edmd import SpectralSignature
from koopmem.memory import MemoryBank, MemoryRecord


def make_sig(t, eigenvalues=(0.9,), modes=None, anchor=1.0, fallback=False):
    eigenvalues = np.asarray(eigenvalues, complex)
    if modes is None:
        modes = np.ones((len(eigenvalues), 1), complex)
    return SpectralSignature(eigenvalues=eigenvalues,
                             scaled_modes=np.asarray(modes, complex),
                             t=t, anchor=anchor, fallback=fallback)


class TestStore:
    def test_append(self):
        bank = MemoryBank()
        bank.add(make_sig(10))
        assert len(bank) == 1

    def test_out_of_order_rejected(self):
        bank = MemoryBank()
        bank.add(make_sig(10))
        with pytest.raises(ValueError):
            bank.add(make_sig(10))
        with pytest.raises(ValueError):
            bank.add(make_sig(5))

    def test_capacity_triggers_eviction(self):
        bank = MemoryBank(capacity=2)
        for t in (1, 2, 3):
            bank.add(make_sig(t))
        assert len(bank) == 2
        assert [r.t_prime for r in bank.records] == [2, 3]


class TestFindMatch:
    def test_identical_signature_matches(self):
        bank = MemoryBank()
        sig = make_sig(10)
        bank.add(sig)
        match = bank.find_match(make_sig(50), t=50, delta=5,
                                eps_lambda=0.1, eps_v=0.1)
        assert match is not None
        assert match.t_min == 10
        assert match.combined == 0.0

    def test_threshold_gate(self):
        bank = MemoryBank()
        bank.add(make_sig(10, eigenvalues=(0.5,)))
        assert bank.find_match(make_sig(50, eigenvalues=(0.9,)), t=50,
                               delta=5, eps_lambda=0.1, eps_v=1.0) is None

    def test_mode_gate(self):
        bank = MemoryBank()
        bank.add(make_sig(10, modes=[[5.0]]))
        assert bank.find_match(make_sig(50, modes=[[-5.0]]), t=50, delta=5,
                               eps_lambda=0.5, eps_v=0.5) is None

    def test_minimum_combined_wins(self):
        bank = MemoryBank()
        bank.add(make_sig(10, eigenvalues=(0.95,)))
        bank.add(make_sig(20, eigenvalues=(0.92,)))
        match = bank.find_match(make_sig(50), t=50, delta=5,
                                eps_lambda=0.1, eps_v=0.5)
        assert match.t_min == 20

    def test_no_lookahead(self):
        bank = MemoryBank()
        bank.add(make_sig(45))
        bank.add(make_sig(46))
        match = bank.find_match(make_sig(50), t=50, delta=5,
                                eps_lambda=0.1, eps_v=0.1)
        assert match is None  # both violate t' + delta < t

    def test_tie_breaks_to_most_recent(self):
        bank = MemoryBank()
        bank.add(make_sig(10))
        bank.add(make_sig(20))
        match = bank.find_match(make_sig(80), t=80, delta=5,
                                eps_lambda=0.1, eps_v=0.1)
        assert match.t_min == 20

    def test_empty_bank(self):
        bank = MemoryBank()
        assert bank.find_match(make_sig(5), t=5, delta=1,
                               eps_lambda=1.0, eps_v=1.0) is None

    def test_fallback_signature_never_matches(self):
        bank = MemoryBank()
        bank.add(make_sig(10))
        assert bank.find_match(make_sig(50, fallback=True), t=50, delta=5,
                               eps_lambda=1.0, eps_v=1.0) is None

    def test_matched_count_incremented(self):
        bank = MemoryBank()
        bank.add(make_sig(10))
        bank.find_match(make_sig(50), t=50, delta=5, eps_lambda=0.1, eps_v=0.1)
        assert bank.records[0].matched_count == 1

    def test_result_invariant_under_storage_order(self):
        recs = [MemoryRecord(t_prime=t, signature=make_sig(t, eigenvalues=(lam,)))
                for t, lam in ((10, 0.93), (20, 0.95), (30, 0.91))]
        a, b = MemoryBank(), MemoryBank()
        a.records = list(recs)
        b.records = list(reversed(recs))
        probe = make_sig(90)
        ra = a.find_match(probe, t=90, delta=5, eps_lambda=0.2, eps_v=0.5)
        rb = b.find_match(probe, t=90, delta=5, eps_lambda=0.2, eps_v=0.5)
        assert ra == rb

    def test_strict_zero_thresholds_match_nothing(self):
        bank = MemoryBank()
        bank.add(make_sig(10))
        # strictly-less-than comparison: even an exact duplicate fails eps=0
        tiny = np.nextafter(0.0, 1.0)
        assert bank.find_match(make_sig(50, eigenvalues=(0.90001,)), t=50,
                               delta=5, eps_lambda=tiny, eps_v=tiny) is None


class TestEvict:
    def test_least_matched_evicted(self):
        bank = MemoryBank(capacity=1)
        a = MemoryRecord(t_prime=1, signature=make_sig(1), matched_count=3)
        b = MemoryRecord(t_prime=2, signature=make_sig(2), matched_count=0)
        bank.records = [a, b]
        bank.evict()
        assert bank.records == [a]

    def test_tie_evicts_oldest(self):
        bank = MemoryBank(capacity=1)
        a = MemoryRecord(t_prime=1, signature=make_sig(1))
        b = MemoryRecord(t_prime=2, signature=make_sig(2))
        bank.records = [a, b]
        bank.evict()
        assert bank.records == [b]

    def test_unbounded_by_default(self):
        bank = MemoryBank()
        for t in range(100):
            bank.add(make_sig(t))
        assert len(bank) == 100


class TestSnapshot:
    def test_jsonl_roundtrip(self, tmp_path):
        bank = MemoryBank()
        rng = np.random.default_rng(0)
        for t in (5, 9, 14):
            ev = rng.normal(size=3) + 1j * rng.normal(size=3)
            modes = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
            bank.add(make_sig(t, eigenvalues=ev, modes=modes, anchor=float(t)))
        bank.records[1].matched_count = 4
        path = tmp_path / "bank.jsonl"
        bank.to_jsonl(path)
        back = MemoryBank.from_jsonl(path)
        assert len(back) == 3
        for orig, rec in zip(bank.records, back.records):
            assert rec.t_prime == orig.t_prime
            assert rec.matched_count == orig.matched_count
            assert np.array_equal(rec.signature.eigenvalues,
                                  orig.signature.eigenvalues)
            assert np.array_equal(rec.signature.scaled_modes,
                                  orig.signature.scaled_modes)
            assert rec.signature.anchor == orig.signature.anchor
