"""Episodic memory bank of past spectral signatures."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .distances import mode_distance, wasserstein1
from .edmd import SpectralSignature


@dataclass
class MemoryRecord:
    """One stored window: its end index, signature, and match bookkeeping."""

    t_prime: int
    signature: SpectralSignature
    matched_count: int = 0
    inserted_at: int = 0


@dataclass(frozen=True)
class MatchResult:
    t_min: int
    d_lambda: float
    d_v: float
    combined: float


class MemoryBank:
    """Append-only store of signatures, scanned linearly for matches.

    Records are kept strictly ordered by t_prime. With a capacity set,
    exceeding it evicts the record with the fewest matches (oldest first
    on ties); by default the bank grows without bound.
    """

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be >= 1 when set")
        self.capacity = capacity
        self.records: list[MemoryRecord] = []
        self._insert_counter = 0

    def __len__(self) -> int:
        return len(self.records)

    def store(self, rec: MemoryRecord):
        if self.records and rec.t_prime <= self.records[-1].t_prime:
            raise ValueError(
                f"out-of-order insert: t_prime={rec.t_prime} <= "
                f"{self.records[-1].t_prime}")
        rec.inserted_at = self._insert_counter
        self._insert_counter += 1
        self.records.append(rec)
        if self.capacity is not None and len(self.records) > self.capacity:
            self.evict()

    def add(self, sig: SpectralSignature):
        """Store a signature under its own window end index."""
        self.store(MemoryRecord(t_prime=sig.t, signature=sig))

    def get(self, t_prime: int) -> MemoryRecord:
        for rec in self.records:
            if rec.t_prime == t_prime:
                return rec
        raise KeyError(t_prime)

    def find_match(self, sig: SpectralSignature, t: int, delta: int,
                   eps_lambda: float, eps_v: float) -> MatchResult | None:
        """Best admissible match to `sig` among records with t_prime + delta < t.

        Admissible means d_lambda < eps_lambda and d_v < eps_v; the winner
        minimizes their sum, ties going to the most recent t_prime. The
        winning record's matched_count is incremented.
        """
        if sig.fallback:
            return None
        best = None
        best_rec = None
        for rec in self.records:
            if rec.t_prime + delta >= t:
                continue
            if rec.signature.fallback:
                continue
            d_lambda = wasserstein1(sig.eigenvalues, rec.signature.eigenvalues)
            if d_lambda >= eps_lambda:
                continue
            d_v = mode_distance(sig.scaled_modes, rec.signature.scaled_modes)
            if d_v >= eps_v:
                continue
            key = (d_lambda + d_v, -rec.t_prime)
            if best is None or key < (best.combined, -best.t_min):
                best = MatchResult(t_min=rec.t_prime, d_lambda=d_lambda,
                                   d_v=d_v, combined=d_lambda + d_v)
                best_rec = rec
        if best_rec is not None:
            best_rec.matched_count += 1
        return best

    def evict(self):
        """Drop least-matched (then oldest) records until size fits capacity."""
        if self.capacity is None or len(self.records) <= self.capacity:
            return
        while len(self.records) > self.capacity:
            victim = min(self.records, key=lambda r: (r.matched_count, r.t_prime))
            self.records.remove(victim)

    # -- snapshot serialization (one JSON object per line) --

    def to_jsonl(self, path):
        with open(path, "w") as fh:
            for rec in self.records:
                sig = rec.signature
                fh.write(json.dumps({
                    "t_prime": rec.t_prime,
                    "eigenvalues": [[z.real, z.imag] for z in sig.eigenvalues],
                    "modes": [[[z.real, z.imag] for z in row]
                              for row in sig.scaled_modes],
                    "anchor": sig.anchor,
                    "matched_count": rec.matched_count,
                    "inserted_at": rec.inserted_at,
                }) + "\n")

    @classmethod
    def from_jsonl(cls, path, capacity: int | None = None) -> "MemoryBank":
        bank = cls(capacity=capacity)
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                eigenvalues = np.array([complex(re, im)
                                        for re, im in obj["eigenvalues"]])
                modes = np.array([[complex(re, im) for re, im in row]
                                  for row in obj["modes"]])
                sig = SpectralSignature(eigenvalues=eigenvalues,
                                        scaled_modes=modes,
                                        t=obj["t_prime"],
                                        anchor=obj["anchor"])
                rec = MemoryRecord(t_prime=obj["t_prime"], signature=sig,
                                   matched_count=obj.get("matched_count", 0))
                bank.store(rec)
                rec.inserted_at = obj.get("inserted_at", rec.inserted_at)
        return bank
