"""Longest-common-substring similarity between trajectories' location sequences."""

from __future__ import annotations

import csv

import numpy as np

from . import kernels


def lcs_length(a, b) -> int:
    """Length of the longest contiguous run of locations shared by ``a`` and ``b``."""
    if not a or not b:
        return 0
    vocab: dict = {}
    ea = np.array([vocab.setdefault(x, len(vocab)) for x in a], dtype=np.int64)
    eb = np.array([vocab.setdefault(x, len(vocab)) for x in b], dtype=np.int64)
    return int(kernels.lcs_length(ea, eb))


def top_k_similar(target, population, k: int = 5) -> list[tuple[str, int]]:
    """Rank ``population`` profiles by LCS length against ``target``.

    Highest score first, ties by device id; the target's own device id is
    excluded.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    population = list(population)
    if not population:
        raise ValueError("empty population")
    vocab: dict = {}

    def encode(seq):
        return np.array([vocab.setdefault(x, len(vocab)) for x in seq], dtype=np.int64)

    t = encode(target.location_sequence())
    scored = [
        (p.device_id, int(kernels.lcs_length(t, encode(p.location_sequence()))))
        for p in population
        if p.device_id != target.device_id
    ]
    scored.sort(key=lambda s: (-s[1], s[0]))
    return scored[:k]


def write_ranked_csv(path, ranked) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "device_id", "score"])
        for rank, (device, score) in enumerate(ranked, start=1):
            w.writerow([rank, device, score])
