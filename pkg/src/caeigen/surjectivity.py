"""Surjectivity decisions.

In one dimension the subset construction on the de Bruijn graph decides
surjectivity exactly and produces a shortest orphan (Garden-of-Eden) witness
when the answer is negative.  In higher dimensions the question is
undecidable, so only the balance necessary condition is reported there: a
rule whose table does not hit every symbol equally often cannot preserve the
uniform product measure and cannot be surjective.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DimensionUnsupported, StateSpaceBudgetExceeded
from .lattice import Alphabet, Pattern
from .rules import CellularAutomaton, LocalRule

SURJECTIVE = "Surjective"
NOT_SURJECTIVE = "NotSurjective"
BALANCED_NECESSARY_ONLY = "BalancedNecessaryOnly"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SurjectivityVerdict:
    status: str
    method: str  # "deBruijn1D" or "balance"
    witness: Pattern | None = None  # orphan pattern, when NotSurjective via de Bruijn
    symbol_counts: tuple[int, ...] | None = None  # table output counts, balance method


def windowed_table(rule: LocalRule) -> tuple[int, np.ndarray]:
    """Re-express a 1D rule on its contiguous window [min offset, max offset].

    Returns (window width, table) where table[word] is the output for the
    window word read as a base-|A| number, first cell most significant.
    """
    if rule.dimension != 1:
        raise DimensionUnsupported("windowed table requires d = 1")
    offs = [o[0] for o in rule.neighborhood]
    lo, hi = min(offs), max(offs)
    width = hi - lo + 1
    k = rule.alphabet.size
    count = k ** width
    place = k ** (width - 1 - np.arange(width))
    digits = (np.arange(count)[:, None] // place) % k
    idx = np.zeros(count, dtype=np.int64)
    for o in offs:
        idx = idx * k + digits[:, o - lo]
    return width, rule.table[idx]


def balance_check(ca: CellularAutomaton) -> SurjectivityVerdict:
    """Necessary condition in every dimension: table outputs must be balanced."""
    k = ca.alphabet.size
    counts = np.bincount(ca.rule.table, minlength=k)
    counts_t = tuple(int(c) for c in counts)
    if len(set(counts_t)) == 1:
        return SurjectivityVerdict(BALANCED_NECESSARY_ONLY, "balance", symbol_counts=counts_t)
    return SurjectivityVerdict(NOT_SURJECTIVE, "balance", symbol_counts=counts_t)


def decide_surjective_1d(ca: CellularAutomaton, state_cap: int = 1 << 20) -> SurjectivityVerdict:
    """Exact 1D decision via the subset construction on the de Bruijn graph.

    Start from the full node set (words of length window-1); a word w labels a
    path iff it has a preimage, so the empty subset is reachable iff some word
    is an orphan.  Breadth-first search yields a shortest orphan as witness.
    """
    if ca.dimension != 1:
        raise DimensionUnsupported("exact surjectivity decision requires d = 1")
    k = ca.alphabet.size
    width, table = windowed_table(ca.rule)
    n_nodes = k ** (width - 1)
    # label -> node -> successor nodes
    succ: list[list[list[int]]] = [[[] for _ in range(n_nodes)] for _ in range(k)]
    for u in range(n_nodes):
        for a in range(k):
            word = u * k + a
            succ[int(table[word])][u].append(word % n_nodes)
    full = frozenset(range(n_nodes))
    parent: dict[frozenset, tuple[frozenset, int] | None] = {full: None}
    queue = deque([full])
    while queue:
        if len(parent) > state_cap:
            raise StateSpaceBudgetExceeded("subset automaton exceeded state cap")
        S = queue.popleft()
        for label in range(k):
            nxt = frozenset(v for u in S for v in succ[label][u])
            if nxt in parent:
                continue
            parent[nxt] = (S, label)
            if not nxt:
                symbols = []
                cur: frozenset = nxt
                while parent[cur] is not None:
                    cur, lab = parent[cur]  # type: ignore[misc]
                    symbols.append(lab)
                symbols.reverse()
                orphan = Pattern(Alphabet(k), (len(symbols),), symbols)
                return SurjectivityVerdict(NOT_SURJECTIVE, "deBruijn1D", witness=orphan)
            queue.append(nxt)
    return SurjectivityVerdict(SURJECTIVE, "deBruijn1D")


def decide_surjective(ca: CellularAutomaton, **kwargs) -> SurjectivityVerdict:
    """Exact decision for d=1; balance necessary condition otherwise."""
    if ca.dimension == 1:
        return decide_surjective_1d(ca, **kwargs)
    return balance_check(ca)
