"""Turning a concurrent game frame into the effectivity frame it induces.

A coalition's family at a state collects, per joint move of the coalition,
the set of outcomes the remaining agents can still steer between.  Keeping
only subset-minimal sets changes no modal verdict but can shrink families
drastically.
"""

from __future__ import annotations

import itertools
import time

from .model import Cgf, Ef, canonical_family


def _all_coalitions(agents: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for size in range(agents + 1):
        out.extend(itertools.combinations(range(1, agents + 1), size))
    return out


def induced_effectivity(g: Cgf, coalitions=None, deadline=None) -> Ef:
    """Family per state and coalition, duplicates collapsed eagerly.

    One pass over the transition table per coalition: grand moves are grouped
    by their projection onto the coalition, and each group's outcome set
    becomes one member of the family.
    """
    if coalitions is None:
        wanted = _all_coalitions(g.agents)
    else:
        wanted = sorted({tuple(sorted(set(c))) for c in coalitions}, key=lambda c: (len(c), c))
    effectivity: dict[str, dict[tuple[int, ...], tuple[frozenset[str], ...]]] = {}
    for w in g.states:
        if deadline is not None:
            deadline.check()
        table = sorted(g.transitions[w].items())
        per_state: dict[tuple[int, ...], tuple[frozenset[str], ...]] = {}
        for coalition in wanted:
            idx = [a - 1 for a in coalition]
            groups: dict[tuple[int, ...], set[str]] = {}
            for grand, target in table:
                groups.setdefault(tuple(grand[i] for i in idx), set()).add(target)
            per_state[coalition] = canonical_family(groups.values())
        effectivity[w] = per_state
    return Ef(
        states=g.states,
        agents=g.agents,
        effectivity=effectivity,
        valuation=g.valuation,
        initial=g.initial,
    )


def minimal_sets(family) -> tuple[frozenset[str], ...]:
    """Subset-minimal members of a family, canonically ordered."""
    keep: list[frozenset[str]] = []
    for u in canonical_family(family):
        if not any(v <= u for v in keep):
            keep.append(u)
    return tuple(keep)


def minimize(e: Ef) -> Ef:
    """Restrict every family to its subset-minimal antichain."""
    effectivity = {
        w: {coalition: minimal_sets(family) for coalition, family in per_state.items()}
        for w, per_state in e.effectivity.items()
    }
    return Ef(e.states, e.agents, effectivity, e.valuation, e.initial)


def convert(g: Cgf, minimize_families: bool = False, coalitions=None, deadline=None) -> tuple[Ef, float]:
    """Full conversion pipeline; also returns its wall-time in seconds since
    benchmark reports account for conversion separately."""
    start = time.perf_counter()
    e = induced_effectivity(g, coalitions=coalitions, deadline=deadline)
    if minimize_families:
        e = minimize(e)
    return e, time.perf_counter() - start
