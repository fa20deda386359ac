"""Preference-list reduction, rotations, and rotation-based enumeration.

Given a stable matching, the three-step reduction truncates every list to
the portion that can still matter for stable matchings the firms like weakly
less: firms keep nothing above their best current partner, workers keep the
span between their worker-optimal partner and their current one, and a final
mutual-acceptability pass removes everything one sided.  Cycles of the
"best worker outside my assignment" successor map in the reduced market are
the rotations; applying one trades along the cycle and lands on another
stable matching.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .model import (
    CycleMismatchError,
    Market,
    Matching,
    NotStableError,
)
from .stability import Side, deferred_acceptance, is_stable


@dataclass(frozen=True)
class ReducedProfile:
    """A market with truncated lists, together with its base matching.

    The base matching is stable and firm-optimal in the reduced market, and
    the reduced lists are mutually acceptable exactly.
    """

    base: Matching
    market: Market      # reduced lists, same agents and quotas
    original: Market

    def firm_list(self, f: str) -> tuple[str, ...]:
        return self.market.firm_pref[f]

    def worker_list(self, w: str) -> tuple[str, ...]:
        return self.market.worker_pref[w]


@dataclass(frozen=True)
class Rotation:
    """A cyclic trade among firms exposed by a reduced profile.

    ``workers[d]`` is the best reduced-list worker of ``firms[d]`` outside its
    assignment, and is employed by ``firms[d + 1]`` (cyclically) in the base
    matching.  Canonical form starts at the firm with the smallest
    declaration index.
    """

    firms: tuple[str, ...]
    workers: tuple[str, ...]

    def __post_init__(self):
        if len(self.firms) < 2:
            raise ValueError("a rotation involves at least two firms")
        if len(set(self.firms)) != len(self.firms):
            raise ValueError("rotation firms must be distinct")
        if len(self.workers) != len(self.firms):
            raise ValueError("rotation worker sequence must align with firms")


@dataclass(frozen=True)
class RotationSet:
    """All rotations at one reduced profile; pairwise firm-disjoint."""

    rotations: tuple[Rotation, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for rot in self.rotations:
            if seen & set(rot.firms):
                raise ValueError("rotations must be pairwise firm-disjoint")
            seen.update(rot.firms)

    def __iter__(self):
        return iter(self.rotations)

    def __len__(self) -> int:
        return len(self.rotations)

    def __getitem__(self, index: int) -> Rotation:
        return self.rotations[index]


def reduce_profile(market: Market, mu: Matching) -> ReducedProfile:
    """Truncate all preference lists around a stable matching.

    Step 1 removes from each firm's list every worker above its best current
    partner, and from each worker's list every firm above its worker-optimal
    partner.  Step 2 removes from each worker's list every firm below its
    current partner, and from each firm's list every worker below its worst
    worker-optimal partner.  Step 3 drops one-sided entries until none are
    left.  Unmatched agents end with empty lists (they are unmatched in every
    stable matching).
    """
    if not is_stable(market, mu):
        raise NotStableError("reduction requires a stable matching")
    mu_w = deferred_acceptance(market, Side.WORKERS)

    firm_lists: dict[str, tuple[str, ...]] = {}
    for f in market.firms:
        mine = mu.matched(f)
        bottom_set = mu_w.matched(f)
        if not mine or not bottom_set:
            # below-quota firms keep the same workers everywhere; an empty
            # assignment therefore stays empty in the whole reduced market
            firm_lists[f] = ()
            continue
        lo = min(market.firm_rank(f, w) for w in mine)
        hi = max(market.firm_rank(f, w) for w in bottom_set)
        firm_lists[f] = tuple(
            w for w in market.acceptable_to_firm(f)
            if lo <= market.firm_rank(f, w) <= hi)

    worker_lists: dict[str, tuple[str, ...]] = {}
    for w in market.workers:
        current = mu.employer(w)
        top = mu_w.employer(w)
        if current is None or top is None:
            worker_lists[w] = ()
            continue
        lo = market.worker_rank(w, top)
        hi = market.worker_rank(w, current)
        worker_lists[w] = tuple(
            f for f in market.acceptable_to_worker(w)
            if lo <= market.worker_rank(w, f) <= hi)

    # mutual-acceptability closure, iterated to a fixpoint
    changed = True
    while changed:
        changed = False
        wsets = {w: set(fs) for w, fs in worker_lists.items()}
        for f, ws in firm_lists.items():
            kept = tuple(w for w in ws if f in wsets[w])
            if kept != ws:
                firm_lists[f] = kept
                changed = True
        fsets = {f: set(ws) for f, ws in firm_lists.items()}
        for w, fs in worker_lists.items():
            kept = tuple(f for f in fs if w in fsets[f])
            if kept != fs:
                worker_lists[w] = kept
                changed = True

    reduced = Market(market.firms, market.workers, dict(market.quota),
                     firm_lists, worker_lists)
    assert is_stable(reduced, mu), "base matching must stay stable after reduction"
    assert deferred_acceptance(reduced, Side.FIRMS) == mu, \
        "base matching must be firm-optimal in the reduced market"
    return ReducedProfile(base=mu, market=reduced, original=market)


def find_cycles(profile: ReducedProfile) -> RotationSet:
    """All rotations of a reduced profile.

    The successor of a firm is the employer of its best reduced-list worker
    outside its own assignment; it is undefined for firms below quota (those
    never rotate: below-quota firms keep the same workers in every stable
    matching) and for firms with no outside worker left.  The cycles of this
    partial successor map, found by pointer chasing with visitation stamps,
    are exactly the rotations.
    """
    mu = profile.base
    reduced = profile.market
    successor: dict[str, str] = {}
    wanted: dict[str, str] = {}
    for f in reduced.firms:
        staff = mu.matched(f)
        if len(staff) < reduced.quota[f]:
            continue
        outside = [w for w in reduced.acceptable_to_firm(f) if w not in staff]
        if not outside:
            continue
        w = outside[0]
        employer = mu.employer(w)
        assert employer is not None, \
            "a reduced-list worker outside a full firm must be matched"
        successor[f] = employer
        wanted[f] = w

    visited: set[str] = set()
    cycles: list[list[str]] = []
    for start in reduced.firms:
        if start in visited or start not in successor:
            continue
        path: list[str] = []
        position: dict[str, int] = {}
        cur: str | None = start
        while cur is not None and cur not in visited and cur not in position:
            position[cur] = len(path)
            path.append(cur)
            cur = successor.get(cur)
        if cur is not None and cur in position:
            cycles.append(path[position[cur]:])
        visited.update(path)

    rotations = []
    for cycle in cycles:
        k = min(range(len(cycle)),
                key=lambda i: reduced.firm_index(cycle[i]))
        ordered = cycle[k:] + cycle[:k]
        rot = Rotation(tuple(ordered), tuple(wanted[f] for f in ordered))
        for d, f in enumerate(rot.firms):
            nxt = rot.firms[(d + 1) % len(rot.firms)]
            assert rot.workers[d] in mu.matched(nxt)
        rotations.append(rot)
    rotations.sort(key=lambda r: profile.original.firm_index(r.firms[0]))
    return RotationSet(tuple(rotations))


def apply_cycle(market: Market, mu: Matching, sigma: Rotation) -> Matching:
    """Trade workers along one rotation.

    Each firm of the cycle keeps its assignment except that it gains its own
    cycle worker and loses its predecessor's; all other firms are untouched.
    The rotation must structurally fit the matching (each cycle worker
    employed by the next firm, absent from its own firm).
    """
    r = len(sigma.firms)
    staff = {f: set(ws) for f, ws in mu.assignment}
    for d, f in enumerate(sigma.firms):
        w = sigma.workers[d]
        nxt = sigma.firms[(d + 1) % r]
        if w in staff.get(f, ()):
            raise CycleMismatchError(
                f"cycle worker {w} already works for {f}")
        if w not in staff.get(nxt, ()):
            raise CycleMismatchError(
                f"cycle worker {w} is not employed by {nxt} in the base matching")
    for d, f in enumerate(sigma.firms):
        staff[f].discard(sigma.workers[(d - 1) % r])
        staff[f].add(sigma.workers[d])
    return Matching.build(market, staff)


def apply_cycle_set(market: Market, mu: Matching,
                    cycles: Iterable[Rotation]) -> Matching:
    """Apply a set of rotations; they are disjoint, so the order is irrelevant."""
    cycles = tuple(cycles)
    seen: set[str] = set()
    for rot in cycles:
        overlap = seen & set(rot.firms)
        assert not overlap, f"overlapping rotations at {sorted(overlap)}"
        seen.update(rot.firms)
    result = mu
    for rot in cycles:
        result = apply_cycle(market, result, rot)
    return result


def connected_set(market: Market, mu: Matching,
                  kprime: Sequence[Rotation]) -> set[Matching]:
    """All matchings reachable from mu by applying a subset of ``kprime``."""
    kprime = tuple(kprime)
    out: set[Matching] = set()
    for size in range(len(kprime) + 1):
        for subset in combinations(kprime, size):
            out.add(apply_cycle_set(market, mu, subset))
    assert len(out) == 2 ** len(kprime), "distinct subsets give distinct matchings"
    return out


def enumerate_stable_via_rotations(market: Market) -> set[Matching]:
    """All stable matchings, as the rotation closure of the firm-optimal one.

    Breadth-first: at every discovered matching, reduce the profile, find the
    rotations, and apply each one.  Scales with the number of stable
    matchings rather than with the candidate space.
    """
    start = deferred_acceptance(market, Side.FIRMS)
    found: set[Matching] = {start}
    frontier: deque[Matching] = deque([start])
    while frontier:
        mu = frontier.popleft()
        profile = reduce_profile(market, mu)
        for sigma in find_cycles(profile):
            nxt = apply_cycle(market, mu, sigma)
            if nxt not in found:
                found.add(nxt)
                frontier.append(nxt)
    return found
