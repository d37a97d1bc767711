"""Deterministic budgeted search primitives shared by the combinatorial modules.

Two engines:

* ``first_hit`` scans an indexed candidate space for the least index whose
  probe returns a value.  Optionally thread-parallel: the space is split into
  fixed-size chunks, chunk results are merged in index order, so a parallel
  run returns the identical witness to a serial run.
* ``universal_coloring_search`` is a pruned depth-first search over all
  k-colorings of M indexed positions.  It either proves "every coloring
  contains a target" and emits a replayable pruning certificate (a cover
  tree), or returns the least counterexample coloring in base-k order.

Budgets count examined candidates (scan probes, DFS color assignments).
Exhausting a budget is a first-class outcome carrying resume information,
never an exception.  Long runs invoke a checkpoint callback every
``CHECKPOINT_INTERVAL`` candidates.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

CHECKPOINT_INTERVAL = 1 << 20

DONE = "done"
BUDGET_EXCEEDED = "budget_exceeded"


def available_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ScanOutcome:
    status: str  # DONE or BUDGET_EXCEEDED
    index: int | None  # least hit index, None if absent or budget ran out
    value: object  # probe payload at the hit index
    candidates: int  # candidates examined by this call
    resume_index: int | None  # where to restart after BUDGET_EXCEEDED

    @property
    def found(self) -> bool:
        return self.index is not None


def first_hit(
    count: int,
    probe,
    *,
    budget: int | None = None,
    workers: int = 1,
    start: int = 0,
    chunk: int = 2048,
    parallel_threshold: int = 50000,
    checkpoint_cb=None,
    checkpoint_interval: int = CHECKPOINT_INTERVAL,
) -> ScanOutcome:
    """Least index in [start, count) where probe(i) returns non-None.

    The budget fixes the examined range up front, so the outcome (including
    the resume index) does not depend on worker count or timing.
    """
    if start < 0 or start > count:
        raise ValueError(f"start {start} outside [0, {count}]")
    end = count if budget is None else min(count, start + max(budget, 0))

    if workers <= 1 or end - start < parallel_threshold:
        examined = 0
        for i in range(start, end):
            val = probe(i)
            examined += 1
            if val is not None:
                return ScanOutcome(DONE, i, val, examined, None)
            if checkpoint_cb is not None and examined % checkpoint_interval == 0:
                checkpoint_cb(i + 1, examined)
        if end < count:
            return ScanOutcome(BUDGET_EXCEEDED, None, None, examined, end)
        return ScanOutcome(DONE, None, None, examined, None)

    def scan_chunk(lo: int, hi: int):
        for i in range(lo, hi):
            val = probe(i)
            if val is not None:
                return i, val
        return None

    bounds = [(lo, min(lo + chunk, end)) for lo in range(start, end, chunk)]
    examined = 0
    hit = None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        window = workers + 2
        futures = []
        submitted = 0
        while submitted < len(bounds) and len(futures) < window:
            futures.append(pool.submit(scan_chunk, *bounds[submitted]))
            submitted += 1
        done_upto = 0
        while done_upto < len(futures):
            res = futures[done_upto].result()
            lo, hi = bounds[done_upto]
            if res is not None:
                examined += res[0] - lo + 1
                hit = res
                break
            examined += hi - lo
            if checkpoint_cb is not None and (examined % checkpoint_interval) < (hi - lo):
                checkpoint_cb(hi, examined)
            done_upto += 1
            if submitted < len(bounds):
                futures.append(pool.submit(scan_chunk, *bounds[submitted]))
                submitted += 1
    if hit is not None:
        return ScanOutcome(DONE, hit[0], hit[1], examined, None)
    if end < count:
        return ScanOutcome(BUDGET_EXCEEDED, None, None, examined, end)
    return ScanOutcome(DONE, None, None, examined, None)


# ---------------------------------------------------------------------------
# universal coloring claims


@dataclass(frozen=True)
class CoverLeaf:
    """One pruned DFS branch: the prefix assignment and the target it forced."""

    prefix: tuple[int, ...]
    witness: object


@dataclass(frozen=True)
class UniversalOutcome:
    status: str  # DONE or BUDGET_EXCEEDED
    all_ok: bool | None  # None when budget exceeded
    counterexample: tuple[int, ...] | None
    cover: tuple[CoverLeaf, ...] | None
    candidates: int
    resume_path: tuple[int, ...] | None


def _allowed_max(prefix, k: int, canonical: bool) -> int:
    # canonical mode: a color may appear only after all smaller colors have
    if not canonical:
        return k
    return min(k, (max(prefix) if prefix else 0) + 1)


def universal_coloring_search(
    M: int,
    k: int,
    accept,
    *,
    canonical: bool = True,
    budget: int | None = None,
    want_cover: bool = True,
    checkpoint_cb=None,
    checkpoint_interval: int = CHECKPOINT_INTERVAL,
    resume_path: tuple[int, ...] | None = None,
) -> UniversalOutcome:
    """Decide whether every k-coloring of positions 0..M-1 contains a target.

    ``accept(colors, pos)`` sees the assignment colors[0..pos] (later entries
    stale) and returns a witness for a target completed at ``pos``, or None.
    Branches are cut the moment a witness appears, so accept only ever needs
    to look at structures whose last position is ``pos``.

    With ``canonical`` set, color c is only tried at a position if colors
    1..c-1 already appear earlier; targets must be color-permutation
    invariant for the claim to transfer to all colorings.  For k = 2 the
    counterexample returned is the least avoiding coloring in base-k order
    (any avoider can be relabeled to start with color 1).

    All-ok claims come with a cover tree: the pruned prefixes in DFS order,
    each with its witness.  ``check_cover_tree`` replays them using only
    verification logic.
    """
    if M < 1 or k < 1:
        raise ValueError("need M >= 1 positions and k >= 1 colors")
    colors = [0] * M
    leaves: list[CoverLeaf] = []
    examined = 0

    if resume_path:
        if len(resume_path) > M or any(c < 1 or c > k for c in resume_path):
            raise ValueError(f"bad resume path {resume_path!r}")
        depth = len(resume_path) - 1
        colors[: len(resume_path)] = resume_path
        pending = resume_path[-1]
    else:
        depth = 0
        pending = 1

    while True:
        # about to try color `pending` at position `depth`
        if budget is not None and examined >= budget:
            resume = tuple(colors[:depth]) + (pending,)
            return UniversalOutcome(BUDGET_EXCEEDED, None, None, None, examined, resume)
        colors[depth] = pending
        examined += 1
        if checkpoint_cb is not None and examined % checkpoint_interval == 0:
            checkpoint_cb(tuple(colors[: depth + 1]), examined)
        witness = accept(colors, depth)
        if witness is not None:
            if want_cover:
                leaves.append(CoverLeaf(tuple(colors[: depth + 1]), witness))
        elif depth + 1 < M:
            depth += 1
            pending = 1
            continue
        else:
            return UniversalOutcome(DONE, False, tuple(colors), None, examined, None)
        # advance: increment with carry in the canonical-allowed digit ranges
        while True:
            last = colors[depth]
            if last < _allowed_max(colors[:depth], k, canonical):
                pending = last + 1
                break
            depth -= 1
            if depth < 0:
                cover = tuple(leaves) if want_cover else None
                return UniversalOutcome(DONE, True, None, cover, examined, None)


def check_cover_tree(M: int, k: int, leaves, verify_witness, *, canonical: bool = True) -> bool:
    """Replay a cover tree and confirm it proves the all-colorings claim.

    Checks (a) every leaf's witness is a target monochromatic under its own
    prefix, via the caller's verification-only ``verify_witness(prefix,
    witness)``, and (b) the leaves, in order, are exactly the pruned frontier
    of the canonical DFS, so no full coloring escapes.  Uses no search code.
    """
    state: list[int] = [1]
    for leaf in leaves:
        prefix = tuple(leaf.prefix)
        # descend leftward (always color 1) until the pruned prefix is reached
        while tuple(state) != prefix:
            if len(state) >= M:
                return False
            state.append(1)
        if not verify_witness(prefix, leaf.witness):
            return False
        while state:
            last = state.pop()
            if last < _allowed_max(state, k, canonical):
                state.append(last + 1)
                break
    return not state
