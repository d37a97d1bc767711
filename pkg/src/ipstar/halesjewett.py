"""Words, combinatorial lines, monochromatic-line search, and the bit-pattern
encoding from words over a power-of-two alphabet to tuples of index sets.

Frozen conventions:

* words are tuples of letters 1..k over positions 1..m; the canonical word
  order is lexicographic with position 1 most significant, so the index of a
  word is the big-endian base-k value of (letters - 1)
* lines are ordered by (moving-set size ascending, moving set lexicographic,
  fixed letters lexicographic in position order)
* bit i of the encoding is worth 2^(i-1): bit 1 is least significant
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from itertools import combinations, product

from .search import (
    BUDGET_EXCEEDED,
    DONE,
    check_cover_tree,
    first_hit,
    universal_coloring_search,
)


def all_words(k: int, m: int) -> list[tuple[int, ...]]:
    return [w for w in product(range(1, k + 1), repeat=m)]


def word_index(w: tuple[int, ...], k: int) -> int:
    idx = 0
    for letter in w:
        idx = idx * k + (letter - 1)
    return idx


@dataclass(frozen=True)
class Line:
    """A combinatorial line: fixed positions with their letters, and a
    non-empty moving set swept through the alphabet in unison."""

    m: int
    fixed: tuple  # ((position, letter), ...) sorted by position
    moving: frozenset[int]

    def __post_init__(self):
        fixed = tuple(sorted((int(p), int(v)) for p, v in self.fixed))
        moving = frozenset(int(p) for p in self.moving)
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "moving", moving)
        if not moving:
            raise ValueError("moving set must be non-empty")
        positions = {p for p, _ in fixed} | moving
        if len(fixed) + len(moving) != self.m or positions != set(range(1, self.m + 1)):
            raise ValueError("fixed and moving parts must partition the positions")


def line_points(L: Line, k: int) -> list[tuple[int, ...]]:
    """The k words of the line, in moving-letter order 1..k."""
    base = dict(L.fixed)
    out = []
    for letter in range(1, k + 1):
        out.append(tuple(base[p] if p in base else letter for p in range(1, L.m + 1)))
    return out


def all_lines(k: int, m: int) -> list[Line]:
    """Every line of the m-position word space, in canonical order."""
    out = []
    positions = list(range(1, m + 1))
    for size in range(1, m + 1):
        for moving in combinations(positions, size):
            rest = [p for p in positions if p not in moving]
            for letters in product(range(1, k + 1), repeat=len(rest)):
                out.append(Line(m, tuple(zip(rest, letters)), frozenset(moving)))
    return out


def is_line_point_tuple(k: int, m: int, indices) -> bool:
    """Verification-only: do these word indices, in order, list the points of
    some line?  Used when replaying certificates."""
    if len(indices) != k or len(set(indices)) != k:
        return False
    words = []
    for idx in indices:
        if not 0 <= idx < k**m:
            return False
        letters = []
        for _ in range(m):
            idx, d = divmod(idx, k)
            letters.append(d + 1)
        words.append(tuple(reversed(letters)))
    moving = {p for p in range(m) if len({w[p] for w in words}) > 1}
    if not moving:
        return False
    for letter, w in enumerate(words, start=1):
        if any(w[p] != letter for p in moving):
            return False
    fixed = {p: words[0][p] for p in range(m) if p not in moving}
    return all(w[p] == v for w in words for p, v in fixed.items())


def find_mono_line(k: int, m: int, coloring, *, workers: int = 1):
    """First line (canonical order) whose points share a color, or None.
    ``coloring`` maps a word tuple to its color.

    Lines are decoded from their canonical index on the fly rather than
    materialized up front; the order is identical to ``all_lines``."""
    positions = list(range(1, m + 1))
    blocks = []  # (start index, moving tuple, fixed-position tuple)
    total = 0
    for size in range(1, m + 1):
        span = k ** (m - size)
        for moving in combinations(positions, size):
            ms = set(moving)
            blocks.append((total, moving, tuple(p for p in positions if p not in ms)))
            total += span
    starts = [b[0] for b in blocks]

    def probe(i):
        start, moving, rest = blocks[bisect_right(starts, i) - 1]
        q = i - start
        letters = []
        for _ in rest:
            q, dig = divmod(q, k)
            letters.append(dig + 1)
        letters.reverse()
        scratch = [0] * (m + 1)
        for p, v in zip(rest, letters):
            scratch[p] = v
        color = None
        for letter in range(1, k + 1):
            for p in moving:
                scratch[p] = letter
            c = coloring(tuple(scratch[1:]))
            if color is None:
                color = c
            elif c != color:
                return None
        return Line(m, tuple(zip(rest, letters)), frozenset(moving))

    out = first_hit(total, probe, workers=workers)
    return out.value


# ---------------------------------------------------------------------------
# desk-scale Hales-Jewett numbers


@dataclass(frozen=True)
class HjStage:
    m: int
    kind: str  # "all-colorings-ok" | "counterexample" | "budget_exceeded"
    counterexample: tuple[int, ...] | None  # colors in canonical word order
    cover: tuple | None
    candidates: int
    resume_path: tuple[int, ...] | None = None


@dataclass(frozen=True)
class HjResult:
    k: int
    t: int
    m_max: int
    status: str  # DONE or BUDGET_EXCEEDED
    value: int | None  # least m with the universal verdict, None if > m_max
    stages: tuple[HjStage, ...]

    @property
    def checkpoint(self) -> tuple[int, tuple[int, ...]] | None:
        last = self.stages[-1] if self.stages else None
        if last is not None and last.kind == "budget_exceeded":
            return last.m, last.resume_path
        return None


def _lines_by_last_index(k: int, m: int) -> list[list[tuple[int, ...]]]:
    table = [[] for _ in range(k**m)]
    for L in all_lines(k, m):
        idx = tuple(word_index(w, k) for w in line_points(L, k))
        table[max(idx)].append(idx)
    return table


def hj_stage(
    k: int,
    t: int,
    m: int,
    *,
    budget: int | None = None,
    want_cover: bool = True,
    checkpoint_cb=None,
    resume_path=None,
) -> HjStage:
    """Decide whether every t-coloring of the m-position word space over a
    k-letter alphabet contains a monochromatic line."""
    table = _lines_by_last_index(k, m)

    def accept(colors, pos):
        for idx in table[pos]:
            c = colors[idx[0]]
            if all(colors[q] == c for q in idx[1:]):
                return idx
        return None

    out = universal_coloring_search(
        k**m,
        t,
        accept,
        budget=budget,
        want_cover=want_cover,
        checkpoint_cb=checkpoint_cb,
        resume_path=resume_path,
    )
    if out.status == BUDGET_EXCEEDED:
        return HjStage(m, "budget_exceeded", None, None, out.candidates, out.resume_path)
    if out.all_ok:
        return HjStage(m, "all-colorings-ok", None, out.cover, out.candidates)
    return HjStage(m, "counterexample", out.counterexample, None, out.candidates)


def hj_verify_witness(k: int, m: int, prefix, witness) -> bool:
    indices = tuple(witness)
    if not is_line_point_tuple(k, m, indices):
        return False
    if max(indices) >= len(prefix):
        return False
    return len({prefix[q] for q in indices}) == 1


def hj_check_cover(k: int, t: int, m: int, cover) -> bool:
    return check_cover_tree(k**m, t, cover, lambda p, w: hj_verify_witness(k, m, p, w))


def hj_coloring_is_counterexample(k: int, t: int, m: int, coloring) -> bool:
    """Verification-only: a full coloring with no monochromatic line."""
    if len(coloring) != k**m or any(not 1 <= c <= t for c in coloring):
        return False
    for L in all_lines(k, m):
        idx = [word_index(w, k) for w in line_points(L, k)]
        if len({coloring[q] for q in idx}) == 1:
            return False
    return True


def hj_number(
    k: int,
    t: int,
    m_max: int,
    *,
    budget: int | None = None,
    want_cover: bool = True,
    checkpoint_cb=None,
    resume: tuple[int, tuple[int, ...]] | None = None,
) -> HjResult:
    """Least m <= m_max forcing a monochromatic line under every t-coloring,
    by ascending m; each stage is an exhaustive pruned-DFS claim."""
    if k < 1 or t < 1 or m_max < 1:
        raise ValueError("k, t, m_max must be >= 1")
    stages = []
    remaining = budget
    start_m, path = (resume if resume else (1, None))
    for m in range(start_m, m_max + 1):
        st = hj_stage(
            k,
            t,
            m,
            budget=remaining,
            want_cover=want_cover,
            checkpoint_cb=checkpoint_cb,
            resume_path=path,
        )
        path = None
        stages.append(st)
        if st.kind == "budget_exceeded":
            return HjResult(k, t, m_max, BUDGET_EXCEEDED, None, tuple(stages))
        if remaining is not None:
            remaining -= st.candidates
        if st.kind == "all-colorings-ok":
            return HjResult(k, t, m_max, DONE, m, tuple(stages))
    return HjResult(k, t, m_max, DONE, None, tuple(stages))


# ---------------------------------------------------------------------------
# the bit-pattern encoding into index-set tuples


def psi_encode(w: tuple[int, ...], d: int) -> tuple[frozenset[int], ...]:
    """Word over alphabet 1..2^d -> (alpha_1..alpha_d): position j joins
    alpha_i when bit i (worth 2^(i-1)) of w(j) - 1 is set."""
    if any(not 1 <= letter <= (1 << d) for letter in w):
        raise ValueError(f"letters must lie in 1..{1 << d}")
    return tuple(
        frozenset(j + 1 for j, letter in enumerate(w) if (letter - 1) >> (i - 1) & 1)
        for i in range(1, d + 1)
    )


def psi_decode(alphas, r: int) -> tuple[int, ...]:
    """Inverse of psi_encode for index sets inside {1..r}."""
    alphas = [frozenset(a) for a in alphas]
    if any(not a <= set(range(1, r + 1)) for a in alphas):
        raise ValueError("index sets must lie inside {1..r}")
    out = []
    for j in range(1, r + 1):
        val = 0
        for i, alpha in enumerate(alphas, start=1):
            if j in alpha:
                val |= 1 << (i - 1)
        out.append(val + 1)
    return tuple(out)


@dataclass(frozen=True)
class SubsetConfig:
    """d base index sets plus a mover disjoint from all of them; the induced
    points are (alpha_1 + eta_1, ..., alpha_d + eta_d) over eta_i in
    {nothing, mover}."""

    base: tuple  # (alpha_1..alpha_d) as frozensets, may be empty sets
    mover: frozenset[int]

    def __post_init__(self):
        base = tuple(frozenset(a) for a in self.base)
        mover = frozenset(self.mover)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "mover", mover)
        if not mover:
            raise ValueError("mover must be non-empty")
        for a in base:
            if a & mover:
                raise ValueError("mover must be disjoint from every base set")

    @property
    def d(self) -> int:
        return len(self.base)


def config_points(cfg: SubsetConfig) -> list[tuple[frozenset[int], ...]]:
    """The 2^d induced points, ordered to match the line points (the point
    with pattern bits of ell-1 sits at moving letter ell)."""
    out = []
    for ell in range(1 << cfg.d):
        out.append(
            tuple(a | cfg.mover if ell >> i & 1 else a for i, a in enumerate(cfg.base))
        )
    return out


def line_to_config(L: Line, d: int) -> SubsetConfig:
    """mover = the moving set; base sets from the encoding of the point with
    moving letter 1 (its moving positions carry no bits).  The 2^d induced
    points are then exactly the encodings of the line's points."""
    first = line_points(L, 1 << d)[0]
    return SubsetConfig(psi_encode(first, d), frozenset(L.moving))


def mono_config_search(d: int, r: int, coloring, *, workers: int = 1):
    """Compose the coloring with the encoding, hunt a monochromatic line over
    the 2^d-letter alphabet, and map it back; None when no line exists."""
    L = find_mono_line(1 << d, r, lambda w: coloring(psi_encode(w, d)), workers=workers)
    return None if L is None else line_to_config(L, d)
