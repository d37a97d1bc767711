"""Finite-sums and finite-unions combinatorics.

Subset conventions, frozen for determinism:

* an index set alpha is a frozenset of positive integers; the family F_r of
  all non-empty subsets of {1..r} is enumerated by ascending bitmask, i.e.
  {1}, {2}, {1,2}, {3}, {1,3}, {2,3}, {1,2,3}, ...  (bit i-1 encodes i)
* generator tuples are scanned lexicographically with coordinate 1 most
  significant, indices into the supplied pool order
* block sequences alpha_1 < ... < alpha_s require max(alpha_i) < min(alpha_{i+1})

Generators may repeat and may be zero: the finite-sums definition places no
restriction, so FS(1,1) = {1,2} is a legitimate witness and FS(0,...,0) = {0}
forces 0 into every set with a "meets every r-generator finite-sums family"
verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .algebra import FullWindow, Window, window_enumerate
from .search import (
    BUDGET_EXCEEDED,
    DONE,
    check_cover_tree,
    first_hit,
    universal_coloring_search,
)

# ---------------------------------------------------------------------------
# index-set plumbing


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def set_to_mask(alpha) -> int:
    mask = 0
    for i in alpha:
        if i < 1:
            raise ValueError(f"index sets contain positive integers only, got {i}")
        mask |= 1 << (i - 1)
    return mask


def family_order(r: int) -> list[frozenset[int]]:
    """All non-empty subsets of {1..r} in ascending bitmask order."""
    return [mask_to_set(m) for m in range(1, 1 << r)]


def ordered_splits(alpha, s: int) -> list[tuple[frozenset[int], ...]]:
    """All ways to write alpha as s blocks a_1 < ... < a_s (consecutive runs
    of the sorted elements)."""
    elems = sorted(alpha)
    out = []
    for cuts in combinations(range(1, len(elems)), s - 1):
        bounds = (0,) + cuts + (len(elems),)
        out.append(tuple(frozenset(elems[a:b]) for a, b in zip(bounds, bounds[1:])))
    return out


# ---------------------------------------------------------------------------
# element sets and finite sums


@dataclass(frozen=True)
class ElementSet:
    """A finite set of group elements plus the ambient it was computed over.

    window = FullWindow(): the whole finite group, exact verdicts available.
    window = bounded spec: members were gathered over that window only.
    window = None: a bare finite collection; no ambient claims.
    """

    group: object
    members: frozenset
    window: Window | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if self.window is not None:
            ambient = set(window_enumerate(self.group, self.window))
            stray = self.members - ambient
            if stray:
                raise ValueError(f"members outside the ambient window: {sorted_repr(stray)}")

    @property
    def exact(self) -> bool:
        return isinstance(self.window, FullWindow)

    def __contains__(self, x) -> bool:
        return x in self.members


def sorted_repr(elems) -> str:
    return "{" + ", ".join(sorted(str(e) for e in elems)) + "}"


@dataclass
class FSResult:
    """finite_sums output: the collapsed sum set and the canonical map
    (index set alpha) -> sum."""

    group: object
    gens: tuple
    members: frozenset
    by_indices: dict = field(repr=False)

    def element_set(self, window: Window | None = None) -> ElementSet:
        return ElementSet(self.group, self.members, window)


def finite_sums(group, gens) -> FSResult:
    gens = tuple(gens)
    if not gens:
        raise ValueError("need at least one generator")
    by_indices = {}
    for mask in range(1, 1 << len(gens)):
        acc = group.zero
        for i in range(len(gens)):
            if mask >> i & 1:
                acc = group.add(acc, gens[i])
        by_indices[mask_to_set(mask)] = acc
    return FSResult(group, gens, frozenset(by_indices.values()), by_indices)


def finite_unions(alphas) -> tuple[frozenset[int], ...]:
    """The 2^s - 1 unions of ordered blocks alpha_1 < ... < alpha_s."""
    alphas = [frozenset(a) for a in alphas]
    if not alphas or any(not a for a in alphas):
        raise ValueError("blocks must be non-empty")
    for a, b in zip(alphas, alphas[1:]):
        if max(a) >= min(b):
            raise ValueError(f"blocks out of order: max{sorted_repr(a)} >= min{sorted_repr(b)}")
    out = []
    for mask in range(1, 1 << len(alphas)):
        u = frozenset()
        for i in range(len(alphas)):
            if mask >> i & 1:
                u |= alphas[i]
        out.append(u)
    return tuple(out)


# ---------------------------------------------------------------------------
# IP_r detection and the dual verdict


@dataclass(frozen=True)
class IpSearchResult:
    status: str  # DONE or BUDGET_EXCEEDED
    witness: tuple | None  # generator tuple, None when absent or budget out
    candidates: int
    resume_index: int | None = None

    @property
    def found(self) -> bool:
        return self.witness is not None


def _resolve_pool(group, pool) -> list:
    if isinstance(pool, Window):
        return window_enumerate(group, pool)
    if isinstance(pool, ElementSet):
        if pool.window is not None:
            ambient = window_enumerate(group, pool.window)
            return [x for x in ambient if x in pool.members]
        return sorted(pool.members)  # ints, fractions, coefficient tuples all sort
    return list(pool)


def _tuple_at(pool, r: int, index: int) -> tuple:
    # mixed-radix decode, coordinate 1 most significant
    digits = []
    for _ in range(r):
        index, d = divmod(index, len(pool))
        digits.append(pool[d])
    return tuple(reversed(digits))


def contains_ip_r(
    S: ElementSet,
    r: int,
    pool,
    *,
    budget: int | None = None,
    workers: int = 1,
    start: int = 0,
) -> IpSearchResult:
    """First generator tuple from the pool whose finite sums all land in S.

    The pool is a Window over S's group, or an explicit element sequence
    scanned in the given order.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    elems = _resolve_pool(S.group, pool)
    group, members = S.group, S.members

    def probe(i):
        tup = _tuple_at(elems, r, i)
        return tup if finite_sums(group, tup).members <= members else None

    out = first_hit(len(elems) ** r, probe, budget=budget, workers=workers, start=start)
    return IpSearchResult(out.status, out.value, out.candidates, out.resume_index)


@dataclass(frozen=True)
class IpStarVerdict:
    kind: str  # "holds" | "fails" | "budget_exceeded"
    window_limited: bool
    witness: tuple | None = None  # failing generator tuple (its sums avoid S)
    candidates: int = 0
    resume_index: int | None = None

    @property
    def holds(self) -> bool:
        return self.kind == "holds"


def is_ip_r_star(
    S: ElementSet,
    r: int,
    *,
    budget: int | None = None,
    workers: int = 1,
    start: int = 0,
) -> IpStarVerdict:
    """Does S meet every r-generator finite-sums family?

    Exact mode (ambient = full finite group): scans every generator tuple.
    Windowed mode: generators range over the window and a counterexample
    must keep all its sums inside the window; the verdict is explicitly
    window-limited either way.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if S.window is None:
        raise ValueError("ambient window required for a dual-family verdict")
    elems = window_enumerate(S.group, S.window)
    windowed = not S.exact
    ambient = set(elems)
    group, members = S.group, S.members

    def probe(i):
        tup = _tuple_at(elems, r, i)
        sums = finite_sums(group, tup).members
        if windowed and not sums <= ambient:
            return None  # sums escape the window: not decidable, not a witness
        return tup if not (sums & members) else None

    out = first_hit(len(elems) ** r, probe, budget=budget, workers=workers, start=start)
    if out.status == BUDGET_EXCEEDED:
        return IpStarVerdict("budget_exceeded", windowed, None, out.candidates, out.resume_index)
    if out.found:
        return IpStarVerdict("fails", windowed, out.value, out.candidates)
    return IpStarVerdict("holds", windowed, None, out.candidates)


# ---------------------------------------------------------------------------
# the finite coloring claim over F_r


@dataclass(frozen=True)
class FuRamseyResult:
    r: int
    s: int
    k: int
    kind: str  # "all-colorings-ok" | "counterexample" | "budget_exceeded"
    coloring: tuple[int, ...] | None  # digits in family_order(r), counterexample only
    witness_blocks: tuple | None  # not used for all-ok (cover carries them)
    cover: tuple | None  # CoverLeaf sequence proving the all-ok claim
    candidates: int
    resume_path: tuple[int, ...] | None = None


def _fu_checks_by_position(r: int, s: int):
    """For each position (mask order), the splits completed there: a list of
    (blocks, union_positions) where union_positions index every union of the
    blocks and the last one is the position itself."""
    order = family_order(r)
    pos_of = {set_to_mask(a): i for i, a in enumerate(order)}
    table = []
    for alpha in order:
        entries = []
        if len(alpha) >= s:
            for blocks in ordered_splits(alpha, s):
                unions = finite_unions(blocks)
                entries.append((blocks, tuple(pos_of[set_to_mask(u)] for u in unions)))
        table.append(entries)
    return table


def fu_ramsey_check(
    r: int,
    s: int,
    k: int,
    *,
    budget: int | None = None,
    want_cover: bool = True,
    checkpoint_cb=None,
    resume_path: tuple[int, ...] | None = None,
) -> FuRamseyResult:
    """Either every k-coloring of F_r contains monochromatic ordered blocks
    alpha_1 < ... < alpha_s with all their unions in one color, or there is a
    coloring with none; the search returns the least such coloring (base-k
    digit order over ascending bitmasks, colors canonicalized by first use).
    """
    if r < 1 or s < 1 or k < 1:
        raise ValueError("r, s, k must all be >= 1")
    table = _fu_checks_by_position(r, s)

    def accept(colors, pos):
        c = colors[pos]
        for blocks, union_positions in table[pos]:
            if all(colors[q] == c for q in union_positions):
                return blocks
        return None

    out = universal_coloring_search(
        (1 << r) - 1,
        k,
        accept,
        budget=budget,
        want_cover=want_cover,
        checkpoint_cb=checkpoint_cb,
        resume_path=resume_path,
    )
    if out.status == BUDGET_EXCEEDED:
        return FuRamseyResult(r, s, k, "budget_exceeded", None, None, None, out.candidates, out.resume_path)
    if out.all_ok:
        return FuRamseyResult(r, s, k, "all-colorings-ok", None, None, out.cover, out.candidates)
    return FuRamseyResult(r, s, k, "counterexample", out.counterexample, None, None, out.candidates)


def fu_verify_witness(r: int, s: int, prefix: tuple[int, ...], blocks) -> bool:
    """Verification-only check that the blocks witness a monochromatic family
    fully colored inside the prefix.  Used by certificate replay."""
    try:
        unions = finite_unions(blocks)
    except ValueError:
        return False
    if any(not u <= frozenset(range(1, r + 1)) for u in unions):
        return False
    order = family_order(r)
    pos_of = {set_to_mask(a): i for i, a in enumerate(order)}
    positions = [pos_of[set_to_mask(u)] for u in unions]
    if max(positions) >= len(prefix):
        return False
    return len({prefix[q] for q in positions}) == 1


def fu_coloring_is_counterexample(r: int, s: int, coloring: tuple[int, ...]) -> bool:
    """Verification-only check that a full coloring of F_r has no
    monochromatic s-block union family."""
    if len(coloring) != (1 << r) - 1:
        return False
    for pos, entries in enumerate(_fu_checks_by_position(r, s)):
        for _blocks, union_positions in entries:
            if len({coloring[q] for q in union_positions}) == 1:
                return False
    return True


def fu_check_cover(r: int, s: int, k: int, cover) -> bool:
    return check_cover_tree(
        (1 << r) - 1, k, cover, lambda prefix, blocks: fu_verify_witness(r, s, prefix, blocks)
    )


def fu_minimal_r(
    s: int,
    k: int,
    *,
    r_limit: int = 10,
    budget: int | None = None,
    want_cover: bool = True,
) -> tuple[int | None, list[FuRamseyResult]]:
    """Ascending search for the least r with the all-colorings verdict.

    Monotone in r (restricting a coloring of F_{r+1} to F_r preserves
    families), so the first all-ok r is the answer.  Returns (r or None,
    the per-r results up to and including it).
    """
    results = []
    remaining = budget
    for r in range(1, r_limit + 1):
        res = fu_ramsey_check(r, s, k, budget=remaining, want_cover=want_cover)
        results.append(res)
        if res.kind == "budget_exceeded":
            return None, results
        if remaining is not None:
            remaining -= res.candidates
        if res.kind == "all-colorings-ok":
            return r, results
    return None, results


# ---------------------------------------------------------------------------
# density floor experiment


@dataclass(frozen=True)
class FkResult:
    r: int
    N: int
    status: str  # DONE or BUDGET_EXCEEDED
    value: Fraction | None  # min |A|/N over blocking sets A
    witness: frozenset | None  # a minimum blocking set
    candidates: int


def complement_has_fs_tuple(C, r: int):
    """First tuple (ascending lexicographic over sorted C) of r generators
    drawn from C with every subset sum again in C, or None.  Generators are
    members of C because singleton sums must land in C."""
    C = set(C)
    elems = sorted(C)
    for tup in product(elems, repeat=r):
        # singleton sums are the generators themselves, already in C;
        # only the multi-term sums need the membership test
        ok = True
        for mask in range(1, 1 << r):
            if mask & (mask - 1) == 0:
                continue
            total = sum(t for i, t in enumerate(tup) if mask >> i & 1)
            if total not in C:
                ok = False
                break
        if ok:
            return tup
    return None


def finite_sums_int(tup) -> set[int]:
    out = set()
    for mask in range(1, 1 << len(tup)):
        out.add(sum(t for i, t in enumerate(tup) if mask >> i & 1))
    return out


def fk_density_experiment(r: int, N: int, *, budget: int | None = None) -> FkResult:
    """min |A|/N over A subseteq {1..N} whose complement contains no full
    finite-sums family of r generators; ascending-size exhaustive search, so
    the witness is the least blocking set in (size, lexicographic) order."""
    if r < 1 or N < 1:
        raise ValueError("r and N must be >= 1")
    universe = list(range(1, N + 1))
    examined = 0
    for size in range(0, N + 1):
        for combo in combinations(universe, size):
            examined += 1
            if budget is not None and examined > budget:
                return FkResult(r, N, BUDGET_EXCEEDED, None, None, examined - 1)
            C = set(universe) - set(combo)
            if complement_has_fs_tuple(C, r) is None:
                return FkResult(r, N, DONE, Fraction(size, N), frozenset(combo), examined)
    raise AssertionError("unreachable: A = {1..N} always blocks")


def fk_odds_certificate(N: int) -> tuple[frozenset, Fraction, bool]:
    """The even numbers as a blocking set for r = 2: their complement (the
    odds) is sum-free, since odd + odd is even.  Returns (A, |A|/N, valid)."""
    A = frozenset(x for x in range(1, N + 1) if x % 2 == 0)
    C = set(range(1, N + 1)) - A
    return A, Fraction(len(A), N), complement_has_fs_tuple(C, 2) is None


# ---------------------------------------------------------------------------
# the doubly-exponential block example


@dataclass(frozen=True)
class BlockExample:
    r_max: int
    blocks: tuple  # (r, tuple of values i * 2^(2^r), i = 1..r) per r
    members: frozenset

    def block_of(self, x: int) -> int | None:
        for r, vals in self.blocks:
            if x in vals:
                return r
        return None


def example_a(r_max: int) -> BlockExample:
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    blocks = []
    members = set()
    for r in range(1, r_max + 1):
        c = 1 << (1 << r)  # 2^(2^r)
        vals = tuple(i * c for i in range(1, r + 1))
        blocks.append((r, vals))
        members.update(vals)
    return BlockExample(r_max, tuple(blocks), frozenset(members))


def example_a_checks(ex: BlockExample) -> dict[str, bool]:
    """The three companion checks, each decided exhaustively.

    in_block_fs: block r equals the finite sums of r copies of its base value.
    cross_block_free: no 3-generator tuple mixing two blocks keeps all its
    sums inside the set.
    fs_depth: within block r the deepest full finite-sums family has exactly
    r generators.
    """
    out = {}
    in_block = True
    for r, vals in ex.blocks:
        c = vals[0]
        fs = finite_sums_int((c,) * r)
        in_block = in_block and fs == set(vals)
    out["in_block_fs"] = in_block

    members = ex.members
    cross_free = True
    elems = sorted(members)
    for x in elems:
        for y in elems:
            for z in elems:
                if len({ex.block_of(v) for v in (x, y, z)}) < 2:
                    continue
                if all(v in members for v in finite_sums_int((x, y, z))):
                    cross_free = False
    out["cross_block_free"] = cross_free

    depth_ok = True
    for r, vals in ex.blocks:
        block = set(vals)
        has_r = any(
            finite_sums_int(t) <= block for t in _tuples_from(sorted(block), r)
        )
        has_r1 = any(
            finite_sums_int(t) <= block for t in _tuples_from(sorted(block), r + 1)
        )
        depth_ok = depth_ok and has_r and not has_r1
    out["fs_depth"] = depth_ok
    return out


def _tuples_from(pool, r):
    return product(pool, repeat=r)


# ---------------------------------------------------------------------------
# intersection filtering probe


@dataclass(frozen=True)
class IntersectionProbe:
    q: int | None  # least uniform q, None if some pair resists every q <= cap
    worst_pair: tuple | None  # (A members, B members) needing the largest q
    worst_intersection: frozenset | None
    pairs_checked: int


def ipstar_intersection_probe(group, r: int, s: int) -> IntersectionProbe:
    """Smallest q such that A cap B meets every q-generator family, over all
    pairs (A meets-every-r, B meets-every-s) of subsets of a small finite
    group.  Exhaustive over all subset pairs."""
    elems = window_enumerate(group, FullWindow())
    n = len(elems)
    if n > 12:
        raise ValueError("ambient too large for exhaustive subset enumeration")

    def subset(mask):
        return frozenset(elems[i] for i in range(n) if mask >> i & 1)

    def star_sets(rr):
        out = []
        for mask in range(1 << n):
            S = ElementSet(group, subset(mask), FullWindow())
            if is_ip_r_star(S, rr).holds:
                out.append(S.members)
        return out

    A_list = star_sets(r)
    B_list = star_sets(s)
    best_q = 0
    worst = None
    pairs = 0
    for A in A_list:
        for B in B_list:
            pairs += 1
            inter = ElementSet(group, A & B, FullWindow())
            q = None
            for cand in range(1, n + 1):
                if is_ip_r_star(inter, cand).holds:
                    q = cand
                    break
            if q is None:
                return IntersectionProbe(None, (A, B), inter.members, pairs)
            if q > best_q:
                best_q = q
                worst = (A, B)
    return IntersectionProbe(best_q, worst, frozenset(worst[0] & worst[1]) if worst else None, pairs)
