"""Independent oracles for the derived values under test.

Everything here is deliberately naive: direct definitions, quadratic loops,
no sharing with the library code paths being checked.  Slow is fine.
"""

from fractions import Fraction
from itertools import combinations, product


def naive_subset_sums(group, gens):
    """All sums over the nonempty subsets of an indexed generator list.

    Returns a dict mapping frozenset of 1-based indices -> sum.  Duplicates
    across different index sets are kept (same value under two keys).
    """
    out = {}
    idx = list(range(1, len(gens) + 1))
    for size in range(1, len(gens) + 1):
        for picks in combinations(idx, size):
            acc = group.zero
            for i in picks:
                acc = group.add(acc, gens[i - 1])
            out[frozenset(picks)] = acc
    return out


def naive_fs_set(group, gens):
    """The set of values of naive_subset_sums."""
    return set(naive_subset_sums(group, gens).values())


def naive_meets_every_ip_r(group, members, r, pool):
    """Directly check the universal statement: every r-tuple drawn from the
    pool (with repetition) has some finite subset sum inside ``members``.

    Returns (True, None) or (False, first_failing_tuple) scanning tuples in
    lexicographic pool order.
    """
    members = set(members)
    for tup in product(pool, repeat=r):
        if not (naive_fs_set(group, tup) & members):
            return False, tup
    return True, None


def naive_window_density(members, window_elements):
    """|S ∩ W| / |W| as an exact Fraction."""
    members = set(members)
    hit = sum(1 for x in window_elements if x in members)
    return Fraction(hit, len(window_elements))


def interval_length_oracle(pieces):
    """Total length of a union of half-open subintervals of [0,1), each given
    as a (start, end) Fraction pair, computed by breakpoint refinement rather
    than pairwise merging."""
    points = sorted({Fraction(0), Fraction(1)} | {p for ab in pieces for p in ab})
    total = Fraction(0)
    for a, b in zip(points, points[1:]):
        mid = (a + b) / 2
        if any(s <= mid < e for s, e in pieces):
            total += b - a
    return total


def rotation_orbit_point(rho, x, n):
    """n-fold rotation of x by rho on Q/Z."""
    return (x + n * rho) % 1


def naive_finite_correlation(points, weights, perm_power, B):
    """mu(B ∩ T^{-1 applied}B) computed pointwise: weight of x with x in B and
    image(x) in B, where perm_power maps point -> point."""
    B = set(B)
    total = Fraction(0)
    for x in points:
        if x in B and perm_power[x] in B:
            total += weights[x]
    return total


def naive_bernoulli_cylinder_prob(base_probs, constraints):
    """Product-measure probability of a cylinder: constraints is a dict
    coordinate -> required letter."""
    out = Fraction(1)
    for _, letter in constraints.items():
        out *= base_probs[letter]
    return out


KNOWN_HJ = {(1, 1): 1, (2, 1): 1, (1, 2): 1, (2, 2): 2, (2, 3): 3, (3, 2): 4}
"""Hales-Jewett numbers small enough to be common knowledge: hj(k, colors).

hj(2, t) = t: two-letter words form the Boolean lattice, lines are comparable
pairs, and the least antichain cover has size m + 1 (longest chain), so a
mono pair is forced exactly when t < m + 1.
"""


def naive_subsets_of(r):
    """Non-empty subsets of {1..r} in ascending bitmask order."""
    out = []
    for mask in range(1, 1 << r):
        out.append(frozenset(i + 1 for i in range(r) if mask >> i & 1))
    return out


def naive_fu_families(r, s):
    """All (alpha_1..alpha_s) with max(alpha_i) < min(alpha_{i+1}), together
    with every union, by filtering the full s-fold product."""
    sets = naive_subsets_of(r)
    fams = []
    for blocks in product(sets, repeat=s):
        if all(max(a) < min(b) for a, b in zip(blocks, blocks[1:])):
            unions = []
            for mask in range(1, 1 << s):
                u = frozenset()
                for i in range(s):
                    if mask >> i & 1:
                        u |= blocks[i]
                unions.append(u)
            fams.append((blocks, unions))
    return fams


def naive_coloring_avoids_fu(r, s, color_of):
    """True when no family has all its unions in one color; color_of maps a
    frozenset to its color."""
    for _blocks, unions in naive_fu_families(r, s):
        if len({color_of[u] for u in unions}) == 1:
            return False
    return True


def naive_fk_min_density(r, N):
    """Minimum |A|/N over all 2^N subsets, fully independently: A blocks when
    no r-tuple from the complement keeps every subset sum in the complement."""
    universe = list(range(1, N + 1))
    best = None
    for mask in range(1 << N):
        A = {universe[i] for i in range(N) if mask >> i & 1}
        C = set(universe) - A
        blocked = True
        for tup in product(sorted(C), repeat=r):
            if all(
                sum(tup[i] for i in range(r) if m >> i & 1) in C
                for m in range(1, 1 << r)
            ):
                blocked = False
                break
        if blocked and (best is None or len(A) < best):
            best = len(A)
    return Fraction(best, N)
