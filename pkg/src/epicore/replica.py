"""Replica exchange economies on a rational grid, compared exactly.

Two agent types trade two commodities.  Type 1 owns (1,0), type 2 owns
(0,1), and everyone shares the CES utility with exponent 1/2:

    u(x1, x2) = (sqrt(x1) + sqrt(x2))^2 = x1 + x2 + 2*sqrt(x1*x2)

Utility values are irrational, but every comparison between two bundles
reduces to integer arithmetic by isolating the radicals and squaring with
sign tracking, so domination checks are exact.  Allocations live on a
uniform grid (denominator D per commodity), which keeps core computations
finite: the grid core reported here can only over-approximate the true
core restricted to the grid, since dominators between grid points are
invisible.

The k-fold replica has participants (i, t) for type i in {1, 2} and copy
t in 1..k, each carrying the type endowment and the shared utility.
Participants are indexed 1..2k in type-major order: (1,1), ..., (1,k),
(2,1), ..., (2,k).
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import InvalidInputError, UnsupportedSizeError, VerificationFailure
from .games import Coalition
from .logic import (
    EMPTY_SET,
    Ach,
    And,
    ComparisonOracle,
    FormulaSet,
    Geq,
    ProofTree,
    Rule,
    RuleMeta,
    ThoughtSequent,
    check_proof,
    strict_gain,
)

Bundle = tuple[Fraction, Fraction]


# ---------------------------------------------------------------------------
# exact utility comparison


def _radical_cmp(s1, p1, s2, p2) -> int:
    """Sign of (s1 + 2*sqrt(p1)) - (s2 + 2*sqrt(p2)), all arguments rational.

    Both radicands must be non-negative.  Works on int and Fraction alike;
    only ring operations and comparisons are used.
    """
    s = s1 - s2
    # L = s + 2*sqrt(p1) versus R = 2*sqrt(p2) >= 0.  If L < 0 the answer
    # is immediate; otherwise both sides are non-negative and squaring is
    # order-preserving.
    if s < 0 and 4 * p1 < s * s:
        return -1
    # L^2 - R^2 = s^2 + 4 p1 - 4 p2 + 4 s sqrt(p1): compare c*sqrt(p1) vs w.
    c = 4 * s
    w = 4 * p2 - s * s - 4 * p1
    lhs_sign = 0 if p1 == 0 or c == 0 else (1 if c > 0 else -1)
    w_sign = (w > 0) - (w < 0)
    if lhs_sign != w_sign:
        return 1 if lhs_sign > w_sign else -1
    if lhs_sign == 0:
        return 0
    a, b = c * c * p1, w * w
    if a == b:
        return 0
    out = 1 if a > b else -1
    return out if lhs_sign > 0 else -out


def _cmp_units(a: tuple[int, int], b: tuple[int, int]) -> int:
    # Unit counts scale both bundles by the same factor; CES with exponent
    # 1/2 is homogeneous, so comparing scaled utilities is safe.
    return _radical_cmp(a[0] + a[1], a[0] * a[1], b[0] + b[1], b[0] * b[1])


def utility_compare(utility: str, a: Sequence, b: Sequence) -> int:
    """Exact ordinal comparison of two bundles: -1, 0, or 1.

    Only the "ces" tag (exponent 1/2) is available.  Bundles are pairs of
    non-negative rationals.
    """
    if utility != "ces":
        raise InvalidInputError(f"unknown utility tag: {utility!r}")
    a = _as_bundle(a)
    b = _as_bundle(b)
    return _radical_cmp(a[0] + a[1], a[0] * a[1], b[0] + b[1], b[0] * b[1])


def _as_bundle(raw) -> Bundle:
    try:
        pair = tuple(Fraction(c) for c in raw)
    except (TypeError, ValueError):
        raise InvalidInputError(f"not a commodity bundle: {raw!r}") from None
    if len(pair) != 2:
        raise InvalidInputError("a bundle holds exactly two commodity quantities")
    if pair[0] < 0 or pair[1] < 0:
        raise InvalidInputError("bundle quantities must be non-negative")
    return pair


class UtilityOracle(ComparisonOracle):
    """Compares payoff-vector entries that are commodity bundles by utility."""

    def geq(self, left_value, right_value) -> bool:
        return utility_compare("ces", left_value, right_value) >= 0


UTILITY_ORACLE = UtilityOracle()


# ---------------------------------------------------------------------------
# economies and allocations


@dataclass(frozen=True)
class EdgeworthEconomy:
    """Two-type, two-commodity exchange economy on a 1/D grid.

    Endowments are fixed: type 1 owns (1,0), type 2 owns (0,1).  Both
    types share one ordinal utility; only the CES tag with exponent 1/2
    is supported.
    """

    grid_denominator: int
    utility: str = "ces"
    rho: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if not isinstance(self.grid_denominator, int) or self.grid_denominator < 1:
            raise InvalidInputError("grid denominator must be a positive integer")
        if self.utility != "ces":
            raise InvalidInputError(f"unknown utility tag: {self.utility!r}")
        object.__setattr__(self, "rho", Fraction(self.rho))
        if self.rho != Fraction(1, 2):
            raise InvalidInputError("only the CES utility with exponent 1/2 is available")

    def endowment(self, agent_type: int) -> Bundle:
        if agent_type == 1:
            return (Fraction(1), Fraction(0))
        if agent_type == 2:
            return (Fraction(0), Fraction(1))
        raise InvalidInputError(f"agent type must be 1 or 2, got {agent_type}")


@dataclass(frozen=True)
class ReplicaEconomy:
    """k copies of each type of a base economy.

    Participant (i, t) is copy t of type i; all copies of a type share
    the type's endowment and utility.
    """

    base: EdgeworthEconomy
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidInputError("replica count must be a positive integer")

    def participants(self) -> tuple[tuple[int, int], ...]:
        """All (type, copy) pairs in canonical index order."""
        k = self.k
        return tuple((i, t) for i in (1, 2) for t in range(1, k + 1))

    def participant_index(self, sigma: tuple[int, int]) -> int:
        """1-based index of participant (i, t) in type-major order."""
        i, t = sigma
        if i not in (1, 2) or not 1 <= t <= self.k:
            raise InvalidInputError(f"no participant {sigma!r} in a {self.k}-fold replica")
        return (i - 1) * self.k + t

    def type_of(self, index: int) -> int:
        return 1 if index <= self.k else 2

    def endowment(self, sigma: tuple[int, int]) -> Bundle:
        return self.base.endowment(sigma[0])


class Allocation:
    """One commodity bundle per participant, in canonical participant order."""

    __slots__ = ("bundles", "_hash")

    def __init__(self, bundles: Iterable):
        bs = tuple(_as_bundle(b) for b in bundles)
        if not bs:
            raise InvalidInputError("allocation needs at least one bundle")
        self.bundles = bs
        self._hash = hash(bs)

    def __len__(self):
        return len(self.bundles)

    def __eq__(self, other):
        return type(other) is Allocation and self.bundles == other.bundles

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Allocation({list(self.bundles)!r})"

    def units(self, den: int) -> tuple[tuple[int, int], ...]:
        """Bundles as integer unit counts on the 1/den grid.

        Rejects bundles that do not lie on the grid.
        """
        out = []
        for b in self.bundles:
            m1, m2 = b[0] * den, b[1] * den
            if m1.denominator != 1 or m2.denominator != 1:
                raise InvalidInputError(
                    f"bundle {b} is not on the 1/{den} grid")
            out.append((int(m1), int(m2)))
        return tuple(out)


def _check_allocation(economy: ReplicaEconomy, x: Allocation, name: str) -> None:
    if len(x) != 2 * economy.k:
        raise InvalidInputError(
            f"{name} must assign one bundle to each of {2 * economy.k} participants")


def _feasible_total(economy: ReplicaEconomy, x: Allocation) -> bool:
    k = economy.k
    tot1 = sum(b[0] for b in x.bundles)
    tot2 = sum(b[1] for b in x.bundles)
    return tot1 == k and tot2 == k


# ---------------------------------------------------------------------------
# effective coalitions and their count


def effective_coalitions(k: int) -> tuple[frozenset, ...]:
    """The coalitions that suffice for core rejection in a k-fold replica.

    Four groups: the 2k singletons, the k*k mixed pairs {(1,n),(2,m)},
    the 2(k-1) near-balanced coalitions holding all copies 1..n of one
    type and copies 1..n-1 of the other (n = 2..k), and the whole set.
    Deduplicated, canonical order (size, then members).
    """
    if not isinstance(k, int) or k < 1:
        raise InvalidInputError("replica count must be a positive integer")
    groups: list[frozenset] = []
    for i in (1, 2):
        for n in range(1, k + 1):
            groups.append(frozenset({(i, n)}))
    for n in range(1, k + 1):
        for m in range(1, k + 1):
            groups.append(frozenset({(1, n), (2, m)}))
    for n in range(2, k + 1):
        lead = {(1, t) for t in range(1, n + 1)}
        trail = {(2, t) for t in range(1, n)}
        groups.append(frozenset(lead | trail))
        lead = {(2, t) for t in range(1, n + 1)}
        trail = {(1, t) for t in range(1, n)}
        groups.append(frozenset(lead | trail))
    groups.append(frozenset((i, t) for i in (1, 2) for t in range(1, k + 1)))
    seen = set()
    out = []
    for s in groups:
        if s not in seen:
            seen.add(s)
            out.append(s)
    out.sort(key=lambda s: (len(s), sorted(s)))
    return tuple(out)


def knowledge_growth(k: int) -> tuple[int, Fraction]:
    """Effective-coalition count and the per-participant average.

    count = k^2 + 4k - 1 and average = count / (2k); the count is
    cross-checked against the enumerated list.
    """
    if not isinstance(k, int) or k < 2:
        raise InvalidInputError("knowledge growth is defined for k >= 2")
    count = k * k + 4 * k - 1
    listed = len(effective_coalitions(k))
    if listed != count:
        raise VerificationFailure(
            f"effective-coalition count mismatch at k={k}: "
            f"formula {count}, enumerated {listed}")
    average = Fraction(count, 2 * k)
    if average != Fraction(k, 2) + 2 - Fraction(1, 2 * k):
        raise VerificationFailure(f"average identity fails at k={k}")
    return count, average


# ---------------------------------------------------------------------------
# domination


def _normalize_members(economy: ReplicaEconomy, S) -> tuple[int, ...]:
    """Members may be (type, copy) pairs or flat participant indices 1..2k,
    the numbering used inside proof coalitions."""
    members = set()
    try:
        for sigma in S:
            if isinstance(sigma, int):
                if not 1 <= sigma <= 2 * economy.k:
                    raise ValueError(sigma)
                members.add(sigma)
            else:
                members.add(economy.participant_index(tuple(sigma)))
    except (TypeError, ValueError):
        raise InvalidInputError(f"not a participant set: {S!r}") from None
    if not members:
        raise InvalidInputError("coalition must be nonempty")
    return tuple(sorted(members))


def econ_dominates(economy: ReplicaEconomy, y: Allocation, x: Allocation, S) -> bool:
    """Does y beat x through coalition S?

    y restricted to S must redistribute exactly the members' endowments
    (componentwise equality); anything else is rejected as invalid input.
    Domination is a weak utility improvement for every member and a
    strict one for at least one.
    """
    _check_allocation(economy, y, "y")
    _check_allocation(economy, x, "x")
    idxs = _normalize_members(economy, S)
    k = economy.k
    need1 = sum(1 for j in idxs if j <= k)
    need2 = len(idxs) - need1
    got1 = sum(y.bundles[j - 1][0] for j in idxs)
    got2 = sum(y.bundles[j - 1][1] for j in idxs)
    if got1 != need1 or got2 != need2:
        raise InvalidInputError(
            "y does not redistribute the coalition's endowments "
            f"(needs ({need1}, {need2}) in total, has ({got1}, {got2}))")
    strict = False
    for j in idxs:
        c = utility_compare("ces", y.bundles[j - 1], x.bundles[j - 1])
        if c < 0:
            return False
        if c > 0:
            strict = True
    return strict


# ---------------------------------------------------------------------------
# rank tables: every grid bundle gets an integer rank, equal utilities
# share a rank, and coalition queries become staircase lookups


class _Tables:
    __slots__ = ("max_units", "rank", "_pair", "_upper")

    def __init__(self, max_units: int):
        self.max_units = max_units
        grid = [(m1, m2)
                for m1 in range(max_units + 1) for m2 in range(max_units + 1)]
        grid.sort(key=cmp_to_key(_cmp_units))
        rank: dict[tuple[int, int], int] = {}
        r = -1
        prev = None
        for m in grid:
            if prev is None or _cmp_units(m, prev) != 0:
                r += 1
                prev = m
            rank[m] = r
        self.rank = rank
        self._pair = {}
        self._upper = {}

    def pair(self, res: tuple[int, int]):
        """Staircase for two-member splits of an exact unit resource.

        Returns (avals, bvals): ascending first-member ranks, and for each
        the best second-member rank achievable with first rank >= avals[i].
        """
        st = self._pair.get(res)
        if st is None:
            r1, r2 = res
            rank = self.rank
            best: dict[int, int] = {}
            for m1 in range(r1 + 1):
                for m2 in range(r2 + 1):
                    a = rank[(m1, m2)]
                    b = rank[(r1 - m1, r2 - m2)]
                    if best.get(a, -1) < b:
                        best[a] = b
            items = sorted(best.items())
            avals = []
            bvals = []
            cur = -1
            for a, b in reversed(items):
                if b > cur:
                    cur = b
                avals.append(a)
                bvals.append(cur)
            avals.reverse()
            bvals.reverse()
            st = self._pair[res] = (avals, bvals)
        return st

    def pair_meets(self, res, p: int, q: int) -> bool:
        # some split has first rank >= p and second rank >= q
        avals, bvals = self.pair(res)
        i = bisect_left(avals, p)
        return i < len(avals) and bvals[i] >= q

    def pair_strict(self, res, p: int, q: int) -> bool:
        # a split meeting (p, q) that is strictly above at one member
        avals, bvals = self.pair(res)
        i = bisect_left(avals, p)
        if i == len(avals):
            return False
        m = bvals[i]
        if m > q:
            return True
        if m < q:
            return False
        j = bisect_right(avals, p)
        return j < len(avals) and bvals[j] >= q

    def upper_min(self, target: int) -> tuple:
        """Componentwise-minimal grid bundles with rank >= target."""
        out = self._upper.get(target)
        if out is None:
            rank = self.rank
            top = self.max_units
            pts = []
            prev = None
            for m1 in range(top + 1):
                lo, hi = 0, top + 1
                while lo < hi:
                    mid = (lo + hi) // 2
                    if rank[(m1, mid)] >= target:
                        hi = mid
                    else:
                        lo = mid + 1
                if lo > top:
                    continue
                if prev is None or lo < prev:
                    pts.append((m1, lo))
                    prev = lo
            out = self._upper[target] = tuple(pts)
        return out


@lru_cache(maxsize=8)
def _tables(max_units: int) -> _Tables:
    return _Tables(max_units)


# ---------------------------------------------------------------------------
# coalition descriptors: compiled query plans for one economy


class _Coalitions:
    """Blocking queries for a fixed replica economy and coalition family."""

    def __init__(self, economy: ReplicaEconomy, family: Sequence[tuple[int, ...]]):
        base = economy.base
        self.economy = economy
        self.den = base.grid_denominator
        self.k = economy.k
        self.tables = _tables(self.k * self.den)
        self.endow_rank = self.tables.rank[(self.den, 0)]
        self.family = tuple(family)
        self.singles = tuple(s[0] for s in self.family if len(s) == 1)
        self.larger = tuple(s for s in self.family if len(s) > 1)
        self._memo: dict = {}

    def resource(self, idxs: tuple[int, ...]) -> tuple[int, int]:
        k, den = self.k, self.den
        ones = sum(1 for j in idxs if j <= k)
        return (ones * den, (len(idxs) - ones) * den)

    def blocked(self, ranks: tuple[int, ...], skip_singles: bool = False) -> bool:
        """Is the allocation with these member ranks rejected by the family?"""
        if not skip_singles:
            e = self.endow_rank
            for j in self.singles:
                if e > ranks[j - 1]:
                    return True
        for idxs in self.larger:
            if self._blocked_by(idxs, ranks):
                return True
        return False

    def _blocked_by(self, idxs: tuple[int, ...], ranks: tuple[int, ...]) -> bool:
        t = self.tables
        targets = tuple(ranks[j - 1] for j in idxs)
        size = len(idxs)
        if size == 2:
            return t.pair_strict(self.resource(idxs), targets[0], targets[1])
        key = (idxs, targets)
        hit = self._memo.get(key)
        if hit is None:
            if size == 3:
                hit = self._blocked_three(idxs, targets)
            elif size == 4:
                hit = self._blocked_four(idxs, targets)
            else:
                raise UnsupportedSizeError(
                    f"no query plan for a coalition of size {size}")
            self._memo[key] = hit
        return hit

    def _blocked_three(self, idxs, targets) -> bool:
        # Peel one member off as a singleton and treat the rest as a pair.
        # Minimal single bundles suffice: utility is strictly monotone, so
        # any surplus freed by shrinking the single makes the pair strict.
        t = self.tables
        r1, r2 = self.resource(idxs)
        k = self.k
        types = [1 if j <= k else 2 for j in idxs]
        pos = types.index(1) if types.count(1) == 1 else (
            types.index(2) if types.count(2) == 1 else 0)
        tc = targets[pos]
        ta, tb = (targets[p] for p in range(3) if p != pos)
        for m1, m2 in t.upper_min(tc):
            if m1 > r1 or m2 > r2:
                continue
            rest = (r1 - m1, r2 - m2)
            if t.rank[(m1, m2)] > tc:
                if t.pair_meets(rest, ta, tb):
                    return True
            elif t.pair_strict(rest, ta, tb):
                return True
        return False

    def _blocked_four(self, idxs, targets) -> bool:
        # Split into two fixed pairs; any dominating profile decomposes
        # under any fixed pairing, so one pairing and all resource splits
        # cover every case.
        t = self.tables
        r1, r2 = self.resource(idxs)
        ta, tb = targets[0], targets[1]
        tc, td = targets[2], targets[3]
        for a1 in range(r1 + 1):
            for a2 in range(r2 + 1):
                res_a = (a1, a2)
                res_b = (r1 - a1, r2 - a2)
                if not t.pair_meets(res_a, ta, tb):
                    continue
                if t.pair_strict(res_b, tc, td):
                    return True
                if t.pair_strict(res_a, ta, tb) and t.pair_meets(res_b, tc, td):
                    return True
        return False


def _family_indices(economy: ReplicaEconomy, sets: Iterable) -> tuple[tuple[int, ...], ...]:
    seen = set()
    out = []
    for s in sets:
        idxs = _normalize_members(economy, s)
        if idxs not in seen:
            seen.add(idxs)
            out.append(idxs)
    out.sort(key=lambda v: (len(v), v))
    return tuple(out)


def _all_subsets(economy: ReplicaEconomy) -> tuple[tuple[int, ...], ...]:
    n = 2 * economy.k
    out = []
    for size in range(1, n + 1):
        out.extend(combinations(range(1, n + 1), size))
    return tuple(out)


# ---------------------------------------------------------------------------
# grid core


def grid_core(economy: ReplicaEconomy, *, coalitions: Optional[Iterable] = None,
              exhaustive: bool = False) -> frozenset:
    """Feasible grid allocations no coalition can reject with a grid witness.

    By default only the effective coalition family is consulted; pass
    `coalitions` (an iterable of participant sets) to use a custom family,
    or `exhaustive=True` to consult every nonempty coalition (small grids
    only).  The result over-approximates the true core restricted to the
    grid: dominators that live between grid points are not seen.
    """
    k = economy.k
    den = economy.base.grid_denominator
    if coalitions is not None:
        if exhaustive:
            raise InvalidInputError("choose either a coalition family or exhaustive mode")
        if k > 2 or k * den > 16:
            raise UnsupportedSizeError(
                f"grid core enumeration is guarded to k <= 2 and k*D <= 16; "
                f"got k={k}, D={den}")
        family = _family_indices(economy, coalitions)
    elif exhaustive:
        if k > 2 or den > 4:
            raise UnsupportedSizeError(
                f"exhaustive mode is guarded to k <= 2 and D <= 4; got k={k}, D={den}")
        family = _all_subsets(economy)
    else:
        if k > 2 or k * den > 16:
            raise UnsupportedSizeError(
                f"grid core enumeration is guarded to k <= 2 and k*D <= 16; "
                f"got k={k}, D={den}")
        family = _family_indices(economy, effective_coalitions(k))
    plan = _Coalitions(economy, family)
    if k == 1:
        survivors = _core_k1(plan)
    else:
        survivors = _core_k2(plan)
    return frozenset(survivors)


def _core_k1(plan: _Coalitions):
    den = plan.den
    rank = plan.tables.rank
    prefilter = set(plan.singles) == {1, 2}
    e = plan.endow_rank
    out = []
    for m1 in range(den + 1):
        for m2 in range(den + 1):
            other = (den - m1, den - m2)
            ranks = (rank[(m1, m2)], rank[other])
            if prefilter and (e > ranks[0] or e > ranks[1]):
                continue
            if plan.blocked(ranks, skip_singles=prefilter):
                continue
            out.append(Allocation((_frac((m1, m2), den), _frac(other, den))))
    return out


def _core_k2(plan: _Coalitions):
    den = plan.den
    rank = plan.tables.rank
    total = 2 * den
    prefilter = set(plan.singles) == {1, 2, 3, 4}
    e = plan.endow_rank
    pool = [((m1, m2), rank[(m1, m2)])
            for m1 in range(total + 1) for m2 in range(total + 1)
            if not prefilter or rank[(m1, m2)] >= e]
    by_sum: dict[tuple[int, int], list] = {}
    for (b1, r1) in pool:
        for (b2, r2) in pool:
            s = (b1[0] + b2[0], b1[1] + b2[1])
            if s[0] <= total and s[1] <= total:
                by_sum.setdefault(s, []).append((b1, b2, r1, r2))
    blocked = plan.blocked
    out = []
    for s, plist in by_sum.items():
        comp = (total - s[0], total - s[1])
        qlist = by_sum.get(comp)
        if not qlist:
            continue
        for b1, b2, r1, r2 in plist:
            for b3, b4, r3, r4 in qlist:
                if blocked((r1, r2, r3, r4), skip_singles=prefilter):
                    continue
                out.append(Allocation((_frac(b1, den), _frac(b2, den),
                                       _frac(b3, den), _frac(b4, den))))
    return out


def _frac(units: tuple[int, int], den: int) -> Bundle:
    return (Fraction(units[0], den), Fraction(units[1], den))


# ---------------------------------------------------------------------------
# partial-knowledge rejection witnesses


def partial_knowledge_witness(economy: ReplicaEconomy, x: Allocation):
    """A participant and a one-atom knowledge set that reject x, or None.

    If x lies outside the grid core, returns (sigma, {ach}) where ach
    asserts that some effective coalition T containing sigma can achieve
    a bundle profile dominating x, with sigma gaining strictly.  The
    blocking derivation is re-checked with the sequent kernel and the
    utility oracle before returning.  Returns None exactly when x is in
    the grid core.
    """
    _check_allocation(economy, x, "x")
    if not _feasible_total(economy, x):
        raise InvalidInputError("x must redistribute the total endowment exactly")
    k = economy.k
    den = economy.base.grid_denominator
    if k > 2 or k * den > 16:
        raise UnsupportedSizeError(
            f"witness search is guarded to k <= 2 and k*D <= 16; got k={k}, D={den}")
    units = x.units(den)
    family = _family_indices(economy, effective_coalitions(k))
    plan = _Coalitions(economy, family)
    rank = plan.tables.rank
    ranks = tuple(rank[u] for u in units)

    # singletons: walking away to the endowment
    e = plan.endow_rank
    for j in plan.singles:
        if e > ranks[j - 1]:
            endow = economy.endowment(((1, j) if j <= k else (2, j - k)))
            return _certify(economy, x, (j,), (endow,))

    found = _heuristic_witness(economy, x, plan, ranks)
    if found is None:
        found = _search_witness(plan, units, ranks)
    if found is None:
        return None
    idxs, bundles = found
    return _certify(economy, x, idxs, bundles)


def _heuristic_witness(economy: ReplicaEconomy, x: Allocation,
                       plan: _Coalitions, ranks):
    """Closed-form blocking bundles that often work; validated before use."""
    k = economy.k
    if k < 2:
        return None
    half = Fraction(1, 2)
    den = plan.den
    xb = x.bundles
    # unequal copies of a type: the worst-off copies of each type pool
    # their endowments and split the type averages
    lo1 = min(range(1, k + 1), key=lambda j: ranks[j - 1])
    lo2 = min(range(k + 1, 2 * k + 1), key=lambda j: ranks[j - 1])
    mid1 = _avg([xb[j - 1] for j in range(1, k + 1)])
    mid2 = _avg([xb[j - 1] for j in range(k + 1, 2 * k + 1)])
    if _on_grid(mid1, den) and _on_grid(mid2, den):
        idxs = (lo1, lo2)
        y = (mid1, mid2)
        if _valid_block(economy, x, idxs, y):
            return idxs, y
    # near-balanced coalitions: both copies of one type move halfway
    # toward their endowment, financed by one copy of the other type
    if k == 2:
        for i, j_other in ((1, 3), (2, 1)):
            lo_i = (i - 1) * k + 1
            a, b = xb[lo_i - 1], xb[lo_i]
            if a != b:
                continue
            h = tuple(half * e_c + half * a_c
                      for e_c, a_c in zip(economy.base.endowment(i), a))
            if not _on_grid(h, den):
                continue
            idxs = tuple(sorted((lo_i, lo_i + 1, j_other)))
            y = tuple(h if j in (lo_i, lo_i + 1) else xb[j_other - 1] for j in idxs)
            if _valid_block(economy, x, idxs, y):
                return idxs, y
    return None


def _avg(bundles):
    n = len(bundles)
    return (sum(b[0] for b in bundles) / n, sum(b[1] for b in bundles) / n)


def _on_grid(bundle, den: int) -> bool:
    return (bundle[0] * den).denominator == 1 and (bundle[1] * den).denominator == 1


def _valid_block(economy: ReplicaEconomy, x: Allocation, idxs, y_members) -> bool:
    """Feasibility plus weak/strict domination, via the reference check."""
    k = economy.k
    zero = (Fraction(0), Fraction(0))
    full = [zero] * (2 * k)
    for pos, j in enumerate(idxs):
        full[j - 1] = y_members[pos]
    members = [(1, j) if j <= k else (2, j - k) for j in idxs]
    try:
        return econ_dominates(economy, Allocation(full), x, members)
    except InvalidInputError:
        return False


def _search_witness(plan: _Coalitions, units, ranks):
    """Brute grid search over the same dominator space the core sweep uses."""
    t = plan.tables
    rank = t.rank
    den = plan.den
    for idxs in plan.larger:
        targets = tuple(ranks[j - 1] for j in idxs)
        r1, r2 = plan.resource(idxs)
        hit = None
        if len(idxs) == 2:
            hit = _split_two(rank, (r1, r2), targets, need_strict=True)
        elif len(idxs) == 3:
            ta, tb, tc = targets
            for m1 in range(r1 + 1):
                for m2 in range(r2 + 1):
                    ra = rank[(m1, m2)]
                    if ra < ta:
                        continue
                    rest = (r1 - m1, r2 - m2)
                    sub = _split_two(rank, rest, (tb, tc),
                                     need_strict=ra == ta)
                    if sub is not None:
                        hit = ((m1, m2),) + sub
                        break
                if hit:
                    break
        elif len(idxs) == 4:
            ta, tb, tc, td = targets
            for a1 in range(r1 + 1):
                for a2 in range(r2 + 1):
                    res_a = (a1, a2)
                    res_b = (r1 - a1, r2 - a2)
                    front = _split_two(rank, res_a, (ta, tb), need_strict=True)
                    if front is not None:
                        back = _split_two(rank, res_b, (tc, td), need_strict=False)
                        if back is not None:
                            hit = front + back
                            break
                    front = _split_two(rank, res_a, (ta, tb), need_strict=False)
                    if front is not None:
                        back = _split_two(rank, res_b, (tc, td), need_strict=True)
                        if back is not None:
                            hit = front + back
                            break
                if hit:
                    break
        if hit is not None:
            return idxs, tuple(_frac(u, den) for u in hit)
    return None


def _split_two(rank, res, targets, need_strict: bool):
    """A two-bundle split of res meeting the rank targets, if any."""
    r1, r2 = res
    ta, tb = targets
    for m1 in range(r1 + 1):
        for m2 in range(r2 + 1):
            ra = rank[(m1, m2)]
            if ra < ta:
                continue
            rb = rank[(r1 - m1, r2 - m2)]
            if rb < tb:
                continue
            if need_strict and ra == ta and rb == tb:
                continue
            return ((m1, m2), (r1 - m1, r2 - m2))
    return None


def _certify(economy: ReplicaEconomy, x: Allocation, idxs: tuple[int, ...],
             member_bundles: tuple):
    """Build the rejection atom and re-check its derivation with the kernel."""
    n = 2 * economy.k
    zero = (Fraction(0), Fraction(0))
    y_vec = [zero] * n
    for pos, j in enumerate(idxs):
        y_vec[j - 1] = member_bundles[pos]
    y_vec = tuple(y_vec)
    x_vec = tuple(x.bundles)
    tag = Coalition(idxs)
    grand = Coalition(tuple(range(1, n + 1)))

    sigma_idx = None
    for j in idxs:
        if utility_compare("ces", y_vec[j - 1], x_vec[j - 1]) > 0:
            sigma_idx = j
            break
    if sigma_idx is None:
        raise VerificationFailure("blocking candidate has no strict gainer")

    ach = Ach(y_vec, tag)
    geq = Geq(y_vec, tag, tag, x_vec, grand)
    strict = strict_gain(y_vec, tag, sigma_idx, x_vec, grand)
    witness = And((ach, geq, strict))

    prefix = (sigma_idx,)
    gamma = FormulaSet.of((ach,))
    la = ProofTree(ThoughtSequent(prefix, FormulaSet.of((ach,)),
                                  FormulaSet.of((ach,))), Rule.LogicalAxiom)
    nla_geq = ProofTree(ThoughtSequent(prefix, EMPTY_SET,
                                       FormulaSet.of((geq,))), Rule.NonLogicalAxiom)
    nla_gi = ProofTree(ThoughtSequent(prefix, EMPTY_SET,
                                      FormulaSet.of((strict.members[0],))),
                       Rule.NonLogicalAxiom)
    nla_ngi = ProofTree(ThoughtSequent(prefix, EMPTY_SET,
                                       FormulaSet.of((strict.members[1],))),
                        Rule.NonLogicalAxiom)
    andr_strict = ProofTree(ThoughtSequent(prefix, EMPTY_SET,
                                           FormulaSet.of((strict,))),
                            Rule.AndRight, (nla_gi, nla_ngi),
                            RuleMeta(principal=strict))
    proved = {ach: la, geq: nla_geq, strict: andr_strict}
    th = tuple(ProofTree(ThoughtSequent(prefix, gamma, FormulaSet.of((f,))),
                         Rule.Th, (proved[f],))
               for f in witness.members)
    root = ProofTree(ThoughtSequent(prefix, gamma, FormulaSet.of((witness,))),
                     Rule.AndRight, th, RuleMeta(principal=witness))
    res = check_proof(root, UTILITY_ORACLE)
    if not res.ok:
        raise VerificationFailure(
            f"rejection derivation failed kernel check: {res.reason}")

    k = economy.k
    sigma = (1, sigma_idx) if sigma_idx <= k else (2, sigma_idx - k)
    return sigma, frozenset({ach})


# ---------------------------------------------------------------------------
# conceptual bridge to coalition games


def derived_game(economy) -> str:
    """The worth formula an economy would induce on coalitions, as text.

    Nothing is computed: the economy modules reason about bundle profiles
    directly, and this note only records the bridge for reports.  Accepts
    a base economy or a replica of one.
    """
    base = economy.base if isinstance(economy, ReplicaEconomy) else economy
    return ("v(S) = max { sum_(i in S) u_i(x_i) : "
            "sum_(i in S) x_i = sum_(i in S) e_i }  "
            f"(utility {base.utility}, exponent {base.rho}; not computed)")
