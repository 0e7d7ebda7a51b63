"""Thought sequents and their proof calculus.

A thought sequent B_e[ante -> succ] pairs a belief prefix e (a finite,
possibly empty sequence of agent ids) with two finite SETS of formulas.
Proof trees are checked bottom-up against eleven structural/logical rules
plus two axiom forms:

  * logical axioms  B_e[A -> A]
  * non-logical axioms: comparison facts  B_e[-> y >= x over S]  and their
    negations, decided by a pluggable ComparisonOracle (integer grid units
    for payoff comparisons, exact utility comparison for economies).

Formulas are immutable, hash-cached, and compared structurally.  Payoff
vectors inside atoms are carried as tuples of integer grid units (the
owning layer fixes the unit 1/n and converts to exact rationals at the
boundary); economy atoms carry tuples of commodity bundles instead.  The
kernel never interprets payloads, it only asks the oracle.

Sequent sides use FormulaSet, a layered immutable set: a big shared base
(typically a knowledge set reused across thousands of sequents) plus a
small delta.  All rule checks run on the deltas when bases are shared, so
checking a proof with a large ambient knowledge set costs O(tree), not
O(tree * |knowledge set|).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InvalidInputError
from .games import Coalition

# ---------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ("_hash",)
    rank = -1

    def key(self):
        raise NotImplementedError

    def __eq__(self, other):  # pragma: no cover - overridden
        raise NotImplementedError

    def __ne__(self, other):
        return not self.__eq__(other)


class Ach(Formula):
    """Atom: payoff vector (tagged with its superscript coalition) is achievable."""

    __slots__ = ("vector", "coalition")

    def __init__(self, vector, coalition: Coalition):
        self.vector = tuple(vector)
        self.coalition = coalition
        self._hash = None

    rank = 0

    def key(self):
        return (0, self.coalition.canonical_key, self.vector)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((0, self.vector, self.coalition.members))
        return h

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Ach and self.vector == other.vector
                and self.coalition == other.coalition)

    def __repr__(self):
        return f"Ach({self.vector}, {self.coalition})"


class Geq(Formula):
    """Atom: left vector weakly exceeds right vector on every member of `over`.

    Left/right carry their own superscript tags (the coalition each vector
    is achievable for); `over` is the comparison coalition.
    """

    __slots__ = ("left", "left_tag", "over", "right", "right_tag")

    def __init__(self, left, left_tag: Coalition, over: Coalition, right, right_tag: Coalition):
        if len(over) < 1:
            raise InvalidInputError("comparison coalition must be nonempty")
        self.left = tuple(left)
        self.left_tag = left_tag
        self.over = over
        self.right = tuple(right)
        self.right_tag = right_tag
        self._hash = None

    rank = 1

    def key(self):
        return (1, self.left_tag.canonical_key, self.left, self.over.canonical_key,
                self.right_tag.canonical_key, self.right)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(
                (1, self.left, self.left_tag.members, self.over.members,
                 self.right, self.right_tag.members))
        return h

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Geq and self.left == other.left
                and self.right == other.right and self.over == other.over
                and self.left_tag == other.left_tag and self.right_tag == other.right_tag)

    def __repr__(self):
        return f"Geq({self.left}^{self.left_tag} >=_{self.over} {self.right}^{self.right_tag})"


class Not(Formula):
    __slots__ = ("child",)

    def __init__(self, child: Formula):
        self.child = child
        self._hash = None

    rank = 2

    def key(self):
        return (2, self.child.key())

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((2, self.child))
        return h

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is Not and self.child == other.child

    def __repr__(self):
        return f"Not({self.child!r})"


def _canonical_members(members: Iterable[Formula]) -> tuple[Formula, ...]:
    ms = list(members)
    if not ms:
        raise InvalidInputError("conjunction/disjunction needs at least one member")
    ms.sort(key=lambda f: f.key())
    out = [ms[0]]
    for f in ms[1:]:
        if f != out[-1]:
            out.append(f)
    return tuple(out)


class And(Formula):
    """Finite conjunction over a set of formulas (members stored sorted, deduped)."""

    __slots__ = ("members",)

    def __init__(self, members: Iterable[Formula]):
        self.members = _canonical_members(members)
        self._hash = None

    rank = 3

    @classmethod
    def _presorted(cls, members: tuple[Formula, ...]) -> "And":
        # trusted constructor: members already canonical
        self = cls.__new__(cls)
        self.members = members
        self._hash = None
        return self

    def key(self):
        return (3, tuple(m.key() for m in self.members))

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((3, self.members))
        return h

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is And and self.members == other.members

    def __repr__(self):
        return f"And({list(self.members)!r})"


class Or(Formula):
    """Finite disjunction over a set of formulas (members stored sorted, deduped)."""

    __slots__ = ("members",)

    def __init__(self, members: Iterable[Formula]):
        self.members = _canonical_members(members)
        self._hash = None

    rank = 4

    @classmethod
    def _presorted(cls, members: tuple[Formula, ...]) -> "Or":
        self = cls.__new__(cls)
        self.members = members
        self._hash = None
        return self

    def key(self):
        return (4, tuple(m.key() for m in self.members))

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((4, self.members))
        return h

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is Or and self.members == other.members

    def __repr__(self):
        return f"Or({list(self.members)!r})"


class Implies(Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs: Formula, rhs: Formula):
        self.lhs = lhs
        self.rhs = rhs
        self._hash = None

    rank = 5

    def key(self):
        return (5, self.lhs.key(), self.rhs.key())

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((5, self.lhs, self.rhs))
        return h

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is Implies and self.lhs == other.lhs and self.rhs == other.rhs

    def __repr__(self):
        return f"Implies({self.lhs!r}, {self.rhs!r})"


class Bel(Formula):
    """Belief operator applied to a formula, for a single agent."""

    __slots__ = ("agent", "child")

    def __init__(self, agent: int, child: Formula):
        if agent < 1:
            raise InvalidInputError("agent ids are 1-based")
        self.agent = agent
        self.child = child
        self._hash = None

    rank = 6

    def key(self):
        return (6, self.agent, self.child.key())

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((6, self.agent, self.child))
        return h

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is Bel and self.agent == other.agent and self.child == other.child

    def __repr__(self):
        return f"Bel({self.agent}, {self.child!r})"


def strict_gain(left, left_tag: Coalition, player: int, right, right_tag: Coalition) -> And:
    """The strict comparison abbreviation for a single player.

    left > right for `player` unfolds to: left >= right at player, and not
    (right >= left at player).  Member order below is already canonical
    (Geq sorts before Not).
    """
    over = Coalition.of(player)
    return And._presorted((
        Geq(left, left_tag, over, right, right_tag),
        Not(Geq(right, right_tag, over, left, left_tag)),
    ))


def as_strict_gain(f: Formula) -> Optional[tuple]:
    """Recognize the strict-comparison abbreviation; inverse of strict_gain.

    Returns (left, left_tag, player, right, right_tag) or None.
    """
    if type(f) is not And or len(f.members) != 2:
        return None
    a, b = f.members
    if type(a) is not Geq or type(b) is not Not or type(b.child) is not Geq:
        return None
    c = b.child
    if len(a.over) != 1 or a.over != c.over:
        return None
    if a.left == c.right and a.left_tag == c.right_tag \
            and a.right == c.left and a.right_tag == c.left_tag:
        return (a.left, a.left_tag, a.over.members[0], a.right, a.right_tag)
    return None


# ---------------------------------------------------------------------------
# layered formula sets (sequent sides)


class FormulaSet:
    """Immutable set of formulas: an optional shared base plus a small delta.

    Equality and the rule-check operations run on the deltas whenever two
    sets share the same base object, which is what makes checking proofs
    with large ambient knowledge sets affordable.  Content equality is
    independent of the layering split.
    """

    __slots__ = ("base", "extra", "_mat")

    def __init__(self, base: Optional[frozenset], extra: frozenset):
        if base is not None and extra and not extra.isdisjoint(base):
            extra = extra - base
        self.base = base
        self.extra = extra
        self._mat = None

    @staticmethod
    def of(formulas: Iterable[Formula] = ()) -> "FormulaSet":
        return FormulaSet(None, frozenset(formulas))

    @staticmethod
    def layered(base: frozenset, extra: Iterable[Formula] = ()) -> "FormulaSet":
        return FormulaSet(base, frozenset(extra))

    def materialize(self) -> frozenset:
        m = self._mat
        if m is None:
            m = self.extra if self.base is None else (self.base | self.extra)
            self._mat = m
        return m

    def __len__(self):
        return len(self.extra) + (0 if self.base is None else len(self.base))

    def __contains__(self, f):
        if f in self.extra:
            return True
        return self.base is not None and f in self.base

    def __iter__(self) -> Iterator[Formula]:
        if self.base is not None:
            yield from self.base
        yield from self.extra

    def __bool__(self):
        return bool(self.extra) or (self.base is not None and bool(self.base))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FormulaSet):
            return NotImplemented
        if self.base is other.base:
            return self.extra == other.extra
        if len(self) != len(other):
            return False
        return self.materialize() == other.materialize()

    __hash__ = None  # content hash would force materialization; use ids or materialize()

    def with_(self, f: Formula) -> "FormulaSet":
        if f in self:
            return self
        return _fs_make(self.base, self.extra | {f})

    def without(self, f: Formula) -> "FormulaSet":
        if f in self.extra:
            return _fs_make(self.base, self.extra - {f})
        if self.base is not None and f in self.base:
            return _fs_make(None, self.materialize() - {f})
        return self

    def union(self, formulas: Iterable[Formula]) -> "FormulaSet":
        fs = frozenset(formulas) - self.extra
        if self.base is not None:
            fs = fs - self.base
        if not fs:
            return self
        return _fs_make(self.base, self.extra | fs)

    def issubset(self, other: "FormulaSet") -> bool:
        if self is other:
            return True
        if self.base is other.base:
            return self.extra <= other.extra or all(f in other for f in self.extra)
        if self.base is None:
            return all(f in other for f in self.extra)
        if len(self) > len(other):
            return False
        return self.materialize() <= other.materialize()

    def __repr__(self):
        return f"FormulaSet({sorted(map(repr, self))})"


def _fs_make(base, extra) -> FormulaSet:
    # internal constructor for deltas already known disjoint from base
    fs = FormulaSet.__new__(FormulaSet)
    fs.base = base
    fs.extra = extra
    fs._mat = None
    return fs


def _extends(target: FormulaSet, ctx: FormulaSet, f: Formula) -> bool:
    """target == ctx with f added, without allocating on the shared-base path."""
    if target.base is ctx.base:
        te, ce = target.extra, ctx.extra
        if f in ce or (ctx.base is not None and f in ctx.base):
            return te == ce
        return len(te) == len(ce) + 1 and f in te and ce <= te
    return target == ctx.with_(f)


EMPTY_SET = FormulaSet(None, frozenset())


# ---------------------------------------------------------------------------
# sequents


class ThoughtSequent:
    """B_e[ante -> succ]: belief prefix e plus two finite formula sets."""

    __slots__ = ("prefix", "ante", "succ")

    def __init__(self, prefix: Sequence[int], ante, succ):
        self.prefix = tuple(prefix)
        self.ante = ante if type(ante) is FormulaSet else FormulaSet.of(ante)
        self.succ = succ if type(succ) is FormulaSet else FormulaSet.of(succ)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ThoughtSequent):
            return NotImplemented
        return (self.prefix == other.prefix and self.ante == other.ante
                and self.succ == other.succ)

    __hash__ = None

    def __repr__(self):
        return f"B{list(self.prefix)}[{self.ante!r} -> {self.succ!r}]"


# ---------------------------------------------------------------------------
# rules and proof trees


class Rule(str, Enum):
    LogicalAxiom = "LogicalAxiom"
    NonLogicalAxiom = "NonLogicalAxiom"
    Th = "Th"
    Cut = "Cut"
    NotLeft = "NotLeft"
    NotRight = "NotRight"
    ImpLeft = "ImpLeft"
    ImpRight = "ImpRight"
    AndLeft = "AndLeft"
    AndRight = "AndRight"
    OrLeft = "OrLeft"
    OrRight = "OrRight"
    EpistemicDist = "EpistemicDist"


class RuleMeta:
    """Optional hints naming a rule instance's moving parts.

    principal: the formula introduced/decomposed by the rule
    member:    the chosen member of a conjunction/disjunction (AndLeft, OrRight)
    cut:       the cut formula (Cut)
    agent:     the agent distributed over (EpistemicDist)
    """

    __slots__ = ("principal", "member", "cut", "agent")

    def __init__(self, principal: Optional[Formula] = None,
                 member: Optional[Formula] = None,
                 cut: Optional[Formula] = None,
                 agent: Optional[int] = None):
        self.principal = principal
        self.member = member
        self.cut = cut
        self.agent = agent

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, RuleMeta):
            return NotImplemented
        return (self.principal == other.principal and self.member == other.member
                and self.cut == other.cut and self.agent == other.agent)

    __hash__ = None

    def __repr__(self):
        parts = [f"{k}={getattr(self, k)!r}" for k in self.__slots__
                 if getattr(self, k) is not None]
        return f"RuleMeta({', '.join(parts)})"


class ProofTree:
    __slots__ = ("sequent", "rule", "children", "meta")

    def __init__(self, sequent: ThoughtSequent, rule: Rule,
                 children: tuple = (), meta: Optional[RuleMeta] = None):
        self.sequent = sequent
        self.rule = rule
        self.children = children
        self.meta = meta

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ProofTree):
            return NotImplemented
        return (self.rule == other.rule and self.sequent == other.sequent
                and self.children == other.children)

    __hash__ = None

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def __repr__(self):
        return f"ProofTree({self.rule.value}, {self.sequent!r}, {len(self.children)} children)"


# ---------------------------------------------------------------------------
# axioms


class ComparisonOracle:
    """Decides the primitive per-player comparison between payload values."""

    def geq(self, left_value, right_value) -> bool:  # pragma: no cover - interface
        raise NotImplementedError


class GridOracle(ComparisonOracle):
    """Payoff payloads are integer grid units; comparison is plain order."""

    def geq(self, left_value, right_value) -> bool:
        return left_value >= right_value


GRID_ORACLE = GridOracle()


def _geq_holds(f: Geq, oracle: ComparisonOracle) -> bool:
    left, right = f.left, f.right
    geq = oracle.geq
    for p in f.over.members:
        if not geq(left[p - 1], right[p - 1]):
            return False
    return True


def is_logical_axiom(seq: ThoughtSequent) -> bool:
    """B_e[A -> A]: singleton, identical sides."""
    return len(seq.ante) == 1 and seq.ante == seq.succ


def is_nonlogical_axiom(seq: ThoughtSequent, oracle: ComparisonOracle) -> bool:
    """Comparison facts with empty antecedent and a singleton succedent.

    B_e[-> left >= right over S]      iff the oracle confirms every member;
    B_e[-> not(left >= right over S)] iff the oracle refutes some member.
    Any prefix is allowed.
    """
    if seq.ante or len(seq.succ) != 1:
        return False
    (f,) = tuple(seq.succ)
    if type(f) is Geq:
        return _geq_holds(f, oracle)
    if type(f) is Not and type(f.child) is Geq:
        return not _geq_holds(f.child, oracle)
    return False


# ---------------------------------------------------------------------------
# rule instance checking
#
# Rules are printed with sequence-style contexts but sequents hold sets, so a
# context written "Gamma -> Theta, A" matches a concrete succedent S whenever
# either Theta = S - {A} or Theta = S (A absorbed into Theta).  Each checker
# below enumerates exactly those readings.


def _candidates_minus(s: FormulaSet, f: Formula) -> tuple:
    # the two legal readings of a context from which f was singled out
    return (s.without(f), s)


def _check_th(concl, prems, meta):
    (p,) = prems
    if p.prefix != concl.prefix:
        return "prefix mismatch"
    if not p.ante.issubset(concl.ante):
        return "antecedent not weakened"
    if not p.succ.issubset(concl.succ):
        return "succedent not weakened"
    return None


def _check_cut(concl, prems, meta):
    # from B[Gamma -> Theta, A] and B[A, Delta -> Lambda]
    # infer B[Delta, Gamma -> Theta, Lambda]
    p1, p2 = prems
    if p1.prefix != concl.prefix or p2.prefix != concl.prefix:
        return "prefix mismatch"
    if meta is not None and meta.cut is not None:
        cuts = [meta.cut]
    else:
        cuts = [f for f in p1.succ if f in p2.ante]
    for a in cuts:
        if a not in p1.succ or a not in p2.ante:
            continue
        if not any(concl.ante == p1.ante.union(delta)
                   for delta in _candidates_minus(p2.ante, a)):
            continue
        if any(concl.succ == theta.union(p2.succ)
               for theta in _candidates_minus(p1.succ, a)):
            return None
    return "no cut reading matches"


def _check_not_left(concl, prems, meta):
    # from B[Gamma -> Theta, A] infer B[not A, Gamma -> Theta]
    (p,) = prems
    if p.prefix != concl.prefix:
        return "prefix mismatch"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f.child for f in concl.ante if type(f) is Not]
    for a in cands:
        if _extends(concl.ante, p.ante, Not(a)) and _extends(p.succ, concl.succ, a):
            return None
    return "no negation-left reading matches"


def _check_not_right(concl, prems, meta):
    # from B[A, Gamma -> Theta] infer B[Gamma -> Theta, not A]
    (p,) = prems
    if p.prefix != concl.prefix:
        return "prefix mismatch"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f.child for f in concl.succ if type(f) is Not]
    for a in cands:
        if _extends(p.ante, concl.ante, a) and _extends(concl.succ, p.succ, Not(a)):
            return None
    return "no negation-right reading matches"


def _check_imp_left(concl, prems, meta):
    # from B[Gamma -> Theta, A] and B[B', Gamma -> Theta]
    # infer B[A implies B', Gamma -> Theta]
    p1, p2 = prems
    if p1.prefix != concl.prefix or p2.prefix != concl.prefix:
        return "prefix mismatch"
    if p2.succ != concl.succ:
        return "succedent changed"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f for f in concl.ante if type(f) is Implies]
    for imp in cands:
        if type(imp) is not Implies:
            continue
        if _extends(concl.ante, p1.ante, imp) \
                and _extends(p1.succ, concl.succ, imp.lhs) \
                and _extends(p2.ante, p1.ante, imp.rhs):
            return None
    return "no implication-left reading matches"


def _check_imp_right(concl, prems, meta):
    # from B[A, Gamma -> Theta, B'] infer B[Gamma -> Theta, A implies B']
    (p,) = prems
    if p.prefix != concl.prefix:
        return "prefix mismatch"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f for f in concl.succ if type(f) is Implies]
    for imp in cands:
        if type(imp) is not Implies or imp.rhs not in p.succ:
            continue
        if not _extends(p.ante, concl.ante, imp.lhs):
            continue
        if any(_extends(concl.succ, theta, imp)
               for theta in _candidates_minus(p.succ, imp.rhs)):
            return None
    return "no implication-right reading matches"


def _check_and_left(concl, prems, meta):
    (p,) = prems
    if p.prefix != concl.prefix:
        return "prefix mismatch"
    if p.succ != concl.succ:
        return "succedent changed"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f for f in concl.ante if type(f) is And]
    for conj in cands:
        if type(conj) is not And or conj not in concl.ante:
            continue
        members = (meta.member,) if meta is not None and meta.member is not None else conj.members
        for m in members:
            if m not in conj.members:
                continue
            for gamma in _candidates_minus(concl.ante, conj):
                if _extends(p.ante, gamma, m):
                    return None
    return "no conjunction-left reading matches"


def _match_premise_family(concl_side_cands, fixed_side, members, prems,
                          get_variable_side, get_fixed_side):
    """Shared shape for AndRight/OrLeft: one premise per member, common context.

    Tries the in-order pairing first, then any bijection.  Sides are compared
    with _extends, so nothing is materialised on the match path.
    """
    if len(prems) != len(members):
        return "premise count must equal member count"
    if any(get_fixed_side(p) != fixed_side for p in prems):
        return "premises do not cover the members"
    var_sides = [get_variable_side(p) for p in prems]
    for ctx in concl_side_cands:
        if all(_extends(v, ctx, m) for v, m in zip(var_sides, members)):
            return None
        used = [False] * len(prems)
        ok = True
        for m in members:
            for j, v in enumerate(var_sides):
                if not used[j] and _extends(v, ctx, m):
                    used[j] = True
                    break
            else:
                ok = False
                break
        if ok:
            return None
    return "premises do not cover the members"


def _check_and_right(concl, prems, meta):
    if any(p.prefix != concl.prefix for p in prems):
        return "prefix mismatch"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f for f in concl.succ if type(f) is And]
    for conj in cands:
        if type(conj) is not And or conj not in concl.succ:
            continue
        res = _match_premise_family(
            _candidates_minus(concl.succ, conj), concl.ante, conj.members, prems,
            get_variable_side=lambda p: p.succ, get_fixed_side=lambda p: p.ante)
        if res is None:
            return None
    return "no conjunction-right reading matches"


def _check_or_left(concl, prems, meta):
    if any(p.prefix != concl.prefix for p in prems):
        return "prefix mismatch"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f for f in concl.ante if type(f) is Or]
    for disj in cands:
        if type(disj) is not Or or disj not in concl.ante:
            continue
        res = _match_premise_family(
            _candidates_minus(concl.ante, disj), concl.succ, disj.members, prems,
            get_variable_side=lambda p: p.ante, get_fixed_side=lambda p: p.succ)
        if res is None:
            return None
    return "no disjunction-left reading matches"


def _check_or_right(concl, prems, meta):
    (p,) = prems
    if p.prefix != concl.prefix:
        return "prefix mismatch"
    if p.ante != concl.ante:
        return "antecedent changed"
    if meta is not None and meta.principal is not None:
        cands = [meta.principal]
    else:
        cands = [f for f in concl.succ if type(f) is Or]
    for disj in cands:
        if type(disj) is not Or or disj not in concl.succ:
            continue
        members = (meta.member,) if meta is not None and meta.member is not None else disj.members
        for m in members:
            if m not in disj.members:
                continue
            for theta in _candidates_minus(concl.succ, disj):
                if _extends(p.succ, theta, m):
                    return None
    return "no disjunction-right reading matches"


def _check_epistemic(concl, prems, meta):
    (p,) = prems
    if len(concl.succ) > 1:
        return "epistemic distribution needs at most one succedent formula"
    agents = set()
    for f in concl.ante:
        if type(f) is not Bel:
            return "antecedent must be fully inside one agent's belief"
        agents.add(f.agent)
    for f in concl.succ:
        if type(f) is not Bel:
            return "succedent must be fully inside one agent's belief"
        agents.add(f.agent)
    if meta is not None and meta.agent is not None:
        agents.add(meta.agent)
    if len(agents) != 1:
        return "no single distributing agent" if agents or meta is None else "agent hint missing"
    (i,) = tuple(agents)
    if p.prefix != concl.prefix + (i,):
        return "premise prefix must extend the conclusion prefix by the agent"
    if p.ante != FormulaSet.of(f.child for f in concl.ante):
        return "premise antecedent must strip the belief operator"
    if p.succ != FormulaSet.of(f.child for f in concl.succ):
        return "premise succedent must strip the belief operator"
    return None


_ARITY = {
    Rule.Th: 1, Rule.Cut: 2, Rule.NotLeft: 1, Rule.NotRight: 1,
    Rule.ImpLeft: 2, Rule.ImpRight: 1, Rule.AndLeft: 1, Rule.OrRight: 1,
    Rule.EpistemicDist: 1,
}

_CHECKERS = {
    Rule.Th: _check_th,
    Rule.Cut: _check_cut,
    Rule.NotLeft: _check_not_left,
    Rule.NotRight: _check_not_right,
    Rule.ImpLeft: _check_imp_left,
    Rule.ImpRight: _check_imp_right,
    Rule.AndLeft: _check_and_left,
    Rule.AndRight: _check_and_right,
    Rule.OrLeft: _check_or_left,
    Rule.OrRight: _check_or_right,
    Rule.EpistemicDist: _check_epistemic,
}


def rule_instance_valid(conclusion: ThoughtSequent, premises: Sequence[ThoughtSequent],
                        rule: Rule, meta: Optional[RuleMeta] = None) -> bool:
    """Check one inference step against its rule schema (axioms excluded)."""
    return _rule_failure(conclusion, tuple(premises), rule, meta) is None


# rule -> (checker, arity); arity None means "one per member", at least one
_RULE_TABLE = {rule: (_CHECKERS[rule], _ARITY.get(rule)) for rule in _CHECKERS}


def _rule_failure(conclusion, premises, rule, meta) -> Optional[str]:
    entry = _RULE_TABLE.get(rule)
    if entry is None:
        return f"{rule.value} is not an inference rule"
    checker, want = entry
    if want is not None:
        if len(premises) != want:
            return f"{rule.value} takes {want} premise(s), got {len(premises)}"
    elif not premises:
        return f"{rule.value} needs at least one premise"
    return checker(conclusion, premises, meta)


# ---------------------------------------------------------------------------
# proof checking


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


class ChainCache:
    """Layered check_proof cache.

    Lookups consult the persistent layers in order, inserts land in the
    local layer.  Persistent layers must only hold ids of subtrees that are
    kept alive at least as long as the layer (ids of dead objects can be
    reused); discard the local layer together with the proof it served,
    unless it too only records long-lived trees.
    """

    __slots__ = ("layers", "local")

    def __init__(self, *layers: dict, local: Optional[dict] = None):
        self.layers = layers
        self.local = local if local is not None else {}

    def get(self, key):
        for d in self.layers:
            hit = d.get(key)
            if hit is not None:
                return hit
        return self.local.get(key)

    def __setitem__(self, key, value):
        self.local[key] = value


_OK = CheckResult(True)


def check_proof(tree: ProofTree, oracle: ComparisonOracle,
                cache: Optional[dict] = None) -> CheckResult:
    """Validate every node of a proof tree.

    `cache` maps id(subtree) -> CheckResult and may be shared across calls
    when trees reuse immutable subproofs; it is purely an accelerator.
    Returns a falsy result carrying the child-index path to the first
    failing node and a reason.
    """
    if cache is not None:
        hit = cache.get(id(tree))
        if hit is not None:
            return hit
    res = _check_node(tree, oracle, cache)
    if cache is not None:
        cache[id(tree)] = res
    return res


def _check_node(tree, oracle, cache) -> CheckResult:
    rule = tree.rule
    seq = tree.sequent
    if rule is Rule.LogicalAxiom:
        if tree.children:
            return CheckResult(False, (), "axioms take no premises")
        if not is_logical_axiom(seq):
            return CheckResult(False, (), "not a logical axiom")
        return _OK
    if rule is Rule.NonLogicalAxiom:
        if tree.children:
            return CheckResult(False, (), "axioms take no premises")
        if not is_nonlogical_axiom(seq, oracle):
            return CheckResult(False, (), "not a non-logical axiom under this oracle")
        return _OK
    reason = _rule_failure(seq, tuple(c.sequent for c in tree.children), rule, tree.meta)
    if reason is not None:
        return CheckResult(False, (), f"{rule.value}: {reason}")
    for k, child in enumerate(tree.children):
        # inline the cache hit: shared subtrees skip a call frame
        sub = cache.get(id(child)) if cache is not None else None
        if sub is None:
            sub = check_proof(child, oracle, cache)
        if not sub.ok:
            return CheckResult(False, (k,) + sub.path, sub.reason)
    return _OK
