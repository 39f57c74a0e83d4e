"""Exact rational linear feasibility with Motzkin infeasibility certificates.

A :class:`RationalLinearSystem` is a list of rows ``<a, x> REL b`` over
named real variables with ``REL`` one of ``>``, ``>=`` or ``=``.  Strict
rows are handled by a slack ``eps``: every strict row becomes
``<a, x> - eps >= b``, ``0 <= eps <= 1`` is added, and ``eps`` is
maximised with a two-phase tableau simplex under Bland's rule.  The system
has a solution iff the optimum is positive.

When it does not, the optimal dual (or the phase-one Farkas ray) is
converted back into multipliers ``y`` on the original rows such that

* ``y_i >= 0`` on every inequality row,
* ``sum_i y_i a_i = 0``, and
* ``sum_i y_i b_i > 0``, or ``= 0`` with positive weight on a strict row,

so that summing the rows yields ``0 > 0`` or ``0 >= q > 0``.
:func:`verify_certificate` re-checks those three conditions by plain
arithmetic and never looks at the solver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import gmpy2

Rational = Fraction
RELATIONS = (">", ">=", "=")
_FLIP = {"<": ">", "<=": ">="}

Number = Union[int, str, Fraction]


class LPError(Exception):
    pass


class UnboundedArtifact(LPError):
    """The slack LP came out unbounded, which the construction rules out."""


class DimensionMismatch(LPError):
    pass


def as_rational(x: Number) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact systems; pass a str or Fraction")
    return Fraction(x)


@dataclass(frozen=True)
class Row:
    coeffs: Mapping[str, Fraction]
    rel: str
    rhs: Fraction
    name: str = ""

    @classmethod
    def make(cls, coeffs: Mapping[str, Number], rel: str, rhs: Number, name: str = "") -> "Row":
        """Build a row, rewriting ``<``/``<=`` as ``>``/``>=`` by negation."""
        q = {k: as_rational(v) for k, v in coeffs.items()}
        b = as_rational(rhs)
        if rel in _FLIP:
            q = {k: -v for k, v in q.items()}
            b, rel = -b, _FLIP[rel]
        if rel not in RELATIONS:
            raise ValueError(f"unknown relation {rel!r}")
        return cls({k: v for k, v in q.items() if v}, rel, b, name)

    def lhs(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((c * point[k] for k, c in self.coeffs.items()), Fraction(0))

    def holds(self, point: Mapping[str, Fraction]) -> bool:
        lhs = self.lhs(point)
        if self.rel == ">":
            return lhs > self.rhs
        if self.rel == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs

    def render(self) -> str:
        terms = []
        for k, c in self.coeffs.items():
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            sign = "-" if c < 0 else "+"
            terms.append(f"{sign} {mag}{k}")
        text = " ".join(terms).lstrip("+ ") or "0"
        if text.startswith("- "):
            text = "-" + text[2:]
        return f"{text} {self.rel} {self.rhs}"


@dataclass
class RationalLinearSystem:
    variables: tuple[str, ...]
    rows: list[Row] = field(default_factory=list)

    def add(self, coeffs: Mapping[str, Number], rel: str, rhs: Number, name: str = "") -> Row:
        return self.append(Row.make(coeffs, rel, rhs, name))

    def append(self, row: Row) -> Row:
        unknown = set(row.coeffs) - set(self.variables)
        if unknown:
            raise ValueError(f"unknown variables {sorted(unknown)}")
        self.rows.append(row)
        return row

    @property
    def equalities(self) -> list[Row]:
        return [r for r in self.rows if r.rel == "="]

    @property
    def strict_inequalities(self) -> list[Row]:
        return [r for r in self.rows if r.rel == ">"]

    @property
    def weak_inequalities(self) -> list[Row]:
        return [r for r in self.rows if r.rel == ">="]

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def without(self, predicate) -> "RationalLinearSystem":
        return RationalLinearSystem(self.variables, [r for r in self.rows if not predicate(r)])

    def satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        return all(r.holds(point) for r in self.rows)

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "rows": [
                {
                    "name": r.name,
                    "coeffs": {k: str(v) for k, v in r.coeffs.items()},
                    "rel": r.rel,
                    "rhs": str(r.rhs),
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RationalLinearSystem":
        sys_ = cls(tuple(obj["variables"]))
        for r in obj["rows"]:
            sys_.add(r["coeffs"], r["rel"], r["rhs"], r.get("name", ""))
        return sys_


@dataclass(frozen=True)
class InfeasibilityCertificate:
    multipliers: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"multipliers": [str(m) for m in self.multipliers]}

    @classmethod
    def from_json(cls, obj: dict) -> "InfeasibilityCertificate":
        return cls(tuple(Fraction(m) for m in obj["multipliers"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


@dataclass(frozen=True)
class Feasible:
    point: dict[str, Fraction]
    eps: Fraction  # every strict row holds with at least this much room


@dataclass(frozen=True)
class Infeasible:
    certificate: InfeasibilityCertificate


FeasibilityOutcome = Union[Feasible, Infeasible]


def verify_certificate(system: RationalLinearSystem, cert: InfeasibilityCertificate) -> bool:
    """Check that ``cert`` combines the rows of ``system`` into ``0 > 0`` or ``0 >= q > 0``."""
    if len(cert.multipliers) != len(system.rows):
        raise DimensionMismatch(
            f"{len(cert.multipliers)} multipliers for {len(system.rows)} rows"
        )
    combined = {v: Fraction(0) for v in system.variables}
    total = Fraction(0)
    strict_mass = Fraction(0)
    for y, row in zip(cert.multipliers, system.rows):
        if not y:
            continue
        y = Fraction(y)
        if row.rel != "=" and y < 0:
            return False
        for k, c in row.coeffs.items():
            if k not in combined:
                return False
            combined[k] += y * c
        total += y * row.rhs
        if row.rel == ">":
            strict_mass += y
    if any(combined.values()):
        return False
    return total > 0 or (total == 0 and strict_mass > 0)


# -- simplex ---------------------------------------------------------------

_Q = gmpy2.mpq
_ZERO = _Q(0)


class _Tableau:
    """Dense tableau; the last entry of each row is the right-hand side."""

    def __init__(self, rows: list[list], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.obj: list = []
        self.pivots = 0

    def pivot(self, r: int, col: int) -> None:
        prow = self.rows[r]
        inv = 1 / prow[col]
        nz = [j for j, x in enumerate(prow) if x]
        for j in nz:
            prow[j] *= inv
        for k, row in enumerate(self.rows):
            if k != r:
                f = row[col]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
        f = self.obj[col]
        if f:
            for j in nz:
                self.obj[j] -= f * prow[j]
        self.basis[r] = col
        self.pivots += 1

    def run(self, allowed: Sequence[int]) -> bool:
        """Bland's rule to optimality; False if unbounded."""
        rhs = len(self.obj) - 1
        while True:
            col = next((j for j in allowed if self.obj[j] < 0), None)
            if col is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    key = (row[rhs] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], col)


def _normalise(mult: list[Fraction]) -> tuple[Fraction, ...]:
    pos = [m for m in mult if m > 0]
    scale = min(pos) if pos else min(abs(m) for m in mult if m)
    return tuple(m / scale for m in mult)


def _sign_rows(system: RationalLinearSystem) -> dict[str, int]:
    """Variables forced non-negative by a row ``c*x (>|>=) b`` with c > 0, b >= 0."""
    out: dict[str, int] = {}
    for i, r in enumerate(system.rows):
        if r.rel != "=" and len(r.coeffs) == 1 and r.rhs >= 0:
            ((k, c),) = r.coeffs.items()
            if c > 0 and k not in out:
                out[k] = i
    return out


def solve_feasibility(system: RationalLinearSystem) -> FeasibilityOutcome:
    """Decide whether ``system`` has a real solution, exactly.

    Returns :class:`Feasible` with a rational point satisfying every row, or
    :class:`Infeasible` with a certificate accepted by
    :func:`verify_certificate`.  Pivoting follows Bland's rule, so the
    result is a deterministic function of the system.
    """
    names = system.variables
    n = len(names)
    rows = system.rows
    m = len(rows)
    col = {v: j for j, v in enumerate(names)}
    # a variable already bounded below by 0 needs no negative part; its
    # bounding row absorbs the leftover reduced cost in the certificate
    nonneg = _sign_rows(system)
    free = [v for v in names if v not in nonneg]
    neg = {v: n + k for k, v in enumerate(free)}

    # columns: x+ | x- (free only) | eps | surplus per inequality row | bound slack | artificials
    eps_col = n + len(free)
    ineq = [i for i, r in enumerate(rows) if r.rel != "="]
    surplus = {i: eps_col + 1 + k for k, i in enumerate(ineq)}
    bound_slack = eps_col + 1 + len(ineq)
    need_art = [i for i, r in enumerate(rows) if r.rel == "=" or r.rhs > 0]
    art = {i: bound_slack + 1 + k for k, i in enumerate(need_art)}
    width = bound_slack + 1 + len(need_art)

    tab_rows: list[list] = []
    basis: list[int] = []
    sign: list[int] = []
    unit: list[int] = []
    for i, r in enumerate(rows):
        line = [_ZERO] * (width + 1)
        for k, c in r.coeffs.items():
            line[col[k]] = _Q(c)
            if k in neg:
                line[neg[k]] = _Q(-c)
        if r.rel == ">":
            line[eps_col] = _Q(-1)
        if r.rel != "=":
            line[surplus[i]] = _Q(-1)
        line[width] = _Q(r.rhs)
        s = 1
        if i not in art or r.rhs < 0:
            # keep the rhs non-negative; without an artificial the negated
            # surplus column is the row's unit column
            s = -1
            line = [-x for x in line]
        sign.append(s)
        if i in art:
            line[art[i]] = _Q(1)
            unit.append(art[i])
        else:
            unit.append(surplus[i])
        basis.append(unit[-1])
        tab_rows.append(line)
    bound = [_ZERO] * (width + 1)
    bound[eps_col] = _Q(1)
    bound[bound_slack] = _Q(1)
    bound[width] = _Q(1)
    tab_rows.append(bound)
    basis.append(bound_slack)
    unit.append(bound_slack)

    tab = _Tableau(tab_rows, basis)
    art_cols = set(art.values())
    real_cols = [j for j in range(width) if j not in art_cols]

    def multipliers(cost: dict[int, int]) -> list[Fraction]:
        # y_i = reduced cost + cost of the row's unit column; mapped back to the
        # un-negated original row and sign-flipped into certificate form
        ys = [-(tab.obj[unit[i]] + cost.get(unit[i], 0)) * sign[i] for i in range(m)]
        residue = dict.fromkeys(nonneg, _ZERO)
        for y, r in zip(ys, rows):
            if y:
                for k, c in r.coeffs.items():
                    if k in residue:
                        residue[k] += y * _Q(c)
        for k, i in nonneg.items():
            ys[i] -= residue[k] / _Q(rows[i].coeffs[k])
        return [Fraction(int(y.numerator), int(y.denominator)) for y in ys]

    # phase one: maximise -sum(artificials)
    phase1_cost = {j: -1 for j in art_cols}
    obj = [_ZERO] * (width + 1)
    for j in art_cols:
        obj[j] = _Q(1)
    for i, b in enumerate(basis):
        if b in art_cols:
            obj = [o - x for o, x in zip(obj, tab_rows[i])]
    tab.obj = obj
    tab.run(list(range(width)))
    if tab.obj[width] < 0:
        return Infeasible(InfeasibilityCertificate(_normalise(multipliers(phase1_cost))))

    for i in range(len(tab.rows)):
        if tab.basis[i] in art_cols:
            j = next((j for j in real_cols if tab.rows[i][j]), None)
            if j is not None:
                tab.pivot(i, j)

    # phase two: maximise eps
    obj = [_ZERO] * (width + 1)
    obj[eps_col] = _Q(-1)
    for i, b in enumerate(tab.basis):
        if b == eps_col:
            obj = [o + x for o, x in zip(obj, tab.rows[i])]
    tab.obj = obj
    if not tab.run(real_cols):
        raise UnboundedArtifact("eps is bounded by 1; the system builder is broken")
    eps_star = tab.obj[width]
    if eps_star > 0:
        value = [_ZERO] * width
        for i, b in enumerate(tab.basis):
            value[b] = tab.rows[i][width]
        point = {}
        for v, j in col.items():
            x = value[j] - (value[neg[v]] if v in neg else 0)
            point[v] = Fraction(int(x.numerator), int(x.denominator))
        return Feasible(point, Fraction(int(eps_star.numerator), int(eps_star.denominator)))
    return Infeasible(InfeasibilityCertificate(_normalise(multipliers({}))))


def combined_relation(system: RationalLinearSystem, cert: InfeasibilityCertificate) -> str:
    """Human-readable form of the contradiction a certificate produces."""
    total = sum((Fraction(y) * r.rhs for y, r in zip(cert.multipliers, system.rows)), Fraction(0))
    strict = any(y > 0 and r.rel == ">" for y, r in zip(cert.multipliers, system.rows))
    return f"0 {'>' if strict else '>='} {total}"


def certificate_terms(
    system: RationalLinearSystem, cert: InfeasibilityCertificate
) -> Iterable[tuple[Fraction, Row]]:
    return ((y, r) for y, r in zip(cert.multipliers, system.rows) if y)
