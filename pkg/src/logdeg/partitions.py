"""Partitions, partition tuples and the coefficient algebra of the Nakajima basis.

Cohomology classes are opaque labels. A pairing table per boundary divisor
supplies the bilinear pairing on labels and the Künneth rows of the diagonal.
"""
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, prod

from sympy.functions.combinatorial.numbers import partition as _partition_count


class PartitionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise PartitionError(f"parts must be positive: {parts}")
        if list(parts) != sorted(parts, reverse=True):
            raise PartitionError(f"parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, parts):
        return cls(tuple(sorted((int(p) for p in parts), reverse=True)))

    @property
    def size(self):
        return sum(self.parts)

    @property
    def length(self):
        return len(self.parts)

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True, order=True)
class PartitionTuple:
    entries: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(
            e if isinstance(e, Partition) else Partition.of(e) for e in self.entries))

    @classmethod
    def of(cls, *entries):
        return cls(tuple(entries))

    @property
    def sizes(self):
        return tuple(e.size for e in self.entries)

    @property
    def size(self):
        return sum(self.sizes)

    @property
    def length(self):
        return sum(e.length for e in self.entries)

    def __add__(self, other):
        return PartitionTuple(self.entries + other.entries)

    def __str__(self):
        if len(self.entries) == 1:
            return str(self.entries[0])
        return "(" + ",".join(map(str, self.entries)) + ")"


@dataclass(frozen=True, order=True)
class WeightedPartitionTuple:
    """A partition tuple decorated by one class label per factor."""
    tuple: PartitionTuple
    labels: tuple

    def __post_init__(self):
        labels = self.labels
        if isinstance(labels, str):
            labels = (labels,) * len(self.tuple.entries)
        if len(labels) != len(self.tuple.entries):
            raise PartitionError("one label per factor is required")
        object.__setattr__(self, "labels", tuple(labels))

    def __str__(self):
        if len(set(self.labels)) == 1:
            return f"{self.tuple}[{self.labels[0]}]" if self.labels else str(self.tuple)
        return f"{self.tuple}[{','.join(self.labels)}]"


def partitions_of(n):
    """All partitions of n, weakly decreasing, in reverse lexicographic order."""
    def rec(left, cap):
        if left == 0:
            yield ()
            return
        for p in range(min(left, cap), 0, -1):
            for rest in rec(left - p, p):
                yield (p,) + rest

    return [Partition(p) for p in rec(int(n), int(n))]


def partition_tuples(sizes):
    return [PartitionTuple(t) for t in product(*(partitions_of(n) for n in sizes))]


def partition_count(n):
    return int(_partition_count(int(n)))


def _entries(mu):
    if isinstance(mu, Partition):
        return (mu,)
    if isinstance(mu, PartitionTuple):
        return mu.entries
    if isinstance(mu, WeightedPartitionTuple):
        return mu.tuple.entries
    return PartitionTuple(tuple(mu)).entries


def m_of(mu):
    return prod(p for e in _entries(mu) for p in e.parts)


def sign_of(mu):
    return (-1) ** sum(e.size - e.length for e in _entries(mu))


def aut_of(mu):
    return prod(factorial(c) for e in _entries(mu) for c in Counter(e.parts).values())


def nakajima_pairing(mu, nu):
    """<mu, nu> on the partition basis: (-1)^mu m_mu Aut(mu) on the diagonal."""
    if PartitionTuple(_entries(mu)) != PartitionTuple(_entries(nu)):
        return 0
    return sign_of(mu) * m_of(mu) * aut_of(mu)


@dataclass
class PairingTable:
    """Labels of one boundary divisor, their pairing and the Künneth rows
    (left label, right label, coefficient) of its diagonal class."""
    labels: tuple
    pairing: dict
    rows: tuple
    name: str = ""

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.pairing = {tuple(k): Fraction(v) for k, v in dict(self.pairing).items()}
        self.rows = tuple((a, b, Fraction(c)) for a, b, c in self.rows)
        known = set(self.labels)
        for a, b in self.pairing:
            if a not in known or b not in known:
                raise PartitionError(f"pairing table {self.name!r}: unknown label in {(a, b)}")
        for a, b, _ in self.rows:
            for x in (a, b):
                if x not in known:
                    raise PartitionError(f"pairing table {self.name!r}: unknown label {x!r}")

    @classmethod
    def default(cls, name=""):
        """Unit and point classes with <unit, point> = 1; the diagonal keeps
        the single row point ⊗ unit."""
        return cls(("unit", "point"), {("unit", "point"): 1, ("point", "unit"): 1},
                   (("point", "unit", 1),), name)

    def pair(self, a, b):
        for x in (a, b):
            if x not in self.labels:
                raise PartitionError(f"unknown label {x!r}")
        return self.pairing.get((a, b), Fraction(0))

    def to_json(self):
        return {"name": self.name, "labels": list(self.labels),
                "pairing": [[a, b, str(c)] for (a, b), c in sorted(self.pairing.items())],
                "rows": [[a, b, str(c)] for a, b, c in self.rows]}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["labels"], {(a, b): Fraction(c.replace("−", "-"))
                                       for a, b, c in obj["pairing"]},
                       [(a, b, Fraction(str(c).replace("−", "-"))) for a, b, c in obj["rows"]],
                       obj.get("name", ""))
        except (KeyError, TypeError, ValueError) as exc:
            raise PartitionError(f"malformed pairing table: {exc}") from exc


def load_pairing_tables(text):
    """A JSON document: one pairing table, or a list with one per divisor."""
    obj = json.loads(text)
    if isinstance(obj, dict):
        obj = [obj]
    return [PairingTable.from_json(o) for o in obj]


@dataclass
class FormalVector:
    """Finite linear combination of hashable basis symbols over Q."""
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: Fraction(v) for k, v in dict(self.terms).items() if v != 0}

    def add(self, symbol, coeff):
        c = self.terms.get(symbol, Fraction(0)) + Fraction(coeff)
        if c:
            self.terms[symbol] = c
        else:
            self.terms.pop(symbol, None)

    def __add__(self, other):
        out = FormalVector(self.terms)
        for k, v in other.terms.items():
            out.add(k, v)
        return out

    def scale(self, c):
        return FormalVector({k: v * Fraction(c) for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, FormalVector) and self.terms == other.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: _symbol_key(kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for sym, c in self.items():
            text = _show_symbol(sym)
            coeff = str(abs(c))
            body = text if abs(c) == 1 else f"{coeff}*{text}"
            out.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _symbol_key(sym):
    if isinstance(sym, tuple):
        return tuple(_symbol_key(s) for s in sym)
    if isinstance(sym, WeightedPartitionTuple):
        return (tuple(tuple(-p for p in e.parts) for e in sym.tuple.entries), sym.labels)
    return (str(sym),)


def _show_symbol(sym):
    if isinstance(sym, tuple) and len(sym) == 2:
        return f"[{sym[0]}⊗{sym[1]}]"
    return f"[{sym}]"


def diagonal_decomposition(sizes, pairing=None):
    """Σ_μ (-1)^μ/(Aut(μ) m_μ) Σ_j μ(δ_L^j) ⊗ μ(δ_R^j) over partition tuples μ
    of the given sizes. `pairing` is one table for every factor or a list
    with one table per factor."""
    sizes = tuple(int(n) for n in sizes)
    tables = _tables_for(sizes, pairing)
    out = FormalVector()
    rows = list(product(*(t.rows for t in tables)))
    for mu in partition_tuples(sizes):
        base = Fraction(sign_of(mu), aut_of(mu) * m_of(mu))
        for choice in rows:
            c = base * prod((r[2] for r in choice), start=Fraction(1))
            left = WeightedPartitionTuple(mu, tuple(r[0] for r in choice))
            right = WeightedPartitionTuple(mu, tuple(r[1] for r in choice))
            out.add((left, right), c)
    return out


def _tables_for(sizes, pairing):
    if pairing is None:
        return [PairingTable.default(f"D{i}") for i in range(len(sizes))]
    if isinstance(pairing, PairingTable):
        return [pairing] * len(sizes)
    tables = list(pairing)
    if len(tables) != len(sizes):
        raise PartitionError(f"{len(tables)} pairing tables for {len(sizes)} factors")
    return tables


def contract_right(vec, x, pairing=None):
    """Pair the right factor of every term of a diagonal vector with x."""
    n = len(x.tuple.entries)
    tables = _tables_for((0,) * n, pairing)
    out = FormalVector()
    for (left, right), c in vec.terms.items():
        p = nakajima_pairing(right.tuple, x.tuple)
        if not p:
            continue
        for t, a, b in zip(tables, right.labels, x.labels):
            p *= t.pair(a, b)
        out.add(left, c * p)
    return out


def _gamma_pairing(mu, nu):
    """Γ^tr∘Γ on the partition-tuple basis."""
    return sign_of(mu) * m_of(mu) if mu == nu else 0


def _matmul(a, b):
    """Product of matrices stored as {(row, col): entry} with zeros omitted."""
    by_row = {}
    for (t, j), y in b.items():
        by_row.setdefault(t, []).append((j, y))
    out = {}
    for (i, t), x in a.items():
        for j, y in by_row.get(t, ()):
            out[(i, j)] = out.get((i, j), Fraction(0)) + x * y
    return {k: v for k, v in out.items() if v}


def gamma_inverse_check(sizes):
    """Does ⊕ ((-1)^μ/m_μ) Γ^tr invert Γ on partition tuples of these sizes?"""
    basis = partition_tuples(sizes)
    if len(basis) != prod(partition_count(n) for n in sizes):
        return False
    gram = {(i, j): Fraction(x) for i, mu in enumerate(basis) for j, nu in enumerate(basis)
            if (x := _gamma_pairing(mu, nu))}
    inv = {(i, i): Fraction(sign_of(mu), m_of(mu)) for i, mu in enumerate(basis)}
    return _matmul(inv, gram) == {(i, i): 1 for i in range(len(basis))}
