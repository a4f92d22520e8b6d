"""Exact truncated Laurent series and rational functions in one variable.

Coefficients live in the Gaussian rationals (sympy's QQ_I), so series over Q
and the u-series produced by the substitution -q = e^{iu} share one type.
A series knows its coefficients up to and including `trunc`; every operation
propagates the order it can actually vouch for.
"""
import json
import re
from dataclasses import dataclass
from fractions import Fraction

from sympy import Poly, Symbol, sympify
from sympy.polys.domains import QQ, QQ_I

from .lattice import nullspace

ZERO = QQ_I.zero
ONE = QQ_I.one
I = QQ_I(0, 1)


class SeriesError(ValueError):
    pass


class TruncationError(SeriesError):
    pass


def scalar(x):
    """Coerce ints, Fractions, strings and Gaussian rationals to QQ_I."""
    if isinstance(x, str):
        return parse_scalar(x)
    if type(x).__name__ == "GaussianRational":
        return x
    if isinstance(x, complex):
        raise SeriesError("floating point scalars are not exact")
    return QQ_I(QQ(Fraction(x).numerator, Fraction(x).denominator), 0)


_TERM = re.compile(r"[+-]?[^+-]+")


def parse_scalar(text):
    s = text.replace("−", "-").replace(" ", "")
    if not s:
        raise SeriesError("empty scalar")
    re_part, im_part = Fraction(0), Fraction(0)
    try:
        for term in _TERM.findall(s):
            if "i" in term or "I" in term:
                body = term.replace("i", "").replace("I", "").replace("*", "")
                sign = -1 if body.startswith("-") else 1
                body = body.lstrip("+-")
                if body.startswith("/"):
                    body = "1" + body
                im_part += sign * Fraction(body or 1)
            else:
                re_part += Fraction(term)
    except (ValueError, ZeroDivisionError) as exc:
        raise SeriesError(f"cannot parse scalar {text!r}") from exc
    if "".join(_TERM.findall(s)) != s:
        raise SeriesError(f"cannot parse scalar {text!r}")
    return scalar(re_part) + scalar(im_part) * I


def _fraction(q):
    return Fraction(int(q.numerator), int(q.denominator))


def real_part(c):
    return _fraction(scalar(c).x)


def imag_part(c):
    return _fraction(scalar(c).y)


def exact(c):
    """A Fraction when c is real, else the Gaussian rational itself."""
    c = scalar(c)
    return _fraction(c.x) if not c.y else c


def format_scalar(c):
    """'3/2', '-1/240', 'i/4', '3i/2', '1/2-i'."""
    c = scalar(c)
    a, b = _fraction(c.x), _fraction(c.y)
    if not b:
        return str(a)
    p, q = abs(b.numerator), b.denominator
    im = ("i" if p == 1 else f"{p}i") + (f"/{q}" if q != 1 else "")
    if not a:
        return ("-" if b < 0 else "") + im
    return f"{a}{'-' if b < 0 else '+'}{im}"


class LaurentSeries:
    """Σ_{k=min_exp}^{trunc} c_k var^k + O(var^{trunc+1})."""

    __slots__ = ("var", "min_exp", "coeffs", "trunc")

    def __init__(self, coeffs=(), min_exp=0, trunc=None, var="q"):
        cs = [scalar(c) for c in coeffs]
        if trunc is None:
            trunc = min_exp + len(cs) - 1
        cs = cs[:max(0, trunc - min_exp + 1)]
        cs += [ZERO] * (trunc - min_exp + 1 - len(cs))
        lead = 0
        while lead < len(cs) and not cs[lead]:
            lead += 1
        self.var = var
        self.trunc = int(trunc)
        self.min_exp = int(min_exp) + lead if lead < len(cs) else self.trunc + 1
        self.coeffs = tuple(cs[lead:])

    @classmethod
    def constant(cls, c, trunc, var="q"):
        return cls([c], 0, trunc, var)

    @classmethod
    def monomial(cls, k, trunc, c=1, var="q"):
        return cls([c], k, trunc, var)

    @classmethod
    def from_dict(cls, terms, trunc, var="q"):
        if not terms:
            return cls([], trunc + 1, trunc, var)
        lo = min(terms)
        return cls([terms.get(k, 0) for k in range(lo, trunc + 1)], lo, trunc, var)

    # -- inspection
    def is_zero(self):
        return not self.coeffs

    @property
    def valuation(self):
        return None if self.is_zero() else self.min_exp

    @property
    def field(self):
        return "QI" if any(c.y for c in self.coeffs) else "Q"

    def coefficient(self, k):
        if k > self.trunc:
            raise TruncationError(f"coefficient of {self.var}^{k} is beyond the "
                                  f"truncation order {self.trunc}")
        if k < self.min_exp:
            return ZERO
        return self.coeffs[k - self.min_exp]

    def __getitem__(self, k):
        return self.coefficient(k)

    def terms(self):
        return {self.min_exp + i: c for i, c in enumerate(self.coeffs) if c}

    def exact_coefficients(self, lo=None):
        lo = self.min_exp if lo is None else lo
        return [exact(self.coefficient(k)) for k in range(lo, self.trunc + 1)]

    # -- arithmetic
    def _other(self, other):
        if isinstance(other, LaurentSeries):
            if other.var != self.var:
                raise SeriesError(f"series in {self.var} and {other.var} do not mix")
            return other
        return LaurentSeries.constant(other, self.trunc, self.var)

    def __add__(self, other):
        other = self._other(other)
        t = min(self.trunc, other.trunc)
        lo = min(self.min_exp, other.min_exp)
        return LaurentSeries([self._at(k) + other._at(k) for k in range(lo, t + 1)],
                             lo, t, self.var)

    __radd__ = __add__

    def _at(self, k):
        i = k - self.min_exp
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else ZERO

    def __neg__(self):
        return LaurentSeries([-c for c in self.coeffs], self.min_exp, self.trunc, self.var)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            c = scalar(other)
            return LaurentSeries([c * x for x in self.coeffs], self.min_exp, self.trunc,
                                 self.var)
        other = self._other(other)
        t = min(self.trunc + other.min_exp, other.trunc + self.min_exp)
        lo = self.min_exp + other.min_exp
        n = t - lo + 1
        if n <= 0 or self.is_zero() or other.is_zero():
            return LaurentSeries([], t + 1, t, self.var)
        a, b = self.coeffs, other.coeffs
        out = [ZERO] * n
        for i, x in enumerate(a[:n]):
            if not x:
                continue
            for j, y in enumerate(b[:n - i]):
                out[i + j] += x * y
        return LaurentSeries(out, lo, t, self.var)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise SeriesError(f"series is zero through {self.var}^{self.trunc}; not invertible")
        v = self.min_exp
        rel = self.trunc - v
        a = self.coeffs
        inv0 = ONE / a[0]
        b = [inv0]
        for n in range(1, rel + 1):
            s = ZERO
            for k in range(1, min(n, len(a) - 1) + 1):
                s += a[k] * b[n - k]
            b.append(-s * inv0)
        return LaurentSeries(b, -v, -v + rel, self.var)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return self * other.inverse()
        return self * (ONE / scalar(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            rel = self.trunc - self.min_exp if not self.is_zero() else self.trunc
            return LaurentSeries.constant(1, rel, self.var)
        result, base = None, self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- reshaping
    def truncate(self, order):
        if order > self.trunc:
            raise TruncationError(f"cannot extend a series known through {self.var}^"
                                  f"{self.trunc} to order {order}")
        return LaurentSeries(self.coeffs, self.min_exp, order, self.var)

    def shift(self, k):
        """Multiply by var^k."""
        return LaurentSeries(self.coeffs, self.min_exp + k, self.trunc + k, self.var)

    def negate_variable(self):
        """Substitute var -> -var."""
        return LaurentSeries([c if (self.min_exp + i) % 2 == 0 else -c
                              for i, c in enumerate(self.coeffs)],
                             self.min_exp, self.trunc, self.var)

    def first_mismatch(self, other, order=None):
        """First exponent where the two differ, within their common known range."""
        t = min(self.trunc, other.trunc)
        if order is not None:
            t = min(t, order)
        for k in range(min(self.min_exp, other.min_exp), t + 1):
            if self._at(k) != other._at(k):
                return k
        return None

    def agrees_with(self, other, order=None):
        return self.first_mismatch(other, order) is None

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.var, self.trunc, self.min_exp, self.coeffs) == \
            (other.var, other.trunc, other.min_exp, other.coeffs)

    def __hash__(self):
        return hash((self.var, self.trunc, self.min_exp, self.coeffs))

    def __repr__(self):
        return f"LaurentSeries({self})"

    def __str__(self):
        parts = []
        for k, c in sorted(self.terms().items()):
            mono = "" if k == 0 else self.var if k == 1 else f"{self.var}^{k}"
            text = format_scalar(c)
            if mono:
                if text == "1":
                    text = mono
                elif text == "-1":
                    text = "-" + mono
                else:
                    text = f"({text})*{mono}" if ("+" in text[1:] or "-" in text[1:]) \
                        else f"{text}*{mono}"
            parts.append(text)
        head = " + ".join(parts).replace("+ -", "- ")
        tail = f"O({self.var}^{self.trunc + 1})"
        return f"{head} + {tail}" if head else tail

    # -- serialization
    def to_json(self):
        return {"var": self.var, "min_exponent": self.min_exp, "truncation": self.trunc,
                "coefficients": [format_scalar(self.coefficient(k))
                                 for k in range(self.min_exp, self.trunc + 1)]}

    @classmethod
    def from_json(cls, obj, var="q"):
        """A bare list of coefficient strings starts at exponent 0."""
        if isinstance(obj, list):
            return cls([parse_scalar(str(c)) for c in obj], 0, None, var)
        try:
            cs = [parse_scalar(str(c)) for c in obj["coefficients"]]
            lo = int(obj.get("min_exponent", 0))
            return cls(cs, lo, obj.get("truncation"), obj.get("var", var))
        except (KeyError, TypeError, AttributeError) as exc:
            raise SeriesError(f"malformed series: {exc}") from exc


def series_from_ints(values, trunc=None, var="q"):
    return LaurentSeries(values, 0, trunc, var)


# -- MacMahon


def _sigma2(n):
    return sum(d * d for d in range(1, n + 1) if n % d == 0)


def _macmahon_coeffs(exponent, order):
    """Coefficients of M(q)^exponent via n b_n = c Σ_k σ2(k) b_{n-k}."""
    c = Fraction(exponent)
    sig = [0] + [_sigma2(k) for k in range(1, order + 1)]
    b = [Fraction(1)]
    for n in range(1, order + 1):
        b.append(c * sum(sig[k] * b[n - k] for k in range(1, n + 1)) / n)
    return b


def macmahon(order, var="q"):
    if order < 0:
        raise SeriesError("order must be non-negative")
    return LaurentSeries(_macmahon_coeffs(1, order), 0, order, var)


def macmahon_power(exponent, order, var="q"):
    """M(-q)^exponent through q^order."""
    if order < 0:
        raise SeriesError("order must be non-negative")
    b = _macmahon_coeffs(exponent, order)
    return LaurentSeries([x if n % 2 == 0 else -x for n, x in enumerate(b)], 0, order, var)


def normalize_dt(z, z0):
    if z0.is_zero():
        raise SeriesError("the degree-zero series vanishes through its truncation order")
    return z / z0


# -- rational functions


_Q = Symbol("q")


def _poly(coeffs):
    """Polynomial in q from ascending coefficients."""
    return Poly(list(reversed([QQ(Fraction(c).numerator, Fraction(c).denominator)
                               for c in coeffs])) or [QQ(0)], _Q, domain=QQ)


def _coeffs(p):
    out = [_fraction(c) for c in reversed(p.all_coeffs())]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


@dataclass(frozen=True)
class RationalFunction:
    """numerator/denominator with ascending coefficient lists; normalized so the
    denominator is monic and coprime to the numerator."""
    numerator: tuple
    denominator: tuple = (1,)

    def __post_init__(self):
        num, den = _poly(self.numerator), _poly(self.denominator)
        if den.is_zero:
            raise SeriesError("denominator is zero")
        if num.is_zero:
            num, den = _poly([0]), _poly([1])
        else:
            g = num.gcd(den)
            num, den = num.exquo(g), den.exquo(g)
            lc = den.LC()
            num, den = num.quo_ground(lc), den.quo_ground(lc)
        object.__setattr__(self, "numerator", tuple(_coeffs(num)))
        object.__setattr__(self, "denominator", tuple(_coeffs(den)))

    @classmethod
    def parse(cls, text):
        """From an expression in q such as 'q/(1+q)**2'."""
        try:
            expr = sympify(text.replace("−", "-").replace("^", "**"), locals={"q": _Q})
            num, den = expr.as_numer_denom()
            return cls(tuple(_coeffs(Poly(num, _Q, domain=QQ))),
                       tuple(_coeffs(Poly(den, _Q, domain=QQ))))
        except Exception as exc:
            raise SeriesError(f"cannot read rational function {text!r}: {exc}") from exc

    @property
    def degrees(self):
        return len(self.numerator) - 1, len(self.denominator) - 1

    def __str__(self):
        def show(cs):
            return str(_poly(cs).as_expr())
        num, den = show(self.numerator), show(self.denominator)
        return num if den == "1" else f"({num})/({den})"

    def to_json(self):
        return {"numerator": [str(c) for c in self.numerator],
                "denominator": [str(c) for c in self.denominator]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            return cls.parse(obj)
        try:
            return cls(tuple(Fraction(str(c).replace("−", "-")) for c in obj["numerator"]),
                       tuple(Fraction(str(c).replace("−", "-")) for c in obj["denominator"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesError(f"malformed rational function: {exc}") from exc


def _power_series_quotient(num, den, n):
    """First n+1 coefficients of num/den, with den[0] != 0."""
    inv0 = Fraction(1) / den[0]
    out = []
    for k in range(n + 1):
        s = Fraction(num[k]) if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            s -= den[j] * out[k - j]
        out.append(s * inv0)
    return out


def expand_rational(f, from_order, to_order, var="q"):
    """Coefficients of the Laurent expansion of f at q = 0 with exponents in
    [from_order, to_order]."""
    num, den = [Fraction(c) for c in f.numerator], [Fraction(c) for c in f.denominator]
    shift = 0
    while den[shift] == 0:
        shift += 1
    den = den[shift:]
    n = to_order + shift
    cs = _power_series_quotient(num, den, max(n, 0)) if n >= 0 else []
    terms = {k - shift: c for k, c in enumerate(cs) if c and from_order <= k - shift <= to_order}
    return LaurentSeries.from_dict(terms, to_order, var)


def pade_reconstruct(s, max_degree):
    """A rational function with numerator and denominator degree at most
    max_degree whose expansion agrees with s through its truncation order,
    or None. None certifies only that no such function of degree at most
    max_degree exists; it says nothing about higher degrees."""
    if s.field != "Q":
        raise SeriesError("rational reconstruction needs rational coefficients")
    if s.is_zero():
        return RationalFunction((0,))
    v = s.min_exp
    rel = s.trunc - v
    if rel + 1 < 2 * max_degree + 1:
        raise SeriesError(f"need at least {2 * max_degree + 1} known terms beyond the "
                          f"leading exponent, have {rel + 1}")
    t = [real_part(c) for c in s.coeffs] + [Fraction(0)] * (rel + 1 - len(s.coeffs))
    # q^v P/Q with deg(q^max(v,0) P) <= L and deg(q^max(-v,0) Q) <= L
    for total in range(0, 2 * max_degree + 1):
        for dq in range(0, total + 1):
            dp = total - dq
            if dp + max(v, 0) > max_degree or dq + max(-v, 0) > max_degree:
                continue
            f = _pade_at(t, rel, dp, dq)
            if f is None:
                continue
            num, den = list(f[0]), list(f[1])
            if v > 0:
                num = [Fraction(0)] * v + num
            elif v < 0:
                den = [Fraction(0)] * (-v) + den
            r = RationalFunction(tuple(num), tuple(den))
            if expand_rational(r, s.min_exp, s.trunc, s.var).agrees_with(s):
                return r
    return None


def _pade_at(t, rel, dp, dq):
    """P, Q with deg P <= dp, deg Q <= dq, Q(0) = 1 and t Q - P = O(q^{rel+1})."""
    rows = []
    for k in range(dp + 1, rel + 1):
        rows.append([t[k - j] if k - j >= 0 else Fraction(0) for j in range(dq + 1)])
    if rows:
        basis = nullspace(rows, dq + 1)
    else:
        basis = [[Fraction(int(i == j)) for j in range(dq + 1)] for i in range(dq + 1)]
    pick = next((b for b in basis if b[0] != 0), None)
    if pick is None:
        return None
    Q = [Fraction(x) / pick[0] for x in pick]
    P = [sum((Q[j] * t[k - j] for j in range(min(k, dq) + 1)), Fraction(0))
         for k in range(dp + 1)]
    return P, Q


# -- the -q = e^{iu} comparison


def exp_series(a, order, var="u"):
    """e^{a·var} through var^order."""
    a = scalar(a)
    out, term = [], ONE
    for n in range(order + 1):
        out.append(term)
        term = term * a / (n + 1)
    return LaurentSeries(out, 0, order, var)


def _root_multiplicity(coeffs, root):
    p = _poly(coeffs)
    m = 0
    lin = _poly([-root, 1])
    while not p.is_zero and p.rem(lin).is_zero:
        p = p.exquo(lin)
        m += 1
    return m


def substitute_minus_exp(f, order):
    """f(q) at q = -e^{iu} as a u-series known through u^order."""
    pole = _root_multiplicity(f.denominator, -1) - _root_multiplicity(f.numerator, -1)
    width = order + 2 * max(pole, 0) + 1

    def at(cs):
        acc = LaurentSeries([], width + 1, width, "u")
        for k, c in enumerate(cs):
            if c:
                acc = acc + exp_series(I * k, width) * ((-1) ** k * c)
        return acc

    out = at(f.numerator) / at(f.denominator)
    if out.trunc < order:
        raise SeriesError(f"pole of order {pole} at q = -1 leaves only u^{out.trunc}")
    return out.truncate(order)


@dataclass
class Comparison:
    equal: bool
    order: int
    mismatch: object
    lhs: LaurentSeries
    rhs: LaurentSeries

    def report(self):
        out = {"equal": self.equal, "order": self.order,
               "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json()}
        if self.mismatch is not None:
            k = self.mismatch
            out["first_mismatch"] = {"exponent": k, "lhs": format_scalar(self.lhs[k]),
                                     "rhs": format_scalar(self.rhs[k])}
        return out


def gw_dt_compare(z_pt, z_gw, d_beta, excess, u_order):
    """Compare e^{-i d u/2} z_pt(-e^{iu}) with (-iu)^{d + excess} z_gw through
    u^u_order. Insertion degrees are not checked here."""
    if z_gw.var != "u":
        z_gw = LaurentSeries(z_gw.coeffs, z_gw.min_exp, z_gw.trunc, "u")
    lhs = substitute_minus_exp(z_pt, u_order) * exp_series(-I * d_beta / 2, u_order
                                                           + abs(d_beta) + 2)
    k = int(d_beta) + int(excess)
    rhs = z_gw.shift(k) * (-I) ** k if k >= 0 else z_gw.shift(k) * I ** (-k)
    if rhs.trunc < u_order:
        raise TruncationError(f"GW series known only through u^{rhs.trunc} after the "
                              f"(-iu)^{k} factor; u^{u_order} was requested")
    lhs, rhs = lhs.truncate(u_order), rhs.truncate(u_order)
    k = lhs.first_mismatch(rhs)
    return Comparison(k is None, u_order, k, lhs, rhs)


def load_series(text, var="q"):
    return LaurentSeries.from_json(json.loads(text), var)
