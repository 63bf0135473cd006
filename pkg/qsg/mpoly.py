# mpoly.py

from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from qsg.errors import InputError
from qsg.field import ONE, ZERO, Scalar

Monomial = Tuple[int, ...]

# === Monomial orders ===


def grevlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in reversed(m)))


def lex_key(m: Monomial):
    return m


ORDERS: Dict[str, Callable[[Monomial], object]] = {
    "grevlex": grevlex_key,
    "lex": lex_key,
}


def order_key(order: str) -> Callable[[Monomial], object]:
    try:
        return ORDERS[order]
    except KeyError:
        raise InputError(f"unknown monomial order: {order}")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_coprime(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def var_name(i: int) -> str:
    return f"x{i + 1}"


class MPoly:
    """Sparse polynomial in n variables over Q(i); zero coefficients never stored."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[Monomial, object]] = None):
        clean: Dict[Monomial, Scalar] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise InputError(f"bad exponent {exp} for {n} variables")
            c = Scalar.of(c)
            if not c.is_zero():
                clean[exp] = c
        self.n = n
        self.terms = clean

    @classmethod
    def _raw(cls, n: int, terms: Dict[Monomial, Scalar]) -> "MPoly":
        p = object.__new__(cls)
        p.n = n
        p.terms = terms
        return p

    @classmethod
    def zero(cls, n: int) -> "MPoly":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "MPoly":
        c = Scalar.of(c)
        return cls._raw(n, {} if c.is_zero() else {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "MPoly":
        if not 0 <= i < n:
            raise InputError(f"variable index {i} out of range for {n} variables")
        exp = [0] * n
        exp[i] = 1
        return cls._raw(n, {tuple(exp): ONE})

    # --- basic queries ---

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self, order: str = "grevlex") -> List[Tuple[Monomial, Scalar]]:
        key = order_key(order)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading(self, order: str = "grevlex") -> Tuple[Monomial, Scalar]:
        if not self.terms:
            raise InputError("zero polynomial has no leading term")
        key = order_key(order)
        exp = max(self.terms, key=key)
        return exp, self.terms[exp]

    def variables(self) -> List[int]:
        used = set()
        for exp in self.terms:
            used.update(i for i, e in enumerate(exp) if e)
        return sorted(used)

    # --- arithmetic ---

    def _check(self, other: "MPoly") -> None:
        if other.n != self.n:
            raise InputError(f"variable count mismatch: {self.n} vs {other.n}")

    def _lift(self, other) -> Optional["MPoly"]:
        if isinstance(other, MPoly):
            self._check(other)
            return other
        c = Scalar._coerce(other)
        if c is None:
            return None
        return MPoly.constant(self.n, c)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for exp, c in o.terms.items():
            v = out.get(exp)
            if v is None:
                out[exp] = c
            else:
                s = v + c
                if s.is_zero():
                    del out[exp]
                else:
                    out[exp] = s
        return MPoly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MPoly":
        c = Scalar.of(c)
        if c.is_zero():
            return MPoly.zero(self.n)
        return MPoly._raw(self.n, {e: v * c for e, v in self.terms.items()})

    def mul_term(self, exp: Monomial, c: Scalar) -> "MPoly":
        return MPoly._raw(self.n, {mono_mul(e, exp): v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = Scalar._coerce(other)
            if c is None:
                return NotImplemented
            return self.scale(c)
        self._check(other)
        out: Dict[Monomial, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = mono_mul(e1, e2)
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return MPoly._raw(self.n, {e: c for e, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MPoly":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = MPoly.constant(self.n, ONE)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def monic(self, order: str = "grevlex") -> "MPoly":
        if self.is_zero():
            return self
        _, lc = self.leading(order)
        return self.scale(lc.inverse())

    # --- equality ---

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.n == other.n and self.terms == other.terms
        c = Scalar._coerce(other)
        if c is None:
            return NotImplemented
        return self == MPoly.constant(self.n, c)

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    # --- evaluation and substitution ---

    def evaluate(self, point: Sequence[object]) -> Scalar:
        if len(point) != self.n:
            raise InputError(f"point has {len(point)} coordinates, polynomial has {self.n} variables")
        pt = [Scalar.of(p) for p in point]
        powers: Dict[Tuple[int, int], Scalar] = {}
        total = ZERO
        for exp, c in self.terms.items():
            v = c
            for i, e in enumerate(exp):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = pt[i] ** e
                    v = v * powers[key]
            total = total + v
        return total

    def substitute(self, images: Sequence["MPoly"]) -> "MPoly":
        """Ring homomorphism x_i -> images[i]; images share one variable count."""
        if len(images) != self.n:
            raise InputError(f"need {self.n} images, got {len(images)}")
        if not images:
            return MPoly.constant(0, self.terms.get((), ZERO))
        m = images[0].n
        cache: Dict[Tuple[int, int], MPoly] = {}
        total = MPoly.zero(m)
        for exp, c in self.terms.items():
            term = MPoly.constant(m, c)
            for i, e in enumerate(exp):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = images[i] ** e
                    term = term * cache[key]
            total = total + term
        return total

    def extend(self, extra: int) -> "MPoly":
        """The same polynomial in extra trailing variables."""
        pad = (0,) * extra
        return MPoly._raw(self.n + extra, {e + pad: c for e, c in self.terms.items()})

    def specialize(self, i: int, value) -> "MPoly":
        """Set variable i to a scalar value, keeping the variable count."""
        value = Scalar.of(value)
        out: Dict[Monomial, Scalar] = {}
        for exp, c in self.terms.items():
            e = list(exp)
            k = e[i]
            e[i] = 0
            key = tuple(e)
            v = c * (value ** k) if k else c
            out[key] = out[key] + v if key in out else v
        return MPoly._raw(self.n, {e: c for e, c in out.items() if not c.is_zero()})

    def coefficients_in(self, keep: Iterable[int]) -> Dict[Monomial, "MPoly"]:
        """Group terms by the exponents of variables outside `keep`.

        Returns map from the exponent pattern of the other variables to the
        coefficient polynomial in the kept variables.
        """
        keep = set(keep)
        groups: Dict[Monomial, Dict[Monomial, Scalar]] = {}
        for exp, c in self.terms.items():
            outer = tuple(0 if i in keep else e for i, e in enumerate(exp))
            inner = tuple(e if i in keep else 0 for i, e in enumerate(exp))
            groups.setdefault(outer, {})[inner] = c
        return {k: MPoly._raw(self.n, v) for k, v in groups.items()}

    # --- rendering ---

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms("grevlex"):
            mono = "*".join(
                var_name(i) if e == 1 else f"{var_name(i)}^{e}"
                for i, e in enumerate(exp) if e
            )
            if not mono:
                parts.append(f"({c})")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MPoly({self})"


def product(polys: Sequence[MPoly], n: Optional[int] = None) -> MPoly:
    if not polys:
        if n is None:
            raise InputError("empty product needs a variable count")
        return MPoly.constant(n, ONE)
    out = polys[0]
    for p in polys[1:]:
        out = out * p
    return out
