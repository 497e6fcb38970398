"""Exact coefficient arithmetic: Gaussian rationals and polynomials in the
formal coupling variable ``a``.

All linear algebra in this package runs over these types; floats never appear.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


class ScalarError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise ScalarError(f"cannot build an exact rational from {x!r}")


@dataclass(frozen=True)
class GaussRat:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re=0, im=0) -> "GaussRat":
        return GaussRat(_frac(re), _frac(im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussRat") -> "GaussRat":
        if not other:
            raise ZeroDivisionError("division by zero Gaussian rational")
        n = other.re * other.re + other.im * other.im
        return GaussRat(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im} i"
        im = self.im
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        imtxt = "i" if mag == 1 else f"{mag} i"
        return f"{self.re} {sign} {imtxt}"


GR_ZERO = GaussRat()
GR_ONE = GaussRat.of(1)
GR_I = GaussRat.of(0, 1)


@dataclass(frozen=True)
class Scalar:
    """Polynomial in the formal variable ``a`` with GaussRat coefficients.

    ``coeffs[k]`` multiplies a^k; trailing zero coefficients are stripped so
    equality is structural.  The variable a stands for a real parameter, so
    conjugation acts on the coefficients only.
    """

    coeffs: tuple = ()

    @staticmethod
    def make(coeffs) -> "Scalar":
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        return Scalar(tuple(cs))

    @staticmethod
    def const(c: GaussRat) -> "Scalar":
        return Scalar.make([c])

    @staticmethod
    def of(re=0, im=0) -> "Scalar":
        return Scalar.const(GaussRat.of(re, im))

    @staticmethod
    def var() -> "Scalar":
        return Scalar.make([GR_ZERO, GR_ONE])

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def coefficient(self, k: int) -> GaussRat:
        return self.coeffs[k] if k < len(self.coeffs) else GR_ZERO

    def __add__(self, other: "Scalar") -> "Scalar":
        m = max(len(self.coeffs), len(other.coeffs))
        return Scalar.make(
            [self.coefficient(k) + other.coefficient(k) for k in range(m)]
        )

    def __sub__(self, other: "Scalar") -> "Scalar":
        m = max(len(self.coeffs), len(other.coeffs))
        return Scalar.make(
            [self.coefficient(k) - other.coefficient(k) for k in range(m)]
        )

    def __neg__(self) -> "Scalar":
        return Scalar(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "Scalar") -> "Scalar":
        if not self.coeffs or not other.coeffs:
            return Scalar()
        out = [GR_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for j, cj in enumerate(self.coeffs):
            if not cj:
                continue
            for k, ck in enumerate(other.coeffs):
                if ck:
                    out[j + k] = out[j + k] + cj * ck
        return Scalar.make(out)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        """Division by a unit (nonzero degree-0 scalar) only.

        The coefficient ring is not a field in a, so anything else raises.
        """
        if other.degree != 0:
            raise ScalarError(
                "can only divide by a nonzero constant scalar "
                f"(got degree {other.degree})"
            )
        u = other.coeffs[0]
        return Scalar(tuple(c / u for c in self.coeffs))

    def conjugate(self) -> "Scalar":
        return Scalar(tuple(c.conjugate() for c in self.coeffs))

    def evaluate(self, a0: GaussRat) -> GaussRat:
        acc = GR_ZERO
        for c in reversed(self.coeffs):
            acc = acc * a0 + c
        return acc

    def __str__(self) -> str:
        return format_scalar(self)


S_ZERO = Scalar()
S_ONE = Scalar.of(1)
S_I = Scalar.of(0, 1)
S_A = Scalar.var()


def _format_power(k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return "a"
    return f"a^{k}"


def format_scalar(s: Scalar) -> str:
    """Canonical text form, e.g. "1/2 + 3/4 i", "-1/2 a^2", "2 + a"."""
    if not s:
        return "0"
    parts = []
    for k, c in enumerate(s.coeffs):
        if not c:
            continue
        pw = _format_power(k)
        if not pw:
            parts.append(str(c))
            continue
        if c == GR_ONE:
            parts.append(pw)
        elif c == -GR_ONE:
            parts.append(f"-{pw}")
        elif c.re and c.im:
            parts.append(f"({c}) {pw}")
        else:
            parts.append(f"{c} {pw}")
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<rat>-?\d+(?:/\d+)?)|(?P<sym>[ia+\-^()])|(?P<num>\d+))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ScalarError(f"bad scalar syntax near {text[pos:]!r}")
            break
        pos = m.end()
        if m.group("rat") is not None:
            out.append(("rat", Fraction(m.group("rat"))))
        elif m.group("num") is not None:
            out.append(("rat", Fraction(m.group("num"))))
        else:
            out.append((m.group("sym"), None))
    return out


def parse_scalar(text: str) -> Scalar:
    """Parse the canonical scalar syntax.

    Accepts sums of terms like "3/2", "-1/2 i", "a^2", "2/3 a",
    "(1/2 + 3/4 i) a^3".
    """
    toks = _tokenize(text)
    if not toks:
        raise ScalarError("empty scalar")
    pos = 0

    def parse_coeff_atom():
        # rational, optionally followed by i; or bare i
        nonlocal pos
        kind, val = toks[pos]
        if kind == "rat":
            pos += 1
            if pos < len(toks) and toks[pos][0] == "i":
                pos += 1
                return GaussRat(Fraction(0), val)
            return GaussRat(val, Fraction(0))
        if kind == "i":
            pos += 1
            return GR_I
        raise ScalarError(f"expected a coefficient at token {pos}")

    def parse_term():
        # [sign] [coeff] [a[^k]]   with optional parenthesized complex coeff
        nonlocal pos
        sign = GR_ONE
        while pos < len(toks) and toks[pos][0] in "+-":
            if toks[pos][0] == "-":
                sign = -sign
            pos += 1
        coeff = None
        if pos < len(toks) and toks[pos][0] == "(":
            pos += 1
            acc = parse_coeff_atom()
            while pos < len(toks) and toks[pos][0] in "+-":
                neg = toks[pos][0] == "-"
                pos += 1
                nxt = parse_coeff_atom()
                acc = acc - nxt if neg else acc + nxt
            if pos >= len(toks) or toks[pos][0] != ")":
                raise ScalarError("unbalanced parenthesis in scalar")
            pos += 1
            coeff = acc
        elif pos < len(toks) and toks[pos][0] in ("rat", "i"):
            coeff = parse_coeff_atom()
        power = 0
        if pos < len(toks) and toks[pos][0] == "a":
            pos += 1
            power = 1
            if pos < len(toks) and toks[pos][0] == "^":
                pos += 1
                if pos >= len(toks) or toks[pos][0] != "rat":
                    raise ScalarError("expected an integer exponent after ^")
                exp = toks[pos][1]
                if exp.denominator != 1 or exp < 0:
                    raise ScalarError(f"bad exponent {exp}")
                power = int(exp)
                pos += 1
        if coeff is None:
            if power == 0:
                raise ScalarError("empty term in scalar")
            coeff = GR_ONE
        cs = [GR_ZERO] * power + [sign * coeff]
        return Scalar.make(cs)

    total = parse_term()
    while pos < len(toks):
        if toks[pos][0] not in "+-":
            raise ScalarError(f"unexpected token at position {pos}")
        total = total + parse_term()
    return total


def parse_gauss(text: str) -> GaussRat:
    s = parse_scalar(text)
    if s.degree > 0:
        raise ScalarError(f"expected a constant, got {text!r}")
    return s.coefficient(0)
