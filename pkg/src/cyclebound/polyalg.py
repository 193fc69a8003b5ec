"""Exact bivariate polynomials, the vector-field input format, and interval arithmetic.

Coefficients are `fractions.Fraction`, so all algebra (sums, products,
derivatives, affine substitution) is exact.  Floats only appear at the
evaluation boundary: `Poly2.eval`, `interval_eval`, and the cached
coefficient matrices used for vectorized evaluation on grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_INF = float("inf")


class PolyError(ValueError):
    pass


class PolyParseError(PolyError):
    """Syntax error in a polynomial expression, with 1-based position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class VectorFieldError(ValueError):
    pass


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


@dataclass(frozen=True)
class Interval:
    """Closed float interval with outward-rounded arithmetic.

    Every operation widens its result by one ulp per rounding site, so the
    returned interval always encloses the exact real result.
    """

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: float) -> "Interval":
        return Interval(x, x)

    @staticmethod
    def from_fraction(c: Fraction) -> "Interval":
        f = float(c)
        if Fraction(f) == c:
            return Interval(f, f)
        return Interval(_down(f), _up(f))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def strictly_inside(self, other: "Interval") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        ll = self.lo * other.lo
        lh = self.lo * other.hi
        hl = self.hi * other.lo
        hh = self.hi * other.hi
        return Interval(_down(min(ll, lh, hl, hh)), _up(max(ll, lh, hl, hh)))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.contains_zero():
            raise ZeroDivisionError("interval division by an interval containing 0")
        ll = self.lo / other.lo
        lh = self.lo / other.hi
        hl = self.hi / other.lo
        hh = self.hi / other.hi
        return Interval(_down(min(ll, lh, hl, hh)), _up(max(ll, lh, hl, hh)))

    def pow_int(self, n: int) -> "Interval":
        if n < 0:
            raise ValueError("negative exponent")
        if n == 0:
            return Interval(1.0, 1.0)
        if n % 2 == 0 and self.contains_zero():
            m = max(abs(self.lo), abs(self.hi))
            top = Interval(m, m)
            acc = top
            for _ in range(n - 1):
                acc = acc * top
            return Interval(0.0, acc.hi)
        # monotone on a sign-definite interval (or odd power): repeated product
        acc = self
        for _ in range(n - 1):
            acc = acc * self
        if n % 2 == 1:
            return acc
        return Interval(max(acc.lo, 0.0), acc.hi)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


class Poly2:
    """Polynomial in two variables over the rationals.

    Terms map exponent pairs (i, j) to nonzero Fractions; (i, j) stands for
    x^i * y^j.  The zero polynomial has no terms and degree -1.
    """

    __slots__ = ("_terms", "_key", "_rows", "_cmat", "_amat")

    def __init__(self, terms=None):
        clean: dict[tuple[int, int], Fraction] = {}
        if terms:
            for (i, j), c in terms.items():
                if i < 0 or j < 0:
                    raise PolyError(f"negative exponent in term ({i}, {j})")
                c = _as_fraction(c)
                if c != 0:
                    clean[(int(i), int(j))] = c
        self._terms = clean
        self._key = tuple(sorted(clean.items()))
        self._rows = None
        self._cmat = None
        self._amat = None

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(i + j for i, j in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0, 0), Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly2) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Poly2({self.render()!r})"

    def __add__(self, other: "Poly2") -> "Poly2":
        t = dict(self._terms)
        for k, c in other._terms.items():
            t[k] = t.get(k, Fraction(0)) + c
        return Poly2(t)

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (-other)

    def __neg__(self) -> "Poly2":
        return Poly2({k: -c for k, c in self._terms.items()})

    def __mul__(self, other: "Poly2") -> "Poly2":
        t: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                k = (i1 + i2, j1 + j2)
                t[k] = t.get(k, Fraction(0)) + c1 * c2
        return Poly2(t)

    def __pow__(self, n: int) -> "Poly2":
        if n < 0:
            raise PolyError("negative power of a polynomial")
        out = Poly2({(0, 0): 1})
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c) -> "Poly2":
        c = _as_fraction(c)
        return Poly2({k: c * v for k, v in self._terms.items()})

    def partial(self, var: int) -> "Poly2":
        """Exact partial derivative; var == 0 for x, 1 for y."""
        if var not in (0, 1):
            raise PolyError("var must be 0 (x) or 1 (y)")
        t: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self._terms.items():
            if var == 0 and i > 0:
                t[(i - 1, j)] = c * i
            elif var == 1 and j > 0:
                t[(i, j - 1)] = c * j
        return Poly2(t)

    def compose_affine(self, a11, a12, a21, a22, c1=0, c2=0) -> "Poly2":
        """Exact substitution x -> a11*u + a12*v + c1, y -> a21*u + a22*v + c2."""
        px = Poly2({(1, 0): _as_fraction(a11), (0, 1): _as_fraction(a12), (0, 0): _as_fraction(c1)})
        py = Poly2({(1, 0): _as_fraction(a21), (0, 1): _as_fraction(a22), (0, 0): _as_fraction(c2)})
        max_i = max((i for i, _ in self._terms), default=0)
        max_j = max((j for _, j in self._terms), default=0)
        xp = [Poly2({(0, 0): 1})]
        for _ in range(max_i):
            xp.append(xp[-1] * px)
        yp = [Poly2({(0, 0): 1})]
        for _ in range(max_j):
            yp.append(yp[-1] * py)
        out = Poly2()
        for (i, j), c in self._terms.items():
            out = out + (xp[i] * yp[j]).scale(c)
        return out

    def _horner_rows(self):
        # rows[k] = dense float coefficients of the y-polynomial multiplying
        # x^(max_i - k), highest y power first
        if self._rows is None:
            if not self._terms:
                self._rows = ((0.0,),)
            else:
                mi = max(i for i, _ in self._terms)
                mj = max(j for _, j in self._terms)
                rows = []
                for i in range(mi, -1, -1):
                    row = [0.0] * (mj + 1)
                    for (ti, tj), c in self._terms.items():
                        if ti == i:
                            row[mj - tj] = float(c)
                    rows.append(tuple(row))
                self._rows = tuple(rows)
        return self._rows

    def eval(self, x: float, y: float) -> float:
        """Horner-style evaluation in float arithmetic."""
        acc = 0.0
        for row in self._horner_rows():
            ry = 0.0
            for c in row:
                ry = ry * y + c
            acc = acc * x + ry
        return acc

    __call__ = eval

    def eval_with_condition(self, x: float, y: float) -> tuple[float, float]:
        """Value plus a condition factor: sum |c_ij x^i y^j| / |p(x, y)|.

        The rounding error of `eval` is bounded by machine epsilon times a
        small multiple of this factor.
        """
        val = self.eval(x, y)
        mag = 0.0
        for (i, j), c in self._terms.items():
            mag += abs(float(c)) * abs(x) ** i * abs(y) ** j
        cond = mag / abs(val) if val != 0.0 else _INF
        return val, cond

    def coeff_matrix(self) -> np.ndarray:
        """Dense float coefficient matrix C with C[i, j] = coeff of x^i y^j."""
        if self._cmat is None:
            if not self._terms:
                self._cmat = np.zeros((1, 1))
            else:
                mi = max(i for i, _ in self._terms)
                mj = max(j for _, j in self._terms)
                c = np.zeros((mi + 1, mj + 1))
                for (i, j), v in self._terms.items():
                    c[i, j] = float(v)
                self._cmat = c
        return self._cmat

    def abs_coeff_matrix(self) -> np.ndarray:
        if self._amat is None:
            self._amat = np.abs(self.coeff_matrix())
        return self._amat

    def eval_grid(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval2d(x, y, self.coeff_matrix())

    def render(self) -> str:
        """Canonical form: graded-lex term order, explicit '*' and '^'."""
        if not self._terms:
            return "0"
        keys = sorted(self._terms, key=lambda k: (k[0] + k[1], k[0]), reverse=True)
        parts = []
        for n, k in enumerate(keys):
            c = self._terms[k]
            mono = _render_monomial(k)
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{_render_fraction(mag)}*{mono}"
            else:
                body = _render_fraction(mag)
            if n == 0:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f" - {body}" if c < 0 else f" + {body}")
        return "".join(parts)


def _render_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_monomial(k: tuple[int, int]) -> str:
    i, j = k
    pieces = []
    if i == 1:
        pieces.append("x")
    elif i > 1:
        pieces.append(f"x^{i}")
    if j == 1:
        pieces.append("y")
    elif j > 1:
        pieces.append(f"y^{j}")
    return "*".join(pieces)


def jacobian_det(v: "VectorField") -> Poly2:
    """Exact determinant of the Jacobian of (P, Q)."""
    p, q = v.p, v.q
    return p.partial(0) * q.partial(1) - p.partial(1) * q.partial(0)


def interval_eval(p: Poly2, box: tuple[Interval, Interval]) -> Interval:
    """Interval enclosure of the range of p over box = (Ix, Iy).

    Sum of exact monomial ranges; encloses the true range but may
    overestimate its width.
    """
    ix, iy = box
    if not p._terms:
        return Interval(0.0, 0.0)
    mi = max(i for i, _ in p._terms)
    mj = max(j for _, j in p._terms)
    xp = [Interval(1.0, 1.0)]
    for n in range(1, mi + 1):
        xp.append(ix.pow_int(n))
    yp = [Interval(1.0, 1.0)]
    for n in range(1, mj + 1):
        yp.append(iy.pow_int(n))
    acc = Interval(0.0, 0.0)
    for (i, j), c in sorted(p._terms.items()):
        acc = acc + Interval.from_fraction(c) * xp[i] * yp[j]
    return acc


# ---------------------------------------------------------------------------
# expression parser
#
#   expr   := term (('+' | '-') term)*
#   term   := factor (('*' | '/') factor)*
#   factor := base ('^' nonneg-int)?
#   base   := 'x' | 'y' | number | '(' expr ')' | '-' factor
#
# No implicit multiplication.  Division is only defined by a nonzero
# constant.  Decimal literals are exact (denominator a power of ten).
# ---------------------------------------------------------------------------

_X = Poly2({(1, 0): 1})
_Y = Poly2({(0, 1): 1})


@dataclass
class _Token:
    kind: str  # 'num', 'var', 'op', 'end'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    toks = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch.isdigit():
            start = i
            startcol = col
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                if i >= n or not text[i].isdigit():
                    raise PolyParseError("malformed decimal literal", line, startcol)
                while i < n and text[i].isdigit():
                    i += 1
            tok = text[start:i]
            col += i - start
            toks.append(_Token("num", tok, line, startcol))
            continue
        if ch in "xy":
            toks.append(_Token("var", ch, line, col))
            i += 1
            col += 1
            continue
        if ch in "+-*/^()":
            toks.append(_Token("op", ch, line, col))
            i += 1
            col += 1
            continue
        raise PolyParseError(f"unexpected character {ch!r}", line, col)
    last_line = line
    last_col = col
    toks.append(_Token("end", "", last_line, last_col))
    return toks


class _Parser:
    def __init__(self, toks: list[_Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise PolyParseError(msg, tok.line, tok.col)

    def parse(self) -> Poly2:
        p = self.expr()
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return p

    def expr(self) -> Poly2:
        p = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            rhs = self.term()
            p = p + rhs if op == "+" else p - rhs
        return p

    def term(self) -> Poly2:
        p = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op_tok = self.next()
            rhs = self.factor()
            if op_tok.text == "*":
                p = p * rhs
            else:
                if not rhs.is_constant():
                    self.fail("division is only defined by a nonzero numeric literal", op_tok)
                d = rhs.constant_value()
                if d == 0:
                    self.fail("division by zero", op_tok)
                p = p.scale(Fraction(1) / d)
        return p

    def factor(self) -> Poly2:
        p = self.base()
        if self.peek().kind == "op" and self.peek().text == "^":
            caret = self.next()
            t = self.peek()
            if t.kind != "num" or "." in t.text:
                self.fail("exponent must be a nonnegative integer", caret)
            self.next()
            p = p ** int(t.text)
        return p

    def base(self) -> Poly2:
        t = self.next()
        if t.kind == "num":
            return Poly2({(0, 0): Fraction(t.text)})
        if t.kind == "var":
            return _X if t.text == "x" else _Y
        if t.kind == "op" and t.text == "(":
            p = self.expr()
            closing = self.next()
            if closing.kind != "op" or closing.text != ")":
                self.fail("expected ')'", closing)
            return p
        if t.kind == "op" and t.text == "-":
            return -self.factor()
        if t.kind == "end":
            self.fail("unexpected end of input", t)
        self.fail(f"unexpected {t.text!r}", t)


def parse_poly(text: str) -> Poly2:
    """Parse an expression in x and y into an exact polynomial."""
    return _Parser(_tokenize(text)).parse()


# ---------------------------------------------------------------------------
# vector fields and the .vf file format
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle with exact rational corners."""

    xmin: Fraction
    xmax: Fraction
    ymin: Fraction
    ymax: Fraction

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise VectorFieldError("box must have positive width and height")

    @staticmethod
    def make(xmin, xmax, ymin, ymax) -> "Box":
        return Box(_as_fraction(xmin), _as_fraction(xmax), _as_fraction(ymin), _as_fraction(ymax))

    def floats(self) -> tuple[float, float, float, float]:
        return (float(self.xmin), float(self.xmax), float(self.ymin), float(self.ymax))

    def contains(self, x: float, y: float) -> bool:
        x0, x1, y0, y1 = self.floats()
        return x0 <= x <= x1 and y0 <= y <= y1

    def inflate(self, factor: float) -> tuple[float, float, float, float]:
        x0, x1, y0, y1 = self.floats()
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        hx, hy = 0.5 * (x1 - x0) * factor, 0.5 * (y1 - y0) * factor
        return (cx - hx, cx + hx, cy - hy, cy + hy)


DEFAULT_BOX = Box.make(-5, 5, -5, 5)


@dataclass(frozen=True)
class VectorField:
    """Planar polynomial field (dx/dt, dy/dt) = (p, q) with a search box."""

    p: Poly2
    q: Poly2
    name: str = "unnamed"
    box: Box = DEFAULT_BOX

    def __post_init__(self):
        if self.p.is_zero() and self.q.is_zero():
            raise VectorFieldError("vector field must have a nonzero component")

    def eval(self, x: float, y: float) -> tuple[float, float]:
        return self.p.eval(x, y), self.q.eval(x, y)

    def jacobian_at(self, x: float, y: float) -> np.ndarray:
        return np.array(
            [
                [self.p.partial(0).eval(x, y), self.p.partial(1).eval(x, y)],
                [self.q.partial(0).eval(x, y), self.q.partial(1).eval(x, y)],
            ]
        )

    def negated(self) -> "VectorField":
        return VectorField(-self.p, -self.q, name=self.name, box=self.box)

    def scaled(self, c) -> "VectorField":
        return VectorField(self.p.scale(c), self.q.scale(c), name=self.name, box=self.box)


def _parse_scalar(text: str, line: int) -> Fraction:
    text = text.strip()
    neg = False
    if text.startswith("-"):
        neg = True
        text = text[1:].strip()
    try:
        val = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise VectorFieldError(f"line {line}: bad numeric value {text!r}")
    return -val if neg else val


def _parse_box(value: str, line: int) -> Box:
    # box = [a, b] x [c, d]
    s = value.strip()
    parts = s.split("x")
    if len(parts) != 2:
        raise VectorFieldError(f"line {line}: box must look like [a, b] x [c, d]")

    def interval(chunk: str) -> tuple[Fraction, Fraction]:
        chunk = chunk.strip()
        if not (chunk.startswith("[") and chunk.endswith("]")):
            raise VectorFieldError(f"line {line}: box must look like [a, b] x [c, d]")
        inner = chunk[1:-1].split(",")
        if len(inner) != 2:
            raise VectorFieldError(f"line {line}: box interval needs two endpoints")
        return _parse_scalar(inner[0], line), _parse_scalar(inner[1], line)

    (a, b) = interval(parts[0])
    (c, d) = interval(parts[1])
    try:
        return Box(a, b, c, d)
    except VectorFieldError as e:
        raise VectorFieldError(f"line {line}: {e}")


def parse_vf(text: str, name: str = "unnamed") -> VectorField:
    """Parse the .vf format: '# comment', 'P = expr', 'Q = expr',
    optional 'box = [a, b] x [c, d]' and 'name = string'."""
    p = q = None
    box = DEFAULT_BOX
    fname = name
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise VectorFieldError(f"line {lineno}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key == "P":
            if p is not None:
                raise VectorFieldError(f"line {lineno}: P defined twice")
            try:
                p = parse_poly(value)
            except PolyParseError as e:
                raise VectorFieldError(f"line {lineno}, col {e.col}: P: {e.message}")
        elif key == "Q":
            if q is not None:
                raise VectorFieldError(f"line {lineno}: Q defined twice")
            try:
                q = parse_poly(value)
            except PolyParseError as e:
                raise VectorFieldError(f"line {lineno}, col {e.col}: Q: {e.message}")
        elif key == "box":
            box = _parse_box(value, lineno)
        elif key == "name":
            fname = value
        else:
            raise VectorFieldError(f"line {lineno}: unknown key {key!r}")
    if p is None or q is None:
        raise VectorFieldError("both P and Q must be defined")
    return VectorField(p, q, name=fname, box=box)


def load_vf(path) -> VectorField:
    from pathlib import Path

    path = Path(path)
    return parse_vf(path.read_text(), name=path.stem)
