"""Classical knot invariants: Alexander polynomial, signature, determinant, Arf."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .diagram import KnotDiagram
from .groups import GroupPresentation, wirtinger


@dataclass(frozen=True)
class LaurentPolynomial:
    min_exp: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        c = [int(x) for x in self.coeffs]
        lo = 0
        while lo < len(c) and c[lo] == 0:
            lo += 1
        hi = len(c)
        while hi > lo and c[hi - 1] == 0:
            hi -= 1
        object.__setattr__(self, "coeffs", tuple(c[lo:hi]))
        object.__setattr__(self, "min_exp", self.min_exp + lo if hi > lo else 0)

    @classmethod
    def constant(cls, c: int) -> LaurentPolynomial:
        return cls(0, (c,))

    @classmethod
    def monomial(cls, c: int, e: int) -> LaurentPolynomial:
        return cls(e, (c,))

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def max_exp(self) -> int:
        return self.min_exp + len(self.coeffs) - 1

    def coefficient(self, e: int) -> int:
        i = e - self.min_exp
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.min_exp, other.min_exp)
        hi = max(self.max_exp, other.max_exp)
        return LaurentPolynomial(
            lo, tuple(self.coefficient(e) + other.coefficient(e) for e in range(lo, hi + 1)))

    def __neg__(self) -> LaurentPolynomial:
        return LaurentPolynomial(self.min_exp, tuple(-x for x in self.coeffs))

    def __sub__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        return self + (-other)

    def __mul__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        if self.is_zero() or other.is_zero():
            return ZERO
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return LaurentPolynomial(self.min_exp + other.min_exp, tuple(out))

    def exact_div(self, other: LaurentPolynomial) -> LaurentPolynomial:
        """Quotient by other; raises ArithmeticError if it is not exact."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return ZERO
        num = list(self.coeffs)
        den = other.coeffs
        lead = den[-1]
        q = [0] * max(len(num) - len(den) + 1, 0)
        for k in range(len(q) - 1, -1, -1):
            top = num[k + len(den) - 1]
            if top % lead:
                raise ArithmeticError("inexact polynomial division")
            f = top // lead
            q[k] = f
            if f:
                for i, b in enumerate(den):
                    num[k + i] -= f * b
        if any(num):
            raise ArithmeticError("inexact polynomial division")
        return LaurentPolynomial(self.min_exp - other.min_exp, tuple(q))

    def __call__(self, t):
        return sum(c * Fraction(t) ** (self.min_exp + i) for i, c in enumerate(self.coeffs))

    def evaluate_int(self, t: int) -> int:
        """Value at t = 1 or t = -1 (integers for any Laurent polynomial)."""
        if t not in (1, -1):
            raise ValueError("integer evaluation only at t = 1 or t = -1")
        return sum(c * t ** ((self.min_exp + i) % 2) for i, c in enumerate(self.coeffs))

    def is_palindromic(self) -> bool:
        return self.min_exp == -self.max_exp and self.coeffs == self.coeffs[::-1]

    def canonical(self) -> LaurentPolynomial:
        """Representative of the class up to units +-t^k: centred on degree 0, value +1 at t=1.

        If the value at 1 vanishes the leading coefficient is made positive instead.
        """
        if self.is_zero():
            return self
        span = len(self.coeffs) - 1
        lo = -(span // 2)
        p = LaurentPolynomial(lo, self.coeffs)
        v = p.evaluate_int(1)
        if v < 0 or (v == 0 and p.coeffs[-1] < 0):
            p = -p
        return p

    def to_json(self) -> dict:
        return {"min": self.min_exp, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, obj: dict) -> LaurentPolynomial:
        return cls(int(obj["min"]), tuple(obj["coeffs"]))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            e = self.min_exp + i
            mon = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            mag = abs(c)
            body = str(mag) if not mon else (mon if mag == 1 else f"{mag}*{mon}")
            terms.append(("-" if c < 0 else "+", body))
        s = "".join(f" {sg} {b}" for sg, b in terms).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


ZERO = LaurentPolynomial(0, ())
ONE = LaurentPolynomial(0, (1,))


def fox_jacobian(p: GroupPresentation) -> list[list[LaurentPolynomial]]:
    """Free derivatives of the relators, abelianized by sending every generator to t."""
    rows = []
    for r in p.relators:
        row: list[dict[int, int]] = [dict() for _ in range(p.generators)]
        e = 0  # exponent of the image of the prefix
        for x in r:
            g = abs(x) - 1
            if x > 0:
                row[g][e] = row[g].get(e, 0) + 1
                e += 1
            else:
                e -= 1
                row[g][e] = row[g].get(e, 0) - 1
        rows.append([_from_dict(c) for c in row])
    return rows


def _from_dict(c: dict[int, int]) -> LaurentPolynomial:
    if not c:
        return ZERO
    lo, hi = min(c), max(c)
    return LaurentPolynomial(lo, tuple(c.get(e, 0) for e in range(lo, hi + 1)))


def laurent_determinant(matrix: Sequence[Sequence[LaurentPolynomial]]) -> LaurentPolynomial:
    """Fraction-free (Bareiss) determinant over Z[t, 1/t]."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return ONE
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def alexander(d: KnotDiagram) -> LaurentPolynomial:
    """Canonical Alexander polynomial from the Wirtinger free-derivative matrix."""
    if d.n == 0:
        return ONE
    p = wirtinger(d)
    jac = fox_jacobian(p)
    # one relator is a consequence of the others, one generator column is dropped
    minor = [row[1:] for row in jac[:p.generators - 1]]
    delta = laurent_determinant(minor)
    return delta.canonical()


def symmetric_signature(matrix: Sequence[Sequence[int]]) -> int:
    """Signature of a symmetric rational matrix by congruence diagonalization."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    sig = 0
    k = 0
    while k < n:
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    k += 1  # zero row and column
                    continue
                # add row/col j to row/col k; new diagonal is 2 a[k][j]
                for c in range(n):
                    a[k][c] += a[j][c]
                for r in range(n):
                    a[r][k] += a[r][j]
        piv = a[k][k]
        sig += 1 if piv > 0 else -1
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for c in range(k, n):
                    a[i][c] -= f * a[k][c]
        for i in range(k + 1, n):
            a[k][i] = Fraction(0)
        k += 1
    return sig


def checkerboard(d: KnotDiagram) -> tuple[list[int], list[int]]:
    """Face index of every corner dart and a proper 2-colouring of the faces."""
    faces = d.faces()
    face_of = [0] * (4 * d.n)
    for f, ds in enumerate(faces):
        for x in ds:
            face_of[x] = f
    succ = d.rotation()
    pred = [0] * len(succ)
    for x, y in enumerate(succ):
        pred[y] = x
    adj: list[set[int]] = [set() for _ in faces]
    for e in range(2 * d.n):
        head = 2 * e + 1
        left, right = face_of[pred[head]], face_of[head]
        adj[left].add(right)
        adj[right].add(left)
    color = [-1] * len(faces)
    color[0] = 0
    stack = [0]
    while stack:
        f = stack.pop()
        for g in adj[f]:
            if color[g] < 0:
                color[g] = 1 - color[f]
                stack.append(g)
            elif color[g] == color[f]:
                raise ValueError("faces are not 2-colourable")
    return face_of, color


def goeritz(d: KnotDiagram) -> tuple[list[list[int]], int]:
    """Goeritz matrix of the white regions and the correction term mu.

    White faces are those of colour 0.  At a crossing whose white corners
    sit between an incoming and an outgoing strand the black band is
    twisted against the orientation (type II) and contributes its
    incidence number to mu.
    """
    face_of, color = checkerboard(d)
    white = sorted(f for f in range(len(color)) if color[f] == 0)
    idx = {f: i for i, f in enumerate(white)}
    g = [[0] * len(white) for _ in white]
    mu = 0
    for c, x in enumerate(d.crossings):
        in_a, in_b, out_a, out_b = d.darts(c)
        s_face, e_face = face_of[in_a], face_of[in_b]
        n_face, w_face = face_of[out_a], face_of[out_b]
        if color[s_face] == 0:
            eta = -x.sign
            i, j = idx[s_face], idx[n_face]
        else:
            eta = x.sign
            i, j = idx[e_face], idx[w_face]
            mu += eta
        if i != j:
            g[i][j] -= eta
            g[j][i] -= eta
            g[i][i] += eta
            g[j][j] += eta
    reduced = [row[1:] for row in g[1:]]
    return reduced, mu


def signature(d: KnotDiagram) -> int:
    if d.n == 0:
        return 0
    g, mu = goeritz(d)
    return symmetric_signature(g) - mu


def arf_from_determinant(det: int) -> int:
    return 0 if det % 8 in (1, 7) else 1


@dataclass(frozen=True)
class ClassicalInvariants:
    alexander: LaurentPolynomial
    signature: int
    determinant: int
    arf: int

    def to_json(self) -> dict:
        return {
            "alexander": self.alexander.to_json(),
            "signature": self.signature,
            "determinant": self.determinant,
            "arf": self.arf,
        }


def determinant(d: KnotDiagram) -> int:
    return abs(alexander(d).evaluate_int(-1))


def arf(d: KnotDiagram) -> int:
    return arf_from_determinant(determinant(d))


def classical_invariants(d: KnotDiagram) -> ClassicalInvariants:
    delta = alexander(d)
    det = abs(delta.evaluate_int(-1))
    return ClassicalInvariants(delta, signature(d), det, arf_from_determinant(det))
