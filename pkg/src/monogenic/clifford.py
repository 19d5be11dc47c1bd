"""Arithmetic in the real Clifford algebra with two anti-commuting
imaginary units.

Elements are spanned by {1, e1, e2, e12} with e1^2 = e2^2 = -1 and
e1 e2 = -e2 e1 = e12.  This is all the algebra a 2D image needs: pixels of
a monogenic field are paravectors (scalar + vector), derivative operators
produce the remaining grades.

Two representations are provided:

* :class:`Multivector2` -- a single element, convenient for exact unit
  tests and small algebraic arguments;
* "component grids" -- a 4-tuple ``(s0, c1, c2, c12)`` of equally shaped
  numpy arrays, one multivector per pixel, used by the field-level code.
  The grid functions implement the same product table with no grade
  shortcuts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroNormError

DEFAULT_EPS = 1e-12


@dataclass(frozen=True)
class Multivector2:
    """Element s0 + c1*e1 + c2*e2 + c12*e12 of Cl(0,2)."""

    s0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c12: float = 0.0

    def __post_init__(self):
        for name in ("s0", "c1", "c2", "c12"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite component {name}")

    # -- ring structure -------------------------------------------------
    def __add__(self, other: "Multivector2") -> "Multivector2":
        return Multivector2(self.s0 + other.s0, self.c1 + other.c1,
                            self.c2 + other.c2, self.c12 + other.c12)

    def __sub__(self, other: "Multivector2") -> "Multivector2":
        return Multivector2(self.s0 - other.s0, self.c1 - other.c1,
                            self.c2 - other.c2, self.c12 - other.c12)

    def __neg__(self) -> "Multivector2":
        return Multivector2(-self.s0, -self.c1, -self.c2, -self.c12)

    def scale(self, t: float) -> "Multivector2":
        return Multivector2(t * self.s0, t * self.c1, t * self.c2, t * self.c12)

    def __mul__(self, other: "Multivector2") -> "Multivector2":
        return geometric_product(self, other)

    def norm(self) -> float:
        return math.sqrt(self.s0 ** 2 + self.c1 ** 2
                         + self.c2 ** 2 + self.c12 ** 2)

    def is_close(self, other: "Multivector2", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol

    @staticmethod
    def scalar(t: float) -> "Multivector2":
        return Multivector2(s0=t)

    @staticmethod
    def vector(x1: float, x2: float) -> "Multivector2":
        return Multivector2(c1=x1, c2=x2)


E1 = Multivector2(c1=1.0)
E2 = Multivector2(c2=1.0)
E12 = Multivector2(c12=1.0)
ONE = Multivector2(s0=1.0)


def geometric_product(a: Multivector2, b: Multivector2) -> Multivector2:
    """Full geometric product, from the basis rule e_i e_j + e_j e_i = -2 delta_ij."""
    s0, c1, c2, c12 = _product_components(
        (a.s0, a.c1, a.c2, a.c12), (b.s0, b.c1, b.c2, b.c12))
    return Multivector2(s0, c1, c2, c12)


def _product_components(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 + a2 * b0 - a1 * b3 + a3 * b1,
            a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1)


def scalar_part(m: Multivector2) -> float:
    return m.s0


def vector_part(m: Multivector2) -> Multivector2:
    return Multivector2(c1=m.c1, c2=m.c2)


def bivector_part(m: Multivector2) -> Multivector2:
    return Multivector2(c12=m.c12)


def conjugate(m: Multivector2) -> Multivector2:
    """Clifford conjugation: negates vector and bivector grades."""
    return Multivector2(m.s0, -m.c1, -m.c2, -m.c12)


def paravector_inverse(m: Multivector2, eps: float = DEFAULT_EPS) -> Multivector2:
    """Inverse of a paravector (zero bivector grade): conjugate over squared norm."""
    if m.c12 != 0.0:
        raise ValueError("paravector_inverse requires zero bivector part")
    n2 = m.s0 ** 2 + m.c1 ** 2 + m.c2 ** 2
    if n2 <= eps * eps:
        raise ZeroNormError(f"paravector norm {math.sqrt(n2):g} below epsilon")
    return Multivector2(m.s0 / n2, -m.c1 / n2, -m.c2 / n2)


def exp_vector(v: Multivector2, theta: float, eps: float = DEFAULT_EPS) -> Multivector2:
    """cos(theta) + (v/|v|) sin(theta), the Euler formula for a unit vector.

    The direction is normalised internally; a unit-norm element is returned.
    """
    if v.s0 != 0.0 or v.c12 != 0.0:
        raise ValueError("exp_vector requires a pure vector direction")
    n = math.hypot(v.c1, v.c2)
    if n <= eps:
        raise ZeroNormError(f"vector norm {n:g} below epsilon")
    s = math.sin(theta)
    return Multivector2(math.cos(theta), s * v.c1 / n, s * v.c2 / n)


# ---------------------------------------------------------------------------
# component-grid variants (one multivector per pixel)
# ---------------------------------------------------------------------------

Grid4 = tuple  # (s0, c1, c2, c12) arrays of a common shape


def geometric_product_grid(a: Grid4, b: Grid4) -> Grid4:
    """Pixelwise geometric product of two multivector grids."""
    return _product_components(a, b)


def conjugate_grid(a: Grid4) -> Grid4:
    return (a[0], -a[1], -a[2], -a[3])


def paravector_grid(u: np.ndarray, v1: np.ndarray, v2: np.ndarray) -> Grid4:
    z = np.zeros_like(u)
    return (u, v1, v2, z)


def exp_vector_grid(n1: np.ndarray, n2: np.ndarray, theta: np.ndarray) -> Grid4:
    """Euler formula on grids; (n1, n2) must already be unit directions."""
    s = np.sin(theta)
    return (np.cos(theta), n1 * s, n2 * s, np.zeros_like(theta))


def dirac_from_derivatives(d1F: Grid4, d2F: Grid4) -> Grid4:
    """Assemble e1*(d/dx1 F) + e2*(d/dx2 F) from precomputed derivative grids.

    The caller chooses the differencing scheme; this function is pure algebra.
    """
    e1 = (np.zeros_like(d1F[0]), np.ones_like(d1F[0]),
          np.zeros_like(d1F[0]), np.zeros_like(d1F[0]))
    e2 = (np.zeros_like(d2F[0]), np.zeros_like(d2F[0]),
          np.ones_like(d2F[0]), np.zeros_like(d2F[0]))
    t1 = geometric_product_grid(e1, d1F)
    t2 = geometric_product_grid(e2, d2F)
    return tuple(x + y for x, y in zip(t1, t2))
