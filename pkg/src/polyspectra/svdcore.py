"""Singular values of P(lambda), the level function, and analytic gradients.

The smallest singular value s_min(lambda) vanishes exactly on the spectrum,
and the sublevel sets of s_min(lambda) / w(|lambda|) are the weighted
pseudospectra.  Where s_min is simple and nonzero its gradient has the closed
form (Re u* P'(lambda) v, Re u* i P'(lambda) v) in the trailing singular
vector pair (u, v); the GradientValue carries a validity flag that is lowered
when the surface gap or the value itself is too small for the formula to be
trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .matpoly import (
    MatrixPolynomial,
    WeightPolynomial,
    derivative,
    evaluate,
    evaluate_many,
    weight_deriv_eval,
    weight_eval,
)

# Validity thresholds for the closed-form gradient; the smoothness
# hypotheses ("simple, nonzero") are qualitative, these make them checkable.
GAP_RTOL = 1e-8
ZERO_RTOL = 1e-12
ORIGIN_TOL = 1e-12

_SVD_CHUNK = 1 << 16


@dataclass(frozen=True)
class SingularTripletSet:
    """Full SVD of P(lambda): values descending, unit vector columns.

    ``left[:, j]`` and ``right[:, j]`` satisfy P(lambda) v_j = s_j u_j.
    Phases are normalized so the largest-modulus entry of each right vector
    is real positive, which makes outputs reproducible; rank-one products
    u_j v_j* are unaffected.
    """

    values: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class GradientValue:
    """A gradient sample together with the evidence for trusting it.

    ``gap`` is s_{n-1} - s_n at the point (infinite for scalar problems).
    ``valid`` is False when the gap or the value collapses below scale, or,
    for weighted level gradients, at the origin where the weight term is not
    differentiable.
    """

    dx: float
    dy: float
    gap: float
    valid: bool

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dy])

    @property
    def norm(self) -> float:
        return float(np.hypot(self.dx, self.dy))


def singular_triplets(P: MatrixPolynomial, lam: complex) -> SingularTripletSet:
    """Full SVD of P(lambda) with deterministic phases."""
    U, s, Vh = np.linalg.svd(evaluate(P, lam))
    V = Vh.conj().T
    for j in range(len(s)):
        k = int(np.argmax(np.abs(V[:, j])))
        a = V[k, j]
        if abs(a) > 0:
            phase = a / abs(a)
            V[:, j] = V[:, j] * phase.conjugate()
            U[:, j] = U[:, j] * phase.conjugate()
    return SingularTripletSet(values=s, left=U, right=V)


def s_min(P: MatrixPolynomial, lam: complex) -> float:
    """Smallest singular value of P(lambda)."""
    return float(np.linalg.svd(evaluate(P, lam), compute_uv=False)[-1])


def singular_values_many(P: MatrixPolynomial, lams) -> np.ndarray:
    """Descending singular values at every point of ``lams``.

    Result shape is ``lams.shape + (n,)``.  Evaluation is chunked so large
    grids do not hold all evaluated matrices at once.
    """
    L = np.asarray(lams, dtype=complex)
    flat = L.reshape(-1)
    out = np.empty((flat.size, P.n), dtype=float)
    for start in range(0, flat.size, _SVD_CHUNK):
        block = flat[start : start + _SVD_CHUNK]
        out[start : start + block.size] = np.linalg.svd(
            evaluate_many(P, block), compute_uv=False
        )
    return out.reshape(L.shape + (P.n,))


def F_eps(P: MatrixPolynomial, w: WeightPolynomial, eps: float, lam: complex) -> float:
    """Level function s_min(lambda) - eps * w(|lambda|).

    Nonpositive exactly on the eps-sublevel set of s_min / w.
    """
    if eps < 0:
        raise PreconditionError("eps must be nonnegative")
    return s_min(P, lam) - eps * weight_eval(w, abs(lam))


def grad_s_min(P: MatrixPolynomial, lam: complex) -> GradientValue:
    """Gradient of s_min at lambda = x + iy from the trailing singular pair.

    Uses dP/dx = P'(lambda) and dP/dy = i P'(lambda).  Invalid (not raised)
    when the smallest singular value is degenerate or numerically zero.
    """
    trip = singular_triplets(P, lam)
    s = trip.values
    u = trip.left[:, -1]
    v = trip.right[:, -1]
    Pp = evaluate(derivative(P), lam)
    core = u.conj() @ (Pp @ v)
    dx = float(core.real)
    dy = float((1j * core).real)
    gap = float(s[-2] - s[-1]) if trip.n >= 2 else np.inf
    s1 = float(s[0])
    valid = bool(gap > GAP_RTOL * s1 and s[-1] > ZERO_RTOL * (1.0 + s1))
    return GradientValue(dx=dx, dy=dy, gap=gap, valid=valid)


def grad_F(
    P: MatrixPolynomial, w: WeightPolynomial, eps: float, lam: complex
) -> GradientValue:
    """Gradient of F_eps = s_min - eps * w(|.|).

    At the origin the weight term w(|lambda|) is differentiable only for
    constant w; with a non-constant weight the result is flagged invalid
    rather than raising, so tracing code can treat it as a stop condition.
    """
    if eps < 0:
        raise PreconditionError("eps must be nonnegative")
    base = grad_s_min(P, lam)
    r = abs(lam)
    if r < ORIGIN_TOL:
        if w.is_constant:
            return base
        return GradientValue(dx=base.dx, dy=base.dy, gap=base.gap, valid=False)
    wp = weight_deriv_eval(w, r)
    dx = base.dx - eps * (lam.real / r) * wp
    dy = base.dy - eps * (lam.imag / r) * wp
    return GradientValue(dx=dx, dy=dy, gap=base.gap, valid=base.valid)


def gap(P: MatrixPolynomial, lam: complex, indices: tuple[int, int] | None = None) -> float:
    """Gap between the two lowest singular-value surfaces at lambda.

    ``indices`` optionally supplies the canonical (c1, c2) pair, 1-based,
    from a collapsed surface map; the default is the raw pair (n, n-1).
    """
    if P.n < 2:
        raise PreconditionError("gap needs at least two singular values (n >= 2)")
    s = np.linalg.svd(evaluate(P, lam), compute_uv=False)
    if indices is None:
        c1, c2 = P.n, P.n - 1
    else:
        c1, c2 = indices
        if not (1 <= c2 < c1 <= P.n):
            raise PreconditionError(f"bad surface indices {indices}")
    return float(s[c2 - 1] - s[c1 - 1])
