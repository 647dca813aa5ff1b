"""Shared problem instances.

The reference polynomials mirror the fixture files in fixtures/ and carry
well-documented spectra, fault sets, and merge levels used throughout the
suite.
"""

import numpy as np
import pytest

from polyspectra import GridSpec, MatrixPolynomial, WeightPolynomial


@pytest.fixture(scope="session")
def uptri_quadratic():
    """2x2 quadratic diag((l-1)^2, (l-2)^2) with an l in the corner; both
    eigenvalues are double with geometric multiplicity 1."""
    return MatrixPolynomial(
        [
            np.array([[1.0, 0.0], [0.0, 4.0]]),
            np.array([[-2.0, 1.0], [0.0, -4.0]]),
            np.eye(2),
        ]
    )


@pytest.fixture(scope="session")
def weight_quadratic():
    """w(x) = x^2 + x + 1 (absolute-sense perturbations)."""
    return WeightPolynomial([1.0, 1.0, 1.0])


@pytest.fixture(scope="session")
def uptri_window():
    return GridSpec(x_min=0.2, x_max=2.8, y_min=-1.0, y_max=1.0, nx=401, ny=401)


@pytest.fixture(scope="session")
def damped_system():
    """3x3 self-adjoint quadratic of a damped vibrating system; six simple
    eigenvalues in conjugate pairs."""
    return MatrixPolynomial(
        [
            np.array([[2.0, -1.0, 0.0], [-1.0, 3.0, 0.0], [0.0, 0.0, 10.0]]),
            np.array([[0.0, 0.0, 0.0], [0.0, 3.0, -1.0], [0.0, -1.0, 6.0]]),
            np.diag([1.0, 2.0, 5.0]),
        ]
    )


@pytest.fixture(scope="session")
def weight_damped():
    """Coefficient-norm weights of the damped system, w = 5x^2 + 6.3x + 10."""
    return WeightPolynomial([10.0, 6.3, 5.0])


@pytest.fixture(scope="session")
def damped_window():
    return GridSpec(x_min=-2.4, x_max=1.4, y_min=-3.0, y_max=3.0, nx=401, ny=401)


@pytest.fixture(scope="session")
def conic_pencil():
    """Linear pencil whose second and third surfaces carry a conic double
    point at the origin: s_2(0) = s_3(0) = sqrt(5/16)."""
    A = np.array([[0.75, 1.0, 1.0], [0.0, 1.25, 1.0], [0.0, 0.0, -0.75]])
    return MatrixPolynomial([-A, np.eye(3)])


@pytest.fixture(scope="session")
def isolated_fault_pencil():
    """Linear pencil crafted so the two lowest surfaces meet only at 0."""
    return MatrixPolynomial(
        [
            np.array([[0.75j, 1.0, 1.0], [0.0, 1.25, 1.0], [0.0, 0.0, -0.75]]),
            np.eye(3),
        ]
    )


@pytest.fixture(scope="session")
def scalar_double_root():
    """(lambda - 1)^2 as a 1x1 polynomial."""
    return MatrixPolynomial([[[1.0]], [[-2.0]], [[1.0]]])


@pytest.fixture(scope="session")
def weight_linear():
    """w(x) = 2x + 1; non-differentiable weight term at the origin."""
    return WeightPolynomial([1.0, 2.0])


@pytest.fixture(scope="session")
def diag_quadratic_pair():
    """diag(l^2 - 1, l^2 - 2l); fault set is the circle |l - 1/2| = sqrt(3)/2
    plus the line Re l = 1/2."""
    return MatrixPolynomial([np.diag([-1.0, 0.0]), np.diag([0.0, -2.0]), np.eye(2)])


@pytest.fixture(scope="session")
def diag_movable():
    """diag(l^2 - 2l, (a - l)(l + 2)) at the critical value a = 2/3, where
    l = 1 is a fault point."""
    a = 2.0 / 3.0
    return MatrixPolynomial(
        [np.diag([0.0, 2 * a]), np.diag([-2.0, a - 2.0]), np.diag([1.0, -1.0])]
    )


@pytest.fixture(scope="session")
def disc_pair():
    """diag(l - 1, l + 1): two unit discs meeting at the origin at level 1."""
    return MatrixPolynomial([np.diag([-1.0, 1.0]), np.eye(2)])


@pytest.fixture(scope="session")
def unit_weight():
    return WeightPolynomial([1.0])


def random_polynomial(rng, n, m, scale=1.0):
    """Dense random polynomial with a well-conditioned leading coefficient."""
    coeffs = [
        scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        for _ in range(m + 1)
    ]
    coeffs[-1] = coeffs[-1] + 2.0 * np.sqrt(n) * np.eye(n)
    return MatrixPolynomial(coeffs)


def random_weight(rng, m):
    ws = rng.uniform(0.1, 2.0, size=m + 1)
    return WeightPolynomial(ws)
