"""Enumeration of bracket-matrix/Hamiltonian pairs reproducing a linear flow.

A pair (omega, H) reproduces the dynamics xdot = A x when omega^{mu nu} dH/dx^nu
equals (A x)^mu.  Writing H = (1/2) x^T S x and theta for the inverse (lower)
bracket matrix, the requirement is exactly that S = theta A be symmetric, i.e.
theta A + A^T theta = 0 over antisymmetric theta.  This module solves that
linear constraint, rebuilds Hamiltonians from admissible thetas, and ships the
four standard oscillator pairs as ready-made instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .phasespace import (
    NVARS,
    LinearVectorField,
    PolynomialObservable,
    SymplecticForm,
    _as_matrix,
    _invert_matrix,
    _is_exact,
    _scalar_is_zero,
)

# index pairs (i < j) parametrizing antisymmetric 4x4 matrices
PAIR_INDEX = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_UPPER_WITH_DIAG = tuple((i, j) for i in range(NVARS) for j in range(i, NVARS))


@dataclass(frozen=True)
class HamiltonianPair:
    """A bracket matrix together with a Hamiltonian that generates a flow."""

    form: SymplecticForm
    hamiltonian: PolynomialObservable


@dataclass(frozen=True)
class InverseFormBasis:
    """Basis of the antisymmetric matrices theta with theta A + A^T theta = 0."""

    basis: tuple[np.ndarray, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def coordinates(self, theta) -> np.ndarray:
        """Least-squares coordinates of an antisymmetric matrix in this basis."""
        target = _pair_coordinates(np.asarray(theta, dtype=float))
        if not self.basis:
            return np.zeros(0)
        mat = np.stack([_pair_coordinates(b) for b in self.basis], axis=1)
        coeffs, *_ = np.linalg.lstsq(mat, target, rcond=None)
        return coeffs

    def projection_residual(self, theta) -> float:
        """Max-abs entry of theta minus its projection onto the basis span."""
        theta = np.asarray(theta, dtype=float)
        recon = self.sample(self.coordinates(theta))
        return float(np.max(np.abs(theta - recon))) if self.basis else float(np.max(np.abs(theta)))

    def contains(self, theta, tol: float = 1e-12) -> bool:
        theta = np.asarray(theta, dtype=float)
        scale = max(1.0, float(np.max(np.abs(theta))))
        return self.projection_residual(theta) <= tol * scale

    def sample(self, coeffs) -> np.ndarray:
        out = np.zeros((NVARS, NVARS))
        for c, b in zip(coeffs, self.basis):
            out += c * b
        return out


def _pair_coordinates(theta: np.ndarray) -> np.ndarray:
    return np.array([theta[i, j] for i, j in PAIR_INDEX])


def _theta_from_coordinates(coeffs) -> np.ndarray:
    theta = np.zeros((NVARS, NVARS))
    for c, (i, j) in zip(coeffs, PAIR_INDEX):
        theta[i, j] = c
        theta[j, i] = -c
    return theta


def admissible_inverse_forms(field: LinearVectorField,
                             sv_threshold: float = 1e-10) -> InverseFormBasis:
    """Null space of theta -> theta A + A^T theta over antisymmetric theta.

    The constraint matrix is assembled entrywise on the upper triangle
    (including the diagonal), giving a 10x6 system whose null space is found by
    SVD with a relative singular-value threshold.
    """
    a = field.as_float_array()
    system = np.zeros((len(_UPPER_WITH_DIAG), len(PAIR_INDEX)))
    for k in range(len(PAIR_INDEX)):
        unit = np.zeros(len(PAIR_INDEX))
        unit[k] = 1.0
        e = _theta_from_coordinates(unit)
        c = e @ a + a.T @ e
        system[:, k] = [c[i, j] for i, j in _UPPER_WITH_DIAG]
    _, svals, vt = np.linalg.svd(system)
    cutoff = sv_threshold * (svals[0] if svals.size and svals[0] > 0 else 1.0)
    null_rows = [vt[k] for k in range(vt.shape[0]) if k >= svals.size or svals[k] <= cutoff]
    basis = []
    for row in null_rows:
        theta = _theta_from_coordinates(row)
        theta.setflags(write=False)
        basis.append(theta)
    return InverseFormBasis(basis=tuple(basis))


def hamiltonian_from_form(theta, field: LinearVectorField,
                          tol: float = 1e-12) -> PolynomialObservable:
    """Quadratic Hamiltonian (1/2) x^T (theta A) x for an admissible theta.

    Raises ValueError("asymmetric product") when theta A is not symmetric and
    ValueError("degenerate form") when theta has no inverse, since then no
    bracket matrix completes the pair.
    """
    theta = _as_matrix(theta)
    a = field.matrix
    exact = all(_is_exact(v) for row in theta for v in row) and \
        all(_is_exact(v) for row in a for v in row)
    s = [[sum(theta[i][k] * a[k][j] for k in range(NVARS)) for j in range(NVARS)]
         for i in range(NVARS)]
    if exact:
        symmetric = all(_scalar_is_zero(s[i][j] - s[j][i])
                        for i in range(NVARS) for j in range(i + 1, NVARS))
    else:
        sf = np.array([[float(v) for v in row] for row in s])
        scale = tol * (1.0 + float(np.max(np.abs(sf))))
        symmetric = bool(np.max(np.abs(sf - sf.T)) <= scale)
    if not symmetric:
        raise ValueError("asymmetric product")
    try:
        _invert_matrix(theta)
    except ZeroDivisionError:
        raise ValueError("degenerate form") from None

    half = Fraction(1, 2)
    terms: dict[tuple[int, int, int, int], object] = {}
    for i in range(NVARS):
        for j in range(i, NVARS):
            coeff = half * s[i][i] if i == j else s[i][j]
            if _scalar_is_zero(coeff):
                continue
            expo = [0, 0, 0, 0]
            expo[i] += 1
            expo[j] += 1
            key = tuple(expo)
            terms[key] = terms.get(key, 0) + coeff
    return PolynomialObservable(terms)


def complete_pair(theta, field: LinearVectorField) -> HamiltonianPair:
    """Build the full pair (theta^{-1} as bracket matrix, Hamiltonian) from theta."""
    hamiltonian = hamiltonian_from_form(theta, field)
    upper = _invert_matrix(_as_matrix(theta))
    return HamiltonianPair(form=SymplecticForm(upper), hamiltonian=hamiltonian)


def verify_pair(pair: HamiltonianPair,
                field: LinearVectorField) -> tuple[PolynomialObservable, ...]:
    """Residual of the induced dynamics minus the target field, componentwise."""
    from .phasespace import hamiltonian_vector_field

    induced = hamiltonian_vector_field(pair.form, pair.hamiltonian)
    target = field.components()
    return tuple(h - t for h, t in zip(induced, target))


def classify_boundedness(hamiltonian: PolynomialObservable,
                         tol: float = 1e-10) -> str:
    """'bounded-below', 'bounded-above', 'bounded', or 'unbounded' for degree <= 2."""
    if hamiltonian.degree > 2:
        raise ValueError("only observables of degree <= 2 are classified")
    hess = np.zeros((NVARS, NVARS))
    lin = np.zeros(NVARS)
    for i in range(NVARS):
        di = hamiltonian.partial(i)
        lin[i] = float(di.coefficient((0, 0, 0, 0)))
        for j in range(NVARS):
            hess[i, j] = float(di.partial(j).coefficient((0, 0, 0, 0)))
    eigvals, eigvecs = np.linalg.eigh(hess)
    below = True
    above = True
    for lam, vec in zip(eigvals, eigvecs.T):
        if lam > tol:
            above = False
        elif lam < -tol:
            below = False
        elif abs(vec @ lin) > tol:
            below = above = False
    if below and above:
        return "bounded"
    if below:
        return "bounded-below"
    if above:
        return "bounded-above"
    return "unbounded"


# ---------------------------------------------------------------------------
# the canned oscillator catalog
# ---------------------------------------------------------------------------

def _inv(value):
    if isinstance(value, (int, Fraction)):
        return Fraction(1, 1) / Fraction(value)
    return 1 / value


def oscillator_field(m=1, omega=1) -> LinearVectorField:
    """2-D isotropic harmonic oscillator: xdot = p_x/m, pdot_x = -m omega^2 x, etc.

    `m` and `omega` may be numbers or sympy symbols; integers stay exact.
    """
    im = _inv(m)
    k = -m * omega ** 2
    return LinearVectorField((
        (0, 0, im, 0),
        (0, 0, 0, im),
        (k, 0, 0, 0),
        (0, k, 0, 0),
    ))


def standard_hamiltonians(m=1, omega=1) -> tuple[PolynomialObservable, ...]:
    """The energy S0 and the three alternative constants of motion S1, S2, S3."""
    half = Fraction(1, 2)
    im = _inv(m)
    mw2 = m * omega ** 2
    x2 = (2, 0, 0, 0)
    y2 = (0, 2, 0, 0)
    px2 = (0, 0, 2, 0)
    py2 = (0, 0, 0, 2)
    xy = (1, 1, 0, 0)
    pxpy = (0, 0, 1, 1)
    xpy = (1, 0, 0, 1)
    ypx = (0, 1, 1, 0)
    s0 = PolynomialObservable({px2: half * im, x2: half * mw2,
                               py2: half * im, y2: half * mw2})
    s1 = PolynomialObservable({pxpy: im, xy: mw2})
    s2 = PolynomialObservable({py2: half * im, px2: -half * im,
                               y2: half * mw2, x2: -half * mw2})
    s3 = PolynomialObservable({xpy: omega, ypx: -omega})
    return (s0, s1, s2, s3)


def standard_forms(m=1, omega=1) -> tuple[SymplecticForm, ...]:
    """The four bracket matrices paired with S0..S3."""
    imw = _inv(m * omega)
    mw = m * omega
    w0 = ((0, 0, 1, 0),
          (0, 0, 0, 1),
          (-1, 0, 0, 0),
          (0, -1, 0, 0))
    w1 = ((0, 0, 0, 1),
          (0, 0, 1, 0),
          (0, -1, 0, 0),
          (-1, 0, 0, 0))
    w2 = ((0, 0, -1, 0),
          (0, 0, 0, 1),
          (1, 0, 0, 0),
          (0, -1, 0, 0))
    w3 = ((0, -imw, 0, 0),
          (imw, 0, 0, 0),
          (0, 0, 0, -mw),
          (0, 0, mw, 0))
    return tuple(SymplecticForm(w) for w in (w0, w1, w2, w3))


def standard_pairs(m=1, omega=1) -> tuple[HamiltonianPair, ...]:
    """All four (bracket matrix, Hamiltonian) pairs generating the oscillator."""
    return tuple(HamiltonianPair(form=f, hamiltonian=h)
                 for f, h in zip(standard_forms(m, omega), standard_hamiltonians(m, omega)))
