"""Four quantum theories of the 2-D oscillator from Dirac's rule.

Each bracket matrix induces its own commutator algebra [A, B] = i hbar {A, B}
and its own concrete representation of the fundamental operators on
L^2(R^2, dx dy).  The schemes share the Heisenberg-picture combination rule
(the classical rotation with operators substituted), which is exactly why
their expectation values differ: the fundamental operators act differently on
one and the same prepared state.

Scheme assignments (signs transcribed verbatim; the commutator check is the
arbiter):

    0: x->x,  y->y,  p_x -> (hbar/i) d/dx,  p_y -> (hbar/i) d/dy
    1: x->x,  y->y,  p_x -> (hbar/i) d/dy,  p_y -> (hbar/i) d/dx
    2: x->x,  y->y,  p_x -> -(hbar/i) d/dx, p_y -> (hbar/i) d/dy
    3: x->x,  p_x -> m omega y,
       y -> (i hbar/(m omega)) d/dx,        p_y -> i hbar d/dy
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .operators import (
    GaussianPacket,
    GridSpec,
    OperatorExpr,
    Primitive,
    WaveFunction,
    check_localized,
    dense_matrix,
)
from .pairs import standard_forms, standard_hamiltonians
from .phasespace import PhysParams, PolynomialObservable

OBSERVABLES = ("x", "y", "p_x", "p_y")

SCHEME_IDS = (0, 1, 2, 3)

# uncertainty pairs with a nonzero algebra bound, per scheme
CANONICAL_PAIRS = {
    0: (("x", "p_x"), ("y", "p_y")),
    1: (("x", "p_y"), ("y", "p_x")),
    2: (("x", "p_x"), ("y", "p_y")),
    3: (("x", "y"), ("p_x", "p_y")),
}


@dataclass(frozen=True)
class QuantizationScheme:
    """Commutator table plus concrete fundamental-operator assignment."""

    id: int
    params: PhysParams
    commutators: np.ndarray  # i*hbar times the classical bracket matrix
    assignment: Mapping[str, OperatorExpr]

    def fundamental(self, which: str) -> OperatorExpr:
        if which not in OBSERVABLES:
            raise ValueError(f"unknown observable: {which!r}")
        return self.assignment[which]


def scheme(scheme_id: int, params: PhysParams) -> QuantizationScheme:
    """Build one of the four quantization schemes."""
    if scheme_id not in SCHEME_IDS:
        raise ValueError(f"unknown id: {scheme_id!r}")
    hb = params.hbar
    mw = params.m * params.omega
    x_op = OperatorExpr.primitive(Primitive.X)
    y_op = OperatorExpr.primitive(Primitive.Y)
    dx = OperatorExpr.primitive(Primitive.DX)
    dy = OperatorExpr.primitive(Primitive.DY)
    assignment = {
        0: {"x": x_op, "y": y_op, "p_x": -1j * hb * dx, "p_y": -1j * hb * dy},
        1: {"x": x_op, "y": y_op, "p_x": -1j * hb * dy, "p_y": -1j * hb * dx},
        2: {"x": x_op, "y": y_op, "p_x": 1j * hb * dx, "p_y": -1j * hb * dy},
        3: {"x": x_op, "y": (1j * hb / mw) * dx, "p_x": mw * y_op, "p_y": 1j * hb * dy},
    }[scheme_id]
    table = 1j * hb * standard_forms(params.m, params.omega)[scheme_id].upper_array()
    table.setflags(write=False)
    return QuantizationScheme(id=scheme_id, params=params,
                              commutators=table, assignment=assignment)


def ground_packet(params: PhysParams, center=(0.0, 0.0),
                  wavevector=(0.0, 0.0)) -> GaussianPacket:
    """Gaussian of the width that saturates the canonical uncertainty bound."""
    return GaussianPacket(center=center, wavevector=wavevector,
                          sigma=params.ground_sigma)


def heisenberg_operator(s: QuantizationScheme, which: str, t: float) -> OperatorExpr:
    """Time-evolved observable: the classical rotation with operators substituted.

    At t = 0 this is the fundamental operator itself.
    """
    if which not in OBSERVABLES:
        raise ValueError(f"unknown observable: {which!r}")
    mw = s.params.m * s.params.omega
    c = math.cos(s.params.omega * t)
    sn = math.sin(s.params.omega * t)
    a = s.assignment
    if which == "x":
        return c * a["x"] + (sn / mw) * a["p_x"]
    if which == "p_x":
        return (-mw * sn) * a["x"] + c * a["p_x"]
    if which == "y":
        return c * a["y"] + (sn / mw) * a["p_y"]
    return (-mw * sn) * a["y"] + c * a["p_y"]


def expectation(op: OperatorExpr, psi: WaveFunction) -> complex:
    """<psi| op psi> by grid quadrature; psi is assumed normalized."""
    return psi.inner(op.apply(psi))


def variance(op: OperatorExpr, psi: WaveFunction) -> float:
    """<op^2> - <op>^2, real part (imaginary part vanishes for Hermitian op)."""
    m1 = expectation(op, psi)
    m2 = expectation(op @ op, psi)
    return float((m2 - m1 * m1).real)


@dataclass(frozen=True)
class CommutatorCheck:
    """Measured deviations of [A, B] psi from the scheme's commutator table."""

    max_deviation: float
    deviations: Mapping[tuple[str, str], float]
    localized: bool


def commutator_table_check(s: QuantizationScheme, psi: WaveFunction,
                           boundary_threshold: float = 1e-12) -> CommutatorCheck:
    """Apply every fundamental pair both ways and compare against the table."""
    localized = check_localized(psi, boundary_threshold, "commutator table check")
    norm = psi.norm()
    devs: dict[tuple[str, str], float] = {}
    h = psi.grid.spacing
    for i in range(len(OBSERVABLES)):
        for j in range(i + 1, len(OBSERVABLES)):
            a = s.assignment[OBSERVABLES[i]]
            b = s.assignment[OBSERVABLES[j]]
            lhs = a.apply(b.apply(psi)).values - b.apply(a.apply(psi)).values
            diff = lhs - s.commutators[i, j] * psi.values
            dev = float(np.sqrt(np.sum(np.abs(diff) ** 2) * h * h)) / norm
            devs[(OBSERVABLES[i], OBSERVABLES[j])] = dev
    return CommutatorCheck(max_deviation=max(devs.values()),
                           deviations=devs, localized=localized)


def uncertainty_bound(s: QuantizationScheme, pair: tuple[str, str]) -> float:
    """Robertson bound |<[A, B]>|/2 for two fundamental observables."""
    i = OBSERVABLES.index(pair[0])
    j = OBSERVABLES.index(pair[1])
    return abs(s.commutators[i, j]) / 2.0


def uncertainty_product(s: QuantizationScheme, pair: tuple[str, str],
                        psi: WaveFunction, t: float = 0.0) -> float:
    """Delta A * Delta B for the Heisenberg-evolved observables at time t."""
    spreads = []
    for name in pair:
        var = variance(heisenberg_operator(s, name, t), psi)
        spreads.append(math.sqrt(max(var, 0.0)))
    return spreads[0] * spreads[1]


def two_time_commutator(s: QuantizationScheme, t: float, t_prime: float,
                        psi: WaveFunction,
                        boundary_threshold: float = 1e-12) -> complex:
    """<psi| [x(t), x(t')] psi>, estimated by applying both orderings.

    The scalar equals sin(omega (t'-t))/(m omega) times the scheme's
    [x_0, p_x0] table entry: zero for schemes 1 and 3, +/- i hbar otherwise.
    """
    check_localized(psi, boundary_threshold, "two-time commutator")
    op_t = heisenberg_operator(s, "x", t)
    op_tp = heisenberg_operator(s, "x", t_prime)
    forward = op_t.apply(op_tp.apply(psi))
    backward = op_tp.apply(op_t.apply(psi))
    return psi.inner(WaveFunction(psi.grid, forward.values - backward.values))


def kernel_overlap(s: QuantizationScheme, x: float, y: float,
                   p_x: float, p_y: float) -> complex:
    """Mixed-basis overlap <x, y | p_x, p_y> for schemes 0-2.

    Scheme 1 is the crossed transform pairing x with p_y and y with p_x.
    Scheme 3 has noncommuting coordinates (and momenta), so no common
    coordinate or momentum basis exists.
    """
    if s.id == 3:
        raise ValueError("no common momentum basis")
    hb = s.params.hbar
    exponent = {
        0: x * p_x + y * p_y,
        1: x * p_y + y * p_x,
        2: -x * p_x + y * p_y,
    }[s.id]
    return complex(np.exp(1j * exponent / hb) / (2.0 * math.pi * hb))


def _monomial_operator(s: QuantizationScheme, expo: tuple[int, int, int, int]) -> tuple[OperatorExpr, bool]:
    factors = []
    for name, e in zip(OBSERVABLES, expo):
        factors.extend([s.assignment[name]] * e)
    if not factors:
        return OperatorExpr.identity(), False
    if len(factors) == 1:
        return factors[0], False
    a, b = factors
    if a is b or a.commutes_with(b):
        return a @ b, False
    return 0.5 * (a @ b + b @ a), True


def quantize_observable(s: QuantizationScheme,
                        f: PolynomialObservable) -> OperatorExpr:
    """Promote a degree <= 2 classical observable to an operator expression.

    Fundamental assignments are substituted monomial by monomial; when the two
    factors of a mixed quadratic monomial fail to commute under the scheme, the
    symmetrized half-sum of both orderings is used.
    """
    if f.degree > 2:
        raise ValueError("degree > 2 unsupported")
    total = OperatorExpr()
    for expo in sorted(f.terms):
        op, _ = _monomial_operator(s, expo)
        total = total + complex(f.terms[expo]) * op
    return total


def quantization_needs_symmetrization(s: QuantizationScheme,
                                      f: PolynomialObservable) -> bool:
    """True iff promoting f would symmetrize at least one monomial."""
    if f.degree > 2:
        raise ValueError("degree > 2 unsupported")
    return any(_monomial_operator(s, expo)[1] for expo in sorted(f.terms))


# ---------------------------------------------------------------------------
# dense-matrix unitary evolution (the one code path that materializes matrices)
# ---------------------------------------------------------------------------

MAX_DENSE_POINTS = 48

_GENERATOR_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _generator_polynomial(s: QuantizationScheme) -> PolynomialObservable:
    return standard_hamiltonians(s.params.m, s.params.omega)[s.id]


def _generator_eigensystem(s: QuantizationScheme, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    key = (s.id, s.params.m, s.params.omega, s.params.hbar,
           grid.half_width, grid.points)
    if key not in _GENERATOR_CACHE:
        if grid.points > MAX_DENSE_POINTS:
            raise ValueError("grid too large")
        mat = dense_matrix(quantize_observable(s, _generator_polynomial(s)), grid)
        asym = float(np.max(np.abs(mat - mat.conj().T)))
        if asym > 1e-9 * (1.0 + float(np.max(np.abs(mat)))):
            raise AssertionError("materialized generator is not Hermitian")
        evals, evecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
        _GENERATOR_CACHE[key] = (evals, evecs)
    return _GENERATOR_CACHE[key]


def unitary_evolve(s: QuantizationScheme, psi: WaveFunction, t: float) -> WaveFunction:
    """exp(-i S t / hbar) psi via dense eigendecomposition of the generator."""
    evals, evecs = _generator_eigensystem(s, psi.grid)
    phases = np.exp(-1j * evals * t / s.params.hbar)
    vec = evecs @ (phases * (evecs.conj().T @ psi.values.ravel()))
    return WaveFunction(psi.grid, vec.reshape(psi.values.shape))


def unitary_conjugation_check(s: QuantizationScheme, which: str, t: float,
                              grid: GridSpec,
                              psi: WaveFunction | None = None) -> float:
    """Relative L2 gap between exp(iSt/h) O exp(-iSt/h) psi and the rotated operator.

    Uses a localized Gaussian by default; the dense path is restricted to
    small grids (N <= 48).
    """
    if grid.points > MAX_DENSE_POINTS:
        raise ValueError("grid too large")
    if psi is None:
        packet = GaussianPacket(center=(0.5, -0.3), wavevector=(0.4, 0.2),
                                sigma=s.params.ground_sigma)
        psi = packet.sample(grid)
    elif psi.grid != grid:
        raise ValueError("grid mismatch")
    evolved = unitary_evolve(s, psi, t)
    acted = s.fundamental(which).apply(evolved)
    conjugated = unitary_evolve(s, acted, -t)
    target = heisenberg_operator(s, which, t).apply(psi)
    num = np.sqrt(np.sum(np.abs(conjugated.values - target.values) ** 2))
    den = np.sqrt(np.sum(np.abs(target.values) ** 2))
    return float(num / den)
