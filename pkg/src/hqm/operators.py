"""Real-linear operators on the discretized quaternion function space.

An operator here is any map closed under real scalar combinations of inputs;
that covers left multiplication by quaternion functions, derivatives, and
right multiplication by constant quaternions (which is real- but not
quaternion-linear).  Every operator admits a dense (4n)x(4n) real matrix
realization over stacked components, built lazily column by column.

Because the quadrature weights are uniform, the adjoint with respect to the
real inner product is exactly the matrix transpose.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridMismatchError
from .hilbert import Grid, QFunction, inner
from .quaternion import Quaternion, left_mult_matrix, qmul

__all__ = [
    "QOperator",
    "HamiltonianSpec",
    "NormalPair",
    "NormalConditionsReport",
    "spectral_derivative",
    "central_derivative",
    "apply",
    "adjoint",
    "expectation",
    "momentum_pi",
    "hamiltonian",
    "normal_conditions",
]


# ---------------------------------------------------------------------------
# Periodic derivatives on (n, 4) component arrays
# ---------------------------------------------------------------------------

def spectral_derivative(values: np.ndarray, grid: Grid) -> np.ndarray:
    """FFT derivative of each real component; exact for band-limited samples.

    The Nyquist mode of an even grid has no odd counterpart, so its
    derivative is set to zero (the standard convention).
    """
    n = grid.n_points
    spec = np.fft.rfft(values, axis=0)
    k = np.arange(spec.shape[0])
    if n % 2 == 0:
        k = k.copy()
        k[-1] = 0
    spec *= 1j * k[:, None]
    return np.fft.irfft(spec, n=n, axis=0)


def central_derivative(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Second-order centered difference with periodic wraparound."""
    return (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2.0 * grid.h)


_DERIVATIVES = {"spectral": spectral_derivative, "central": central_derivative}


# ---------------------------------------------------------------------------
# QOperator
# ---------------------------------------------------------------------------

class QOperator:
    """A real-linear operator wrapping an action on raw (n, 4) value arrays."""

    def __init__(self, grid: Grid, action: Callable[[np.ndarray], np.ndarray], name: str = ""):
        self.grid = grid
        self._action = action
        self.name = name
        self._matrix: np.ndarray | None = None
        self._lock = threading.Lock()

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def identity(grid: Grid) -> "QOperator":
        return QOperator(grid, lambda v: v.copy(), "identity")

    @staticmethod
    def from_matrix(grid: Grid, matrix: np.ndarray, name: str = "") -> "QOperator":
        matrix = np.asarray(matrix, dtype=float)
        dim = 4 * grid.n_points
        if matrix.shape != (dim, dim):
            raise ValueError(f"matrix must be {dim}x{dim}, got {matrix.shape}")
        op = QOperator(grid, lambda v: (matrix @ v.ravel()).reshape(-1, 4), name)
        op._matrix = matrix
        return op

    @staticmethod
    def left_multiplication(factor: QFunction | Quaternion, grid: Grid | None = None) -> "QOperator":
        """Psi -> a Psi for a quaternion constant or sampled function a."""
        if isinstance(factor, QFunction):
            values = factor.values
            return QOperator(factor.grid, lambda v: qmul(values, v), "left-mult")
        if grid is None:
            raise ValueError("grid required for a constant factor")
        arr = factor.as_array()
        return QOperator(grid, lambda v: qmul(arr, v), "left-mult")

    @staticmethod
    def right_multiplication(q: Quaternion, grid: Grid) -> "QOperator":
        """Psi -> Psi q; real-linear but not quaternion-linear."""
        arr = q.as_array()
        return QOperator(grid, lambda v: qmul(v, arr), "right-mult")

    @staticmethod
    def position(grid: Grid) -> "QOperator":
        x = grid.nodes[:, None]
        return QOperator(grid, lambda v: x * v, "position")

    # -- action ---------------------------------------------------------------

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        return self._action(np.asarray(values, dtype=float))

    def __call__(self, f: QFunction) -> QFunction:
        if f.grid != self.grid:
            raise GridMismatchError(
                f"operator on {self.grid.n_points}-point grid applied to "
                f"{f.grid.n_points}-point function"
            )
        return QFunction(self.grid, self.apply_values(f.values))

    # -- algebra ----------------------------------------------------------------

    def __matmul__(self, other: "QOperator") -> "QOperator":
        if other.grid != self.grid:
            raise GridMismatchError("cannot compose operators on different grids")
        return QOperator(self.grid, lambda v: self.apply_values(other.apply_values(v)),
                         f"({self.name}@{other.name})")

    def __add__(self, other: "QOperator") -> "QOperator":
        if other.grid != self.grid:
            raise GridMismatchError("cannot add operators on different grids")
        return QOperator(self.grid, lambda v: self.apply_values(v) + other.apply_values(v))

    def __sub__(self, other: "QOperator") -> "QOperator":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "QOperator":
        s = float(scalar)
        return QOperator(self.grid, lambda v: s * self.apply_values(v))

    __rmul__ = __mul__

    # -- matrix realization -------------------------------------------------------

    @property
    def matrix(self) -> np.ndarray:
        """Dense realization over stacked real components (cached, single writer)."""
        if self._matrix is None:
            with self._lock:
                if self._matrix is None:
                    dim = 4 * self.grid.n_points
                    cols = np.empty((dim, dim))
                    impulse = np.zeros((self.grid.n_points, 4))
                    flat = impulse.ravel()
                    for col in range(dim):
                        flat[col] = 1.0
                        cols[:, col] = self.apply_values(impulse).ravel()
                        flat[col] = 0.0
                    self._matrix = cols
        return self._matrix

    def adjoint(self) -> "QOperator":
        """Unique S with inner(T f, g) = inner(f, S g); the weighted transpose.

        Uniform quadrature weights make this literally the matrix transpose.
        """
        return QOperator.from_matrix(self.grid, self.matrix.T,
                                     f"adj({self.name})" if self.name else "")

    def asymmetry(self) -> float:
        """Relative self-adjointness defect ||M - M^T||_F / max(1, ||M||_F)."""
        m = self.matrix
        return float(np.linalg.norm(m - m.T) / max(1.0, np.linalg.norm(m)))


def apply(T: QOperator, f: QFunction) -> QFunction:
    return T(f)


def adjoint(T: QOperator) -> QOperator:
    return T.adjoint()


def expectation(O: QOperator, psi: QFunction, *, normalize: bool = False) -> float:
    """Real expectation value inner(O psi, psi).

    Equals the symmetrized quadrature of (O Psi) conj(Psi) + Psi conj(O Psi)
    over 2; real for arbitrary real-linear O.  With normalize the value is
    divided by ||psi||^2.
    """
    n2 = inner(psi, psi)
    if n2 == 0.0:
        raise ValueError("expectation value of the zero state is undefined")
    value = inner(O(psi), psi)
    return value / n2 if normalize else value


# ---------------------------------------------------------------------------
# Hamiltonian with quaternionic gauge potential and potential
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """H = -(hbar^2/2m)(d/dx - A)^2 + U on a periodic grid.

    A = alpha i + beta j is a pure-imaginary quaternion field (alpha real,
    beta complex) and U = V + W j acts by left multiplication (V, W complex).
    """

    grid: Grid
    mass: float = 1.0
    hbar: float = 1.0
    alpha: np.ndarray | float = 0.0
    beta: np.ndarray | complex = 0.0
    V: np.ndarray | complex = 0.0
    W: np.ndarray | complex = 0.0

    def __post_init__(self):
        if self.mass <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")
        n = self.grid.n_points
        alpha = np.broadcast_to(np.asarray(self.alpha, dtype=float), (n,)).copy()
        object.__setattr__(self, "alpha", alpha)
        for name in ("beta", "V", "W"):
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=complex), (n,)).copy()
            object.__setattr__(self, name, arr)

    def gauge_values(self) -> np.ndarray:
        """Component samples of A = alpha i + beta j (shape (n, 4), zero real part)."""
        n = self.grid.n_points
        out = np.zeros((n, 4))
        out[:, 1] = self.alpha
        out[:, 2] = self.beta.real
        out[:, 3] = self.beta.imag
        return out

    def potential_values(self) -> np.ndarray:
        """Component samples of U = V + W j."""
        n = self.grid.n_points
        out = np.zeros((n, 4))
        out[:, 0] = self.V.real
        out[:, 1] = self.V.imag
        out[:, 2] = self.W.real
        out[:, 3] = self.W.imag
        return out

    @property
    def is_real_potential(self) -> bool:
        return bool(np.all(self.V.imag == 0.0) and np.all(self.W == 0.0))


def _covariant_derivative(spec: HamiltonianSpec, deriv: str) -> Callable[[np.ndarray], np.ndarray]:
    diff = _DERIVATIVES[deriv]
    gauge = spec.gauge_values()
    grid = spec.grid
    if np.all(gauge == 0.0):
        return lambda v: diff(v, grid)
    return lambda v: diff(v, grid) - qmul(gauge, v)


def momentum_pi(spec: HamiltonianSpec, deriv: str = "spectral") -> QOperator:
    """Generalized momentum: Pi Psi = -hbar ((d/dx - A) Psi) i.

    The imaginary unit multiplies from the right; with A = 0 this is
    self-adjoint on the periodic grid and sends e^{ikx} to hbar k e^{ikx}.
    """
    d_a = _covariant_derivative(spec, deriv)
    i_arr = np.array([0.0, 1.0, 0.0, 0.0])
    hbar = spec.hbar

    def action(v: np.ndarray) -> np.ndarray:
        return -hbar * qmul(d_a(v), i_arr)

    return QOperator(spec.grid, action, "momentum")


def hamiltonian(spec: HamiltonianSpec, deriv: str = "spectral") -> QOperator:
    """H Psi = -(hbar^2/2m) (d/dx - A)((d/dx - A) Psi) + U Psi.

    Generally neither hermitian nor anti-hermitian once W or Im V is nonzero.
    """
    d_a = _covariant_derivative(spec, deriv)
    potential = spec.potential_values()
    coef = -spec.hbar**2 / (2.0 * spec.mass)

    def action(v: np.ndarray) -> np.ndarray:
        return coef * d_a(d_a(v)) + qmul(potential, v)

    return QOperator(spec.grid, action, "hamiltonian")


# ---------------------------------------------------------------------------
# Normal operators in symplectic form N = N0 + N1 j
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NormalPair:
    """Complex blocks of N = N0 + N1 j acting on quaternion coordinate vectors."""

    N0: np.ndarray
    N1: np.ndarray

    def __post_init__(self):
        n0 = np.asarray(self.N0, dtype=complex)
        n1 = np.asarray(self.N1, dtype=complex)
        if n0.ndim != 2 or n0.shape[0] != n0.shape[1]:
            raise ValueError("N0 must be square")
        if n1.shape != n0.shape:
            raise ValueError("N0 and N1 must have equal shapes")
        object.__setattr__(self, "N0", n0)
        object.__setattr__(self, "N1", n1)

    @property
    def dim(self) -> int:
        return self.N0.shape[0]

    def realization(self) -> np.ndarray:
        """Real 4d x 4d matrix of x -> N x (entrywise left quaternion multiplication)."""
        d = self.dim
        out = np.zeros((4 * d, 4 * d))
        for a in range(d):
            for b in range(d):
                q = Quaternion(self.N0[a, b].real, self.N0[a, b].imag,
                               self.N1[a, b].real, self.N1[a, b].imag)
                out[4 * a:4 * a + 4, 4 * b:4 * b + 4] = left_mult_matrix(q)
        return out


@dataclass(frozen=True)
class NormalConditionsReport:
    """Commutator norms for the full operator and its symplectic block conditions."""

    full_commutator: float      # ||[N, N^dagger]||_F with the true (transpose) adjoint
    block_normal: float         # ||[N0, N0^dagger]||_F
    block_coupling: float       # ||[N0 + N0^dagger, N1]||_F
    tol: float

    @property
    def blocks_hold(self) -> bool:
        return self.block_normal < self.tol and self.block_coupling < self.tol

    @property
    def full_holds(self) -> bool:
        return self.full_commutator < self.tol

    @property
    def equivalence_consistent(self) -> bool:
        """Whether the block conditions and the full commutator agree.

        They coincide when the blocks are symmetric matrices (so entrywise
        conjugation and the adjoint agree), e.g. multiplication operators;
        a False value records a counterexample candidate to the claimed
        block/full equivalence.
        """
        return self.blocks_hold == self.full_holds


def normal_conditions(p: NormalPair, *, tol: float = 1e-9) -> NormalConditionsReport:
    """Evaluate [N, N^dagger] against the two symplectic block conditions.

    The full commutator uses the operator's true adjoint under the real inner
    product (the transpose of the real realization); the block conditions are
    evaluated independently with complex matrix algebra.
    """
    real = p.realization()
    adj = real.T
    full = float(np.linalg.norm(real @ adj - adj @ real))
    n0, n1 = p.N0, p.N1
    n0h = n0.conj().T
    block_normal = float(np.linalg.norm(n0 @ n0h - n0h @ n0))
    block_coupling = float(np.linalg.norm((n0 + n0h) @ n1 - n1 @ (n0 + n0h)))
    return NormalConditionsReport(full, block_normal, block_coupling, tol)
