"""Independent reference computations the tests check the library against.

Everything here is deliberately written from scratch (plain loops, explicit
DFT matrices, scipy.expm) so that it shares no code path with the package:
an oracle that calls the implementation under test would prove nothing.
"""

import numpy as np
import scipy.linalg


# ---------------------------------------------------------------------------
# Scalar quaternion arithmetic, longhand
# ---------------------------------------------------------------------------

def naive_qmul(a, b):
    """Hamilton product of two length-4 sequences, term by term."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def naive_inner(f_values, g_values, h):
    """Quadrature of Re[f conj(g)] by an explicit python loop."""
    total = 0.0
    for fv, gv in zip(f_values, g_values):
        conj_g = (gv[0], -gv[1], -gv[2], -gv[3])
        total += naive_qmul(fv, conj_g)[0]
    return h * total


# ---------------------------------------------------------------------------
# Multi-index basis elements straight from the defining formulas
# ---------------------------------------------------------------------------

def three_index_element(x, l, m, n):
    """cos(lx) e^{imx} + sin(lx) e^{inx} j as an (n_points, 4) array."""
    z0 = np.cos(l * x) * np.exp(1j * m * x)
    z1 = np.sin(l * x) * np.exp(1j * n * x)
    return np.stack([z0.real, z0.imag, z1.real, z1.imag], axis=-1)


def brute_force_gram(x, h, elements):
    """Gram matrix by nested loops over element pairs and grid nodes."""
    size = len(elements)
    out = np.zeros((size, size))
    for a in range(size):
        for b in range(size):
            out[a, b] = naive_inner(elements[a], elements[b], h)
    return out


# ---------------------------------------------------------------------------
# Complex quantum mechanics references (independent discretization)
# ---------------------------------------------------------------------------

def dft_second_derivative(n):
    """Spectral d^2/dx^2 on n periodic nodes via an explicit DFT matrix."""
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    F = np.exp(-2j * np.pi * j * k / n) / np.sqrt(n)
    freqs = np.where(np.arange(n) <= n // 2, np.arange(n), np.arange(n) - n)
    if n % 2 == 0:
        freqs = freqs.astype(float)
    d2 = F.conj().T @ np.diag(-(freqs.astype(float) ** 2)) @ F
    return d2


def complex_hamiltonian(n, v_samples, hbar=1.0, mass=1.0):
    """H = -(hbar^2/2m) d^2/dx^2 + diag(V) as a dense complex matrix."""
    return (-hbar**2 / (2.0 * mass)) * dft_second_derivative(n) + np.diag(v_samples)


def expm_propagate(psi0, v_samples, t, hbar=1.0, mass=1.0):
    """Exact complex-QM propagation psi(t) = exp(-i H t / hbar) psi0."""
    h = complex_hamiltonian(len(psi0), v_samples, hbar, mass)
    return scipy.linalg.expm(-1j * h * t / hbar) @ psi0


def split_step_propagate(psi0, v_samples, t1, dt, hbar=1.0, mass=1.0):
    """Strang-split FFT integrator for i hbar dpsi/dt = H psi (works for complex V)."""
    n = len(psi0)
    k = np.fft.fftfreq(n, d=1.0 / n)
    kinetic_phase = np.exp(-1j * hbar * k**2 * dt / (2.0 * mass))
    half_v = np.exp(-1j * np.asarray(v_samples) * dt / (2.0 * hbar))
    psi = np.asarray(psi0, dtype=complex).copy()
    steps = int(round(t1 / dt))
    for _ in range(steps):
        psi *= half_v
        psi = np.fft.ifft(kinetic_phase * np.fft.fft(psi))
        psi *= half_v
    return psi


def complex_expectation(psi, op_matrix, h):
    """Re <psi| O |psi> with the standard complex inner product and weight h."""
    return float(np.real(h * np.vdot(psi, op_matrix @ psi)))
