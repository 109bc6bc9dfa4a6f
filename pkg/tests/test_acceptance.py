"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
summary lines; every tolerance is pinned here, nothing is calibrated at
runtime.
"""

import math

import numpy as np
import pytest

from hqm import (
    BasisFamily,
    EvolutionProblem,
    FamilyKind,
    Grid,
    HamiltonianSpec,
    NormalPair,
    QFourierExpansion,
    QFunction,
    QOperator,
    UnitQuaternion,
    analyze,
    angle_addition_deviation,
    compose_unitaries,
    decompose,
    dyson_propagator,
    evolve,
    gram,
    hamiltonian,
    norm,
    normal_conditions,
    probability_fields,
    project,
    reference_full_basis,
    synthesize,
)
from hqm.cli import main
from hqm.quaternion import qconj, qmul

from conftest import TWO_PI, normalized, random_qfunction
from oracles import expm_propagate


def report(number: int, name: str, ok: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {number:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


SEED = 31415


def test_criterion_01_orthogonality():
    rng = np.random.default_rng(SEED)
    grid = Grid(256)
    worst = 0.0
    x = grid.nodes

    def band():
        out = np.full(grid.n_points, rng.normal())
        for k in range(1, 4):
            out += rng.normal() * np.cos(k * x) + rng.normal() * np.sin(k * x)
        return out

    for params in ({"phi0": rng.uniform(0, TWO_PI), "xi0": rng.uniform(0, TWO_PI),
                    "theta0": rng.uniform(0, TWO_PI)},
                   {"phi0": band(), "xi0": band(), "theta0": band()}):
        for kind in (FamilyKind.PHASE_FORM, FamilyKind.EXP_FORM):
            fam = BasisFamily(kind, grid, N=16, **params)
            worst = max(worst, float(np.max(np.abs(gram(fam) - TWO_PI * np.eye(fam.size)))))
    assert report(1, "orthogonality-2pi-delta", worst < 1e-10,
                  f"max |G - 2pi I| = {worst:.3e} < 1e-10, constants and functions")


def test_criterion_02_multi_index_system():
    rng = np.random.default_rng(SEED + 1)
    grid = Grid(128)
    theta0 = 0.8
    fam = BasisFamily(FamilyKind.TWO_INDEX, grid, N=4, theta0=theta0)
    idx = fam.index_set()
    c2, s2 = math.cos(theta0) ** 2, math.sin(theta0) ** 2
    expected = np.array([[TWO_PI * (c2 * (m == m2) + s2 * (n == n2))
                          for (m2, n2) in idx] for (m, n) in idx])
    gram_err = float(np.max(np.abs(gram(fam) - expected)))

    def cross(N):
        out = [(m, 0) for m in range(-N, N + 1)]
        out += [(0, n) for n in range(-N, N + 1) if n != 0]
        return tuple(out)

    supports = {
        4: tuple((1, n) for n in (-2, -1, 0, 1)),
        17: cross(4),
        45: cross(11),
        81: cross(20),
    }
    recovery_err = 0.0
    for size, indices in supports.items():
        sub = BasisFamily(FamilyKind.TWO_INDEX, grid, N=max(abs(i) for t in indices for i in t) or 2,
                          theta0=theta0, indices=indices)
        assert sub.size == size
        coeffs = rng.uniform(-2, 2, size=size)
        f = synthesize(QFourierExpansion(sub, coeffs))
        got = analyze(f, sub).coefficients
        recovery_err = max(recovery_err, float(np.max(np.abs(got - coeffs))))
    ok = gram_err < 1e-10 and recovery_err < 1e-8
    assert report(2, "multi-index-gram-and-solve", ok,
                  f"gram err {gram_err:.3e} < 1e-10, recovery {recovery_err:.3e} < 1e-8 "
                  f"at sizes {sorted(supports)}")


def test_criterion_03_fourier_round_trip():
    rng = np.random.default_rng(SEED + 2)
    grid = Grid(128)
    roundtrip = 0.0
    for kind, params in ((FamilyKind.PHASE_FORM, {"phi0": 0.3, "xi0": 1.7}),
                         (FamilyKind.EXP_FORM, {"theta0": 0.6})):
        fam = BasisFamily(kind, grid, N=8, **params)
        f = synthesize(QFourierExpansion(fam, rng.normal(size=fam.size)))
        recon = synthesize(analyze(f, fam))
        roundtrip = max(roundtrip, norm(f - recon) / max(1.0, norm(f)))

    fam0 = BasisFamily(FamilyKind.PHASE_FORM, grid, N=8)
    escape = QFunction.from_components(grid, x1=np.cos(grid.nodes))  # i cos x
    out_residual = norm(escape - synthesize(analyze(escape, fam0))) / norm(escape)

    basis = reference_full_basis(grid, 8)
    flat = np.stack([b.values.ravel() for b in basis])
    coeffs, *_ = np.linalg.lstsq(flat.T, escape.values.ravel(), rcond=None)
    full_residual = norm(QFunction(grid, escape.values
                                   - (flat.T @ coeffs).reshape(-1, 4))) / norm(escape)
    ok = roundtrip < 1e-9 and out_residual > 0.5 and full_residual < 1e-9
    assert report(3, "round-trip-and-completeness", ok,
                  f"roundtrip {roundtrip:.3e} < 1e-9, escape residual {out_residual:.3f} > 0.5, "
                  f"full-basis residual {full_residual:.3e} < 1e-9")


def test_criterion_04_realness_invariants():
    rng = np.random.default_rng(SEED + 3)
    grid = Grid(32)
    x = grid.nodes
    worst = 0.0
    for _ in range(100):
        spec = HamiltonianSpec(
            grid=grid,
            alpha=rng.normal() * np.sin(x) + rng.normal(),
            beta=rng.normal() + 1j * rng.normal(),
            V=rng.normal() * np.cos(x) + 1j * rng.normal(),
            W=rng.normal() + 1j * rng.normal() * np.sin(x),
        )
        psi = random_qfunction(rng, grid, normalized=True)
        worst = max(worst, probability_fields(spec, psi).max_imaginary)
        # expectation integrand: the two terms are pointwise conjugates
        op = QOperator.from_matrix(grid, rng.normal(size=(128, 128)) / 8.0)
        o_psi = op(psi).values
        sym = qmul(o_psi, qconj(psi.values)) + qmul(psi.values, qconj(o_psi))
        worst = max(worst, float(np.max(np.abs(sym[:, 1:]))) / 2.0)
    assert report(4, "realness-of-rho-J-g-expectation", worst < 1e-12,
                  f"max non-real component {worst:.3e} < 1e-12 over 100 draws")


def test_criterion_05_conservation():
    grid = Grid(32)
    x = grid.nodes
    z0 = np.exp(-2 * np.cos(x - math.pi) ** 2) * np.exp(2j * x)
    psi0 = normalized(QFunction.from_complex(grid, z0=z0))

    real_spec = HamiltonianSpec(grid=grid, alpha=0.3 * np.sin(x), beta=0.1 + 0.05j,
                                V=np.cos(x))
    out = evolve(EvolutionProblem(real_spec, psi0, 0.0, 0.2, 0.0002))  # 1000 steps
    drift = out.report.norm_drift()

    w_spec = HamiltonianSpec(grid=grid, V=0.2, W=0.4 + 0.3j)
    psi_q = normalized(QFunction.from_components(
        grid, x0=1 + 0.3 * np.cos(x), x1=0.2 * np.sin(x), x2=0.5, x3=0.1 * np.cos(2 * x)))
    dt = 0.0002
    rep = evolve(EvolutionProblem(w_spec, psi_q, 0.0, 0.1, dt)).report
    dnorm = (rep.total_norm[2:] - rep.total_norm[:-2]) / (2 * dt)
    source_match = float(np.max(np.abs(dnorm - rep.total_source[1:-1]))
                         / np.max(np.abs(rep.total_source)))

    fine = Grid(64)
    xf = fine.nodes
    pf = normalized(QFunction.from_complex(
        fine, z0=np.exp(-2 * np.cos(xf - math.pi) ** 2) * np.exp(2j * xf)))
    free = HamiltonianSpec(grid=fine)

    def max_residual(step):
        return evolve(EvolutionProblem(free, pf, 0.0, 0.05, step)).report.max_residual()

    order = math.log2(max_residual(5e-4) / max_residual(2.5e-4))
    ok = drift < 1e-8 and source_match < 1e-6 and abs(order - 2.0) <= 0.3
    assert report(5, "conservation-and-continuity", ok,
                  f"drift {drift:.3e} < 1e-8 over 1000 steps, d/dt norm vs int g "
                  f"{source_match:.3e} < 1e-6, residual order {order:.2f} = 2 +/- 0.3")


def test_criterion_06_complex_reduction():
    grid = Grid(32)
    x = grid.nodes
    v = 0.5 * np.cos(x) + 0.1j * np.sin(x)
    spec = HamiltonianSpec(grid=grid, V=v)
    psi0 = normalized(QFunction.from_complex(
        grid, z0=np.exp(-np.cos(x - math.pi) ** 2) * np.exp(2j * x)))
    t1 = 0.5
    out = evolve(EvolutionProblem(spec, psi0, 0.0, t1, 5e-4))
    jk_leak = float(np.max(np.abs(out.trajectory.values[:, :, 2:])))
    gap = 0.0
    for idx in (len(out.trajectory.times) // 2, len(out.trajectory.times) - 1):
        state = out.trajectory.state(idx)
        ref = expm_propagate(psi0.z0, v, float(out.trajectory.times[idx]))
        gap = max(gap, norm(QFunction.from_complex(grid, z0=state.z0 - ref)))
    ok = gap < 1e-7 and jk_leak < 1e-10
    assert report(6, "complex-sector-reduction", ok,
                  f"L2 gap to complex-QM reference {gap:.3e} < 1e-7, "
                  f"j,k leakage {jk_leak:.3e} < 1e-10")


def test_criterion_07_spectral_theorem():
    rng = np.random.default_rng(SEED + 4)
    recon_err = idem_err = ident_err = 0.0
    for n in (16, 64):
        grid = Grid(n)
        dim = 4 * n
        m = rng.normal(size=(dim, dim))
        op = QOperator.from_matrix(grid, 0.5 * (m + m.T))
        res = decompose(op)
        recon_err = max(recon_err, float(
            np.linalg.norm(op.matrix - res.reconstruction_matrix())
            / np.linalg.norm(op.matrix)))
        mats = [res.projection(k).matrix for k in range(min(res.n_spaces, 6))]
        for a, pa in enumerate(mats):
            for b, pb in enumerate(mats):
                target = pa if a == b else 0.0
                idem_err = max(idem_err, float(np.max(np.abs(pa @ pb - target))))
        total = sum(res.projection(k).matrix for k in range(res.n_spaces))
        ident_err = max(ident_err, float(np.max(np.abs(total - np.eye(dim)))))

    grid = Grid(17)
    res = decompose(hamiltonian(HamiltonianSpec(grid=grid)))
    ks = np.arange(0, 9)
    free_ok = (np.allclose(res.eigenvalues, ks**2 / 2.0, atol=1e-9)
               and res.multiplicities[0] == 4 and bool(np.all(res.multiplicities[1:] == 8)))
    ok = recon_err < 1e-9 and idem_err < 1e-10 and ident_err < 1e-10 and free_ok
    assert report(7, "spectral-resolution", ok,
                  f"reconstruction {recon_err:.3e} < 1e-9, projections {idem_err:.3e} < 1e-10, "
                  f"identity {ident_err:.3e} < 1e-10, free spectrum k^2/2 with mult 4/8: {free_ok}")


def test_criterion_08_normal_conditions():
    rng = np.random.default_rng(SEED + 5)
    d = 8
    constructed = 0.0
    sym = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    pairs = [
        NormalPair(1.3 * np.eye(d), 0.5 * (sym + sym.T)),
        NormalPair(np.diag(rng.normal(size=d)),
                   np.diag(rng.normal(size=d) + 1j * rng.normal(size=d))),
    ]
    for p in pairs:
        rep = normal_conditions(p)
        assert rep.blocks_hold
        constructed = max(constructed, rep.full_commutator)
    witness = normal_conditions(NormalPair(
        rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), np.zeros((d, d))))
    ok = constructed < 1e-9 and witness.full_commutator > 1e-4
    assert report(8, "normal-operator-conditions", ok,
                  f"constructed commutator {constructed:.3e} < 1e-9, "
                  f"witness {witness.full_commutator:.3e} > 1e-4")


def test_criterion_09_propagator():
    grid = Grid(8)
    x = grid.nodes
    spec = HamiltonianSpec(grid=grid, V=0.4 * np.cos(x) + 0.25j * np.sin(x))
    h_norm = float(np.linalg.norm(hamiltonian(spec).matrix, 2))
    t1 = 0.3 / h_norm
    psi_c = normalized(QFunction.from_complex(
        grid, z0=np.exp(1j * x) + 0.3 * np.exp(-1j * x) + 0.2))
    ref = evolve(EvolutionProblem(spec, psi_c, 0.0, t1, t1 / 400)).trajectory.final
    errs = [norm(dyson_propagator(spec, 0.0, t1, n, 129)(psi_c) - ref)
            for n in range(1, 6)]
    min_ratio = min(a / b for a, b in zip(errs, errs[1:]))

    q_spec = HamiltonianSpec(grid=grid, V=0.3 + 0.2j)
    psi_q = normalized(QFunction.from_components(grid, x0=np.cos(x), x2=np.sin(x), x3=0.3))
    ref_q = evolve(EvolutionProblem(q_spec, psi_q, 0.0, 0.1, 1e-3)).trajectory.final
    gap = norm(dyson_propagator(q_spec, 0.0, 0.1, 10, 65)(psi_q) - ref_q)
    ok = min_ratio >= 2.0 and gap > 1e-3
    assert report(9, "dyson-series-domain", ok,
                  f"per-term error ratio >= {min_ratio:.1f} (need 2) at |H| dt = 0.3, "
                  f"quaternionic factorization gap {gap:.3e} > 1e-3")


def test_criterion_10_noncommutativity():
    u = UnitQuaternion(math.pi / 4, 0.0, 0.0)
    v = UnitQuaternion(math.pi / 4, math.pi / 2, 0.0)
    comm = (compose_unitaries(u, v) - compose_unitaries(v, u)).norm()
    dev = angle_addition_deviation(u, v)
    ok = comm > 0.1 and dev > 0.1
    assert report(10, "unitary-noncommutativity", ok,
                  f"commutator norm {comm:.3f} > 0.1, angle-additivity deviation {dev:.3f} > 0.1")


def test_criterion_11_determinism(capsys, tmp_path):
    code1 = main(["check", "--seed", "2026"])
    first = capsys.readouterr().out
    code2 = main(["check", "--seed", "2026"])
    second = capsys.readouterr().out

    cfg = tmp_path / "evolve.cfg"
    cfg.write_text(
        "grid_points = 16\nV_re = cos(x)\npsi0_x0 = exp(-cos(x)^2)\n"
        "psi0_x2 = 0.2\nt1 = 0.02\ndt = 0.001\n"
    )
    outputs = []
    for sub in ("a", "b"):
        main(["evolve", "--config", str(cfg), "--out", str(tmp_path / sub)])
        capsys.readouterr()
        outputs.append((
            (tmp_path / sub / "trajectory.csv").read_bytes(),
            (tmp_path / sub / "continuity.csv").read_bytes(),
        ))
    ok = (code1 == code2 == 0 and first == second and outputs[0] == outputs[1])
    assert report(11, "determinism", ok,
                  "seeded check output and evolve CSV artifacts byte-identical across reruns")
