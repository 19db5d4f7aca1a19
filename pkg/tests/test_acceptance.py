"""One test per acceptance criterion; each records a pass/fail line for the summary."""

import hashlib
import itertools
import math
import time
from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.optimize import brentq

from specqc import cli, gates, tse
from specqc.evolution import crush, run_sequence
from specqc.operators import conjugate, lpps_state, thermal_equilibrium
from specqc.spectra import decode_answer, readout_spectrum
from specqc.spin_system import alanine_carbons_preset, alanine_preset

from conftest import ACCEPTANCE_LINES, make_system
from oracles import E2, PA, PB, SY, SZ, fidelity, kron_at

ALL_A = ["".join(b) for b in itertools.product("01", repeat=3)]


def record(num, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    return ok


def test_c1_point_fidelity():
    t0 = time.perf_counter()
    props = tse.tse_propagators(alanine_preset(), "000", 0.179, math.pi / 2)
    f = tse.gate_fidelity(props.u0, props.u2)
    dt = time.perf_counter() - t0
    ok = abs(f - 0.999) <= 0.001 and dt < 1.0
    assert record(1, ok, f"F(U0,U2) = {f:.6f} (0.999 +- 0.001), {dt:.3f} s (< 1 s)")


def test_c2_pulse_duration():
    props = tse.tse_propagators(alanine_preset(), "000", 0.179, math.pi / 2)
    tau = props.duration_s
    # Independent arithmetic from the definition tau = alpha / (ratio * pi * J01).
    expected = (math.pi / 2) / (0.179 * math.pi * 34.94)
    ok = abs(tau - 0.080) <= 0.001 and math.isclose(tau, expected, rel_tol=1e-12)
    assert record(2, ok, f"tau = {tau * 1e3:.3f} ms (80 +- 1 ms)")


def _lpps_line(t2):
    system = alanine_preset()
    seq = gates.lpps_pulse_sequence(system, "000", 0.179)
    rho = run_sequence(system, seq, thermal_equilibrium(system), t2=t2)
    return readout_spectrum(rho, system).line("000").amplitude


def test_c3_t2_attenuation():
    ratio = abs(_lpps_line(True)) / abs(_lpps_line(False))
    ok = abs(ratio - 0.82) <= 0.01
    assert record(3, ok, f"dominant-line T2 scaling = {ratio:.5f} (0.82 +- 0.01)")


@pytest.fixture(scope="module")
def sweeps():
    grid = tse.default_ratio_grid()
    out = {}
    for name, alpha in (("pi/2", math.pi / 2), ("pi", math.pi)):
        out[name] = (
            tse.fidelity_sweep(alanine_preset(), alpha, grid, system_id="alanine"),
            tse.fidelity_sweep(alanine_carbons_preset(), alpha, grid,
                               system_id="alanine-carbons"),
        )
    return grid, out


def test_c4a_high_fidelity_below_04(sweeps):
    grid, out = sweeps
    mask = grid <= 0.4
    worst = {k: float(np.max(1 - np.asarray(four.fidelities)[mask])) for k, (four, _) in out.items()}
    ok = all(w < 0.01 for w in worst.values())
    detail = ", ".join(f"alpha={k}: max Q = {w:.2e}" for k, w in worst.items())
    assert record("4a", ok, f"F > 0.99 for ratio <= 0.4 ({detail})")


def test_c4b_four_spin_q_below_three_spin(sweeps):
    grid, out = sweeps
    parts, ok = [], True
    for k, (four, three) in out.items():
        q4, q3 = np.asarray(four.q_values), np.asarray(three.q_values)
        bad = np.flatnonzero(q4 > q3)
        ok &= bad.size == 0
        where = ", ".join(f"{grid[i]:.4g}" for i in bad)
        parts.append(f"alpha={k}: {bad.size}/{grid.size} violations" + (f" at ratio {where}" if bad.size else ""))
    assert record("4b", ok, "Q(4-spin) <= Q(3-spin) pointwise; " + "; ".join(parts))


def _closed_form_bruteforce(b1, b2, alpha):
    """|Tr(U1^dag U2)/8|^2 built from scratch with kron and expm."""
    i0z, i0y = kron_at({0: SZ}, 3), kron_at({0: SY}, 3)
    i1z, i2z = kron_at({1: SZ}, 3), kron_at({2: SZ}, 3)
    h = -(b1 + b2) * i0z + 2 * b1 * i0z @ i1z + 2 * b2 * i0z @ i2z + i0y
    u1 = expm(-1j * alpha * h)
    p00 = kron_at({1: PA, 2: PA}, 3)
    u_control = expm(-1j * alpha * i0y @ p00)
    gen = np.zeros((8, 8), dtype=complex)
    for s1, s2 in itertools.product((PA, PB), repeat=2):
        if s1 is PA and s2 is PA:
            continue
        proj = kron_at({1: s1, 2: s2}, 3)
        # Observer z field inside this register block.
        d = np.trace(h @ proj @ kron_at({0: PA}, 3)).real - np.trace(h @ proj @ kron_at({0: PB}, 3)).real
        gen += math.copysign(math.hypot(d, 1.0), d) * i0z @ proj
    u2 = u_control @ expm(-1j * alpha * gen)
    return fidelity(u1, u2)


def test_c5_closed_form_oracle():
    rng = np.random.default_rng(20240611)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        b1, b2 = rng.uniform(0.05, 10.0, size=2)
        alpha = rng.uniform(0.0, 2 * math.pi)
        worst = max(worst, abs(tse.analytic_fidelity_3spin(b1, b2, alpha) - _closed_form_bruteforce(b1, b2, alpha)))
    worst_comm = 0.0
    for _ in range(50):
        a = tuple(rng.uniform(-50, 50, size=2))
        b = tuple(rng.uniform(0.05, 10, size=2))
        c12 = rng.uniform(-1, 1)
        params = tse.TseParams(a, b, ((0.0, c12), (c12, 0.0)), 1.0, math.pi / 2)
        terms = list(tse.h0_terms(params).values())
        for x, y in itertools.combinations(terms, 2):
            worst_comm = max(worst_comm, np.abs(x @ y - y @ x).max())
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and worst_comm <= 1e-10 and dt < 10
    assert record(5, ok, f"closed-form F vs brute force max |dF| = {worst:.1e} (1e-9), "
                         f"max commutator = {worst_comm:.1e} (1e-10), {dt:.2f} s (< 10 s)")


def _two_spin_roots(alpha, j01, kmax=4):
    """Ratios where alpha sqrt(1 + 4 b^2) hits 2 pi k, b = pi J01 / Omega0, by scan + bisection."""
    def g(r, k):
        b = 1.0 / r  # b = pi J01 / Omega0 = 1 / ratio
        return alpha * math.sqrt(1 + 4 * b * b) - 2 * math.pi * k

    scan = np.geomspace(1e-3, 50, 20001)
    roots = []
    for k in range(1, kmax + 1):
        vals = [g(r, k) for r in scan]
        for i in range(len(scan) - 1):
            if vals[i] * vals[i + 1] < 0:
                roots.append(brentq(g, scan[i], scan[i + 1], args=(k,), xtol=1e-15))
    return roots


def test_c6_two_spin_exact_levels():
    system = make_system([0.0, -4320.0], {(0, 1): 34.94})
    worst, count = 0.0, 0
    for alpha in (math.pi / 2, math.pi):
        for r in _two_spin_roots(alpha, 34.94):
            props = tse.tse_propagators(system, "0", r, alpha)
            worst = max(worst, 1 - tse.gate_fidelity(props.u1, props.u2))
            count += 1
    ok = count > 0 and worst <= 1e-9
    assert record(6, ok, f"{count} roots, max 1 - F(U1,U2) = {worst:.1e} (1e-9)")


def _homonuclear(n):
    offs = [0.0, -4320.0, 15793.0, 1550.0][:n]
    js = {(0, 1): 34.94, (0, 2): 53.81, (0, 3): 143.21, (1, 2): -1.2, (1, 3): 5.5, (2, 3): 5.1}
    return make_system(offs, {k: v for k, v in js.items() if max(k) < n})


@pytest.fixture(scope="module")
def ideal_lpps():
    worst_exact, worst_modes, worst_spec = 0.0, 0.0, 0.0
    for nspins in (2, 3, 4):
        system = _homonuclear(nspins)
        n = nspins - 1
        for label in ("".join(b) for b in itertools.product("01", repeat=n)):
            u = gates.lpps_prep_unitary(n, label)
            rho_f = conjugate(u, thermal_equilibrium(system))
            a = crush(rho_f, system, "crush_all")
            b = crush(rho_f, system, "crush_nonzero_order")
            worst_exact = max(worst_exact, np.abs(a - lpps_state(system, label)).max())
            worst_modes = max(worst_modes, np.abs(a - b).max())
            sa, sb = readout_spectrum(a, system), readout_spectrum(b, system)
            worst_spec = max(worst_spec, np.abs(sa.amplitudes - sb.amplitudes).max())
    return worst_exact, worst_modes, worst_spec


def test_c7a_lpps_exact_after_crush(ideal_lpps):
    worst = ideal_lpps[0]
    assert record("7a", worst <= 1e-12,
                  f"crush_all(U rho_eq U^dag) - LPPS max entry = {worst:.1e} (1e-12)")


def test_c7b_crush_modes_agree(ideal_lpps):
    _, worst, spec = ideal_lpps
    assert record("7b", worst <= 1e-12,
                  f"crush_all vs crush_nonzero_order max entry = {worst:.3g} (1e-12); "
                  f"readout spectra differ by {spec:.1e}")


def test_c8_bv_end_to_end():
    system = alanine_preset()
    rho_ideal = lpps_state(system, "000")
    rho_pulsed = run_sequence(system, gates.lpps_pulse_sequence(system, "000", 0.179),
                              thermal_equilibrium(system))
    worst_conf, min_frac, all_ok = 0.0, 1.0, True
    for a in ALL_A:
        seq = gates.bv_pulse_sequence(a, 3)
        ideal = rho_ideal if not len(seq) else run_sequence(system, seq, rho_ideal)
        pulsed = rho_pulsed if not len(seq) else run_sequence(system, seq, rho_pulsed)
        d_ideal = decode_answer(readout_spectrum(ideal, system))
        d_pulsed = decode_answer(readout_spectrum(pulsed, system))
        all_ok &= d_ideal.label == a and d_pulsed.label == a
        worst_conf = max(worst_conf, abs(d_ideal.confidence - 1.0))
        min_frac = min(min_frac, d_pulsed.confidence)
    ok = all_ok and worst_conf <= 1e-10 and min_frac >= 0.98
    assert record(8, ok, f"all 8 decoded={all_ok}, ideal |conf-1| = {worst_conf:.1e} (1e-10), "
                         f"pulsed min fraction = {min_frac:.5f} (>= 0.98)")


def _u_f(a):
    """|x>|y> -> |x>|y xor a.x> on n register qubits plus one oracle qubit (last)."""
    n = len(a)
    dim = 2 ** (n + 1)
    u = np.zeros((dim, dim))
    for x in range(2**n):
        f = bin(int(a, 2) & x).count("1") % 2
        for y in (0, 1):
            u[(x << 1) | (y ^ f), (x << 1) | y] = 1
    return u


def test_c9_full_oracle_matches():
    minus = np.array([1, -1]) / math.sqrt(2)
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    worst, checked = 0.0, 0
    for n in (1, 2, 3):
        hn = reduce(np.kron, [h] * n)
        for a in ("".join(b) for b in itertools.product("01", repeat=n)):
            uf = _u_f(a)
            # Oracle qubit in (|0> - |1>)/sqrt2: project it out on both sides.
            anc = np.kron(np.eye(2**n), minus[:, None])
            reduced = anc.T @ uf @ anc
            # Also the Hadamard-conjugated full circuit acting on |x>|->.
            full = np.kron(hn, E2.real) @ uf @ np.kron(hn, E2.real)
            ua = gates.bv_oracle_unitary(a)
            worst = max(worst, np.abs(reduced - ua).max())
            worst = max(worst, np.abs(anc.T @ full @ anc - hn @ ua @ hn).max())
            # The oracle qubit stays in |->, so no weight leaks out of the projected block.
            for x in range(2**n):
                psi = np.kron(np.eye(2**n)[x], minus)
                worst = max(worst, abs(np.linalg.norm(anc.T @ uf @ psi) - 1))
                checked += 1
    ok = worst <= 1e-12
    assert record(9, ok, f"U_f vs U_a over {checked} (a, x) pairs, max deviation = {worst:.1e}")


def _cli_digest(tmp_path, argv, tag):
    out = tmp_path / tag
    assert cli.main(argv + ["--out", str(out)]) == 0
    h = hashlib.sha256()
    for p in sorted(out.iterdir()):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()


def test_c10_determinism(tmp_path):
    runs = [
        ["lpps", "--preset", "alanine", "--label", "000"],
        ["bv", "--preset", "alanine", "--a", "101", "--mode", "pulsed"],
        ["fidelity", "--preset", "alanine-carbons", "--ratios", "0.05:1:12log",
         "--alpha", "pi/2", "--alpha", "pi"],
    ]
    ok = True
    for k, argv in enumerate(runs):
        first = _cli_digest(tmp_path, argv, f"{k}a")
        second = _cli_digest(tmp_path, argv, f"{k}b")
        ok &= first == second
    assert record(10, ok, f"{len(runs)} commands run twice, byte-identical outputs = {ok}")
