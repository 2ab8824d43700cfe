"""Acceptance checks, one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are written to the
terminal even under output capture) or directly with
``python3 tests/test_acceptance.py``. Criterion 7 runs the CNOT searches
and can take up to 30 minutes per graph; set HYBRIDQUBIT_SKIP_SEARCH=1 to
report it as skipped.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from hybridqubit.dynamics import resonance_frequency  # noqa: E402
from hybridqubit.encoded import (  # noqa: E402
    CNOT,
    CZ,
    SWAP2,
    GateSequence,
    closest_unitary,
    cnot_class_residual,
    encoding_for,
    exchange_unitary,
    full_space,
    logical_block,
    logical_encoding,
    makhlin_invariants,
    phase_distance,
    preset,
    random_local,
    random_unitary,
    sequence_unitary,
    spin_operators,
    swap_matrix,
    sz_block,
)
from hybridqubit.hubbard import build_full_hamiltonian, default_params, dot_spectra, three_electron_basis  # noqa: E402
from hybridqubit.many_body import total_s_squared, total_sz  # noqa: E402
from hybridqubit.optimizer import Objective, SearchConfig, hybrid_search  # noqa: E402
from hybridqubit.optimizer.templates import TEMPLATES, preset_template  # noqa: E402
from hybridqubit.schrieffer_wolff import (  # noqa: E402
    EffectiveQubit,
    charge_gap,
    effective_couplings,
    effective_hamiltonian_analytic,
    effective_hamiltonian_numeric,
    exact_gap,
    scaling_exponent,
)
from instances import T_OVER_DELTA, regime_params  # noqa: E402
from oracles import brute_invariants  # noqa: E402

SEARCH_BUDGET_S = 1800.0
SEARCH_RESTARTS = 20


# --------------------------------------------------------------------------
# checks: each returns (passed, detail)


def check_sw_fidelity():
    rng = np.random.default_rng(2024)
    slopes, rel05 = [], []
    for _ in range(10):
        p = regime_params(rng)
        assert not np.any(p.C[:2, 2:])  # no inter-dot Coulomb: U1 = 0
        ts = [r * charge_gap(p) for r in T_OVER_DELTA]
        errs = []
        for r, t in zip(T_OVER_DELTA, ts):
            q = p.with_tunneling(t)
            exact = exact_gap(q)
            err = abs(effective_hamiltonian_analytic(q).gap - exact)
            errs.append(err)
            if r == 0.05:
                rel05.append(err / exact)
        slopes.append(scaling_exponent(ts, errs))
    ok = min(slopes) >= 2.7 and max(rel05) < 0.05
    return ok, (
        f"10 sets: min exponent {min(slopes):.2f} (need >= 2.7), "
        f"max relative gap error at t/D=0.05 {max(rel05):.3%} (need < 5%)"
    )


def check_coupling_identities():
    rng = np.random.default_rng(7)
    worst = 0.0
    exact_jp = True
    for k in range(20):
        p = regime_params(rng)
        t = 0.01 * (k + 1)
        J1, J2, Jp = effective_couplings(p, t=t)
        sp = dot_spectra(p)
        worst = max(worst, abs(J1 - 2 * t * t / (sp.E_S_R - sp.E_S_L)), abs(J2 - 2 * t * t / (sp.E_S_R - sp.E_T_L)))
        exact_jp &= Jp == (J1 + J2) / 2
    ok = exact_jp and worst == 0.0
    return ok, f"Jp == (J1+J2)/2 bitwise on 20 sets: {exact_jp}; max |J - closed form| = {worst:.1e}"


def check_resonance():
    f = resonance_frequency(EffectiveQubit.from_couplings(0.0, 0.0, 0.0, 0.05))
    return abs(f - 12.09) <= 0.01, f"resonance {f:.4f} GHz (target 12.09 +- 0.01)"


def check_exchange_calibration():
    c = (1 + 1j) / 2
    root_swap = np.array([[1, 0, 0, 0], [0, c, c.conjugate(), 0], [0, c.conjugate(), c, 0], [0, 0, 0, 1]])
    two = full_space(2)
    d_swap = phase_distance(exchange_unitary((0, 1), 0.5, two), swap_matrix(two, 0, 1))
    d_root = phase_distance(exchange_unitary((0, 1), 0.25, two), root_swap)
    space = sz_block(6, -2)
    d_block = phase_distance(exchange_unitary((2, 3), 0.5, space), swap_matrix(space, 2, 3))
    worst = max(d_swap, d_root, d_block)
    return worst < 1e-12, f"distances SWAP {d_swap:.1e}, sqrt-SWAP {d_root:.1e}, SWAP in 6-spin block {d_block:.1e}"


def check_invariant_oracle():
    rng = np.random.default_rng(99)
    gates = [np.eye(4, dtype=complex), SWAP2, CNOT, CZ]
    gates += [random_local(rng) @ CNOT @ random_local(rng) for _ in range(100)]
    worst = 0.0
    for u in gates:
        g1, g2 = makhlin_invariants(u)
        b1, b2 = brute_invariants(u)
        worst = max(worst, abs(g1 - b1), abs(g2 - b2))
    drift = 0.0
    flips = 0
    for _ in range(50):
        u = random_unitary(4, rng)
        v = random_local(rng) @ u @ random_local(rng)
        drift = max(drift, abs(cnot_class_residual(*makhlin_invariants(u)) - cnot_class_residual(*makhlin_invariants(v))))
        w = random_local(rng) @ CNOT @ random_local(rng)
        flips += cnot_class_residual(*makhlin_invariants(w)) > 1e-12
    ok = worst < 1e-8 and drift < 1e-8 and flips == 0
    return ok, f"max oracle mismatch {worst:.1e} over 104 gates; class residual drift {drift:.1e}; misclassified {flips}"


def check_symmetry():
    b = three_electron_basis()
    sz, s2 = total_sz(b).matrix, total_s_squared(b).matrix
    worst = 0.0
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = regime_params(rng).with_tunneling(rng.uniform(0.01, 0.1))
        h = build_full_hamiltonian(p, b).matrix
        worst = max(worst, np.linalg.norm(h @ sz - sz @ h), np.linalg.norm(h @ s2 - s2 @ h))
        _, _, heff = effective_hamiltonian_numeric(p, full_output=True)
        for op in (total_sz(heff.basis).matrix, total_s_squared(heff.basis).matrix):
            worst = max(worst, np.linalg.norm(heff.matrix @ op - op @ heff.matrix))
    full = full_space(6)
    fsz, fs2 = spin_operators(full)
    block = sz_block(6, -2)
    emb = block.embedding(full)
    agree = 0.0
    for name in ("d", "e", "f"):
        g = preset(name)
        edges = g.sorted_edges()
        for _ in range(4):
            n = 12
            seq = GateSequence.from_arrays([edges[k] for k in rng.integers(0, len(edges), n)], rng.random(n))
            u = sequence_unitary(seq, g, full)
            worst = max(worst, np.linalg.norm(u @ fsz - fsz @ u), np.linalg.norm(u @ fs2 - fs2 @ u))
            ub = sequence_unitary(seq, g, block)
            agree = max(agree, np.linalg.norm(emb.T @ u @ emb - ub))
            mf, lf = logical_block(u, logical_encoding(g.qubit_groups, full))
            mb, lb = logical_block(ub, encoding_for(g))
            agree = max(agree, np.linalg.norm(mf - mb), abs(lf - lb))
    ok = worst < 1e-10 and agree < 1e-10
    return ok, f"max commutator norm {worst:.1e}; block vs full-space mismatch {agree:.1e}"


def _search_one(name, length):
    tmpl = preset_template(name, length)
    if tmpl is None:
        shipped = sorted(n for g, n in TEMPLATES if g == name)
        best = f"shortest shipped ordering has {shipped[0]} pulses" if shipped else "none shipped"
        return False, f"graph {name}: no {length}-pulse ordering available ({best}), search not attempted"
    g = preset(name)
    enc = encoding_for(g)
    cfg = SearchConfig(restarts=SEARCH_RESTARTS, time_budget=SEARCH_BUDGET_S, seed=0)
    res = hybrid_search(Objective(g, tmpl, enc), cfg, graph_name=name)
    u = sequence_unitary(res.sequence, g)
    m, leak = logical_block(u, enc)
    g1, g2 = makhlin_invariants(closest_unitary(m))
    ok = res.success and leak < 1e-8 and abs(g1) < 1e-4 and abs(g2 - 1) < 1e-4
    return ok, (
        f"graph {name}, {length} pulses: leakage {leak:.1e}, |G1| {abs(g1):.1e}, |G2-1| {abs(g2 - 1):.1e}, "
        f"{res.restarts_used} restarts, {res.wall_time:.0f} s"
    )


def check_search():
    if os.environ.get("HYBRIDQUBIT_SKIP_SEARCH"):
        return None, "skipped (HYBRIDQUBIT_SKIP_SEARCH set)"
    ok_d, msg_d = _search_one("d", 16)
    ok_e, msg_e = _search_one("e", 18)
    extra = ""
    if preset_template("f", 14) is not None:
        ok_f, msg_f = _search_one("f", 14)
        extra = f"; stretch {'met' if ok_f else 'not met'}: {msg_f}"
    return ok_d and ok_e, f"{msg_d}; {msg_e}{extra}"


def _cli(out_dir, *argv):
    cmd = [sys.executable, "-m", "hybridqubit.cli", "--out-dir", str(out_dir), *argv]
    return subprocess.run(cmd, capture_output=True, text=True)


def check_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        params = tmp / "params.json"
        params.write_text(default_params(0.03).to_json())
        runs = {
            "derive-effective": (["derive-effective", str(params)], "effective_report.json"),
            "search-cnot": (
                ["search-cnot", "--graph", "e", "--length", "8", "--restarts", "2", "--generations", "5",
                 "--population", "12", "--quiet", "--seed", "11"],
                "search_result.json",
            ),
        }
        same = {}
        for key, (argv, out) in runs.items():
            blobs = []
            for k in range(2):
                d = tmp / f"{key}_{k}"
                _cli(d, *argv)
                blobs.append((d / out).read_bytes() if (d / out).exists() else None)
            same[key] = blobs[0] is not None and blobs[0] == blobs[1]
    return all(same.values()), ", ".join(f"{k} byte-identical: {v}" for k, v in same.items())


CRITERIA = [
    ("1 Schrieffer-Wolff fidelity", check_sw_fidelity),
    ("2 coupling identities", check_coupling_identities),
    ("3 resonance frequency", check_resonance),
    ("4 exchange calibration", check_exchange_calibration),
    ("5 invariant oracle", check_invariant_oracle),
    ("6 symmetry suite", check_symmetry),
    ("7 CNOT search reproduction", check_search),
    ("8 determinism", check_determinism),
]


def line(title, ok, detail):
    tag = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    return f"[{tag}] criterion {title}: {detail}"


@pytest.mark.parametrize("title,check", CRITERIA, ids=[t.split()[0] for t, _ in CRITERIA])
def test_criterion(title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + line(title, ok, detail))
    if ok is None:
        pytest.skip(detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for title, check in CRITERIA:
        ok, detail = check()
        print(line(title, ok, detail), flush=True)
        failed += ok is False
    sys.exit(1 if failed else 0)
