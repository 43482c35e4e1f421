"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line before asserting.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import json
import math

import numpy as np

from oracles import haar, random_vector
from tripwell.cli import main
from tripwell.fock import (
    SlaterExpansion,
    apply_one_body,
    from_slater_expansion,
    one_per_well_projector,
    product_state,
    slater_determinant,
    to_slater_expansion,
)
from tripwell.measures import concurrenceN, fermionic_concurrence, fermionic_tangle
from tripwell.protocol import (
    Classification,
    EtaParams,
    analytic_projected_state,
    evolve,
    ghz_no_go_scan,
    random_symmetric_tunneling,
    run_protocol,
    two_well_protocol,
    w_concurrence_closed_form,
)
from tripwell.qubitmap import C3_MAX, unfreeze, verify_measure_identity
from tripwell.su3 import (
    EulerAngles,
    default_grid,
    eta_differences_closed_form,
    euler_to_matrix,
    probability_closed_forms,
    probability_curves,
    symmetric_solution,
)

C3F_W = 2 * math.sqrt(2) / 3


def verdict(number, title, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
    assert ok, detail


def test_criterion_01_optimal_point(capsys):
    code = main(["simulate", "--optimal"])
    data = json.loads(capsys.readouterr().out)
    out = run_protocol(symmetric_solution(math.pi / 4).matrix())
    ref = from_slater_expansion(
        SlaterExpansion(
            {
                (2, 3, 5): np.exp(-1j * math.pi / 3) / math.sqrt(3),
                (1, 4, 5): np.exp(1j * math.pi / 3) / math.sqrt(3),
                (1, 3, 6): -1 / math.sqrt(3),
            }
        )
    )
    fidelity = abs(ref.overlap(out.final_state)) ** 2
    p_err = abs(out.detection_probability - 1 / 3)
    c_err = abs(out.measures.cNf - C3F_W)
    ok = (
        code == 0
        and p_err < 1e-10
        and c_err < 1e-10
        and abs(data["P"] - 1 / 3) < 1e-10
        and abs(data["c3f"] - C3F_W) < 1e-10
        and fidelity > 1 - 1e-10
    )
    verdict(1, "optimal point", ok, f"|P-1/3|={p_err:.1e}, |C3f-2sqrt2/3|={c_err:.1e}, 1-F={1 - fidelity:.1e}")


def test_criterion_02_equal_probability_point():
    values = probability_closed_forms(math.pi / 4)
    t = symmetric_solution(math.pi / 4).matrix()
    out = run_protocol(t)
    prob = np.abs(t) ** 2
    simulated = {"p_ab": prob[0, 1], "p_bc": prob[1, 2], "p_aa": prob[0, 0], "p_bb": prob[1, 1], "P": out.detection_probability}
    errs = [abs(float(values[k]) - 1 / 3) for k in simulated] + [abs(v - 1 / 3) for v in simulated.values()]
    cos_err = max(abs(float(values["cos_theta4"]) - 1 / math.sqrt(3)), abs(t[2, 2].real - 1 / math.sqrt(3)))
    ok = max(errs) < 1e-10 and cos_err < 1e-10
    verdict(2, "equal probabilities at theta2 = pi/4", ok, f"max |p-1/3|={max(errs):.1e}, |cos t4-1/sqrt3|={cos_err:.1e}")


def test_criterion_03_curve_maximum():
    grid = default_grid(2001)
    curves = probability_curves(grid)
    peak = int(np.argmax(curves["P"]))
    nearest = int(np.argmin(np.abs(grid - math.pi / 4)))
    err = abs(curves["P"][peak] - 1 / 3)
    ok = peak == nearest and err < 1e-6
    verdict(3, "P maximal at pi/4", ok, f"argmax={peak}, nearest={nearest}, |maxP-1/3|={err:.1e}")


def test_criterion_04_ghz_no_go():
    report = ghz_no_go_scan(10_000, seed=7)
    ghz = report.counts["ghz_type"]
    eta_ok = set(report.eta_counts) <= {0, 2, 3}
    ok = report.ok and ghz == 0 and eta_ok and sum(report.eta_counts.values()) == 10_000 + report.structured
    verdict(
        4,
        "no GHZ-type outcome",
        ok,
        f"{report.samples} Haar + {report.structured} structured, ghz={ghz}, eta counts={report.eta_counts}",
    )


def test_criterion_05_analytic_projection():
    rng = np.random.default_rng(5)
    project = one_per_well_projector()
    worst = 0.0
    for _ in range(1000):
        t, s = haar(3, rng), haar(2, rng)
        analytic, _, _ = analytic_projected_state(t, s)
        worst = max(worst, float(np.max(np.abs(analytic.amplitudes - project(evolve(t, s)).amplitudes))))
    verdict(5, "closed-form projected state = simulate then project", worst < 1e-12, f"max entry error {worst:.1e}")


def test_criterion_06_w_concurrence_closed_form():
    rng = np.random.default_rng(6)
    worst, w_count = 0.0, 0
    for _ in range(1000):
        out = run_protocol(random_symmetric_tunneling(rng))
        if out.final_state is None:
            continue
        w_count += out.classification is Classification.W_TYPE
        worst = max(worst, abs(w_concurrence_closed_form(out.eta) - fermionic_concurrence(out.final_state)))
    ok = worst < 1e-12 and w_count > 900
    verdict(6, "W concurrence closed form = general fermionic concurrence", ok, f"max error {worst:.1e} over {w_count} W outcomes")


def test_criterion_07_eta_closed_forms():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        a = EulerAngles(
            rng.uniform(0, math.pi), rng.uniform(0, math.pi / 2), rng.uniform(0, math.pi),
            rng.uniform(0, math.pi / 2), rng.uniform(0, math.pi), rng.uniform(0, math.pi / 2),
            rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi),
        )
        eta = EtaParams.from_tunneling(euler_to_matrix(a))
        direct = [abs(x) ** 2 for x in eta.differences]
        worst = max(worst, float(np.max(np.abs(np.subtract(eta_differences_closed_form(a), direct)))))
    verdict(7, "|eta_i - eta_j|^2 closed forms", worst < 1e-12, f"max error {worst:.1e}")


def test_criterion_08_measure_identities():
    rng = np.random.default_rng(8)
    flips = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, 1j], [1j, 0]])]
    worst_ratio, worst_tangle, checked = 0.0, 0.0, 0
    for k in range(300):
        t = haar(3, rng) if k % 2 else random_symmetric_tunneling(rng)
        out = run_protocol(t, flips[k % 3])
        if out.classification is not Classification.W_TYPE:
            continue
        report = verify_measure_identity(out.final_state)
        worst_ratio = max(worst_ratio, abs(report.c3f - report.c3 / C3_MAX))
        worst_tangle = max(worst_tangle, abs(report.tau), abs(report.tau_f))
        checked += 1
    ghz_c3 = concurrenceN(np.array([1, 0, 0, 0, 0, 0, 0, 1]) / math.sqrt(2))
    ok = checked > 250 and worst_ratio < 1e-10 and worst_tangle < 1e-10 and abs(ghz_c3 - math.sqrt(1.5)) < 1e-12
    verdict(
        8,
        "C3f = C3/sqrt(3/2) and tau = tau_f = 0 on W outcomes",
        ok,
        f"{checked} W outcomes, ratio err {worst_ratio:.1e}, tangle {worst_tangle:.1e}, GHZ C3 err {abs(ghz_c3 - math.sqrt(1.5)):.1e}",
    )


def test_criterion_09_two_well():
    out = two_well_protocol(0.5)
    ref = 0.5 * (
        product_state([2, 3], 4).amplitudes
        - product_state([3, 2], 4).amplitudes
        + product_state([4, 1], 4).amplitudes
        - product_state([1, 4], 4).amplitudes
    )
    fidelity = abs(np.vdot(ref, out.final_state.amplitudes)) ** 2
    c2, c2f = out.measures.c2, out.measures.cNf
    ok = fidelity > 1 - 1e-12 and abs(c2 - 1) < 1e-10 and abs(c2f - 1) < 1e-10
    verdict(9, "two-well protocol at p = 1/2", ok, f"1-F={1 - fidelity:.1e}, C2={c2!r}, C2f={c2f!r}")


def test_criterion_10_measure_unit_values():
    ghz_f = from_slater_expansion(SlaterExpansion({(1, 3, 5): 1 / math.sqrt(2), (2, 4, 6): 1 / math.sqrt(2)}))
    tau_ghz, c_ghz = fermionic_tangle(ghz_f), fermionic_concurrence(ghz_f)
    rng = np.random.default_rng(10)
    worst_w = 0.0
    for triples in (((2, 3, 5), (1, 4, 5), (1, 3, 6)), ((1, 4, 6), (2, 3, 6), (2, 4, 5))):
        for _ in range(50):
            w = random_vector(3, rng)
            state = from_slater_expansion(SlaterExpansion(dict(zip(triples, w))))
            worst_w = max(worst_w, fermionic_tangle(state))
    ok = abs(tau_ghz - 1) < 1e-10 and abs(c_ghz - 1) < 1e-10 and worst_w < 1e-10
    verdict(10, "unit values of tau_f and C3f", ok, f"tau_f(GHZ_f)={tau_ghz!r}, C3f(GHZ_f)={c_ghz!r}, max tau_f(W_f)={worst_w:.1e}")


def test_criterion_11_invariance():
    rng = np.random.default_rng(11)
    base = [
        from_slater_expansion(SlaterExpansion({(2, 3, 5): 0.6, (1, 4, 5): 0.64j, (1, 3, 6): -0.48})),
        from_slater_expansion(SlaterExpansion({(1, 3, 5): 0.8, (2, 4, 6): 0.6j})),
        unfreeze(random_vector(8, rng)),
    ]
    worst_inv = 0.0
    for _ in range(100):
        v = haar(6, rng)
        for state in base:
            moved = apply_one_body(state, v)
            worst_inv = max(
                worst_inv,
                abs(fermionic_concurrence(moved) - fermionic_concurrence(state)),
                abs(fermionic_tangle(moved) - fermionic_tangle(state)),
            )
    worst_slater = 0.0
    for _ in range(100):
        evolved = evolve(haar(3, rng), haar(2, rng))
        worst_slater = max(worst_slater, fermionic_concurrence(evolved))
    assert to_slater_expansion(slater_determinant([1, 3, 4], 6)).nonzero() == {(1, 3, 4): 1.0}
    ok = worst_inv < 1e-9 and worst_slater < 1e-10
    verdict(11, "one-body invariance and Slater evolution", ok, f"invariance err {worst_inv:.1e}, max C3f(evolved) {worst_slater:.1e}")
