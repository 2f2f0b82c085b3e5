"""Acceptance criteria, one test each, at the required tolerances.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the
measured numbers, then asserts.
"""

import csv
import math
import time

import numpy as np
import pytest

from elastoshock.analytic import Verdict, positivity_chain_terms, circle_coefficients, classify, stability_margin, margin_2d
from elastoshock.cli import main
from elastoshock.eos import make_polytropic
from elastoshock.errors import InternalConsistencyError
from elastoshock.lax import MULTIPLICITIES, characteristic_speeds, cluster_multiplicities, dense_speeds
from elastoshock.sampling import (
    dimensionless_shock,
    physical_pair,
    physical_shock,
    subsonic_elastic_shock,
    unit_angle,
)
from elastoshock.spectral import (
    ScanGrid,
    subsonic_certificate,
    delta_pm,
    dispersion_product,
    interior_symbol,
    lopatinski_values,
    scan_stability,
    transition_discriminant,
    transition_points,
)
from elastoshock.states import DimensionlessShock, MaterialState, nondimensionalize


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return _report


def test_1_gas_sweep_boundary(tmp_path, report):
    cfg = tmp_path / "gas.ini"
    cfg.write_text(
        "[shock]\nM = 0.5\nR = 2\nF = 0 0 0 0 0 0 0 0 0\n\n"
        "[sweep]\naxis1 = M\naxis2 = R\nrange1 = 0.01:0.99:200\nrange2 = 1.01:8:200\n"
    )
    t0 = time.perf_counter()
    code = main(["sweep", "--config", str(cfg), "--out", str(tmp_path), "--allow-formal"])
    elapsed = time.perf_counter() - t0
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    Ms = np.unique([float(r["axis1"]) for r in rows])
    Rs = np.unique([float(r["axis2"]) for r in rows])
    grid = {(float(r["axis1"]), float(r["axis2"])): r["verdict"] == "uniformly_stable" for r in rows}
    dM, dR = Ms[1] - Ms[0], Rs[1] - Rs[0]
    bad = 0
    for (M, R), uniform in grid.items():
        if uniform != (M * M * (R - 1) < 1):
            corners = [(M + a * dM) ** 2 * (R + b * dR - 1) - 1 for a in (-1, 1) for b in (-1, 1)]
            if min(corners) > 0 or max(corners) < 0:
                bad += 1
    ok = code == 0 and len(rows) == 40000 and bad == 0 and elapsed < 30
    report(1, ok, f"{len(rows)} cells, {bad} mismatches beyond one cell, {elapsed:.1f} s")


def test_2_oracle_agreement(report):
    t0 = time.perf_counter()
    n, in_band, disagree, weak = 200, 0, [], 0
    for i in range(n):
        shock = dimensionless_shock(2024, i)
        a = classify(shock)
        b = scan_stability(shock)
        weak += a.verdict is Verdict.WEAK
        if abs(a.min_margin) <= 1e-3 * shock.Mstar**4:
            in_band += 1
            continue
        if a.verdict != b.verdict:
            disagree.append(i)
    # the convex-law physical sampler only yields uniformly stable shocks; run a slice of it too
    phys_disagree = []
    for i in range(20):
        shock = physical_shock(2024, i)
        if classify(shock).verdict != scan_stability(shock).verdict:
            phys_disagree.append(i)
    elapsed = time.perf_counter() - t0
    ok = not disagree and not phys_disagree and in_band < 0.05 * n and elapsed < 600
    report(
        2, ok,
        f"{n - in_band - len(disagree)}/{n - in_band} agree outside band ({weak} weak), "
        f"{in_band} in band, physical slice {20 - len(phys_disagree)}/20, {elapsed:.0f} s",
    )


def test_3_no_violent_instability(report):
    grid = ScanGrid(xi_count=401, theta_count=256, etas=(1e-4, 1e-2, 1e-1))
    cells = grid.xi_count * grid.theta_count
    hits, min_rel = [], math.inf
    for i in range(50):
        shock = dimensionless_shock(3, i)
        try:
            rep = scan_stability(shock, grid)
        except InternalConsistencyError as exc:
            hits.append((i, str(exc)))
            continue
        min_rel = min(min_rel, min(lv["min_polished_rel"] for lv in rep.diagnostics["levels"]))
    ok = not hits
    report(3, ok, f"50 shocks x 3 levels x {cells} cells, violations {len(hits)}, smallest relative |reduced| {min_rel:.2e}")


def test_4_d_positive_and_identity(report):
    n, worst, d_min = 100_000, 0.0, math.inf
    for i in range(n):
        shock = dimensionless_shock(4, i)
        w = unit_angle(40, i)
        t = positivity_chain_terms(shock, w)
        worst = max(worst, abs(t["lhs_identity"] - t["rhs_identity"]) / abs(t["rhs_identity"]))
        d_min = min(d_min, circle_coefficients(shock, w).D / shock.Mstar**4)
    ok = d_min > 0 and worst <= 1e-12
    report(4, ok, f"{n} samples, min D/M*^4 = {d_min:.3e}, worst identity error {worst:.2e}")


def test_5_convex_compressive_pairs(report):
    n, fails = 1000, []
    for i in range(n):
        pair = physical_pair(5, i)
        shock = nondimensionalize(pair)
        gas_prime = shock.Mtilde**2 * (shock.R - 1) < 1
        uniform = classify(shock).verdict is Verdict.UNIFORM
        if not (pair.lax_pass and shock.R > 1 and gas_prime and uniform):
            fails.append(i)
    report(5, not fails, f"{n - len(fails)}/{n} pairs pass Lax, the subsonic elastic condition and classify uniform")


def test_6_lower_bound_certificate(report):
    n, fails, worst = 10_000, 0, 0.0
    for i in range(n):
        shock = subsonic_elastic_shock(6, i)
        cert = subsonic_certificate(shock, unit_angle(60, i))
        if not (cert.applicable and cert.eta_candidate < 0 and cert.positivity_gap > 0):
            fails += 1
        worst = max(worst, cert.residual_imag, cert.residual_real)
    ok = fails == 0 and worst <= 1e-10
    report(6, ok, f"{n} samples, {fails} failures, worst reconstruction residual {worst:.2e}")


def test_7_symbol_consistency(report):
    worst_disp, worst_pref, count = 0.0, 0.0, 0
    for k in range(20):
        shock = dimensionless_shock(7, k)
        rng = np.random.default_rng([7, k])
        for _ in range(1000):
            s = complex(rng.uniform(1e-3, 2.0), rng.uniform(-5, 5))
            w = tuple(rng.uniform(-3, 3, 2))
            lam = complex(*rng.normal(size=2))
            det = np.linalg.det(interior_symbol(shock, s, lam, w))
            fac = complex(dispersion_product(shock, s, lam, w))
            worst_disp = max(worst_disp, abs(det - fac) / abs(fac))
            L = lopatinski_values(shock, s, w)
            worst_pref = max(worst_pref, abs(L.full_det - L.prefactor * L.reduced) / abs(L.full_det))
            count += 1
    ok = worst_disp <= 1e-8 and worst_pref <= 1e-8
    report(7, ok, f"{count} samples, dispersion {worst_disp:.2e}, Lopatinski prefactor {worst_pref:.2e}")


def test_8_transition_structure(report):
    w_disc = w_merge = w_delta = 0.0
    for i in range(1000):
        shock = dimensionless_shock(8, i)
        w = unit_angle(80, i)
        td = transition_points(shock, w)
        cc = circle_coefficients(shock, w)
        for xi in (td.xi1, td.xi2):
            scale = max(shock.M**2 * shock.Mstar**2 * xi**2, 2 * abs(cc.l0 * xi) * shock.M**2, cc.l0**2, cc.K0 * shock.beta**2)
            w_disc = max(w_disc, abs(float(transition_discriminant(shock, w, xi))) / scale)
            dp, dm = delta_pm(shock, w, xi)
            w_merge = max(w_merge, abs(dp - dm))
        w_delta = max(
            w_delta,
            abs(td.delta1 - math.sqrt(cc.K1) / shock.beta) / abs(td.delta1),
            abs(td.delta2 + math.sqrt(cc.K2) / shock.beta) / abs(td.delta2),
        )
    ok = w_disc <= 1e-10 and w_merge <= 1e-8 and w_delta <= 1e-10
    report(8, ok, f"discriminant {w_disc:.2e}, |delta+ - delta-| {w_merge:.2e}, delta* vs sqrt(K)/beta {w_delta:.2e}")


def test_9_two_dimensional_embedding(report):
    rng = np.random.default_rng(9)
    worst, n = 0.0, 1000
    for _ in range(n):
        F2 = rng.normal(scale=0.8, size=(2, 2))
        M1 = float(np.linalg.norm(F2[0]))
        M = M1 + rng.uniform(0.02, 0.98) * (math.sqrt(1 + M1**2) - M1)
        R = rng.uniform(0.2, 8.0)
        if np.linalg.det(F2) < 0:
            F2[:, 1] *= -1.0
        F3 = np.eye(3)
        F3[:2, :2] = F2
        Mminus = 2 * M / math.sqrt(M * M - M1 * M1)
        shock = DimensionlessShock(M, Mminus, R, F3)
        m2d, _ = margin_2d(M, R, F2)
        scale = max(abs(m2d), (1 + M1**2) ** 2)
        for w in ((1.0, 0.0), (-1.0, 0.0)):
            worst = max(worst, abs(stability_margin(shock, w) - m2d) / scale)
    report(9, worst <= 1e-12, f"{n} shocks, worst relative difference {worst:.2e}")


def test_10_characteristic_speeds(report):
    rng = np.random.default_rng(10)
    worst, bad_pattern, n = 0.0, 0, 1000
    for _ in range(n):
        F = np.eye(3) + rng.uniform(-0.5, 0.5, (3, 3))
        if np.linalg.det(F) <= 0:
            F[2] = -F[2]
        state = MaterialState(rng.uniform(0.3, 3), rng.uniform(-2, 2, 3), F)
        eos = make_polytropic(rng.uniform(0.2, 3), rng.uniform(1, 3))
        xi = rng.normal(size=3)
        closed = np.array(characteristic_speeds(state, eos, xi).speeds)
        dense = dense_speeds(state, eos, xi)
        worst = max(worst, float(np.abs(closed - dense).max()))
        bad_pattern += cluster_multiplicities(dense) != MULTIPLICITIES
    ok = worst <= 1e-10 and bad_pattern == 0
    report(10, ok, f"{n} samples, max abs error {worst:.2e}, multiplicity mismatches {bad_pattern}")
