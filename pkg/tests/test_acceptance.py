"""End-to-end checks, one test per numbered claim about the package.

Each test prints the measured numbers it judged, so a bare `pytest -v`
run gives one pass/fail line per claim plus the evidence on failure.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from _corpus import overlap_corpus
from polcascade.cascade import enumerate_channels, pl_spectrum
from polcascade.entanglement import (born_probabilities, chsh_value,
                                     peres_test, projected_state,
                                     sample_coincidences, x_state)
from polcascade.experiments import tracked_window
from polcascade.model import HBAR_MEV_PS, SystemParams, scheme_preset
from polcascade.pairstate import (DEFAULT_QUAD, DetectorWindow,
                                  brute_force_overlap, channel_norm,
                                  gamma_prime, windowed_overlap)
from polcascade.polariton import find_crossings, min_gap, solve_polaritons

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")


def random_params(rng):
    return SystemParams(
        ex_mean=rng.uniform(900.0, 1100.0),
        delta_x=rng.uniform(-0.5, 0.5),
        cav_mean=rng.uniform(900.0, 1100.0),
        delta_c=rng.uniform(-0.5, 0.5),
        rabi=rng.uniform(0.05, 0.5),
        tau_c=rng.uniform(5.0, 50.0),
        tau_xx=rng.uniform(100.0, 1000.0),
        binding=rng.uniform(3.0, 6.0),
    )


@pytest.fixture(scope="module")
def figures_runs(tmp_path_factory):
    """Two full `figures --all` runs differing only in worker count."""
    runs = {}
    for workers in (2, 4):
        out = tmp_path_factory.mktemp(f"figs_w{workers}")
        env = dict(os.environ, POLCASCADE_WORKERS=str(workers))
        t0 = time.perf_counter()
        proc = subprocess.run(
            [sys.executable, "-m", "polcascade", "figures", "--all",
             "--out-dir", str(out)],
            capture_output=True, text=True, env=env)
        elapsed = time.perf_counter() - t0
        assert proc.returncode == 0, proc.stderr
        runs[workers] = (out, elapsed)
    return runs


def read_column(path, name):
    with open(path) as fh:
        rows = [line.rstrip("\n").split(",") for line in fh
                if not line.startswith("#")]
    return np.array([float(r[rows[0].index(name)]) for r in rows[1:]])


def test_criterion_01_polariton_energies_match_eigenvalue_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240821)
    worst_energy = 0.0
    worst_split = 0.0
    for i in range(1000):
        p = random_params(rng)
        states = solve_polaritons(p)
        for pol in ("H", "V"):
            h = np.array([
                [p.e_exciton(pol), p.rabi / 2.0],
                [p.rabi / 2.0, p.e_cavity(pol)],
            ])
            expected = np.linalg.eigvalsh(h)
            got = np.array([states.get(pol, "LP").energy,
                            states.get(pol, "UP").energy])
            worst_energy = max(worst_energy, np.max(np.abs(got - expected)))
            # the same-polarization gap bottoms out at rabi, reached
            # where the cavity meets the exciton
            sign = 1.0 if pol == "H" else -1.0
            at = p.with_detuning(sign * (p.delta_x - p.delta_c) / 2.0)
            assert abs(at.e_cavity(pol) - at.e_exciton(pol)) < 1e-9
            res = solve_polaritons(at)
            gap = res.get(pol, "UP").energy - res.get(pol, "LP").energy
            worst_split = max(worst_split, abs(gap - p.rabi))
        if i < 5:
            d, g = min_gap(p, (("H", "LP"), ("H", "UP")), -2.0, 2.0)
            worst_split = max(worst_split, abs(g - p.rabi))
    elapsed = time.perf_counter() - t0
    print(f"worst energy dev {worst_energy:.3e}, worst splitting dev "
          f"{worst_split:.3e}, {elapsed:.2f} s")
    assert worst_energy <= 1e-12
    assert worst_split <= 1e-9
    assert elapsed < 1.0


def test_criterion_02_mirrored_levels_give_polarization_degenerate_branches():
    t0 = time.perf_counter()
    worst = 0.0
    for delta_x in np.linspace(-0.4, 0.4, 161):
        p = SystemParams(ex_mean=1000.0, delta_x=float(delta_x),
                         cav_mean=1000.0, delta_c=float(-delta_x),
                         rabi=0.22, tau_c=15.0, tau_xx=500.0, binding=3.0)
        assert p.e_cavity("H") == p.e_exciton("V")
        assert p.e_cavity("V") == p.e_exciton("H")
        s = solve_polaritons(p)
        worst = max(worst,
                    abs(s.h_lp.energy - s.v_lp.energy),
                    abs(s.h_up.energy - s.v_up.energy))
    elapsed = time.perf_counter() - t0
    print(f"worst H-V branch gap {worst:.3e} over 161 points, {elapsed:.2f} s")
    assert worst <= 1e-12
    assert elapsed < 1.0


def test_criterion_03_scheme3_crossing_location():
    t0 = time.perf_counter()
    p = scheme_preset(3)
    pair = (("H", "LP"), ("V", "LP"))
    scan = find_crossings(p, pair, -0.5, 0.5, tol=1e-9)
    assert len(scan.detunings) == 1
    delta = scan.detunings[0]

    grid = np.linspace(-0.5, 0.5, 4001)
    gaps = np.array([
        solve_polaritons(p.with_detuning(float(d))).get("H", "LP").energy
        - solve_polaritons(p.with_detuning(float(d))).get("V", "LP").energy
        for d in grid])
    brute = float(grid[np.argmin(np.abs(gaps))])
    sign_changes = int(np.sum(np.diff(np.sign(gaps)) != 0))
    elapsed = time.perf_counter() - t0
    print(f"crossing {delta:.10f}, brute scan {brute:.5f}, "
          f"{sign_changes} sign change(s), {elapsed:.2f} s")
    assert 0.27 <= abs(delta) <= 0.29
    assert abs(delta - brute) <= (grid[1] - grid[0])
    assert sign_changes == 1
    assert elapsed < 2.0


def test_criterion_04_packet_norm_and_integrator_oracles():
    t0 = time.perf_counter()
    worst_norm = 0.0
    for ch in enumerate_channels(scheme_preset(1)):
        hw = ch.xx_total_width + ch.intermediate.linewidth
        w = DetectorWindow(center1=ch.photon1, center2=ch.photon2,
                           width=2 * 200 * hw)
        got = windowed_overlap(ch, ch, w, DEFAULT_QUAD).real
        worst_norm = max(worst_norm, abs(got / channel_norm(ch) - 1.0))

    worst_case = ("", 0.0)
    for label, ca, cb, w in overlap_corpus():
        q = windowed_overlap(ca, cb, w, DEFAULT_QUAD)
        b = brute_force_overlap(ca, cb, w, n=4000)
        rel = abs(q - b) / max(abs(q), abs(b))
        if rel > worst_case[1]:
            worst_case = (label, rel)
    elapsed = time.perf_counter() - t0
    print(f"worst wide-window norm dev {worst_norm:.3e}, worst "
          f"quad-vs-brute rel {worst_case[1]:.3e} ({worst_case[0]}), "
          f"{elapsed:.1f} s")
    assert worst_norm <= 1e-2
    assert worst_case[1] <= 1e-4
    assert elapsed < 60.0


def test_criterion_05_scheme1_coherence_magnitude():
    t0 = time.perf_counter()
    p = scheme_preset(1)
    coh = gamma_prime(p, "LP-LP", tracked_window(p, "LP-LP", 0.2),
                      DEFAULT_QUAD)
    sym = SystemParams(ex_mean=1000.0, delta_x=0.0, cav_mean=1000.0,
                       delta_c=0.0, rabi=0.22, tau_c=15.0, tau_xx=500.0,
                       binding=3.0)
    coh_sym = gamma_prime(sym, "LP-LP", tracked_window(sym, "LP-LP", 0.2),
                          DEFAULT_QUAD)
    elapsed = time.perf_counter() - t0
    print(f"|gamma'| scheme 1 at zero: {abs(coh.gamma):.9f}, symmetric "
          f"channels: {abs(coh_sym.gamma):.12f}, {elapsed:.2f} s")
    assert 0.45 <= abs(coh.gamma) <= 0.5
    assert abs(abs(coh_sym.gamma) - 0.5) <= 1e-6
    assert elapsed < 10.0


def test_criterion_06_scheme_ordering_and_asymmetry(figures_runs):
    out, elapsed = figures_runs[2]
    maxima = {}
    for scheme in (1, 2, 3):
        col = read_column(out / f"fig4_scheme{scheme}.csv",
                          "abs_gamma_prime")
        assert col.size == 161
        maxima[scheme] = float(col.max())
    crossing = find_crossings(scheme_preset(3), (("H", "LP"), ("V", "LP")),
                              -0.5, 0.5, tol=1e-9).detunings[0]
    deltas = read_column(out / "fig4_scheme3.csv", "delta_cx_mev")
    curve3 = read_column(out / "fig4_scheme3.csv", "abs_gamma_prime")
    photon_side = curve3[deltas < crossing].mean()
    exciton_side = curve3[deltas > crossing].mean()
    print(f"maxima: scheme1 {maxima[1]:.7f}, scheme2 {maxima[2]:.7f}, "
          f"scheme3 {maxima[3]:.7f}; scheme-3 side means "
          f"{photon_side:.4f} (photon-like) vs {exciton_side:.4f}; "
          f"sweep run {elapsed:.1f} s")
    assert elapsed < 60.0
    assert maxima[3] < maxima[1]
    assert photon_side > exciton_side
    # Known shortfall: the upper-branch pairing of scheme 2 keeps more of
    # its coherence inside a 0.2 meV window than scheme 1 does, by more
    # than the 0.02 allowance.
    assert maxima[1] >= maxima[2] - 0.02, (
        f"scheme-1 max {maxima[1]:.7f} is below scheme-2 max "
        f"{maxima[2]:.7f} minus 0.02")


def test_criterion_07_peres_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240818)
    for i in range(1000):
        p_hh = rng.uniform(0.05, 0.95)
        mag = rng.uniform(0.0, 1.0) * math.sqrt(p_hh * (1.0 - p_hh))
        if i % 5 == 0:
            mag = 0.0
        phase = rng.uniform(0.0, 2.0 * math.pi)
        rho = x_state(p_hh, 1.0 - p_hh, mag * np.exp(1j * phase))
        rep = peres_test(rho)
        assert rep.entangled == (mag > 1e-10)

    worst_balanced = 0.0
    for _ in range(200):
        mag = rng.uniform(0.0, 0.5)
        rep = peres_test(x_state(0.5, 0.5, mag))
        worst_balanced = max(worst_balanced,
                             abs(rep.min_pt_eigenvalue - (-mag)))

    rho = x_state(0.5, 0.5, 0.5)
    best = -np.inf
    from scipy.optimize import minimize
    for start in [(0.1, 0.9, 0.3, -0.2), (0.0, math.pi / 4, 0.4, -0.4)]:
        r = minimize(lambda a: -chsh_value(rho, a), start,
                     method="Nelder-Mead",
                     options=dict(xatol=1e-12, fatol=1e-14, maxiter=20000))
        best = max(best, -r.fun)
    chsh_dev = abs(peres_test(rho).chsh_max - best)
    elapsed = time.perf_counter() - t0
    print(f"balanced PT dev {worst_balanced:.3e}, chsh vs oracle dev "
          f"{chsh_dev:.3e}, {elapsed:.2f} s")
    assert worst_balanced <= 1e-10
    assert chsh_dev <= 1e-9
    assert abs(best - 2.0 * math.sqrt(2.0)) <= 1e-9
    assert elapsed < 5.0


def test_criterion_08_four_resolved_peaks_with_coincident_pair():
    t0 = time.perf_counter()
    checks = []
    crossing = find_crossings(scheme_preset(3), (("H", "LP"), ("V", "LP")),
                              -0.5, 0.5, tol=1e-9).detunings[0]
    for scheme, delta, partner in ((2, 0.0, ("V", "UP")),
                                   (3, crossing, ("V", "LP"))):
        p = scheme_preset(scheme).with_detuning(delta)
        gamma_c = HBAR_MEV_PS / p.tau_c        # bare cavity linewidth
        chans = {(c.pol, c.branch): c for c in enumerate_channels(p)}
        lines = []
        for c in chans.values():
            lines.extend((c.photon1, c.photon2))
        grid = np.linspace(min(lines) - 0.5, max(lines) + 0.5, 40001)
        spec = pl_spectrum(p, grid)
        for pol, intensity in (("H", spec.intensity_h),
                               ("V", spec.intensity_v)):
            interior = ((intensity[1:-1] > intensity[:-2])
                        & (intensity[1:-1] > intensity[2:]))
            peaks = grid[1:-1][interior]
            assert peaks.size == 4, (scheme, pol, peaks)
            expected = sorted([chans[(pol, "LP")].photon1,
                               chans[(pol, "LP")].photon2,
                               chans[(pol, "UP")].photon1,
                               chans[(pol, "UP")].photon2])
            worst = np.max(np.abs(np.sort(peaks) - np.array(expected)))
            assert worst <= gamma_c / 10.0, (scheme, pol, worst)
            checks.append(worst)
        pair_gap = abs(chans[("H", "LP")].photon2
                       - chans[partner].photon2)
        assert pair_gap <= gamma_c / 10.0, (scheme, pair_gap)
        checks.append(pair_gap)
    elapsed = time.perf_counter() - t0
    print(f"worst peak/pair deviation {max(checks):.3e} meV "
          f"(allowance {gamma_c / 10.0:.3e}), {elapsed:.2f} s")
    assert elapsed < 2.0


def test_criterion_09_sampler_statistics():
    t0 = time.perf_counter()
    p = scheme_preset(1)
    rho = projected_state(p, "LP-LP", tracked_window(p, "LP-LP", 0.2))
    settings = [(0.0, 0.0), (0.0, math.pi / 8), (math.pi / 4, math.pi / 8),
                (math.pi / 4, -math.pi / 8), (0.0, math.pi / 4),
                (math.pi / 8, 0.0), (math.pi / 3, math.pi / 6),
                (-math.pi / 8, math.pi / 8)]
    n = 100000
    worst_z = 0.0
    for k, pair in enumerate(settings):
        prob = born_probabilities(rho, *pair)
        counts = sample_coincidences(rho, pair, n, seed=900 + k)
        sigma = np.sqrt(n * prob * (1.0 - prob))
        for idx in np.ndindex(2, 2):
            dev = abs(counts[idx] - n * prob[idx])
            if sigma[idx] == 0.0:
                assert dev == 0.0
            else:
                worst_z = max(worst_z, dev / sigma[idx])
    again = sample_coincidences(rho, settings[1], n, seed=901)
    assert np.array_equal(again,
                          sample_coincidences(rho, settings[1], n, seed=901))
    elapsed = time.perf_counter() - t0
    print(f"worst |z| over 8 settings {worst_z:.2f}, {elapsed:.2f} s")
    assert worst_z <= 3.0
    assert elapsed < 5.0


def test_criterion_10_figures_deterministic_across_worker_counts(figures_runs):
    out2, _ = figures_runs[2]
    out4, _ = figures_runs[4]
    names2 = sorted(f.name for f in out2.glob("*.csv"))
    names4 = sorted(f.name for f in out4.glob("*.csv"))
    assert names2 == names4 and len(names2) == 8
    differing = [name for name in names2
                 if (out2 / name).read_bytes() != (out4 / name).read_bytes()]
    print(f"{len(names2)} CSV files, {len(differing)} differing: {differing}")
    assert differing == []
