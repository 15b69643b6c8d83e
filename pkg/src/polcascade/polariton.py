"""Polariton eigenmodes of the exciton-cavity doublets.

Each linear polarization hosts an independent two-level exciton-photon
system; strong coupling splits it into lower (LP) and upper (UP) polariton
branches with Hopfield weights that set radiative linewidths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, ValidationError
from .model import BRANCHES, HBAR_MEV_PS, POLARIZATIONS, SystemParams


@dataclass(frozen=True)
class PolaritonState:
    """One polariton branch of one polarization."""

    pol: str          # "H" or "V"
    branch: str       # "LP" or "UP"
    energy: float     # meV
    x_ex: float       # exciton Hopfield amplitude, real >= 0
    x_ph: float       # photon Hopfield amplitude, real >= 0
    linewidth: float  # radiative half width x_ph^2 * hbar / tau_c, meV


@dataclass(frozen=True)
class PolaritonSet:
    """The four polariton states of a parameter set."""

    h_lp: PolaritonState
    h_up: PolaritonState
    v_lp: PolaritonState
    v_up: PolaritonState

    def get(self, pol: str, branch: str) -> PolaritonState:
        try:
            return getattr(self, f"{pol.lower()}_{branch.lower()}")
        except AttributeError:
            raise ValidationError(f"no state ({pol!r}, {branch!r})") from None

    def __iter__(self):
        return iter((self.h_lp, self.h_up, self.v_lp, self.v_up))


def _solve_branch_pair(pol: str, e_exc: float, e_cav: float, rabi: float,
                       tau_c: float) -> tuple[PolaritonState, PolaritonState]:
    mean = 0.5 * (e_exc + e_cav)
    delta = e_exc - e_cav
    r = math.hypot(delta, rabi)
    half = 0.5 * r
    dr = delta / r
    # LP photon fraction grows as the cavity mode dives below the exciton.
    x_ph2_lp = min(1.0, max(0.0, 0.5 * (1.0 + dr)))
    x_ex2_lp = min(1.0, max(0.0, 0.5 * (1.0 - dr)))
    states = []
    for branch, energy, x_ex2, x_ph2 in (
        ("LP", mean - half, x_ex2_lp, x_ph2_lp),
        ("UP", mean + half, x_ph2_lp, x_ex2_lp),
    ):
        states.append(PolaritonState(
            pol=pol, branch=branch, energy=energy,
            x_ex=math.sqrt(x_ex2), x_ph=math.sqrt(x_ph2),
            linewidth=x_ph2 * (HBAR_MEV_PS / tau_c),
        ))
    return states[0], states[1]


def solve_polaritons(params: SystemParams) -> PolaritonSet:
    """Diagonalize both polarization subsystems."""
    h_lp, h_up = _solve_branch_pair(
        "H", params.e_exciton("H"), params.e_cavity("H"), params.rabi, params.tau_c)
    v_lp, v_up = _solve_branch_pair(
        "V", params.e_exciton("V"), params.e_cavity("V"), params.rabi, params.tau_c)
    return PolaritonSet(h_lp=h_lp, h_up=h_up, v_lp=v_lp, v_up=v_up)


def exciton_cavity_detuning(params: SystemParams, pol: str) -> float:
    """Per-polarization detuning E_exc(pol) - E_cav(pol), meV."""
    return params.e_exciton(pol) - params.e_cavity(pol)


StatePair = tuple[tuple[str, str], tuple[str, str]]


def _check_pair(pair: StatePair, allow_same_pol: bool) -> StatePair:
    try:
        (pol_a, br_a), (pol_b, br_b) = pair
    except (TypeError, ValueError):
        raise ValidationError(f"pair must be ((pol, branch), (pol, branch)), got {pair!r}") from None
    for pol, br in ((pol_a, br_a), (pol_b, br_b)):
        if pol not in POLARIZATIONS or br not in BRANCHES:
            raise ValidationError(f"unknown state ({pol!r}, {br!r})")
    if pol_a == pol_b:
        if not allow_same_pol:
            raise ValidationError(
                "crossing search needs states of opposite polarization; "
                f"got {pol_a} twice (same-polarization branches never cross)")
        if br_a == br_b:
            raise ValidationError("pair must name two distinct states")
    return (pol_a, br_a), (pol_b, br_b)


def _gap_function(params: SystemParams, pair: StatePair):
    (pol_a, br_a), (pol_b, br_b) = pair

    def gap(delta_cx: float) -> float:
        states = solve_polaritons(params.with_detuning(delta_cx))
        return states.get(pol_a, br_a).energy - states.get(pol_b, br_b).energy

    return gap


def _check_range(lo: float, hi: float, tol: float) -> None:
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValidationError(f"need finite lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")


@dataclass(frozen=True)
class CrossingScan:
    """Result of a crossing search along the mode-exciton detuning axis."""

    detunings: tuple[float, ...]       # crossing positions, ascending
    identically_degenerate: bool       # gap stayed below tol over the scan


def find_crossings(params: SystemParams, pair: StatePair, lo: float, hi: float,
                   tol: float = 1e-9, scan_points: int = 401) -> CrossingScan:
    """Locate detunings where two polariton energies of opposite
    polarization coincide.

    A dense scan brackets sign changes of the gap; each bracket is refined
    by bisection until |gap| < tol.  If the gap never exceeds tol anywhere
    on the scan the pair is reported as identically degenerate instead.
    """
    pair = _check_pair(pair, allow_same_pol=False)
    _check_range(lo, hi, tol)
    n = max(int(scan_points), 401)
    gap = _gap_function(params, pair)
    xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    gs = [gap(x) for x in xs]
    if max(abs(g) for g in gs) < tol:
        return CrossingScan(detunings=(), identically_degenerate=True)
    roots = []
    for i in range(n - 1):
        ga, gb = gs[i], gs[i + 1]
        if ga == 0.0 and abs(ga) < tol:
            roots.append(xs[i])
            continue
        if ga * gb < 0:
            roots.append(_bisect(gap, xs[i], xs[i + 1], ga, tol))
    if gs[-1] == 0.0:
        roots.append(xs[-1])
    # Merge duplicates from roots landing on scan nodes.
    roots.sort()
    merged = []
    for r in roots:
        if not merged or r - merged[-1] > tol:
            merged.append(r)
    return CrossingScan(detunings=tuple(merged), identically_degenerate=False)


def _bisect(gap, a: float, b: float, ga: float, tol: float,
            max_iter: int = 200) -> float:
    mid = 0.5 * (a + b)
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        gm = gap(mid)
        if abs(gm) < tol:
            return mid
        if (ga < 0) == (gm < 0):
            a, ga = mid, gm
        else:
            b = mid
    raise ConvergenceError(
        f"bisection did not reach |gap| < {tol} in {max_iter} iterations",
        last_estimates=(a, b))


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    """Golden-section minimum of f on [a, b]."""
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    x = c if fc < fd else d
    return x, f(x)


def min_gap(params: SystemParams, pair: StatePair, lo: float, hi: float,
            tol: float = 1e-9, scan_points: int = 401) -> tuple[float, float]:
    """Detuning of closest approach and the |gap| there.

    Accepts same-polarization pairs too: an LP/UP pair of one polarization
    never crosses and its closest approach is the Rabi splitting.
    """
    pair = _check_pair(pair, allow_same_pol=True)
    _check_range(lo, hi, tol)
    n = max(int(scan_points), 401)
    gap = _gap_function(params, pair)
    xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    gs = [abs(gap(x)) for x in xs]
    i_best = min(range(n), key=gs.__getitem__)
    a = xs[max(0, i_best - 1)]
    b = xs[min(n - 1, i_best + 1)]
    x, g = _golden_min(lambda d: abs(gap(d)), a, b, xtol=max(tol, 1e-12))
    if gs[i_best] < g:
        return xs[i_best], gs[i_best]
    return x, g


@dataclass(frozen=True)
class AnticrossingRow:
    """Level structure at one detuning of an anticrossing sweep."""

    delta_cx: float
    energies: dict      # (pol, branch) -> meV
    x_ex2: dict         # (pol, branch) -> exciton fraction
    linewidths: dict    # (pol, branch) -> meV


def anticrossing_sweep(params: SystemParams, deltas) -> list[AnticrossingRow]:
    """Solve the four polariton states across a detuning grid.

    The grid must be strictly increasing; rows are bit-identical to calling
    solve_polaritons at each detuning.
    """
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise ValidationError("detuning grid is empty")
    for a, b in zip(deltas, deltas[1:]):
        if not b > a:
            raise ValidationError("detuning grid must be strictly increasing")
    rows = []
    for d in deltas:
        states = solve_polaritons(params.with_detuning(d))
        rows.append(AnticrossingRow(
            delta_cx=d,
            energies={(s.pol, s.branch): s.energy for s in states},
            x_ex2={(s.pol, s.branch): s.x_ex ** 2 for s in states},
            linewidths={(s.pol, s.branch): s.linewidth for s in states},
        ))
    return rows
