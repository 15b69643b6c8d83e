"""Two-photon wave packets, windowed overlaps, and polarization coherence.

Each cascade channel emits a two-photon packet whose amplitude is a double
Lorentzian in (k1 + k2, k2).  The degree of polarization entanglement is a
ratio of packet overlaps: over all space for the unprojected coherence, or
over a detector window for the spectrally filtered one.

Window integrals run in rotated coordinates u = k1 + k2, v = k2.  The
u-integral has a closed form (the u-ridge is only ~1e-3 meV wide, far too
narrow for a fixed grid); the v-integral uses adaptive Gauss-Legendre
panels seeded around every pole and ridge-edge location.  All panel sets
and reduction orders are fixed by the inputs, so results are reproducible
bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cascade import CascadeChannel, enumerate_channels
from .errors import ConvergenceError, EmptyWindowError, ValidationError
from .model import SystemParams

TWO_PI = 2.0 * math.pi

# (pol, branch) labels correlated by each pairing; the LP-UP pairing takes
# the upper branch on the V side.
_PAIRINGS = {
    "LP-LP": (("H", "LP"), ("V", "LP")),
    "UP-UP": (("H", "UP"), ("V", "UP")),
    "LP-UP": (("H", "LP"), ("V", "UP")),
}


def normalize_pairing(pairing: str) -> str:
    """Canonical pairing key: LP-LP, UP-UP or LP-UP."""
    key = str(pairing).replace("–", "-").replace("_", "-").upper()
    if key not in _PAIRINGS:
        raise ValidationError(
            f"unknown pairing {pairing!r}; expected one of LP-LP, UP-UP, LP-UP")
    return key


def pairing_channels(channels, pairing: str) -> tuple[CascadeChannel, CascadeChannel]:
    """The (H-side, V-side) channels correlated by a pairing."""
    key = normalize_pairing(pairing)
    by_label = {(c.pol, c.branch): c for c in channels}
    label_a, label_b = _PAIRINGS[key]
    return by_label[label_a], by_label[label_b]


@dataclass(frozen=True)
class DetectorWindow:
    """Square spectral acceptance window for the photon pair."""

    center1: float  # first-photon window center, meV
    center2: float  # second-photon window center, meV
    width: float    # FULL width; acceptance is center +- width/2, meV

    def __post_init__(self):
        for name in ("center1", "center2", "width"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValidationError(f"{name} must be finite, got {v!r}")
        if self.width <= 0:
            raise ValidationError(f"width must be > 0, got {self.width!r}")
        # Photon energies are positive; a window reaching k <= 0 is unphysical.
        if self.center1 - self.width / 2 <= 0 or self.center2 - self.width / 2 <= 0:
            raise ValidationError("window extends to non-positive photon energy")

    @property
    def k1_interval(self) -> tuple[float, float]:
        return (self.center1 - self.width / 2, self.center1 + self.width / 2)

    @property
    def k2_interval(self) -> tuple[float, float]:
        return (self.center2 - self.width / 2, self.center2 + self.width / 2)


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the adaptive v-integration."""

    base_nodes: int = 16       # Gauss-Legendre nodes per panel
    rel_tol: float = 1e-9      # relative convergence target
    max_refinements: int = 30  # panel-splitting passes before giving up

    def __post_init__(self):
        if not (isinstance(self.base_nodes, int) and self.base_nodes >= 8):
            raise ValidationError(
                f"base_nodes must be an integer >= 8, got {self.base_nodes!r}")
        if not (isinstance(self.rel_tol, (int, float))
                and math.isfinite(self.rel_tol) and self.rel_tol > 0):
            raise ValidationError(f"rel_tol must be > 0, got {self.rel_tol!r}")
        if not (isinstance(self.max_refinements, int) and self.max_refinements >= 1):
            raise ValidationError(
                f"max_refinements must be an integer >= 1, got {self.max_refinements!r}")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class PairCoherence:
    """Off-diagonal HH-VV coherence of a filtered photon pair."""

    gamma: complex                       # cross overlap over summed self overlaps
    channel_norms: dict = field(default_factory=dict)  # windowed self overlap per "pol:branch"
    pairing: str = ""

    def __post_init__(self):
        # Cauchy-Schwarz on the cross term plus AM-GM on the denominator.
        if abs(self.gamma) > 0.5 + 1e-9:
            raise ValidationError(
                f"|gamma| = {abs(self.gamma)!r} exceeds the 1/2 bound")
        for label, norm in self.channel_norms.items():
            if norm < 0:
                raise ValidationError(f"negative channel norm for {label}")


def _amp_prefactor(ch: CascadeChannel) -> float:
    s = ch.intermediate
    return s.x_ex * s.x_ph * math.sqrt(ch.xx_total_width * s.linewidth) / TWO_PI


def amplitude(ch: CascadeChannel, k1: float, k2: float) -> complex:
    """Two-photon amplitude of one channel at photon energies (k1, k2)."""
    if k1 <= 0 or k2 <= 0:
        raise ValidationError(f"photon energies must be positive, got {(k1, k2)!r}")
    pref = _amp_prefactor(ch)
    if pref == 0.0:
        return 0j
    eps_xx = ch.e_xx - 1j * ch.xx_total_width
    eps_pol = ch.intermediate.energy - 1j * ch.intermediate.linewidth
    return pref / ((k1 + k2 - eps_xx) * (k2 - eps_pol))


def window_value(w: DetectorWindow, k1: float, k2: float) -> int:
    """1 inside the closed acceptance rectangle, else 0."""
    half = w.width / 2
    inside = abs(k1 - w.center1) <= half and abs(k2 - w.center2) <= half
    return 1 if inside else 0


_GL_CACHE: dict = {}


def _gl_nodes(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _eval_panels(f, panels, n):
    """Gauss-Legendre value of f on each (a, b) panel, one batched call."""
    xs, ws = _gl_nodes(n)
    a = np.array([p[0] for p in panels])
    b = np.array([p[1] for p in panels])
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * xs[None, :]).ravel()
    vals = np.asarray(f(nodes)).reshape(len(panels), n)
    return np.sum(vals * ws[None, :], axis=1) * half


def _adaptive_gl(f, lo, hi, seeds, quad: QuadratureSpec) -> complex:
    """Integrate f over [lo, hi] to quad.rel_tol by panel bisection.

    Panels stay sorted and sums run in panel order, so the result is a pure
    function of (f, lo, hi, seeds, quad).
    """
    span = hi - lo
    cuts = sorted({float(lo), float(hi), *(float(s) for s in seeds if lo < s < hi)})
    bounds = [cuts[0]]
    for c in cuts[1:]:
        if c - bounds[-1] > 1e-13 * span:
            bounds.append(c)
    if len(bounds) < 2:
        bounds = [lo, hi]
    bounds[-1] = hi
    panels = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    n = quad.base_nodes
    coarse = list(_eval_panels(f, panels, n))
    fine = list(_eval_panels(f, panels, 2 * n))
    prev = None
    total = complex(sum(fine))
    for _ in range(quad.max_refinements + 1):
        total = complex(sum(fine))
        errs = [abs(fi - ci) for fi, ci in zip(fine, coarse)]
        tol = quad.rel_tol * max(abs(total), 1e-300)
        if sum(errs) <= tol:
            return total
        cut = tol / (2 * len(panels))
        split = [i for i, e in enumerate(errs)
                 if e > cut and panels[i][0] < 0.5 * (panels[i][0] + panels[i][1]) < panels[i][1]]
        if not split:
            # Every offending panel is at float resolution; no progress possible.
            break
        children = []
        for i in split:
            a0, b0 = panels[i]
            m = 0.5 * (a0 + b0)
            children.append((a0, m))
            children.append((m, b0))
        ccoarse = list(_eval_panels(f, children, n))
        cfine = list(_eval_panels(f, children, 2 * n))
        split_set = set(split)
        new_panels, new_coarse, new_fine = [], [], []
        j = 0
        for i, p in enumerate(panels):
            if i in split_set:
                new_panels += children[2 * j:2 * j + 2]
                new_coarse += ccoarse[2 * j:2 * j + 2]
                new_fine += cfine[2 * j:2 * j + 2]
                j += 1
            else:
                new_panels.append(p)
                new_coarse.append(coarse[i])
                new_fine.append(fine[i])
        panels, coarse, fine = new_panels, new_coarse, new_fine
        prev = total
    raise ConvergenceError(
        "window overlap quadrature did not converge "
        f"(rel_tol={quad.rel_tol}, panels={len(panels)})",
        last_estimates=(prev, complex(sum(fine))))


def _kernel_args(ch_a: CascadeChannel, ch_b: CascadeChannel):
    """Pole parameters of conj(amplitude_a) * amplitude_b for the kernels."""
    return (ch_a.e_xx, ch_a.xx_total_width,
            ch_b.e_xx, ch_b.xx_total_width,
            ch_a.intermediate.energy, ch_a.intermediate.linewidth,
            ch_b.intermediate.energy, ch_b.intermediate.linewidth,
            _amp_prefactor(ch_a) * _amp_prefactor(ch_b))


def _seed_points(lo, hi, features):
    """Geometric ladders of panel boundaries around each (center, scale)."""
    span = hi - lo
    pts = []
    for center, scale in features:
        if scale <= 0 or not math.isfinite(scale):
            continue
        pts.append(center)
        step = scale
        while step < span:
            pts.append(center - step)
            pts.append(center + step)
            step *= 8.0
    return [p for p in pts if lo < p < hi]


def _overlap_box(ch_a, ch_b, k1_lo, k1_hi, k2_lo, k2_hi,
                 quad: QuadratureSpec) -> complex:
    """conj(amplitude_a) * amplitude_b integrated over an open box."""
    args = _kernel_args(ch_a, ch_b)
    if args[-1] == 0.0 or k1_hi <= k1_lo or k2_hi <= k2_lo:
        return 0j
    exx_a, gxx_a, exx_b, gxx_b, e_a, g_a, e_b, g_b, _ = args
    features = [
        (e_a, g_a), (e_b, g_b),
        # v values where a u-interval edge crosses the biexciton ridge;
        # the closed-form u-factor has an arctan step of width gxx there.
        (exx_a - k1_lo, gxx_a), (exx_a - k1_hi, gxx_a),
        (exx_b - k1_lo, gxx_b), (exx_b - k1_hi, gxx_b),
    ]
    seeds = _seed_points(k2_lo, k2_hi, features)

    def f(v):
        return kernels.overlap_integrand(v, k1_lo, k1_hi, *args)

    return _adaptive_gl(f, k2_lo, k2_hi, seeds, quad)


def windowed_overlap(ch_a: CascadeChannel, ch_b: CascadeChannel,
                     w: DetectorWindow,
                     quad: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """Window integral of conj(amplitude_a) * amplitude_b."""
    k1_lo, k1_hi = w.k1_interval
    k2_lo, k2_hi = w.k2_interval
    return _overlap_box(ch_a, ch_b, k1_lo, k1_hi, k2_lo, k2_hi, quad)


def brute_force_overlap(ch_a: CascadeChannel, ch_b: CascadeChannel,
                        w: DetectorWindow, n: int = 4000) -> complex:
    """Midpoint-rule cross check of windowed_overlap on an n x n grid."""
    if not (isinstance(n, int) and n >= 2):
        raise ValidationError(f"n must be an integer >= 2, got {n!r}")
    args = _kernel_args(ch_a, ch_b)
    if args[-1] == 0.0:
        return 0j
    k1_lo, k1_hi = w.k1_interval
    k2_lo, k2_hi = w.k2_interval
    return complex(kernels.midpoint_overlap(
        k1_lo, k1_hi, n, k2_lo, k2_hi, n, *args))


def gamma_prime_from_channels(ch_a: CascadeChannel, ch_b: CascadeChannel,
                              w: DetectorWindow,
                              quad: QuadratureSpec = DEFAULT_QUAD,
                              pairing: str = "") -> PairCoherence:
    """Filtered coherence of two explicit channels (synthetic-state entry)."""
    self_a = windowed_overlap(ch_a, ch_a, w, quad).real
    self_b = windowed_overlap(ch_b, ch_b, w, quad).real
    if self_a + self_b < 1e-300:
        raise EmptyWindowError("empty window: no emission inside the acceptance")
    cross = windowed_overlap(ch_a, ch_b, w, quad)
    label = pairing or f"{ch_a.branch}-{ch_b.branch}"
    return PairCoherence(
        gamma=cross / (self_a + self_b),
        channel_norms={
            f"{ch_a.pol}:{ch_a.branch}": self_a,
            f"{ch_b.pol}:{ch_b.branch}": self_b,
        },
        pairing=label)


def gamma_prime(params: SystemParams, pairing: str, w: DetectorWindow,
                quad: QuadratureSpec = DEFAULT_QUAD) -> PairCoherence:
    """Filtered polarization coherence for a branch pairing of the cascade."""
    key = normalize_pairing(pairing)
    ch_a, ch_b = pairing_channels(enumerate_channels(params), key)
    return gamma_prime_from_channels(ch_a, ch_b, w, quad, pairing=key)


def _branch_box(ch_h: CascadeChannel, ch_v: CascadeChannel, n_halfwidths: float):
    """Box covering +-N combined half-widths of one branch's H and V lines."""
    gu = ch_h.xx_total_width + ch_v.xx_total_width
    gv = ch_h.intermediate.linewidth + ch_v.intermediate.linewidth
    s1 = n_halfwidths * (gu + gv)
    s2 = n_halfwidths * gv
    k1_lo = min(ch_h.photon1, ch_v.photon1) - s1
    k1_hi = max(ch_h.photon1, ch_v.photon1) + s1
    k2_lo = min(ch_h.photon2, ch_v.photon2) - s2
    k2_hi = max(ch_h.photon2, ch_v.photon2) + s2
    return (k1_lo, k1_hi, k2_lo, k2_hi)


def _outside_fraction(ch: CascadeChannel, box) -> float:
    """Upper bound on the fraction of a channel's norm outside a box.

    Uses the axis-aligned (u, v) core contained in the sheared image of the
    box, where the squared amplitude factorizes into two Lorentzians.
    """
    k1_lo, k1_hi, k2_lo, k2_hi = box
    u_lo = k1_lo + k2_hi
    u_hi = k1_hi + k2_lo
    gxx = ch.xx_total_width
    e = ch.intermediate.energy
    g = ch.intermediate.linewidth
    if u_hi <= u_lo or gxx <= 0 or g <= 0:
        return 1.0
    cov_u = (math.atan((u_hi - ch.e_xx) / gxx)
             - math.atan((u_lo - ch.e_xx) / gxx)) / math.pi
    cov_v = (math.atan((k2_hi - e) / g) - math.atan((k2_lo - e) / g)) / math.pi
    return 1.0 - cov_u * cov_v


def channel_norm(ch: CascadeChannel) -> float:
    """All-space norm of one channel's packet, x_ex^2 x_ph^2 / 4."""
    s = ch.intermediate
    return (s.x_ex ** 2 * s.x_ph ** 2) / 4.0


def gamma_unprojected(params: SystemParams,
                      quad: QuadratureSpec = DEFAULT_QUAD,
                      start_halfwidths: float = 200.0) -> complex:
    """Unfiltered polarization coherence: branch-diagonal H-V overlaps.

    The all-space integrals are truncated to boxes of +-N combined
    half-widths.  N starts at start_halfwidths and grows until the
    Cauchy-Schwarz bound on every neglected cross tail drops below
    quad.rel_tol of the total norm; self terms get the analytic Lorentzian
    tail added back.
    """
    channels = {(c.pol, c.branch): c for c in enumerate_channels(params)}
    norms = {key: channel_norm(ch) for key, ch in channels.items()}
    n_total = ((norms[("H", "LP")] + norms[("V", "LP")])
               + (norms[("H", "UP")] + norms[("V", "UP")]))
    if n_total <= 0:
        raise ValidationError("all channel norms vanished")
    n_hw = max(float(start_halfwidths), 8.0)
    for _ in range(64):
        boxes = {}
        bound = 0.0
        for branch in ("LP", "UP"):
            ch_h = channels[("H", branch)]
            ch_v = channels[("V", branch)]
            box = _branch_box(ch_h, ch_v, n_hw)
            boxes[branch] = box
            pair_norm = norms[("H", branch)] * norms[("V", branch)]
            if pair_norm > 0:
                bound += math.sqrt(norms[("H", branch)] * _outside_fraction(ch_h, box)
                                   * norms[("V", branch)] * _outside_fraction(ch_v, box))
        if bound <= quad.rel_tol * n_total:
            break
        n_hw *= 8.0
    else:
        raise ConvergenceError(
            "could not bound the cross-overlap tails below rel_tol")
    cross = 0j
    self_sum = 0.0
    for branch in ("LP", "UP"):
        ch_h = channels[("H", branch)]
        ch_v = channels[("V", branch)]
        box = boxes[branch]
        cross += _overlap_box(ch_h, ch_v, *box, quad)
        for ch in (ch_h, ch_v):
            norm = norms[(ch.pol, ch.branch)]
            if norm == 0:
                continue
            truncated = _overlap_box(ch, ch, *box, quad).real
            self_sum += truncated + norm * _outside_fraction(ch, box)
    return complex(cross / self_sum)
