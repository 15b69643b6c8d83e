"""Radiative cascade channels and polarization-resolved emission spectra.

The biexciton decays through either polariton branch of either linear
polarization, emitting a photon pair: first the biexciton-to-polariton
photon, then the polariton-to-ground photon.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import HBAR_MEV_PS, SystemParams
from .polariton import PolaritonState, solve_polaritons


@dataclass(frozen=True)
class CascadeChannel:
    """One decay path biexciton -> polariton -> ground."""

    pol: str                       # "H" or "V"
    branch: str                    # "LP" or "UP"
    intermediate: PolaritonState
    photon1: float                 # biexciton-transition photon energy, meV
    photon2: float                 # polariton-transition photon energy, meV
    amp: float                     # branching amplitude, real >= 0, sum of squares = 1
    xx_channel_width: float        # this channel's share of the biexciton width, meV
    xx_total_width: float          # total biexciton half width, meV

    @property
    def e_xx(self) -> float:
        """Biexciton energy recovered from energy conservation."""
        return self.photon1 + self.photon2


def _paired_photon_energies(e_xx: float, e_pol: float) -> tuple[float, float]:
    # Pair the two photon energies so their float sum reproduces e_xx
    # exactly; photon2 may shift from e_pol by at most 1 ulp.
    p2 = e_pol
    p1 = e_xx - p2
    for _ in range(10):
        if p1 + p2 == e_xx:
            return p1, p2
        p2 = e_xx - p1
        p1 = e_xx - p2
    return p1, p2


def enumerate_channels(params: SystemParams,
                       per_channel_xx_width: bool = False) -> list[CascadeChannel]:
    """The four cascade channels in (H,LP), (H,UP), (V,LP), (V,UP) order.

    Branching weights follow the product of the exciton fraction feeding
    the first transition and the photon fraction feeding the second;
    amplitudes are normalized so the squares sum to one.

    per_channel_xx_width assigns each channel's own share of the biexciton
    width to its two-photon resonance instead of the total width.
    """
    states = solve_polaritons(params)
    e_xx = params.e_biexciton
    unit = HBAR_MEV_PS / params.tau_xx
    raw = {}
    widths = {}
    for s in states:
        raw[(s.pol, s.branch)] = (s.x_ex ** 2 * s.x_ph ** 2) / 4.0
        widths[(s.pol, s.branch)] = s.x_ex ** 2 * unit
    # Pairwise sums keep H/V relabeling bit-exact under a sign flip of
    # both splittings.
    total = ((raw[("H", "LP")] + raw[("V", "LP")])
             + (raw[("H", "UP")] + raw[("V", "UP")]))
    if total <= 0:
        raise ValidationError("all branching weights vanished")
    xx_total = ((widths[("H", "LP")] + widths[("V", "LP")])
                + (widths[("H", "UP")] + widths[("V", "UP")]))
    channels = []
    for s in (states.h_lp, states.h_up, states.v_lp, states.v_up):
        key = (s.pol, s.branch)
        p1, p2 = _paired_photon_energies(e_xx, s.energy)
        channels.append(CascadeChannel(
            pol=s.pol, branch=s.branch, intermediate=s,
            photon1=p1, photon2=p2,
            amp=np.sqrt(raw[key] / total),
            xx_channel_width=widths[key],
            xx_total_width=widths[key] if per_channel_xx_width else xx_total,
        ))
    return channels


def gamma_xx_total(params: SystemParams) -> float:
    """Total biexciton half width: sum of the four channel widths, meV."""
    return enumerate_channels(params)[0].xx_total_width


@dataclass(frozen=True)
class Spectrum:
    """Emission intensity per polarization on a shared energy grid."""

    energy_grid: np.ndarray
    intensity_h: np.ndarray
    intensity_v: np.ndarray
    reference: str  # "absolute" or "relative_to_ex_mean"

    def to_csv(self, path) -> None:
        write_spectrum_csv(path, self)


def _lorentzian(grid: np.ndarray, center: float, halfwidth: float) -> np.ndarray:
    # Unit-area line; halfwidth is the HWHM.
    return (halfwidth / np.pi) / ((grid - center) ** 2 + halfwidth ** 2)


def _validate_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValidationError("energy grid must be a 1-d array of >= 2 points")
    if not np.all(np.isfinite(grid)):
        raise ValidationError("energy grid contains non-finite values")
    steps = np.diff(grid)
    if not np.all(steps > 0):
        raise ValidationError("energy grid must be strictly increasing")
    if np.min(steps) < 1e-12:
        raise ValidationError("energy grid points closer than 1e-12 meV")
    return grid


def pl_spectrum(params: SystemParams, energy_grid,
                reference: str = "absolute") -> Spectrum:
    """Luminescence spectrum of the full cascade.

    Each channel contributes two unit-area Lorentzians weighted by its
    branching probability: the biexciton line broadened by both the total
    biexciton width and the polariton width, and the polariton line with
    the polariton width alone.
    """
    if reference not in ("absolute", "relative_to_ex_mean"):
        raise ValidationError(
            f"reference must be 'absolute' or 'relative_to_ex_mean', got {reference!r}")
    grid = _validate_grid(energy_grid)
    offset = params.ex_mean if reference == "relative_to_ex_mean" else 0.0
    channels = enumerate_channels(params)
    out = {"H": np.zeros_like(grid), "V": np.zeros_like(grid)}
    for ch in channels:
        w = ch.amp ** 2
        g1 = ch.xx_total_width + ch.intermediate.linewidth
        g2 = ch.intermediate.linewidth
        acc = out[ch.pol]
        acc += w * _lorentzian(grid, ch.photon1 - offset, g1)
        acc += w * _lorentzian(grid, ch.photon2 - offset, g2)
    return Spectrum(energy_grid=grid, intensity_h=out["H"],
                    intensity_v=out["V"], reference=reference)


def channel_table(params: SystemParams) -> dict:
    """JSON-friendly summary of the four channels."""
    channels = enumerate_channels(params)
    rows = []
    for ch in channels:
        rows.append({
            "pol": ch.pol,
            "branch": ch.branch,
            "energy_mev": ch.intermediate.energy,
            "photon1_mev": ch.photon1,
            "photon2_mev": ch.photon2,
            "amp2": ch.amp ** 2,
            "x_ex2": ch.intermediate.x_ex ** 2,
            "x_ph2": ch.intermediate.x_ph ** 2,
            "linewidth_mev": ch.intermediate.linewidth,
            "xx_channel_width_mev": ch.xx_channel_width,
        })
    return {
        "e_xx_mev": params.e_biexciton,
        "gamma_xx_total_mev": channels[0].xx_total_width,
        "channels": rows,
    }


def write_spectrum_csv(path, spectrum: Spectrum, header_lines=()) -> None:
    """Write energy_mev,intensity_H,intensity_V rows (repr formatting)."""
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("energy_mev,intensity_H,intensity_V\n")
        for e, ih, iv in zip(spectrum.energy_grid, spectrum.intensity_h,
                             spectrum.intensity_v):
            fh.write(f"{float(e)!r},{float(ih)!r},{float(iv)!r}\n")
