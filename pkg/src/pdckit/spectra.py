"""Joint spectral intensity of the photon pair and spectral-overlap sweeps.

The two-photon amplitude is evaluated in the collinear approximation along a
fixed pump direction:

    f(λ_s, λ_i) = α(λ_s, λ_i) · sinc(Δk_col L / 2) · F(λ_s) · F(λ_i)

with α the pump spectral amplitude at the energy-matched pump wavelength,
Δk_col the exact collinear scalar mismatch (fast pump → slow signal + fast
idler) from the Sellmeier indices, and F the filter amplitude profile.  The
headline "overlap" is the normalized cross-correlation (cosine similarity)
of the two marginal intensity spectra; the overlapping-area metric and the
amplitude-level exchange overlap are reported alongside.

Note the collinear mismatch is meaningful only near a collinear-matched pump
direction — for a biaxial crystal that means a point on the collinear
phase-matching curve, not an arbitrary axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import ValidationError
from .dispersion import CrystalDefinition
from .waveoptics import _unit, mode_indices

C_NM_PER_FS = 299.792458        # vacuum speed of light, nm/fs

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class PumpSpec:
    """Pulsed pump: gaussian spectral amplitude in frequency, FWHM given in
    wavelength at the center."""
    center_nm: float
    fwhm_nm: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.fwhm_nm <= 0:
            raise ValidationError("pump FWHM must be positive")
        if self.shape != "gaussian":
            raise ValidationError(f"unsupported pump shape {self.shape!r}")

    @property
    def fwhm_thz(self):
        return 1e3 * C_NM_PER_FS * self.fwhm_nm / self.center_nm ** 2


@dataclass(frozen=True)
class FilterSpec:
    """Bandpass filter; FWHM refers to the intensity transmission."""
    center_nm: float
    fwhm_nm: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.fwhm_nm <= 0:
            raise ValidationError("filter FWHM must be positive")
        if self.shape not in ("gaussian", "rectangular"):
            raise ValidationError(f"unsupported filter shape {self.shape!r}")

    def amplitude(self, lam_nm):
        x = (np.asarray(lam_nm, dtype=float) - self.center_nm) / self.fwhm_nm
        if self.shape == "gaussian":
            return np.exp(-2.0 * _LN2 * x * x)
        return (np.abs(x) <= 0.5).astype(float)


def coherence_time(filt: FilterSpec):
    """Transform-limited coherence time (fs) via the gaussian
    time-bandwidth relation τ_c = √(ln 2)/(π Δν)."""
    dnu_per_fs = C_NM_PER_FS * filt.fwhm_nm / filt.center_nm ** 2   # 1/fs
    return math.sqrt(_LN2) / (math.pi * dnu_per_fs)


def compensation_required(delta_T_fs, filt: FilterSpec):
    """True when the temporal walk-off exceeds the filter coherence time."""
    return delta_T_fs > coherence_time(filt)


@dataclass(frozen=True)
class JointSpectrum:
    lambda_s_nm: np.ndarray
    lambda_i_nm: np.ndarray
    intensity: np.ndarray           # (n, n), integrates to 1
    marginal_s: np.ndarray          # unit-normalized marginal spectra
    marginal_i: np.ndarray
    overlap: float                  # cosine similarity of the marginals
    min_overlap: float              # overlapping area of the marginals
    exchange_overlap: float         # |∬ f(s,i) f(i,s)| / ∬ |f|²
    aspect_ratio: float             # minor/major axis of the support
    L_mm: float


def _pump_amplitude(pump: PumpSpec, inv_lam_sum):
    """Gaussian amplitude at pump frequency ν = c·(1/λ_s + 1/λ_i)."""
    nu = C_NM_PER_FS * inv_lam_sum                  # 1/fs
    nu0 = C_NM_PER_FS / pump.center_nm
    dnu = C_NM_PER_FS * pump.fwhm_nm / pump.center_nm ** 2
    x = (nu - nu0) / dnu
    return np.exp(-2.0 * _LN2 * x * x)


def _collinear_dk(crystal, pump_dir, lam_s, lam_i):
    """Exact collinear scalar mismatch (rad/µm) on the (λ_s, λ_i) grid.

    Signal rides the slow branch, idler and pump the fast one.  The pump
    index is sampled exactly on a dense wavelength grid and interpolated,
    which keeps the full Sellmeier shape (no detuning expansion).
    """
    T = _unit(pump_dir)
    n_s = np.array([mode_indices(crystal, l, T)[1] for l in lam_s])
    n_i = np.array([mode_indices(crystal, l, T)[0] for l in lam_i])
    inv_sum = 1.0 / lam_s[:, None] + 1.0 / lam_i[None, :]
    lam_f = 1.0 / inv_sum
    lo, hi = float(lam_f.min()), float(lam_f.max())
    dense = np.linspace(lo - 0.1, hi + 0.1, 4096)
    n_f_dense = np.array([mode_indices(crystal, l, T)[0] for l in dense])
    n_f = CubicSpline(dense, n_f_dense)(lam_f)
    two_pi = 2.0 * math.pi * 1e3                    # nm → µm wavenumber scale
    return two_pi * (n_s[:, None] / lam_s[:, None]
                     + n_i[None, :] / lam_i[None, :]
                     - n_f * inv_sum)


def _aspect_ratio(lam_s, lam_i, intensity):
    w = intensity / intensity.sum()
    s_grid, i_grid = np.meshgrid(lam_s, lam_i, indexing="ij")
    mu_s = float((w * s_grid).sum())
    mu_i = float((w * i_grid).sum())
    ds, di = s_grid - mu_s, i_grid - mu_i
    cov = np.array([[(w * ds * ds).sum(), (w * ds * di).sum()],
                    [(w * ds * di).sum(), (w * di * di).sum()]])
    ev = np.linalg.eigvalsh(cov)
    return math.sqrt(max(ev[0], 0.0) / ev[1]) if ev[1] > 0 else math.nan


def joint_spectrum(crystal: CrystalDefinition, pump: PumpSpec, pump_dir,
                   L_mm, filt: FilterSpec, n_grid=512, span_nm=None,
                   signal_mode="slow", idler_mode="fast",
                   filter_on="amplitude") -> JointSpectrum:
    """Joint spectral intensity, marginals and overlap for one thickness.

    The common wavelength grid for both photons is centered on the filter
    and spans ± 3× the larger of the filter FWHM and the pump-implied
    down-converted width (pump FWHM stretched by the frequency-to-frequency
    lever arm (λ_dc/λ_p)²).
    """
    if L_mm <= 0:
        raise ValidationError("crystal thickness must be positive")
    if n_grid < 64:
        raise ValidationError(
            f"grid of {n_grid} points per axis is too coarse (minimum 64)")
    if filter_on not in ("amplitude", "intensity"):
        raise ValidationError(f"unknown filter application {filter_on!r}")
    if {signal_mode, idler_mode} != {"slow", "fast"}:
        raise ValidationError("one daughter must be slow and one fast")
    if span_nm is None:
        lever = (filt.center_nm / pump.center_nm) ** 2
        span_nm = 3.0 * max(pump.fwhm_nm * lever, filt.fwhm_nm)
    lam = np.linspace(filt.center_nm - span_nm, filt.center_nm + span_nm,
                      n_grid)

    dk = _collinear_dk(crystal, pump_dir, lam, lam)
    if signal_mode == "fast":
        # fast signal + slow idler: same physics mirrored across the diagonal
        dk = dk.T
    inv_sum = 1.0 / lam[:, None] + 1.0 / lam[None, :]
    L_um = float(L_mm) * 1e3
    f = _pump_amplitude(pump, inv_sum) * np.sinc(dk * L_um / 2.0 / math.pi)
    filt_amp = filt.amplitude(lam)
    if filter_on == "amplitude":
        f = f * filt_amp[:, None] * filt_amp[None, :]
        intensity = f * f
    else:
        trans = filt_amp * filt_amp
        intensity = f * f * trans[:, None] * trans[None, :]

    exch_num = float(abs((f * f.T).sum()))
    exch_den = float((f * f).sum())
    exchange = exch_num / exch_den if exch_den > 0 else math.nan

    total = np.trapezoid(np.trapezoid(intensity, lam, axis=1), lam)
    if total <= 0:
        raise ValidationError("joint spectrum vanishes on this grid")
    intensity = intensity / total
    s_s = np.trapezoid(intensity, lam, axis=1)
    s_i = np.trapezoid(intensity, lam, axis=0)
    norm = math.sqrt(float(np.trapezoid(s_s * s_s, lam))
                     * float(np.trapezoid(s_i * s_i, lam)))
    overlap = float(np.trapezoid(s_s * s_i, lam)) / norm
    min_overlap = float(np.trapezoid(np.minimum(s_s, s_i), lam))
    return JointSpectrum(
        lambda_s_nm=lam, lambda_i_nm=lam.copy(), intensity=intensity,
        marginal_s=s_s, marginal_i=s_i, overlap=overlap,
        min_overlap=min_overlap, exchange_overlap=exchange,
        aspect_ratio=_aspect_ratio(lam, lam, intensity), L_mm=float(L_mm))


def overlap_vs_thickness(crystal: CrystalDefinition, pump: PumpSpec, pump_dir,
                         L_list_mm, filt: FilterSpec, **grid_kwargs):
    """Rows of {L_mm, overlap, exchange_overlap} per requested thickness."""
    rows = []
    for L in L_list_mm:
        js = joint_spectrum(crystal, pump, pump_dir, L, filt, **grid_kwargs)
        rows.append({"L_mm": float(L), "overlap": js.overlap,
                     "exchange_overlap": js.exchange_overlap})
    return rows


def overlap_vs_filter(crystal: CrystalDefinition, pump: PumpSpec, pump_dir,
                      fwhm_list_nm, L_mm=2.0, filter_center_nm=None,
                      filter_shape="gaussian", **grid_kwargs):
    """Rows of {filter_fwhm_nm, overlap, exchange_overlap} per bandwidth."""
    rows = []
    for fwhm in fwhm_list_nm:
        center = (filter_center_nm if filter_center_nm is not None
                  else 2.0 * pump.center_nm)
        filt = FilterSpec(center, float(fwhm), filter_shape)
        js = joint_spectrum(crystal, pump, pump_dir, L_mm, filt, **grid_kwargs)
        rows.append({"filter_fwhm_nm": float(fwhm), "overlap": js.overlap,
                     "exchange_overlap": js.exchange_overlap})
    return rows
