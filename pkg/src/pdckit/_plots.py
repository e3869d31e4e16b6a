"""Figure rendering for the reproduction report.

Only the report command draws; every other subcommand emits delimited data
for external plotters.  Uses the Agg backend so it works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .phasematch import stereographic_project


def _uv(dirs):
    pts = [stereographic_project(d) for d in dirs]
    return np.array([p.u for p in pts]), np.array([p.v for p in pts])


def cone_figure(path, geometry, pump_dir):
    """Stereographic view of both emission cones with their crossings."""
    slow, fast = geometry.cones
    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    for cone, color in ((slow, "tab:red"), (fast, "tab:blue")):
        u, v = _uv(cone.external)
        ax.plot(u, v, ".", ms=2.0, color=color,
                label="%s cone (r=%.2f deg)" % (cone.polarization, cone.angular_radius_deg))
    for x, marker in zip(geometry.intersections, ("x1", "x2")):
        u, v = _uv([x])
        ax.plot(u, v, "k*", ms=11)
        ax.annotate(marker, (u[0], v[0]), textcoords="offset points", xytext=(5, 5))
    u, v = _uv([pump_dir])
    ax.plot(u, v, "k+", ms=10, label="pump direction")
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    ax.set_title("emission cones, stereographic projection\n"
                 "separation %.2f deg, crossing %.1f deg"
                 % (geometry.separation_deg, geometry.crossing_angle_deg))
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def spectrum_figure(path, js, title):
    """Joint spectral intensity with the two marginals alongside."""
    fig, (ax, axm) = plt.subplots(
        1, 2, figsize=(9.0, 4.0), gridspec_kw={"width_ratios": [1.15, 1.0]})
    ax.pcolormesh(js.lambda_s_nm, js.lambda_i_nm, js.intensity.T,
                  shading="auto", cmap="inferno")
    ax.set_xlabel("signal wavelength (nm)")
    ax.set_ylabel("idler wavelength (nm)")
    ax.set_title(title)
    ax.set_aspect("equal")
    axm.plot(js.lambda_s_nm, js.marginal_s, label="signal marginal")
    axm.plot(js.lambda_i_nm, js.marginal_i, "--", label="idler marginal")
    axm.set_xlabel("wavelength (nm)")
    axm.set_ylabel("spectral density (1/nm)")
    axm.set_title("overlap %.1f%%, aspect %.2f" % (100 * js.overlap, js.aspect_ratio))
    axm.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def overlap_figure(path, thickness_tables, filter_table):
    """Overlap against crystal thickness (per crystal) and filter width."""
    fig, (axl, axf) = plt.subplots(1, 2, figsize=(9.0, 3.8))
    for label, rows in thickness_tables.items():
        axl.plot([r["L_mm"] for r in rows], [100 * r["overlap"] for r in rows],
                 "o-", label=label)
    axl.set_xlabel("crystal thickness (mm)")
    axl.set_ylabel("spectral overlap (%)")
    axl.legend(fontsize=8)
    axf.plot([r["filter_fwhm_nm"] for r in filter_table],
             [100 * r["overlap"] for r in filter_table], "s-")
    axf.set_xlabel("filter FWHM (nm)")
    axf.set_ylabel("spectral overlap (%)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
