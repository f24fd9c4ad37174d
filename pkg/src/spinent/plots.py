"""Figure rendering for the CLI report paths.

Each renderer takes the already-computed CSV rows (lists of dicts keyed by
column name) and writes PNG files into a directory, returning the paths.
Figures are a convenience view of the delimited output, never a substitute
for it; the CSV stays byte-deterministic regardless of plotting.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_xy_sweep", "render_xy_tc", "render_ed", "render_mf_aff"]

# strip the library version stamp so repeated renders agree byte-for-byte
_PNG_META = {"Software": None}


def _save(fig, outdir: str, name: str) -> str:
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)
    return path


def _grouped(rows, key):
    order = []
    groups = {}
    for row in rows:
        k = row[key]
        if k not in groups:
            groups[k] = []
            order.append(k)
        groups[k].append(row)
    return [(k, groups[k]) for k in order]


def render_xy_sweep(rows, outdir: str) -> list:
    """Concurrence and entanglement indicator versus temperature, one line per field."""
    fig, (ax_c, ax_phi) = plt.subplots(1, 2, figsize=(9.0, 3.6), constrained_layout=True)
    for h, grp in _grouped(rows, "h"):
        ts = [r["T"] for r in grp]
        ax_c.plot(ts, [r["C"] for r in grp], label=f"h = {h:g}")
        ax_phi.plot(ts, [r["Phi"] for r in grp], label=f"h = {h:g}")
    ax_phi.axhline(0.0, color="0.6", lw=0.8, zorder=0)
    ax_c.set_xlabel("T")
    ax_c.set_ylabel("concurrence C")
    ax_phi.set_xlabel("T")
    ax_phi.set_ylabel("indicator $\\Phi$")
    ax_c.legend(fontsize=8)
    return [_save(fig, outdir, "xy_sweep.png")]


def render_xy_tc(entries, outdir: str) -> list:
    """Critical temperature versus field; entries are (h, tc-or-None)."""
    solved = [(h, tc) for h, tc in entries if tc is not None]
    fig, ax = plt.subplots(figsize=(4.6, 3.4), constrained_layout=True)
    if solved:
        hs, tcs = zip(*solved)
        ax.plot(hs, tcs, "o-")
    ax.set_xlabel("h")
    ax.set_ylabel("$T_c$")
    return [_save(fig, outdir, "xy_tc.png")]


def render_ed(rows, outdir: str) -> list:
    """Per-bond concurrence versus temperature for a finite chain."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6), constrained_layout=True)
    for bond, grp in _grouped(rows, "bond"):
        ax.plot([r["T"] for r in grp], [r["C"] for r in grp], label=f"bond {bond}")
    ax.set_xlabel("T")
    ax.set_ylabel("concurrence C")
    if len({r["bond"] for r in rows}) <= 13:
        ax.legend(fontsize=7, ncol=2)
    return [_save(fig, outdir, "ed_concurrence.png")]


def render_mf_aff(rows, outdir: str) -> list:
    """Mean-field intracell and intercell concurrences versus temperature."""
    fig, (ax_a, ax_f) = plt.subplots(1, 2, figsize=(9.0, 3.6), constrained_layout=True)
    for h, grp in _grouped(rows, "h"):
        ts = [r["T"] for r in grp]
        ax_a.plot(ts, [r["Ca"] for r in grp], label=f"h = {h:g}")
        ax_f.plot(ts, [r["Cf"] for r in grp], label=f"h = {h:g}")
    ax_a.set_xlabel("T")
    ax_a.set_ylabel("$C_a$")
    ax_f.set_xlabel("T")
    ax_f.set_ylabel("$C_f$")
    ax_a.legend(fontsize=8)
    return [_save(fig, outdir, "mf_aff.png")]
