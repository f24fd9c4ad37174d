"""Command line: parameter sweeps, critical-temperature solves, witness checks.

Subcommands
-----------
xy-sweep   exact XY-chain observables over a (t, h) grid        -> CSV
xy-tc      critical temperature per field + independence report -> text
witness    entanglement verdict from measured (U, M, N, J, h)   -> text
ed         exact-diagonalization thermal sweep of a finite chain-> CSV
mf-aff     mean-field sweep of the alternating AF-F chain       -> CSV

Every option can also be supplied through ``--config file.yaml`` (a flat
mapping using the long option names with underscores); explicit flags win.
Grids are written ``lo:hi:n`` (inclusive linspace) or ``a,b,c``.  CSV goes
to stdout or ``--output``, with full-precision round-trip formatting and LF
endings; repeated runs of the same configuration are byte-identical.
``--plot DIR`` additionally renders figures next to the delimited output.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 invariant
violation (including an exceeded field-independence tolerance).  The
``SPINENT_WORKERS`` environment variable caps the worker pool (default:
available parallelism).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import yaml

from .ed import (
    FiniteChainSpec,
    alternating_chain_spec,
    bond_concurrence,
    thermal_expectations,
    xy_chain_spec,
)
from .meanfield import (
    AlternatingParams,
    MeanFieldState,
    mf_concurrences,
    self_consistent_solve,
)
from .numerics import BracketError, ConvergenceError
from .pairwise import InvalidStateError, xstate_concurrence
from .witness import MacroObservables, thermal_witness, zero_field_energy_criterion
from .xy_chain import XYChainParams, critical_temperature, evaluate_point

__all__ = ["main"]


class UsageError(Exception):
    """Bad command line or config input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); remap to exit code 1
        raise UsageError(message)


def _workers() -> int:
    env = os.environ.get("SPINENT_WORKERS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise UsageError(f"SPINENT_WORKERS must be an integer, got {env!r}") from exc
        if n < 1:
            raise UsageError("SPINENT_WORKERS must be >= 1")
        return n
    return os.cpu_count() or 1


def _parallel_map(fn, items):
    """Map preserving order; results are emitted sorted, so determinism holds."""
    items = list(items)
    n = _workers()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _parse_grid(text, name: str):
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    s = str(text).strip()
    if not s:
        raise UsageError(f"{name}: empty grid")
    try:
        if ":" in s:
            lo, hi, num = s.split(":")
            lo, hi, num = float(lo), float(hi), int(num)
            if num < 1:
                raise UsageError(f"{name}: grid size must be >= 1")
            if num > 1 and hi <= lo:
                raise UsageError(f"{name}: need hi > lo in '{s}'")
            return np.linspace(lo, hi, num).tolist()
        return [float(p) for p in s.split(",") if p.strip()]
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"{name}: cannot parse grid {s!r} (use lo:hi:n or a,b,c)") from exc


def _dedup_sorted(values, name: str):
    """Sort ascending and drop exact duplicates, warning on stderr."""
    out = sorted(values)
    unique = []
    dropped = 0
    for v in out:
        if unique and v == unique[-1]:
            dropped += 1
        else:
            unique.append(v)
    if dropped:
        print(f"warning: {dropped} duplicate {name} grid point(s) dropped", file=sys.stderr)
    if not unique:
        raise UsageError(f"{name}: empty grid")
    return unique


def _fmt(x) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")


def _write_lines(path, lines):
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a mapping")
    return data


def _resolve(args, key: str, default=None, required: bool = False):
    """Flag value if given, else config value, else default."""
    value = getattr(args, key, None)
    if value is None:
        value = getattr(args, "_config", {}).get(key)
    if value is None:
        value = default
    if value is None and required:
        raise UsageError(f"missing required option --{key.replace('_', '-')}")
    return value


def _announce_plots(paths):
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)


# ---------------------------------------------------------------- xy-sweep

def _cmd_xy_sweep(args) -> int:
    j = float(_resolve(args, "j", 1.0))
    hs = _dedup_sorted(_parse_grid(_resolve(args, "h", required=True), "h"), "h")
    ts = _dedup_sorted(_parse_grid(_resolve(args, "t", required=True), "t"), "t")
    output = _resolve(args, "output")
    plot_dir = _resolve(args, "plot")

    def point(ht):
        h, t = ht
        try:
            return ht, evaluate_point(XYChainParams(j=j, h=h, t=t))
        except (ConvergenceError, BracketError) as exc:
            print(f"diagnostic: (t={t}, h={h}) failed: {exc}", file=sys.stderr)
            return ht, None

    grid = [(h, t) for h in hs for t in ts]
    rows = []
    for (h, t), res in _parallel_map(point, grid):
        if res is None:
            continue
        rows.append(
            {
                "T": t,
                "h": h,
                "C": res.concurrence.c,
                "Ctilde": res.concurrence.c_tilde,
                "Z": res.z,
                "n": res.n,
                "Xplus": res.x_plus,
                "Xminus": res.x_minus,
                "Phi": res.phi,
            }
        )
    header = "T,h,C,Ctilde,Z,n,Xplus,Xminus,Phi"
    lines = [header] + [
        ",".join(_fmt(r[c]) for c in header.split(",")) for r in rows
    ]
    _write_lines(output, lines)
    if plot_dir:
        from . import plots

        _announce_plots(plots.render_xy_sweep(rows, plot_dir))
    return 0


# ------------------------------------------------------------------- xy-tc

def _cmd_xy_tc(args) -> int:
    j = float(_resolve(args, "j", 1.0))
    hs = _dedup_sorted(_parse_grid(_resolve(args, "h", required=True), "h"), "h")
    tol = float(_resolve(args, "independence_tol", 1e-6))
    plot_dir = _resolve(args, "plot")

    entries = []
    lines = [f"j = {_fmt(j)}"]
    for h in hs:
        try:
            tc = critical_temperature(h, j)
            entries.append((h, tc))
            lines.append(f"h = {_fmt(h)}: T_c = {_fmt(tc)}")
        except BracketError as exc:
            entries.append((h, None))
            lines.append(f"h = {_fmt(h)}: absent ({exc})")
    solved = [tc for _h, tc in entries if tc is not None]
    if not solved:
        _write_lines(_resolve(args, "output"), lines)
        print("error: no critical temperature found for any field", file=sys.stderr)
        return 2
    spread = max(solved) - min(solved)
    ok = spread <= tol
    lines.append(
        f"max spread = {_fmt(spread)} over {len(solved)} field(s) "
        f"(tolerance {_fmt(tol)}): {'ok' if ok else 'EXCEEDED'}"
    )
    _write_lines(_resolve(args, "output"), lines)
    if plot_dir:
        from . import plots

        _announce_plots(plots.render_xy_tc(entries, plot_dir))
    return 0 if ok else 3


# ----------------------------------------------------------------- witness

def _cmd_witness(args) -> int:
    obs = MacroObservables(
        u=float(_resolve(args, "u", required=True)),
        m=float(_resolve(args, "m", 0.0)),
        n_sites=int(_resolve(args, "n_sites", required=True)),
        j=float(_resolve(args, "j", 1.0)),
        h=float(_resolve(args, "h", 0.0)),
    )
    value = thermal_witness(obs)
    lines = [
        f"Phi(U, M, h) = {_fmt(value)}",
        f"verdict: {'entangled' if value < 0.0 else 'not witnessed'}",
    ]
    if obs.h == 0.0:
        satisfied = zero_field_energy_criterion(obs.u, obs.n_sites, obs.j)
        lines.append(
            "zero-field energy criterion |U|/(N J) > (sqrt(2)-1)/2: "
            + ("satisfied" if satisfied else "not satisfied")
        )
    _write_lines(_resolve(args, "output"), lines)
    return 0


# ---------------------------------------------------------------------- ed

def _ed_spec(args) -> FiniteChainSpec:
    model = _resolve(args, "model", "xy")
    n = int(_resolve(args, "n", required=True))
    h = float(_resolve(args, "h", 0.0))
    boundary = _resolve(args, "boundary", "open")
    if model == "xy":
        return xy_chain_spec(n, float(_resolve(args, "j", 1.0)), h, boundary)
    if model == "aff":
        return alternating_chain_spec(
            n,
            float(_resolve(args, "j_a", 1.0)),
            float(_resolve(args, "j_f", -1.0)),
            h,
            boundary,
        )
    if model == "custom":
        bonds = _resolve(args, "bonds", required=True)
        if not isinstance(bonds, (list, tuple)):
            raise UsageError("custom model needs a 'bonds' list in the config file")
        return FiniteChainSpec(
            n_sites=n,
            bonds=tuple(tuple(b) for b in bonds),
            h=h,
            boundary=boundary,
        )
    raise UsageError(f"unknown model {model!r} (expected xy, aff or custom)")


def _cmd_ed(args) -> int:
    spec = _ed_spec(args)
    ts = _dedup_sorted(_parse_grid(_resolve(args, "t", required=True), "t"), "t")
    output = _resolve(args, "output")
    plot_dir = _resolve(args, "plot")

    thermal_expectations(spec, ts[0])  # prime the per-spec spectral cache
    results = _parallel_map(lambda t: thermal_expectations(spec, t), ts)
    rows = []
    for res in results:
        for b, obs in enumerate(res.per_bond):
            conc = bond_concurrence(res, b)
            rows.append(
                {
                    "T": res.t,
                    "U": res.u,
                    "M": res.m,
                    "bond": b,
                    "C": conc.c,
                    "Ctilde": conc.c_tilde,
                    "Z": obs.z.real if isinstance(obs.z, complex) else obs.z,
                    "n": obs.x_plus + obs.y_plus,
                }
            )
    header = "T,U,M,bond,C,Ctilde,Z,n"
    lines = [header]
    for r in rows:
        lines.append(
            ",".join(
                str(r["bond"]) if c == "bond" else _fmt(r[c]) for c in header.split(",")
            )
        )
    _write_lines(output, lines)
    if plot_dir:
        from . import plots

        _announce_plots(plots.render_ed(rows, plot_dir))
    return 0


# ------------------------------------------------------------------ mf-aff

def _cmd_mf_aff(args) -> int:
    j_a = float(_resolve(args, "j_a", 1.0))
    j_f = float(_resolve(args, "j_f", -1.0))
    n_k = int(_resolve(args, "n_k", 2048))
    hs = _dedup_sorted(_parse_grid(_resolve(args, "h", required=True), "h"), "h")
    ts = _dedup_sorted(_parse_grid(_resolve(args, "t", required=True), "t"), "t")
    output = _resolve(args, "output")
    plot_dir = _resolve(args, "plot")

    def column(h):
        # ascending temperatures, warm-starting each solve from the previous one
        out = []
        state = None
        for t in ts:
            params = AlternatingParams(j_a=j_a, j_f=j_f, h=h, t=t, n_k=n_k)
            try:
                state = self_consistent_solve(params, initial=state)
                res = mf_concurrences(state, params)
                ca, cf = res.c_a.c, res.c_f.c
                row_state, converged = state, True
            except ConvergenceError as exc:
                print(f"diagnostic: (t={t}, h={h}) did not converge: {exc}", file=sys.stderr)
                v = exc.state
                row_state = MeanFieldState(
                    d_a=float(v[0].real), d_b=float(v[1].real),
                    p_ab=complex(v[2]), p_ba=complex(v[3]),
                    converged=False, residual=float(exc.residual),
                )
                ca = cf = math.nan
                converged = False
                state = None  # do not warm-start from a bad point
            out.append(
                {
                    "T": t,
                    "h": h,
                    "da": row_state.d_a,
                    "db": row_state.d_b,
                    "pab_re": row_state.p_ab.real,
                    "pab_im": row_state.p_ab.imag,
                    "pba_re": row_state.p_ba.real,
                    "pba_im": row_state.p_ba.imag,
                    "Ca": ca,
                    "Cf": cf,
                    "converged": converged,
                }
            )
        return out

    rows = [row for col in _parallel_map(column, hs) for row in col]
    header = "T,h,da,db,pab_re,pab_im,pba_re,pba_im,Ca,Cf,converged"
    lines = [header]
    for r in rows:
        cells = []
        for c in header.split(","):
            if c == "converged":
                cells.append("true" if r[c] else "false")
            else:
                cells.append(_fmt(r[c]))
        lines.append(",".join(cells))
    _write_lines(output, lines)
    if plot_dir:
        from . import plots

        _announce_plots(plots.render_mf_aff([r for r in rows if r["converged"]], plot_dir))
    return 0


# ------------------------------------------------------------------ parser

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML file supplying any option by name")
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--plot", metavar="DIR", help="also render figures into DIR")


def _build_parser() -> _Parser:
    parser = _Parser(prog="spinent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("xy-sweep", help="exact XY-chain sweep over a (t, h) grid")
    p.add_argument("--j", type=float, help="coupling J > 0 (default 1)")
    p.add_argument("--h", help="field grid (lo:hi:n or a,b,c)")
    p.add_argument("--t", help="temperature grid (lo:hi:n or a,b,c)")
    _add_common(p)
    p.set_defaults(func=_cmd_xy_sweep)

    p = sub.add_parser("xy-tc", help="critical temperature per field")
    p.add_argument("--j", type=float, help="coupling J > 0 (default 1)")
    p.add_argument("--h", help="field grid")
    p.add_argument("--independence-tol", type=float, dest="independence_tol",
                   help="allowed T_c spread across fields (default 1e-6)")
    _add_common(p)
    p.set_defaults(func=_cmd_xy_tc)

    p = sub.add_parser("witness", help="entanglement witness from (U, M, N, J, h)")
    p.add_argument("--u", type=float, help="internal energy U (band convention)")
    p.add_argument("--m", type=float, help="total magnetization M (default 0)")
    p.add_argument("--n-sites", type=int, dest="n_sites", help="number of sites N")
    p.add_argument("--j", type=float, help="coupling J > 0 (default 1)")
    p.add_argument("--h", type=float, help="field (default 0)")
    _add_common(p)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("ed", help="exact-diagonalization thermal sweep")
    p.add_argument("--model", choices=["xy", "aff", "custom"], help="chain preset")
    p.add_argument("--n", type=int, help="number of sites (2..14)")
    p.add_argument("--j", type=float, help="XY coupling (model=xy)")
    p.add_argument("--j-a", type=float, dest="j_a", help="AF coupling (model=aff)")
    p.add_argument("--j-f", type=float, dest="j_f", help="F coupling (model=aff)")
    p.add_argument("--h", type=float, help="field (default 0)")
    p.add_argument("--boundary", choices=["open", "periodic"], help="default open")
    p.add_argument("--t", help="temperature grid")
    _add_common(p)
    p.set_defaults(func=_cmd_ed)

    p = sub.add_parser("mf-aff", help="mean-field sweep of the AF-F chain")
    p.add_argument("--j-a", type=float, dest="j_a", help="AF coupling > 0 (default 1)")
    p.add_argument("--j-f", type=float, dest="j_f", help="F coupling < 0 (default -1)")
    p.add_argument("--h", help="field grid")
    p.add_argument("--t", help="temperature grid")
    p.add_argument("--n-k", type=int, dest="n_k", help="zone mesh size (default 2048)")
    _add_common(p)
    p.set_defaults(func=_cmd_mf_aff)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_help(sys.stderr)
            return 1
        args._config = _load_config(getattr(args, "config", None))
        return args.func(args)
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, BracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except InvalidStateError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:  # bad parameter values (ranges, sizes)
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
