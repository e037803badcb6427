"""Command-line driver: ``spintwist <command> [options]``.

Every command writes data tables (CSV or JSON) into the ``--out`` directory
and prints the paths it wrote.  Settings resolve as CLI flag, then the JSON
``--config`` file, then built-in defaults.

Exit codes: 0 success, 2 usage error, 1 numerical-invariant abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import floquet
from .analysis import SphereGrid, husimi_q, probability_distribution
from .export import write_gnuplot, write_table
from .metrology import parity_curve, qfi_optimal, qfi_pure, sensitivity, to_quantization_axis
from .models import MODELS, build_model, h_oat, h_xyz
from .propagate import IntegrationError, UnitaryEvolver
from .semiclassical import critical_time, floquet_critical_time, integrate_trajectory, qfi_semiclassical
from .spin import aghz_state, build_system, ghz_state, parity_matrix, x_polarized

log = logging.getLogger("spintwist")

COMMANDS = ("trajectory", "fisher", "parity", "decoherence", "loss", "semiclassical")

DEFAULTS = {
    "n": 100, "chi": 1.0, "alpha": 0.4, "gamma": 0.0, "t_max": None, "t_steps": 50,
    "axis": "y", "format": "csv", "out": "spintwist-out", "jobs": 1, "model": "xyz",
    "n_theta": 200, "n_phi": 400, "snapshots": [0.0, 1 / 3, 2 / 3, 1.0],
    "sweep_n": None, "sweep_gamma": [0.0, 0.001, 0.01, 0.05], "max_loss": 10, "gnuplot": False,
}

SWEEP_N_DEFAULTS = {
    "fisher": [20, 40, 60, 80, 100, 120, 140, 160, 180, 200],
    "parity": [10, 20, 40, 80, 160],
    "decoherence": [20, 40, 60],
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int
    chi: float
    alpha: float
    gamma: float
    t_max: float | None
    t_steps: int
    axis: str
    format: str
    out: str
    jobs: int
    model: str
    n_theta: int
    n_phi: int
    snapshots: list = field(default_factory=list)
    sweep_n: list | None = None
    sweep_gamma: list = field(default_factory=list)
    max_loss: int = 10
    gnuplot: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.n < 2:
            raise UsageError("--n must be at least 2")
        for name in ("chi", "alpha"):
            if not getattr(self, name) > 0:
                raise UsageError(f"--{name} must be positive")
        if self.gamma < 0 or any(g < 0 for g in self.sweep_gamma):
            raise UsageError("decay rates must be nonnegative")
        if self.t_max is not None and self.t_max <= 0:
            raise UsageError("--t-max must be positive")
        if self.t_steps < 2:
            raise UsageError("--t-steps must be at least 2")
        if self.axis not in ("x", "y", "z"):
            raise UsageError("--axis must be x, y or z")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if self.model not in MODELS:
            raise UsageError(f"--model must be one of {', '.join(MODELS)}")
        if self.n_theta < 2 or self.n_phi < 2:
            raise UsageError("grid needs at least 2 points per direction")
        if self.sweep_n is not None and any(n < 2 for n in self.sweep_n):
            raise UsageError("sweep particle numbers must be at least 2")
        if self.command == "loss" and not 0 <= self.max_loss <= self.n - 1:
            raise UsageError("--max-loss must lie in [0, N-1]")
        if any(f < 0 for f in self.snapshots):
            raise UsageError("snapshot fractions must be nonnegative")
        return self

    def public(self) -> dict:
        """Settings that determine the numbers; output location and worker count do not."""
        d = asdict(self)
        del d["out"], d["jobs"]
        return d


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are None so config-file values can fill in unset flags
    common.add_argument("--n", type=int, help="particle number (default 100)")
    common.add_argument("--chi", type=float, help="twisting strength chi (default 1)")
    common.add_argument("--alpha", type=float, help="Floquet driving parameter chi tau N/2 (default 0.4)")
    common.add_argument("--gamma", type=float, help="superradiant decay rate (default 0)")
    common.add_argument("--t-max", type=float, help="end of the time grid (units 1/chi)")
    common.add_argument("--t-steps", type=int, help="number of time samples (default 50)")
    common.add_argument("--axis", choices=["x", "y", "z"], help="axis of the GHZ-like lobes (default y)")
    common.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    common.add_argument("--out", help="output directory (default ./spintwist-out)")
    common.add_argument("--jobs", type=int, help="worker processes for sweeps (default 1)")
    common.add_argument("--config", type=Path, help="JSON file with option defaults")
    common.add_argument("--gnuplot", action="store_true", default=None, help="also write gnuplot scripts")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="spintwist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("trajectory", parents=[common], help="observables and Husimi Q snapshots along a model's evolution")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--snapshots", type=_float_list, help="snapshot times as fractions of t_c (default 0,1/3,2/3,1)")
    p.add_argument("--n-theta", type=int)
    p.add_argument("--n-phi", type=int)

    p = sub.add_parser("fisher", parents=[common], help="QFI vs time for OAT, effective XYZ and Floquet; t_max vs N")
    p.add_argument("--sweep-n", type=_int_list)

    p = sub.add_parser("parity", parents=[common], help="parity oscillations and phase sensitivity")
    p.add_argument("--sweep-n", type=_int_list)

    p = sub.add_parser("decoherence", parents=[common], help="QFI under superradiance: Floquet scheme vs OAT")
    p.add_argument("--sweep-n", type=_int_list)
    p.add_argument("--sweep-gamma", type=_float_list)

    p = sub.add_parser("loss", parents=[common], help="QFI after particle loss; P_m overlays")
    p.add_argument("--max-loss", type=int)

    sub.add_parser("semiclassical", parents=[common], help="mean-field trajectories and analytic QFI")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = dict(DEFAULTS)
    if args.config is not None:
        try:
            file_values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        unknown = set(file_values) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(file_values)
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if values["sweep_n"] is None:
        values["sweep_n"] = SWEEP_N_DEFAULTS.get(args.command)
    return RunConfig(command=args.command, **values).validate()


def _pmap(fn, items, jobs: int):
    """Ordered map, in a process pool when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class Writer:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.written: list[Path] = []

    def table(self, name: str, columns, rows, plot: dict | None = None) -> Path:
        path = write_table(self.out / name, columns, rows, self.cfg.format, self.cfg.public())
        self.written.append(path)
        if self.cfg.gnuplot and self.cfg.format == "csv":
            self.written.append(write_gnuplot(self.out / name, path, list(columns), **(plot or {})))
        return path


def _tc(cfg: RunConfig) -> float:
    return critical_time(cfg.n, cfg.chi)["approx"]


def cmd_trajectory(cfg: RunConfig, w: Writer):
    sys_ = build_system(cfg.n)
    H = build_model(sys_, cfg.model, cfg.chi)
    tc = _tc(cfg)
    if cfg.t_max is not None:
        times = np.linspace(0, cfg.t_max, cfg.t_steps)
    else:
        times = np.array(cfg.snapshots) * tc
    ev = UnitaryEvolver(H)
    x = x_polarized(sys_)
    grid = SphereGrid(cfg.n_theta, cfg.n_phi)
    rows = []
    for i, t in enumerate(times):
        st = ev.evolve(x, t)
        mean = [st.expect(op).real for op in (sys_.jx, sys_.jy, sys_.jz)]
        norm = float(np.vdot(st.amplitudes, st.amplitudes).real)
        par = st.expect(parity_matrix(sys_)).real
        rows.append([t, t / tc, *mean, norm, par, qfi_optimal(st).qfi])
        q = husimi_q(st, grid)
        w.table(f"qfield_{i:03d}", ["theta", "phi", "q"], q.rows())
    w.table("observables", ["time", "t_over_tc", "jx", "jy", "jz", "norm", "parity", "qfi"], rows)


def _oat_t_max(N: int, chi: float) -> float:
    sys_ = build_system(N)
    t_end = 1.2 * math.pi / (2 * chi)
    t, _ = ex.find_qfi_peak(h_oat(sys_, chi), x_polarized(sys_), 0.05 * t_end, t_end, n_grid=241)
    return t


def _tmax_row(args):
    N, chi, alpha = args
    t_fd = ex.floquet_t_max(N, alpha, chi)
    pred = floquet_critical_time(N, alpha, chi)
    return [N, _oat_t_max(N, chi), t_fd, pred, t_fd / pred]


def cmd_fisher(cfg: RunConfig, w: Writer):
    N, chi, alpha = cfg.n, cfg.chi, cfg.alpha
    sys_ = build_system(N)
    t_end = cfg.t_max if cfg.t_max is not None else 1.1 * math.pi / (2 * chi)
    times = np.linspace(0, t_end, cfg.t_steps)
    x = x_polarized(sys_)
    rows = [["oat", t, f] for t, f in zip(times, ex.qfi_curve(h_oat(sys_, chi), x, times))]
    tau = floquet.tau_from_alpha(N, chi, alpha)
    h_eff = floquet.effective_hamiltonian(sys_, chi, tau)
    rows += [["xyz-effective", t, f] for t, f in zip(times, ex.qfi_curve(h_eff, x, times))]
    n_periods = max(int(t_end // (3 * tau)), 1)
    ft, ff = ex.floquet_qfi_curve(N, alpha, n_periods, chi)
    rows += [["floquet", t, f] for t, f in zip(ft, ff)]
    w.table("fisher_curves", ["curve", "time", "qfi"], rows)
    table = _pmap(_tmax_row, [(n, chi, alpha) for n in cfg.sweep_n], cfg.jobs)
    w.table("t_max_vs_n", ["N", "t_max_oat", "t_max_floquet", "t_pred", "floquet_over_pred"], table,
            plot={"logscale": True})


def _dtheta_min_row(args):
    N, chi = args
    return [N, ex.min_sensitivity(N, chi), 1 / N]


def cmd_parity(cfg: RunConfig, w: Writer):
    N, chi = cfg.n, cfg.chi
    sys_ = build_system(N)
    t_peak, _ = ex.xyz_peak(N, chi)
    like = to_quantization_axis(ex.xyz_state(N, t_peak, chi), cfg.axis)
    thetas = np.linspace(-math.pi / 2, math.pi / 2, 801)
    ghz_c = parity_curve(ghz_state(sys_), thetas).values
    like_c = parity_curve(like, thetas).values
    aghz_c = parity_curve(aghz_state(sys_), thetas).values
    w.table("parity_curves", ["theta", "ghz", "aghz", "ghz_like"], zip(thetas, ghz_c, aghz_c, like_c))

    tc = _tc(cfg)
    t_end = cfg.t_max if cfg.t_max is not None else 1.5 * tc
    ev = UnitaryEvolver(h_xyz(sys_, chi))
    x = x_polarized(sys_)
    rows = []
    for t in np.linspace(0, t_end, cfg.t_steps):
        st = ev.evolve(x, t)
        f = qfi_optimal(st).qfi
        rows.append([t, sensitivity(st), f ** -0.5])
    w.table("sensitivity_vs_time", ["time", "dtheta", "qcrb"], rows)

    table = _pmap(_dtheta_min_row, [(n, chi) for n in cfg.sweep_n], cfg.jobs)
    w.table("dtheta_min_vs_n", ["N", "dtheta_min", "heisenberg"], table, plot={"logscale": True})


def _deco_cell(args):
    N, gamma, chi, alpha = args
    r = ex.decoherence_cell(N, gamma, chi, alpha)
    return [r["N"], r["gamma"], r["qfi_fd"], r["qfi_oat"], r["ratio"]]


def cmd_decoherence(cfg: RunConfig, w: Writer):
    cells = [(n, g, cfg.chi, cfg.alpha) for n in cfg.sweep_n for g in cfg.sweep_gamma]
    rows = _pmap(_deco_cell, cells, cfg.jobs)
    w.table("decoherence", ["N", "gamma", "qfi_fd", "qfi_oat", "ratio"], rows)


def cmd_loss(cfg: RunConfig, w: Writer):
    N, chi = cfg.n, cfg.chi
    fractions = (1.0, 0.8, 0.6)
    curves = ex.loss_curves(N, cfg.max_loss, fractions, chi)
    names = [k for k in curves if k != "delta_n"]
    rows = [[dn] + [curves[k][i] for k in names] for i, dn in enumerate(curves["delta_n"])]
    w.table("loss_qfi", ["delta_n"] + names, rows)
    sys_ = build_system(N)
    tc = _tc(cfg)
    dists = [probability_distribution(ex.xyz_state(N, f * tc, chi), cfg.axis) for f in fractions]
    rows = [[m] + [p[k] for p in dists] for k, m in enumerate(sys_.m)]
    w.table("loss_pm", ["m"] + [f"p_{f:g}tc" for f in fractions], rows)


def _sphere_starts():
    # ring of starts around the x poles plus a few generic points; fixed for reproducibility
    pts = []
    for sgn in (1, -1):
        for ang in np.linspace(0, 2 * math.pi, 8, endpoint=False):
            r = 0.3
            pts.append(np.array([sgn * math.sqrt(1 - r * r), r * math.cos(ang), r * math.sin(ang)]))
    return pts


def cmd_semiclassical(cfg: RunConfig, w: Writer):
    N, chi = cfg.n, cfg.chi
    tc = _tc(cfg)
    t_end = cfg.t_max if cfg.t_max is not None else 1.5 * tc
    rows = []
    for model in ("xyz", "tat"):
        for i, p0 in enumerate(_sphere_starts()):
            tr = integrate_trajectory(p0, chi, N, t_end, 4 * cfg.t_steps, model=model)
            rows += [[model, i, t, *p] for t, p in zip(tr.times, tr.points)]
    w.table("trajectories", ["model", "traj", "t", "X", "Y", "Z"], rows)

    sys_ = build_system(N)
    ev = UnitaryEvolver(h_xyz(sys_, chi))
    x = x_polarized(sys_)
    times = np.linspace(0, t_end, cfg.t_steps)
    rows = [[t, qfi_semiclassical(t, N, chi), qfi_pure(ev.evolve(x, t), "y")] for t in times]
    w.table("fisher_semiclassical", ["time", "analytic", "exact"], rows)


HANDLERS = {
    "trajectory": cmd_trajectory, "fisher": cmd_fisher, "parity": cmd_parity,
    "decoherence": cmd_decoherence, "loss": cmd_loss, "semiclassical": cmd_semiclassical,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    w = Writer(cfg)
    try:
        HANDLERS[cfg.command](cfg, w)
    except (IntegrationError, FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        log.error("numerical abort: %s", exc)
        return 1
    for path in w.written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
