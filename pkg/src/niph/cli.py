"""Command-line interface.

Subcommands: generate, sample-network, ph, niph, fit, pca, plot.
Exit codes: 0 success, 1 usage error, 2 data error, 3 resource budget.
A config file of ``key = value`` lines (--config) supplies defaults for
any flag of the invoked subcommand; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import DataError, NiphError, ResourceBudgetError
from .geometry import ProbeSpec, distance_matrix, load_cloud_csv, save_cloud_csv
from .model import PeakObservation, fit_parameters, pca_orientation
from .network import load_geojson, sample_network
from .persistence import vr_persistence_0, vr_persistence_1
from .pipeline import NiphConfig, ProbePlan, run_niph
from .synth import GridSpec, ShapeFieldSpec, gen_grid, gen_shape_field

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BUDGET = 3


def _parse_config(path):
    values = {}
    try:
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DataError(f"config line without '=': {line!r}")
                key, raw = (part.strip() for part in line.split("=", 1))
                try:
                    values[key.replace("-", "_")] = json.loads(raw)
                except json.JSONDecodeError:
                    values[key.replace("-", "_")] = raw.strip("\"'")
    except OSError as exc:
        raise DataError(f"could not read config {path}: {exc}") from exc
    return values


def _scales(text):
    return tuple(float(v) for v in text.split(","))


def build_parser():
    top = argparse.ArgumentParser(prog="niph", description=__doc__)
    top.add_argument("--config", help="key = value file of flag defaults")
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="synthetic point clouds -> CSV + JSON sidecar")
    g.add_argument("--shape", default="ellipse",
                   choices=["grid", "ellipse", "rectangle", "circle"])
    g.add_argument("--count", type=int, default=200, help="number of shapes")
    g.add_argument("--points", type=int, default=100, help="points per shape")
    g.add_argument("--region", type=float, default=3000.0)
    g.add_argument("--phi", type=float, default=0.0)
    g.add_argument("--var", type=float, default=0.0)
    g.add_argument("--s", type=float, default=1.0)
    g.add_argument("--size-min", type=float, default=0.2)
    g.add_argument("--size-max", type=float, default=2.0)
    g.add_argument("--n1", type=int, default=10)
    g.add_argument("--n2", type=int, default=10)
    g.add_argument("--d1", type=float, default=1.0)
    g.add_argument("--d2", type=float, default=2.0)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)

    n = sub.add_parser("sample-network", help="GeoJSON roads -> sampled cloud CSV")
    n.add_argument("geojson")
    n.add_argument("--road-types", default=None,
                   help="comma list matched against properties.highway")
    n.add_argument("--count", type=int, default=10_000)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("-o", "--output", required=True)

    p = sub.add_parser("ph", help="persistence diagram of a cloud CSV")
    p.add_argument("cloud")
    p.add_argument("--dim", type=int, choices=[0, 1], default=0)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--probe-angle", type=float, default=None)
    p.add_argument("--probe-scale", type=float, default=None)
    p.add_argument("-o", "--output", default=None, help="JSON output path")
    p.add_argument("--csv", default=None, help="CSV output path")

    r = sub.add_parser("niph", help="full pipeline -> report JSON")
    r.add_argument("cloud")
    r.add_argument("--dim", type=int, choices=[0, 1], default=1)
    r.add_argument("--directions", type=int, default=8)
    r.add_argument("--scales", type=_scales, default=(2.0,))
    r.add_argument("--weighting", default="unit",
                   choices=["unit", "persistence-diff", "persistence-ratio"])
    r.add_argument("--rmax", type=float, default=None)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--threads", type=int, default=None)
    r.add_argument("--curves", default=None,
                   help="write per-probe density curves to this CSV")
    r.add_argument("-o", "--output", default=None)

    f = sub.add_parser("fit", help="peaks CSV (psi,S,peak) -> fit JSON")
    f.add_argument("peaks")
    f.add_argument("--dim", type=int, choices=[0, 1], default=1)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("-o", "--output", default=None)

    c = sub.add_parser("pca", help="PCA orientation baseline of a cloud CSV")
    c.add_argument("cloud")
    c.add_argument("-o", "--output", default=None)

    pl = sub.add_parser("plot", help="density/curve CSV -> SVG line plot")
    pl.add_argument("curves")
    pl.add_argument("-o", "--output", required=True)
    return top


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_generate(args):
    if args.shape == "grid":
        spec = GridSpec(
            n1=args.n1, n2=args.n2, d1=args.d1, d2=args.d2,
            phi=args.phi, noise_bound=args.noise, seed=args.seed,
        )
        X = gen_grid(spec)
        sidecar = {"kind": "grid", **spec.__dict__}
    else:
        spec = ShapeFieldSpec(
            count=args.count, phi=args.phi, var=args.var, s=args.s,
            size_range=(args.size_min, args.size_max),
            points_per_shape=args.points, region=args.region,
            shape=args.shape, seed=args.seed,
        )
        X = gen_shape_field(spec)
        sidecar = {"kind": "shape-field", **{
            k: (list(v) if isinstance(v, tuple) else v)
            for k, v in spec.__dict__.items()
        }}
    save_cloud_csv(args.output, X)
    with open(args.output.rsplit(".", 1)[0] + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
    print(f"wrote {len(X)} points to {args.output}")


def _cmd_sample_network(args):
    net = load_geojson(args.geojson)
    roads = args.road_types.split(",") if args.road_types else None
    X = sample_network(net, road_filter=roads, count=args.count, seed=args.seed)
    save_cloud_csv(args.output, X)
    note = " (projected from lon/lat)" if net.projected else ""
    print(f"wrote {len(X)} points to {args.output}{note}")


def _cmd_ph(args):
    X = load_cloud_csv(args.cloud)
    probe = None
    if args.probe_angle is not None or args.probe_scale is not None:
        if args.probe_angle is None or args.probe_scale is None:
            raise DataError("--probe-angle and --probe-scale go together")
        probe = ProbeSpec.from_angle(args.probe_angle, args.probe_scale)
    dist = distance_matrix(X, probe)
    if args.dim == 0:
        diagram = vr_persistence_0(dist)
    else:
        if args.rmax is None:
            raise DataError("--rmax is required for --dim 1")
        diagram = vr_persistence_1(dist, args.rmax)
    if args.csv:
        diagram.to_csv(args.csv)
    _emit(diagram.to_json(), args.output)


def _cmd_niph(args):
    X = load_cloud_csv(args.cloud)
    plan = ProbePlan(
        n_directions=args.directions, factors=args.scales,
        dim=args.dim, weighting=args.weighting,
    )
    cfg = NiphConfig(r_max=args.rmax, seed=args.seed, threads=args.threads)
    report = run_niph(X, plan, cfg)
    if args.curves:
        with open(args.curves, "w") as fh:
            fh.write("# psi,alpha,x,density\n")
            for res in report.probe_results:
                c = res.diagram.density
                for x, y in zip(c.grid, c.values):
                    fh.write(
                        f"{res.probe.angle:.9g},{res.probe.factor:.9g},"
                        f"{x:.9g},{y:.9g}\n"
                    )
    _emit(report.to_json(), args.output)


def _cmd_fit(args):
    try:
        rows = np.loadtxt(args.peaks, delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise DataError(f"could not parse peaks CSV: {exc}") from exc
    if rows.shape[1] < 3:
        raise DataError("peaks CSV needs columns psi,S,peak")
    obs = [
        PeakObservation(ProbeSpec.from_angle(psi, S), peak, args.dim)
        for psi, S, peak in rows[:, :3]
    ]
    result = fit_parameters(obs, seed=args.seed)
    _emit(json.dumps(result.to_dict(), indent=2), args.output)


def _cmd_pca(args):
    angle, ratio = pca_orientation(load_cloud_csv(args.cloud))
    payload = {
        "angle_rad": angle,
        "angle_deg": math.degrees(angle),
        "ratio": None if math.isinf(ratio) else ratio,
    }
    _emit(json.dumps(payload, indent=2), args.output)


def _cmd_plot(args):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    try:
        rows = np.loadtxt(args.curves, delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise DataError(f"could not parse curve CSV: {exc}") from exc
    fig, ax = plt.subplots(figsize=(7, 4))
    if rows.shape[1] >= 4:  # long format: psi, alpha, x, density
        for psi, alpha in sorted({(r[0], r[1]) for r in rows}):
            sel = (rows[:, 0] == psi) & (rows[:, 1] == alpha)
            ax.plot(
                rows[sel, 2], rows[sel, 3],
                label=f"psi={math.degrees(psi):.0f}deg a={alpha:g}",
            )
        ax.legend(fontsize=7)
    elif rows.shape[1] >= 2:  # plain (x, density)
        ax.plot(rows[:, 0], rows[:, 1])
    else:
        raise DataError("curve CSV needs at least 2 columns")
    ax.set_xlabel("multiplicative shift")
    ax.set_ylabel("density")
    fig.tight_layout()
    fig.savefig(args.output, format="svg")
    plt.close(fig)
    print(f"wrote {args.output}")


_COMMANDS = {
    "generate": _cmd_generate,
    "sample-network": _cmd_sample_network,
    "ph": _cmd_ph,
    "niph": _cmd_niph,
    "fit": _cmd_fit,
    "pca": _cmd_pca,
    "plot": _cmd_plot,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.config:
            overrides = _parse_config(args.config)
            known = set(vars(args))
            for key, value in overrides.items():
                if key not in known:
                    raise DataError(f"config key {key!r} is not a known flag")
                # explicit command-line flags win over config values
                if f"--{key.replace('_', '-')}" not in argv:
                    setattr(args, key, value)
            if isinstance(getattr(args, "scales", None), str):
                args.scales = _scales(args.scales)
        _COMMANDS[args.command](args)
        return EXIT_OK
    except ResourceBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DataError, NiphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
