"""Command-line front end.

Subcommands::

    steady         converged mean amplitudes at one parameter point
    stability      drift-matrix eigenvalues and the stability verdict
    entangle       stationary logarithmic negativity at one point
    sweep          grid sweep defined by a config file with [axis] sections
    preset         grid sweep reproducing one of the published panels
    dump-matrices  fluctuation/noise/covariance matrices as CSV files

Exit status: 0 on success, 1 on physics failures (non-convergence,
instability where a stationary state is required, numerical breakdown),
2 on usage errors.  Every failure prints one ``error: ...`` line to stderr.
File outputs get a ``<out>.meta.json`` sidecar recording the tool version,
the full effective parameter set and timings, which is sufficient to
reproduce the output exactly.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone

from . import __version__
from .config import load_params, load_sweep_spec, parse_overrides
from .errors import ConfigError, TrimodeError, UnstableSystemError
from .gaussian import Bipartition, dark_mode_coupling
from .model import SystemParams
from .sweep import (
    PRESET_NAMES,
    evaluate_point,
    emit_results,
    figure_preset,
    run_sweep,
)
from .dynamics import save_matrix_csv

log = logging.getLogger("trimode")

_PAIR_TOKENS = tuple(p.value for p in Bipartition)


def _add_common(parser: argparse.ArgumentParser, *, pairs: bool = False,
                margin: bool = False, workers: bool = False, plot: bool = False) -> None:
    parser.add_argument("--config", metavar="FILE", help="parameter file (key = value lines)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one parameter (repeatable)")
    parser.add_argument("--out", metavar="PATH", help="output file")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default: json for point commands, csv for sweeps)")
    if pairs:
        parser.add_argument("--pair", dest="pairs", action="append", default=[],
                            choices=_PAIR_TOKENS, help="mode pair to report (repeatable)")
    if margin:
        parser.add_argument("--margin", type=float, default=None,
                            help="stability margin on Re(eigenvalue)")
    if workers:
        parser.add_argument("--workers", type=int, default=1,
                            help="process-pool size for grid points")
    if plot:
        parser.add_argument("--plot", action="store_true",
                            help="render a PNG figure next to the data file")
    parser.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trimode", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"trimode {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    _add_common(sub.add_parser("steady", help="mean-field steady state"))
    _add_common(sub.add_parser("stability", help="linear stability verdict"), margin=True)
    _add_common(sub.add_parser("entangle", help="stationary entanglement"),
                pairs=True, margin=True)

    p_sweep = sub.add_parser("sweep", help="grid sweep from a config file")
    _add_common(p_sweep, pairs=True, margin=True, workers=True, plot=True)

    p_preset = sub.add_parser("preset", help="published-figure sweep")
    p_preset.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)} "
                                       "(fig4/fig5 alias the a,b panels)")
    p_preset.add_argument("--points", type=int, default=None,
                          help="dense-axis resolution override")
    _add_common(p_preset, pairs=True, workers=True, plot=True)

    _add_common(sub.add_parser("dump-matrices",
                               help="write A, M, D (and V when stable) as CSV"))
    return parser


def _effective_params(args) -> tuple[SystemParams, dict[str, float]]:
    params = load_params(args.config) if args.config else SystemParams()
    overrides = parse_overrides(args.overrides)
    if overrides:
        params = params.replace(**overrides)
    return params, overrides


def _meta(args, params: SystemParams | None, outputs: list[str],
          t0: float, extra: dict | None = None) -> dict:
    meta = {
        "tool": "trimode",
        "version": __version__,
        "subcommand": args.subcommand,
        "config": getattr(args, "config", None),
        "overrides": parse_overrides(args.overrides),
        "params": params.to_dict() if params is not None else None,
        "format": getattr(args, "format", None),
        "outputs": outputs,
        "timings": {"wall_s": time.monotonic() - t0},
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        meta.update(extra)
    return meta


def _write_sidecar(out_path: str, meta: dict) -> None:
    with open(out_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, default=str)
        fh.write("\n")


def _emit_point(args, payload: dict, csv_rows: list[tuple[str, str]],
                params: SystemParams, t0: float, extra: dict | None = None) -> None:
    fmt = args.format or "json"
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(key for key, _ in csv_rows),
                 ",".join(val for _, val in csv_rows)]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_sidecar(args.out, _meta(args, params, [args.out], t0, extra))
    else:
        sys.stdout.write(text)


def _f(x: float) -> str:
    return f"{float(x):.17e}"


def _cmd_steady(args) -> int:
    t0 = time.monotonic()
    params, _ = _effective_params(args)
    from .model import steady_state

    means = steady_state(params)
    payload = {
        "params": params.to_dict(),
        "alpha": [means.alpha.real, means.alpha.imag],
        "beta1": [means.beta1.real, means.beta1.imag],
        "beta2": [means.beta2.real, means.beta2.imag],
        "delta_eff": means.delta_eff,
        "g_eff": means.g_eff,
        "lambda_nl": means.lambda_nl,
        "residual": means.residual,
        "input_phase": means.input_phase,
    }
    rows = [
        ("alpha_re", _f(means.alpha.real)), ("alpha_im", _f(means.alpha.imag)),
        ("beta1_re", _f(means.beta1.real)), ("beta1_im", _f(means.beta1.imag)),
        ("beta2_re", _f(means.beta2.real)), ("beta2_im", _f(means.beta2.imag)),
        ("delta_eff", _f(means.delta_eff)), ("g_eff", _f(means.g_eff)),
        ("lambda_nl", _f(means.lambda_nl)), ("residual", _f(means.residual)),
        ("input_phase", _f(means.input_phase)),
    ]
    _emit_point(args, payload, rows, params, t0)
    return 0


def _cmd_stability(args) -> int:
    t0 = time.monotonic()
    params, _ = _effective_params(args)
    margin = args.margin or 0.0
    point = evaluate_point(params, (), margin)
    report = point.stability
    payload = {
        "params": params.to_dict(),
        "margin": margin,
        "stable": report.stable,
        "max_real_part": report.max_real_part,
        "eigenvalues": [[z.real, z.imag] for z in report.eigenvalues],
    }
    rows = [("stable", "true" if report.stable else "false"),
            ("max_real_part", _f(report.max_real_part))]
    for k, z in enumerate(report.eigenvalues, start=1):
        rows.append((f"eig{k}_re", _f(z.real)))
        rows.append((f"eig{k}_im", _f(z.imag)))
    _emit_point(args, payload, rows, params, t0, {"margin": margin})
    return 0


def _cmd_entangle(args) -> int:
    t0 = time.monotonic()
    params, _ = _effective_params(args)
    margin = args.margin or 0.0
    pairs = tuple(Bipartition.from_token(t) for t in (args.pairs or _PAIR_TOKENS))
    point = evaluate_point(params, pairs, margin)
    if not point.stability.stable:
        raise UnstableSystemError(
            f"system unstable at this point (max Re = "
            f"{point.stability.max_real_part:.6e}); no stationary state"
        )
    dark = dark_mode_coupling(params, point.means)
    payload = {
        "params": params.to_dict(),
        "margin": margin,
        "stable": True,
        "max_real_part": point.stability.max_real_part,
        "E_N": point.en,
        "min_symplectic": point.min_symplectic,
        "lyapunov_residual": point.covariance.residual,
        "mean_field_residual": point.means.residual,
        "dark_mode": {
            "cavity_bright": dark.cavity_bright,
            "cavity_dark": dark.cavity_dark,
            "bright_dark": dark.bright_dark,
        },
        "covariance": point.covariance.v.tolist(),
    }
    rows = [(p, _f(v)) for p, v in point.en.items()]
    _emit_point(args, payload, rows, params, t0, {"margin": margin, "pairs": list(point.en)})
    return 0


def _cmd_sweep(args, spec=None, preset_name=None) -> int:
    t0 = time.monotonic()
    overrides = parse_overrides(args.overrides)
    pairs = tuple(Bipartition.from_token(t) for t in args.pairs) if args.pairs else None
    if spec is None:
        if not args.config:
            raise ConfigError("sweep requires --config with [axis] sections")
        spec = load_sweep_spec(args.config, overrides=overrides, pairs=pairs,
                               margin=getattr(args, "margin", None))
    else:
        if overrides:
            spec = type(spec)(base=spec.base.replace(**overrides), axes=spec.axes,
                              bipartitions=pairs if pairs is not None else spec.bipartitions,
                              stability_margin=spec.stability_margin)
        elif pairs is not None:
            spec = type(spec)(base=spec.base, axes=spec.axes, bipartitions=pairs,
                              stability_margin=spec.stability_margin)
    if not args.out:
        raise ConfigError("sweep output requires --out PATH")
    fmt = args.format or "csv"
    records = run_sweep(spec, workers=args.workers)
    emit_results(records, fmt, args.out)
    outputs = [args.out]
    if args.plot:
        from .report import render_sweep_figure

        plot_path = args.out + ".png"
        render_sweep_figure(spec, records, plot_path)
        outputs.append(plot_path)
    axes_meta = [
        {"name": ax.name, "min": ax.minimum, "max": ax.maximum,
         "count": ax.count, "scale": ax.scale,
         "values": list(ax.values) if ax.values else None}
        for ax in spec.axes
    ]
    meta = _meta(args, spec.base, outputs, t0, {
        "preset": preset_name,
        "axes": axes_meta,
        "pairs": [p.value for p in spec.bipartitions],
        "margin": spec.stability_margin,
        "workers": args.workers,
        "format": fmt,
        "points": len(records),
    })
    _write_sidecar(args.out, meta)
    log.info("%d grid points -> %s", len(records), args.out)
    return 0


def _cmd_preset(args) -> int:
    kwargs = {}
    if args.points:
        kwargs = {"points_1d": args.points, "points_2d": args.points}
    try:
        spec = figure_preset(args.name, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return _cmd_sweep(args, spec=spec, preset_name=args.name)


def _cmd_dump_matrices(args) -> int:
    t0 = time.monotonic()
    params, _ = _effective_params(args)
    if not args.out:
        raise ConfigError("dump-matrices requires --out PREFIX")
    point = evaluate_point(params, (), 0.0)
    from .gaussian import solve_lyapunov

    model = point.model
    prefix = args.out
    written = []
    for tag, matrix in (("a_complex", model.a_complex),
                        ("m_drift", model.m_drift),
                        ("d_noise", model.d_noise)):
        path = f"{prefix}_{tag}.csv"
        save_matrix_csv(matrix, path)
        written.append(path)
    if point.stability.stable:
        cov = solve_lyapunov(model.m_drift, model.d_noise)
        path = f"{prefix}_covariance.csv"
        save_matrix_csv(cov.v, path)
        written.append(path)
    else:
        log.warning("point is unstable; covariance not written")
    _write_sidecar(prefix, _meta(args, params, written, t0,
                                 {"stable": point.stability.stable}))
    print("\n".join(written))
    return 0


_DISPATCH = {
    "steady": _cmd_steady,
    "stability": _cmd_stability,
    "entangle": _cmd_entangle,
    "sweep": _cmd_sweep,
    "preset": _cmd_preset,
    "dump-matrices": _cmd_dump_matrices,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")
    try:
        return _DISPATCH[args.subcommand](args)
    except ConfigError as exc:
        print(f"error: ConfigError: {exc}", file=sys.stderr)
        return 2
    except TrimodeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: OSError: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
