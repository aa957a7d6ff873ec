"""Command-line front end.

Every run writes either a CSV file (``#`` metadata lines, then a header and
rows) or a single JSON object; both embed the full configuration and the
package version, and contain no timestamps, so reruns are byte-identical.

Exit codes: 0 success, 1 failed acceptance check, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import experiments as ex
from .environment import P2PParams
from .numerics import arcsine_cdf, gamma_cdf, ks_statistic
from .partition import DEFAULT_S_GRID
from .sampling import SEED_ENV_VAR, ModelParams, default_master_seed


class UsageError(Exception):
    pass


def _model(args) -> ModelParams:
    try:
        return ModelParams(args.mu, args.theta)
    except ValueError as err:
        raise UsageError(f"need 0 < theta < mu (got mu={args.mu}, theta={args.theta}): {err}") from None


def _positive(name, value):
    if value < 1:
        raise UsageError(f"--{name} must be a positive integer")


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "output", "workers")}
    cfg["version"] = __version__
    return cfg


def _write(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_csv(args, header, rows) -> None:
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(_config(args), sort_keys=True)}\n")
    buf.write(f"# version: {__version__}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _write(args, buf.getvalue())


def _emit_json(args, summary: dict) -> None:
    obj = {"config": _config(args), "version": __version__, "summary": summary}
    _write(args, json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v))


# statistics computed from streaming DP chunks


def _endpoint_chunk(out, n, K, tail_K):
    logq = ex.log_normalize(out[n])
    prev = ex.log_normalize(out[n - 1])
    return (
        ex.centered_windows(logq, K),
        ex.stat_favourite(logq),
        ex.stat_In(prev),
        ex.tail_masses(logq, tail_K),
    )


def cmd_endpoint(args) -> int:
    params = _model(args)
    _positive("n", args.n)
    _positive("replicas", args.replicas)
    parts = ex.dp_statistics(
        args.seed,
        "endpoint",
        params,
        [args.n - 1, args.n],
        args.replicas,
        functools.partial(_endpoint_chunk, n=args.n, K=args.K, tail_K=args.tail_K),
        args.workers,
    )
    windows, fav, i_n, tails = (np.concatenate([p[i] for p in parts]) for i in range(4))
    if args.format == "json":
        _emit_json(
            args,
            {
                "mean_window": windows.mean(axis=0),
                "mean_I_n": float(i_n.mean()),
                "mean_tail_mass": float(tails.mean()),
                "mean_l_n_over_n": float(fav.mean() / args.n),
            },
        )
        return 0
    rows = (
        (r, args.n, int(fav[r]), float(i_n[r]), float(tails[r]), k - args.K, float(windows[r, k]))
        for r in range(args.replicas)
        for k in range(2 * args.K + 1)
    )
    _emit_csv(args, ["replica", "n", "l_n", "I_n", "tail_mass", "k", "mass"], rows)
    return 0


def cmd_arcsine(args) -> int:
    params = _model(args)
    _positive("n", args.n)
    _positive("replicas", args.replicas)
    ell = ex.walk_statistics(args.seed, "arcsine", args.n, params, args.replicas, ex.walk_favourite, args.workers)
    if args.format == "csv":
        _emit_csv(args, ["replica", "n", "l_n", "l_n_over_n"], ((r, args.n, int(v), v / args.n) for r, v in enumerate(ell)))
        return 0
    d, p = ks_statistic(ell / args.n, arcsine_cdf)
    _emit_json(args, {"ks_D": d, "ks_pvalue": p, "mean_l_n_over_n": float(ell.mean() / args.n)})
    return 0


def _profiles(rows, s_grid, scale):
    n = rows.shape[1] - 1
    logq = ex.laws_from_walks(rows)
    k = np.floor(n * s_grid + 1e-12).astype(int)
    norm = math.sqrt(n) if scale == "sqrt" else n
    return -logq[:, k] / norm


def cmd_ldp(args) -> int:
    params = _model(args)
    _positive("n", args.n)
    _positive("replicas", args.replicas)
    if not 0.0 <= args.s <= 1.0:
        raise UsageError("--s must lie in [0, 1]")
    grid = np.unique(np.concatenate([DEFAULT_S_GRID, [args.s]]))
    prof = ex.walk_statistics(
        args.seed,
        "ldp",
        args.n,
        params,
        args.replicas,
        functools.partial(_profiles, s_grid=grid, scale=args.scale),
        args.workers,
    )
    mean = prof.mean(axis=0)
    if args.format == "csv":
        _emit_csv(args, ["s", "mean_profile"], zip(grid.tolist(), mean.tolist()))
        return 0
    drift = params.drift()
    expected = args.s * drift if drift >= 0 else (1.0 - args.s) * -drift
    at_s = float(mean[np.searchsorted(grid, args.s)])
    summary = {"rate": at_s, "scale": args.scale, "profile": dict(zip(map(str, grid.tolist()), mean.tolist()))}
    if args.scale == "linear":
        summary["expected_rate"] = expected
    _emit_json(args, summary)
    return 0


def cmd_limit(args) -> int:
    params = _model(args)
    _positive("replicas", args.replicas)
    xi = ex.xi_windows(args.seed, "limit", args.K, params, args.replicas, args.workers)
    if args.format == "json":
        _emit_json(args, {"mean_window": xi.mean(axis=0), "mean_xi_0": float(xi[:, args.K].mean())})
        return 0
    rows = ((r, k - args.K, float(xi[r, k])) for r in range(args.replicas) for k in range(2 * args.K + 1))
    _emit_csv(args, ["replica", "k", "mass"], rows)
    return 0


def cmd_p2p(args) -> int:
    try:
        par = P2PParams(args.p, args.q, args.N, args.mu, args.theta_N, args.theta_S)
    except ValueError as err:
        raise UsageError(f"need 0 < theta_N, theta_S < mu and positive p, q, N: {err}") from None
    _positive("replicas", args.replicas)
    m, mode, windows = ex.p2p_ensemble(args.seed, "p2p", par, args.replicas, args.K, args.workers)
    x = m / (4 * par.p * par.q * par.N) + 0.5
    if args.format == "json":
        summary = {"mean_mode_mass": float(mode.mean()), "mean_window": windows.mean(axis=0)}
        if math.isclose(par.theta_N, par.theta_S):
            d, p = ks_statistic(x, arcsine_cdf)
            summary.update(ks_D=d, ks_pvalue=p)
        _emit_json(args, summary)
        return 0
    header = ["replica", "N", "p", "q", "thetaN", "thetaS", "m_N", "mode_mass"]
    header += [f"w{j}" for j in range(windows.shape[1])]
    rows = (
        [r, par.N, par.p, par.q, par.theta_N, par.theta_S, int(m[r]), float(mode[r])] + windows[r].tolist()
        for r in range(args.replicas)
    )
    _emit_csv(args, header, rows)
    return 0


def _ratio_chunk(out, n):
    row, prev = out[n], out[n - 1]
    return np.exp(-(row[:, 1:] - prev)).ravel(), np.exp(-(row[:, :-1] - prev)).ravel()


def cmd_stationarity(args) -> int:
    params = _model(args)
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    _positive("replicas", args.replicas)
    parts = ex.dp_statistics(
        args.seed, "stationarity", params, [args.n - 1, args.n], args.replicas,
        functools.partial(_ratio_chunk, n=args.n), args.workers,
    )
    inv_u = np.concatenate([p[0] for p in parts])
    inv_v = np.concatenate([p[1] for p in parts])
    d_u, p_u = ks_statistic(inv_u, lambda x: gamma_cdf(x, params.theta))
    d_v, p_v = ks_statistic(inv_v, lambda x: gamma_cdf(x, params.mu - params.theta))
    _emit_json(args, {"ks_D_U": d_u, "ks_pvalue_U": p_u, "ks_D_V": d_v, "ks_pvalue_V": p_v, "pooled": inv_u.size})
    return 0


def cmd_verify_all(args) -> int:
    from .acceptance import run_all

    results = run_all(args.seed, args.workers, report=lambda line: print(line, file=sys.stderr, flush=True))
    if args.output is not None:
        _emit_json(args, {"criteria": [r.__dict__ for r in results], "all_passed": all(r.passed for r in results)})
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loggamma-polymer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"master seed (default: ${SEED_ENV_VAR} or 7)")
    common.add_argument("--workers", type=int, default=1, help="worker processes; results do not depend on it")
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--mu", type=float, default=2.0)
    model.add_argument("--theta", type=float, default=1.0)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("endpoint", parents=[common, model], help="centred endpoint windows, l_n, I_n, tail masses")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--replicas", type=int, default=100)
    p.add_argument("--K", type=int, default=15)
    p.add_argument("--tail-K", type=int, default=25)
    p.set_defaults(func=cmd_endpoint, default_format="csv")

    p = sub.add_parser("arcsine", parents=[common, model], help="favourite endpoint vs the arcsine law")
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--replicas", type=int, default=10_000)
    p.set_defaults(func=cmd_arcsine, default_format="json")

    p = sub.add_parser("ldp", parents=[common, model], help="large deviation profile of the endpoint law")
    p.add_argument("--n", type=int, default=8192)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--replicas", type=int, default=200)
    p.add_argument("--scale", choices=("linear", "sqrt"), default="linear")
    p.set_defaults(func=cmd_ldp, default_format="json")

    p = sub.add_parser("limit", parents=[common, model], help="samples of the limiting endpoint law")
    p.add_argument("--K", type=int, default=15)
    p.add_argument("--replicas", type=int, default=1000)
    p.set_defaults(func=cmd_limit, default_format="csv")

    p = sub.add_parser("p2p", parents=[common], help="point-to-point crossing statistics")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--theta-N", dest="theta_N", type=float, default=1.0)
    p.add_argument("--theta-S", dest="theta_S", type=float, default=1.0)
    p.add_argument("--replicas", type=int, default=100)
    p.add_argument("--K", type=int, default=10)
    p.set_defaults(func=cmd_p2p, default_format="csv")

    p = sub.add_parser("stationarity", parents=[common, model], help="ratio variables vs their gamma laws")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--replicas", type=int, default=2000)
    p.set_defaults(func=cmd_stationarity, default_format="json")

    p = sub.add_parser("verify-all", parents=[common], help="run the full acceptance suite")
    p.set_defaults(func=cmd_verify_all, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        try:
            args.seed = default_master_seed()
        except ValueError:
            parser.exit(2, f"error: ${SEED_ENV_VAR} must be an integer\n")
    if not 0 <= args.seed < 2**64:
        parser.exit(2, "error: --seed must be a nonnegative 64-bit integer\n")
    if args.format is None:
        args.format = args.default_format
    del args.default_format
    if args.workers < 1:
        parser.exit(2, "error: --workers must be at least 1\n")
    try:
        return args.func(args)
    except UsageError as err:
        parser.exit(2, f"error: {err}\n")


if __name__ == "__main__":
    sys.exit(main())
