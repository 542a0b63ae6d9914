"""Command-line entry point ``ratebound``.

Subcommands: classify, region {list,eval,plot-data}, fm, typicality audit,
scheme derive, compare. JSON outputs embed the tool version and an
EXACT/BEST-EFFORT stamp; CSV outputs start with a header row. Errors go to
stderr as one JSON object and map to exit codes 2 (argument or state),
3 (resource) and 4 (invariant violation in outputs).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import ArgumentError, InvariantError, RateboundError
from .polyhedra import RatePolyhedron, fm_eliminate, normalize, parse_system

EXACT = "EXACT"
BEST_EFFORT = "BEST-EFFORT"


# ---------------------------------------------------------------------------
# output helpers


def _sig(v) -> str:
    """Ten significant digits for CSV cells."""
    if isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        v = float(v)
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    f = float(v)
    if not math.isfinite(f):
        raise InvariantError(f"non-finite value {f!r} in output")
    out = f"{f:.10g}"
    return "0" if out == "-0" else out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        f = float(v)
        if not math.isfinite(f):
            raise InvariantError(f"non-finite value {f!r} in output")
        return f
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _json_text(payload: dict, stamp: str) -> str:
    body = {"version": __version__, "stamp": stamp}
    body.update(payload)
    return json.dumps(_jsonable(body), indent=2, sort_keys=False) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_sig(x) for x in r])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise ArgumentError(f"cannot write {out}: {exc}") from None
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ArgumentError(f"cannot read {path}: {exc}") from None


def _poly_payload(p: RatePolyhedron) -> dict:
    return {"variables": list(p.variables), "infeasible": p.infeasible, "constraints": p.describe()}


def _need_seed(args) -> int:
    if args.seed is None:
        raise ArgumentError(f"--seed is required for the randomized subcommand {args.command!r}")
    return int(args.seed)


def _parse_aux(text: str | None):
    """``2`` for every auxiliary or ``U=2,V=3`` per auxiliary."""
    if text is None:
        return None
    text = text.strip()
    if "=" not in text:
        try:
            return int(text)
        except ValueError:
            raise ArgumentError(f"bad --aux value {text!r}") from None
    out = {}
    for part in text.split(","):
        name, _, val = part.partition("=")
        try:
            out[name.strip()] = int(val)
        except ValueError:
            raise ArgumentError(f"bad --aux entry {part!r}") from None
    return out


def _parse_fix(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        name, _, val = part.partition("=")
        try:
            out[name.strip()] = float(Fraction(val.strip()))
        except (ValueError, ZeroDivisionError):
            raise ArgumentError(f"bad --fix entry {part!r}") from None
    return out


def _grid(args) -> dict:
    g = {}
    if getattr(args, "k", None) is not None:
        g["k"] = int(args.k)
    if getattr(args, "samples", None) is not None:
        g["random_samples"] = int(args.samples)
    if getattr(args, "seed", None) is not None:
        g["seed"] = int(args.seed)
    return g


def load_pmf(path: str):
    """Joint pmf file: ``{"variables": [...], "table": nested lists}``."""
    from .prob_core import JointPmf

    data = _read_json(path)
    try:
        names = data["variables"]
        table = data["table"]
    except (KeyError, TypeError):
        raise ArgumentError(f"{path}: pmf file needs 'variables' and 'table'") from None

    def real(x):
        if isinstance(x, list):
            return [real(y) for y in x]
        return float(Fraction(x)) if isinstance(x, str) else float(x)

    return JointPmf(names, real(table))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_classify(args) -> str:
    from .channels import GaussianBcParams, GaussianIcParams, load_channel
    from .regimes import gaussian_cic_regime, gaussian_crc_regime, universal_condition_check

    ch = load_channel(args.channel)
    if isinstance(ch, GaussianBcParams):
        raise ArgumentError("regime classification covers interference and cognitive channels")
    if isinstance(ch, GaussianIcParams):
        info = gaussian_crc_regime(ch) if args.cognitive else gaussian_cic_regime(ch)
        payload = {k: v for k, v in info.items() if k != "labels"}
        payload["labels"] = {k: v.to_dict() for k, v in info["labels"].items()}
        return _json_text(payload, EXACT)
    if not args.condition:
        raise ArgumentError("--condition is required for discrete channels")
    seed = _need_seed(args)
    budget = {}
    if args.k is not None:
        budget["k"] = int(args.k)
    if args.samples is not None:
        budget["random_samples"] = int(args.samples)
    aux = _parse_aux(args.aux)
    if isinstance(aux, dict):
        raise ArgumentError("classify takes a single auxiliary cardinality")
    v = universal_condition_check(ch, args.condition, budget=budget, seed=seed, aux_card=aux)
    stamp = EXACT if v.status.startswith("Exact") or v.status == "CounterexampleFound" else BEST_EFFORT
    return _json_text(v.to_dict(), stamp)


def _cmd_region_list(args) -> str:
    from .region_catalog import list_regions

    regions = list_regions()
    return _json_text({"count": len(regions), "regions": regions}, EXACT)


def _cmd_region_eval(args) -> str:
    from .channels import DmNet, load_channel
    from .region_catalog import (
        evaluate_discrete,
        evaluate_gaussian,
        gaussian_vertices,
        get_region,
        sum_rate_capacity,
    )
    from .regimes import gaussian_cic_regime, gaussian_crc_regime, universal_condition_check

    spec = get_region(args.id)
    ch = load_channel(args.channel)
    fmt = args.format
    if spec.gaussian is not None:
        if isinstance(ch, DmNet):
            raise ArgumentError(f"{spec.rid} is a Gaussian closed form; give a Gaussian channel file")
        if spec.bound == "sum-rate":
            need = spec.gaussian.regime
            info = gaussian_crc_regime(ch, require_strong_test=False) if "CRC" in need else gaussian_cic_regime(ch)
            res = sum_rate_capacity(spec.rid, info, ch)
            if fmt == "csv":
                return _csv_text(["R1+R2"], [[res.value]])
            return _json_text(res.to_dict(), res.stamp)
        poly = evaluate_gaussian(spec.rid, ch, args.alpha_grid)
        verts = gaussian_vertices(spec.rid, ch, args.alpha_grid)
        if fmt == "csv":
            return _csv_text(list(spec.projected), verts)
        payload = {"region": spec.rid, "alpha_grid_size": args.alpha_grid, "vertices": [list(v) for v in verts]}
        payload.update(_poly_payload(poly))
        return _json_text(payload, spec.stamp())
    if not isinstance(ch, DmNet):
        raise ArgumentError(f"{spec.rid} is evaluated on discrete channels")
    seed = _need_seed(args)
    aux = _parse_aux(args.aux)
    if spec.bound == "sum-rate":
        verdict = universal_condition_check(ch, spec.regime, seed=seed)
        res = sum_rate_capacity(spec.rid, verdict, ch, grid=_grid(args), aux_cards=aux)
        if fmt == "csv":
            return _csv_text(["R1+R2"], [[res.value]])
        payload = res.to_dict()
        payload["regime_verdict"] = verdict.to_dict()
        return _json_text(payload, res.stamp)
    verdict = universal_condition_check(ch, spec.regime, seed=seed) if spec.regime else None
    res = evaluate_discrete(spec.rid, ch, aux_cards=aux, grid=_grid(args), fix=_parse_fix(args.fix), verdict=verdict)
    if fmt == "csv":
        rows = res.points if args.all_points else res.vertices
        return _csv_text(list(res.variables), rows)
    payload = res.to_dict()
    if verdict is not None:
        payload["regime_verdict"] = verdict.to_dict()
    return _json_text(payload, res.stamp)


def _cmd_plot_data(args) -> str:
    from .region_catalog import figure_data

    header, rows = figure_data(int(args.figure))
    return _csv_text(header, rows)


def _cmd_fm(args) -> str:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise ArgumentError(f"cannot read {args.input}: {exc}") from None
    p = parse_system(text)
    elim = [v.strip() for v in args.eliminate.split(",") if v.strip()]
    unknown = [v for v in elim if v not in p.variables]
    if unknown:
        raise ArgumentError(f"cannot eliminate unknown variables {unknown}")
    if args.closure:
        p = p.closure()
    out = normalize(fm_eliminate(p, elim), closure=args.closure)
    if args.format == "json":
        return _json_text(_poly_payload(out), EXACT)
    return "\n".join(out.describe()) + "\n" if not out.infeasible else "infeasible\n"


def _cmd_typicality(args) -> str:
    from .typicality import bound_audit

    seed = _need_seed(args)
    p = load_pmf(args.pmf)
    rep = bound_audit(p, int(args.n), float(args.eps1), float(args.eps2), trials=int(args.trials), seed=seed)
    # sampled brackets carry confidence margins, so audits are never EXACT
    return _json_text(rep.to_dict(), BEST_EFFORT)


def _cmd_scheme(args) -> str:
    from .scheme_graph import derive_region, load_graph

    g = load_graph(args.graph)
    joint = load_pmf(args.joint) if args.joint else None
    d = derive_region(g, joint, closure=args.closure)
    payload = {"graph": g.name, "lifted": d.system.lines(), "eliminate": list(d.system.eliminate)}
    if d.polyhedron is not None:
        payload["projected"] = _poly_payload(d.polyhedron)
    return _json_text(payload, EXACT if joint is None else BEST_EFFORT)


def _cmd_compare(args) -> str:
    from .channels import random_net
    from .region_catalog import evaluate_discrete, get_region, worst_violation

    seed = _need_seed(args)
    inner, outer = get_region(args.inner), get_region(args.outer)
    if inner.projected != outer.projected:
        raise ArgumentError("regions have different rate variables")
    try:
        sizes = tuple(int(x) for x in args.sizes.split(","))
    except ValueError:
        raise ArgumentError(f"bad --sizes {args.sizes!r}") from None
    if len(sizes) != 4:
        raise ArgumentError("--sizes needs four alphabet sizes x1,x2,y1,y2")
    aux = _parse_aux(args.aux)
    rows = []
    worst = float("-inf")
    for i in range(int(args.channels)):
        net = random_net(seed + i, sizes)
        grid = _grid(args)
        grid["seed"] = seed + i
        a = evaluate_discrete(inner.rid, net, aux_cards=aux, grid=grid)
        b = evaluate_discrete(outer.rid, net, aux_cards=aux, grid=grid)
        w = worst_violation(a.points, b.polyhedron)
        worst = max(worst, w)
        rows.append({"channel_seed": seed + i, "worst_violation": w, "contained": w <= args.tol})
    payload = {
        "inner": inner.rid,
        "outer": outer.rid,
        "channels": int(args.channels),
        "tolerance": args.tol,
        "worst_violation": worst,
        "contained": all(r["contained"] for r in rows),
        "per_channel": rows,
    }
    return _json_text(payload, BEST_EFFORT)


# ---------------------------------------------------------------------------
# parser


def _budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="random seed (required for randomized runs)")
    p.add_argument("--k", type=int, help="simplex grid denominator")
    p.add_argument("--samples", type=int, help="random distributions per search")
    p.add_argument("--aux", help="auxiliary cardinalities: N or NAME=N,...")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ratebound", description="Rate-region toolkit for two-user networks.")
    ap.add_argument("--version", action="version", version=f"ratebound {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="regime verdict for a channel file")
    p.add_argument("--channel", required=True)
    p.add_argument("--condition", help="condition id for discrete channels")
    p.add_argument("--cognitive", action="store_true", help="use the cognitive-channel Gaussian tests")
    _budget_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_classify)

    region = sub.add_parser("region", help="catalog regions")
    rsub = region.add_subparsers(dest="region_command", required=True)
    p = rsub.add_parser("list", help="catalog metadata")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_region_list)
    p = rsub.add_parser("eval", help="evaluate one region on a channel")
    p.add_argument("--id", required=True)
    p.add_argument("--channel", required=True)
    _budget_flags(p)
    p.add_argument("--fix", help="pin rates, e.g. R0=0")
    p.add_argument("--alpha-grid", type=int, default=201, dest="alpha_grid")
    p.add_argument("--all-points", action="store_true", dest="all_points", help="CSV of the full point cloud")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_region_eval)
    p = rsub.add_parser("plot-data", help="CSV curves of a comparison figure")
    p.add_argument("--figure", required=True, type=int, choices=(10, 12, 13, 15))
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plot_data)

    p = sub.add_parser("fm", help="Fourier-Motzkin projection of a text system")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--eliminate", required=True)
    p.add_argument("--closure", action="store_true", help="relax strict rows first")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fm)

    typ = sub.add_parser("typicality", help="typical-set audits")
    tsub = typ.add_subparsers(dest="typicality_command", required=True)
    p = tsub.add_parser("audit", help="bracket audit by enumeration and sampling")
    p.add_argument("--pmf", required=True)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--eps1", required=True, type=float)
    p.add_argument("--eps2", required=True, type=float)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_typicality)

    sch = sub.add_parser("scheme", help="coding-scheme graphs")
    ssub = sch.add_subparsers(dest="scheme_command", required=True)
    p = ssub.add_parser("derive", help="lifted constraints of a scheme graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--joint", help="pmf file over the graph's nodes and X1, X2, Y1, Y2")
    p.add_argument("--closure", action="store_true", help="relax strict rows before projecting")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_scheme)

    p = sub.add_parser("compare", help="inner-versus-outer containment on random channels")
    p.add_argument("--inner", required=True)
    p.add_argument("--outer", required=True)
    p.add_argument("--channels", type=int, default=10)
    p.add_argument("--sizes", default="2,2,2,2")
    p.add_argument("--tol", type=float, default=1e-6)
    _budget_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = int(exc.code or 0)
        if code:
            sys.stderr.write(json.dumps({"error": "argument", "message": "invalid command line"}) + "\n")
        return code
    if getattr(args, "format", "x") is None:
        args.format = "csv" if (args.out or "").endswith(".csv") else "json"
    try:
        text = args.func(args)
        _emit(text, args.out)
    except RateboundError as exc:
        sys.stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return exc.exit_code
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
