"""Command-line frontend ``fpp`` and JSON configuration handling.

Exit codes: 0 success, 2 a requested verification failed, 1 operational error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

from .boxes import classify_black, classify_white_gray
from .cubes import J_BOX, NBox, j_boxes_meeting
from .detour import LONG, REGIMES, SHORT, construct_detour_path, detour_conditions, short_conditions
from .env import (
    ATOMS,
    BLOCKED,
    UNIFORM,
    DistributionSpec,
    dump_environment,
    edge,
    format_weight,
    load_environment,
    sample_environment,
)
from .errors import FppError, ParseError, ValidationError
from .experiments import (
    ExperimentConfig,
    aggregate,
    csv_text,
    json_text,
    run_experiment,
    theorem_suite,
)
from .geodesics import (
    GeodesicDAG,
    enumerate_geodesics,
    first_passage_time,
    margin_box,
    margin_for,
    union_edges,
    _dijkstra,
    _t_num,
)
from .paths import LatticePath, format_path, parse_path, passage_time, straight_path

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fpp experiment configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["distribution"],
    "properties": {
        "d": {"type": "integer", "minimum": 2},
        "distribution": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": [ATOMS, UNIFORM]},
                "atoms": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/rational"}, "minItems": 2, "maxItems": 2}},
                "int_range": {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3},
            },
        },
        "pc_table": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": {"anyOf": [{"$ref": "#/$defs/rational"}, {"type": "null"}]}},
        },
        "N_grid": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "replicas": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "beta": {"$ref": "#/$defs/rational"},
        "alpha": {"$ref": "#/$defs/rational"},
        "n": {"type": "integer", "minimum": 1},
        "M": {"$ref": "#/$defs/rational"},
        "delta1": {"$ref": "#/$defs/rational"},
        "k": {"type": "integer", "minimum": 1},
        "caps": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "enumerate_up_to": {"type": "integer"},
                "enum_cap": {"type": "integer"},
                "attached_cap": {"type": "integer"},
                "swap_cap": {"type": "integer"},
            },
        },
        "margin_policy": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"kind": {"enum": ["certified", "fixed"]}, "margin": {"type": "integer", "minimum": 0}},
        },
        "statistics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"gray": {"type": "boolean"}, "deletion_check": {"type": "boolean"}},
        },
    },
    "$defs": {"rational": {"anyOf": [{"type": "integer"}, {"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"}]}},
}

_TOP_KEYS = set(CONFIG_SCHEMA["properties"])
_CAP_KEYS = {"enumerate_up_to", "enum_cap", "attached_cap", "swap_cap"}


def _rational(value, key):
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"{key}: expected an integer or a 'num/den' string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"{key}: cannot read {value!r} as a rational")


def _int(value, key):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{key}: expected an integer, got {value!r}")
    return value


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ParseError(f"{where}: unknown key {unknown[0]!r}")


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a validated configuration from decoded JSON."""
    _check_keys(raw, _TOP_KEYS, "config")
    if "distribution" not in raw:
        raise ParseError("config: missing key 'distribution'")
    d = _int(raw.get("d", 2), "d")
    dist = raw["distribution"]
    _check_keys(dist, {"kind", "atoms", "int_range"}, "distribution")
    pc_table = None
    if "pc_table" in raw:
        if not isinstance(raw["pc_table"], dict):
            raise ParseError("pc_table: expected an object")
        pc_table = {}
        for dim, entry in raw["pc_table"].items():
            if not isinstance(entry, list) or len(entry) != 2:
                raise ParseError(f"pc_table.{dim}: expected [p_c, directed p_c]")
            pc_table[int(dim)] = tuple(None if x is None else _rational(x, f"pc_table.{dim}") for x in entry)
    try:
        kind = dist.get("kind")
        if kind == ATOMS:
            atoms = [(_rational(w, "distribution.atoms"), _rational(p, "distribution.atoms")) for w, p in dist.get("atoms", [])]
            spec = DistributionSpec.from_atoms(atoms, d=d, pc_table=pc_table)
        elif kind == UNIFORM:
            lo, hi, den = (_int(x, "distribution.int_range") for x in dist.get("int_range", ()))
            spec = DistributionSpec.uniform(lo, hi, den, d=d, pc_table=pc_table)
        else:
            raise ParseError(f"distribution.kind: unknown kind {kind!r}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (ParseError, ValidationError)):
            raise
        raise ParseError(f"distribution: {exc}") from exc
    kwargs = {"spec": spec}
    if "N_grid" in raw:
        if not isinstance(raw["N_grid"], list):
            raise ParseError("N_grid: expected a list")
        kwargs["N_grid"] = tuple(_int(x, "N_grid") for x in raw["N_grid"])
    for key in ("replicas", "seed", "n", "k"):
        if key in raw:
            kwargs[key] = _int(raw[key], key)
    for key in ("beta", "alpha", "M", "delta1"):
        if key in raw:
            kwargs[key] = _rational(raw[key], key)
    if "caps" in raw:
        _check_keys(raw["caps"], _CAP_KEYS, "caps")
        for key, val in raw["caps"].items():
            kwargs[key] = _int(val, f"caps.{key}")
    if "margin_policy" in raw:
        mp = raw["margin_policy"]
        _check_keys(mp, {"kind", "margin"}, "margin_policy")
        if "kind" in mp:
            kwargs["margin_policy"] = mp["kind"]
        if "margin" in mp:
            kwargs["margin"] = _int(mp["margin"], "margin_policy.margin")
    if "statistics" in raw:
        st = raw["statistics"]
        _check_keys(st, {"gray", "deletion_check"}, "statistics")
        for key, val in st.items():
            if not isinstance(val, bool):
                raise ParseError(f"statistics.{key}: expected true or false")
            kwargs[key] = val
    try:
        return ExperimentConfig(**kwargs)
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def parse_config(path) -> ExperimentConfig:
    with open(path) as fh:
        text = fh.read()
    return parse_config_text(text)


def parse_config_text(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from exc
    return config_from_dict(raw)


def serialize_config(cfg: ExperimentConfig) -> dict:
    spec = cfg.spec
    dist = spec.to_json()
    out = {
        "d": spec.d,
        "distribution": dist,
        "pc_table": {
            str(dim): [None if x is None else format_weight(x) for x in entry] for dim, entry in sorted(spec.pc_table.items())
        },
        "N_grid": list(cfg.N_grid),
        "replicas": cfg.replicas,
        "seed": cfg.seed,
        "M": format_weight(cfg.M),
        "n": cfg.n,
        "delta1": format_weight(cfg.delta1),
        "k": cfg.k,
        "caps": {
            "enumerate_up_to": cfg.enumerate_up_to,
            "enum_cap": cfg.enum_cap,
            "attached_cap": cfg.attached_cap,
            "swap_cap": cfg.swap_cap,
        },
        "margin_policy": {"kind": cfg.margin_policy, "margin": cfg.margin},
        "statistics": {"gray": cfg.gray, "deletion_check": cfg.deletion_check},
    }
    if cfg.beta is not None:
        out["beta"] = format_weight(cfg.beta)
    if cfg.alpha is not None:
        out["alpha"] = format_weight(cfg.alpha)
    return out


def emit_plot_data(report, path):
    """Tab-separated ``N, statistic, mean, ci_lo, ci_hi`` rows sorted by ``N``."""
    p = getattr(report, "precision", 6)
    lines = ["N\tstatistic\tmean\tci_lo\tci_hi"]
    for N in sorted(report.per_N):
        for name, est in sorted(report.per_N[N].items()):
            lines.append(f"{N}\t{name}\t{est.mean:.{p}f}\t{est.ci_lo:.{p}f}\t{est.ci_hi:.{p}f}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass
class Verdict:
    ok: bool
    subject: str
    message: str
    witness: object = None


def _parse_vertex(text):
    try:
        return tuple(int(x) for x in text.strip().strip("()").split(","))
    except ValueError as exc:
        raise ParseError(f"bad vertex {text!r}") from exc


def _parse_edge(text):
    a, _, b = text.partition("-")
    if not b:
        raise ParseError(f"bad edge {text!r}; expected 'x,y-x,y'")
    return edge(_parse_vertex(a), _parse_vertex(b))


def _fmt_edge(e):
    return ",".join(map(str, e[0])) + "-" + ",".join(map(str, e[1]))


def verify(subject: str, inputs: dict) -> Verdict:
    """Check a claim and return a witness when it fails.

    * ``path-optimality``: ``env``, ``path`` -- fails with a strictly faster path.
    * ``pivotal-edge``: ``env``, ``v``, ``w``, ``edge`` -- fails with a geodesic avoiding the edge.
    * ``black-box``: ``env``, ``box`` (NBox), ``delta1``, ``M`` -- fails with the violated condition.
    * ``detour-conditions``: ``path``, ``box``; optional ``regime``, ``delta1``, ``fplus`` -- fails
      with the first violated condition index.
    """
    if subject == "path-optimality":
        env, p = inputs["env"], inputs["path"]
        t_p = passage_time(env, p)
        best = first_passage_time(env, p.start, p.end)
        if t_p is not BLOCKED and t_p == best.value:
            return Verdict(True, subject, f"passage time {format_weight(t_p)} is optimal")
        return Verdict(False, subject, f"{format_weight(t_p)} > {format_weight(best.value)}", best.one_geodesic)
    if subject == "pivotal-edge":
        env, v, w, e = inputs["env"], inputs["v"], inputs["w"], inputs["edge"]
        t = _t_num(env, v, w)
        dist, order = _dijkstra(env, v, target=w, blocked={e})
        if w in order and dist[w] == t:
            return Verdict(False, subject, f"a geodesic avoids {_fmt_edge(e)}", _trace_back_blocked(env, dist, order, w, e))
        return Verdict(True, subject, f"every geodesic uses {_fmt_edge(e)}")
    if subject == "black-box":
        env, B = inputs["env"], inputs["box"]
        cls = classify_black(env, B, inputs.get("delta1", 0), inputs.get("M", 10))
        if cls.black:
            return Verdict(True, subject, "box is black" + (" (degenerate)" if cls.notes else ""))
        return Verdict(False, subject, f"condition {cls.failing_condition} fails", (cls.failing_condition, tuple(cls.notes)))
    if subject == "detour-conditions":
        p, B = inputs["path"], inputs["box"]
        if inputs.get("regime", LONG) == SHORT:
            res = short_conditions(p, p.start, p.end, B)
        else:
            res = detour_conditions(p, p.start, p.end, B, delta1=inputs.get("delta1"), fplus=inputs.get("fplus"))
        bad = next(((k, r) for k, r in res.items() if not r.ok), None)
        if bad is None:
            return Verdict(True, subject, "all conditions hold", res)
        return Verdict(False, subject, f"condition {bad[0]} fails", (bad[0], bad[1].witness))
    raise ValueError(f"unknown verification subject {subject!r}")


def _trace_back_blocked(env, dist, order, w, e):
    """Lexicographic predecessor trace that never uses the blocked edge ``e``."""
    adj = env.adjacency()
    verts = [w]
    x = w
    while order[x] != 0:
        x = min(u for u, f, n in adj[x] if f != e and u in order and order[u] < order[x] and dist[u] + n == dist[x])
        verts.append(x)
    return LatticePath(reversed(verts))


def _box_arg(text, default_n=None) -> NBox:
    """``kind:l1,l2:n[:j]`` such as ``J:0,0:4:1`` or ``T:0,0:4``."""
    parts = text.split(":")
    try:
        kind = parts[0].upper()
        l = _parse_vertex(parts[1])
        n = int(parts[2]) if len(parts) > 2 else default_n
        j = int(parts[3]) if len(parts) > 3 else 0
        return NBox(l, n, kind, j)
    except (IndexError, ValueError, TypeError) as exc:
        raise ParseError(f"bad box {text!r}; expected kind:l:n[:j]") from exc


def _box_range(text):
    lo, _, hi = text.partition("..")
    if not hi:
        raise ParseError(f"bad box range {text!r}; expected lo..hi")
    return _parse_vertex(lo), _parse_vertex(hi)


def _load_config(args) -> ExperimentConfig:
    if not args.config:
        raise ParseError("--config is required for this command")
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _environment(args):
    """Environment from ``--env FILE`` or sampled from the config around ``0 -> N e_1``."""
    spec = None
    cfg = None
    if args.config:
        cfg = _load_config(args)
        spec = cfg.spec
    if getattr(args, "env", None):
        with open(args.env) as fh:
            env = load_environment(fh.read(), spec)
        v = _parse_vertex(args.source) if args.source else None
        w = _parse_vertex(args.target) if args.target else None
        return env, v, w
    if cfg is None:
        raise ParseError("give --env FILE or --config PATH")
    d = spec.d
    N = args.N if args.N is not None else cfg.N_grid[0]
    v = _parse_vertex(args.source) if args.source else (0,) * d
    w = _parse_vertex(args.target) if args.target else (N,) + (0,) * (d - 1)
    upper = passage_time(sample_environment(spec, margin_box(v, w, 0), cfg.seed), straight_path(v, w))
    try:
        m = min(margin_for(spec.fminus, sum(abs(a - b) for a, b in zip(v, w)), upper), cfg.margin)
    except FppError:
        m = cfg.margin
    return sample_environment(spec, margin_box(v, w, m), cfg.seed), v, w


def _out_dir(args):
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_sample(args) -> int:
    cfg = _load_config(args)
    lo, hi = _box_range(args.box)
    text = dump_environment(sample_environment(cfg.spec, (lo, hi), cfg.seed))
    if args.out:
        path = os.path.join(_out_dir(args), "environment.txt")
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_fpt(args) -> int:
    env, v, w = _environment(args)
    res = first_passage_time(env, v, w)
    print(f"t\t{format_weight(res.value)}")
    print(f"certified\t{'yes' if res.certified else 'restricted'}")
    print(f"geodesic\t{format_path(res.one_geodesic)}")
    return 0


def cmd_geodesics(args) -> int:
    env, v, w = _environment(args)
    cap = args.cap or 10**6
    if env.all_positive():
        dag = GeodesicDAG(env, v, w)
        count, union, piv = str(dag.total), dag.union(), dag.pivotal()
    else:
        geos = enumerate_geodesics(env, v, w, cap)
        count, union, piv = geos.count_label(), geos.union_edges, geos.pivotal_edges
    print(f"count\t{count}")
    print("union\t" + " ".join(_fmt_edge(e) for e in sorted(union)))
    print("pivotal\t" + " ".join(_fmt_edge(e) for e in sorted(piv)))
    return 0


def cmd_boxes(args) -> int:
    cfg = _load_config(args)
    env, v, w = _environment(args)
    union = union_edges(env, v, w, args.cap or 10**6)
    dag = GeodesicDAG(env, v, w) if env.all_positive() else enumerate_geodesics(env, v, w, args.cap or 10**6)
    verts = [x for e in union for x in e]
    lo = tuple(min(c) for c in zip(*verts))
    hi = tuple(max(c) for c in zip(*verts))
    rows = ["l,j,n,black,white,gray,failing_condition"]
    for B in j_boxes_meeting(lo, hi, cfg.n, env.d):
        if not all(e1 <= a and b <= e2 for a, b, e1, e2 in zip(B.lo, B.hi, env.lo, env.hi)):
            continue
        try:
            black = classify_black(env, B, cfg.delta1, cfg.M)
        except FppError:
            black = None
        cls = classify_white_gray(env, B, dag, black)
        rows.append(
            f"\"{','.join(map(str, B.l))}\",{B.j},{B.n},{_b(cls.black)},{_b(cls.white)},{_b(cls.gray)},{cls.failing_condition or ''}"
        )
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(os.path.join(_out_dir(args), "boxes.csv"), "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _b(x):
    return "" if x is None else ("1" if x else "0")


def cmd_detour(args) -> int:
    B = _box_arg(args.box)
    if B.kind != J_BOX:
        raise ParseError("detours live in J boxes")
    a, b = _parse_vertex(args.a), _parse_vertex(args.b)
    p = construct_detour_path(a, b, B, B.n, args.regime)
    print(format_path(p))
    if args.regime == SHORT:
        res = short_conditions(p, a, b, B)
    else:
        res = detour_conditions(p, a, b, B)
    ok = True
    for key, r in res.items():
        ok &= r.ok
        print(f"condition {key}\t{'pass' if r.ok else 'FAIL'}\t{'' if r.witness is None else r.witness}")
    return 0 if ok else 2


def cmd_experiment(args) -> int:
    cfg = _load_config(args)
    if args.cap:
        cfg = replace(cfg, enum_cap=args.cap)
    threads = args.threads if args.threads is not None else os.cpu_count()
    stats = run_experiment(cfg, threads)
    out = _out_dir(args)
    with open(os.path.join(out, "replicas.csv"), "w", newline="") as fh:
        fh.write(csv_text(stats))
    report = aggregate(stats)
    with open(os.path.join(out, "aggregate.json"), "w") as fh:
        fh.write(json_text(report))
    emit_plot_data(report, os.path.join(out, "plot.tsv"))
    rows = theorem_suite(cfg, stats)
    with open(os.path.join(out, "verdicts.tsv"), "w") as fh:
        fh.write("theorem\tN\tstatistic\tmean\tci_lo\tci_hi\tverdict\n")
        for r in rows:
            fh.write(f"{r['theorem']}\t{r['N']}\t{r['statistic']}\t{r['mean']:.6f}\t{r['ci_lo']:.6f}\t{r['ci_hi']:.6f}\t{r['verdict']}\n")
    failed = sum(1 for s in stats for f in s.flags if f.endswith("-fail") or f.endswith("-mismatch"))
    print(f"{len(stats)} replicas written to {out}; {failed} per-sample check failures")
    return 2 if failed else 0


def cmd_verify(args) -> int:
    inputs = {}
    if args.subject in ("path-optimality", "pivotal-edge", "black-box"):
        env, v, w = _environment(args)
        inputs.update(env=env, v=v, w=w)
    if args.path:
        inputs["path"] = parse_path(args.path)
    elif args.path_file:
        with open(args.path_file) as fh:
            inputs["path"] = parse_path(fh.read())
    if args.edge:
        inputs["edge"] = _parse_edge(args.edge)
    if args.box:
        inputs["box"] = _box_arg(args.box)
    if args.config:
        cfg = _load_config(args)
        inputs.update(delta1=cfg.delta1, M=cfg.M, fplus=cfg.spec.fplus)
    if args.regime:
        inputs["regime"] = args.regime
    required = {
        "path-optimality": ("env", "path"),
        "pivotal-edge": ("env", "v", "w", "edge"),
        "black-box": ("env", "box"),
        "detour-conditions": ("path", "box"),
    }[args.subject]
    missing = [k for k in required if inputs.get(k) is None]
    if missing:
        raise ParseError(f"missing input(s): {', '.join(missing)}")
    verdict = verify(args.subject, inputs)
    print(f"{args.subject}\t{'pass' if verdict.ok else 'FAIL'}\t{verdict.message}")
    if not verdict.ok and verdict.witness is not None:
        wit = verdict.witness
        print("witness\t" + (format_path(wit) if hasattr(wit, "vertices") else str(wit)))
    return 0 if verdict.ok else 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, help="override the configured seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    common.add_argument("--cap", type=int, help="enumeration cap")

    endpoints = argparse.ArgumentParser(add_help=False)
    endpoints.add_argument("--env", help="environment dump (see 'fpp sample')")
    endpoints.add_argument("--from", dest="source", help="start vertex, e.g. 0,0")
    endpoints.add_argument("--to", dest="target", help="end vertex")
    endpoints.add_argument("--N", type=int, help="use endpoints 0 and N e_1")

    parser = argparse.ArgumentParser(prog="fpp", description="Exact first-passage percolation toolkit.")
    parser.add_argument("--schema", action="store_true", help="print the configuration JSON schema and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("sample", parents=[common], help="dump a sampled environment")
    p.add_argument("--box", required=True, help="lo..hi, e.g. 0,0..4,4")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fpt", parents=[common, endpoints], help="first passage time and one geodesic")
    p.set_defaults(func=cmd_fpt)

    p = sub.add_parser("geodesics", parents=[common, endpoints], help="geodesic count, union and pivotal edges")
    p.set_defaults(func=cmd_geodesics)

    p = sub.add_parser("boxes", parents=[common, endpoints], help="classify J boxes along the geodesics")
    p.set_defaults(func=cmd_boxes)

    p = sub.add_parser("detour", parents=[common], help="planted detour path and its condition table")
    p.add_argument("--box", required=True, help="J:l1,l2:n:j")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--regime", choices=REGIMES, default=LONG)
    p.set_defaults(func=cmd_detour)

    p = sub.add_parser("experiment", parents=[common], help="run the Monte Carlo experiment")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", parents=[common, endpoints], help="check a claim and print a witness on failure")
    p.add_argument("subject", choices=["path-optimality", "pivotal-edge", "black-box", "detour-conditions"])
    p.add_argument("--path", help="vertex list, e.g. '(0,0) (1,0)'")
    p.add_argument("--path-file")
    p.add_argument("--edge", help="x,y-x,y")
    p.add_argument("--box", help="kind:l:n[:j]")
    p.add_argument("--regime", choices=REGIMES)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        print(json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True))
        return 0
    if not getattr(args, "func", None):
        parser.print_help()
        return 1
    try:
        return args.func(args)
    except (FppError, OSError, ValueError, KeyError) as exc:
        print(f"fpp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
