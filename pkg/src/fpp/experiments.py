"""Monte Carlo driver: per-replica exact statistics and their aggregation.

Each replica samples an environment around the segment from ``0`` to ``N e_1``
with a seed derived from ``(config seed, N, replica index)``, so results do not
depend on scheduling or on which other replicas ran.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from statistics import NormalDist

from .boxes import classify_black, classify_white_gray, crosses_short, is_g_turn_box
from .cubes import NBox, j_boxes_meeting
from .detour import DEGENERATE, LONG, SHORT, choose_regime, construct_detour_path
from .env import ATOMS, DistributionSpec, draw_weight, sample_environment
from .errors import CapExceeded, InfeasibleGeometry, NoCertificate, UncertifiedFPT
from .geodesics import (
    GeodesicDAG,
    attached_first_passage_time,
    boundary_hits,
    enumerate_geodesics,
    first_passage_time,
    gamma_b_condition,
    gamma_b_probability,
    margin_box,
    margin_for,
    pivotal_edges_by_deletion,
    resample_box,
)
from .paths import admissible_full_swap, classify_turns, count_gturns, passage_time, straight_path, swap_g_turns

REPORT_HEADER = (
    "Finite-N surrogates: the limit theorems concern N -> infinity with non-explicit constants; "
    "verdicts below are positivity/boundedness checks with 95% normal confidence intervals."
)

CSV_COLUMNS = [
    "N", "replica", "t_num", "t_den", "tplus_num", "tplus_den", "count_or_log2",
    "union", "pivotal", "K", "gturn_min_O", "gturn_min_Oplus", "gray", "chain_ok", "flags",
]


def default_alpha(spec: DistributionSpec) -> Fraction:
    """Largest atom leaving positive mass above it; the median for uniform laws."""
    if spec.kind == ATOMS:
        below_top = [w for w, _ in spec.atoms[:-1]]
        return below_top[-1] if below_top else spec.atoms[0][0]
    lo, hi, den = spec.int_range
    return Fraction((lo + hi) // 2, den)


@dataclass(frozen=True)
class ExperimentConfig:
    spec: DistributionSpec
    N_grid: tuple = (6, 10)
    replicas: int = 10
    seed: int = 0
    M: Fraction = Fraction(10)
    beta: Fraction | None = None  # None: M^-2
    alpha: Fraction | None = None  # None: default_alpha(spec)
    n: int = 4
    delta1: Fraction = Fraction(0)
    k: int = 2
    margin_policy: str = "certified"  # or "fixed"
    margin: int = 64  # fixed margin, or the largest certified margin accepted
    enumerate_up_to: int = 10  # full O and O+ enumeration for N at most this
    enum_cap: int = 10**6
    attached_cap: int = 10**7
    swap_cap: int = 64  # geodesics whose swaps are checked per replica
    gray: bool = False
    deletion_check: bool = True

    def __post_init__(self):
        grid = tuple(int(x) for x in self.N_grid)
        if not grid or any(x < 1 for x in grid) or list(grid) != sorted(set(grid)):
            raise ValueError("N_grid must be a non-empty strictly ascending list of positive integers")
        if self.replicas < 1:
            raise ValueError("replicas must be at least 1")
        if self.margin_policy not in ("certified", "fixed"):
            raise ValueError(f"unknown margin policy {self.margin_policy!r}")
        object.__setattr__(self, "N_grid", grid)
        for name in ("M", "delta1"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        for name in ("beta", "alpha"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.M <= 0:
            raise ValueError("M must be positive")

    @property
    def beta_value(self) -> Fraction:
        return self.beta if self.beta is not None else 1 / self.M**2

    @property
    def alpha_value(self) -> Fraction:
        return self.alpha if self.alpha is not None else default_alpha(self.spec)


def replica_seed(seed: int, N: int, index: int, stream: int = 0) -> int:
    h = hashlib.blake2b(struct.pack("<QqqI", seed % (1 << 64), N, index, stream), digest_size=8)
    return int.from_bytes(h.digest(), "little")


@dataclass
class ReplicaStats:
    N: int
    replica: int
    seed: int
    margin: int
    t: Fraction
    t_plus: Fraction | None
    count: int | None
    union_size: int
    pivotal_size: int
    K_size: int
    max_len: int | None
    min_gturns_O: int | None = None
    min_gturns_Oplus: int | None = None
    gray_count: int | None = None
    chain_ok: bool | None = None
    swap_ok: bool | None = None
    swaps_checked: int = 0
    deletion_ok: bool | None = None
    count_bound_ok: bool | None = None
    flags: tuple = ()

    @property
    def log2_count(self):
        return None if self.count is None else math.log2(self.count)


def _straight_time(spec, seed, v, w, override=None):
    total = Fraction(0)
    for e in straight_path(v, w).edges():
        total += override(e) if override is not None else draw_weight(spec, seed, e)
    return total


def choose_margin(cfg: ExperimentConfig, v, w, upper) -> tuple:
    """``(margin, flags)`` following the configured policy."""
    if cfg.margin_policy == "fixed":
        return cfg.margin, ("restricted",)
    try:
        m = margin_for(cfg.spec.fminus, sum(abs(a - b) for a, b in zip(v, w)), upper)
    except NoCertificate:
        return None, ("restricted",)
    if m > cfg.margin:
        return None, ("restricted",)
    return m, ()


def _doubling_margin(cfg, v, w, seed):
    """Grow the box until the restricted passage time repeats; flagged Restricted."""
    m, prev = 1, None
    while True:
        env = sample_environment(cfg.spec, margin_box(v, w, m), seed)
        t = first_passage_time(env, v, w).value
        if t == prev or 2 * m > cfg.margin:
            return m
        prev, m = t, 2 * m


def run_replica(cfg: ExperimentConfig, N: int, index: int) -> ReplicaStats:
    spec = cfg.spec
    d = spec.d
    seed = replica_seed(cfg.seed, N, index)
    v = (0,) * d
    w = (N,) + (0,) * (d - 1)
    flags = set()
    upper = _straight_time(spec, seed, v, w)
    m, f = choose_margin(cfg, v, w, upper)
    flags.update(f)
    if m is None:
        m = _doubling_margin(cfg, v, w, seed)
    env = sample_environment(spec, margin_box(v, w, m), seed)
    fpt = first_passage_time(env, v, w)
    t = fpt.value
    alpha = cfg.alpha_value
    beta = cfg.beta_value

    geos = None
    if env.all_positive():
        dag = GeodesicDAG(env, v, w)
        count = dag.total
        union = dag.union()
        pivotal = dag.pivotal()
        max_len = dag.longest_length()
    else:
        dag = None
        geos = enumerate_geodesics(env, v, w, cfg.enum_cap)
        if geos.saturated:
            flags.add("saturated")
            count = None
        else:
            count = geos.count
        union, pivotal = geos.union_edges, geos.pivotal_edges
        max_len = max(len(p) for p in geos.sample_paths)

    stats = ReplicaStats(
        N=N, replica=index, seed=seed, margin=m, t=t, t_plus=None, count=count,
        union_size=len(union), pivotal_size=len(pivotal),
        K_size=sum(1 for e in union if env.weight(e) > alpha), max_len=max_len,
    )
    if count is not None:
        stats.count_bound_ok = count <= (2 * d) ** max_len
        if not stats.count_bound_ok:
            flags.add("count-bound-fail")
    if cfg.deletion_check and count is not None:
        stats.deletion_ok = pivotal_edges_by_deletion(env, v, w, union) == pivotal
        if not stats.deletion_ok:
            flags.add("pivotal-mismatch")

    if N <= cfg.enumerate_up_to:
        if geos is None:
            geos = enumerate_geodesics(env, v, w, cfg.enum_cap)
        if geos.saturated:
            flags.add("saturated")
        else:
            if count is not None and geos.count != count:
                flags.add("count-mismatch")
            O = geos.sample_paths
            stats.min_gturns_O = min(count_gturns(env, p) for p in O)
            try:
                att = attached_first_passage_time(env, v, w, beta, cfg.attached_cap)
            except CapExceeded as exc:
                flags.add("attached-cap")
                stats.t_plus = exc.best
            else:
                stats.t_plus = att.value
                stats.min_gturns_Oplus = min(count_gturns(env, p) for p in att.optimizers)
                gap = stats.t_plus - t
                stats.chain_ok = beta * stats.min_gturns_Oplus <= gap <= beta * stats.min_gturns_O
                if not stats.chain_ok:
                    flags.add("chain-fail")
            ok, checked = _check_swaps(env, O[: cfg.swap_cap], t)
            stats.swap_ok, stats.swaps_checked = ok, checked
            if not ok:
                flags.add("swap-fail")

    if cfg.gray:
        stats.gray_count, gflags = _gray_count(cfg, env, dag, geos, union)
        flags.update(gflags)
    stats.flags = tuple(sorted(flags))
    return stats


def _check_swaps(env, paths, t) -> tuple:
    """Every single and greedy-full admissible G-turn swap keeps the passage time."""
    checked = 0
    for p in paths:
        gturns = classify_turns(env, p).gturn_indices()
        subsets = [[i] for i in gturns]
        full = admissible_full_swap(gturns)
        if len(full) > 1:
            subsets.append(full)
        for sub in subsets:
            q = swap_g_turns(env, p, sub)
            checked += 1
            if passage_time(env, q) != t:
                return False, checked
    return True, checked


def _gray_count(cfg, env, dag, geos, union):
    """Gray J boxes at scale ``n`` meeting the geodesic union and fully inside the box."""
    flags = set()
    if not union:
        return 0, flags
    verts = [x for e in union for x in e]
    lo = tuple(min(c) for c in zip(*verts))
    hi = tuple(max(c) for c in zip(*verts))
    count = 0
    source = dag if dag is not None else geos
    for B in j_boxes_meeting(lo, hi, cfg.n, env.d):
        if not all(e1 <= a and b <= e2 for a, b, e1, e2 in zip(B.lo, B.hi, env.lo, env.hi)):
            continue
        cls = classify_white_gray(env, B, source)
        if cls.white is None:
            flags.add("white-unknown")
            continue
        if not cls.white:
            continue
        try:
            black = classify_black(env, B, cfg.delta1, cfg.M)
        except UncertifiedFPT:
            flags.add("black-uncertified")
            continue
        if "degenerate-blackness" in black.notes:
            flags.add("degenerate-blackness")
        if black.black:
            count += 1
    return count, flags


def run_experiment(cfg: ExperimentConfig, threads: int | None = 1) -> list:
    """All replicas of every ``N`` in the grid, ordered by ``(N, replica)``."""
    jobs = [(N, i) for N in cfg.N_grid for i in range(cfg.replicas)]
    if threads is None or threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_job, [(cfg, N, i) for N, i in jobs], chunksize=4))
    else:
        results = [run_replica(cfg, N, i) for N, i in jobs]
    return sorted(results, key=lambda s: (s.N, s.replica))


def _run_job(args):
    return run_replica(*args)


def _fmt_opt(x):
    return "" if x is None else str(x)


def _fmt_bool(x):
    return "" if x is None else ("1" if x else "0")


def replica_row(s: ReplicaStats) -> list:
    tp = s.t_plus
    return [
        s.N, s.replica, s.t.numerator, s.t.denominator,
        "" if tp is None else tp.numerator, "" if tp is None else tp.denominator,
        "SATURATED" if s.count is None else s.count,
        s.union_size, s.pivotal_size, s.K_size,
        _fmt_opt(s.min_gturns_O), _fmt_opt(s.min_gturns_Oplus), _fmt_opt(s.gray_count),
        _fmt_bool(s.chain_ok), ";".join(s.flags),
    ]


def csv_text(stats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in stats:
        writer.writerow(replica_row(s))
    return buf.getvalue()


def write_csv(stats, path):
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(stats))


@dataclass
class Estimate:
    n: int
    mean: float
    variance: float
    ci_lo: float
    ci_hi: float
    exact_mean: Fraction | None = None


_Z95 = NormalDist().inv_cdf(0.975)


def estimate(values) -> Estimate:
    """Mean, sample variance and 95% normal-approximation interval.

    Rational inputs keep an exact mean; the interval is rendered in floating
    point because it involves a square root.
    """
    values = list(values)
    n = len(values)
    exact = all(isinstance(x, (int, Fraction)) for x in values)
    if exact:
        mean_q = sum((Fraction(x) for x in values), Fraction(0)) / n
        var_q = sum(((Fraction(x) - mean_q) ** 2 for x in values), Fraction(0)) / (n - 1) if n > 1 else Fraction(0)
        mean, var = float(mean_q), float(var_q)
    else:
        mean_q = None
        mean = math.fsum(values) / n
        var = math.fsum((x - mean) ** 2 for x in values) / (n - 1) if n > 1 else 0.0
    half = _Z95 * math.sqrt(var / n)
    return Estimate(n, mean, var, mean - half, mean + half, mean_q)


@dataclass
class AggregateReport:
    per_N: dict  # N -> {statistic: Estimate}
    checks: dict  # N -> {check: (passed, evaluated)}
    pivotal_c: float | None
    precision: int = 6
    header: str = REPORT_HEADER
    trends: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        p = self.precision

        def fmt(x):
            return None if x is None else f"{x:.{p}f}"

        out = {"header": self.header, "precision": p, "pivotal_c": fmt(self.pivotal_c), "N": {}, "trends": {}}
        for N in sorted(self.per_N):
            stats = {}
            for name, est in sorted(self.per_N[N].items()):
                stats[name] = {
                    "n": est.n,
                    "mean": fmt(est.mean) if est.exact_mean is None else _decimal(est.exact_mean, p),
                    "variance": fmt(est.variance),
                    "ci95": [fmt(est.ci_lo), fmt(est.ci_hi)],
                }
            out["N"][str(N)] = {"statistics": stats, "checks": {k: list(v) for k, v in sorted(self.checks[N].items())}}
        for name, val in sorted(self.trends.items()):
            out["trends"][name] = fmt(val)
        return out


def _decimal(q: Fraction, places: int) -> str:
    """Round-half-even decimal rendering of an exact rational."""
    scaled = q * 10**places
    r = round(scaled)
    sign = "-" if r < 0 else ""
    r = abs(r)
    return f"{sign}{r // 10**places}.{r % 10**places:0{places}d}"


def aggregate(stats, precision: int = 6, pivotal_c: float | None = None) -> AggregateReport:
    """Per-N estimators; ``pivotal_c`` defaults to half the mean pivotal/N at the smallest N."""
    stats = list(stats)
    if not stats:
        raise ValueError("nothing to aggregate")
    by_N = {}
    for s in stats:
        by_N.setdefault(s.N, []).append(s)
    Ns = sorted(by_N)
    if pivotal_c is None:
        first = by_N[Ns[0]]
        pivotal_c = float(sum(Fraction(s.pivotal_size, s.N) for s in first) / len(first)) / 2
    per_N, checks = {}, {}
    for N in Ns:
        group = by_N[N]
        est = {
            "mu_hat": estimate(s.t / N for s in group),
            "union_per_N": estimate(Fraction(s.union_size, N) for s in group),
            "pivotal_per_N": estimate(Fraction(s.pivotal_size, N) for s in group),
            "K_per_N": estimate(Fraction(s.K_size, N) for s in group),
            "max_len_per_N": estimate(Fraction(s.max_len, N) for s in group if s.max_len is not None),
            "pivotal_threshold_freq": estimate(int(s.pivotal_size >= pivotal_c * N) for s in group),
        }
        logs = [s.log2_count / N for s in group if s.count is not None]
        if logs:
            est["log2_count_per_N"] = estimate(logs)
        tplus = [s.t_plus / N for s in group if s.t_plus is not None and "attached-cap" not in s.flags]
        if tplus:
            est["mu_plus_hat"] = estimate(tplus)
        grays = [s.gray_count for s in group if s.gray_count is not None]
        if grays:
            est["gray_per_N"] = estimate(Fraction(g, N) for g in grays)
        per_N[N] = est
        chk = {}
        for name in ("chain_ok", "swap_ok", "deletion_ok", "count_bound_ok"):
            vals = [getattr(s, name) for s in group if getattr(s, name) is not None]
            chk[name] = (sum(vals), len(vals))
        checks[N] = chk
    trends = {}
    if len(Ns) > 1:
        for name in ("mu_hat", "log2_count_per_N", "pivotal_per_N", "union_per_N"):
            a, b = per_N[Ns[0]].get(name), per_N[Ns[-1]].get(name)
            if a is not None and b is not None and a.mean:
                trends[f"{name}_relative_change"] = (b.mean - a.mean) / a.mean
    return AggregateReport(per_N, checks, pivotal_c, precision, REPORT_HEADER, trends)


def write_json(report: AggregateReport, path):
    with open(path, "w") as fh:
        fh.write(json_text(report))


def json_text(report: AggregateReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"


def theorem_suite(cfg: ExperimentConfig, stats=None, threads: int | None = 1) -> list:
    """Finite-N verdict rows ``{theorem, N, statistic, mean, ci_lo, ci_hi, verdict}``."""
    if stats is None:
        stats = run_experiment(cfg, threads)
    report = aggregate(stats)
    rows = []
    d = cfg.spec.d
    by_N = {}
    for s in stats:
        by_N.setdefault(s.N, []).append(s)

    def row(thm, N, name, est, verdict):
        rows.append({"theorem": thm, "N": N, "statistic": name, "mean": est.mean,
                     "ci_lo": est.ci_lo, "ci_hi": est.ci_hi, "verdict": verdict})

    for N, est in sorted(report.per_N.items()):
        group = by_N[N]
        if "log2_count_per_N" in est:
            e = est["log2_count_per_N"]
            row("1.1", N, "log2_count_per_N", e, "positive" if e.ci_lo > 0 else "inconclusive")
            K = max(s.max_len for s in group) / N
            bound = K * math.log2(2 * d)
            ok = all(s.count_bound_ok for s in group if s.count_bound_ok is not None)
            row("1.2", N, "log2_count_per_N", e, "bounded" if ok and e.mean <= bound else "violated")
        e = est["pivotal_per_N"]
        row("1.3", N, "pivotal_per_N", e, "positive" if e.ci_lo > 0 else "inconclusive")
        e = est["union_per_N"]
        cap = max(s.max_len for s in group) / N
        row("1.4", N, "union_per_N", e, "bounded" if e.mean <= (2 * d) * cap else "inconclusive")
        e = est["pivotal_threshold_freq"]
        row("1.5", N, "pivotal_threshold_freq", e, "positive" if e.ci_lo > 0 else "inconclusive")
    return rows


@dataclass
class ResamplingReport:
    replicas: int
    gray: int
    g_turn: int
    gamma_defined: int
    gamma_condition: int
    gamma_probability: Fraction | None
    flags: tuple = ()

    @property
    def ratio(self):
        """Empirical P(G-turn box) / P(gray box), or ``None`` when no box was gray."""
        return None if self.gray == 0 else Fraction(self.g_turn, self.gray)


def resampling_experiment(cfg: ExperimentConfig, B: NBox, N: int | None = None, replicas: int | None = None) -> ResamplingReport:
    """Resample the weights meeting ``B`` and compare G-turn and gray frequencies.

    For each replica, ``tau`` and an independent copy ``tau*`` are drawn; ``B``
    is classified gray under ``tau``, G-turn under ``tau^B`` (weights of
    ``tau*`` on edges meeting ``B``), and when a geodesic crosses ``B`` the
    planted path between its boundary hits is tested against the
    (gamma, B)-condition under ``tau*``.
    """
    spec = cfg.spec
    d = spec.d
    N = cfg.N_grid[0] if N is None else N
    R = cfg.replicas if replicas is None else replicas
    v = (0,) * d
    w = (N,) + (0,) * (d - 1)
    if B.contains(v) or B.contains(w):
        raise ValueError("the box must not contain either endpoint")
    beta, alpha, M = cfg.beta_value, cfg.alpha_value, cfg.M
    gray = g_turn = g_def = g_ok = 0
    flags = set()
    gamma_prob = None
    for idx in range(R):
        s1 = replica_seed(cfg.seed, N, idx, 1)
        s2 = replica_seed(cfg.seed, N, idx, 2)
        u1 = _straight_time(spec, s1, v, w)
        uB = _straight_time(spec, s1, v, w, lambda e: draw_weight(spec, s2 if B.meets(e) else s1, e))
        margins = [choose_margin(cfg, v, w, u)[0] for u in (u1, uB)]
        if None in margins:
            flags.add("restricted")
            margins = [cfg.margin if x is None else x for x in margins]
        m = max(margins)
        lo, hi = margin_box(v, w, m)
        lo = tuple(min(a, b) for a, b in zip(lo, B.lo))
        hi = tuple(max(a, b) for a, b in zip(hi, B.hi))
        env = sample_environment(spec, (lo, hi), s1)
        env_star = sample_environment(spec, (lo, hi), s2)
        env_B = resample_box(env, env_star, B)

        dag = GeodesicDAG(env, v, w)
        black = classify_black(env, B, cfg.delta1, M)
        cls = classify_white_gray(env, B, dag, black)
        if cls.gray:
            gray += 1
        try:
            att = attached_first_passage_time(env_B, v, w, beta, cfg.attached_cap)
            if is_g_turn_box(env_B, B, att):
                g_turn += 1
        except CapExceeded:
            flags.add("attached-cap")

        if cls.white:
            geos = enumerate_geodesics(env, v, w, cfg.enum_cap)
            crossing = next((p for p in geos.sample_paths if crosses_short(p, B)), None)
            if crossing is None:
                continue
            a, b = boundary_hits(crossing, B)
            gamma = _planted_path(a, b, B, cfg, spec)
            if gamma is None:
                flags.add("no-planted-path")
                continue
            g_def += 1
            if gamma_b_condition(env_star, gamma, B, alpha, M):
                g_ok += 1
            gamma_prob = gamma_b_probability(spec, gamma, B, alpha, M)
    return ResamplingReport(R, gray, g_turn, g_def, g_ok, gamma_prob, tuple(sorted(flags)))


def _planted_path(a, b, B, cfg, spec):
    if a == b:
        return None
    first = choose_regime(a, b, B.n, cfg.delta1, spec.fplus)
    order = [first] + [r for r in (LONG, SHORT, DEGENERATE) if r != first]
    for regime in order:
        try:
            return construct_detour_path(a, b, B, B.n, regime)
        except InfeasibleGeometry:
            continue
    return None


def config_fields():
    return [f.name for f in fields(ExperimentConfig)]


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(cfg, **changes)
