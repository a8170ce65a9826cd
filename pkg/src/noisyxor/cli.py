"""Command-line harness: plan, build, audit, sample, distinguish, probe, experiment.

Every command reads a JSON config (``--config``), writes one JSON report
(``--out``, stdout when omitted) and echoes its effective config into the
report. Reports hold no wall-clock data, so a fixed seed reproduces them
byte for byte; timings go to ``--timings`` when asked for.

Exit codes: 0 success, 1 operational error, 2 infeasible config.
"""

from __future__ import annotations

import argparse
import copy
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from statistics import NormalDist
from typing import Any, Optional, Union

from . import __version__
from .audit import even_cover_search, expansion_audit, sample_random_graph
from .bitlin import BitMatrix, BitVector, rank
from .coset import CosetGraph, GuvParams, guv_to_coset, plan_family
from .distinguish import alekhnovich_test, distinguish_D, residual_threshold
from .instances import Instance, sample_alekhnovich, sample_null, sample_planted
from .params import (
    capacity_probe,
    check_constant_rate_conditions,
    curve_monotone,
    null_soundness,
    probe_to_json,
    regime_report,
    write_probe_csv,
)
from .rng import MASK64, SplitMix64

Graph = Union[CosetGraph, BitMatrix]

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


class CliError(Exception):
    """Operational failure (bad input, missing file, budget exceeded)."""


class Infeasible(Exception):
    """Config is well formed but asks for something the theory rules out."""


class BudgetExceeded(CliError):
    pass


# io helpers

def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(report: dict, out: Optional[str]) -> None:
    text = dumps(report)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def read_json(path: str, what: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"{what} not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{what} is not valid JSON ({path}): {exc}") from None


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    obj = read_json(path, "config")
    if not isinstance(obj, dict):
        raise CliError("config must be a JSON object")
    # a report can be replayed by passing it back as the config
    if "command" in obj and isinstance(obj.get("config"), dict):
        obj = obj["config"]
    return obj


def require(cfg: dict, key: str, cmd: str) -> Any:
    if key not in cfg:
        raise CliError(f"{cmd}: config is missing '{key}'")
    return cfg[key]


def resolve_seed(cfg: dict, cli_seed: Optional[int], cmd: str) -> int:
    seed = cli_seed if cli_seed is not None else cfg.get("seed")
    if seed is None:
        raise CliError(f"{cmd}: a seed is required (config 'seed' or --seed)")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise CliError("seed must fit in 64 unsigned bits")
    cfg["seed"] = seed
    return seed


def fraction_pair(x: Fraction) -> dict:
    return {"exact": str(x), "float": float(x)}


# graphs

def build_graph(spec: dict) -> tuple[Graph, dict]:
    """Graph plus a metadata dict from a {"type": "guv" | "file" | "random"} source."""
    kind = spec.get("type")
    if kind == "guv":
        try:
            params = GuvParams.from_json(spec) if "E_coeffs" in spec else GuvParams.canonical(
                int(spec["q"]), int(spec["pvDeg"]), int(spec["pvLen"]), int(spec.get("t", 1)))
        except KeyError as exc:
            raise CliError(f"guv graph source is missing {exc}") from None
        return guv_to_coset(params), {"guv": params.to_json()}
    if kind == "file":
        obj = read_json(require(spec, "path", "graph"), "graph file")
        return graph_from_json(obj), {}
    if kind == "random":
        try:
            M, N, k, seed = (int(spec[x]) for x in ("M", "N", "k", "seed"))
        except KeyError as exc:
            raise CliError(f"random graph source is missing {exc}") from None
        return sample_random_graph(M, N, k, seed), {}
    raise CliError(f"unknown graph source type {kind!r}")


def graph_to_json(g: Graph, meta: Optional[dict] = None) -> dict:
    if isinstance(g, CosetGraph):
        out = {"kind": "coset", "graph": g.to_json()}
    else:
        out = {"kind": "matrix", "adjacency": g.to_json()}
    out.update(meta or {})
    return out


def graph_from_json(obj: dict) -> Graph:
    if obj.get("kind") == "coset":
        return CosetGraph.from_json(obj["graph"])
    if obj.get("kind") == "matrix":
        return BitMatrix.from_json(obj["adjacency"])
    raise CliError("graph file has unknown kind")


def adjacency(g: Graph) -> BitMatrix:
    return g.adjacency if isinstance(g, CosetGraph) else g


def graph_summary(g: Graph) -> dict:
    a = adjacency(g)
    out = {"M": a.rows, "N": a.cols}
    if isinstance(g, CosetGraph):
        out.update({"m": g.m, "k": g.k, "d": g.d})
    return out


def need_coset(g: Graph, cmd: str) -> CosetGraph:
    if not isinstance(g, CosetGraph):
        raise Infeasible(f"{cmd}: the decoder needs a coset graph")
    if (g.m + g.d) % 2:
        raise Infeasible(f"{cmd}: m + d must be even (m={g.m}, d={g.d})")
    return g


# stage timing

class Stages:
    def __init__(self, budgets: Optional[dict]):
        self.budgets = {k: float(v) for k, v in (budgets or {}).items()}
        self.times: dict = {}
        self._start = {}

    def start(self, name: str) -> None:
        self._start[name] = time.monotonic()

    def check(self, name: str) -> None:
        elapsed = time.monotonic() - self._start[name]
        self.times[name] = elapsed
        limit = self.budgets.get(name)
        if limit is not None and elapsed > limit:
            raise BudgetExceeded(f"stage '{name}' exceeded its budget ({elapsed:.1f}s > {limit}s)")


# commands

def cmd_plan(cfg: dict, args) -> tuple[dict, int]:
    plan = plan_family(
        float(require(cfg, "alpha", "plan")),
        require(cfg, "regime", "plan"),
        int(require(cfg, "D", "plan")),
        float(cfg.get("C", 2.1)),
        cfg.get("gamma"),
        cfg.get("beta"),
    )
    report = {"plan": plan.to_json()}
    code = EXIT_OK if plan.feasible else EXIT_INFEASIBLE
    if plan.feasible:
        c = plan.d / math.sqrt(plan.m)
        report["constant_rate_checks"] = {
            "c": c, "checks": [x.to_json() for x in check_constant_rate_conditions(c)]}
        if "eta" in cfg:
            if (plan.m + plan.d) % 2:
                report["regime"] = {"error": f"m + d odd (m={plan.m}, d={plan.d})"}
                code = EXIT_INFEASIBLE
            else:
                reg = regime_report(plan.m, plan.d, float(cfg["eta"]), float(cfg.get("margin", 0.0)))
                report["regime"] = reg
                if not reg["feasible"]:
                    code = EXIT_INFEASIBLE
    return report, code


def cmd_build(cfg: dict, args) -> tuple[dict, int]:
    g, meta = build_graph(require(cfg, "graph", "build"))
    report = graph_to_json(g, meta)
    report["summary"] = graph_summary(g)
    return report, EXIT_OK


def audit_graph(g: Graph, cfg: dict, seed: int) -> dict:
    rep = expansion_audit(g, int(cfg.get("s_max", 2)), int(cfg.get("samples", 1000)), seed)
    out = {"expansion": rep.to_json(),
           "min_ratio": fraction_pair(rep.min_ratio())}
    if "T" in cfg and "alpha" in cfg:
        out["certified"] = rep.certifies(int(cfg["T"]), cfg["alpha"])
    w = cfg.get("even_cover_w_max", 4)
    if w:
        out["even_cover"] = even_cover_search(g, int(w)).to_json()
    return out


def cmd_audit(cfg: dict, args) -> tuple[dict, int]:
    seed = resolve_seed(cfg, args.seed, "audit")
    g, _ = build_graph(require(cfg, "graph", "audit"))
    return {"summary": graph_summary(g), "audit": audit_graph(g, cfg, seed)}, EXIT_OK


def draw_instance(g: Graph, kind: str, cfg: dict, rng: SplitMix64) -> Instance:
    if kind == "null":
        return sample_null(adjacency(g).rows, rng)
    if kind == "planted":
        return sample_planted(g, float(require(cfg, "eta", "sample")), rng)
    if kind == "alek":
        return sample_alekhnovich(g, int(require(cfg, "t", "sample")), rng)
    raise CliError(f"unknown instance kind {kind!r}")


def cmd_sample(cfg: dict, args) -> tuple[dict, int]:
    seed = resolve_seed(cfg, args.seed, "sample")
    g, _ = build_graph(require(cfg, "graph", "sample"))
    kind = require(cfg, "kind", "sample")
    count = int(cfg.get("count", 1))
    base = SplitMix64(seed)
    insts = [draw_instance(g, kind, cfg, base.spawn(i)).to_json() for i in range(count)]
    return {"summary": graph_summary(g), "instances": insts}, EXIT_OK


def run_test(g: CosetGraph, y: BitVector, cfg: dict, rng: SplitMix64) -> dict:
    test = cfg.get("test", "D")
    eta = float(require(cfg, "eta", "distinguish"))
    if test == "D":
        return distinguish_D(g, y, eta, float(cfg.get("delta_slack", 0.1))).to_json()
    if test == "alek":
        t = cfg.get("t")
        return alekhnovich_test(g, y, eta, cfg.get("eta_extra"), rng,
                                None if t is None else int(t)).to_json()
    raise CliError(f"unknown test {test!r}")


def _slim(decision: dict) -> dict:
    return {k: v for k, v in decision.items() if k not in ("codeword_hex",)}


def cmd_distinguish(cfg: dict, args) -> tuple[dict, int]:
    seed = resolve_seed(cfg, args.seed, "distinguish")
    g = need_coset(build_graph(require(cfg, "graph", "distinguish"))[0], "distinguish")
    src = require(cfg, "instances", "distinguish")
    obj = read_json(src, "instances file") if isinstance(src, str) else {"instances": src}
    base = SplitMix64(seed)
    decisions = []
    for i, raw in enumerate(obj["instances"]):
        inst = Instance.from_json(raw)
        if len(inst.y) != g.M:
            raise CliError(f"instance {i} has length {len(inst.y)}, graph has M = {g.M}")
        rec = {"index": i, "truth": inst.kind}
        rec.update(_slim(run_test(g, inst.y, cfg, base.spawn(i))))
        decisions.append(rec)
    return {"summary": graph_summary(g), "decisions": decisions}, EXIT_OK


def cmd_probe(cfg: dict, args) -> tuple[dict, int]:
    seed = resolve_seed(cfg, args.seed, "probe")
    m, r = int(require(cfg, "m", "probe")), int(require(cfg, "r", "probe"))
    etas = [float(x) for x in require(cfg, "etas", "probe")]
    probe = capacity_probe(m, r, etas, int(cfg.get("trials", 100)), SplitMix64(seed))
    report = probe_to_json(probe)
    report["monotone_within_3sigma"] = curve_monotone(probe["points"])
    csv_path = cfg.get("csv") or (args.out + ".csv" if args.out else None)
    if csv_path:
        buf = io.StringIO()
        write_probe_csv(probe["points"], buf)
        write_atomic(csv_path, buf.getvalue())
    return report, EXIT_OK


# experiment campaign

ARMS = {"D": ("null", "planted"), "alek": ("weight_t", "weight_t_plus_1")}

_WORKER_GRAPH: Optional[CosetGraph] = None


def _init_worker(graph_json: dict) -> None:
    global _WORKER_GRAPH
    _WORKER_GRAPH = CosetGraph.from_json(graph_json)


def _trial(g: CosetGraph, cfg: dict, seed: int, arm: int, index: int) -> dict:
    rng = SplitMix64(seed).spawn(arm, index)
    test = cfg.get("test", "D")
    eta = float(cfg["eta"])
    if test == "D":
        inst = sample_null(g.M, rng) if arm == 0 else sample_planted(g, eta, rng)
    else:
        t = int(cfg["t"]) if "t" in cfg else math.floor(eta * g.M + 1e-9)
        inst = sample_alekhnovich(g, t + arm, rng)
    decision = run_test(g, inst.y, cfg, rng.spawn(1))
    rec = {"arm": ARMS[test][arm], "index": index, "stream_seed": str(rng.seed)}
    if inst.e is not None:
        rec["e_weight"] = inst.e.weight()
    for key in ("verdict", "decode_status", "residual", "threshold", "in_span", "distance", "t"):
        if key in decision:
            rec[key] = decision[key]
    if decision["verdict"] == 1 and inst.x is not None and "x_hat_hex" in decision:
        x_hat = BitVector.from_hex(decision["x_hat_hex"], g.N)
        rec["image_matches"] = g.adjacency.matvec(x_hat) == g.adjacency.matvec(inst.x)
        rec["x_matches"] = x_hat == inst.x
    return rec


def _trial_worker(job: tuple) -> dict:
    cfg, seed, arm, index = job
    return _trial(_WORKER_GRAPH, cfg, seed, arm, index)


Z95 = NormalDist().inv_cdf(0.975)


def wilson(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def aggregate(records: list, arms: tuple) -> dict:
    out = {}
    rates = []
    for a in arms:
        recs = [r for r in records if r["arm"] == a]
        n = len(recs)
        acc = sum(r["verdict"] == 1 for r in recs)
        abst = sum(r["verdict"] == -1 for r in recs)
        lo, hi = wilson(acc, n)
        rate = Fraction(acc, n) if n else Fraction(0)
        rates.append((rate, acc, n, lo, hi))
        out[a] = {"trials": n, "accepted": acc, "abstained": abst,
                  "accept_rate": fraction_pair(rate), "wilson95": [lo, hi]}
    (p0, _, n0, l0, u0), (p1, _, n1, l1, u1) = rates
    diff = p1 - p0
    adv = abs(diff)
    # Newcombe's hybrid interval for p1 - p0, built from the two Wilson intervals
    d = float(diff)
    lo = d - math.sqrt((float(p1) - l1) ** 2 + (u0 - float(p0)) ** 2)
    hi = d + math.sqrt((u1 - float(p1)) ** 2 + (float(p0) - l0) ** 2)
    if d >= 0:
        adv_ci = [max(0.0, lo), min(1.0, hi)]
    else:
        adv_ci = [max(0.0, -hi), min(1.0, -lo)]
    out["advantage"] = fraction_pair(adv)
    out["advantage_ci95"] = adv_ci
    out["exceeds_one_tenth"] = adv > Fraction(1, 10)
    return out


def cmd_experiment(cfg: dict, args) -> tuple[dict, int]:
    seed = resolve_seed(cfg, args.seed, "experiment")
    test = cfg.get("test", "D")
    if test not in ARMS:
        raise CliError(f"unknown test {test!r}")
    require(cfg, "eta", "experiment")
    stages = Stages(cfg.get("budgets"))
    stages.start("build")
    g = need_coset(build_graph(require(cfg, "graph", "experiment"))[0], "experiment")
    A = g.adjacency
    stages.check("build")

    report: dict = {"summary": graph_summary(g)}
    stages.start("audit")
    audit_cfg = cfg.get("audit")
    if audit_cfg is not None:
        report["audit"] = audit_graph(g, audit_cfg, seed)
    stages.check("audit")

    eta = float(cfg["eta"])
    delta = float(cfg.get("delta_slack", 0.1))
    rk = rank(A)
    report["rank_A_H"] = rk
    if test == "D":
        report["threshold"] = residual_threshold(eta, g.M, delta)
        if eta > 0:
            report["null_soundness"] = null_soundness(g.M, g.N, eta, delta, rk)
        if (g.m + g.d) % 2 == 0:
            report["regime"] = regime_report(g.m, g.d, eta)

    trials = cfg.get("trials", {})
    counts = [int(trials.get(a, 0)) for a in ARMS[test]]
    jobs = [(cfg, seed, arm, i) for arm in (0, 1) for i in range(counts[arm])]
    stages.start("trials")
    workers = max(1, int(getattr(args, "workers", 1) or 1))
    if workers == 1 or len(jobs) <= 1:
        records = []
        for job in jobs:
            records.append(_trial(g, *job))
            stages.check("trials")
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(g.to_json(),)) as pool:
            records = list(pool.map(_trial_worker, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
        stages.check("trials")
    records.sort(key=lambda r: (ARMS[test].index(r["arm"]), r["index"]))
    report["trials"] = records
    report["aggregate"] = aggregate(records, ARMS[test])
    if args.timings:
        write_atomic(args.timings, dumps({"stages": stages.times, "workers": workers}))
    return report, EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "build": cmd_build,
    "audit": cmd_audit,
    "sample": cmd_sample,
    "distinguish": cmd_distinguish,
    "probe": cmd_probe,
    "experiment": cmd_experiment,
}


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="noisyxor", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file (a previous report also works)")
        sp.add_argument("--seed", type=int, help="overrides the config seed")
        sp.add_argument("--out", help="report path (stdout when omitted)")
        sp.add_argument("--workers", type=int, default=1, help="parallel trial workers")
        sp.add_argument("--timings", help="optional wall-time side file")
    return p


def main(argv: Optional[list] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        effective = copy.deepcopy(cfg)
        body, code = COMMANDS[args.command](effective, args)
    except Infeasible as exc:
        print(f"noisyxor {args.command}: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CliError, OSError) as exc:
        print(f"noisyxor {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        msg = str(exc)
        if "must be even" in msg:
            print(f"noisyxor {args.command}: infeasible: {msg}", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"noisyxor {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_ERROR
    report = {"command": args.command, "version": __version__, "config": effective}
    report.update(body)
    try:
        emit(report, args.out)
    except OSError as exc:
        print(f"noisyxor {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if code == EXIT_INFEASIBLE:
        print(f"noisyxor {args.command}: infeasible configuration", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
