"""Experiment configs, Monte Carlo estimation, report persistence, and CLI.

Config files use INI syntax (configparser): an ``[experiment]`` section
plus optional ``[input]``, ``[tester]``, and ``[sweep]`` sections; see the
README for the schema.  All randomness flows from the config seed through
documented stream derivation (module label, trial index), so paired
experiments share their draws.  Serialized reports contain no volatile
fields (runtime is printed, never persisted) and are byte-identical across
runs with the same config and seed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Callable, Optional, Sequence

from . import blowup as blowup_mod
from . import gallery as gallery_mod
from . import prng
from .distance import distance_to_property, distance_value
from .errors import InputError, VdfLabError
from .properties import builtin_property
from .regularity import Partition, certify_pair, irregular_pair_mass, szemeredi_partition
from .tester import TesterConfig, run_tester
from .wgraph import (
    Graph,
    VertexDistribution,
    WeightedGraph,
    format_weighted_graph,
    parse_weighted_graph,
)

Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise InputError("trials must be positive")
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    spread = z * sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, center - spread)
    high = 1.0 if successes == trials else min(1.0, center + spread)
    return low, high


@dataclass(frozen=True)
class Estimate:
    trials: int
    successes: int
    point: Fraction
    wilson_low: float
    wilson_high: float


def estimate_probability(trial_fn: Callable[[int], bool], trials: int,
                         seed: int) -> Estimate:
    """Estimate P[trial_fn] over derived per-trial seeds with a Wilson CI."""
    successes = 0
    for k in range(trials):
        if trial_fn(prng.derive(seed, "trial", k)):
            successes += 1
    low, high = wilson_interval(successes, trials)
    return Estimate(trials, successes, Fraction(successes, trials), low, high)


@dataclass
class ExperimentConfig:
    input_kind: str = "file"            # file | gnp | complete | cycle | gallery
    input_arg: str = ""
    property_id: str = "triangle-free"
    variant: str = "vdf"
    sample_size: int = 4
    eps: Fraction = Fraction(1, 4)
    delta: Fraction = Fraction(1, 2)
    size_floor: int = 4
    trials: int = 1000
    seed: int = 0
    certify: bool = False
    sweep_values: tuple[int, ...] = ()
    target: Fraction = Fraction(2, 3)

    def finalize_seed(self) -> int:
        env = os.environ.get("VDFLAB_SEED")
        return int(env) if env else self.seed


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    cfg = ExperimentConfig()
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    cfg.property_id = exp.get("property", cfg.property_id)
    cfg.trials = int(exp.get("trials", cfg.trials))
    cfg.seed = int(exp.get("seed", cfg.seed))
    cfg.certify = exp.get("certify", "false").lower() in ("1", "true", "yes")
    if parser.has_section("input"):
        sec = parser["input"]
        cfg.input_kind = sec.get("kind", cfg.input_kind)
        cfg.input_arg = sec.get("arg", cfg.input_arg)
    if parser.has_section("tester"):
        sec = parser["tester"]
        cfg.variant = sec.get("variant", cfg.variant)
        cfg.sample_size = int(sec.get("sample_size", cfg.sample_size))
        cfg.eps = Fraction(sec.get("eps", str(cfg.eps)))
        cfg.delta = Fraction(sec.get("delta", str(cfg.delta)))
        cfg.size_floor = int(sec.get("size_floor", cfg.size_floor))
    if parser.has_section("sweep"):
        sec = parser["sweep"]
        cfg.sweep_values = tuple(int(tok) for tok in sec.get("sample_sizes", "").split())
        cfg.target = Fraction(sec.get("target", str(cfg.target)))
    return cfg


def build_input(cfg: ExperimentConfig) -> WeightedGraph:
    kind, arg = cfg.input_kind, cfg.input_arg
    if kind == "file":
        with open(arg, "r", encoding="utf-8") as fh:
            return parse_weighted_graph(fh.read())
    if kind == "complete":
        return WeightedGraph.uniform(Graph.complete(int(arg)))
    if kind == "cycle":
        return WeightedGraph.uniform(Graph.cycle(int(arg)))
    if kind == "gnp":
        n_tok, p_tok = arg.split(",")
        return WeightedGraph.uniform(random_gnp(int(n_tok), Fraction(p_tok),
                                                prng.derive(cfg.seed, "input")))
    if kind == "gallery":
        name, *rest = arg.split(",")
        pair = make_gallery_pair(name, rest)
        return pair.second
    raise InputError(f"unknown input kind {kind!r}")


def random_gnp(n: int, p: Fraction, seed: int) -> Graph:
    """Independent pairs with exact rational edge probability."""
    threshold = -(-p.numerator * prng.TWO128 // p.denominator)
    edges = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if prng.u128(seed, k) < threshold:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def make_gallery_pair(name: str, args: Sequence[str]) -> gallery_mod.GalleryPair:
    if name == "cycle-star":
        return gallery_mod.cycle_star_pair(int(args[0]) if args else 4)
    if name == "edge-density":
        return gallery_mod.density_pair(int(args[0]) if args else 8)
    if name == "non-extendable":
        prop = builtin_property("AB-free")
        return gallery_mod.non_extendable_pair(prop, Graph.cycle(5),
                                               [int(a) for a in args])
    if name == "non-hereditary":
        prop = builtin_property("connected")
        return gallery_mod.non_hereditary_pair(prop, Graph.path(3), [0, 2])
    raise InputError(f"unknown gallery pair {name!r}")


@dataclass
class ExperimentReport:
    config: dict
    accepts: int
    rejects: int
    reject_rate: str
    wilson_low: float
    wilson_high: float
    certificate: Optional[dict] = None
    runtime_seconds: float = field(default=0.0, compare=False)

    def to_json(self) -> str:
        payload = {k: v for k, v in self.__dict__.items() if k != "runtime_seconds"}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "ExperimentReport":
        data = json.loads(text)
        return ExperimentReport(runtime_seconds=0.0, **data)

    def csv_row(self) -> dict:
        return {
            "variant": self.config.get("variant", ""),
            "property": self.config.get("property", ""),
            "sample_size": self.config.get("sample_size", ""),
            "trials": self.accepts + self.rejects,
            "accepts": self.accepts,
            "rejects": self.rejects,
            "reject_rate": self.reject_rate,
            "wilson_low": repr(self.wilson_low),
            "wilson_high": repr(self.wilson_high),
        }


CSV_FIELDS = ["variant", "property", "sample_size", "trials", "accepts",
              "rejects", "reject_rate", "wilson_low", "wilson_high"]


def reports_to_csv(reports: Sequence[ExperimentReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.csv_row())
    return buf.getvalue()


def reports_from_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def run_experiment(cfg: ExperimentConfig, wg: Optional[WeightedGraph] = None,
                   sample_size: Optional[int] = None) -> ExperimentReport:
    started = time.monotonic()
    if wg is None:
        wg = build_input(cfg)
    prop = builtin_property(cfg.property_id)
    s = sample_size if sample_size is not None else cfg.sample_size
    seed = cfg.finalize_seed()
    rejects = 0
    for k in range(cfg.trials):
        outcome = run_tester(wg, prop, TesterConfig(
            variant=cfg.variant, sample_size=s, eps=cfg.eps, delta=cfg.delta,
            size_floor=cfg.size_floor, seed=prng.derive(seed, "trial", k)))
        if not outcome.accepted:
            rejects += 1
    low, high = wilson_interval(rejects, cfg.trials)
    certificate = None
    if cfg.certify:
        dist = distance_value(wg, prop)
        certificate = {"distance": f"{dist.numerator}/{dist.denominator}",
                       "method": "exact oracle"}
    rate = Fraction(rejects, cfg.trials)
    return ExperimentReport(
        config={"variant": cfg.variant, "property": cfg.property_id,
                "sample_size": s, "seed": seed, "input": f"{cfg.input_kind}:{cfg.input_arg}",
                "trials": cfg.trials},
        accepts=cfg.trials - rejects, rejects=rejects,
        reject_rate=f"{rate.numerator}/{rate.denominator}",
        wilson_low=low, wilson_high=high, certificate=certificate,
        runtime_seconds=time.monotonic() - started)


@dataclass
class SweepResult:
    reports: list[ExperimentReport]
    minimal_sample_size: Optional[int]
    target: str


def sweep(cfg: ExperimentConfig, wg: Optional[WeightedGraph] = None) -> SweepResult:
    """Run each configured sample size; report the smallest whose rejection
    rate clears the target at the lower end of its Wilson interval."""
    if not cfg.sweep_values:
        raise InputError("sweep needs sample sizes")
    if wg is None:
        wg = build_input(cfg)
    reports = []
    minimal = None
    for s in cfg.sweep_values:
        rep = run_experiment(cfg, wg=wg, sample_size=s)
        reports.append(rep)
        if minimal is None and rep.wilson_low >= float(cfg.target):
            minimal = s
    return SweepResult(reports, minimal, str(cfg.target))


# ---------------------------------------------------------------------------
# Named verification suites: quick library-level invariant drives.


def _suite_wgraph():
    from .wgraph import pair_density

    checks = []
    seed = 11
    for case in range(20):
        g = random_gnp(8, Fraction(1, 2), prng.derive(seed, case))
        wg = WeightedGraph.uniform(g)
        xs, ys = list(range(4)), list(range(4, 8))
        lhs = Fraction(0)
        for xpart in (xs[:2], xs[2:]):
            for ypart in (ys[:2], ys[2:]):
                lhs += (wg.dist.mass(xpart) * wg.dist.mass(ypart)
                        * pair_density(wg, xpart, ypart))
        rhs = wg.dist.mass(xs) * wg.dist.mass(ys) * pair_density(wg, xs, ys)
        checks.append(("density-splitting identity", lhs == rhs))
    return checks


def _suite_regularity():
    from .regularity import boost_refinement, partition_index

    checks = []
    g = Graph.from_edges(6, [(0, 4), (0, 5), (1, 4), (1, 5)])
    wg = WeightedGraph.uniform(g)
    p = Partition.of([[0, 1, 2, 3], [4, 5]])
    eps = Fraction(1, 5)
    refined = boost_refinement(wg, p, eps)
    gain = partition_index(wg, refined) - partition_index(wg, p)
    checks.append(("boost gain >= eps^5", gain >= eps ** 5))
    checks.append(("size bound", len(refined) <= len(p) * 2 ** len(p)))
    reg = szemeredi_partition(wg, Fraction(1, 4), Partition.of([[0, 1, 2], [3, 4, 5]]))
    mass, _ = irregular_pair_mass(wg, reg, Fraction(1, 4))
    checks.append(("iterated partition certified regular", mass <= Fraction(1, 4)))
    return checks


def _suite_counting():
    from .regularity import delta_counting

    return [
        ("base constant", delta_counting(2, Fraction(1, 3)) == Fraction(1, 3)),
        ("three-vertex constant", delta_counting(3, Fraction(1, 2)) == Fraction(1, 128)),
    ]


def _suite_blowup():
    checks = []
    wg = WeightedGraph(Graph.complete(3), VertexDistribution.of(["1/2", "1/4", "1/4"]))
    base, blown = blowup_mod.verify_blowup_farness(wg, builtin_property("edge-free"), 4)
    checks.append(("edge-free blowup preserves distance", blown >= base))
    base, blown = blowup_mod.verify_blowup_farness(wg, builtin_property("triangle-free"), 4)
    checks.append(("triangle-free blowup preserves distance", blown >= base))
    return checks


def _suite_embedding():
    from .properties import diamond_graph
    from .structure import embeds, psi_F, EmbeddingScheme

    black = EmbeddingScheme(0, ("b",), ())
    white = EmbeddingScheme(0, ("w",), ())
    checks = [
        ("clique embeds in a black vertex", embeds(Graph.complete(3), black) is not None),
        ("path avoids a black vertex", embeds(Graph.path(3), black) is None),
        ("clique avoids a white vertex", embeds(Graph.complete(3), white) is None),
        ("psi of the triangle at order 1", psi_F([Graph.complete(3)], 1) == 3),
        ("diamond embeds in one black vertex", embeds(diamond_graph(), black) is None),
    ]
    return checks


def _suite_balanced():
    from .regularity import balanced_partition

    checks = []
    dist = VertexDistribution.of(["1/4", "1/4", "1/4", "1/8", "1/8"])
    part = balanced_partition(range(5), dist, 2)
    checks.append(("two balanced parts", len(part) == 2))
    checks.append(("mass floor", all(dist.mass(p) >= Fraction(1, 4) for p in part.parts)))
    return checks


def _suite_distance():
    from .distance import enumeration_distance

    checks = []
    prop = builtin_property("triangle-free")
    for case in range(10):
        g = random_gnp(5, Fraction(1, 2), prng.derive(23, case))
        wg = WeightedGraph.uniform(g)
        fast = distance_to_property(wg, prop)[0]
        slow = enumeration_distance(wg, prop)
        checks.append((f"branch-and-bound matches enumeration #{case}", fast == slow))
    return checks


def _suite_tester():
    from .tester import vdf_tester

    wg = WeightedGraph.uniform(Graph.complete(3))
    prop = builtin_property("triangle-free")
    rejects = 0
    for a in range(3):
        for b in range(3):
            for c in range(3):
                sub = wg.graph.subgraph({a, b, c})
                if not prop.holds(sub):
                    rejects += 1
    exact = Fraction(rejects, 27)
    est = estimate_probability(
        lambda s: not vdf_tester(wg, prop, 3, s).accepted, 2000, seed=7)
    return [
        ("exact rejection law 6/27", exact == Fraction(2, 9)),
        ("estimate near the law", abs(float(est.point) - float(exact)) < 0.05),
    ]


SUITES = {
    "wgraph": _suite_wgraph,
    "regularity": _suite_regularity,
    "counting": _suite_counting,
    "blowup": _suite_blowup,
    "embedding": _suite_embedding,
    "balanced": _suite_balanced,
    "distance": _suite_distance,
    "tester": _suite_tester,
}


def verify_suite(name: str) -> tuple[bool, list[tuple[str, bool]]]:
    if name == "all":
        results = []
        for key in SUITES:
            results.extend(verify_suite(key)[1])
        return all(ok for _, ok in results), results
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    results = SUITES[name]()
    return all(ok for _, ok in results), results


# ---------------------------------------------------------------------------
# CLI


def _write_outputs(args, reports: list[ExperimentReport]):
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            if len(reports) == 1:
                fh.write(reports[0].to_json())
            else:
                fh.write(json.dumps([json.loads(r.to_json()) for r in reports],
                                    sort_keys=True, indent=2) + "\n")
    if getattr(args, "csv", None):
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(reports_to_csv(reports))


def _print_report(rep: ExperimentReport):
    cfg = rep.config
    print(f"{cfg['variant']:>12}  s={cfg['sample_size']:<4} trials={cfg['trials']:<7} "
          f"rejects={rep.rejects:<7} rate={rep.reject_rate:<12} "
          f"wilson=[{rep.wilson_low:.4f}, {rep.wilson_high:.4f}] "
          f"({rep.runtime_seconds:.2f}s)")
    if rep.certificate:
        print(f"{'':>12}  certificate: {rep.certificate}")


def _load_wg(path: str) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_weighted_graph(fh.read())


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="vdflab",
                                     description="testing lab for vertex-weighted graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dist = sub.add_parser("dist", help="exact distance to a property")
    p_dist.add_argument("wgraph")
    p_dist.add_argument("--property", required=True)
    p_dist.add_argument("--cap", type=int, default=7)

    p_test = sub.add_parser("test", help="run a tester repeatedly")
    p_test.add_argument("wgraph")
    p_test.add_argument("--property", required=True)
    p_test.add_argument("--variant", default="vdf")
    p_test.add_argument("--s", type=int, default=4)
    p_test.add_argument("--trials", type=int, default=1000)
    p_test.add_argument("--seed", type=int, default=0)
    p_test.add_argument("--eps", default="1/4")
    p_test.add_argument("--delta", default="1/2")
    p_test.add_argument("--size-floor", type=int, default=4)
    p_test.add_argument("--json")
    p_test.add_argument("--csv")

    p_sweep = sub.add_parser("sweep", help="find the smallest working sample size")
    p_sweep.add_argument("wgraph")
    p_sweep.add_argument("--property", required=True)
    p_sweep.add_argument("--variant", default="vdf")
    p_sweep.add_argument("--sizes", required=True, help="space-separated sample sizes")
    p_sweep.add_argument("--trials", type=int, default=2000)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--target", default="2/3")
    p_sweep.add_argument("--json")
    p_sweep.add_argument("--csv")

    p_reg = sub.add_parser("regularity", help="certified regular partition")
    p_reg.add_argument("wgraph")
    p_reg.add_argument("--eps", required=True)
    p_reg.add_argument("--parts", type=int, default=2, help="initial split size")

    p_blow = sub.add_parser("blowup", help="blow up and optionally verify farness")
    p_blow.add_argument("wgraph")
    p_blow.add_argument("--N", type=int, required=True)
    p_blow.add_argument("--policy", default="empty")
    p_blow.add_argument("--verify", action="store_true")
    p_blow.add_argument("--property", default="triangle-free")
    p_blow.add_argument("--out")

    p_gal = sub.add_parser("gallery", help="emit an indistinguishable pair")
    p_gal.add_argument("name")
    p_gal.add_argument("args", nargs="*")
    p_gal.add_argument("--out-prefix", default="pair")

    p_ver = sub.add_parser("verify", help="run a named invariant suite")
    p_ver.add_argument("suite")

    args = parser.parse_args(argv)

    try:
        if args.command == "dist":
            wg = _load_wg(args.wgraph)
            prop = builtin_property(args.property)
            value, witness = distance_to_property(wg, prop, args.cap)
            print(f"distance = {value.numerator}/{value.denominator}")
            print(f"witness edges: {witness.edges()}")
            return 0
        if args.command == "test":
            cfg = ExperimentConfig(
                input_kind="file", input_arg=args.wgraph, property_id=args.property,
                variant=args.variant, sample_size=args.s, trials=args.trials,
                seed=args.seed, eps=Fraction(args.eps), delta=Fraction(args.delta),
                size_floor=args.size_floor)
            rep = run_experiment(cfg)
            _print_report(rep)
            _write_outputs(args, [rep])
            return 0
        if args.command == "sweep":
            cfg = ExperimentConfig(
                input_kind="file", input_arg=args.wgraph, property_id=args.property,
                variant=args.variant, trials=args.trials, seed=args.seed,
                sweep_values=tuple(int(tok) for tok in args.sizes.split()),
                target=Fraction(args.target))
            result = sweep(cfg)
            for rep in result.reports:
                _print_report(rep)
            if result.minimal_sample_size is None:
                print(f"no sample size reached target {result.target}")
            else:
                print(f"smallest sample size with lower CI >= {result.target}: "
                      f"{result.minimal_sample_size}")
            _write_outputs(args, result.reports)
            return 0
        if args.command == "regularity":
            wg = _load_wg(args.wgraph)
            eps = Fraction(args.eps)
            chunk = max(1, wg.n // args.parts)
            p0 = Partition.of([list(range(i, min(i + chunk, wg.n)))
                               for i in range(0, wg.n, chunk)])
            partition = szemeredi_partition(wg, eps, p0)
            mass, _ = irregular_pair_mass(wg, partition, eps)
            print(partition.serialize(), end="")
            print(f"# irregular pair mass {mass} <= {eps}")
            return 0
        if args.command == "blowup":
            wg = _load_wg(args.wgraph)
            if args.verify:
                prop = builtin_property(args.property)
                base, blown = blowup_mod.verify_blowup_farness(
                    wg, prop, args.N, args.policy)
                print(f"base distance  = {base}")
                print(f"blowup distance = {blown} (>= base: ok)")
            blow = blowup_mod.dn_blowup(wg, args.N, args.policy)
            text = blow.serialize()
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                print(text, end="")
            return 0
        if args.command == "gallery":
            pair = make_gallery_pair(args.name, args.args)
            for suffix, wg in (("1", pair.first), ("2", pair.second)):
                with open(f"{args.out_prefix}{suffix}.wg", "w", encoding="utf-8") as fh:
                    fh.write(format_weighted_graph(wg))
            with open(f"{args.out_prefix}.json", "w", encoding="utf-8") as fh:
                json.dump(pair.certificate_json(), fh, sort_keys=True, indent=2, default=str)
                fh.write("\n")
            print(f"wrote {args.out_prefix}1.wg, {args.out_prefix}2.wg, "
                  f"{args.out_prefix}.json")
            return 0
        if args.command == "verify":
            ok, results = verify_suite(args.suite)
            for name, passed in results:
                print(f"{'PASS' if passed else 'FAIL'}  {name}")
            return 0 if ok else 1
    except VdfLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
