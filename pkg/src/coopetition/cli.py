"""Command-line front end: synth, simulate, reproduce, verify.

Exit codes: 0 success, 1 verification failure, 2 no feasible policy,
3 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, fields

from .agents import FAST_ETA, SLOW_LMWU_ETA, AgentSpec
from .arena import ExperimentConfig, best_constant_baseline, run_experiment, run_game
from .games import FIXTURES, get_game
from .polymatrix import PolymatrixGame
from .synth import (
    DEFAULT_EPS,
    OBJECTIVES,
    POLICY_CLASSES,
    ManipulatorPolicy,
    PolicyCertificate,
    SynthesisRequest,
    optimize_target,
    synthesize_all,
    verify_certificate,
)

EXIT_OK, EXIT_VERIFY, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("coopetition")


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# games and policies


def load_game(ref: str) -> PolymatrixGame:
    """A builtin name or a path to a game JSON file."""
    if os.path.exists(ref):
        with open(ref) as fh:
            return PolymatrixGame.from_json(fh.read())
    try:
        return get_game(ref)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None


# Policy each reproduced table uses for its game. IPD and BoB use the worked
# constructions. Social distancing maximizes the margin at the (12, 6, 6)
# target; electric vs petrol is synthesized because the worked matrices do
# not make E dominant at eps = 0.1.
TABLE_POLICIES = {
    "ipd3": ("type1", "fixture:ipd3"),
    "social_distancing": ("type1", "target:type1:max_margin:11,5,5"),
    "electric_petrol": ("type1", "synth:type1:min_cost"),
    "bob": ("type2", "fixture:bob"),
}


def resolve_policy(spec: str, game: PolymatrixGame, eps: float) -> tuple[ManipulatorPolicy, str]:
    """Turn a policy spec into a policy.

    Specs: ``fixture:NAME``, ``synth:CLASS:OBJECTIVE``,
    ``target:CLASS:OBJECTIVE:i,j,k``, ``constant:A``, ``cert:PATH``.
    """
    kind, _, rest = spec.partition(":")
    if kind == "fixture":
        if rest not in FIXTURES:
            raise InputError(f"unknown fixture {rest!r}; choose from {sorted(FIXTURES)}")
        fx = FIXTURES[rest](eps)
        if not fx.base == game:
            raise InputError(f"fixture {rest!r} belongs to a different game")
        return fx.policy, fx.policy_class
    if kind == "constant":
        try:
            return ManipulatorPolicy.constant(game, int(rest)), "constant"
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if kind == "cert":
        cert = _read_certificate(rest)
        return cert.policy, cert.policy_class
    if kind in ("synth", "target"):
        parts = rest.split(":")
        if len(parts) != (2 if kind == "synth" else 3):
            raise InputError(f"bad policy spec {spec!r}")
        req = _request(game, parts[0], parts[1], eps)
        if kind == "synth":
            cert = synthesize_all(req).certificate
        else:
            triples = [tuple(int(a) for a in t.split(",")) for t in parts[2].split("/")]
            cert = optimize_target(req, *triples)
        if cert is None:
            raise InfeasibleError(f"no winning policy for {spec!r}")
        return cert.policy, cert.policy_class
    raise InputError(f"unknown policy spec {spec!r}")


class InfeasibleError(Exception):
    pass


def _request(game, policy_class, objective, eps, **kw) -> SynthesisRequest:
    objective = objective.replace("-", "_")
    try:
        return SynthesisRequest(game, policy_class, objective, eps, **kw)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _read_certificate(path: str) -> PolicyCertificate:
    try:
        with open(path) as fh:
            return PolicyCertificate.from_json(fh.read())
    except (OSError, KeyError, ValueError) as exc:
        raise InputError(f"cannot read certificate {path!r}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# synth


def _parse_custom(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise InputError(f"bad custom objective term {item!r}") from None
    return out


def cmd_synth(args) -> int:
    game = load_game(args.game)
    req = _request(game, args.policy_class, args.objective, args.eps,
                   row_restricted=not args.full, custom=_parse_custom(args.custom),
                   sense=args.sense, also_win=args.also_win)
    result = synthesize_all(req, dump_dir=args.dump_lp)
    for w in result.warnings:
        log.warning(w)
    if result.certificate is None:
        print("no winning policy: every target LP is infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    d = result.certificate.to_dict()
    d["game"] = game.to_dict()
    d["lps_solved"] = result.lps_solved
    _emit(json.dumps(d, indent=2), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


@dataclass
class RunConfig:
    """Everything ``simulate`` needs; loadable from a JSON document."""

    game: str = "ipd3"
    policy: str = "fixture:ipd3"
    agent2: str = f"mwu:{FAST_ETA:g}"
    agent3: str = f"ftrl:{FAST_ETA:g}"
    T: int = 100
    N: int | None = None
    seed: int = 0
    mode: str = "sampled"
    feedback: str = "mixed"
    eps: float = DEFAULT_EPS
    threads: int = 1
    out: str | None = None
    trace: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def runs(self) -> int:
        if self.N is not None:
            return self.N
        return default_runs(self.agent2, self.agent3)


def default_runs(agent2: str, agent3: str) -> int:
    """200 runs when an FTRL agent is present, 2000 otherwise."""
    kinds = {AgentSpec.parse(a).kind for a in (agent2, agent3)}
    return 200 if "ftrl" in kinds else 2000


SIM_FIELDS = ("game", "policy", "agent2", "agent3", "T", "N", "seed", "mode", "feedback",
              "eps", "threads", "out", "trace")


def _merge_config(args) -> RunConfig:
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read config {args.config!r}: {exc}") from None
    cfg = RunConfig.from_dict(base)
    for name in SIM_FIELDS:
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _merge_config(args)
    game = load_game(cfg.game)
    try:
        a2, a3 = AgentSpec.parse(cfg.agent2), AgentSpec.parse(cfg.agent3)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if cfg.T < 1 or cfg.runs < 1:
        raise InputError("T and N must be positive")
    if cfg.policy == "best-constant":
        stats = best_constant_baseline(game, a2, a3, cfg.T, cfg.runs, cfg.seed, cfg.mode,
                                       cfg.threads)
        policy = ManipulatorPolicy.constant(game, stats.extras["action"])
    else:
        policy, _ = resolve_policy(cfg.policy, game, cfg.eps)
        exp = ExperimentConfig(game, policy, a2, a3, cfg.T, cfg.mode, cfg.feedback, cfg.policy)
        stats = run_experiment(exp, cfg.runs, cfg.seed, cfg.threads)
    d = stats.to_dict()
    d["config"] = cfg.to_dict()
    _emit(json.dumps(d, indent=2), cfg.out)
    if cfg.trace:
        tr = run_game(game, policy, a2.build(), a3.build(), cfg.T, cfg.seed, cfg.mode,
                      cfg.feedback)
        with open(cfg.trace, "w", newline="") as fh:
            tr.to_csv(fh)
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce


OPPONENTS = (("MWU", "FTRL"), ("MWU", "LMWU"), ("LMWU", "LMWU"))
TABLE_IDS = tuple(f"{g}-{kind}" for g in TABLE_POLICIES for kind in ("constant", "policy"))


def _agent_for(label: str) -> str:
    return {"MWU": f"mwu:{FAST_ETA:g}", "FTRL": f"ftrl:{FAST_ETA:g}",
            "LMWU": f"lmwu:{SLOW_LMWU_ETA:g}"}[label]


def reproduce_table(table_id: str, N: int | None = None, T: int = 100, seed: int = 0,
                    eps: float = DEFAULT_EPS, mode: str = "sampled", threads: int = 1) -> dict:
    """One table: win rate and margin against the three opponent pairs."""
    if table_id not in TABLE_IDS:
        raise InputError(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)} or all")
    gname, kind = table_id.rsplit("-", 1)
    game = get_game(gname)
    policy_class, spec = TABLE_POLICIES[gname]
    policy = None if kind == "constant" else resolve_policy(spec, game, eps)[0]
    rows = []
    for p2, p3 in OPPONENTS:
        a2, a3 = _agent_for(p2), _agent_for(p3)
        n_runs = N if N is not None else default_runs(a2, a3)
        if policy is None:
            stats = best_constant_baseline(game, a2, a3, T, n_runs, seed, mode, threads)
            detail = f"constant action {stats.extras['action']}"
        else:
            stats = run_experiment(ExperimentConfig(game, policy, a2, a3, T, mode), n_runs, seed,
                                   threads)
            detail = spec
        rows.append({"player2": p2, "player3": p3, "agent2": a2, "agent3": a3, "N": n_runs,
                     "win_rate": stats.win_rate, "margin": stats.mean_margin, "policy": detail})
    return {"table": table_id, "game": gname,
            "policy": "best constant" if kind == "constant" else policy_class,
            "T": T, "eps": eps, "seed": seed, "rows": rows}


def format_table(tab: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(tab, indent=2)
    if fmt == "csv":
        lines = ["table,player2,player3,N,win_rate,margin"]
        lines += [f"{tab['table']},{r['player2']},{r['player3']},{r['N']},{r['win_rate']!r},"
                  f"{r['margin']!r}" for r in tab["rows"]]
        return "\n".join(lines)
    lines = [f"### {tab['game']}: {tab['policy']} (T={tab['T']}, eps={tab['eps']})", "",
             "| Player 2 | Player 3 | Win-Rate | Margin |", "|---|---|---|---|"]
    lines += [f"| {r['player2']} | {r['player3']} | {100 * r['win_rate']:.4g}% | "
              f"{r['margin']:.4g} |" for r in tab["rows"]]
    return "\n".join(lines) + "\n"


def cmd_reproduce(args) -> int:
    ids = TABLE_IDS if args.table == "all" else (args.table,)
    chunks = []
    for tid in ids:
        start = time.perf_counter()
        tab = reproduce_table(tid, args.N, args.T, args.seed, args.eps, args.mode, args.threads)
        log.info("%s done in %.1fs", tid, time.perf_counter() - start)
        chunks.append(tab)
    if args.format == "json":
        text = json.dumps(chunks if len(chunks) > 1 else chunks[0], indent=2)
    elif args.format == "csv":
        body = [format_table(t, "csv").split("\n", 1)[1] for t in chunks]
        text = "table,player2,player3,N,win_rate,margin\n" + "\n".join(body)
    else:
        text = "\n".join(format_table(t, "md") for t in chunks)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    try:
        with open(args.certificate) as fh:
            raw = json.load(fh)
        cert = PolicyCertificate.from_dict(raw)
    except (OSError, KeyError, ValueError) as exc:
        raise InputError(f"cannot read certificate {args.certificate!r}: {exc}") from None
    if args.game:
        game = load_game(args.game)
    elif "game" in raw:
        game = PolymatrixGame.from_dict(raw["game"])
    else:
        raise InputError("certificate carries no game; pass --game")
    try:
        report = verify_certificate(game, cert, args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report)
    return EXIT_OK if report.ok else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coopetition", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a manipulation policy")
    s.add_argument("--game", required=True, help="builtin name or game JSON path")
    s.add_argument("--class", dest="policy_class", default="type1", choices=POLICY_CLASSES)
    s.add_argument("--objective", default="feasibility",
                   help="one of " + ", ".join(o.replace("_", "-") for o in OBJECTIVES))
    s.add_argument("--eps", type=float, default=DEFAULT_EPS)
    s.add_argument("--custom", help="custom objective, e.g. v2=1,v3=1")
    s.add_argument("--sense", default="minimize", choices=("minimize", "maximize"))
    s.add_argument("--full", action="store_true", help="vary every row, not just row i*")
    s.add_argument("--also-win", action="store_true",
                   help="keep the winning rows for max-egalitarian")
    s.add_argument("--dump-lp", metavar="DIR", help="write each LP in text form")
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    m = sub.add_parser("simulate", help="run repeated games against learners")
    m.add_argument("--config", help="JSON config; flags override its fields")
    m.add_argument("--game")
    m.add_argument("--policy", help="fixture:NAME | synth:CLASS:OBJ | target:CLASS:OBJ:i,j,k | "
                                    "constant:A | cert:PATH | best-constant")
    m.add_argument("--agent2", help="kind[:eta], e.g. mwu:20")
    m.add_argument("--agent3")
    m.add_argument("--T", type=int)
    m.add_argument("--N", type=int)
    m.add_argument("--seed", type=int)
    m.add_argument("--mode", choices=("sampled", "expected"))
    m.add_argument("--feedback", choices=("mixed", "realized"))
    m.add_argument("--eps", type=float)
    m.add_argument("--threads", type=int)
    m.add_argument("--out", help="stats JSON path (stdout by default)")
    m.add_argument("--trace", help="CSV trace of the first run")
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reproduce", help="rebuild the win-rate/margin tables")
    r.add_argument("table", help="table id or 'all': " + ", ".join(TABLE_IDS))
    r.add_argument("--N", type=int, help="runs per row (default 200 with FTRL, else 2000)")
    r.add_argument("--T", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--eps", type=float, default=DEFAULT_EPS)
    r.add_argument("--mode", default="sampled", choices=("sampled", "expected"))
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--format", default="md", choices=("md", "csv", "json"))
    r.add_argument("--out")
    r.set_defaults(func=cmd_reproduce)

    v = sub.add_parser("verify", help="re-check a certificate by enumeration")
    v.add_argument("certificate")
    v.add_argument("--game", help="override the game stored in the certificate")
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"no winning policy: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
