"""Batch front-end: region boundaries, optimization, verification, simulation.

Every command is deterministic under a fixed ``--seed`` and embeds its full
effective configuration in the emitted artifact, so outputs are reproducible
and auditable in isolation.  All floating-point output is printed with 12
significant digits.

Exit codes:

* 0 -- success; for verification commands, every check passed.
* 1 -- a verification or membership check failed.
* 2 -- input error: malformed JSON, schema violation, bad parameter,
  missing file, or a violated precondition.
* 3 -- infeasibility: a rate query with no feasible answer, or a budgeted
  certificate search that found nothing.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .channels import (
    AuxiliaryInput,
    BroadcastChannel,
    ChannelFormatError,
    aux_from_json,
    aux_from_px,
    aux_to_json,
    channel_from_json,
    channel_to_json,
    make_adder_erasure,
    make_bsc_pair,
)
from .feedback import (
    CertificateSearchError,
    GainCertificate,
    PreconditionError,
    certify_adder_gain,
    example4_uselessness_check,
)
from .info_kernel import binary_entropy
from .montecarlo import CodeParams, run_trials
from .pmf_optimizer import SearchConfig, maximize_rate_Y, maximize_weighted
from .polyhedra import theorem1_derivation_check
from .regions import (
    MEMBERSHIP_TOL,
    InfeasibleRateError,
    RateTuple,
    RegionKind,
    contains,
    evaluate,
)

_KIND_CHOICES = [k.value for k in RegionKind]


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _sig12(x: float) -> float:
    """Round to 12 significant digits (the artifact-wide float format)."""
    return float(format(float(x), ".12g"))


def _round(obj):
    """Recursively round floats to 12 significant digits for emission."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _sig12(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _emit_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, out: str | None) -> None:
    _emit_text(json.dumps(_round(doc), indent=2) + "\n", out)


# ---------------------------------------------------------------------------
# input plumbing
# ---------------------------------------------------------------------------

def _load_channel(path: str) -> BroadcastChannel:
    return channel_from_json(Path(path).read_text())


def _load_aux(path: str) -> AuxiliaryInput:
    return aux_from_json(Path(path).read_text())


def _parse_floats(text: str, n: int, what: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise ValueError(f"{what} needs {n} comma-separated numbers, got {len(parts)}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValueError(f"{what} contains a non-numeric entry: {text!r}") from None


def _aux_id(a: AuxiliaryInput) -> str:
    """Stable 12-hex-digit identifier of an auxiliary input's canonical JSON."""
    return hashlib.sha256(aux_to_json(a).encode()).hexdigest()[:12]


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


# ---------------------------------------------------------------------------
# region boundary | region eval
# ---------------------------------------------------------------------------

def cmd_region_boundary(args) -> int:
    _require(args.grid >= 1, f"--grid must be >= 1, got {args.grid}")
    _require(args.budget >= 1, f"--budget must be >= 1, got {args.budget}")
    c = _load_channel(args.channel)
    kind = RegionKind(args.kind)
    cfg = SearchConfig(restarts=args.budget, iterations=40, seed=args.seed)
    top = maximize_weighted(kind, c, (0.0, 0.0, 0.0, 1.0, 1.0), cfg)
    r_z_max = max(0.0, float(top.value))
    grid = np.linspace(0.0, r_z_max, args.grid)
    config = {
        "command": "region boundary",
        "kind": kind.value,
        "grid": args.grid,
        "seed": args.seed,
        "budget": args.budget,
        "r_z_max": r_z_max,
        "channel": json.loads(channel_to_json(c)),
    }
    lines = [
        "# " + json.dumps(_round(config), separators=(",", ":")),
        "r_z,r_y_max,certificate_id",
    ]
    for r_z in grid:
        res = maximize_rate_Y(kind, c, float(r_z), cfg)
        if res.value < 0.0:
            raise InfeasibleRateError(
                f"no auxiliary makes total Z-rate {r_z:.12g} feasible for {kind.value}"
            )
        lines.append(f"{r_z:.12g},{res.value:.12g},{_aux_id(res.argument)}")
    _emit_text("\n".join(lines) + "\n", args.out)
    return 0


def cmd_region_eval(args) -> int:
    c = _load_channel(args.channel)
    a = _load_aux(args.aux)
    kind = RegionKind(args.kind)
    region = evaluate(kind, c, a)
    doc = {
        "command": "region eval",
        "config": {
            "kind": kind.value,
            "rates": args.rates,
            "channel": json.loads(channel_to_json(c)),
            "aux": json.loads(aux_to_json(a)),
        },
        "region": region.to_dict(),
    }
    code = 0
    if args.rates is not None:
        t = RateTuple(*_parse_floats(args.rates, 5, "--rates"))
        member = contains(region, t)
        doc["membership"] = {
            "rates": list(t.as_vector()),
            "ok": bool(member.ok),
            "slacks": list(member.slacks),
            "tolerance": MEMBERSHIP_TOL,
        }
        code = 0 if member.ok else 1
    _emit_json(doc, args.out)
    return code


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

def cmd_optimize(args) -> int:
    _require(args.budget >= 1, f"--budget must be >= 1, got {args.budget}")
    c = _load_channel(args.channel)
    kind = RegionKind(args.kind)
    weights = _parse_floats(args.weights, 5, "--weights")
    cfg = SearchConfig(
        restarts=args.budget,
        seed=args.seed,
        enforce_x_functional=args.x_functional,
    )
    res = maximize_weighted(kind, c, weights, cfg)
    doc = {
        "command": "optimize",
        "config": {
            "kind": kind.value,
            "weights": list(weights),
            "seed": args.seed,
            "budget": args.budget,
            "x_functional": args.x_functional,
            "channel": json.loads(channel_to_json(c)),
        },
        "value": res.value,
        "rates": None if res.rates is None else list(res.rates.as_vector()),
        "aux": json.loads(aux_to_json(res.argument)),
        "restart_index": res.restart_index,
        "trace": list(res.trace),
        "budget_exhausted": res.budget_exhausted,
    }
    _emit_json(doc, args.out)
    return 0


# ---------------------------------------------------------------------------
# fme verify
# ---------------------------------------------------------------------------

def cmd_fme_verify(args) -> int:
    _require(args.samples >= 1, f"--samples must be >= 1, got {args.samples}")
    report = theorem1_derivation_check(samples=args.samples, seed=args.seed)
    doc = {
        "command": "fme verify",
        "config": {"samples": args.samples, "seed": args.seed},
        **report,
    }
    _emit_json(doc, args.out)
    return 0 if report["equivalent"] else 1


# ---------------------------------------------------------------------------
# feedback certify | feedback verify
# ---------------------------------------------------------------------------

def cmd_feedback_certify(args) -> int:
    _require(args.budget >= 1, f"--budget must be >= 1, got {args.budget}")
    modes = ["no_msi", "pmsi_y"] if args.mode == "both" else [args.mode]
    certificates = {}
    all_ok = True
    for mode in modes:
        cert = certify_adder_gain(
            args.p, no_msi=(mode == "no_msi"), budget=args.budget, r_fb=args.r_fb
        )
        report = cert.validate()
        all_ok = all_ok and report["ok"]
        certificates[mode] = {
            "certificate": json.loads(cert.to_json()),
            "validation": report,
        }
    doc = {
        "command": "feedback certify",
        "config": {
            "p": args.p,
            "mode": args.mode,
            "budget": args.budget,
            "r_fb": args.r_fb,
        },
        "certificates": certificates,
        "ok": all_ok,
    }
    _emit_json(doc, args.out)
    return 0 if all_ok else 1


def cmd_feedback_verify(args) -> int:
    obj = json.loads(Path(args.certificate).read_text())
    if not isinstance(obj, dict):
        raise ValueError("certificate file must hold a JSON object")
    if "certificates" in obj:
        items = {
            mode: entry["certificate"] if isinstance(entry, dict) and "certificate" in entry else entry
            for mode, entry in obj["certificates"].items()
        }
    else:
        items = {str(obj.get("mode", "certificate")): obj}
    reports = {}
    all_ok = True
    for name, payload in items.items():
        cert = GainCertificate.from_json(json.dumps(payload))
        report = cert.validate()
        reports[name] = report
        all_ok = all_ok and report["ok"]
    doc = {
        "command": "feedback verify",
        "config": {"certificate": args.certificate},
        "reports": reports,
        "ok": all_ok,
    }
    _emit_json(doc, args.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _simulate_point(entry, index: int, default_seed: int) -> tuple[str, CodeParams]:
    _require(isinstance(entry, dict), f"points[{index}] must be an object")
    for key in ("n", "rates", "aux_rates"):
        _require(key in entry, f"points[{index}] missing {key!r}")
    rates = entry["rates"]
    aux_rates = entry["aux_rates"]
    _require(
        isinstance(rates, list) and len(rates) == 5,
        f"points[{index}].rates must be a list of 5 numbers",
    )
    _require(
        isinstance(aux_rates, list) and len(aux_rates) == 3,
        f"points[{index}].aux_rates must be a list of 3 numbers",
    )
    label = str(entry.get("label", f"point-{index}"))
    params = CodeParams(
        n=int(entry["n"]),
        rates=RateTuple(*(float(v) for v in rates)),
        aux_rates=tuple(float(v) for v in aux_rates),
        epsilon=float(entry.get("epsilon", 0.2)),
        epsilon_tilde=float(entry.get("epsilon_tilde", 0.3)),
        seed=int(entry.get("seed", default_seed)),
    )
    return label, params


def cmd_simulate(args) -> int:
    obj = json.loads(Path(args.params).read_text())
    _require(isinstance(obj, dict), "params file must hold a JSON object")
    for key in ("channel", "aux", "points"):
        _require(key in obj, f"params missing {key!r}")
    c = channel_from_json(json.dumps(obj["channel"]))
    a = aux_from_json(json.dumps(obj["aux"]))
    trials = args.trials if args.trials is not None else int(obj.get("trials", 500))
    _require(trials >= 1, f"trials must be >= 1, got {trials}")
    points = obj["points"]
    _require(isinstance(points, list) and points, "params.points must be a non-empty list")

    results = []
    for i, entry in enumerate(points):
        label, params = _simulate_point(entry, i, args.seed)
        stats = run_trials(c, a, params, trials)
        results.append(
            {
                "label": label,
                "n": params.n,
                "rates": list(params.rates.as_vector()),
                "aux_rates": list(params.aux_rates),
                "epsilon": params.epsilon,
                "epsilon_tilde": params.epsilon_tilde,
                "seed": params.seed,
                "counts": params.counts(),
                "stats": stats.to_dict(),
            }
        )
    doc = {
        "command": "simulate",
        "config": {
            "trials": trials,
            "seed": args.seed,
            "channel": json.loads(channel_to_json(c)),
            "aux": json.loads(aux_to_json(a)),
        },
        "results": results,
    }
    _emit_json(doc, args.out)
    return 0


# ---------------------------------------------------------------------------
# examples check
# ---------------------------------------------------------------------------

def _check_example1(budget: int, seed: int) -> dict:
    """Binary-skew-symmetric pair: closed-form corner rates and max sum rate."""
    c = make_bsc_pair(0.25)
    a = aux_from_px([0.5, 0.5])
    region = evaluate(RegionKind.COR3_FMSI_AT_Z, c, a)
    rhs = [con.rhs for con in region.constraints]
    target_rhs = [1.0, 1.0 - binary_entropy(0.25), 1.0]
    rhs_tol = 1e-9
    rhs_ok = len(rhs) == 3 and all(
        abs(v - t) <= rhs_tol for v, t in zip(sorted(rhs), sorted(target_rhs))
    )
    cfg = SearchConfig(restarts=max(2, budget // 3), iterations=40, seed=seed)
    res = maximize_weighted(RegionKind.COR4_FMSI_BOTH, c, (0, 0, 1, 0, 1), cfg)
    sum_target = 2.0 - binary_entropy(0.25)
    sum_tol = 1e-3
    sum_ok = abs(res.value - sum_target) <= sum_tol
    return {
        "ok": bool(rhs_ok and sum_ok),
        "bound_values": {
            "computed": sorted(rhs),
            "expected": sorted(target_rhs),
            "tolerance": rhs_tol,
            "ok": bool(rhs_ok),
        },
        "max_sum_rate": {
            "computed": res.value,
            "expected": sum_target,
            "tolerance": sum_tol,
            "ok": bool(sum_ok),
        },
    }


def _check_example2(budget: int, seed: int) -> dict:
    """Adder-erasure sum capacity against its closed form across erasure rates."""
    rows = []
    for p in (0.3, 0.5, 0.8, 1.0):
        if p == 1.0:
            cfg = SearchConfig(restarts=2, iterations=25, seed=seed)
            tol = 1e-6
        else:
            cfg = SearchConfig(restarts=max(2, budget // 2), iterations=60, seed=seed)
            tol = 1e-3
        c = make_adder_erasure(p)
        res = maximize_weighted(RegionKind.COR2_FMSI_AT_Y, c, (0, 1, 1, 1, 1), cfg)
        p2 = 1.0 / (1.0 + 2.0 ** (1.0 / p))
        expected = (1.0 - p) + p * binary_entropy(p2) + (2.0 ** (1.0 / p)) / (
            1.0 + 2.0 ** (1.0 / p)
        )
        rows.append(
            {
                "p": p,
                "computed": res.value,
                "expected": expected,
                "tolerance": tol,
                "ok": bool(abs(res.value - expected) <= tol),
            }
        )
    return {"ok": bool(all(r["ok"] for r in rows)), "sum_capacity": rows}


def _check_example3(budget: int) -> dict:
    """Certified strict feedback gains on the adder-erasure channel at p = 0.6."""
    modes = {}
    for mode in ("no_msi", "pmsi_y"):
        cert = certify_adder_gain(0.6, no_msi=(mode == "no_msi"), budget=budget)
        report = cert.validate()
        modes[mode] = {
            "margin": report["margin"],
            "validated": report["ok"],
            "ok": bool(report["ok"] and report["margin"] > 0.0),
        }
    return {"ok": bool(all(m["ok"] for m in modes.values())), "modes": modes}


def _check_example4(budget: int, seed: int) -> dict:
    """Feedback uselessness under function-erasure with f = x mod 2."""
    rows = []
    for p in (0.3, 0.5):
        report = example4_uselessness_check(
            [0, 1, 0, 1], p, budget=max(1, budget // 3), seed=seed
        )
        rows.append(
            {
                "p": p,
                "max_spread": report["max_spread"],
                "tolerance": report["tolerance"],
                "ok": bool(report["ok"]),
            }
        )
    return {"ok": bool(all(r["ok"] for r in rows)), "agreement": rows}


def cmd_examples_check(args) -> int:
    _require(args.budget >= 1, f"--budget must be >= 1, got {args.budget}")
    selected = (
        ["example1", "example2", "example3", "example4"]
        if args.which == "all"
        else [args.which]
    )
    runners = {
        "example1": lambda: _check_example1(args.budget, args.seed),
        "example2": lambda: _check_example2(args.budget, args.seed),
        "example3": lambda: _check_example3(args.budget),
        "example4": lambda: _check_example4(args.budget, args.seed),
    }
    examples = {name: runners[name]() for name in selected}
    all_ok = all(e["ok"] for e in examples.values())
    doc = {
        "command": "examples check",
        "config": {"which": args.which, "budget": args.budget, "seed": args.seed},
        "examples": examples,
        "ok": all_ok,
    }
    _emit_json(doc, args.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, budget_default: int = 12) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--budget", type=int, default=budget_default,
                   help=f"search budget / restarts (default {budget_default})")
    p.add_argument("--out", type=str, default=None,
                   help="write the artifact to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdbc",
        description="Rate regions of semideterministic broadcast channels "
        "with partial message side information and feedback.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    region = sub.add_parser("region", help="boundary traces and membership checks")
    region_sub = region.add_subparsers(dest="subcommand", required=True)

    boundary = region_sub.add_parser("boundary", help="CSV trace of max R_Y over an R_Z grid")
    boundary.add_argument("channel", help="channel JSON file")
    boundary.add_argument("--kind", required=True, choices=_KIND_CHOICES)
    boundary.add_argument("--grid", type=int, default=20, help="number of R_Z grid points")
    _add_common(boundary, budget_default=8)
    boundary.set_defaults(func=cmd_region_boundary)

    reval = region_sub.add_parser("eval", help="evaluate a region at a fixed auxiliary input")
    reval.add_argument("channel", help="channel JSON file")
    reval.add_argument("--kind", required=True, choices=_KIND_CHOICES)
    reval.add_argument("--aux", required=True, help="auxiliary-input JSON file")
    reval.add_argument("--rates", default=None,
                       help="optional membership query: R,RYp,RYc,RZp,RZc")
    reval.add_argument("--out", type=str, default=None)
    reval.set_defaults(func=cmd_region_eval)

    opt = sub.add_parser("optimize", help="maximize a weighted rate sum over auxiliaries")
    opt.add_argument("channel", help="channel JSON file")
    opt.add_argument("--kind", required=True, choices=_KIND_CHOICES)
    opt.add_argument("--weights", required=True, help="five weights: w0,w1,w2,w3,w4")
    opt.add_argument("--x-functional", action="store_true",
                     help="restrict the search to X a deterministic function of (Y, U)")
    _add_common(opt)
    opt.set_defaults(func=cmd_optimize)

    fme = sub.add_parser("fme", help="symbolic derivation checks")
    fme_sub = fme.add_subparsers(dest="subcommand", required=True)
    fverify = fme_sub.add_parser(
        "verify", help="re-derive the achievable region by Fourier-Motzkin elimination"
    )
    fverify.add_argument("--samples", type=int, default=100,
                         help="random valuations for the equivalence check")
    fverify.add_argument("--seed", type=int, default=0)
    fverify.add_argument("--out", type=str, default=None)
    fverify.set_defaults(func=cmd_fme_verify)

    fb = sub.add_parser("feedback", help="feedback-gain certificates")
    fb_sub = fb.add_subparsers(dest="subcommand", required=True)

    certify = fb_sub.add_parser("certify", help="search for a certified strict feedback gain")
    certify.add_argument("--p", type=float, required=True, help="erasure probability")
    certify.add_argument("--mode", choices=["both", "no_msi", "pmsi_y"], default="both")
    certify.add_argument("--r-fb", type=float, default=None,
                         help="feedback rate (default: perfect feedback, log2 |Z|)")
    _add_common(certify)
    certify.set_defaults(func=cmd_feedback_certify)

    fbverify = fb_sub.add_parser("verify", help="re-validate a stored gain certificate")
    fbverify.add_argument("certificate", help="certificate JSON file (bare or certify output)")
    fbverify.add_argument("--out", type=str, default=None)
    fbverify.set_defaults(func=cmd_feedback_verify)

    sim = sub.add_parser("simulate", help="Monte-Carlo error trends for the binned code")
    sim.add_argument("params", help="simulation parameters JSON file")
    sim.add_argument("--trials", type=int, default=None,
                     help="override the trial count in the params file")
    sim.add_argument("--seed", type=int, default=0,
                     help="seed for points that do not set one")
    sim.add_argument("--out", type=str, default=None)
    sim.set_defaults(func=cmd_simulate)

    examples = sub.add_parser("examples", help="worked-example reproduction checks")
    ex_sub = examples.add_subparsers(dest="subcommand", required=True)
    check = ex_sub.add_parser("check", help="reproduce the worked examples and report pass/fail")
    check.add_argument("--which", default="all",
                       choices=["all", "example1", "example2", "example3", "example4"])
    _add_common(check)
    check.set_defaults(func=cmd_examples_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleRateError as e:
        print(f"error: infeasible: {e}", file=sys.stderr)
        return 3
    except CertificateSearchError as e:
        print(f"error: search exhausted: {e}", file=sys.stderr)
        return 3
    except PreconditionError as e:
        print(f"error: precondition violated: {', '.join(e.violations)}", file=sys.stderr)
        return 2
    except (ChannelFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
