"""Command-line front end.

Subcommands
-----------
``certify <model.json> [--route auto|pf|m1|eigen|partition] [--thresholds k1,k2,...]``
    Run stability certificate routes on a model file and print a report.
``stabilize <model.json> <out.json>``
    Synthesize feedback gains and write them as a JSON document.
``simulate <model.json> [--T --h --paths --seed --tol --gains f --csv f --plot f]``
    Run a reproducible Monte Carlo ensemble; print a JSON summary line.

Exit codes: 0 = certified / synthesis succeeded / simulation completed,
2 = the method refused (reasons printed), 1 = input or usage error (a JSON
error line goes to standard error).  Model files are schema-validated before
any computation; unknown fields are rejected.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import jsonschema
import numpy as np

from . import certify as certify_mod
from . import lmi as lmi_mod
from . import markov, model as model_mod
from .numerics import NumericsError
from .simulate import SimConfig, run_ensemble

_MATRIX = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
}

MODEL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["generator", "modes"],
    "properties": {
        "generator": _MATRIX,
        "modes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["A"],
                        "properties": {
                            "A": _MATRIX,
                            "noise": {"type": "array", "items": _MATRIX},
                            "B": _MATRIX,
                            "beta": {"type": "number"},
                        },
                    },
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["fixture", "beta"],
                        "properties": {
                            "fixture": {"type": "string"},
                            "beta": {"type": "number"},
                        },
                    },
                ]
            },
        },
        "gamma": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "inverse_square": {"type": "number", "minimum": 0},
                "exp_decay": {"type": "number", "minimum": 0},
            },
        },
        "thresholds": {"type": "array", "items": {"type": "number"}},
        "x0": {"type": "array", "minItems": 1, "items": {"type": "number"}},
        "i0": {"type": "integer", "minimum": 0},
    },
}

GAINS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["Gamma", "Y", "alpha", "K"],
    "properties": {
        "Gamma": _MATRIX,
        "Y": {"type": "array", "items": _MATRIX},
        "alpha": {"type": "array", "items": {"type": "number"}},
        "K": {"type": "array", "items": _MATRIX},
        "margins": {"type": "array", "items": {"type": "number"}},
        "averaging": {"type": "number"},
    },
}


class InputError(Exception):
    """Any problem with user-supplied files or flags (exit code 1)."""


def _load_json(path: str, schema: dict) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        raise InputError(f"{path} failed schema validation: {e.message}") from e
    return doc


def load_model(path: str):
    """Read and validate a model file.

    Returns ``(model, beta, thresholds, x0, i0)``; ``thresholds`` is None
    when the file names none.
    """
    doc = _load_json(path, MODEL_SCHEMA)
    try:
        g = markov.validate(np.array(doc["generator"], dtype=float))
        modes = []
        overrides = []
        for entry in doc["modes"]:
            if "fixture" in entry:
                modes.append(model_mod.NonlinearMode(fixture_id=entry["fixture"]))
                overrides.append(float(entry["beta"]))
            else:
                modes.append(
                    model_mod.LinearMode(
                        A=np.array(entry["A"], dtype=float),
                        noise=tuple(
                            np.array(c, dtype=float) for c in entry.get("noise", [])
                        ),
                        input=(
                            np.array(entry["B"], dtype=float)
                            if "B" in entry
                            else None
                        ),
                    )
                )
                overrides.append(
                    float(entry["beta"]) if "beta" in entry else None
                )
        gamma = None
        if "gamma" in doc:
            gamma = model_mod.GammaDescriptor(
                inverse_square=float(doc["gamma"].get("inverse_square", 0.0)),
                exp_decay=float(doc["gamma"].get("exp_decay", 0.0)),
            )
        m = model_mod.SwitchingModel(generator=g, modes=tuple(modes), gamma=gamma)
        beta = model_mod.beta_vector(m, overrides)
        thresholds = (
            tuple(float(k) for k in doc["thresholds"])
            if "thresholds" in doc
            else None
        )
        x0 = (
            np.array(doc["x0"], dtype=float)
            if "x0" in doc
            else np.ones(m.dimension)
        )
        if len(x0) != m.dimension:
            raise InputError(
                f"x0 has length {len(x0)}, model dimension is {m.dimension}"
            )
        i0 = int(doc.get("i0", 0))
        if not (0 <= i0 < m.N):
            raise InputError(f"i0 = {i0} outside 0..{m.N - 1}")
        return m, beta, thresholds, x0, i0
    except (markov.MarkovError, model_mod.ModelError, ValueError) as e:
        raise InputError(str(e)) from e


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _fmt_vec(v) -> str:
    return "[" + ", ".join(_fmt(float(x)) for x in np.asarray(v).ravel()) + "]"


def _print_outcome(result) -> bool:
    """Print one route's outcome; True iff it is a certificate."""
    if isinstance(result, certify_mod.Refusal):
        details = {
            k: (v if not isinstance(v, float) else float(_fmt(v)))
            for k, v in result.details.items()
        }
        print(f"route {result.route}: refused ({result.reason}) {json.dumps(details)}")
        return False
    w = result.witness
    print(f"route {result.route}: certified")
    if result.averaging is not None:
        print(f"  averaging: {_fmt(result.averaging)}")
    if result.route == "pf":
        print(f"  p: {_fmt(w.p)}")
        print(f"  p_max: {_fmt(w.p_max)}")
        print(f"  eta: {_fmt(w.eta)}")
        print(f"  xi: {_fmt_vec(w.xi)}")
    elif result.route == "m1":
        print(f"  eta: {_fmt(w.eta)}")
        print(f"  ratio_value: {_fmt(w.ratio_value)}")
        print(f"  gamma_ok: {str(w.gamma_ok).lower()}")
        print(f"  xi: {_fmt_vec(w.xi)}")
    elif result.route == "eigen":
        print(f"  lambda0: {_fmt(w.lambda0)}")
        print(f"  xi: {_fmt_vec(w.xi)}")
        print(f"  dirichlet_residual: {_fmt(w.dirichlet_residual)}")
    elif result.route == "partition":
        print(f"  thresholds: {_fmt_vec(w.thresholds) if w.thresholds else '[]'}")
        print(f"  groups: {list(w.groups)}")
        print(f"  betaF: {_fmt_vec(w.betaF)}")
        print(f"  xiF: {_fmt_vec(w.xiF)}")
        print(f"  mmatrix_literal: {str(w.mmatrix_literal).lower()}")
    print(f"  residual: {_fmt(result.residual)}")
    return True


def cmd_certify(args) -> int:
    m, beta, file_thresholds, _x0, _i0 = load_model(args.model)
    thresholds = file_thresholds
    if args.thresholds is not None:
        try:
            thresholds = tuple(
                float(tok) for tok in args.thresholds.split(",") if tok.strip()
            )
        except ValueError as e:
            raise InputError(f"bad --thresholds: {e}") from e
    g = m.generator
    dist = markov.stationary(g)
    print(f"model: {args.model}")
    print(f"averaging value: {_fmt(certify_mod.averaging_value(dist, beta))}")

    def run_partition():
        if thresholds is None:
            raise InputError("the partition route needs thresholds (file or --thresholds)")
        try:
            part = certify_mod.build_partition(beta, thresholds)
        except certify_mod.CertifyError as e:
            raise InputError(str(e)) from e
        chain = certify_mod.FiniteChain(generator=g, beta=beta)
        qf, beta_f = certify_mod.reduced_generator(chain, part)
        return certify_mod.partition_certificate(qf, beta_f, part)

    routes = {
        "pf": lambda: certify_mod.pf_certificate(g, beta),
        "m1": lambda: certify_mod.m1_certificate(g, beta, m),
        "eigen": lambda: certify_mod.principal_eigenvalue(g, dist, beta),
        "partition": run_partition,
    }
    if args.route != "auto":
        return 0 if _print_outcome(routes[args.route]()) else 2
    for name in ("pf", "m1", "eigen", "partition"):
        if name == "partition" and thresholds is None:
            continue
        if _print_outcome(routes[name]()):
            return 0
    print("not certified: all routes refused")
    return 2


def cmd_stabilize(args) -> int:
    m, _beta, _th, _x0, _i0 = load_model(args.model)
    try:
        dist = markov.stationary(m.generator)
        result = lmi_mod.synthesize(m, dist)
    except model_mod.DimensionMismatch as e:
        raise InputError(str(e)) from e
    if isinstance(result, lmi_mod.LmiRefusal):
        print(f"refused ({result.reason}) {json.dumps(result.details)}")
        return 2
    cand = result.candidate
    doc = {
        "Gamma": cand.Gamma.tolist(),
        "Y": [y.tolist() for y in cand.Y],
        "alpha": cand.alpha.tolist(),
        "K": [k.tolist() for k in result.K],
        "margins": result.margins.tolist(),
        "averaging": result.averaging,
    }
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as e:
        raise InputError(f"cannot write {args.out}: {e}") from e
    print(f"synthesis written to {args.out}")
    print(f"averaging: {_fmt(result.averaging)}")
    for i, k in enumerate(result.K):
        print(f"K[{i}]: {_fmt_vec(k)}")
    print(f"margins: {_fmt_vec(result.margins)}")
    return 0


def load_gains(path: str) -> tuple:
    """Read a synthesis file back as ``(LmiCandidate, K matrices)``."""
    doc = _load_json(path, GAINS_SCHEMA)
    cand = lmi_mod.LmiCandidate(
        Gamma=np.array(doc["Gamma"], dtype=float),
        Y=tuple(np.array(y, dtype=float) for y in doc["Y"]),
        alpha=np.array(doc["alpha"], dtype=float),
    )
    return cand, tuple(np.array(k, dtype=float) for k in doc["K"])


def cmd_simulate(args) -> int:
    m, _beta, _th, x0, i0 = load_model(args.model)
    gains = load_gains(args.gains)[1] if args.gains else None
    if gains is not None and len(gains) != m.N:
        raise InputError(f"{len(gains)} gain matrices for {m.N} modes")
    try:
        cfg = SimConfig(
            T=args.T, h=args.h, paths=args.paths, seed=args.seed,
            x0=x0, i0=i0, gains=gains,
        )
        ens = run_ensemble(m, cfg, tol=args.tol)
    except ValueError as e:
        raise InputError(str(e)) from e

    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["path", "t", "norm_x", "mode"])
                for rec in ens.records:
                    for t, nx, md in zip(rec.times, rec.norms, rec.modes):
                        writer.writerow(
                            [rec.index, repr(float(t)), repr(float(nx)), int(md)]
                        )
        except OSError as e:
            raise InputError(f"cannot write {args.csv}: {e}") from e
    if args.plot:
        _write_plot(args.plot, ens)
    print(json.dumps({
        "paths": cfg.paths,
        "T": cfg.T,
        "h": cfg.h,
        "seed": cfg.seed,
        "tol": ens.tol,
        "converged_fraction": ens.converged_fraction,
        "median_terminal_norm": ens.median_terminal_norm,
        "lyapunov_mean": ens.lyapunov_mean,
        "lyapunov_std": ens.lyapunov_std,
        "pooled_occupation": list(ens.pooled_occupation),
        "diverged": ens.diverged_count,
    }))
    return 0


def _write_plot(path: str, ens) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_norm, ax_mode) = plt.subplots(
        2, 1, figsize=(8, 6), sharex=True, height_ratios=[3, 1]
    )
    for rec in ens.records:
        ax_norm.semilogy(rec.times, np.maximum(rec.norms, 1e-300), lw=0.5, alpha=0.5)
    ax_norm.set_ylabel("|X(t)|")
    ax_norm.grid(True, which="both", alpha=0.3)
    first = ens.records[0]
    ax_mode.step(first.times, first.modes, where="post")
    ax_mode.set_xlabel("t")
    ax_mode.set_ylabel("mode (path 0)")
    ax_mode.set_yticks(sorted(set(int(v) for v in first.modes)))
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg")
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}") from e
    finally:
        plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchstab",
        description="Stability certificates, feedback synthesis, and Monte "
        "Carlo validation for regime-switching diffusions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cert = sub.add_parser("certify", help="run stability certificate routes")
    p_cert.add_argument("model", help="model JSON file")
    p_cert.add_argument(
        "--route", choices=["auto", "pf", "m1", "eigen", "partition"], default="auto"
    )
    p_cert.add_argument(
        "--thresholds", default=None,
        help="comma-separated growth-rate thresholds for the partition route",
    )
    p_cert.set_defaults(func=cmd_certify)

    p_stab = sub.add_parser("stabilize", help="synthesize feedback gains")
    p_stab.add_argument("model", help="model JSON file (linear modes with B)")
    p_stab.add_argument("out", help="output JSON file for the synthesis")
    p_stab.set_defaults(func=cmd_stabilize)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo ensemble")
    p_sim.add_argument("model", help="model JSON file")
    p_sim.add_argument("--T", type=float, default=10.0, help="horizon")
    p_sim.add_argument("--h", type=float, default=1e-3, help="max step size")
    p_sim.add_argument("--paths", type=int, default=100)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--tol", type=float, default=1e-3,
                       help="terminal norm ratio counted as converged")
    p_sim.add_argument("--gains", default=None,
                       help="synthesis JSON from 'stabilize' (closed loop)")
    p_sim.add_argument("--csv", default=None, help="write per-path records")
    p_sim.add_argument("--plot", default=None, help="write an SVG chart")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return 1
    except (certify_mod.CertifyError, lmi_mod.LmiError, NumericsError,
            markov.MarkovError, model_mod.ModelError) as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
