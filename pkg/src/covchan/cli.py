"""Command-line front end: channel specs in, machine-readable JSON reports out.

Exit codes: 0 success, 2 validation error, 3 verification failure,
4 uncertified capacity result.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from .spectral import random_density_matrix, random_pure_state
from .weyl import (FiniteAbelianGroup, PhaseSpaceDistribution,
                   characteristic_from_distribution, composition_phase,
                   distribution_from_characteristic, make_group, weyl_operators)
from .channel import (QuantumChannel, channel_characteristic, channel_from_kraus,
                      depolarizing, dilation_sample, identity_channel,
                      is_bistochastic, kraus_from_choi, random_channel,
                      weyl_channel, werner_holevo)
from .capacity import (check_eex, ea_capacity, multiplicativity_probe,
                       one_shot_capacity_covariant, pure_decompositions)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERIFICATION = 3
EXIT_UNCERTIFIED = 4


def complex_from_json(entry) -> complex:
    if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
        raise ValueError(f"complex scalar must be a [re, im] pair, got {entry!r}")
    return complex(float(entry[0]), float(entry[1]))


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex_from_json(e) for e in row] for row in rows])


def matrix_to_json(m) -> list:
    return [[[float(e.real), float(e.imag)] for e in row] for row in np.asarray(m, complex)]


def parse_channel_spec(doc: dict):
    """Build a channel (and its group, when one is implied) from a spec document."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("channel spec must be an object with a 'kind' field")
    kind = doc["kind"]
    group = None
    if kind == "kraus":
        ch = channel_from_kraus([matrix_from_json(m) for m in doc["matrices"]])
    elif kind == "choi":
        ch = kraus_from_choi(matrix_from_json(doc["choi"]))
    elif kind == "weyl":
        group = make_group(doc["group"])
        probs = np.asarray(doc["probs"], dtype=float)
        ch = weyl_channel(group, PhaseSpaceDistribution(group, probs))
    elif kind == "werner-holevo":
        ch = werner_holevo(int(doc["dim"]))
    elif kind == "depolarizing":
        ch = depolarizing(int(doc["dim"]), float(doc["p"]))
    elif kind == "identity":
        ch = identity_channel(int(doc["dim"]))
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return ch, group


def load_spec(path: str):
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    ch, group = parse_channel_spec(doc)
    return ch, group, digest


def make_report(command: str, digest: str, seed, base, results: dict,
                residuals: dict, started: float) -> dict:
    return {
        "toolVersion": __version__,
        "command": command,
        "inputDigest": digest,
        "seed": seed,
        "entropyBase": "e" if base == "e" else "2",
        "results": results,
        "residuals": residuals,
        "timings": {"seconds": time.time() - started},
    }


def _jsonable(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=_jsonable)
    print(text)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)


def _parse_group_flag(value: str) -> FiniteAbelianGroup:
    return make_group([int(x) for x in value.split(",")])


def cmd_describe(args) -> int:
    started = time.time()
    ch, group, digest = load_spec(args.spec)
    if args.group:
        group = _parse_group_flag(args.group)
    bisto, bisto_resid = is_bistochastic(ch)
    choi_eigs = np.linalg.eigvalsh(ch.choi())
    results = {
        "dim": ch.in_dim,
        "outDim": ch.out_dim,
        "krausCount": ch.n_kraus,
        "bistochastic": {"verdict": bool(bisto), "residual": bisto_resid,
                         "tolerance": 1e-10},
        "choiSpectrum": {"min": float(choi_eigs[0]), "max": float(choi_eigs[-1]),
                         "trace": float(choi_eigs.sum())},
    }
    residuals = {"bistochastic": bisto_resid}
    if group is not None:
        if group.total_dim != ch.in_dim:
            raise ValueError(
                f"group total order {group.total_dim} does not match dim {ch.in_dim}")
        _, resid = channel_characteristic(ch, group)
        results["weylCovarianceResidual"] = resid
        residuals["weylCovariance"] = resid
    emit(make_report("describe", digest, None, args.base, results, residuals, started),
         args.out)
    return EXIT_OK


def cmd_capacity(args) -> int:
    started = time.time()
    ch, spec_group, digest = load_spec(args.spec)
    group = _parse_group_flag(args.group) if args.group else spec_group
    results: dict = {"mode": args.mode, "restarts": args.restarts, "tol": args.tol}
    status = EXIT_OK
    if args.mode == "one-shot":
        if group is None:
            raise ValueError("one-shot certification requires --group")
        if group.total_dim != ch.in_dim:
            raise ValueError(
                f"group total order {group.total_dim} does not match dim {ch.in_dim}")
        cert = one_shot_capacity_covariant(ch, group, restarts=args.restarts,
                                           seed=args.seed, tol=args.tol,
                                           base=args.base)
        results.update({
            "capacity": cert.value if cert.certified else None,
            "candidate": cert.value,
            "minOutputEntropy": cert.hmin,
            "orbitHolevoQuantity": cert.chi,
            "certificateGap": cert.gap,
            "certified": cert.certified,
            "converged": cert.optimization.converged,
            "gradientNorm": cert.optimization.gradient_norm,
        })
        if not cert.certified:
            results["flag"] = "achievability not certified"
            status = EXIT_UNCERTIFIED
    else:
        res = ea_capacity(ch, restarts=args.restarts, seed=args.seed, tol=args.tol,
                          base=args.base, assume_covariant=args.assume_covariant)
        results.update({
            "capacity": res.value,
            "assumeCovariant": args.assume_covariant,
            "converged": res.converged,
            "gradientNorm": res.gradient_norm,
            "restartsUsed": res.restarts_used,
        })
    emit(make_report("capacity", digest, args.seed, args.base, results, {}, started),
         args.out)
    return status


def _verify_weyl(group, trials, seed):
    w = weyl_operators(group)
    pts = group.points()
    d = group.total_dim
    eye = np.eye(d)
    ccr = unit = 0.0
    for i, z in enumerate(pts):
        unit = max(unit, float(np.linalg.norm(w[i].conj().T @ w[i] - eye)))
        for j, zp in enumerate(pts):
            th = composition_phase(group, z, zp)
            k = group.point_index(group.add(z, zp))
            ccr = max(ccr, float(np.linalg.norm(w[i] @ w[j] - np.exp(1j * th) * w[k])))
    rng = np.random.default_rng(seed)
    ortho = 0.0
    for _ in range(20):
        s = random_density_matrix(d, d, rng)
        avg = np.einsum("kij,jl,kml->im", w, s, w.conj()) / group.n_points
        ortho = max(ortho, float(np.linalg.norm(avg - eye / d)))
    fourier = structure = 0.0
    for _ in range(trials):
        p = rng.random(group.n_points)
        dist = PhaseSpaceDistribution(group, p / p.sum())
        phi = characteristic_from_distribution(dist)
        back = distribution_from_characteristic(phi)
        fourier = max(fourier, float(np.abs(back.probs - dist.probs).max()))
        _, resid = channel_characteristic(weyl_channel(group, dist), group)
        structure = max(structure, resid)
    return {"ccr": ccr, "unitarity": unit, "orthogonality": ortho,
            "fourierRoundTrip": fourier, "structureTheorem": structure}


def _verify_inequalities(trials, seed):
    rng = np.random.default_rng(seed)
    min_slack = np.inf
    worst = None
    for t in range(trials):
        d = int(rng.integers(2, 5))
        ch = random_channel(d, int(rng.integers(2, 5)), rng)
        rank = int(rng.integers(2, d + 1))
        s = random_density_matrix(d, rank, rng)
        decs = pure_decompositions(s, 5, int(rng.integers(0, 2 ** 31)))
        for rep in check_eex(ch, s, decs):
            if rep.slack < min_slack:
                min_slack = rep.slack
                worst = {"trial": t, "dim": d, "context": rep.context}
    return {"trials": trials, "minSlack": float(min_slack), "worstCase": worst}


def _verify_dilation(group, n, seed):
    rng = np.random.default_rng(seed)
    p = rng.random(group.n_points)
    dist = PhaseSpaceDistribution(group, p / p.sum())
    x = random_density_matrix(group.total_dim, group.total_dim, rng)
    _, err = dilation_sample(group, dist, x, n, seed=seed)
    _, exact_err = dilation_sample(group, dist, x, None, exhaustive=True)
    return {"n": n, "monteCarloError": err, "bound": 5.0 / np.sqrt(n),
            "exhaustiveResidual": exact_err}


def cmd_verify(args) -> int:
    started = time.time()
    seed = args.seed
    if args.suite == "weyl":
        group = _parse_group_flag(args.group or "2")
        results = _verify_weyl(group, args.trials, seed)
        passed = max(results.values()) <= 1e-10 and results["ccr"] <= 1e-12
    elif args.suite == "inequalities":
        results = _verify_inequalities(args.trials, seed)
        passed = results["minSlack"] >= -1e-9
    else:
        group = _parse_group_flag(args.group or "3")
        results = _verify_dilation(group, args.n, seed)
        passed = (results["monteCarloError"] < results["bound"]
                  and results["exhaustiveResidual"] <= 1e-12)
    results["pass"] = bool(passed)
    digest = hashlib.sha256(
        json.dumps({"suite": args.suite, "group": args.group, "trials": args.trials,
                    "n": args.n, "seed": seed}, sort_keys=True).encode()).hexdigest()
    emit(make_report(f"verify {args.suite}", digest, seed, args.base, results, {},
                     started), args.out)
    return EXIT_OK if passed else EXIT_VERIFICATION


def cmd_probe(args) -> int:
    started = time.time()
    ch, _, digest = load_spec(args.spec)
    if ch.in_dim > 4:
        raise ValueError(f"multiplicativity probe refuses d = {ch.in_dim} > 4")
    rep = multiplicativity_probe(ch, restarts=args.restarts, seed=args.seed,
                                 base=args.base)
    results = {
        "hminSingle": rep.hmin_single,
        "hminDouble": rep.hmin_double,
        "entangledInputEntropy": rep.entangled_point,
        "gap": rep.gap,
        "productBoundHolds": rep.product_bound_holds,
    }
    emit(make_report("probe-multiplicativity", digest, args.seed, args.base,
                     results, {}, started), args.out)
    return EXIT_OK if rep.product_bound_holds else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covchan",
        description="One-shot and entanglement-assisted capacities of covariant "
                    "quantum channels")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", default="2", choices=["2", "e"],
                        help="entropy logarithm base (default 2)")
    common.add_argument("--out", help="also write the report to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", parents=[common],
                       help="validate a channel spec and summarize it")
    p.add_argument("spec")
    p.add_argument("--group", help="comma-separated cyclic orders, e.g. 2,3")
    p.set_defaults(func=cmd_describe, seed=None)

    p = sub.add_parser("capacity", parents=[common], help="compute a capacity")
    p.add_argument("spec")
    p.add_argument("mode", choices=["one-shot", "ea"])
    p.add_argument("--group", help="comma-separated cyclic orders")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--assume-covariant", action="store_true")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=["weyl", "inequalities", "dilation"])
    p.add_argument("--group", help="comma-separated cyclic orders")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=100000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("probe-multiplicativity", parents=[common],
                       help="output-entropy additivity probe for Phi tensor Phi")
    p.add_argument("spec")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.base == "2":
        args.base = 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
