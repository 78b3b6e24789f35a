"""Command-line front end: analyze / simulate / certify / campaign.

Every command is deterministic given (input, flags, seed); all randomness
flows from the single --seed value.  Exit codes are part of the contract:

    analyze:   0 ok, 1 parse error or missing file, 2 validation error
    simulate:  0 ok, 1 parse error, 2 bad initial state, 3 integration failure
    certify:   0 certified, 4 hypotheses fail, 5 descent violation found,
               6 inconclusive (1/2 as above for input errors)
    campaign:  0 ok, 1 bad spec

CRN_BOUND_THREADS caps trial-level parallelism (default 1).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import certifier, dynamics, graph, model, parser
from .certifier import (
    CONCLUSION_CERTIFIED,
    CONCLUSION_DESCENT_VIOLATION,
    CONCLUSION_HYPOTHESES_FAIL,
    NetworkSpec,
    SpecInfeasible,
    TrialSpec,
)

DEFAULT_SEED = 20130114


def _load_network(path: str):
    try:
        doc = parser.parse_file(path)
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=sys.stderr)
        raise SystemExit(1)
    except parser.ParseError as exc:
        print(exc.format(path), file=sys.stderr)
        raise SystemExit(1)
    try:
        return parser.lower(doc)
    except model.NetworkValidationError as exc:
        for violation in exc.violations:
            print(f"{path}: {violation.describe()}", file=sys.stderr)
        raise SystemExit(2)


def _parse_x0(text: str, n: int) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        print(f"--x0 must be a comma-separated list of numbers, got {text!r}", file=sys.stderr)
        raise SystemExit(2)
    if len(values) != n:
        print(f"--x0 needs {n} components, got {len(values)}", file=sys.stderr)
        raise SystemExit(2)
    x0 = np.array(values)
    if np.any(x0 <= 0):
        print("--x0 components must be strictly positive", file=sys.stderr)
        raise SystemExit(2)
    return x0


def cmd_analyze(args) -> int:
    net, kin = _load_network(args.file)
    decomp = graph.linkage_classes(net)
    weak, witness = graph.is_weakly_reversible(net)
    rev = graph.is_reversible(net)
    sdim = model.stoichiometric_basis(net).dimension
    conservation = model.conservation_basis(net)
    names = net.species_names

    def sign_label(w) -> str:
        if all(v >= 0 for v in w):
            return "non-negative"
        if all(v <= 0 for v in w):
            return "non-positive"
        return "mixed-sign"

    if args.format == "json":
        payload = {
            "schema": "crn-bound/analyze/v1",
            "species": list(names),
            "n_complexes": net.n_complexes,
            "n_reactions": net.n_reactions,
            "linkage_classes": [list(c) for c in decomp.classes],
            "weakly_reversible": weak,
            "weak_reversibility_witness": list(witness) if witness else None,
            "reversible": rev,
            "stoichiometric_dimension": sdim,
            "conservation_relations": [
                {"vector": list(w), "sign": sign_label(w)} for w in conservation
            ],
        }
        print(json.dumps(payload, indent=2))
        return 0
    print(f"species: {len(names)} ({', '.join(names)})")
    print(f"complexes: {net.n_complexes}")
    print(f"reactions: {net.n_reactions}")
    print(f"linkage classes: {decomp.n_classes}")
    print(f"weakly reversible: {'yes' if weak else 'no'}")
    if witness is not None:
        a, b = witness
        print(
            "  witness: no directed path from "
            f"{net.complexes[a].format(names)} to {net.complexes[b].format(names)}"
        )
    print(f"reversible: {'yes' if rev else 'no'}")
    print(f"stoichiometric dimension: {sdim}")
    if conservation:
        print("conservation relations:")
        for w in conservation:
            print(f"  ({', '.join(str(v) for v in w)})  [{sign_label(w)}]")
    else:
        print("conservation relations: none")
    return 0


def cmd_simulate(args) -> int:
    net, kin = _load_network(args.file)
    x0 = _parse_x0(args.x0, net.n_species)
    opts = dynamics.IntegrateOptions(rtol=args.rtol, grid_points=args.grid_points)
    try:
        traj = dynamics.integrate(net, kin, x0, args.t_end, opts)
    except dynamics.IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return 3
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.file))[0]
    if args.format in (None, "csv"):
        csv_path = os.path.join(args.out, f"{stem}_trajectory.csv")
        traj.to_csv(csv_path)
        print(csv_path)
    if args.format in (None, "json"):
        json_path = os.path.join(args.out, f"{stem}_summary.json")
        traj.to_json_summary(json_path)
        print(json_path)
    return 0


def _report_json(payload: dict) -> str:
    return json.dumps(payload, indent=2)


def cmd_certify(args) -> int:
    net, kin = _load_network(args.file)
    spec = TrialSpec(
        trials=args.trials,
        horizon=args.t_end,
        seed=args.seed,
        rtol=args.rtol,
        no_union_sequences=args.no_union_sequences,
    )
    report = certifier.certify_boundedness(net, kin, spec)
    payload = report.as_dict()
    if args.permanence_delta is not None:
        try:
            perm = certifier.check_permanence(net, kin, args.permanence_delta, spec)
        except certifier.DeltaNonPositive as exc:
            print(str(exc), file=sys.stderr)
            return 2
        payload["permanence"] = perm.as_dict()
    text = _report_json(payload)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "certificate.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(path)
    else:
        print(text)
    if report.conclusion == CONCLUSION_CERTIFIED:
        return 0
    if report.conclusion == CONCLUSION_HYPOTHESES_FAIL:
        return 4
    if report.conclusion == CONCLUSION_DESCENT_VIOLATION:
        return 5
    return 6


def cmd_campaign(args) -> int:
    try:
        raw = json.loads(args.random_spec)
        spec = NetworkSpec(
            n_species=int(raw["N"]),
            num_complexes=int(raw["num_complexes"]),
            max_coeff=int(raw.get("max_coeff", 3)),
            extra_edges=int(raw.get("extra_edges", 0)),
            kinetics=raw.get("kinetics", "constant"),
            rate_range=tuple(raw.get("rate_range", (0.5, 2.0))),
        )
        if args.count < 0:
            raise ValueError("count must be non-negative")
    except (KeyError, TypeError, ValueError) as exc:
        print(f"bad --random-spec: {exc}", file=sys.stderr)
        return 1
    trial = TrialSpec(trials=args.trials, horizon=args.t_end, rtol=args.rtol)
    try:
        result = certifier.run_campaign(spec, args.count, seed=args.seed, trial_spec=trial)
    except SpecInfeasible as exc:
        print(f"bad --random-spec: {exc}", file=sys.stderr)
        return 1
    payload = result.as_dict()
    if not args.full_reports:
        payload["reports"] = [
            {
                "conclusion": rep.conclusion,
                "m_estimate": rep.m_estimate,
                "hypotheses": rep.hypotheses.as_dict(),
                "max_sup_norm": max(
                    (t.sup_norm_observed for t in rep.trials if t.error is None),
                    default=None,
                ),
            }
            for rep in result.reports
        ]
    text = _report_json(payload)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "campaign.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(path)
    else:
        print(text)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crnbound",
        description="Reaction-network structure, simulation, and boundedness certification",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="structural report for a .crn file")
    pa.add_argument("file")
    pa.add_argument("--format", choices=("text", "json"), default="text")
    pa.set_defaults(fn=cmd_analyze)

    ps = sub.add_parser("simulate", help="integrate mass-action dynamics")
    ps.add_argument("file")
    ps.add_argument("--x0", required=True, help='initial state, e.g. "2,0.5"')
    ps.add_argument("--t-end", type=float, default=20.0)
    ps.add_argument("--rtol", type=float, default=1e-8)
    ps.add_argument("--grid-points", type=int, default=201)
    ps.add_argument("--format", choices=("json", "csv"), default=None,
                    help="restrict output to one format (default: both)")
    ps.add_argument("--out", default="out")
    ps.set_defaults(fn=cmd_simulate)

    pc = sub.add_parser("certify", help="boundedness certificate report")
    pc.add_argument("file")
    pc.add_argument("--trials", type=int, default=3)
    pc.add_argument("--t-end", type=float, default=50.0)
    pc.add_argument("--rtol", type=float, default=1e-8)
    pc.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pc.add_argument("--permanence-delta", type=float, default=None)
    pc.add_argument("--no-union-sequences", type=int, default=0)
    pc.add_argument("--out", default=None)
    pc.set_defaults(fn=cmd_certify)

    pg = sub.add_parser("campaign", help="random-network certification campaign")
    pg.add_argument(
        "--random-spec",
        required=True,
        help='JSON, e.g. {"N":3,"num_complexes":4,"max_coeff":3,"extra_edges":1}',
    )
    pg.add_argument("--count", type=int, default=10)
    pg.add_argument("--trials", type=int, default=2)
    pg.add_argument("--t-end", type=float, default=50.0)
    pg.add_argument("--rtol", type=float, default=1e-8)
    pg.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pg.add_argument("--full-reports", action="store_true")
    pg.add_argument("--out", default=None)
    pg.set_defaults(fn=cmd_campaign)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
