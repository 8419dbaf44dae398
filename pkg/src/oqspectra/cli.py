"""Command-line front end: analyze subjects, run verification campaigns,
construct the saturating examples, emit sampled subjects.

Exit codes: 0 success, 2 validation/parse failure, 3 bound violation (for
CI use); `verify` additionally exits 1 on oracle mismatches that are not
bound violations.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, campaign, constructions, gkls, spectra, superop
from .superop import ValidationError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oqspectra",
        description="Spectral analysis of quantum channels and GKLS generators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="full pipeline on a JSON subject file")
    p_analyze.add_argument("path")
    p_analyze.add_argument("--kind", choices=["channel", "generator"],
                           help="default: inferred from the JSON fields")
    p_analyze.add_argument("--tol-cluster", type=float, default=None)
    p_analyze.add_argument("--tol-peripheral", type=float,
                           default=spectra.DEFAULT_PERIPHERAL_TOL)
    p_analyze.add_argument("--markovian", action="store_true",
                           help="apply the Markovian-only CKKS-derived channel bound")
    fmt = p_analyze.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", dest="as_json")
    fmt.add_argument("--table", action="store_false", dest="as_json")
    p_analyze.set_defaults(as_json=False)

    p_verify = sub.add_parser("verify", help="seeded verification campaign")
    p_verify.add_argument("--dims", default="2..4",
                          help="range like 2..6 or list like 2,3,5")
    p_verify.add_argument("--per-dim", type=int, default=100)
    p_verify.add_argument("--ensembles", default=",".join(campaign.ALL_SOURCES),
                          help=f"comma list from {campaign.ALL_SOURCES}")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--env-dim", type=int, default=None)
    p_verify.add_argument("--out", default=None, help="write the campaign CSV here")

    p_construct = sub.add_parser("construct", help="emit a saturating example")
    p_construct.add_argument("kind", choices=["unitary", "phase-damping",
                                              "hamiltonian", "dissipative"])
    p_construct.add_argument("--dim", type=int, required=True)
    p_construct.add_argument("--h", default="0,1",
                             help="h1,h2 for the two-level Hamiltonian examples")
    p_construct.add_argument("--eigenpairs", default="1,0",
                             help="semicolon list of complex pairs, e.g. '1,0;1j,-1j'")
    p_construct.add_argument("--out", default=None)

    p_sample = sub.add_parser("sample", help="emit seeded random subjects")
    p_sample.add_argument("--ensemble", choices=constructions.ENSEMBLES, required=True)
    p_sample.add_argument("--dim", type=int, required=True)
    p_sample.add_argument("--count", type=int, default=1)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--env-dim", type=int, default=None)
    p_sample.add_argument("--out", default=None,
                          help="single JSON object, or JSON lines when count > 1")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "construct":
            return _cmd_construct(args)
        return _cmd_sample(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _load_subject(path: str, kind: str | None):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if kind is None:
        kind = "generator" if "hamiltonian" in obj else "channel"
    if kind == "generator":
        return kind, gkls.generator_from_json(obj)
    return kind, superop.channel_from_json(obj)


def _cmd_analyze(args) -> int:
    kind, subject = _load_subject(args.path, args.kind)
    if kind == "channel":
        report = analysis.analyze_channel(
            subject, cluster_tol=args.tol_cluster,
            peripheral_tol=args.tol_peripheral, markovian=args.markovian)
    else:
        report = analysis.analyze_generator(
            subject, cluster_tol=args.tol_cluster,
            peripheral_tol=args.tol_peripheral)
    if args.as_json:
        print(json.dumps(analysis.report_to_json(report), indent=2))
    else:
        print(analysis.report_to_table(report))
    return 0 if report.bounds_satisfied else 3


def _parse_dims(spec: str) -> tuple[int, ...]:
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in spec.split(",") if tok)


def _cmd_verify(args) -> int:
    config = campaign.CampaignConfig(
        dims=_parse_dims(args.dims),
        per_dim=args.per_dim,
        sources=tuple(tok.strip() for tok in args.ensembles.split(",") if tok.strip()),
        seed=args.seed,
        env_dim=args.env_dim,
    )
    result = campaign.run_campaign(config)
    text = campaign.rows_to_csv(result.rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"subjects analyzed:     {len(result.rows)}", file=sys.stderr)
    print(f"structural violations: {result.structural_violations}", file=sys.stderr)
    print(f"oracle mismatches:     {result.oracle_mismatches}", file=sys.stderr)
    print(f"ckks unital failures:  {result.ckks_unital_failures}", file=sys.stderr)
    if result.structural_violations or result.ckks_unital_failures:
        return 3
    if result.oracle_mismatches:
        return 1
    return 0


def _parse_pairs(spec: str) -> tuple[tuple[complex, complex], ...]:
    pairs = []
    for chunk in spec.split(";"):
        a, b = chunk.split(",")
        pairs.append((complex(a), complex(b)))
    return tuple(pairs)


def _cmd_construct(args) -> int:
    d = args.dim
    if args.kind == "unitary":
        h1, h2 = (float(tok) for tok in args.h.split(","))
        obj = superop.channel_to_json(constructions.saturating_unitary_channel(d, h1, h2))
    elif args.kind == "phase-damping":
        obj = superop.channel_to_json(constructions.phase_damping_channel(d))
    elif args.kind == "hamiltonian":
        h1, h2 = (float(tok) for tok in args.h.split(","))
        obj = gkls.generator_to_json(
            constructions.saturating_hamiltonian_generator(d, h1, h2))
    else:
        obj = gkls.generator_to_json(
            constructions.saturating_dissipative_generator(d, _parse_pairs(args.eigenpairs)))
    _emit(json.dumps(obj), args.out)
    return 0


def _cmd_sample(args) -> int:
    config = constructions.SamplerConfig(
        seed=args.seed, dim=args.dim, ensemble=args.ensemble,
        count=args.count, env_dim=args.env_dim)
    lines = []
    for subject in constructions.sample(config):
        if isinstance(subject, superop.QuantumChannel):
            lines.append(json.dumps(superop.channel_to_json(subject)))
        else:
            lines.append(json.dumps(gkls.generator_to_json(subject)))
    _emit("\n".join(lines), args.out)
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


if __name__ == "__main__":
    sys.exit(main())
