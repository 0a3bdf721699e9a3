"""Batch analysis front-end: groundtruth | qc | analyze | illusion | serve.

All outputs are data files (CSV/JSON/DOT), written atomically and
byte-identical across runs on identical inputs. Exit codes: 0 success,
1 generic failure, 2 missing deliberation decisions, 3 too few experts,
4 unknown attribute, 5 empty accepted set, 6 missing credibility score.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import groundtruth as gt
from . import illusion, io, metrics, pathlab, qualitycontrol as qc

EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_MISSING_DECISION = 2
EXIT_TOO_FEW_EXPERTS = 3
EXIT_CATALOG_MISS = 4
EXIT_EMPTY_ACCEPTED = 5
EXIT_MISSING_CREDIBILITY = 6


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_GENERIC):
        super().__init__(message)
        self.exit_code = exit_code


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise CliError(f"input file does not exist: {p}")
    return p


def _apply_config_file(args: argparse.Namespace) -> None:
    """--config overrides unset flags; all referenced files must exist."""
    if not getattr(args, "config", None):
        return
    with open(_existing(args.config)) as handle:
        overrides = json.load(handle)
    for key, value in overrides.items():
        if getattr(args, key, None) in (None, []):
            setattr(args, key, value)


def cmd_groundtruth(args: argparse.Namespace) -> int:
    _apply_config_file(args)
    catalog = io.load_catalog(_existing(args.catalog))
    try:
        experts = [
            io.load_expert_network(_existing(path), catalog)
            for path in args.experts
        ]
    except KeyError as exc:
        raise CliError(f"unknown attribute in expert file: {exc}", EXIT_CATALOG_MISS)
    try:
        draft, worklist = gt.merge_expert_networks(experts, catalog)
    except gt.TooFewExperts as exc:
        raise CliError(str(exc), EXIT_TOO_FEW_EXPERTS)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    suggestions = {
        link: gt.suggest_deliberation_score(link, experts) for link in worklist
    }
    worklist_csv = "cause,effect,score,note\n" + "".join(
        f"{link.cause.display},{link.effect.display},,suggested {score}\n"
        for link, score in suggestions.items()
    )
    io.atomic_write_text(out_dir / "worklist.csv", worklist_csv)

    decisions = {}
    if args.deliberations:
        decisions = io.load_deliberations(_existing(args.deliberations), catalog)
    try:
        cred = gt.apply_deliberations(draft, decisions)
    except gt.MissingDecision as exc:
        print(f"deliberation incomplete: {exc}", file=sys.stderr)
        print(f"worklist written to {out_dir / 'worklist.csv'}", file=sys.stderr)
        return EXIT_MISSING_DECISION
    except gt.ScoreOutOfRange as exc:
        raise CliError(str(exc))
    io.atomic_write_text(out_dir / "credibility.csv", io.dump_credibility(cred))
    print(f"credibility map written to {out_dir / 'credibility.csv'}")
    return EXIT_OK


def cmd_qc(args: argparse.Namespace) -> int:
    catalog = io.load_catalog(_existing(args.catalog))
    if args.qc_action == "flag":
        nets = io.load_networks(_existing(args.networks), catalog)
        cred = io.load_credibility(_existing(args.credibility), catalog)
        try:
            records = qc.flag_networks(nets, cred, threshold=args.threshold)
        except illusion.MissingCredibility as exc:
            raise CliError(str(exc), EXIT_MISSING_CREDIBILITY)
        io.atomic_write_text(Path(args.queue), io.dump_review_records(records))
        flagged = sum(1 for r in records if r.auto_flagged)
        print(f"{len(records)} networks reviewed, {flagged} flagged")
        return EXIT_OK
    records = io.load_review_records(_existing(args.queue), catalog)
    queue = qc.ReviewQueue(records)
    if args.qc_action == "list":
        for record in queue.records():
            print(
                f"{record.worker_id}\t{record.decision.value}"
                f"\tzero_cs={record.zero_cs_count}"
                f"\tflagged={record.auto_flagged}\t{record.reviewer_note}"
            )
        return EXIT_OK
    decision = (
        qc.Decision.ACCEPT if args.qc_action == "accept" else qc.Decision.REJECT
    )
    try:
        queue.decide(args.worker, decision, args.note)
    except qc.AlreadyDecided as exc:
        raise CliError(str(exc))
    except KeyError:
        raise CliError(f"no review record for worker {args.worker!r}")
    io.atomic_write_text(Path(args.queue), io.dump_review_records(queue.records()))
    print(f"{args.worker}: {decision.value}")
    return EXIT_OK


def _anc_histogram(nets, cred) -> dict[str, int]:
    """ANC distribution in six half-open bins of width 0.5 over [0, 3]."""
    bins = {f"[{i / 2:.1f},{(i + 1) / 2:.1f})": 0 for i in range(6)}
    bins["[3.0]"] = 0
    for net in nets:
        value = metrics.anc(net, cred)
        if value == 3:
            bins["[3.0]"] += 1
        else:
            index = int(value * 2)
            bins[f"[{index / 2:.1f},{(index + 1) / 2:.1f})"] += 1
    return bins


def cmd_analyze(args: argparse.Namespace) -> int:
    _apply_config_file(args)
    catalog = io.load_catalog(_existing(args.catalog))
    cred = io.load_credibility(_existing(args.credibility), catalog)
    nets = io.load_networks(_existing(args.networks), catalog)
    accepted = [n for n in nets if n.status is io.NetworkStatus.ACCEPTED]
    if not accepted:
        raise CliError("no accepted networks in input", EXIT_EMPTY_ACCEPTED)
    agg = metrics.aggregate(accepted)
    try:
        d = illusion.build_discrepancy(agg, cred, threshold=args.threshold)
    except illusion.MissingCredibility as exc:
        raise CliError(str(exc), EXIT_MISSING_CREDIBILITY)
    r, p = metrics.pearson_votes_vs_credibility(agg, cred)
    exploration = metrics.exploration_stats(accepted, catalog)

    confidence_histogram = {str(level): 0 for level in range(1, 6)}
    for net in accepted:
        if net.confidence is not None:
            confidence_histogram[str(net.confidence)] += 1
    stats = {
        "contributing_networks": agg.contributing_networks,
        "anc_histogram": _anc_histogram(accepted, cred),
        "confidence_histogram": confidence_histogram,
        "pearson": {"r": r, "p": p},
        "exploration": [
            {
                "attribute": attr.display,
                "appearance_count": exploration.appearance_count[attr],
                "worker_count": exploration.worker_count[attr],
            }
            for attr in catalog
        ],
    }

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    io.atomic_write_text(out_dir / "adjacency.csv", io.dump_adjacency_csv(agg, catalog))
    io.atomic_write_text(
        out_dir / "stats.json", json.dumps(stats, indent=2, sort_keys=True) + "\n"
    )
    io.atomic_write_text(
        out_dir / "discrepancy_histogram.csv",
        io.dump_histogram_csv(illusion.discrepancy_histogram(d)),
    )
    for mode in illusion.LinkClass:
        io.atomic_write_text(
            out_dir / f"discrepancy_{mode.value}.dot",
            illusion.export_discrepancy_dot(d, mode),
        )
    io.atomic_write_text(
        out_dir / "discrepancy_all.dot", illusion.export_discrepancy_dot(d, None)
    )
    print(f"pearson r={r:.6f} p={p:.3e}")
    print(f"reports written to {out_dir}")
    return EXIT_OK


def _path_payload(path: pathlab.PathSupport) -> dict:
    return {
        "nodes": list(path.displays()),
        "link_votes": list(path.link_votes),
        "hops": path.hops,
        "weakest": path.weakest,
        "average": io.fraction_repr(path.average),
    }


def cmd_illusion(args: argparse.Namespace) -> int:
    _apply_config_file(args)
    catalog = io.load_catalog(_existing(args.catalog))
    nets = io.load_networks(_existing(args.networks), catalog)
    accepted = [n for n in nets if n.status is io.NetworkStatus.ACCEPTED]
    if not accepted:
        raise CliError("no accepted networks in input", EXIT_EMPTY_ACCEPTED)
    agg = metrics.aggregate(accepted)
    try:
        query = io.load_query(_existing(args.query), catalog)
    except KeyError as exc:
        raise CliError(f"unknown attribute in query: {exc}", EXIT_CATALOG_MISS)

    report: dict = {"bogus_votes": pathlab.bogus_votes(agg, query), "criteria": {}}
    paths = pathlab.enumerate_paths(
        agg, [query.true_cause], query.outcomes, query.max_hops
    )
    report["paths"] = [_path_payload(p) for p in paths]
    for criterion in pathlab.SupportCriterion:
        try:
            result = pathlab.illusion_ratio(agg, query, criterion)
        except pathlab.NoTruePath as exc:
            print(f"warning: {exc}", file=sys.stderr)
            report["criteria"][criterion.value] = None
            continue
        report["criteria"][criterion.value] = {
            "ratio": io.fraction_repr(result.ratio),
            "best_path": _path_payload(result.best_path),
            "best_per_hop": {
                str(hops): _path_payload(path)
                for hops, path in sorted(result.best_per_hop.items())
            },
        }
    bogus_matrix, true_matrix = pathlab.build_trial_matrices(agg, query)
    report["trial_matrices"] = {
        "bogus": {
            "cause": bogus_matrix.cause_label,
            "outcome": bogus_matrix.outcome_label,
            "upper_left": float(bogus_matrix.o_given_c),
        },
        "true": {
            "cause": true_matrix.cause_label,
            "outcome": true_matrix.outcome_label,
            "upper_left": float(true_matrix.o_given_c),
        },
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        io.atomic_write_text(out_dir / "illusion_report.json", text)
        print(f"report written to {out_dir / 'illusion_report.json'}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import os

    from .collection.app import main as serve_main

    if args.profile:
        os.environ["PROFILE"] = args.profile
    if args.catalog:
        os.environ["CATALOG_PATH"] = args.catalog
    serve_main()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalcrowd",
        description="Analyze crowd causal networks against expert ground truth",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gt = sub.add_parser("groundtruth", help="merge expert networks into a credibility map")
    p_gt.add_argument("--catalog", required=True)
    p_gt.add_argument("--experts", nargs="+", default=[])
    p_gt.add_argument("--deliberations")
    p_gt.add_argument("--out", required=True)
    p_gt.add_argument("--config")
    p_gt.set_defaults(func=cmd_groundtruth)

    p_qc = sub.add_parser("qc", help="fraud flagging and manual review queue")
    qc_sub = p_qc.add_subparsers(dest="qc_action", required=True)
    p_flag = qc_sub.add_parser("flag")
    p_flag.add_argument("--catalog", required=True)
    p_flag.add_argument("--networks", required=True)
    p_flag.add_argument("--credibility", required=True)
    p_flag.add_argument("--queue", required=True)
    p_flag.add_argument("--threshold", type=int, default=3)
    p_list = qc_sub.add_parser("list")
    p_list.add_argument("--catalog", required=True)
    p_list.add_argument("--queue", required=True)
    for action in ("accept", "reject"):
        p_action = qc_sub.add_parser(action)
        p_action.add_argument("worker")
        p_action.add_argument("--catalog", required=True)
        p_action.add_argument("--queue", required=True)
        p_action.add_argument("--note", default="")
    p_qc.set_defaults(func=cmd_qc)

    p_an = sub.add_parser("analyze", help="aggregate, correlate, and export discrepancies")
    p_an.add_argument("--catalog", required=True)
    p_an.add_argument("--networks", required=True)
    p_an.add_argument("--credibility", required=True)
    p_an.add_argument("--threshold", type=int, default=4)
    p_an.add_argument("--out", required=True)
    p_an.add_argument("--config")
    p_an.set_defaults(func=cmd_analyze)

    p_il = sub.add_parser("illusion", help="path supports and bogus-vs-true ratios")
    p_il.add_argument("--catalog", required=True)
    p_il.add_argument("--networks", required=True)
    p_il.add_argument("--query", required=True)
    p_il.add_argument("--out")
    p_il.add_argument("--config")
    p_il.set_defaults(func=cmd_illusion)

    p_serve = sub.add_parser("serve", help="run the collection HTTP service")
    p_serve.add_argument("--profile", choices=["final", "formative"])
    p_serve.add_argument("--catalog")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
