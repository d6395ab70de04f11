"""Command-line interface.

Every command is a thin client of the HTTP service: requests go either to a
remote server (``--server http://host:port``) or, by default, to an
in-process instance of the same application, so the CLI and the service
exercise one code path.  ``serve`` starts the service under uvicorn.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from pathlib import Path

import httpx

from . import __version__
from .datasets import load_csv, load_features_csv, load_label_column, load_partially_labeled_csv
from .errors import OtsemiError
from .reporting import write_document


class CliError(Exception):
    """Raised for failures that should end the process with exit code 1."""


def _parse_epsilon(text: str) -> float | None:
    if text.lower() == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"epsilon must be 'auto' or a number, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def _parse_zetas(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse zeta list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("zeta list is empty")
    return values


@contextlib.contextmanager
def _client(server: str | None):
    """HTTP client against a remote server or an in-process service instance."""
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            yield client
    else:
        from starlette.testclient import TestClient

        from .service import create_app

        with TestClient(create_app(), raise_server_exceptions=False) as client:
            yield client


def _checked(response: httpx.Response) -> dict:
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise CliError(f"service returned {response.status_code}: {detail}")
    return response.json()


def _cmd_run(args: argparse.Namespace) -> int:
    dataset = load_csv(args.data, args.label_col)
    payload = {
        "dataset": {
            "name": dataset.name,
            "features": dataset.features.tolist(),
            "labels": [dataset.class_names[k] for k in dataset.labels],
        },
        "zetas": args.zeta,
        "repetitions": args.reps,
        "config": {
            "transduction_epsilon": args.epsilon,
            "induction_epsilon": args.epsilon,
            "certainty_threshold": args.alpha,
            "max_rounds": args.max_rounds,
            "standardize": args.standardize,
            "master_seed": args.seed,
        },
    }
    with _client(args.server) as client:
        document = _checked(client.post("/experiments/run", json=payload))
    json_path, csv_path = write_document(document, args.out)
    for report in document["reports"]:
        agg = report["aggregates"]
        print(
            f"{report['dataset']} zeta={report['zeta']}: "
            f"inductive ARI={agg['inductive']['ari']['mean']:.4f} "
            f"NMI={agg['inductive']['nmi']['mean']:.4f} | "
            f"transductive ARI={agg['transductive']['ari']['mean']:.4f} "
            f"NMI={agg['transductive']['nmi']['mean']:.4f}"
            + ("" if report["complete"] else "  [INCOMPLETE]")
        )
    print(f"wrote {json_path} and {csv_path}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    features, labels, class_names = load_partially_labeled_csv(args.train, args.label_col)
    new_features = load_features_csv(args.new)
    fit_payload = {
        "features": features.tolist(),
        "labels": [class_names[k] if k >= 0 else None for k in labels],
        "config": {
            "epsilon": args.epsilon,
            "certainty_threshold": args.alpha,
            "max_rounds": args.max_rounds,
        },
    }
    with _client(args.server) as client:
        fitted = _checked(client.post("/models", json=fit_payload))
        model_id = fitted["model_id"]
        try:
            predicted = _checked(
                client.post(f"/models/{model_id}/predict", json={"features": new_features.tolist()})
            )
        finally:
            if not args.keep_model:
                client.delete(f"/models/{model_id}")
    labels_out = predicted["labels"]
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["label"])
            writer.writerows([[label] for label in labels_out])
        print(f"wrote {len(labels_out)} predictions to {out_path}")
    else:
        for label in labels_out:
            print(label)
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    y_true = load_label_column(args.true)
    y_pred = load_label_column(args.pred)
    with _client(args.server) as client:
        scores = _checked(
            client.post("/metrics/score", json={"labels_true": y_true, "labels_pred": y_pred})
        )
    print(f"ari={scores['ari']!r}")
    print(f"nmi={scores['nmi']!r}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otsemi",
        description="Semi-supervised classification through optimal transport",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server(p: argparse.ArgumentParser) -> None:
        p.add_argument("--server", default=None, metavar="URL",
                       help="send requests to a running service instead of in-process")

    run = sub.add_parser("run", help="run the benchmark protocol on a labeled CSV dataset")
    run.add_argument("--data", required=True, help="CSV file with header and a label column")
    run.add_argument("--label-col", required=True, help="name of the label column")
    run.add_argument("--zeta", type=_parse_zetas, default=[0.05, 0.15, 0.25],
                     metavar="LIST", help="comma-separated labeled fractions (default 0.05,0.15,0.25)")
    run.add_argument("--reps", type=int, default=10, help="repetitions per zeta (default 10)")
    run.add_argument("--epsilon", type=_parse_epsilon, default=None, metavar="REAL|auto",
                     help="regularization strength; 'auto' picks 0.05*mean(cost) per solve")
    run.add_argument("--alpha", type=float, default=0.8,
                     help="certainty threshold for absorption rounds (default 0.8)")
    run.add_argument("--max-rounds", type=int, default=1,
                     help="propagation rounds; 1 = single voting round (default)")
    run.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    run.add_argument("--standardize", action="store_true",
                     help="z-score features before the protocol (default off)")
    run.add_argument("--out", required=True, metavar="BASE",
                     help="output base path; writes BASE.json and BASE.csv")
    add_server(run)
    run.set_defaults(func=_cmd_run)

    predict = sub.add_parser("predict", help="train on one file, label the points of a second file")
    predict.add_argument("--train", required=True,
                         help="training CSV; empty label cells mark unlabeled rows")
    predict.add_argument("--label-col", required=True, help="name of the label column")
    predict.add_argument("--new", required=True, help="CSV of feature rows to label (no label column)")
    predict.add_argument("--out", default=None, help="output CSV path (default: print to stdout)")
    predict.add_argument("--epsilon", type=_parse_epsilon, default=None, metavar="REAL|auto")
    predict.add_argument("--alpha", type=float, default=0.8)
    predict.add_argument("--max-rounds", type=int, default=1)
    predict.add_argument("--keep-model", action="store_true",
                         help="keep the fitted model registered on the server")
    add_server(predict)
    predict.set_defaults(func=_cmd_predict)

    metrics = sub.add_parser("metrics", help="score two single-column label files with ARI/NMI")
    metrics.add_argument("--true", required=True, help="single-column CSV of reference labels")
    metrics.add_argument("--pred", required=True, help="single-column CSV of predicted labels")
    add_server(metrics)
    metrics.set_defaults(func=_cmd_metrics)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, OtsemiError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
