"""Command line interface: train, calibrate, index, evaluate, serve, chat.

A bundle directory is the unit of deployment; see README for the layout.
Corpus flags default to the packaged desk-scale fixtures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .. import chatfallback, corpus, retrieve, textmodel
from ..dialog import SessionStore
from ..ground import PointEvent, Side, UnknownRegionError
from . import bundle as bundle_mod

ENV_BUNDLE = "WELLBOT_BUNDLE"
ENV_HOST = "WELLBOT_HOST"
ENV_PORT = "WELLBOT_PORT"
ENV_LOG = "WELLBOT_LOG"


def _emit(document: dict) -> None:
    print(json.dumps(document, sort_keys=True, indent=2))


def _config_from_args(args: argparse.Namespace) -> bundle_mod.BundleConfig:
    config = bundle_mod.BundleConfig()
    overrides = {}
    if args.config:
        overrides.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    for name in ("threshold", "top_k", "seed", "learning_rate", "epochs", "l2", "min_df"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return bundle_mod.BundleConfig(**{**config.__dict__, **overrides})


def cmd_train(args: argparse.Namespace) -> int:
    report = bundle_mod.train_bundle(
        args.out,
        medical_path=args.medical,
        social_path=args.social,
        news_path=args.news,
        lm_text_path=args.lm_text,
        config=_config_from_args(args),
    )
    _emit(report)
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    _emit(bundle_mod.calibrate_bundle(args.bundle))
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    _emit({"bank_sizes": bundle_mod.index_bundle(args.bundle)})
    return 0


def cmd_eval_classifier(args: argparse.Namespace) -> int:
    out = Path(args.bundle)
    if args.which == "mode":
        featurizer, classifier, _ = textmodel.load_model(out / bundle_mod.MODE_MODEL)
        med = bundle_mod._load_split(out, "medical")[_split_index(args.split)]
        news = bundle_mod._load_split(out, "news")[_split_index(args.split)]
        texts, labels = bundle_mod.mode_dataset(med, news)
        dataset = list(zip(texts, labels))
    else:
        model_file = (
            bundle_mod.MEDICAL_MODEL if args.which == "medical" else bundle_mod.SOCIAL_MODEL
        )
        featurizer, classifier, _ = textmodel.load_model(out / model_file)
        part = bundle_mod._load_split(out, args.which)[_split_index(args.split)]
        dataset = [(entry.question, entry.topic) for entry in part.entries]
    _emit(
        {
            "which": args.which,
            "split": args.split,
            "size": len(dataset),
            "accuracy": textmodel.evaluate_accuracy(classifier, featurizer, dataset),
        }
    )
    return 0


def _split_index(name: str) -> int:
    return {"train": 0, "valid": 1, "test": 2}[name]


def cmd_eval_retriever(args: argparse.Namespace) -> int:
    out = Path(args.bundle)
    bank_file = bundle_mod.MEDICAL_BANK if args.which == "medical" else bundle_mod.SOCIAL_BANK
    index = retrieve.build_index(corpus.load_bank(out / bank_file))
    part = bundle_mod._load_split(out, args.which)[_split_index(args.split)]
    test = [(entry.question, entry.topic, entry.id) for entry in part.entries]
    metrics = retrieve.evaluate_retriever(index, test, k=args.k)
    _emit(
        {
            "which": args.which,
            "split": args.split,
            "k": args.k,
            "precision": metrics.precision,
            "recall": metrics.recall,
            "f1": metrics.f1,
            "accuracy": metrics.accuracy,
        }
    )
    return 0


def cmd_eval_lm(args: argparse.Namespace) -> int:
    model = chatfallback.load_ngram(Path(args.bundle) / bundle_mod.LM_MODEL)
    text_path = Path(args.text) if args.text else bundle_mod.default_data_path("dialogue_lm.txt")
    lines = [line for line in text_path.read_text(encoding="utf-8").splitlines() if line.strip()]
    result = chatfallback.evaluate_lm(model, lines)
    _emit({"nll": result.nll, "ppl": result.ppl, "texts": len(lines)})
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from . import app as app_mod

    engine = bundle_mod.load_engine(args.bundle, log_path=args.log)
    app_mod.serve(engine, host=args.host, port=args.port, static_dir=args.static)
    return 0


def cmd_chat(args: argparse.Namespace) -> int:
    engine = bundle_mod.load_engine(args.bundle, log_path=args.log)
    return chat_loop(engine, sys.stdin, sys.stdout)


def chat_loop(engine, stdin, stdout) -> int:
    """REPL over the same engine the service uses.

    ``/point <region_id> [front|back]`` simulates an avatar click and
    ``/quit`` exits cleanly.
    """
    store = SessionStore()
    session = store.create()
    print("wellbot ready. /point <region_id> [front|back] simulates a click; /quit exits.", file=stdout)
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        if line == "/quit":
            print("bye.", file=stdout)
            return 0
        try:
            if line.startswith("/point"):
                parts = line.split()
                if len(parts) < 2:
                    print("usage: /point <region_id> [front|back]", file=stdout)
                    continue
                region_id = parts[1]
                if len(parts) > 2:
                    side = Side(parts[2])
                else:
                    region = engine.lexicon.by_id.get(region_id)
                    side = Side.FRONT if region is None or region.front_visible else Side.BACK
                response = engine.handle_point(session, PointEvent(region_id, side))
            elif session.state.value == "awaiting_confirmation" and line.lower() in (
                "yes",
                "no",
                "y",
                "n",
            ):
                response = engine.handle_confirmation(session, line.lower() in ("yes", "y"))
            else:
                response = engine.handle_utterance(session, line)
        except UnknownRegionError as exc:
            print(f"error: unknown region {exc}", file=stdout)
            continue
        except Exception as exc:
            print(f"error: {exc}", file=stdout)
            continue
        print(f"[{response.mode_used.value}] {response.text}", file=stdout)
        if response.highlights:
            shown = ", ".join(sorted(response.highlights))
            print(f"(highlighting: {shown}; view: {response.side_hint.value})", file=stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wellbot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train mode, topic, and chat models into a bundle")
    train.add_argument("--out", required=True, help="bundle directory to create")
    train.add_argument("--medical", help="medical corpus JSONL (default: packaged fixture)")
    train.add_argument("--social", help="social corpus JSONL (default: packaged fixture)")
    train.add_argument("--news", help="news corpus JSONL (default: packaged fixture)")
    train.add_argument("--lm-text", help="dialogue text for the chat LM (default: packaged)")
    train.add_argument("--config", help="JSON config file overriding bundle defaults")
    train.add_argument("--threshold", type=float)
    train.add_argument("--top-k", dest="top_k", type=int)
    train.add_argument("--seed", type=int)
    train.add_argument("--learning-rate", dest="learning_rate", type=float)
    train.add_argument("--epochs", type=int)
    train.add_argument("--l2", type=float)
    train.add_argument("--min-df", dest="min_df", type=int)
    train.set_defaults(func=cmd_train)

    calibrate_p = sub.add_parser("calibrate", help="fit topic-classifier temperatures")
    calibrate_p.add_argument("--bundle", required=True)
    calibrate_p.set_defaults(func=cmd_calibrate)

    index_p = sub.add_parser("index", help="build and persist the sentence banks")
    index_p.add_argument("--bundle", required=True)
    index_p.set_defaults(func=cmd_index)

    eval_c = sub.add_parser("eval-classifier", help="accuracy of a trained classifier")
    eval_c.add_argument("--bundle", required=True)
    eval_c.add_argument("--which", choices=("mode", "medical", "social"), default="mode")
    eval_c.add_argument("--split", choices=("train", "valid", "test"), default="test")
    eval_c.set_defaults(func=cmd_eval_classifier)

    eval_r = sub.add_parser("eval-retriever", help="retrieval metrics on a split")
    eval_r.add_argument("--bundle", required=True)
    eval_r.add_argument("--which", choices=("medical", "social"), default="medical")
    eval_r.add_argument("--split", choices=("train", "valid", "test"), default="test")
    eval_r.add_argument("-k", type=int, default=3)
    eval_r.set_defaults(func=cmd_eval_retriever)

    eval_l = sub.add_parser("eval-lm", help="NLL and perplexity of the chat LM on a text file")
    eval_l.add_argument("--bundle", required=True)
    eval_l.add_argument("--text", help="one utterance per line (default: packaged dialogue)")
    eval_l.set_defaults(func=cmd_eval_lm)

    serve_p = sub.add_parser("serve", help="run the HTTP service")
    serve_p.add_argument("--bundle", default=os.environ.get(ENV_BUNDLE))
    serve_p.add_argument("--host", default=os.environ.get(ENV_HOST, "127.0.0.1"))
    serve_p.add_argument("--port", type=int, default=int(os.environ.get(ENV_PORT, "8000")))
    serve_p.add_argument("--log", default=os.environ.get(ENV_LOG))
    serve_p.add_argument("--static", help="directory of web client assets to serve at /")
    serve_p.set_defaults(func=cmd_serve)

    chat_p = sub.add_parser("chat", help="interactive terminal chat")
    chat_p.add_argument("--bundle", default=os.environ.get(ENV_BUNDLE))
    chat_p.add_argument("--log", default=os.environ.get(ENV_LOG))
    chat_p.set_defaults(func=cmd_chat)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "bundle", "unset") is None:
        parser.error(f"--bundle is required (or set {ENV_BUNDLE})")
    try:
        return args.func(args)
    except (corpus.CorpusFormatError, bundle_mod.BundleError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
