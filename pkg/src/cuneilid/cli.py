"""Command line interface: ``cuneilid {convert,split,train,identify,evaluate,tune}``.

Exit status is 0 on success, 1 on data errors and 2 on usage errors.
"""

import argparse
import io
import json
import logging
import sys
from pathlib import Path

from . import __version__
from ._io import atomic_write_text
from .classify import METHODS, MethodConfig, default_ensemble, predict
from .corpus import (
    SAMPLER_ALGORITHM,
    balance_sample,
    dedup,
    filter_min_length,
    load_labeled,
    normalize_line,
    save_labeled,
    split_in_domain,
    split_out_of_domain,
)
from .errors import CuneiLIDError, UnknownReading
from .evaluation import GridSpec, evaluate, grid_scores, grid_search, select_best
from .models import MAX_ORDER, NGramRange, load_models, save_models, train
from .signmap import load_sign_list, transliterate

class UsageError(Exception):
    pass


def _range(text):
    try:
        return NGramRange.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _balance(text):
    if text == "auto":
        return text
    return _positive_int(text)


def _penalties(text):
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("penalties must be positive")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuneilid", description="Language identification for cuneiform text lines."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="ATF transliteration lines (stdin) to cuneiform (stdout)")
    p.add_argument("--signs", required=True, type=Path, help="sign list: <reading>TAB<signs>")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=None,
                      help="fail on unknown readings (default for plain lines)")
    mode.add_argument("--lenient", dest="strict", action="store_false",
                      help="drop unknown readings and report counts (default with --tsv)")
    p.add_argument("--tsv", action="store_true",
                   help="input is <atf>TAB<label>; output keeps the label column")

    p = sub.add_parser("split", help="split a labeled corpus into train/dev/test TSVs")
    p.add_argument("--in", dest="input", required=True, type=Path)
    p.add_argument("--mode", required=True, choices=("in-domain", "out-of-domain"))
    p.add_argument("--out", required=True, help="output stem; writes <stem>.{train,dev,test}.tsv")
    p.add_argument("--dedup", action="store_true", help="remove duplicate lines from dev and test")
    p.add_argument("--min-len", type=_positive_int, default=None,
                   help="drop dev/test lines shorter than this many signs")
    p.add_argument("--balance", type=_balance, default=None,
                   help="sample N dev and test lines per label; 'auto' uses the smallest class")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="train n-gram models")
    p.add_argument("--in", dest="input", required=True, type=Path)
    p.add_argument("--range", required=True, type=_range, help="L-H or L-H+lines")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--min-count", type=_positive_int, default=1)

    def add_method_args(p):
        p.add_argument("--method", choices=METHODS, default=None)
        p.add_argument("--penalty", type=float, default=None)
        p.add_argument("--range", type=_range, default=None,
                       help="scoring range; must lie within the model range")
        p.add_argument("--config", type=Path, default=None,
                       help="JSON config or tune report to take the method settings from")

    p = sub.add_parser("identify", help="label lines read from stdin")
    p.add_argument("--model", required=True, type=Path)
    add_method_args(p)

    p = sub.add_parser("evaluate", help="score a labeled test set")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--test", required=True, type=Path)
    add_method_args(p)
    p.add_argument("--report", type=Path, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("tune", help="grid-search n-gram range and penalty on a dev set")
    p.add_argument("--train", required=True, type=Path)
    p.add_argument("--dev", required=True, type=Path)
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--max-order", type=_positive_int, default=MAX_ORDER)
    p.add_argument("--penalties", type=_penalties, default=None,
                   help="comma-separated penalty candidates")
    p.add_argument("--min-count", type=_positive_int, default=1)
    p.add_argument("--report", type=Path, default=None)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _config_from_args(args, models) -> MethodConfig:
    if args.config is not None:
        doc = json.loads(args.config.read_text(encoding="utf-8"))
        doc = doc.get("config", doc)
        config = MethodConfig.from_dict(doc)
        if args.penalty is not None:
            config = config.with_penalty(args.penalty)
        return config
    if args.method is None:
        raise UsageError("--method or --config is required")
    if args.method == "ensemble":
        return default_ensemble()
    ngram_range = args.range or models.ngram_range
    return MethodConfig(args.method, ngram_range, args.penalty)


def cmd_convert(args, stdin, stdout, stderr):
    signs = load_sign_list(args.signs)
    strict = args.strict if args.strict is not None else not args.tsv
    dropped_total = 0
    for line_no, row in enumerate(stdin, start=1):
        row = row.rstrip("\n").rstrip("\r")
        label = None
        if args.tsv:
            row, _, label = row.rpartition("\t")
        try:
            out = transliterate(row, signs, strict=strict)
        except UnknownReading as exc:
            raise CuneiLIDError(f"line {line_no}: {exc}") from None
        if out.dropped:
            dropped_total += out.dropped
            print(f"line {line_no}: dropped {out.dropped} unknown reading(s)", file=stderr)
        stdout.write(out.text + (f"\t{label}" if args.tsv else "") + "\n")
    if dropped_total:
        print(f"total dropped readings: {dropped_total}", file=stderr)
    return 0


def cmd_split(args, stdin, stdout, stderr):
    corpus = load_labeled(args.input)
    splitter = split_in_domain if args.mode == "in-domain" else split_out_of_domain
    train_part, dev_part, test_part = splitter(corpus).apply(corpus)
    parts = {"train": train_part}
    balanced = {}
    for name, part in (("dev", dev_part), ("test", test_part)):
        if args.dedup:
            part = dedup(part)
        if args.min_len:
            part = filter_min_length(part, args.min_len)
        if args.balance is not None:
            per_label = args.balance
            if per_label == "auto":
                per_label = min(len(v) for v in part.indices_by_label().values())
            part = balance_sample(part, per_label, seed=args.seed)
            balanced[name] = per_label
        parts[name] = part
    for name, part in parts.items():
        save_labeled(part, f"{args.out}.{name}.tsv")
    meta = {
        "input": str(args.input),
        "mode": args.mode,
        "dedup": args.dedup,
        "min_len": args.min_len,
        "balance": balanced or None,
        "seed": args.seed,
        "sampler": SAMPLER_ALGORITHM,
        "sizes": {
            name: {g: len(v) for g, v in part.indices_by_label().items()}
            for name, part in parts.items()
        },
    }
    atomic_write_text(f"{args.out}.split.json", json.dumps(meta, indent=2, ensure_ascii=False) + "\n")
    for name, part in parts.items():
        print(f"{name}\t{len(part)}", file=stdout)
    return 0


def cmd_train(args, stdin, stdout, stderr):
    corpus = load_labeled(args.input)
    models = train(corpus, args.range, min_count=args.min_count)
    save_models(models, args.out)
    for g in models.labels:
        n = sum(1 for label in corpus.labels if label == g)
        print(f"{g}\t{n}", file=stdout)
    return 0


def cmd_identify(args, stdin, stdout, stderr):
    models = load_models(args.model)
    config = _config_from_args(args, models)
    lines = [normalize_line(row.rstrip("\n")) for row in stdin]
    for label in predict(lines, models, config):
        stdout.write(label + "\n")
    return 0


def cmd_evaluate(args, stdin, stdout, stderr):
    models = load_models(args.model)
    config = _config_from_args(args, models)
    data = load_labeled(args.test)
    report = evaluate(models, data, config, n_jobs=args.jobs)
    report.meta["test"] = str(args.test)
    stdout.write(report.format_table())
    if args.report:
        atomic_write_text(args.report, report.to_json())
    return 0


def cmd_tune(args, stdin, stdout, stderr):
    train_set = load_labeled(args.train)
    dev = load_labeled(args.dev)
    cells = []
    if args.method == "ensemble":
        best, report = grid_search(train_set, dev, "ensemble", min_count=args.min_count,
                                   n_jobs=args.jobs)
    else:
        grid = GridSpec.default(args.method, args.max_order, args.penalties)
        cells = grid_scores(train_set, dev, args.method, grid, min_count=args.min_count,
                            n_jobs=args.jobs)
        best = select_best(cells).config
        models = train(train_set, best.ngram_range, min_count=args.min_count)
        report = evaluate(models, dev, best, n_jobs=args.jobs)
    report.meta["grid"] = [{**c.config.to_dict(), "macro_f1": c.macro_f1} for c in cells]
    stdout.write(report.format_table())
    print(f"best: {json.dumps(best.to_dict())}", file=stdout)
    if args.report:
        atomic_write_text(args.report, report.to_json())
    return 0


COMMANDS = {
    "convert": cmd_convert,
    "split": cmd_split,
    "train": cmd_train,
    "identify": cmd_identify,
    "evaluate": cmd_evaluate,
    "tune": cmd_tune,
}


def _utf8(stream, binary_attr="buffer"):
    buf = getattr(stream, binary_attr, None)
    return io.TextIOWrapper(buf, encoding="utf-8", newline=None) if buf is not None else stream


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=stderr)
    own_stdout = stdout is None
    stdin = stdin if stdin is not None else _utf8(sys.stdin)
    if own_stdout:
        stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", newline="\n",
                                  write_through=True)
    try:
        return COMMANDS[args.command](args, stdin, stdout, stderr)
    except UsageError as exc:
        print(f"cuneilid {args.command}: error: {exc}", file=stderr)
        return 2
    except (CuneiLIDError, OSError, ValueError) as exc:
        print(f"cuneilid {args.command}: {exc}", file=stderr)
        return 1
    finally:
        if own_stdout:
            stdout.flush()
            stdout.detach()


if __name__ == "__main__":
    sys.exit(main())
