"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import contextmanager
from typing import Dict, List, Optional

from . import __version__
from .evaluation import evaluate, render_report as render_eval
from .experiment import load_spec, render_report, run_experiment
from .features import FeatureError, load_templates, template_set
from .learner import LearnerConfig, LinearModel, ModelFormatError
from .parser import parse_corpus
from .supertag import SupertagPolicy, annotate_corpus, build_vocabulary, load_policy
from .tagger import TaggerConfig, TaggerModel, pos_corpus, supertag_corpus, tag_pos, tag_supertags, train_tagger
from .toycorpus import toy_treebank_path
from .treebank import TreebankError, read_conllx, write_conllx

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

logger = logging.getLogger("vnsupertag")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, encoding="utf-8", newline="") as f:
            yield f


@contextmanager
def _open_out(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            yield f


def _read(path: Optional[str], supertag_field: str = "gold"):
    if path is None:
        path = str(toy_treebank_path())
    with _open_in(path) as f:
        return read_conllx(f, supertag_field=supertag_field)


def _policy(args) -> SupertagPolicy:
    return load_policy(args.policy_file) if args.policy_file else SupertagPolicy()


def _templates(args, default: str):
    if args.templates_file:
        return load_templates(args.templates_file)
    return template_set(default)


def cmd_extract(args) -> int:
    corpus = annotate_corpus(_read(args.input), args.model, _policy(args))
    with _open_out(args.output) as out:
        write_conllx(corpus, out, "gold")
    return EXIT_OK


def cmd_vocab(args) -> int:
    vocab = build_vocabulary(_read(args.input), args.model, _policy(args))
    with _open_out(args.output) as out:
        vocab.write(out)
    return EXIT_OK


def _tagger_config(args) -> TaggerConfig:
    return TaggerConfig(
        epochs=args.epochs,
        seed=args.seed,
        window=args.window,
        max_affix_len=args.max_affix_len,
        use_pos_column=args.mode == "supertag" and not args.no_pos,
    )


def cmd_train_tagger(args) -> int:
    corpus = _read(args.input)
    config = _tagger_config(args)
    data = supertag_corpus(corpus) if args.mode == "supertag" else pos_corpus(corpus)
    model = train_tagger(data, config, mode=args.mode)
    model.save(args.model_out)
    logger.info("trained %s tagger with %d tags", args.mode, len(model.tags))
    return EXIT_OK


def cmd_tag(args) -> int:
    model = TaggerModel.load(args.model)
    corpus = _read(args.input)
    if model.model.meta.get("mode", "supertag") == "pos":
        tagged = tag_pos(model, corpus)
        field = "gold"
    else:
        tagged = tag_supertags(model, corpus)
        field = "pred"
    with _open_out(args.output) as out:
        write_conllx(tagged, out, field)
    return EXIT_OK


def cmd_train_parser(args) -> int:
    from .parser import train_parser

    templates = _templates(args, args.features)
    corpus = _read(args.input)
    if templates.uses_stag:
        missing = sum(t.gold_supertag is None for s in corpus for t in s)
        if missing:
            corpus = annotate_corpus(corpus, args.supertag_model, _policy(args))
    model = train_parser(corpus, templates, LearnerConfig(epochs=args.epochs, seed=args.seed))
    model.save(args.model_out)
    logger.info("skipped %s non-projective sentence(s)", model.meta["skipped_nonprojective"])
    return EXIT_OK


def cmd_parse(args) -> int:
    model = LinearModel.load(args.model)
    corpus = _read(args.input, supertag_field="gold")
    source = "gold"
    if args.stag_source == "pred":
        corpus = [s.map_tokens(pred_supertag=[t.gold_supertag for t in s], gold_supertag=[None] * len(s)) for s in corpus]
        source = "pred"
    templates = load_templates(args.templates_file) if args.templates_file else None
    parsed = parse_corpus(model, corpus, templates, stag_source=source)
    with _open_out(args.output) as out:
        write_conllx(parsed, out, source)
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = _read(args.gold)
    pred = _read(args.pred)
    report = evaluate(gold, pred, exclude_punct=args.exclude_punct, punct_label=args.punct_label)
    with _open_out(args.output) as out:
        out.write(render_eval(report, args.format))
    return EXIT_OK


def cmd_experiment(args) -> int:
    overrides: Dict[str, str] = {}
    for key in ("corpus", "k", "models", "conditions", "output", "parser_epochs", "tagger_epochs", "jobs"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = str(value)
    if args.seed_given:
        overrides["seed"] = str(args.seed)
    if args.exclude_punct:
        overrides["exclude_punct"] = "true"
    if args.auto_pos:
        overrides["auto_pos"] = "true"
    if args.policy_file:
        overrides["policy_file"] = args.policy_file
    if args.templates_file:
        overrides["templates_file"] = args.templates_file
    spec = load_spec(args.spec_file, overrides)
    report = run_experiment(spec)
    with _open_out(args.report) as out:
        out.write(render_report(report, args.format))
    return EXIT_OK


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags; SUPPRESS keeps them from resetting values given earlier
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--seed", type=int, help="random seed (default 1)", **({"default": None} | kw))
    flags.add_argument("--policy-file", help="supertag policy as 'key = value' lines", **kw)
    flags.add_argument("--templates-file", help="feature template file, one template per line", **kw)
    flags.add_argument("-v", "--verbose", action="store_true", **kw)
    return flags


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = _Parser(prog="vnsupertag", description=__doc__.splitlines()[0], parents=[_global_flags(suppress=False)])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    models = ("M0", "M1", "M2")

    p = add("extract", cmd_extract, "annotate a treebank with gold supertags (FEATS stag=...)")
    p.add_argument("input", nargs="?", help="CoNLL-X treebank (default: bundled toy treebank)")
    p.add_argument("-o", "--output")
    p.add_argument("-m", "--model", choices=models, default="M1")

    p = add("vocab", cmd_vocab, "print the supertag vocabulary with counts")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("-m", "--model", choices=models, default="M1")

    p = add("train-tagger", cmd_train_tagger, "train a supertagger or POS tagger")
    p.add_argument("input")
    p.add_argument("model_out")
    p.add_argument("--mode", choices=("supertag", "pos"), default="supertag")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--window", type=int, default=2)
    p.add_argument("--max-affix-len", type=int, default=3)
    p.add_argument("--no-pos", action="store_true", help="do not use the POS column as tagger input")

    p = add("tag", cmd_tag, "tag a CoNLL-X file with a trained tagger")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("-o", "--output")

    p = add("train-parser", cmd_train_parser, "train a transition classifier")
    p.add_argument("input")
    p.add_argument("model_out")
    p.add_argument("--features", choices=("baseline", "supertag"), default="supertag")
    p.add_argument("--supertag-model", choices=models, default="M1",
                   help="supertags to extract when the input carries none")
    p.add_argument("--epochs", type=int, default=10)

    p = add("parse", cmd_parse, "parse a CoNLL-X file")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--stag-source", choices=("gold", "pred"), default="pred",
                   help="provenance of the stag= annotations in the input")

    p = add("eval", cmd_eval, "UAS/LAS and per-relation report")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("-o", "--output")
    p.add_argument("--exclude-punct", action="store_true")
    p.add_argument("--punct-label", default="PUNCT")
    p.add_argument("--format", choices=("text", "tsv"), default="text")

    p = add("experiment", cmd_experiment, "k-fold cross-validation experiment")
    p.add_argument("--spec-file", help="experiment settings as 'key = value' lines; flags override")
    p.add_argument("--corpus")
    p.add_argument("-k", type=int)
    p.add_argument("--models", help="comma list from baseline,M0,M1,M2")
    p.add_argument("--conditions", help="comma list from gold,automatic")
    p.add_argument("--output", help="directory for intermediate artifacts and reports")
    p.add_argument("--parser-epochs", type=int)
    p.add_argument("--tagger-epochs", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--exclude-punct", action="store_true")
    p.add_argument("--auto-pos", action="store_true", help="also predict POS tags in the automatic condition")
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--report", help="write the report here instead of stdout")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 1
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); not an error
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (TreebankError, ModelFormatError, FeatureError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        print(f"vnsupertag: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error")
        print(f"vnsupertag: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
