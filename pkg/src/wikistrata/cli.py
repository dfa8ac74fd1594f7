"""wikistrata command line.

Every subcommand works off a JSON config file (--config); stage caching
makes repeated invocations cheap. Exit codes: 0 success, 2 validation
error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import sys

from wikistrata import catgraph, corpus as corpus_mod, esa, pipeline, strata
from wikistrata.corpus import CorpusError
from wikistrata.pipeline import ConfigError, StageError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_STAGE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wikistrata")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", required=True, help="JSON config file")
        return p

    add("run", "run the full pipeline and print the evaluation summary")

    add("build-index", "build the ESA index artifacts")

    p = add("relate", "ESA relatedness of two terms")
    p.add_argument("term_a")
    p.add_argument("term_b")

    add("build-catvecs", "build category vectors and weighted edges")

    p = add("diagnose", "graph diagnostics")
    p.add_argument("what", choices=["cycles", "degrees", "walk"])
    p.add_argument("--seed", type=int, default=0, help="seed for walk mode")

    p = add("arborify", "extract the minimum spanning arborescence")
    p.add_argument("--root", type=int, default=None, help="override root category id")

    p = add("vectorize", "write stratified document vectors")
    p.add_argument("--strata", default=None,
                   help="preset (half|tenth|flat) or comma-separated lambdas")

    p = add("evaluate", "cross-validated classification report")
    p.add_argument("--mode", choices=["baseline", "stratified"], default="stratified")
    return parser


def _load_store_analyzer(cfg):
    if cfg["corpus"]["synthetic"]:
        store, _labels = corpus_mod.gen_synthetic_wiki(**cfg["corpus"]["synthetic"])
    else:
        store = corpus_mod.parse_corpus_file(cfg["corpus"]["path"])
    return store


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, CorpusError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE


def _dispatch(args) -> int:
    cfg = pipeline.load_config(args.config)

    if args.command == "run":
        result = pipeline.run_pipeline(cfg)
        for name, status in result.stages:
            print(f"[{status}] {name}")
        for mode in ("baseline", "stratified"):
            print(f"\n== {mode} ==")
            print(result.reports[mode].summary())
        return EXIT_OK

    if args.command == "build-index":
        result = pipeline.run_pipeline(cfg)
        print(result.artifacts["index.tsv"])
        return EXIT_OK

    if args.command == "relate":
        result = pipeline.run_pipeline(cfg)
        index = _index_from_result(cfg, result)
        analyzer = pipeline._make_analyzer(cfg)
        ids = []
        for raw in (args.term_a, args.term_b):
            terms = analyzer.analyze(raw)
            if len(terms) != 1 or terms[0] not in index.vocabulary:
                raise ValueError(f"term {raw!r} is not in the vocabulary")
            ids.append(index.vocabulary.term_to_id[terms[0]])
        print(f"{esa.relatedness(index, ids[0], ids[1]):.6f}")
        return EXIT_OK

    if args.command == "build-catvecs":
        result = pipeline.run_pipeline(cfg)
        print(result.artifacts["catvecs.esvs"])
        print(result.artifacts["weights.tsv"])
        return EXIT_OK

    if args.command == "diagnose":
        store = _load_store_analyzer(cfg)
        graph = catgraph.build_graph(store)
        if args.what == "cycles":
            print(catgraph.cycle_census(graph, "exact").to_tsv(), end="")
        elif args.what == "walk":
            report = catgraph.cycle_census(graph, "walk", seed=args.seed)
            print(f"# walks\t{report.n_walks}")
            print(f"# cycle_walks\t{report.n_cycle_walks}")
            print(f"# root_walks\t{report.n_root_walks}")
            print(f"# dead_end_walks\t{report.n_dead_end_walks}")
            print(report.to_tsv(), end="")
        else:
            print(catgraph.degree_stats(graph).to_tsv(), end="")
        return EXIT_OK

    if args.command == "arborify":
        if args.root is not None:
            cfg["arbor"]["root"] = args.root
        result = pipeline.run_pipeline(cfg)
        print(result.artifacts["arborescence.tsv"])
        return EXIT_OK

    if args.command == "vectorize":
        if args.strata:
            if args.strata in strata.PRESETS:
                cfg["strata"]["lambdas"] = list(strata.PRESETS[args.strata])
            else:
                cfg["strata"]["lambdas"] = [float(x) for x in args.strata.split(",")]
        result = pipeline.run_pipeline(cfg)
        print(result.artifacts["stratified.esvs"])
        return EXIT_OK

    if args.command == "evaluate":
        result = pipeline.run_pipeline(cfg)
        print(result.reports[args.mode].summary())
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


def _index_from_result(cfg, result):
    vocabulary = pipeline._vocab_from_tsv(
        open(result.artifacts["vocab.tsv"], encoding="utf-8").read(),
        cfg["vocab"]["min_df"],
    )
    freqs = pipeline._freqs_from_tsv(open(result.artifacts["index.tsv"], encoding="utf-8").read())
    return esa.index_from_freqs(freqs, vocabulary)


if __name__ == "__main__":
    sys.exit(main())
