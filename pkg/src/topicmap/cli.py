"""Command-line interface: ``topicmap <subcommand>``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import __version__, community, corpus, lda, preprocess, report, topicnet
from .errors import DataError, InvariantError, PipelineError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out(args, name):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _labels(args, K):
    return report.load_annotations(args.labels, K) if args.labels else {}


def cmd_ingest(args):
    corp = corpus.ingest(args.input, args.format)
    if args.english_ratio is not None:
        corp = corpus.filter_english(corp, args.english_ratio)
    corpus.write_jsonl(corp, _out(args, "corpus.jsonl"))
    st = corpus.stats(corp)
    with open(_out(args, "corpus_stats.json"), "w", encoding="utf-8") as fh:
        json.dump(dataclasses.asdict(st), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"documents={st.doc_count} tokens={st.token_count} dropped={st.dropped_count}")


def cmd_preprocess(args):
    corp = corpus.ingest(args.corpus, "jsonl")
    cfg = preprocess.PreprocessConfig(min_token_length=args.min_token_length,
                                      keep_numerals=args.keep_numerals)
    enc = preprocess.preprocess_corpus(corp, cfg)
    preprocess.save_encoded(enc, _out(args, "encoded_corpus.json"))
    print(f"documents={enc.num_docs} tokens={enc.total_tokens} "
          f"vocabulary={enc.num_terms} dropped={enc.dropped_count}")


def cmd_train(args):
    enc = preprocess.load_encoded(args.encoded)
    state = None
    if args.resume:
        state, saved = lda.load_checkpoint(args.resume, enc)
        hp = dataclasses.replace(saved, iterations=args.iterations or saved.iterations)
    else:
        if args.topics is None:
            raise _UsageError("--topics is required unless --resume is given")
        hp = lda.Hyperparams(args.topics, alpha=args.alpha, beta=args.beta,
                             iterations=args.iterations or 1000, burn_in=args.burn_in,
                             seed=args.seed, estimate=args.estimate)

    def progress(s, ll):
        print(f"sweep {s}\tloglik/token {ll:.6f}", file=sys.stderr)

    model, state = lda.train(enc, hp, state=state, callback=progress,
                             report_every=args.report_every)
    lda.save_model(model, _out(args, "model.npz"))
    lda.save_checkpoint(state, hp, enc, _out(args, "checkpoint.npz"))
    print(f"trained K={hp.K} for {state.sweep_count} sweeps; "
          f"loglik/token {lda.log_likelihood(model, enc):.6f}")


def cmd_topics(args):
    model = lda.load_model(args.model)
    report.export_topic_table(model, _out(args, "topics.tsv"),
                              min(args.top_k, model.phi.shape[1]),
                              _labels(args, model.num_topics))


def cmd_histogram(args):
    model = lda.load_model(args.model)
    report.export_histogram(lda.primary_topic_counts(model), _out(args, "histogram.tsv"),
                            _labels(args, model.num_topics))


def cmd_graph(args):
    model = lda.load_model(args.model)
    sim = topicnet.topic_similarity(model, args.mode)
    topicnet.write_similarity_tsv(sim, _out(args, "similarity.tsv"))
    graph = topicnet.build_graph(sim, args.threshold, _labels(args, model.num_topics))
    report.export_graph(graph, _out(args, f"graph.{args.format}"), format=args.format)
    print(f"mode={sim.mode.value} edges={len(graph.edges)}")


def cmd_communities(args):
    graph, _ = report.read_graph(args.graph)
    part = community.louvain(graph, community.ModularityParams(args.resolution), args.seed)
    community.write_partition(part, _out(args, "partition.json"))
    suffix = Path(args.graph).suffix.lstrip(".") or "gexf"
    report.export_graph(graph, _out(args, f"graph_communities.{suffix}"), part, suffix)
    print(f"communities={part.num_communities} modularity={part.modularity:.6f}")


def cmd_run(args):
    if not args.config:
        raise _UsageError("run needs --config")
    cfg = report.RunConfig.from_file(args.config) if Path(args.config).exists() else None
    if cfg is None:
        raise PipelineError("config", DataError(f"config file {args.config} not found"))
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    manifest = report.run_pipeline(cfg, args.out)
    print(f"wrote {len(manifest.outputs)} files to {args.out}")


class _UsageError(Exception):
    pass


def build_parser():
    p = _Parser(prog="topicmap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"topicmap {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    common.add_argument("--config", help="pipeline config file (INI)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", parents=[common], help="read raw documents")
    s.add_argument("input")
    s.add_argument("--format", choices=corpus.FORMATS, default="jsonl")
    s.add_argument("--english-ratio", type=float, default=None,
                   help="drop documents below this stopword-hit ratio (e.g. 0.2)")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("preprocess", parents=[common], help="normalize, stem and encode")
    s.add_argument("corpus", help="JSONL corpus")
    s.add_argument("--min-token-length", type=int, default=2)
    s.add_argument("--keep-numerals", action="store_true")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("train", parents=[common], help="fit LDA by collapsed Gibbs sampling")
    s.add_argument("encoded", help="encoded corpus JSON")
    s.add_argument("-k", "--topics", type=int)
    s.add_argument("--alpha", type=float, default=None, help="default 50/K")
    s.add_argument("--beta", type=float, default=0.01)
    s.add_argument("--iterations", type=int, default=None, help="total sweeps (default 1000)")
    s.add_argument("--burn-in", type=int, default=200)
    s.add_argument("--estimate", choices=("mean", "last"), default="mean")
    s.add_argument("--resume", help="checkpoint to continue from")
    s.add_argument("--report-every", type=int, default=50)
    s.set_defaults(func=cmd_train)

    for name, func, text in (("topics", cmd_topics, "top-word table"),
                             ("histogram", cmd_histogram, "primary-topic histogram")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("model")
        s.add_argument("--labels", help="topic annotation file (.tsv or .json)")
        if name == "topics":
            s.add_argument("--top-k", type=int, default=report.DEFAULT_TOP_K)
        s.set_defaults(func=func)

    s = sub.add_parser("graph", parents=[common], help="topic similarity graph")
    s.add_argument("model")
    s.add_argument("--mode", choices=[m.value for m in topicnet.SimilarityMode])
    s.add_argument("--threshold", type=float, default=topicnet.DEFAULT_THRESHOLD)
    s.add_argument("--format", choices=("gexf", "json"), default="gexf")
    s.add_argument("--labels")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("communities", parents=[common], help="Louvain communities")
    s.add_argument("graph", help="graph file (.gexf or .json)")
    s.add_argument("--resolution", type=float, default=1.0)
    s.set_defaults(func=cmd_communities)

    s = sub.add_parser("run", parents=[common], help="full pipeline from a config file")
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command != "run" and args.seed is None:
        args.seed = 0
    try:
        args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"topicmap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as exc:
        print(f"topicmap: {exc}", file=sys.stderr)
        return EXIT_INVARIANT if isinstance(exc.cause, InvariantError) else EXIT_DATA
    except InvariantError as exc:
        print(f"topicmap: internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except DataError as exc:
        print(f"topicmap: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
