"""Command line entry points: index, replay, serve.

The QIR_INDEX environment variable, when set, overrides the --index
flag everywhere an index is read, so deployments can pin one index
without touching scripts.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import session as session_mod
from .errors import QirError, UnanchorableQueryError, UnknownDocumentError

INDEX_ENV_VAR = "QIR_INDEX"
COMPARE_TOP_N = 10


def _session_config_from_args(args: argparse.Namespace) -> session_mod.SessionConfig:
    return session_mod.SessionConfig(
        alpha_click=args.alpha_click,
        alpha_judgment=args.alpha_judgment,
        query_mode=args.query_mode,
        prf_k=args.prf_k,
        drift_threshold=args.tau,
    )


def _add_session_flags(parser: argparse.ArgumentParser) -> None:
    defaults = session_mod.DEFAULT_SESSION_CONFIG
    parser.add_argument("--alpha-click", type=float, default=defaults.alpha_click)
    parser.add_argument("--alpha-judgment", type=float, default=defaults.alpha_judgment)
    parser.add_argument("--tau", type=float, default=defaults.drift_threshold,
                        help="drift threshold on query probability")
    parser.add_argument("--query-mode", choices=session_mod.QUERY_MODES,
                        default=defaults.query_mode)
    parser.add_argument("--prf-k", type=int, default=defaults.prf_k)


def _resolve_index_path(args: argparse.Namespace) -> str:
    env = os.environ.get(INDEX_ENV_VAR)
    if env:
        return env
    if args.index is None:
        raise SystemExit(f"an index is required: pass --index or set {INDEX_ENV_VAR}")
    return args.index


def cli_index(args: argparse.Namespace) -> int:
    try:
        raw = corpus_mod.read_jsonl(args.input)
        config = corpus_mod.IngestConfig(min_df=args.min_df)
        corpus = corpus_mod.ingest(raw, config)
        corpus_mod.save_index(corpus, args.output)
    except (QirError, OSError) as exc:
        print(f"index failed: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(corpus.report.to_dict(), sort_keys=True))
    return 0


def _ranking_payload(state, corpus, n: int) -> list[list]:
    return [[doc_id, p] for doc_id, p in session_mod.rank(state, corpus, n)]


def _strip_event_alpha(event):
    if isinstance(event, (session_mod.Click, session_mod.Judgment)):
        return dataclasses.replace(event, alpha=None)
    return event


def _compare_trajectories(corpus, events, base_config) -> dict:
    """Replay under no-update, configured, and hard feedback weights.

    Per-event alpha overrides are stripped so each variant's weights
    actually apply. Queries always condition hard; only clicks and
    judgments vary.
    """
    stripped = [_strip_event_alpha(e) for e in events]
    variants = []
    for name, a_click, a_judg in (
        ("alpha=0", 0.0, 0.0),
        ("configured", base_config.alpha_click, base_config.alpha_judgment),
        ("alpha=1", 1.0, 1.0),
    ):
        config = dataclasses.replace(
            base_config, alpha_click=a_click, alpha_judgment=a_judg
        )
        state = session_mod.new_session(corpus, config, session_id="compare")
        trajectory = [{"t": -1, "ranking": _ranking_payload(state, corpus, COMPARE_TOP_N)}]
        for t, event in enumerate(stripped):
            state, _ = session_mod.handle_event(state, event, corpus)
            trajectory.append(
                {"t": t, "ranking": _ranking_payload(state, corpus, COMPARE_TOP_N)}
            )
        variants.append(
            {
                "name": name,
                "alpha_click": a_click,
                "alpha_judgment": a_judg,
                "trajectory": trajectory,
            }
        )
    return {"variants": variants}


def cli_replay(args: argparse.Namespace) -> int:
    index_path = _resolve_index_path(args)
    try:
        corpus = corpus_mod.load_index(index_path)
        with open(args.input, "r", encoding="utf-8") as fh:
            log = session_mod.read_log(fh)
    except (QirError, OSError) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 1

    config = _session_config_from_args(args)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    state = session_mod.new_session(corpus, config, session_id="replay")
    lines = []
    for t, event in log:
        try:
            state, diag = session_mod.handle_event(state, event, corpus)
        except (UnknownDocumentError, UnanchorableQueryError, QirError) as exc:
            print(f"replay failed at event t={t} "
                  f"({session_mod.event_to_dict(event)}): {exc}", file=sys.stderr)
            return 1
        lines.append(session_mod.format_log_line(t, event, diag))

    (out_dir / "session.jsonl").write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8"
    )
    ranking = {"ranking": _ranking_payload(state, corpus, args.top_n)}
    (out_dir / "ranking.json").write_text(
        json.dumps(ranking, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )

    if args.compare:
        events = [event for _, event in log]
        compare = _compare_trajectories(corpus, events, config)
        (out_dir / "compare.json").write_text(
            json.dumps(compare, sort_keys=True, separators=(",", ":")) + "\n",
            encoding="utf-8",
        )
    return 0


def cli_serve(args: argparse.Namespace) -> int:
    from . import service as service_mod

    index_path = _resolve_index_path(args)
    try:
        corpus = corpus_mod.load_index(index_path)
    except (QirError, OSError) as exc:
        print(f"serve failed: {exc}", file=sys.stderr)
        return 1

    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"--listen must be host:port, got {args.listen!r}", file=sys.stderr)
        return 1

    config = service_mod.ServiceConfig(
        host=host,
        port=int(port_text),
        index_path=index_path,
        session_defaults=_session_config_from_args(args),
        max_dense_dim=args.max_dense_dim,
        journal_dir=args.journal_dir,
        static_dir=args.static,
    )
    app = service_mod.create_app(corpus, config)

    import uvicorn

    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qir",
        description="Interactive retrieval with a density-operator user model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="ingest a JSONL corpus into an index file")
    p_index.add_argument("--input", required=True, help="corpus JSONL path")
    p_index.add_argument("--output", required=True, help="index file to write")
    p_index.add_argument("--min-df", type=int, default=1,
                         help="minimum document frequency for vocabulary terms")
    p_index.set_defaults(func=cli_index)

    p_replay = sub.add_parser("replay", help="replay a session log against an index")
    p_replay.add_argument("--index", default=None, help="index file path")
    p_replay.add_argument("--input", required=True, help="session log JSONL path")
    p_replay.add_argument("--output", required=True,
                          help="directory for session.jsonl, ranking.json, compare.json")
    p_replay.add_argument("--top-n", type=int, default=10,
                          help="size of the final ranking")
    p_replay.add_argument("--compare", action="store_true",
                          help="also emit rank trajectories for alpha in {0, configured, 1}")
    _add_session_flags(p_replay)
    p_replay.set_defaults(func=cli_replay)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--index", default=None, help="index file path")
    p_serve.add_argument("--listen", default="127.0.0.1:8000", help="host:port")
    p_serve.add_argument("--max-dense-dim", type=int, default=64,
                         help="largest dimension the state endpoint densifies")
    p_serve.add_argument("--journal-dir", default=None,
                         help="directory for per-session JSONL journals")
    p_serve.add_argument("--static", default=None,
                         help="directory of static UI files to serve at /")
    _add_session_flags(p_serve)
    p_serve.set_defaults(func=cli_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
