"""Command-line interface.

Exit codes: 0 ok, 2 usage/parse, 3 schema resolution, 4 instance
construction, 5 I/O, 6 validation findings.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from dtforge.errors import (
    ConstructorConflict,
    IdentifierError,
    InstanceError,
    InvalidSchemaDocument,
    IoError,
    ResolutionError,
    SerializationError,
)
from dtforge.identifier import Registry
from dtforge.jsonld import build_document, write_document
from dtforge.manifest import ManifestSyntaxError, build_from_manifest, read_manifest
from dtforge.schema_model import FALLBACK_SCHEMA, SUGGESTION_QUESTIONS, TargetKind, parse_answers, suggest_schema
from dtforge.schema_store import DEFAULT_ENDPOINTS, SchemaStore, StoreConfig
from dtforge.validate import validate_document

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOLUTION = 3
EXIT_INSTANCE = 4
EXIT_IO = 5
EXIT_FINDINGS = 6


def _registry_option(text: str) -> tuple[Registry, str]:
    tag, sep, url = text.partition("=")
    try:
        registry = Registry(tag.strip().lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown registry tag {tag!r}") from None
    if not sep or not url:
        raise argparse.ArgumentTypeError("expected <tag>=<base-url>")
    return registry, url


def _answers_option(text: str) -> list[bool]:
    try:
        return parse_answers(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--offline", action="store_true", default=argparse.SUPPRESS,
                        help="never contact a registry (also DTFORGE_OFFLINE=1)")
    common.add_argument("--bundle-dir", type=Path, default=argparse.SUPPRESS,
                        help="directory of <suffix>.json schema documents")
    common.add_argument("--cache-dir", type=Path, default=argparse.SUPPRESS,
                        help="on-disk cache for remotely fetched schemata")
    common.add_argument("--registry", type=_registry_option, action="append", default=argparse.SUPPRESS,
                        metavar="TAG=URL", help="override a registry base URL (tags: epic, orkg)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="dtforge", parents=[common],
                                     description="Data-analysis schemata to JSON-LD.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("show-fields", parents=[common], help="list the fields of a schema and its sub-schemata")
    p.add_argument("url")
    p.set_defaults(func=cmd_show_fields)

    p = sub.add_parser("suggest", parents=[common], help="suggest a schema for an analysis method")
    p.add_argument("--answers", type=_answers_option, metavar="YNNNN",
                   help="five y/n answers; prompts interactively when omitted")
    p.set_defaults(func=cmd_suggest)

    p = sub.add_parser("build", parents=[common], help="build JSON-LD from a manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("validate", parents=[common], help="check an emitted JSON-LD document")
    p.add_argument("document", type=Path)
    p.set_defaults(func=cmd_validate)
    return parser


def _store(args: argparse.Namespace) -> SchemaStore:
    endpoints = dict(DEFAULT_ENDPOINTS)
    for registry, url in getattr(args, "registry", []):
        endpoints[registry] = url
    cfg = StoreConfig(
        bundle_dir=getattr(args, "bundle_dir", None),
        cache_dir=getattr(args, "cache_dir", None),
        offline=getattr(args, "offline", False),
        registry_endpoints=endpoints,
    )
    return SchemaStore(cfg)


def _describe_target(fd, names: dict) -> str:
    kind = fd.target.kind
    if kind is TargetKind.NESTED:
        text = " | ".join(names.get(ref, ref.canonical_url) for ref in fd.target.refs)
    elif kind is TargetKind.TABLE:
        text = "table"
    else:
        text = kind.value
    return text + (" [repeatable]" if fd.repeatable else "")


def cmd_show_fields(args: argparse.Namespace) -> int:
    bundle = _store(args).load_datatype(args.url)
    names = {m.id: m.constructor_name for m in bundle.members.values()}
    order = [bundle.root_def] + [m for m in bundle.members.values() if m.id != bundle.root]
    for i, schema in enumerate(order):
        if i:
            print()
        tag = "  (root)" if schema.id == bundle.root else ""
        print(f"{schema.constructor_name}  {schema.id.canonical_url}{tag}")
        width = max((len(fd.name) for fd in schema.fields), default=0)
        for fd in schema.fields:
            print(f"  {fd.name.ljust(width)}  {_describe_target(fd, names)}")
    return EXIT_OK


def _prompt_answers() -> list[bool]:
    answers: list[bool] = []
    for question, _ in SUGGESTION_QUESTIONS:
        while True:
            reply = input(f"{question} [y/n] ").strip().lower()
            if reply in ("y", "yes", "n", "no"):
                break
        answers.append(reply.startswith("y"))
        if answers[-1]:
            break
    return answers


def cmd_suggest(args: argparse.Namespace) -> int:
    answers = args.answers if args.answers is not None else _prompt_answers()
    name = suggest_schema(answers)
    store = _store(args)
    if name is None:
        fallback = store.find_constructor(FALLBACK_SCHEMA)
        url = fallback.id.canonical_url if fallback else ""
        print(f"No suggestion: describe the analysis with {FALLBACK_SCHEMA} {url}".rstrip())
        return EXIT_OK
    schema = store.find_constructor(name)
    print(f"{name} {schema.id.canonical_url}" if schema else name)
    return EXIT_OK


def cmd_build(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    inst = build_from_manifest(manifest, _store(args))
    doc = build_document(inst)
    if args.output is None:
        sys.stdout.write(doc.text())
    else:
        write_document(doc, args.output)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        text = args.document.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(exc.errno, f"cannot read {args.document}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except ValueError as exc:
        print(f"dtforge: {args.document} is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE
    known = {s.id.canonical_url for s in _store(args).static_documents().values()}
    findings = validate_document(data, known)
    for finding in findings:
        print(finding)
    if findings:
        return EXIT_FINDINGS
    print(f"{args.document}: ok")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (IdentifierError, ManifestSyntaxError) as exc:
        code = EXIT_USAGE
        err: Exception = exc
    except (ResolutionError, InvalidSchemaDocument, ConstructorConflict) as exc:
        code, err = EXIT_RESOLUTION, exc
    except (InstanceError, SerializationError) as exc:
        code, err = EXIT_INSTANCE, exc
    except IoError as exc:
        code, err = EXIT_IO, exc
    print(f"dtforge: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
