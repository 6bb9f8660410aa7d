"""Command-line entry points.

Exit codes: 0 success, 1 diagnostics or runtime errors, 2 usage errors.
Diagnostics go to stderr; payload output (worksheets, reports, counts)
goes to stdout so it can be piped.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from hazlab import report as reporting
from hazlab.generate import (
    GenerationError,
    InvalidProjectError,
    Origin,
    compare_strategies,
    find_catalog,
    generate_deviation_route,
    generate_malfunction_route,
    merge_regenerated,
)
from hazlab.lang import load_model
from hazlab.model import (
    HazlabError,
    Project,
    errors_only,
    validate_project,
)
from hazlab.store import PROJECT_SUFFIX, ProjectStore, StoreError


def _eprint(*parts: object) -> None:
    print(*parts, file=sys.stderr)


def _is_project_file(path: Path) -> bool:
    return path.name.endswith(PROJECT_SUFFIX) or path.suffix == ".json"


# --- check ---

def cmd_check(args: argparse.Namespace) -> int:
    result = load_model(args.paths)
    issues = []
    if result.project is not None:
        issues = validate_project(result.project)
    if args.format == "json":
        payload = {
            "diagnostics": [
                {
                    "code": d.code,
                    "severity": d.severity,
                    "message": d.message,
                    "path": d.path,
                    "line": d.span.line,
                    "column": d.span.column,
                    "length": d.span.length,
                }
                for d in result.diagnostics
            ],
            "validation": [
                {
                    "severity": issue.severity.value,
                    "entity": issue.entity,
                    "message": issue.message,
                }
                for issue in issues
            ],
            "ok": result.ok and not errors_only(issues),
        }
        print(json.dumps(payload, indent=2))
    else:
        for diagnostic in result.diagnostics:
            _eprint(diagnostic)
        for issue in issues:
            _eprint(issue)
    if not result.ok or errors_only(issues):
        return 1
    return 0


# --- generate ---

def _regenerate(project: Project, strategy: str,
                catalog_name: str | None) -> dict[str, int]:
    counts: dict[str, int] = {}
    if strategy in ("deviation", "both"):
        fresh = generate_deviation_route(project)
        project.phs_set = merge_regenerated(
            project.phs_set, fresh, Origin.DEVIATION_ROUTE)
        counts["deviation_route"] = len(fresh)
        counts["distinct_deviations"] = len(
            {row.instance_label for row in fresh})
    if strategy in ("malfunction", "both"):
        catalog = find_catalog(project, catalog_name)
        fresh = generate_malfunction_route(project, catalog)
        project.phs_set = merge_regenerated(
            project.phs_set, fresh, Origin.MALFUNCTION_ROUTE)
        counts["malfunction_route"] = len(fresh)
    return counts


def cmd_generate(args: argparse.Namespace) -> int:
    paths = [Path(p) for p in args.paths]
    model_paths = [p for p in paths if not _is_project_file(p)]
    project_files = [p for p in paths if _is_project_file(p)]
    if len(project_files) > 1 or (project_files and model_paths):
        _eprint("error: pass either .hzl model files or one project file")
        return 2

    if model_paths:
        result = load_model(model_paths)
        for diagnostic in result.diagnostics:
            _eprint(diagnostic)
        if result.project is None:
            return 1
        model = result.project
        out = Path(args.out) if args.out else model_paths[0].with_name(
            model_paths[0].stem + PROJECT_SUFFIX)
        if out.exists():
            store = ProjectStore(out)
        else:
            store = ProjectStore.create(out, model)
    else:
        model = None
        out = project_files[0]
        store = ProjectStore(out)

    def run(project: Project) -> dict[str, int]:
        if model is not None:
            project.name = model.name
            project.taxonomy = model.taxonomy
            project.catalogs = list(model.catalogs)
            project.scenarios = list(model.scenarios)
        return _regenerate(project, args.strategy, args.catalog)

    try:
        counts = store.mutate(run)
    except (InvalidProjectError, GenerationError) as exc:
        _eprint(f"error: {exc}")
        return 1

    if "deviation_route" in counts:
        print(f"{counts['deviation_route']} PHS "
              f"({counts['distinct_deviations']} distinct deviations)")
    if "malfunction_route" in counts:
        print(f"{counts['malfunction_route']} PHS (malfunction route)")
    if args.strategy == "both":
        project = store.snapshot()
        catalog = find_catalog(project, args.catalog)
        comparison = compare_strategies(project, catalog)
        print("\n".join(reporting.comparison_lines(catalog.name, comparison)))
    _eprint(f"wrote {out}")
    return 0


# --- export / import / report ---

def cmd_export(args: argparse.Namespace) -> int:
    store = ProjectStore(args.project)
    document = store.export(args.format)
    if args.out:
        Path(args.out).write_text(document, encoding="utf-8")
        _eprint(f"wrote {args.out}")
    else:
        sys.stdout.write(document)
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    store = ProjectStore(args.project)
    document = Path(args.worksheet).read_text(encoding="utf-8")
    applied, diagnostics = store.import_decisions(
        document, format=args.format, reviewer=args.reviewer)
    for diagnostic in diagnostics:
        _eprint(diagnostic)
    print(f"{applied} applied")
    if any(d.severity == "error" for d in diagnostics):
        return 1
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    store = ProjectStore(args.project)
    summary = store.summary()
    if args.format == "json":
        sys.stdout.write(reporting.render_json(summary))
    elif args.format == "csv":
        sys.stdout.write(reporting.render_csv(summary))
    else:
        sys.stdout.write(reporting.render_text(summary))
    if args.figures:
        written = reporting.render_figures(summary, args.figures)
        for path in written:
            _eprint(f"wrote {path}")
    return 0


# --- serve ---

def cmd_serve(args: argparse.Namespace) -> int:
    project_path = args.project or os.environ.get("HAZLAB_PROJECT")
    if not project_path:
        _eprint("error: no project file (pass a path or set HAZLAB_PROJECT)")
        return 2
    store = ProjectStore(project_path)
    ui_dir = args.ui or os.environ.get("HAZLAB_UI_DIR")

    from hazlab.api import create_app
    import uvicorn

    app = create_app(store, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host=args.bind, port=args.port, log_level="warning")
    except SystemExit as exc:
        # normalize uvicorn's startup-failure codes (e.g. port in use) to 1
        return 1 if exc.code else 0
    except OSError as exc:
        _eprint(f"error: {exc}")
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hazlab",
        description="Hazard identification workbench for automated driving "
                    "concept-phase safety analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser(
        "check", help="parse and validate .hzl model files")
    check.add_argument("paths", nargs="+", metavar="FILE")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.set_defaults(func=cmd_check)

    generate = sub.add_parser(
        "generate", help="generate potentially hazardous scenarios")
    generate.add_argument("paths", nargs="+", metavar="FILE",
                          help=".hzl model files or an existing project file")
    generate.add_argument("--strategy",
                          choices=("deviation", "malfunction", "both"),
                          default="deviation")
    generate.add_argument("--catalog", default=None,
                          help="catalog name for the malfunction strategy")
    generate.add_argument("--out", default=None,
                          help=f"project file to write (default: "
                               f"<model>{PROJECT_SUFFIX})")
    generate.set_defaults(func=cmd_generate)

    export = sub.add_parser("export", help="export the review worksheet")
    export.add_argument("project")
    export.add_argument("--format", choices=("csv", "json"), default="csv")
    export.add_argument("--out", default=None)
    export.set_defaults(func=cmd_export)

    imp = sub.add_parser("import", help="apply decisions from a worksheet")
    imp.add_argument("project")
    imp.add_argument("worksheet")
    imp.add_argument("--format", choices=("csv", "json"), default=None,
                     help="worksheet format (default: sniff)")
    imp.add_argument("--reviewer", default="import")
    imp.set_defaults(func=cmd_import)

    rep = sub.add_parser("report", help="summarize review progress")
    rep.add_argument("project")
    rep.add_argument("--format", choices=("text", "json", "csv"),
                     default="text")
    rep.add_argument("--figures", default=None, metavar="DIR",
                     help="also render charts into DIR")
    rep.set_defaults(func=cmd_report)

    serve = sub.add_parser("serve", help="run the review service")
    serve.add_argument("project", nargs="?", default=None,
                       help="project file (default: $HAZLAB_PROJECT)")
    serve.add_argument("--port", type=int, default=8321)
    serve.add_argument("--bind", default="127.0.0.1")
    serve.add_argument("--ui", default=None,
                       help="static UI directory (default: $HAZLAB_UI_DIR)")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (HazlabError, OSError) as exc:
        _eprint(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
