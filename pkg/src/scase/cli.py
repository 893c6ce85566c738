"""Command-line front end.

Exit codes: 0 success (no errors / all verdicts pass), 1 findings or verdict
failure, 2 usage or I/O error.  ``--json`` switches any reporting command
from the human table to the versioned JSON documents described in
``docs/schemas/``.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

from . import payloads
from .aggregation import Verdict, evaluate_case
from .casefile import parse_case, parse_challenges, parse_matrix
from .catalog import builtin_catalog, run_all_lints
from .errors import ParseError, ScaseError
from .matrix import assess, default_matrix, validate_matrix
from .model import FindingSeverity, validate_graph
from .render import render_dot
from .riskmodels import AttemptModel, ResponsePolicy, SimulationParams, simulate_deployment

_OK, _FINDINGS, _USAGE = 0, 1, 2


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise SystemExit(f"error: cannot read {path}: {exc.strerror}")


def _load_case(path: str):
    try:
        return parse_case(_read(path))
    except ParseError as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        raise SystemExit(_USAGE)


def _load_challenges(paths):
    out = []
    for path in paths or ():
        try:
            out.append(parse_challenges(_read(path)))
        except ParseError as exc:
            print(f"{path}:{exc}", file=sys.stderr)
            raise SystemExit(_USAGE)
    return out


def _load_matrix(path):
    if path is None:
        return default_matrix()
    try:
        return parse_matrix(_read(path))
    except ParseError as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        raise SystemExit(_USAGE)


def _print_findings(findings) -> None:
    for f in findings:
        print(f"{f.severity.value}[{f.code}] {f.node or '-'}: {f.message}")


def _cmd_validate(args) -> int:
    try:
        case = parse_case(_read(args.case))
    except ParseError as exc:
        # A malformed file is itself the finding `validate` reports.
        print(f"{args.case}:{exc}", file=sys.stderr)
        return _FINDINGS
    findings = validate_graph(case)
    if args.json:
        print(payloads.to_json(payloads.findings_payload(findings)), end="")
    else:
        _print_findings(findings)
        errors = sum(1 for f in findings if f.severity is FindingSeverity.ERROR)
        warnings = len(findings) - errors
        print(f"{args.case}: {len(case.nodes)} nodes, {errors} error(s), {warnings} warning(s)")
    return _FINDINGS if any(f.severity is FindingSeverity.ERROR for f in findings) else _OK


def _parse_overrides(pairs):
    overrides = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise SystemExit(f"error: override must look like NODE=PROB, got {pair!r}")
        nid, _, raw = pair.partition("=")
        try:
            overrides[nid] = float(raw)
        except ValueError:
            raise SystemExit(f"error: bad override probability {raw!r}")
    return overrides


def _cmd_evaluate(args) -> int:
    case = _load_case(args.case)
    findings = validate_graph(case)
    if any(f.severity is FindingSeverity.ERROR for f in findings):
        _print_findings(findings)
        return _FINDINGS
    estimate = evaluate_case(case, _parse_overrides(args.override))
    if args.json:
        print(payloads.to_json(payloads.estimate_payload(estimate)), end="")
    else:
        print(f"root validity : {estimate.root_validity!r}")
        print(f"overall risk  : {estimate.overall_risk!r}")
        for nid, outcome in sorted(estimate.outcome_risks.items()):
            threshold = "-" if outcome.threshold is None else repr(outcome.threshold)
            print(f"{nid}: severity={outcome.severity} risk={outcome.risk!r} threshold={threshold} [{outcome.verdict}]")
        _print_findings(estimate.findings)
    all_pass = all(o.verdict == Verdict.PASS for o in estimate.outcome_risks.values())
    return _OK if all_pass else _FINDINGS


def _cmd_assess(args) -> int:
    if args.dump_default_matrix:
        text = resources.files("scase").joinpath("data/default.smatrix").read_text(encoding="utf-8")
        print(text, end="")
        return _OK
    if args.case is None:
        print("error: assess needs a case file (or --dump-default-matrix)", file=sys.stderr)
        return _USAGE
    case = _load_case(args.case)
    matrix = _load_matrix(args.matrix)
    matrix_findings = validate_matrix(matrix)
    if matrix_findings:
        _print_findings(matrix_findings)
        return _FINDINGS
    findings = validate_graph(case)
    if any(f.severity is FindingSeverity.ERROR for f in findings):
        _print_findings(findings)
        return _FINDINGS
    estimate = evaluate_case(case, _parse_overrides(args.override))
    assessments = []
    for nid, outcome in sorted(estimate.outcome_risks.items()):
        assessments.append((nid, assess(outcome.risk, outcome.severity, matrix)))
    if args.json:
        print(payloads.to_json(payloads.assessment_payload(assessments)), end="")
    else:
        print(f"overall risk: {estimate.overall_risk!r}")
        for nid, a in assessments:
            print(f"{nid}: severity={a.severity} risk={a.probability!r} likelihood={a.likelihood} -> {a.verdict.value}")
    unacceptable = any(a.verdict.value == "unacceptable" for _, a in assessments)
    return _FINDINGS if unacceptable else _OK


def _cmd_simulate(args) -> int:
    schedule = tuple(float(x) for x in args.schedule.split(",")) if args.schedule else ()
    model = AttemptModel(
        p_attempt=args.p_attempt,
        p_succeed=args.p_succeed,
        p_caught=args.p_caught,
        practice_schedule=schedule,
        practice_k=args.practice_k,
    )
    policy = ResponsePolicy.CONTINUE_WITH_TIGHTENING if args.tighten_factor is not None else ResponsePolicy.ONE_AND_DONE
    params = SimulationParams(
        model=model,
        trials=args.trials,
        seed=args.seed,
        response_policy=policy,
        tighten_factor=args.tighten_factor if args.tighten_factor is not None else 1.0,
    )
    estimate, half_width = simulate_deployment(params)
    if args.json:
        print(
            payloads.to_json(
                payloads._versioned(
                    {
                        "estimate": estimate,
                        "half_width_95": half_width,
                        "trials": args.trials,
                        "seed": args.seed,
                        "policy": policy.value,
                    }
                )
            ),
            end="",
        )
    else:
        print(f"estimate      : {estimate!r}")
        print(f"half_width_95 : {half_width!r}")
        print(f"trials={args.trials} seed={args.seed} policy={policy.value}")
    return _OK


def _cmd_lint(args) -> int:
    case = _load_case(args.case)
    graph_findings = validate_graph(case)
    if any(f.severity is FindingSeverity.ERROR for f in graph_findings):
        _print_findings(graph_findings)
        return _FINDINGS
    challenge_sets = _load_challenges(args.challenges)
    _, findings = run_all_lints(case, challenge_sets, builtin_catalog())
    if args.json:
        print(payloads.to_json(payloads.lint_payload(findings)), end="")
    else:
        for f in findings:
            print(f"{f.severity.value}[{f.rule}] {f.subject}: {f.message}")
        errors = sum(1 for f in findings if f.severity is FindingSeverity.ERROR)
        print(f"{args.case}: {len(findings)} finding(s), {errors} error(s)")
    return _FINDINGS if any(f.severity is FindingSeverity.ERROR for f in findings) else _OK


def _cmd_render(args) -> int:
    case = _load_case(args.case)
    text = render_dot(case)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text, end="")
    return _OK


def _cmd_catalog(args) -> int:
    templates = builtin_catalog()
    if args.json:
        print(payloads.to_json(payloads.catalog_payload(templates)), end="")
    else:
        width = max(len(t.id) for t in templates)
        for t in templates:
            marker = "core " if t.core else "extra"
            print(
                f"{t.id:<{width}}  {marker}  {t.category.value:<15} "
                f"practicality={t.practicality.value} strength={t.max_strength.value} scalability={t.scalability.value}"
            )
    return _OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    case = _load_case(args.case)
    matrix = _load_matrix(args.matrix)
    challenge_sets = _load_challenges(args.challenges)
    app = build_app(case, matrix, challenge_sets)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return _OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scase", description="GSN safety-case engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check structural invariants of a case file")
    p.add_argument("case")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("evaluate", help="aggregate probabilities into a risk estimate")
    p.add_argument("case")
    p.add_argument("--override", action="append", metavar="NODE=PROB")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("assess", help="judge per-severity risks against a risk matrix")
    p.add_argument("case", nargs="?")
    p.add_argument("--matrix", help="matrix file (default: built-in 5x5)")
    p.add_argument("--override", action="append", metavar="NODE=PROB")
    p.add_argument("--dump-default-matrix", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_assess)

    p = sub.add_parser("simulate", help="Monte Carlo catastrophe-attempt race")
    p.add_argument("--p-attempt", type=float, default=1.0)
    p.add_argument("--p-succeed", type=float, default=0.0)
    p.add_argument("--p-caught", type=float, default=0.0)
    p.add_argument("--schedule", help="comma-separated per-attempt success probabilities")
    p.add_argument("--practice-k", type=int, default=0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tighten-factor", type=float, help="keep running after a catch, scaling p_succeed by this factor")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("lint", help="run the hard-standard lints (plus risk cases)")
    p.add_argument("case")
    p.add_argument("--challenges", action="append", metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_lint)

    p = sub.add_parser("render", help="emit a Graphviz DOT diagram")
    p.add_argument("case")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("catalog", help="dump the built-in argument catalog")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("serve", help="start the HTTP evaluation service")
    p.add_argument("case")
    p.add_argument("--matrix")
    p.add_argument("--challenges", action="append", metavar="FILE")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("SCASE_PORT", "8642")))
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return _USAGE
        return exc.code if exc.code is not None else _OK
    except ScaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE


if __name__ == "__main__":
    sys.exit(main())
