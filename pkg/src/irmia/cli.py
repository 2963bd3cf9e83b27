"""Command-line entry point: ``irmia <command> ...``.

Exit status is 0 when a verdict holds (or a transformation succeeded), 1 when
it does not, and 2 for usage, parse or precondition errors.  Verdicts go to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

from .completion import CompletionError, demonic_completion
from .compose import Mode, NotComposable, hide, parallel_compose
from .conformance import NotInputEnabled, ioco_may, irioco
from .conjunction import conjoin
from .iofmt import ParseError, load, serialize, to_dot
from .isomorphism import find_isomorphism
from .model import MAY, MUST, AlphabetMismatch, InvalidAutomaton, IrMia
from .oracle import CHECKS, SizeBoundExceeded, fuzz_one
from .quotient import QuotientPreconditionError, quotient
from .semantics import failure_pred, input_enabledness, quiescent

OK, NO, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class Report:
    """Collects one command's verdict and renders it as text or JSON."""

    def __init__(self, command: str, as_json: bool):
        self.command = command
        self.as_json = as_json
        self.payload: dict = {"command": command}
        self.lines: list[str] = []

    def verdict(self, text: str) -> None:
        self.payload["verdict"] = text

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def emit(self) -> None:
        if self.as_json:
            print(json.dumps(self.payload, sort_keys=True))
        else:
            for line in self.lines:
                print(line)


def _load(path: str) -> IrMia:
    try:
        return load(path)
    except ParseError as exc:
        exc.args = (f"{path}: {exc}",)
        raise


def _write_or_print(aut: IrMia, out: str | None, report: Report, comments: list[str]) -> None:
    """Write ``aut`` to ``out``, or print it after ``comments`` (as format comments)."""
    text = serialize(aut)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        report.lines.extend(comments)
        report.payload["output"] = out
    else:
        report.lines.extend(f"# {c}" for c in comments)
        report.lines.append(text.rstrip("\n"))
        report.payload["automaton"] = text


# -- commands -----------------------------------------------------------------

def cmd_validate(args, report: Report) -> int:
    try:
        aut = _load(args.file)
    except ParseError as exc:
        if exc.violation is None:
            raise
        report.verdict("invalid")
        report.payload["violation"] = str(exc)
        report.say(f"INVALID {exc}")
        return NO
    report.verdict("valid")
    report.say(f"VALID {aut.name}: {len(aut.states)} states, {len(aut.edges)} transitions")
    return OK


def cmd_info(args, report: Report) -> int:
    aut = _load(args.file)
    flags = input_enabledness(aut).as_dict()
    live = [s for s in aut.states if s != aut.failure]
    info = {
        "name": aut.name,
        "inputs": list(aut.inputs),
        "outputs": list(aut.outputs),
        "states": len(aut.states),
        "transitions": len(aut.edges),
        "initial": aut.initial,
        "failure": aut.failure,
        "input_enabled": flags,
        "may_quiescent": [s for s in live if quiescent(aut, s, MAY)],
        "must_quiescent": [s for s in live if quiescent(aut, s, MUST)],
        "may_failure": [s for s in live if failure_pred(aut, s, MAY)],
        "must_failure": [s for s in live if failure_pred(aut, s, MUST)],
    }
    report.verdict("ok")
    report.payload["info"] = info
    for key, value in info.items():
        if isinstance(value, dict):
            value = " ".join(f"{k}={'yes' if v else 'no'}" for k, v in value.items())
        elif isinstance(value, list):
            value = ", ".join(value) if value else "-"
        report.say(f"{key}: {value}")
    return OK


def cmd_refines(args, report: Report) -> int:
    from .refinement import refines

    verdict = refines(_load(args.impl), _load(args.spec))
    if verdict.holds:
        report.verdict("holds")
        report.say("HOLDS")
        return OK
    cex = verdict.counterexample
    report.verdict("fails")
    report.payload["counterexample"] = {
        "pair": list(cex.pair), "clause": cex.clause, "action": cex.action,
    }
    report.say(f"FAILS {cex}")
    return NO


def _conformance(check, args, report: Report) -> int:
    impl, spec = _load(args.impl), _load(args.spec)
    verdict = check(impl, spec, assume_enabled=args.assume_enabled, strict=args.strict)
    report.say(verdict.summary())
    if verdict.holds:
        report.verdict("pass")
        return OK
    report.verdict("fail")
    report.payload["counterexample"] = {
        "trace": list(verdict.counterexample),
        "rendered": verdict.trace_text,
        "condition": verdict.violated_condition,
        "observation": verdict.rendered_observation,
    }
    return NO


def cmd_irioco(args, report: Report) -> int:
    return _conformance(irioco, args, report)


def cmd_ioco(args, report: Report) -> int:
    return _conformance(ioco_may, args, report)


def cmd_compose(args, report: Report) -> int:
    result = parallel_compose(_load(args.a), _load(args.b), Mode(args.mode))
    events = [{"state": e.state, "reason": e.reason, "label": e.label} for e in result.pruning_report]
    report.payload["pruning_report"] = events
    status = "compatible" if result.compatible else "incompatible"
    report.verdict(status)
    comments = [status.upper()]
    for e in result.pruning_report:
        comments.append(f"pruned {e.state}: {e.reason}" + (f" ({e.label})" if e.label else ""))
    _write_or_print(result.automaton, args.output, report, comments)
    return OK if result.compatible else NO


def cmd_hide(args, report: Report) -> int:
    labels = [x.strip() for x in args.labels.split(",") if x.strip()]
    aut = hide(_load(args.file), labels)
    report.verdict("ok")
    _write_or_print(aut, args.output, report, [])
    return OK


def cmd_quotient(args, report: Report) -> int:
    result = quotient(_load(args.p), _load(args.d))
    if result.precondition_report:
        raise QuotientPreconditionError("; ".join(result.precondition_report))
    report.payload["impossible"] = dict(sorted(result.impossible.items()))
    if not result.defined:
        report.verdict("undefined")
        report.say("UNDEFINED")
        for state, why in sorted(result.impossible.items()):
            report.say(f"impossible {state}: {why}")
        return NO
    report.verdict("defined")
    _write_or_print(result.automaton, args.output, report, ["DEFINED"])
    return OK


def cmd_conjoin(args, report: Report) -> int:
    result = conjoin(_load(args.a), _load(args.b))
    report.payload["inconsistent"] = dict(sorted(result.inconsistent.items()))
    if not result.defined:
        report.verdict("undefined")
        report.say("UNDEFINED")
        for state, why in sorted(result.inconsistent.items()):
            report.say(f"inconsistent {state}: {why}")
        return NO
    report.verdict("defined")
    _write_or_print(result.automaton, args.output, report, ["DEFINED"])
    return OK


def cmd_complete(args, report: Report) -> int:
    report.verdict("ok")
    _write_or_print(demonic_completion(_load(args.file)), args.output, report, [])
    return OK


def cmd_iso(args, report: Report) -> int:
    mapping = find_isomorphism(_load(args.a), _load(args.b))
    if mapping is None:
        report.verdict("not-isomorphic")
        report.say("NOT ISOMORPHIC")
        return NO
    report.verdict("isomorphic")
    report.payload["mapping"] = mapping
    report.say("ISOMORPHIC")
    for src, dst in mapping.items():
        report.say(f"  {src} -> {dst}")
    return OK


def cmd_dot(args, report: Report) -> int:
    text = to_dot(_load(args.file))
    report.verdict("ok")
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        report.payload["output"] = args.output
    else:
        report.payload["dot"] = text
        report.say(text.rstrip("\n"))
    return OK


def _fuzz_task(job):
    seed, check, depth, bound = job
    return fuzz_one(seed, check, depth=depth, bound=bound)


def cmd_fuzz(args, report: Report) -> int:
    if args.count < 1:
        raise UsageError("--count must be positive")
    jobs = [(args.seed + k, args.check, args.depth, args.bound) for k in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_fuzz_task, jobs))
    else:
        outcomes = [_fuzz_task(j) for j in jobs]
    bad = [o for o in outcomes if not o.agree]
    skipped = sum(o.skipped for o in outcomes)
    report.payload["seed"] = args.seed
    report.payload["checked"] = len(outcomes) - skipped
    report.payload["skipped"] = skipped
    for o in bad:
        report.say(f"DISAGREE seed={o.seed} fast={o.fast} reference={o.reference}")
    if bad:
        report.verdict("disagree")
        report.payload["counterexample"] = {"seed": bad[0].seed, "fast": bad[0].fast,
                                            "reference": bad[0].reference}
        return NO
    report.verdict("agree")
    report.say(f"AGREE {args.check}: {len(outcomes) - skipped} pairs from seed {args.seed}"
               + (f", {skipped} over the size bound" if skipped else ""))
    return OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--output", help="write the resulting automaton to this file")

    parser = argparse.ArgumentParser(prog="irmia", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text, parents=(common,)):
        p = sub.add_parser(name, help=help_text, parents=list(parents))
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check well-formedness").add_argument("file")
    add("info", cmd_info, "enabledness flags and quiescent/failure states").add_argument("file")
    p = add("refines", cmd_refines, "modal refinement I <= S")
    p.add_argument("impl")
    p.add_argument("spec")
    for name, func, text in (("irioco", cmd_irioco, "modal-irioco conformance"),
                             ("ioco", cmd_ioco, "may-output ioco conformance")):
        p = add(name, func, text)
        p.add_argument("impl")
        p.add_argument("spec")
        p.add_argument("--assume-enabled", action="store_true",
                       help="skip the implementation input-enabledness check")
        p.add_argument("--strict", action="store_true",
                       help="treat a non-input-enabled implementation as an error")
    p = add("compose", cmd_compose, "parallel composition", (common, output))
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.MULTICAST.value)
    p.add_argument("a")
    p.add_argument("b")
    p = add("hide", cmd_hide, "turn output labels into tau", (common, output))
    p.add_argument("file")
    p.add_argument("--labels", required=True, help="comma-separated output labels")
    p = add("quotient", cmd_quotient, "quotient P // D", (common, output))
    p.add_argument("p")
    p.add_argument("d")
    p = add("conjoin", cmd_conjoin, "conjunction A ^ B", (common, output))
    p.add_argument("a")
    p.add_argument("b")
    add("complete", cmd_complete, "demonic completion", (common, output)).add_argument("file")
    p = add("iso", cmd_iso, "isomorphism check")
    p.add_argument("a")
    p.add_argument("b")
    add("dot", cmd_dot, "Graphviz export", (common, output)).add_argument("file")
    p = add("fuzz", cmd_fuzz, "cross-check a checker against its brute-force reference")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--check", choices=CHECKS, required=True)
    p.add_argument("--count", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--depth", type=int, default=8, help="trace depth for irioco")
    p.add_argument("--bound", type=int, default=20, help="candidate-pair bound for refines")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    report = Report(args.command, args.json)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = args.func(args, report)
        for w in caught:
            print(f"irmia {args.command}: warning: {w.message}", file=sys.stderr)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"irmia {args.command}: error: {exc}", file=sys.stderr)
        return ERROR
    except (OSError, ParseError, InvalidAutomaton, AlphabetMismatch, NotComposable,
            QuotientPreconditionError, CompletionError, NotInputEnabled, SizeBoundExceeded,
            ValueError) as exc:
        where = f" {exc.filename}" if isinstance(exc, OSError) and exc.filename else ""
        print(f"irmia {args.command}: error{where}: {exc}", file=sys.stderr)
        return ERROR
    report.emit()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
