"""Command-line interface for the obstruction engine."""

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, TextIO

from src.errors import DomainError, ObstructionError
from src.graded_ring import (
    betti_numbers,
    cup,
    euler_characteristic,
    parse_monomial,
    poincare_polynomial,
)
from src.intersection_form import UnimodularForm, format_tables, middle_form_check, rank2_tables
from src.lefschetz import TraceConvention, anosov_compatibility, lefschetz_sequence
from src.logger import set_engine_level, setup_logger
from src.math_tools import matrix_to_lists
from src.records import Completeness, Conclusion, ObstructionReport, VerdictRecord
from src.schemas import (
    SphereProductManifold,
    load_automorphism,
    load_manifold_spec,
    load_matrix,
    load_ring,
)
from src.sphere_products import block_table, format_block_table, witness_blocks
from src.toral_oracle import ToralMap, lefschetz_cross_check
from src.verdict import apply_rules

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_BOUNDED = 3


def format_verdict(verdict: VerdictRecord) -> List[str]:
    header = f"{verdict.conclusion.value} [{verdict.rule}]"
    if verdict.scope:
        header += f" for {verdict.scope}"
    if verdict.completeness is not None:
        header += f" ({verdict.completeness.value})"
    lines = [header]
    for item in verdict.evidence:
        lines.append(f"  {item.status.value:<9} {item.constraint}  ({item.citation})")
    return lines


def format_report(report: ObstructionReport) -> str:
    lines = [
        f"kind: {report.kind}",
        f"dimension: {report.dimension}",
        f"betti: {' '.join(str(b) for b in report.betti_profile)}",
        f"chi: {report.chi}",
        "assumptions:",
    ]
    lines.extend(f"  - {a}" for a in report.assumptions)
    for verdict in report.verdicts:
        lines.extend(format_verdict(verdict))
    return "\n".join(lines)


class ObstructionCLI:
    """Argument parsing and dispatch for every subcommand."""

    def __init__(self, out: Optional[TextIO] = None, err: Optional[TextIO] = None):
        self.out = out if out is not None else sys.stdout
        self.err = err if err is not None else sys.stderr
        self.parser = self.build_parser()

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="anosov-obstructions",
            description="Cohomological obstructions to Anosov diffeomorphisms",
        )
        parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
        commands = parser.add_subparsers(dest="command", required=True)

        def with_format(p: argparse.ArgumentParser, choices=("json", "table"), default="json"):
            p.add_argument("--format", choices=choices, default=default)
            return p

        ring = commands.add_parser("ring", help="Betti numbers and cup products")
        ring_commands = ring.add_subparsers(dest="action", required=True)
        betti = with_format(ring_commands.add_parser("betti"))
        betti.add_argument("--ring", required=True, help="JSON file with 'generators' or 'factors'")
        betti.set_defaults(handler=self.handle_ring_betti)
        cup_parser = with_format(ring_commands.add_parser("cup"))
        cup_parser.add_argument("--ring", required=True)
        cup_parser.add_argument("--a", required=True, help="monomial such as 'x1^1,x2^1' or 'a:2'")
        cup_parser.add_argument("--b", required=True)
        cup_parser.set_defaults(handler=self.handle_ring_cup)

        sphere = commands.add_parser("sphere-product", help="Products of spheres")
        sphere_commands = sphere.add_subparsers(dest="action", required=True)
        analyze_sp = with_format(sphere_commands.add_parser("analyze"))
        analyze_sp.add_argument("spec")
        analyze_sp.set_defaults(handler=self.handle_analyze)
        blocks = with_format(sphere_commands.add_parser("blocks"))
        blocks.add_argument("spec")
        blocks.set_defaults(handler=self.handle_blocks)

        lefschetz = with_format(commands.add_parser("lefschetz", help="Lefschetz sequence of an automorphism"), ("json", "table", "csv"))
        lefschetz.add_argument("--automorphism", required=True)
        lefschetz.add_argument("-L", "--length", type=int, default=None)
        lefschetz.add_argument("--convention", choices=[c.value for c in TraceConvention], default=TraceConvention.INVERSE_TRACES.value)
        lefschetz.add_argument("--growth", action="store_true", help="also classify the growth")
        lefschetz.set_defaults(handler=self.handle_lefschetz)

        form = commands.add_parser("form", help="Unimodular intersection forms")
        form_commands = form.add_subparsers(dest="action", required=True)
        form_analyze = with_format(form_commands.add_parser("analyze"))
        form_analyze.add_argument("--matrix", required=True)
        form_analyze.add_argument("--chi-nonzero", action="store_true")
        form_analyze.add_argument("--bound", type=int, default=None)
        form_analyze.set_defaults(handler=self.handle_form_analyze)
        tables = with_format(form_commands.add_parser("tables"), default="table")
        tables.set_defaults(handler=self.handle_form_tables)

        oracle = commands.add_parser("oracle", help="Toral automorphism ground truth")
        oracle_commands = oracle.add_subparsers(dest="action", required=True)
        cross = with_format(oracle_commands.add_parser("cross-check"), ("json", "table", "csv"), default="csv")
        cross.add_argument("--matrix", required=True)
        cross.add_argument("-L", "--length", type=int, default=10)
        cross.set_defaults(handler=self.handle_cross_check)

        analyze = with_format(commands.add_parser("analyze", help="Full obstruction report"))
        analyze.add_argument("spec")
        analyze.set_defaults(handler=self.handle_analyze)
        return parser

    def emit_json(self, payload: Any) -> None:
        print(json.dumps(payload, indent=2), file=self.out)

    def emit_text(self, text: str) -> None:
        print(text, file=self.out)

    def handle_ring_betti(self, args: argparse.Namespace) -> int:
        ring = load_ring(args.ring).ring
        betti = betti_numbers(ring)
        chi = euler_characteristic(ring)
        if args.format == "table":
            self.emit_text("\n".join(f"b_{d} = {b}" for d, b in enumerate(betti)) + f"\nchi = {chi}")
        else:
            self.emit_json({"betti": betti, "euler_characteristic": chi, "poincare_polynomial": str(poincare_polynomial(ring))})
        return EXIT_OK

    def handle_ring_cup(self, args: argparse.Namespace) -> int:
        ring = load_ring(args.ring).ring
        a, b = parse_monomial(ring, args.a), parse_monomial(ring, args.b)
        product = cup(ring, a, b)
        rendered = "0" if product.is_zero else product.monomial.format(ring)
        if args.format == "table":
            sign = "-" if product.sign < 0 else ""
            self.emit_text(f"{a.format(ring)} * {b.format(ring)} = {sign}{rendered}")
        else:
            self.emit_json({"a": a.format(ring), "b": b.format(ring), "sign": product.sign, "product": rendered})
        return EXIT_OK

    def handle_analyze(self, args: argparse.Namespace) -> int:
        report = apply_rules(load_manifold_spec(args.spec))
        if args.format == "table":
            self.emit_text(format_report(report))
        else:
            self.emit_json(report.model_dump(mode="json"))
        return EXIT_BOUNDED if report.bounded_only else EXIT_OK

    def handle_blocks(self, args: argparse.Namespace) -> int:
        spec = load_manifold_spec(args.spec)
        if not isinstance(spec, SphereProductManifold):
            raise DomainError(f"{args.spec}: field kind: expected 'sphere_product', got {spec.kind!r}")
        product = spec.product
        blocks = spec.generator_blocks if spec.generator_blocks is not None else witness_blocks(product)
        decomposition = block_table(product, blocks)
        if args.format == "table":
            self.out.write(format_block_table(decomposition))
        else:
            self.emit_json(decomposition.to_dict())
        return EXIT_OK

    def handle_lefschetz(self, args: argparse.Namespace) -> int:
        aut = load_automorphism(args.automorphism).build()
        convention = TraceConvention(args.convention)
        sequence = lefschetz_sequence(aut, args.length, convention)
        if args.format == "csv":
            self.out.write(sequence.to_csv())
            return EXIT_OK
        record = anosov_compatibility(aut, convention, args.length) if args.growth else None
        if args.format == "table":
            lines = [f"{l:>4}  {value}" for l, value in enumerate(sequence.values, start=1)]
            if record is not None:
                lines.append(f"growth: {record.growth.value}, consistency: {record.consistency.value}")
            self.emit_text("\n".join(lines))
        else:
            payload: Dict[str, Any] = sequence.to_dict()
            if record is not None:
                payload["compatibility"] = record.to_dict()
            self.emit_json(payload)
        return EXIT_OK

    def handle_form_analyze(self, args: argparse.Namespace) -> int:
        form = UnimodularForm.from_matrix(load_matrix(args.matrix, "Q"), "Q")
        verdict = middle_form_check(form, chi_nonzero=args.chi_nonzero, entry_bound=args.bound)
        if args.format == "table":
            self.emit_text("\n".join(format_verdict(verdict)))
        else:
            self.emit_json(verdict.model_dump(mode="json"))
        bounded = verdict.conclusion == Conclusion.INCONCLUSIVE and verdict.completeness == Completeness.BOUNDED_ONLY
        return EXIT_BOUNDED if bounded else EXIT_OK

    def handle_form_tables(self, args: argparse.Namespace) -> int:
        if args.format == "table":
            self.emit_text(format_tables())
        else:
            self.emit_json(
                [
                    {"forms": table.names, "isometries": [matrix_to_lists(A) for A in table.isometries]}
                    for table in rank2_tables()
                ]
            )
        return EXIT_OK

    def handle_cross_check(self, args: argparse.Namespace) -> int:
        toral = ToralMap.from_matrix(load_matrix(args.matrix, "A"))
        report = lefschetz_cross_check(toral, args.length)
        if args.format == "csv":
            self.out.write(report.to_csv())
        elif args.format == "table":
            lines = [f"{'l':>4} {'lefschetz':>14} {'det_count':>12} {'smith_count':>12}"]
            lines.extend(f"{r.l:>4} {r.lefschetz:>14} {r.det_count:>12} {r.smith_count:>12}" for r in report.rows)
            lines.append(f"growth rate {report.dominant_modulus:.10g}, coefficient {report.coefficient:.6g}")
            self.emit_text("\n".join(lines))
        else:
            self.emit_json(report.to_dict())
        return EXIT_OK

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Parse argv, dispatch, and map failures to exit codes."""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return EXIT_INPUT if e.code else EXIT_OK
        if args.log_level:
            set_engine_level(args.log_level)
        handler: Callable[[argparse.Namespace], int] = args.handler
        try:
            return handler(args)
        except DomainError as e:
            print(f"❌ {e}", file=self.err)
            return EXIT_INPUT
        except ObstructionError as e:
            logger.error(f"{type(e).__name__}: {e}")
            print(f"❌ {type(e).__name__}: {e}", file=self.err)
            return EXIT_FAILURE


def cli_main(argv: Optional[List[str]] = None) -> int:
    return ObstructionCLI().run(argv)
