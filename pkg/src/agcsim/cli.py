"""Command-line driver: assemble, run, trace, weave, serve.

Exit codes: 0 ok, 2 usage, 3 assembly error, 4 runtime alarm, 5 I/O or
container error.  Failures print one machine-readable line on stderr:
``<ErrorClass>: <detail>``.
"""

import argparse
import sys
from pathlib import Path

from .asm import assemble, disassemble, symbols_text
from .channels import parse_manifest
from .cpu import MachineState, run, trace_line
from .errors import AgcError, AsmError, BadImage
from .executive import ExecConfig, Executive, VerbNounTable
from .memory import MemorySystem
from .rope import banks_from_image, image_from_banks, rope_to_weave_csv, weave_csv_to_rope
from .server import DskyServer

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ASM = 3
EXIT_ALARM = 4
EXIT_IO = 5


def _fail(exc: BaseException, code: int) -> int:
    print("%s: %s" % (type(exc).__name__, exc), file=sys.stderr)
    return code


def _octal(text: str) -> int:
    return int(text, 8)


def _load_machine(args) -> tuple[MemorySystem, MachineState]:
    manifest = None
    if getattr(args, "manifest", None):
        manifest = parse_manifest(Path(args.manifest).read_text())
    mem = MemorySystem(manifest=manifest, strict_parity=args.strict_parity)
    mem.load_rope(banks_from_image(Path(args.rope).read_bytes()))
    return mem, MachineState(mem)


def cmd_asm(args) -> int:
    src_path = Path(args.source)
    try:
        source = src_path.read_text()
    except OSError as exc:
        return _fail(exc, EXIT_IO)
    try:
        result = assemble(source)
    except AsmError as exc:
        return _fail(exc, EXIT_ASM)
    out = Path(args.output) if args.output else src_path.with_suffix(".rope")
    try:
        out.write_bytes(image_from_banks(result.image))
        out.with_suffix(".sym").write_text(symbols_text(result.symbols))
        out.with_suffix(".lst").write_text(result.listing)
    except OSError as exc:
        return _fail(exc, EXIT_IO)
    print("wrote %s, %s, %s" % (out, out.with_suffix(".sym"), out.with_suffix(".lst")))
    return EXIT_OK


def _execute(args, trace_to=None) -> int:
    try:
        mem, state = _load_machine(args)
    except (OSError, BadImage, ValueError) as exc:
        return _fail(exc, EXIT_IO)
    except AgcError as exc:
        return _fail(exc, EXIT_IO)
    sink = None
    close = None
    if trace_to == "-":
        sink = lambda report: print(trace_line(report))
    elif trace_to:
        fh = open(trace_to, "w")
        close = fh.close
        sink = lambda report: fh.write(trace_line(report) + "\n")
    try:
        outcome = run(state, limit=args.limit, breakpoints=set(args.breakpoints),
                      trace=sink)
    finally:
        if close:
            close()
    print("outcome=%s cycles=%d z=%04o a=%05o l=%05o q=%05o"
          % (outcome.reason, outcome.cycles, outcome.z, state.a, state.l, state.q))
    if outcome.reason == "alarm":
        return _fail(outcome.error, EXIT_ALARM)
    return EXIT_OK


def cmd_run(args) -> int:
    return _execute(args, trace_to=args.trace)


def cmd_trace(args) -> int:
    return _execute(args, trace_to=args.trace or "-")


def cmd_weave(args) -> int:
    src = Path(args.input)
    dst = Path(args.output)
    try:
        if src.suffix == ".rope":
            image = banks_from_image(src.read_bytes())
            dst.write_text(rope_to_weave_csv(image))
        else:
            image = weave_csv_to_rope(src.read_text())
            dst.write_bytes(image_from_banks(image))
    except (OSError, AgcError) as exc:
        return _fail(exc, EXIT_IO)
    print("wrote %s" % dst)
    return EXIT_OK


def cmd_serve(args, stop_event=None) -> int:
    try:
        mem, state = _load_machine(args)
        table = None
        if args.table:
            table = VerbNounTable.from_json(Path(args.table).read_text())
    except (OSError, ValueError, AgcError) as exc:
        return _fail(exc, EXIT_IO)
    host, _, port = args.listen.rpartition(":")
    config = ExecConfig(alarm_policy=args.alarm_policy, dump_path=args.dump)
    executive = Executive(mem, state, table=table, config=config)
    server = DskyServer(executive, host=host or "127.0.0.1", port=int(port),
                        trace=args.trace_protocol)
    if stop_event is not None:
        server._stop = stop_event
    print("listening on %s:%d" % (server.host, server.port), flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agcsim",
                                     description="Block II AGC emulator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_asm = sub.add_parser("asm", help="assemble a source file to .rope/.sym/.lst")
    p_asm.add_argument("source")
    p_asm.add_argument("-o", "--output", help="rope output path (default: source with .rope)")
    p_asm.set_defaults(func=cmd_asm)

    def add_run_flags(p):
        p.add_argument("rope")
        p.add_argument("--limit", type=int, default=100000)
        p.add_argument("--break", dest="breakpoints", type=_octal, action="append",
                       default=[], metavar="OCTAL")
        p.add_argument("--strict-parity", dest="strict_parity", action="store_true",
                       default=True)
        p.add_argument("--no-strict-parity", dest="strict_parity", action="store_false")
        p.add_argument("--manifest", help="channel/layout manifest file")

    p_run = sub.add_parser("run", help="execute a rope image")
    add_run_flags(p_run)
    p_run.add_argument("--trace", metavar="PATH|-", help="write a step trace")
    p_run.set_defaults(func=cmd_run)

    p_trace = sub.add_parser("trace", help="run with the step trace on stdout")
    add_run_flags(p_trace)
    p_trace.add_argument("--trace", metavar="PATH|-")
    p_trace.set_defaults(func=cmd_trace)

    p_weave = sub.add_parser("weave", help="convert .rope <-> weave-plan CSV")
    p_weave.add_argument("input")
    p_weave.add_argument("output")
    p_weave.set_defaults(func=cmd_weave)

    p_serve = sub.add_parser("serve", help="run the DSKY protocol server")
    add_run_flags(p_serve)
    p_serve.add_argument("--listen", default="127.0.0.1:2718", metavar="HOST:PORT")
    p_serve.add_argument("--table", help="verb/noun table JSON")
    p_serve.add_argument("--dump", help="restart dump path")
    p_serve.add_argument("--alarm-policy", choices=("restart", "skip", "halt"),
                         default="restart")
    p_serve.add_argument("--trace-protocol", action="store_true",
                         help="broadcast trace messages to clients")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
