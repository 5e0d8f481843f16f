"""In-interpreter call tracer for single-file Python programs.

Runs a target file under sys.settrace and appends one protocol line per
witnessed call whose caller frame and callee function are both defined in
the target file itself. The trace goes to the path named by the
CALLWITNESS_TRACE_OUT environment variable; the target's stdout, stderr,
and exit status pass through untouched. Without the variable the target
simply runs untraced, so tracing can never change what a program prints.

Protocol, one line each, tab separated:

    CALLWITNESS<TAB>1<TAB>python
    CALL<TAB><caller><TAB><callee>

Names are dotted definition paths rooted at the module name, which is the
target's filename without extension. Module-level code is the caller
``<module>.<toplevel>``. A callee resolves to the function actually
entered, so aliases, callbacks passed by reference, and inherited methods
all attribute to their defining path. Frames with no dotted name of their
own (lambdas, comprehensions, class bodies) are never callees and are
looked through when attributing callers. Generator and coroutine
resumptions are not new calls: only the initial entry of a frame is
recorded. One target per process; the hook owns the whole interpreter.
"""

import argparse
import ast
import os
import subprocess
import sys
import traceback

TRACE_ENV_VAR = "CALLWITNESS_TRACE_OUT"
TRACE_HEADER = "CALLWITNESS\t1\tpython"
TOPLEVEL = "<toplevel>"


def definition_map(source: str, module: str) -> dict[tuple[str, int], str]:
    """Map (name, first line) of every def to its dotted definition path.

    The first line includes decorators: a decorated function's code object
    starts at its first decorator line, not at the def keyword.
    """
    tree = ast.parse(source)
    paths: dict[tuple[str, int], str] = {}

    def walk(node, prefix):
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
                qualpath = prefix + "." + child.name
                first = min(
                    [child.lineno] + [d.lineno for d in child.decorator_list]
                )
                paths[(child.name, first)] = qualpath
                walk(child, qualpath)
            elif isinstance(child, ast.ClassDef):
                walk(child, prefix + "." + child.name)
            else:
                walk(child, prefix)

    walk(tree, module)
    return paths


class TraceSession:
    """Owns the settrace hook and the open trace file for one target run."""

    def __init__(self, target_file, module, paths, out):
        self.target_file = target_file
        self.module = module
        self.paths = paths
        self.out = out

    def start(self):
        self.out.write(TRACE_HEADER + "\n")
        sys.settrace(self.hook)

    def stop(self):
        sys.settrace(None)

    def hook(self, frame, event, arg):
        if event != "call":
            return None
        if frame.f_lasti >= 0:
            return None
        callee = self.name_of(frame)
        if callee is None:
            return None
        caller = self.caller_of(frame)
        if caller is None:
            return None
        self.out.write(f"CALL\t{caller}\t{callee}\n")
        return None

    def name_of(self, frame):
        code = frame.f_code
        if code.co_filename != self.target_file:
            return None
        return self.paths.get((code.co_name, code.co_firstlineno))

    def caller_of(self, frame):
        walker = frame.f_back
        while walker is not None:
            code = walker.f_code
            if code.co_filename != self.target_file:
                return None
            if code.co_name == "<module>":
                return self.module + "." + TOPLEVEL
            named = self.paths.get((code.co_name, code.co_firstlineno))
            if named is not None:
                return named
            walker = walker.f_back
        return None


def exit_status_of(exc: SystemExit) -> int:
    if exc.code is None:
        return 0
    if isinstance(exc.code, int):
        return exc.code
    print(exc.code, file=sys.stderr)
    return 1


def print_target_traceback(exc: BaseException, target_file: str) -> None:
    """Print the traceback the target would have shown running on its own.

    Frames belonging to this tracer (everything above the target's module
    frame) are trimmed so the report starts inside the target file.
    """
    tb = exc.__traceback__
    while tb is not None and tb.tb_frame.f_code.co_filename != target_file:
        tb = tb.tb_next
    traceback.print_exception(
        type(exc), exc, tb or exc.__traceback__, file=sys.stderr
    )


def run_target(target: str, trace_path: str | None) -> int:
    """Execute one file as a fresh top-level module, tracing when asked.

    Returns the exit status the target earned: 0 on a clean finish, the
    SystemExit code when it exits explicitly, 1 on an uncaught exception or
    a syntax error, 2 when the target cannot be read at all.
    """
    target_abs = os.path.abspath(target)
    try:
        with open(target_abs, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"error: cannot read target: {exc}", file=sys.stderr)
        return 2

    module = os.path.splitext(os.path.basename(target_abs))[0]
    try:
        code = compile(source, target_abs, "exec")
        paths = definition_map(source, module)
    except SyntaxError as exc:
        for line in traceback.format_exception_only(type(exc), exc):
            sys.stderr.write(line)
        return 1

    globs = {
        "__name__": module,
        "__file__": target_abs,
        "__doc__": None,
        "__package__": None,
        "__spec__": None,
        "__builtins__": __builtins__,
    }
    old_argv = sys.argv
    sys.argv = [target_abs]
    session = None
    out = None
    try:
        if trace_path is not None:
            # line buffered: a crash or kill loses at most the torn tail
            out = open(trace_path, "w", encoding="utf-8", buffering=1)
            session = TraceSession(target_abs, module, paths, out)
            session.start()
        try:
            exec(code, globs)
        except SystemExit as exc:
            return exit_status_of(exc)
        except Exception as exc:
            print_target_traceback(exc, target_abs)
            return 1
        return 0
    finally:
        if session is not None:
            session.stop()
        if out is not None:
            out.close()
        sys.argv = old_argv


def run_traced_python(target_path, trace_out_path, timeout_s) -> int:
    """Run one target in a fresh interpreter process under this tracer.

    Returns the process exit status. Raises subprocess.TimeoutExpired when
    the deadline passes (the process has already been killed by then); the
    trace written so far stays on disk. One traced program per process: to
    run many targets concurrently, start many processes.
    """
    env = dict(os.environ)
    env[TRACE_ENV_VAR] = str(trace_out_path)
    proc = subprocess.run(
        [sys.executable, "-m", "callwitness_pytrace", str(target_path)],
        env=env,
        timeout=timeout_s,
    )
    return proc.returncode


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="callwitness-pytrace",
        description="run a single-file Python program, writing an in-file "
        "call trace to the path in $" + TRACE_ENV_VAR,
    )
    parser.add_argument("target", help="path of the Python file to run")
    args = parser.parse_args(argv)
    return run_target(args.target, os.environ.get(TRACE_ENV_VAR))
