"""Command line: run a model file, write a benchmark model, or sweep a parameter."""

import argparse
import copy
import json
import math
import os
import sys

from . import model_io
from .errors import ModelError, NonConvergence, SingularJacobian
from .solver import run_analysis

EXIT_OK, EXIT_INPUT, EXIT_DIVERGED = 0, 1, 2


def _value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _params(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise ModelError(f"parameter {item!r} is not of the form name=value")
        name, val = item.split("=", 1)
        out[name] = _value(val)
    return out


def _generate(name, params):
    if name == "cantilever_moment":
        return model_io.gen_cantilever_moment(**params)
    if name == "williams_toggle":
        if "psi" not in params:
            raise ModelError("williams_toggle needs psi=<radians>")
        return model_io.gen_williams_toggle(**params)
    if name in ("square_quarter", "diamond_quarter", "buckling_cantilever"):
        return model_io.gen_frames(**params)[name]
    if name == "honeycomb":
        return model_io.gen_honeycomb(model_io.HoneycombSpec(**params))
    if name == "periodic_cell":
        return model_io.gen_periodic_cell(**params)
    raise ModelError(f"unknown benchmark {name!r}")


BENCHMARKS = ("cantilever_moment", "williams_toggle", "square_quarter", "diamond_quarter",
              "buckling_cantilever", "honeycomb", "periodic_cell")


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _run_model(model, out):
    history = run_analysis(model)
    if out:
        os.makedirs(out, exist_ok=True)
        for fmt in ("csv_history", "csv_shapes", "csv_eigen"):
            model_io.emit_results(history, model, fmt, os.path.join(out, fmt[4:] + ".csv"))
    return history


def _report(history, label=""):
    prefix = f"{label}: " if label else ""
    if history.converged:
        last = history[-1] if history else None
        its = last.iterations if last else 0
        print(f"{prefix}converged in {len(history)} steps (last step {its} iterations)")
        return EXIT_OK
    print(f"{prefix}stopped at step {len(history) - 1}: {history.error}", file=sys.stderr)
    return EXIT_DIVERGED


def _set_path(doc, path, value):
    parts = path.split(".")
    targets = [doc]
    for p in parts[:-1]:
        nxt = []
        for t in targets:
            if p == "*":
                nxt.extend(t)
            elif isinstance(t, list):
                nxt.append(t[int(p)])
            else:
                nxt.append(t.setdefault(p, {}))
        targets = nxt
    last = parts[-1]
    for t in targets:
        if isinstance(t, list):
            t[int(last)] = value
        else:
            t[last] = value


def cmd_run(args):
    model = model_io.parse_model(_load(args.model))
    return _report(_run_model(model, args.out))


def cmd_generate(args):
    doc = _generate(args.benchmark, _params(args.params))
    model_io.model_from_dict(doc)
    text = model_io.dumps(doc)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_sweep(args):
    base = json.loads(_load(args.model))
    path, _, values = args.param.partition("=")
    if not path or not values:
        raise ModelError("--param expects <path>=<v1>,<v2>,...")
    code = EXIT_OK
    for raw in values.split(","):
        val = _value(raw)
        doc = copy.deepcopy(base)
        try:
            _set_path(doc, path, val)
        except (KeyError, IndexError, ValueError, TypeError) as err:
            raise ModelError(f"cannot set {path}: {err}") from None
        model = model_io.model_from_dict(doc)
        out = os.path.join(args.out, f"{path}={raw}") if args.out else None
        code = max(code, _report(_run_model(model, out), f"{path}={raw}"))
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="shootbeam", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="solve a model file")
    r.add_argument("model")
    r.add_argument("--out", help="directory for the CSV results")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("generate", help="write a benchmark model file")
    g.add_argument("benchmark", choices=BENCHMARKS)
    g.add_argument("params", nargs="*", help="name=value overrides")
    g.add_argument("-o", "--output", help="output file (stdout if omitted)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sweep", help="solve a model for several values of one entry")
    s.add_argument("model")
    s.add_argument("--param", required=True, help="dotted path and values, e.g. elements.*.N=10,20")
    s.add_argument("--out", help="root directory; one subdirectory per value")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NonConvergence, SingularJacobian) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ModelError, OSError, TypeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
