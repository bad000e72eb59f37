"""Command-line entry points: depth, chen, melnikov, examples.

All file I/O is JSON with a versioned "schema" field; reruns with the same
configuration produce byte-identical reports.  Report paths additionally
get a CSV table and a rendered PNG figure next to the JSON file.

Exit codes: 0 success / depth determined, 2 malformed input, 3 depth
undetermined at the requested truncation, 4 resource cap hit.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path as FilePath

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .depth import ProblemInstance, compute_depth, DepthError, ResourceLimit
from .series import TruncationContext
from .words import WordError
from .chen import Path, OneForm, chen_transport, ChenError
from .melnikov import (
    PlanarSystem,
    TransversalSpec,
    measure_melnikov,
    MelnikovError,
)
from . import fixtures

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_UNDETERMINED = 3
EXIT_RESOURCE = 4


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read {path}: {e}")


class SchemaError(ValueError):
    pass


def _dump_json(data, path):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _save_figure(fig, out_json_path):
    png = FilePath(out_json_path).with_suffix(".png")
    fig.savefig(png, dpi=120, metadata={"Software": "orbitdepth"})
    plt.close(fig)
    return png


# -- depth -----------------------------------------------------------------


def run_depth(args) -> int:
    if args.fixture:
        if args.fixture not in fixtures.DEPTH_INSTANCES:
            raise SchemaError(f"unknown fixture {args.fixture!r}")
        data = dict(fixtures.DEPTH_INSTANCES[args.fixture][0])
    else:
        data = _load_json(args.input)
    if args.kmax is not None:
        data["kmax"] = args.kmax
    if args.mode is not None:
        data["mode"] = args.mode
    try:
        inst = ProblemInstance.from_json(data)
    except (KeyError, TypeError, DepthError, WordError) as e:
        raise SchemaError(f"bad instance: {e}")
    try:
        report = compute_depth(inst)
    except ResourceLimit as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    print(report.table())
    if args.out:
        _dump_json(report.to_json(), args.out)
        _write_depth_csv(report, FilePath(args.out).with_suffix(".csv"))
        fig, ax = plt.subplots(figsize=(6, 3.5))
        grades = [g.grade for g in report.grades]
        ax.bar(grades, [g.dim_image for g in report.grades], color="tab:blue")
        ax.set_xlabel("grade")
        ax.set_ylabel("dim im(phi)")
        ax.set_title(f"graded orbit homology, k = {report.k_label()}")
        _save_figure(fig, args.out)
    return EXIT_OK if report.k is not None else EXIT_UNDETERMINED


def _write_depth_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["grade", "dim_orbit", "dim_commutator", "dim_image", "contained", "torsion"])
        for g in report.grades:
            w.writerow([g.grade, g.dim_orbit, g.dim_commutator, g.dim_image,
                        g.contained, ";".join(map(str, g.torsion or []))])


# -- chen ------------------------------------------------------------------


def run_chen(args) -> int:
    pdata = _load_json(args.paths)
    fdata = _load_json(args.forms)
    try:
        forms = [OneForm.from_json(f) for f in fdata["forms"]]
        paths = [(p.get("name", f"path{i}"), Path.from_json(p, tol_join=args.tol_join))
                 for i, p in enumerate(pdata["paths"])]
    except (KeyError, TypeError, ChenError) as e:
        raise SchemaError(f"bad path/form file: {e}")
    ctx = TruncationContext(len(forms), args.order)
    report = {"schema": "orbitdepth/chen-report/v1", "order": args.order, "tol": args.tol,
              "paths": []}
    rows = []
    try:
        for name, path in paths:
            state = chen_transport(path, forms, ctx, tol=args.tol, pole_margin=args.pole_margin)
            coeffs = []
            for w, c in state.series.items():
                if not w:
                    continue
                c = complex(c)
                coeffs.append({"word": list(w), "re": c.real, "im": c.imag})
                rows.append([name, "".join(map(str, w)), c.real, c.imag])
            report["paths"].append({"name": name, "coefficients": coeffs})
    except ChenError as e:
        raise SchemaError(f"transport failed: {e}")
    for entry in report["paths"]:
        print(f"path {entry['name']}:")
        for c in entry["coefficients"]:
            print(f"  {''.join(map(str, c['word'])):>{args.order}s}  {c['re']: .12e}  {c['im']: .12e}")
    if args.out:
        _dump_json(report, args.out)
        with open(FilePath(args.out).with_suffix(".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["path", "word", "re", "im"])
            w.writerows(rows)
        fig, ax = plt.subplots(figsize=(7, 3.5))
        for entry in report["paths"]:
            mags = [abs(complex(c["re"], c["im"])) for c in entry["coefficients"]]
            ax.plot(range(1, len(mags) + 1), mags, marker="o", label=entry["name"])
        ax.set_yscale("log")
        ax.set_xlabel("coefficient index (length-lex order)")
        ax.set_ylabel("|coefficient|")
        ax.legend(fontsize=7)
        _save_figure(fig, args.out)
    return EXIT_OK


# -- melnikov --------------------------------------------------------------


def _parse_grid(spec, kind):
    try:
        a, b, c = spec.split(":")
        if kind == "t":
            lo, hi, m = float(a), float(b), int(c)
            if m < 1:
                raise ValueError
            if m == 1:
                return [lo]
            return [lo + (hi - lo) * i / (m - 1) for i in range(m)]
        e0, r, k = float(a), float(b), int(c)
        if e0 <= 0 or r <= 0 or k < 1:
            raise ValueError
        return [e0 * r**j for j in range(k)]
    except ValueError:
        raise SchemaError(f"bad grid {spec!r}; expected a:b:m")


def run_melnikov(args) -> int:
    data = _load_json(args.system)
    try:
        system = PlanarSystem.from_json(data)
        tau = TransversalSpec.from_json(data["transversal"])
    except (KeyError, TypeError, MelnikovError) as e:
        raise SchemaError(f"bad system file: {e}")
    t_grid = _parse_grid(args.t_grid, "t")
    eps_grid = _parse_grid(args.eps_grid, "eps")
    report = {"schema": "orbitdepth/melnikov-report/v1", "order": args.order,
              "tol": args.tol, "fits": []}
    rows = []
    try:
        results = []
        for t in t_grid:
            samples, fit = measure_melnikov(system, tau, t, eps_grid,
                                            order=args.order, tol=args.tol)
            results.append((t, samples, fit))
            report["fits"].append(fit.to_json())
            for s in samples:
                rows.append([s.t, s.eps, s.delta, s.return_time])
    except MelnikovError as e:
        print(f"melnikov run failed: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    for t, _, fit in results:
        mu = fit.mu if fit.mu is not None else "below noise floor"
        print(f"t={t:g}: mu={mu} coefficients={['%.6e' % c for c in fit.coefficients]}")
    if args.out:
        _dump_json(report, args.out)
        with open(FilePath(args.out).with_suffix(".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "eps", "delta", "return_time"])
            w.writerows(rows)
        fig, ax = plt.subplots(figsize=(6, 4))
        for t, samples, fit in results:
            eps = [s.eps for s in samples]
            ax.loglog(eps, [abs(s.delta) for s in samples], "o", label=f"t={t:g}")
            pred = [abs(sum(c * e**(i + 1) for i, c in enumerate(fit.coefficients)))
                    for e in eps]
            ax.loglog(eps, pred, "-", alpha=0.6)
        ax.set_xlabel("eps")
        ax.set_ylabel("|displacement|")
        ax.legend(fontsize=7)
        _save_figure(fig, args.out)
    return EXIT_OK


# -- examples --------------------------------------------------------------


def run_examples(args) -> int:
    listing = fixtures.fixture_listing()
    if args.json:
        print(json.dumps({"schema": "orbitdepth/examples/v1", "fixtures": listing},
                         indent=2, sort_keys=True))
    else:
        for f in listing:
            print(f"{f['name']:<18s} {f['kind']:<9s} expected: {f['expected']:<40s} [{f['status']}]")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="orbitdepth",
                                description="orbit-depth invariants and Melnikov validation")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("depth", help="compute depth invariants of an instance")
    d.add_argument("--input", help="instance JSON file")
    d.add_argument("--fixture", help="bundled instance name instead of --input")
    d.add_argument("--kmax", type=int, default=None)
    d.add_argument("--mode", choices=["rational", "integral", "both"], default=None)
    d.add_argument("--out", help="report JSON path (CSV and PNG written alongside)")
    d.set_defaults(func=run_depth)

    c = sub.add_parser("chen", help="transport iterated integrals along paths")
    c.add_argument("--paths", required=True)
    c.add_argument("--forms", required=True)
    c.add_argument("--order", type=int, default=4)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--tol-join", type=float, default=1e-9)
    c.add_argument("--pole-margin", type=float, default=1e-6)
    c.add_argument("--out")
    c.set_defaults(func=run_chen)

    m = sub.add_parser("melnikov", help="measure displacement and fit Melnikov coefficients")
    m.add_argument("--system", required=True)
    m.add_argument("--t-grid", required=True, help="a:b:m linear grid")
    m.add_argument("--eps-grid", required=True, help="e0:r:k geometric grid")
    m.add_argument("--order", type=int, default=3)
    m.add_argument("--tol", type=float, default=1e-12)
    m.add_argument("--out")
    m.set_defaults(func=run_melnikov)

    e = sub.add_parser("examples", help="list bundled fixtures")
    e.add_argument("--list", action="store_true", default=True)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=run_examples)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "depth" and not args.input and not args.fixture:
        print("depth needs --input or --fixture", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except ResourceLimit as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
