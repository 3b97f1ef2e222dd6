"""Command-line front end.

Subcommands ``analyze``, ``witness``, ``project`` and ``simulate``.  Machine
readable output goes to stdout, diagnostics to stderr.

Exit codes: 0 ok, 2 parse error, 3 invalid covariance matrix, 4 dimension or
split mismatch, 5 uncertified witness, 6 singular projection, 7 invalid
simulation plan.
"""
import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from . import tolerances as tol
from .covariance import (
    CovarianceMatrix,
    GaussianState,
    convert_convention,
    is_pure,
    is_squeezed,
    simon_invariants,
    symplectic_eigenvalues,
    validate_cm,
)
from .entanglement import ModeSplit, log_negativity
from .exceptions import (
    CertificationError,
    DegenerateInputError,
    DimensionError,
    InvalidPlanError,
    SymmetryError,
    UncertaintyError,
)
from .fixtures import FIXTURES, get_fixture
from .gaussian_ops import coherent_project, homodyne_project, homodyne_project_limit, schur_project
from .measure_sim import STRATEGIES, compare_strategies
from .witnesses import (
    duan_scan,
    duan_witness,
    make_witness,
    minimal_witness_two_mode,
    witness_value,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID_CM = 3
EXIT_DIMENSION = 4
EXIT_UNCERTIFIED = 5
EXIT_SINGULAR = 6
EXIT_PLAN = 7

SEED_ENV = "GAUSSENT_SEED"
DEFAULT_SEED = 12345
DEFAULT_BUDGETS = "100,1000,10000,100000"


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# input

def _read_matrix_file(path):
    """Parse a JSON document or a CSV matrix; returns the payload dict."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE)
    digest = hashlib.sha256(raw).hexdigest()
    text = raw.decode("utf-8", errors="replace")
    if path.lower().endswith(".csv"):
        try:
            rows = [[float(x) for x in r] for r in csv.reader(io.StringIO(text)) if r]
        except ValueError as exc:
            raise CliError(f"bad CSV number in {path}: {exc}", EXIT_PARSE)
        return {"matrix": rows}, digest
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON in {path}: {exc}", EXIT_PARSE)
    if isinstance(doc, list):
        doc = {"matrix": doc}
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise CliError("JSON input needs a 'matrix' field", EXIT_PARSE)
    return doc, digest


def _matrix_from_payload(doc):
    try:
        M = np.array(doc["matrix"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise CliError(f"matrix is not numeric: {exc}", EXIT_PARSE)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2 or M.shape[0] == 0:
        raise CliError(f"matrix must be square with even size, got {M.shape}", EXIT_DIMENSION)
    if not np.all(np.isfinite(M)):
        raise CliError("matrix has non-finite entries", EXIT_PARSE)
    return M


def _parse_split(value, modes):
    if value is None:
        if modes < 2:
            return None
        return ModeSplit.default(modes)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        split = ModeSplit(int(value[0]), int(value[1]))
    else:
        split = ModeSplit.parse(str(value))
    if split.modes != modes:
        raise CliError(f"split {split} does not match {modes} modes", EXIT_DIMENSION)
    return split


def load_input(args):
    """Resolve ``--input``/``--fixture`` into (state, split, provenance)."""
    if getattr(args, "fixture", None):
        try:
            M = get_fixture(args.fixture)
        except KeyError as exc:
            raise CliError(str(exc), EXIT_PARSE)
        doc = {"matrix": M.tolist()}
        digest = hashlib.sha256(json.dumps(doc["matrix"]).encode()).hexdigest()
        source = f"fixture:{args.fixture}"
    elif getattr(args, "input", None):
        doc, digest = _read_matrix_file(args.input)
        M = _matrix_from_payload(doc)
        source = args.input
    else:
        raise CliError("one of --input or --fixture is required", EXIT_PARSE)
    M = np.array(doc["matrix"], dtype=float)
    convention = args.convention or doc.get("convention", "gamma")
    if convention not in ("gamma", "capital"):
        raise CliError(f"unknown convention {convention!r}", EXIT_PARSE)
    modes = M.shape[0] // 2
    try:
        cm = validate_cm(M, convention=convention)
    except (SymmetryError, UncertaintyError) as exc:
        raise CliError(f"invalid covariance matrix: {exc}", EXIT_INVALID_CM)
    d = np.array(doc.get("displacement") or np.zeros(2 * modes), dtype=float)
    if d.shape != (2 * modes,):
        raise CliError(f"displacement must have length {2 * modes}", EXIT_DIMENSION)
    if convention == "capital":
        # D = sigma d  =>  d = sigma^T D
        from .symplectic import build_sigma
        d = build_sigma(modes).T @ d
    try:
        split = _parse_split(args.split if args.split is not None else doc.get("split"), modes)
    except DimensionError as exc:
        raise CliError(str(exc), EXIT_DIMENSION)
    state = GaussianState(CovarianceMatrix(cm.gamma), d)
    prov = {"source": source, "input_sha256": digest, "convention": convention,
            "version": __version__}
    return state, split, prov


# output

def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def emit_json(doc, stream=None):
    stream = stream or sys.stdout
    # json writes shortest round-trip reprs, so matrices re-parse losslessly
    json.dump(_clean(doc), stream, indent=2, allow_nan=False)
    stream.write("\n")


def tolerance_block():
    return {
        "tol_symp": tol.TOL_SYMP, "tol_recon": tol.TOL_RECON, "tol_unc": tol.TOL_UNC,
        "tol_pure": tol.TOL_PURE, "tol_sym_relative": tol.TOL_SYM,
        "tol_entangled": tol.TOL_ENTANGLED, "tol_cert": tol.TOL_CERT,
        "pinv_rcond": tol.PINV_RCOND,
    }


# commands

def cmd_analyze(args):
    state, split, prov = load_input(args)
    g = np.asarray(state.cm.gamma)
    spec = symplectic_eigenvalues(g)
    report = {
        "command": "analyze",
        "modes": state.modes,
        "valid": True,
        "matrix": g,
        "displacement": state.displacement,
        "capital_matrix": convert_convention(g),
        "symplectic_spectrum": spec,
        "determinant": float(np.linalg.det(g)),
        "pure": is_pure(g),
        "squeezed": is_squeezed(g),
        "min_eigenvalue": float(np.linalg.eigvalsh(g)[0]),
    }
    if state.modes == 2:
        inv = simon_invariants(g)
        report["simon_invariants"] = {"a": inv.a, "b": inv.b, "cd": inv.cd,
                                      "det_gamma": inv.det_gamma}
    if split is not None:
        neg = log_negativity(g, split)
        report.update({
            "split": str(split),
            "pt_spectrum": neg.pt_spectrum,
            "ppt": not neg.entangled,
            "log_negativity": neg.log_negativity,
            "entangled": neg.entangled,
            "ppt_sufficient": neg.ppt_sufficient,
        })
    report["tolerances"] = tolerance_block()
    report["provenance"] = dict(prov, seed=None)
    emit_json(report)
    return EXIT_OK


def _witness_from_file(path, split):
    doc, _ = _read_matrix_file(path)
    Z = _matrix_from_payload(doc)
    try:
        return make_witness(Z, split, label=f"file:{os.path.basename(path)}")
    except CertificationError as exc:
        raise CliError(f"witness not certified: {exc}", EXIT_UNCERTIFIED)
    except DimensionError as exc:
        raise CliError(str(exc), EXIT_DIMENSION)


def _cert_dict(w):
    c = w.certificate
    return {"status": c.status, "min_eigenvalue": c.min_eigenvalue,
            "str_global": c.str_global, "str_split": c.str_split}


def _outcome_dict(o):
    return {"m": o.value, "expectation_with_displacement": o.expectation_with_displacement,
            "p_bound": o.p_bound, "logneg_lower_bound": o.logneg_lower_bound}


def cmd_witness(args):
    state, split, prov = load_input(args)
    g = np.asarray(state.cm.gamma)
    if split is None:
        raise CliError("witnesses need at least two modes", EXIT_DIMENSION)
    report = {"command": "witness", "split": str(split), "results": []}
    try:
        if args.minimal:
            if state.modes != 2:
                raise CliError("--minimal needs a two-mode state", EXIT_DIMENSION)
            w, m_min = minimal_witness_two_mode(g, split)
            out = witness_value(w, state)
            report["results"].append(dict(source="minimal", witness=w.matrix,
                                          certificate=_cert_dict(w), m_min=m_min,
                                          **_outcome_dict(out)))
        if args.duan is not None:
            if state.modes != 2:
                raise CliError("Duan witnesses need a two-mode state", EXIT_DIMENSION)
            if args.duan == "scan":
                scan = duan_scan(g)
                w = duan_witness(scan.a)
                out = witness_value(w, state)
                report["results"].append(dict(source="duan:scan", a=scan.a,
                                              grid_a=scan.grid_a, grid_min=scan.grid_value,
                                              certificate=_cert_dict(w), **_outcome_dict(out)))
            else:
                key, _, val = args.duan.partition("=")
                try:
                    a = float(val if key == "a" else key)
                except ValueError:
                    raise CliError(f"bad --duan value {args.duan!r}; use a=VALUE or scan",
                                   EXIT_PARSE)
                w = duan_witness(a)
                out = witness_value(w, state)
                report["results"].append(dict(source=f"duan:a={a!r}", a=a, witness=w.matrix,
                                              certificate=_cert_dict(w), **_outcome_dict(out)))
        if args.witness_file:
            w = _witness_from_file(args.witness_file, split)
            if w.matrix.shape != g.shape:
                raise CliError("witness and state differ in size", EXIT_DIMENSION)
            out = witness_value(w, state)
            report["results"].append(dict(source=w.label, certificate=_cert_dict(w),
                                          **_outcome_dict(out)))
    except CertificationError as exc:
        raise CliError(f"witness not certified: {exc}", EXIT_UNCERTIFIED)
    if not report["results"]:
        raise CliError("choose at least one of --minimal, --duan, --witness-file", EXIT_PARSE)
    report["tolerances"] = tolerance_block()
    report["provenance"] = dict(prov, seed=None)
    emit_json(report)
    return EXIT_OK


def cmd_project(args):
    state, split, prov = load_input(args)
    if split is None:
        raise CliError("projection needs at least two modes", EXIT_DIMENSION)
    measured = list(range(split.n_a, split.modes))
    kind = args.kind
    try:
        if kind == "coherent":
            res = coherent_project(state, measured=measured)
        elif kind.startswith("homodyne:"):
            eps = kind.split(":", 1)[1]
            if eps == "limit":
                res = homodyne_project_limit(state, measured=measured)
            else:
                try:
                    eps = float(eps)
                except ValueError:
                    raise CliError(f"bad homodyne width {eps!r}", EXIT_PARSE)
                res = homodyne_project(state, eps, measured=measured)
        elif kind.startswith("schur:"):
            doc, _ = _read_matrix_file(kind.split(":", 1)[1])
            T = _matrix_from_payload(doc)
            conv = doc.get("convention", "gamma")
            try:
                target = validate_cm(T, convention=conv)
            except (SymmetryError, UncertaintyError) as exc:
                raise CliError(f"invalid target covariance matrix: {exc}", EXIT_INVALID_CM)
            d_w = doc.get("displacement")
            res = schur_project(state, target, d_w, measured=measured)
        else:
            raise CliError(f"unknown projection kind {kind!r}", EXIT_PARSE)
    except DegenerateInputError as exc:
        raise CliError(f"singular projection: {exc}", EXIT_SINGULAR)
    except DimensionError as exc:
        raise CliError(str(exc), EXIT_DIMENSION)
    except UncertaintyError as exc:
        raise CliError(f"projection produced an invalid matrix: {exc}", EXIT_INVALID_CM)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE)
    report = {
        "command": "project", "kind": kind, "measured_modes": list(res.measured_modes),
        "matrix": res.cm.matrix, "displacement": res.displacement, "convention": "gamma",
        "tolerances": tolerance_block(), "provenance": dict(prov, seed=None),
    }
    emit_json(report)
    return EXIT_OK


def _parse_budgets(text):
    try:
        out = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"bad --budgets {text!r}", EXIT_PLAN)
    if not out:
        raise CliError("no budgets given", EXIT_PLAN)
    return out


def cmd_simulate(args):
    state, split, prov = load_input(args)
    if state.modes != 2:
        raise CliError("simulation needs a two-mode truth", EXIT_DIMENSION)
    budgets = _parse_budgets(args.budgets)
    strategies = STRATEGIES if args.strategy == "both" else (
        ("ten_entries",) if args.strategy == "ten" else ("nine_kinds",))
    try:
        comp = compare_strategies(state.cm.gamma, budgets, args.reps, args.seed,
                                  sampler=args.sampler, strategies=strategies)
    except InvalidPlanError as exc:
        raise CliError(f"invalid plan: {exc}", EXIT_PLAN)
    text = comp.to_csv()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    if args.format == "csv":
        sys.stdout.write(text)
    else:
        rows = []
        for row, (ten, nine) in zip(comp.rows, comp.reports):
            entry = {"total_samples": row.total_samples, "log10_n": row.log10_n}
            for name, rep in (("ten", ten), ("nine", nine)):
                if rep is None:
                    continue
                entry[name] = {
                    "delta": rep.deviation, "mean_pt_min": rep.mean_pt_min,
                    "samples_per_kind": rep.plan.samples_per_kind,
                    "nan_repetitions": rep.n_nan, "invalid_estimates": rep.n_invalid,
                    "sign_resolved_fraction": float(np.mean(rep.sign_ambiguity_resolved)),
                }
            rows.append(entry)
        exact = comp.reports[0][0] or comp.reports[0][1]
        emit_json({
            "command": "simulate", "repetitions": args.reps, "sampler": args.sampler,
            "exact_pt_min": exact.exact_pt_min, "rows": rows, "csv": text,
            "tolerances": tolerance_block(), "provenance": dict(prov, seed=args.seed),
        })
    return EXIT_OK


# parser

def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _default_seed():
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return _seed(env)
    except argparse.ArgumentTypeError:
        return DEFAULT_SEED


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", help="matrix file (.json or .csv)")
    src.add_argument("--fixture", choices=sorted(FIXTURES), help="built-in matrix")
    common.add_argument("--split", default=None, help="bipartition A:B (default 1:N-1)")
    common.add_argument("--convention", choices=("gamma", "capital"), default=None,
                        help="convention of the input matrix (default gamma)")
    common.add_argument("--seed", type=_seed, default=_default_seed(),
                        help=f"RNG seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="gaussent", description="Gaussian covariance-matrix toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="validity, spectra, entanglement")

    w = sub.add_parser("witness", parents=[common], help="evaluate entanglement witnesses")
    w.add_argument("--duan", metavar="a=VALUE|scan", help="Duan witness or scan over a")
    w.add_argument("--minimal", action="store_true", help="minimal two-mode witness")
    w.add_argument("--witness-file", help="witness matrix file to certify and evaluate")

    pr = sub.add_parser("project", parents=[common], help="measure party B")
    pr.add_argument("--kind", default="coherent",
                    help="coherent | homodyne:EPS | homodyne:limit | schur:FILE")

    s = sub.add_parser("simulate", parents=[common], help="ten-vs-nine Monte-Carlo")
    s.add_argument("--budgets", default=DEFAULT_BUDGETS, help="comma-separated totals")
    s.add_argument("--reps", type=int, default=200, help="repetitions per budget")
    s.add_argument("--strategy", choices=("both", "ten", "nine"), default="both")
    s.add_argument("--sampler", choices=("normal", "chi2", "exact"), default="normal")
    s.add_argument("--output", help="also write the CSV to this path")
    return p


COMMANDS = {"analyze": cmd_analyze, "witness": cmd_witness,
            "project": cmd_project, "simulate": cmd_simulate}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"gaussent: {exc}", file=sys.stderr)
        return exc.code
    except InvalidPlanError as exc:
        print(f"gaussent: invalid plan: {exc}", file=sys.stderr)
        return EXIT_PLAN
    except DimensionError as exc:
        print(f"gaussent: {exc}", file=sys.stderr)
        return EXIT_DIMENSION


if __name__ == "__main__":
    sys.exit(main())
