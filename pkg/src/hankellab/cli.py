"""Command-line surface: reproducible runs with CSV/JSON reports.

Exit codes: 0 pass, 1 check failure, 2 usage or validation error,
3 numerical non-convergence.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .asymptotics import c_pm_continuous, c_pm_discrete, c_pm_matrix
from .hankel import LogGrid, build_truncated, discretize_integral
from .kernels import (
    AsymContinuous,
    AsymDiscrete,
    ContinuousKernel,
    kernel_from_json,
    smooth_cutoffs,
)
from .laplace import lemma_L_check, lemma_M_check
from .quadrature import QuadratureError
from .reports import atomic_write_text, csv_text, json_text, report, spectrum_csv
from .spectra import SolverError, dense_eigs, lanczos_extreme
from .verify import (
    fit_coefficient,
    hs_identity,
    orthogonality_check,
    convergence_study,
    psido_equivalence_run,
    spectrum_of_kernel,
    widom_slope,
)

PASS, FAIL, USAGE, NOCONV = 0, 1, 2, 3


def _emit(obj, out):
    text = json_text(obj)
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _config(args):
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def _load_kernel(args):
    if getattr(args, "kernel_file", None):
        with open(args.kernel_file, encoding="utf-8") as fh:
            return kernel_from_json(fh.read())
    if getattr(args, "kernel", None):
        return kernel_from_json(args.kernel)
    raise SystemExit("a kernel specification is required (--kernel or --kernel-file)")


def cmd_coeff(args):
    if args.matrix:
        with open(args.matrix, encoding="utf-8") as fh:
            spec = json.load(fh)
        rep = c_pm_matrix(spec["b0"], spec["binf"], spec["alpha"])
    elif args.b0 is not None or args.binf is not None:
        rep = c_pm_continuous(
            AsymContinuous(args.alpha, args.b0 or 0.0, args.binf or 0.0)
        )
    else:
        rep = c_pm_discrete(AsymDiscrete(args.alpha, args.b1, args.bm1))
    _emit(report(rep.as_dict(), _config(args), __version__), args.out)
    return PASS


def cmd_spectrum(args):
    t0 = time.perf_counter()
    kern = _load_kernel(args)
    if isinstance(kern, ContinuousKernel):
        grid = LogGrid(args.grid_l, args.N)
        S = dense_eigs(discretize_integral(kern, grid))
    else:
        S = spectrum_of_kernel(
            kern,
            args.N,
            method=args.method,
            k=args.k,
            tol=args.tol,
            seed=args.seed,
            max_iter=args.max_iter,
        )
    runtime = time.perf_counter() - t0
    csv = spectrum_csv(S)
    summary = report(
        {
            "N": S.dim,
            "resolved_plus": len(S.lambda_plus),
            "resolved_minus": len(S.lambda_minus),
            "floor_plus": S.floor_plus,
            "floor_minus": S.floor_minus,
            "solver": S.meta,
        },
        _config(args),
        __version__,
        runtime_s=runtime,
    )
    if args.out_prefix:
        atomic_write_text(args.out_prefix + ".csv", csv)
        atomic_write_text(args.out_prefix + ".json", json_text(summary))
    else:
        sys.stdout.write(csv)
    return PASS if S.meta.get("converged", True) else NOCONV


def cmd_fit(args):
    lam_plus, lam_minus = [], []
    with open(args.csv, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        ip = header.index("lambda_plus")
        im = header.index("lambda_minus")
        for line in fh:
            cells = line.rstrip("\n").split(",")
            if cells[ip]:
                lam_plus.append(float(cells[ip]))
            if cells[im]:
                lam_minus.append(float(cells[im]))
    from .spectra import SpectrumResult

    S = SpectrumResult(
        lambda_plus=np.array(lam_plus),
        lambda_minus=np.array(lam_minus),
        residual_plus=np.zeros(len(lam_plus)),
        residual_minus=np.zeros(len(lam_minus)),
        dim=args.N or (2 * len(lam_plus)),
        floor_plus=0.0,
        floor_minus=0.0,
    )
    predicted = None
    if args.c_plus is not None or args.c_minus is not None:
        predicted = (args.c_plus, args.c_minus)
    fit = fit_coefficient(S, args.alpha, (args.n1, args.n2), predicted=predicted)
    _emit(report(fit.as_dict(), _config(args), __version__), args.out)
    return PASS


def cmd_verify_hs(args):
    kern = _load_kernel(args)
    lhs, rhs, rel = hs_identity(kern, args.N)
    ok = rel <= args.gate
    _emit(
        report(
            {"lhs": lhs, "rhs": rhs, "rel_err": rel, "gate": args.gate, "pass": ok},
            _config(args),
            __version__,
        ),
        args.out,
    )
    return PASS if ok else FAIL


def cmd_verify_laplace(args):
    ts = np.array([float(x) for x in args.t.split(",")])
    if args.side == "down":
        table = lemma_L_check(args.alpha, args.m, args.c, ts)
    else:
        table = lemma_M_check(args.alpha, args.m, args.c, ts)
    ok = bool(np.all(table["deviation"] <= table["log_band"]))
    dev = table["deviation"]
    trend = bool(dev[-1] <= dev[0])
    text = csv_text(
        ["t", "value", "predicted", "ratio", "deviation", "log_band"],
        [table[k] for k in ("t", "value", "predicted", "ratio", "deviation", "log_band")],
    )
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return PASS if ok and trend else FAIL


def cmd_verify_psido(args):
    p = AsymContinuous(args.alpha, args.b0, args.binf)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cmp = psido_equivalence_run(
            p,
            L=args.grid_l,
            grid_n=args.N,
            xhalf=args.xhalf,
            M=args.M,
            k=args.k,
            seed=args.seed,
        )
    ok = cmp["max_rel_diff"] <= args.gate
    _emit(
        report(
            {
                "max_rel_diff": cmp["max_rel_diff"],
                "gate": args.gate,
                "pass": ok,
                "rows": cmp["rows"],
            },
            _config(args),
            __version__,
        ),
        args.out,
    )
    return PASS if ok else FAIL


def cmd_verify_orthogonality(args):
    p = AsymDiscrete(args.alpha, args.b1, args.bm1)
    eps = [float(x) for x in args.eps.split(",")]
    rows = orthogonality_check(
        p, eps, N=args.N, method=args.method, k=args.k, seed=args.seed
    )
    norm = rows["normalized_plus"]
    ok = all(b <= a + 1e-12 for a, b in zip(norm[:-1], norm[1:]))
    _emit(report({"rows": rows, "pass": ok}, _config(args), __version__), args.out)
    return PASS if ok else FAIL


def cmd_widom(args):
    res = widom_slope(args.gamma, N=args.N, window=(args.n1, args.n2))
    ok = res["rel_dev"] <= args.gate
    res["pass"] = ok
    _emit(report(res, _config(args), __version__), args.out)
    return PASS if ok else FAIL


def cmd_study(args):
    p = AsymDiscrete(args.alpha, args.b1, args.bm1)
    sizes = [int(x) for x in args.sizes.split(",")]
    t0 = time.perf_counter()
    study = convergence_study(p, sizes, seed=args.seed, jobs=args.jobs)
    payload = {
        "N": study["N"],
        "c_plus_predicted": study["c_plus_predicted"],
        "c_minus_predicted": study["c_minus_predicted"],
        "rel_dev_plus": study["rel_dev_plus"],
        "interlacing_ok": study["interlacing_ok"],
        "fits": [f.as_dict() if f is not None else None for f in study["fits"]],
    }
    _emit(
        report(payload, _config(args), __version__, runtime_s=time.perf_counter() - t0),
        args.out,
    )
    return PASS if study["interlacing_ok"] else FAIL


def build_parser():
    ap = argparse.ArgumentParser(prog="hankellab", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--out", default=None, help="write the JSON report here")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("coeff", help="closed-form asymptotic coefficients")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--b1", type=float, default=0.0)
    sp.add_argument("--bm1", type=float, default=0.0)
    sp.add_argument("--b0", type=float, default=None)
    sp.add_argument("--binf", type=float, default=None)
    sp.add_argument("--matrix", default=None, help="JSON file with alpha/b0/binf matrices")
    add_common(sp)
    sp.set_defaults(func=cmd_coeff)

    sp = sub.add_parser("spectrum", help="eigenvalues of a truncated operator")
    sp.add_argument("--kernel", default=None, help="inline JSON kernel spec")
    sp.add_argument("--kernel-file", default=None)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--method", default="auto", choices=["auto", "dense", "lanczos"])
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--max-iter", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--grid-l", type=float, default=14.0, help="log half-width for integral kernels")
    sp.add_argument("--out-prefix", default=None)
    add_common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("fit", help="asymptotic coefficient fit from a spectrum CSV")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n1", type=int, required=True)
    sp.add_argument("--n2", type=int, required=True)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--c-plus", type=float, default=None)
    sp.add_argument("--c-minus", type=float, default=None)
    add_common(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("verify-hs", help="finite Frobenius identity")
    sp.add_argument("--kernel", default=None)
    sp.add_argument("--kernel-file", default=None)
    sp.add_argument("--N", type=int, default=1024)
    sp.add_argument("--gate", type=float, default=1e-10)
    add_common(sp)
    sp.set_defaults(func=cmd_verify_hs)

    sp = sub.add_parser("verify-laplace", help="transform asymptotics ratio table")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--side", choices=["down", "up"], required=True)
    sp.add_argument("--t", required=True, help="comma separated evaluation points")
    add_common(sp)
    sp.set_defaults(func=cmd_verify_laplace)

    sp = sub.add_parser("verify-psido", help="integral vs Fourier discretization")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--b0", type=float, default=1.0)
    sp.add_argument("--binf", type=float, default=1.0)
    sp.add_argument("--grid-l", type=float, default=14.0)
    sp.add_argument("--N", type=int, default=2048)
    sp.add_argument("--xhalf", type=float, default=40.0)
    sp.add_argument("--M", type=int, default=2**14)
    sp.add_argument("--k", type=int, default=10)
    sp.add_argument("--gate", type=float, default=0.03)
    add_common(sp)
    sp.set_defaults(func=cmd_verify_psido)

    sp = sub.add_parser("verify-orthogonality", help="counting-function additivity")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--b1", type=float, default=1.0)
    sp.add_argument("--bm1", type=float, default=1.0)
    sp.add_argument("--eps", default="0.05,0.02,0.01")
    sp.add_argument("--N", type=int, default=8192)
    sp.add_argument("--method", default="auto")
    sp.add_argument("--k", type=int, default=None)
    add_common(sp)
    sp.set_defaults(func=cmd_verify_orthogonality)

    sp = sub.add_parser("widom", help="exponential-regime slope fit")
    sp.add_argument("--gamma", type=float, default=2.0)
    sp.add_argument("--N", type=int, default=512)
    sp.add_argument("--n1", type=int, default=4)
    sp.add_argument("--n2", type=int, default=12)
    sp.add_argument("--gate", type=float, default=0.15)
    add_common(sp)
    sp.set_defaults(func=cmd_widom)

    sp = sub.add_parser("study", help="convergence study over dyadic truncations")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--b1", type=float, default=1.0)
    sp.add_argument("--bm1", type=float, default=0.0)
    sp.add_argument("--sizes", default="1024,2048,4096")
    sp.add_argument("--jobs", type=int, default=1)
    add_common(sp)
    sp.set_defaults(func=cmd_study)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError, SystemExit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (QuadratureError, SolverError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NOCONV


if __name__ == "__main__":
    sys.exit(main())
