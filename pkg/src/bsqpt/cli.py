"""Command-line front end for the filter tomography pipeline.

Exit codes: 0 success, 2 input validation failure, 3 I/O failure,
4 numerical non-convergence (the output file is still written). Every
command is deterministic given its flags, including ``--seed``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import fileio
from .bases import BASIS_KINDS, build_basis
from .bsfilter import hom_dip, hom_visibility, kraus_pair
from .channel import ProcessMatrix, apply_process_matrix, transform_process_matrix
from .fileio import FileFormatError
from .fitting import FitConfig, fit, model_chi
from .linalg import dagger, project_to_psd
from .tomography import build_input_set, reconstruct_process, simulate_counts

log = logging.getLogger("bsqpt")


def _cmd_simulate(args: argparse.Namespace) -> int:
    fp, _ = fileio.read_params(args.params)
    counts = simulate_counts(
        kraus_pair(fp),
        build_input_set(),
        total_scale=args.total_scale,
        noise=args.noise,
        seed=args.seed,
    )
    fileio.write_counts(args.counts_out, counts)
    return 0


def _cmd_reconstruct(args: argparse.Namespace) -> int:
    table = fileio.read_counts(args.counts)
    chi = reconstruct_process(table, build_input_set())
    if args.psd_project:
        chi = ProcessMatrix("S", project_to_psd(chi.m))
    chi = transform_process_matrix(chi, args.basis)
    fileio.write_matrix(args.out, chi.m, chi.basis)
    return 0


def _read_chi(path: str) -> ProcessMatrix:
    basis, m = fileio.read_matrix(path)
    if basis == fileio.STATE_TAG or m.shape != (16, 16):
        raise FileFormatError(f"{path}: expected a 16x16 process matrix")
    if np.max(np.abs(m - dagger(m))) > 1e-6 * max(1.0, float(np.max(np.abs(m)))):
        raise FileFormatError(f"{path}: matrix is not Hermitian")
    return ProcessMatrix(basis, m)


def _cmd_fit(args: argparse.Namespace) -> int:
    chi = _read_chi(args.chi)
    cfg = FitConfig(multistart=args.multistart, seed=args.seed, max_iterations=args.max_iter)
    result = fit(chi, cfg)
    fp = result.params
    payload = {
        "T": fp.T,
        "R": fp.R,
        "ratio_RT": fp.ratio_rt,
        "theta1": fp.theta1,
        "theta2": fp.theta2,
        "p": fp.p,
        "scale": fp.scale,
        "residual": result.residual,
        "fidelity": result.fidelity,
        "n_evaluations": result.n_evaluations,
        "converged": result.converged,
    }
    meas_norm = float(np.linalg.norm(chi.m))
    if meas_norm > 0.0 and result.residual > 0.02 * meas_norm:
        payload["warning"] = (
            "model mismatch: residual is "
            f"{result.residual / meas_norm:.1%} of the matrix norm"
        )
    if not result.converged:
        payload["warning"] = "no simplex start converged; best effort result"
    fileio.write_fit_report(args.out, payload)
    if not result.converged:
        log.warning("fit did not converge")
        return 4
    return 0


def _cmd_homdip(args: argparse.Namespace) -> int:
    fp, temporal = fileio.read_params(args.params)
    if temporal is None:
        raise FileFormatError(
            f"{args.params}: dip simulation needs the temporal form (tau_fs, tau_c_fs, mu)"
        )
    if args.steps < 2:
        raise FileFormatError("need at least 2 grid steps")
    if not args.tau_max > args.tau_min:
        raise FileFormatError("need tau_max > tau_min")
    grid = np.linspace(args.tau_min, args.tau_max, args.steps)
    curve = hom_dip(fp, grid, temporal.tau_c_fs, temporal.mu)
    vis = hom_visibility(fp.T, fp.R, temporal.mu)
    lines = [f"# visibility = {float(vis)!r}", "tau_fs,rate"]
    lines += [f"{float(tau)!r},{float(rate)!r}" for tau, rate in curve]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def _cmd_transform(args: argparse.Namespace) -> int:
    chi = _read_chi(args.chi)
    out = transform_process_matrix(chi, args.to)
    fileio.write_matrix(args.out, out.m, out.basis)
    return 0


def _cmd_choi(args: argparse.Namespace) -> int:
    fp, _ = fileio.read_params(args.params)
    chi = model_chi(fp, args.basis)
    fileio.write_matrix(args.out, chi.m, chi.basis)
    return 0


def _cmd_apply(args: argparse.Namespace) -> int:
    chi = _read_chi(args.chi)
    tag, rho = fileio.read_matrix(args.state)
    if tag != fileio.STATE_TAG or rho.shape != (4, 4):
        raise FileFormatError(f"{args.state}: expected a 4x4 state matrix tagged 'state'")
    out = apply_process_matrix(chi, build_basis(chi.basis), rho)
    fileio.write_matrix(args.out, out, fileio.STATE_TAG)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsqpt",
        description="Simulate, reconstruct and fit a two-qubit beamsplitter state filter.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("THREADS", "1")),
        help="worker threads (accepted for compatibility; computation is single-threaded)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write the coincidence count table of a filter")
    p.add_argument("--params", required=True)
    p.add_argument("--counts-out", required=True)
    p.add_argument("--noise", choices=["poisson"], default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--total-scale", type=float, default=1.0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconstruct", help="reconstruct a process matrix from counts")
    p.add_argument("--counts", required=True)
    p.add_argument("--basis", choices=list(BASIS_KINDS), default="S")
    p.add_argument("--out", required=True)
    p.add_argument("--psd-project", action="store_true")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("fit", help="fit the decoherence model to a process matrix")
    p.add_argument("--chi", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--multistart", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=2000)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("homdip", help="write the coincidence dip curve over delay")
    p.add_argument("--params", required=True)
    p.add_argument("--tau-min", type=float, required=True)
    p.add_argument("--tau-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_homdip)

    p = sub.add_parser("transform", help="re-express a process matrix in another basis")
    p.add_argument("--chi", required=True)
    p.add_argument("--to", choices=list(BASIS_KINDS), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("choi", help="write the model process matrix for given parameters")
    p.add_argument("--params", required=True)
    p.add_argument("--basis", choices=list(BASIS_KINDS), default="S")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_choi)

    p = sub.add_parser("apply", help="apply a process matrix to a state")
    p.add_argument("--chi", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_apply)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
