"""Command-line interface: key management, database encryption, querying,
and the benchmark / noise-model harnesses.

Exit codes: 0 success, 2 usage or validation error, 3 integrity or key
mismatch, 4 I/O failure. Report commands write delimited output and, when
given an output path, render a matplotlib figure alongside it.
"""

from __future__ import annotations

import argparse
import base64
import json
import sys
from pathlib import Path

from . import __version__, bench, noise, paillier, store
from .encoding import EncodingParams, overflow_budget
from .errors import (
    EXIT_INTEGRITY,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    IntegrityError,
    ValidationError,
)
from .similarity import PlainVector, batch_similarity, topk


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"bad {what} list {text!r}: {exc}") from exc


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"bad {what} {text!r}: {exc}") from exc


def _figure_path(args, csv_path: Path) -> Path | None:
    if args.no_plot:
        return None
    if args.plot is not None:
        return Path(args.plot)
    return csv_path.with_suffix(".png")


def _add_plot_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out-csv", help="write the per-point table to this CSV file")
    sub.add_argument("--plot", help="figure output path (default: CSV path with .png)")
    sub.add_argument("--no-plot", action="store_true",
                     help="skip figure rendering")


def _cmd_keygen(args) -> int:
    out_pub, out_sec = Path(args.out_pub), Path(args.out_sec)
    if not args.force:
        for path in (out_pub, out_sec):
            if path.exists():
                print(f"error: {path} exists; pass --force to overwrite",
                      file=sys.stderr)
                return EXIT_USAGE
    pk, sk = paillier.keygen(args.bits)
    store.save_keys(out_pub, out_sec, pk, sk)
    print(f"wrote {out_pub} and {out_sec}")
    print(f"fingerprint: {pk.fingerprint.hex()}")
    return EXIT_OK


def _read_vector_csv(path: str) -> tuple[list[str], list[list[float]], int]:
    import csv as csv_mod

    labels: list[str] = []
    rows: list[list[float]] = []
    dim = -1
    with open(path, newline="") as fh:
        for row_no, row in enumerate(csv_mod.reader(fh), start=1):
            if not row:
                continue
            if len(row) < 2:
                raise ValidationError(
                    f"row {row_no}: need a label and at least one value")
            label = row[0]
            try:
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise ValidationError(f"row {row_no}: {exc}") from exc
            if dim == -1:
                dim = len(values)
            elif len(values) != dim:
                raise ValidationError(
                    f"row {row_no}: expected {dim} values, got {len(values)}")
            labels.append(label)
            rows.append(values)
    if dim == -1:
        raise ValidationError(f"no vectors found in {path}")
    return labels, rows, dim


def _cmd_encrypt_db(args) -> int:
    pk = store.load_public_key(args.pub)
    params = EncodingParams(frac_bits=args.frac_bits, max_abs=args.x_max,
                            modulus=pk.modulus)
    labels, rows, dim = _read_vector_csv(args.in_path)
    records = []
    from .similarity import encrypt_vector

    for label, values in zip(labels, rows):
        vec = encrypt_vector(pk, params, values, label=label)
        records.append(store.StoreRecord(label=label, cts=vec.cts))
    header = store.make_header(pk, params, dim=dim, count=len(records))
    store.save_db(args.out, header, records)
    report = overflow_budget(params, dim)
    print(f"encrypted {len(records)} vectors of dim {dim} -> {args.out}")
    if report.ok:
        print(f"overflow budget ok: headroom {report.headroom:.3g}x, "
              f"max safe dim {report.max_safe_dim}")
    else:
        print(f"warning: overflow budget violated at dim {dim} "
              f"(max safe dim {report.max_safe_dim}); "
              f"inner products may not decode exactly", file=sys.stderr)
    return EXIT_OK


def _cmd_query(args) -> int:
    pk = store.load_public_key(args.pub)
    header, records = store.load_db(args.db, pk=pk)
    values = _parse_float_list(args.query, "query row")
    if len(values) != header.dim:
        raise ValidationError(
            f"query has {len(values)} values, database dim is {header.dim}")
    x = PlainVector.from_values(header.params, values)
    db = [store.record_to_enc_vector(header, record) for record in records]
    scores = batch_similarity(pk, x, db)

    if args.sec is None:
        if args.out_scores is None:
            raise ValidationError(
                "ranking needs --sec; for evaluator mode pass --out-scores")
        with open(args.out_scores, "w", encoding="ascii") as fh:
            for label, ct in scores:
                obj = {"label": label, **ct.to_json()}
                fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
        print(f"wrote {len(scores)} encrypted scores to {args.out_scores}")
        return EXIT_OK

    _, sk = store.load_keys(args.pub, args.sec)
    for match in topk(sk, header.params, scores, args.k):
        score = int(match.score) if match.score.is_integer() else match.score
        print(json.dumps({"label": match.label, "rank": match.rank,
                          "score": score}, separators=(",", ":")))
    return EXIT_OK


def _cmd_bench_scaling(args) -> int:
    dims = _parse_int_list(args.dims, "dims")
    report = bench.run_scaling_bench(args.bits, dims, reps=args.reps,
                                     seed=args.seed)
    print(json.dumps(report.to_json(), sort_keys=True))
    if args.out_csv:
        csv_path = Path(args.out_csv)
        with open(csv_path, "w", encoding="ascii") as fh:
            fh.write("d,seconds\n")
            for point in report.points:
                fh.write(f"{point.dim},{point.seconds!r}\n")
        fig = _figure_path(args, csv_path)
        if fig is not None:
            from .plots import save_scaling_figure

            save_scaling_figure(report, fig)
            print(f"wrote {csv_path} and {fig}")
        else:
            print(f"wrote {csv_path}")
    return EXIT_OK


def _cmd_bench_scalar(args) -> int:
    exponents = _parse_int_list(args.exponents, "exponent")
    points = bench.run_scalar_bench(args.bits, exponents, reps=args.reps,
                                    seed=args.seed)
    for p in points:
        print(f"k={p.exponent}: square-and-multiply {p.fast_seconds:.3e}s, "
              f"repeated addition {p.naive_seconds:.3e}s, "
              f"speedup {p.speedup:.1f}x")
    if args.out_csv:
        csv_path = Path(args.out_csv)
        with open(csv_path, "w", encoding="ascii") as fh:
            fh.write("k,fast_seconds,naive_seconds,speedup\n")
            for p in points:
                fh.write(f"{p.exponent},{p.fast_seconds!r},"
                         f"{p.naive_seconds!r},{p.speedup!r}\n")
        fig = _figure_path(args, csv_path)
        if fig is not None:
            from .plots import save_scalar_figure

            save_scalar_figure(points, fig)
            print(f"wrote {csv_path} and {fig}")
        else:
            print(f"wrote {csv_path}")
    return EXIT_OK


def _build_noise_params(args, dim: int) -> noise.NoiseParams:
    if args.x_uniform is not None:
        lo, hi = args.x_uniform.split(":")
        sampler: noise.XSampler = noise.UniformIntX(int(lo), int(hi))
    else:
        sampler = noise.ConstantX(args.x_const)
    return noise.NoiseParams(dim=dim, noise_bound=args.B, x_bound=args.X,
                             x_sampler=sampler, modulus_q=args.q)


def _cmd_noise_sim(args) -> int:
    if args.sweep is not None:
        dims = _parse_int_list(args.sweep, "sweep dims")
        if not dims:
            raise ValidationError("sweep needs at least one dimension")
        params = _build_noise_params(args, dims[0])
        rows = noise.sweep_dims(params, dims, trials=args.trials,
                                seed=args.seed)
        lines = ["d,predicted_var,empirical_var,max_abs,bound"]
        for d, report in rows:
            lines.append(f"{d},{report.predicted_variance!r},"
                         f"{report.empirical_variance!r},"
                         f"{report.max_observed_abs!r},"
                         f"{report.worst_case_bound!r}")
        text = "\n".join(lines) + "\n"
        if args.out_csv:
            csv_path = Path(args.out_csv)
            csv_path.write_text(text, encoding="ascii")
            fig = _figure_path(args, csv_path)
            if fig is not None:
                from .plots import save_noise_sweep_figure

                save_noise_sweep_figure(rows, fig)
                print(f"wrote {csv_path} and {fig}")
            else:
                print(f"wrote {csv_path}")
        else:
            sys.stdout.write(text)
        return EXIT_OK

    params = _build_noise_params(args, args.d)
    report = noise.simulate(params, trials=args.trials, seed=args.seed)
    print(json.dumps(report.to_json(), sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ahevdb",
        description="Inner-product similarity search over additively "
                    "homomorphic (Paillier) encrypted vectors.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--bits", type=int, default=2048)
    p.add_argument("--out-pub", required=True)
    p.add_argument("--out-sec", required=True)
    p.add_argument("--force", action="store_true",
                   help="overwrite existing key files")
    p.set_defaults(handler=_cmd_keygen)

    p = sub.add_parser("encrypt-db",
                       help="encrypt a CSV of labeled vectors into a store")
    p.add_argument("--pub", required=True)
    p.add_argument("--in", dest="in_path", required=True,
                   help="CSV rows: label,v1,...,vd")
    p.add_argument("--out", required=True)
    p.add_argument("--frac-bits", type=int, default=16)
    p.add_argument("--x-max", type=float, required=True)
    p.set_defaults(handler=_cmd_encrypt_db)

    p = sub.add_parser("query",
                       help="score a plaintext query against an encrypted db")
    p.add_argument("--pub", required=True)
    p.add_argument("--sec", help="secret key; omit for evaluator mode")
    p.add_argument("--db", required=True)
    p.add_argument("--query", required=True,
                   help="comma-separated query values")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out-scores",
                   help="evaluator mode: write encrypted scores here")
    p.set_defaults(handler=_cmd_query)

    p = sub.add_parser("bench-scaling",
                       help="inner product wall time vs dimension")
    p.add_argument("--bits", type=int, default=512)
    p.add_argument("--dims", required=True, help="comma-separated dimensions")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int)
    _add_plot_flags(p)
    p.set_defaults(handler=_cmd_bench_scaling)

    p = sub.add_parser("bench-scalar",
                       help="square-and-multiply vs repeated addition")
    p.add_argument("--bits", type=int, default=512)
    p.add_argument("--exponents", required=True,
                   help="comma-separated nonnegative exponents")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int)
    _add_plot_flags(p)
    p.set_defaults(handler=_cmd_bench_scalar)

    p = sub.add_parser("noise-sim",
                       help="Monte-Carlo noise accumulation for noisy AHE")
    p.add_argument("--d", type=int, default=256, help="dimension")
    p.add_argument("--B", type=float, default=1.0, help="noise bound")
    p.add_argument("--X", type=float, default=1.0, help="component bound")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep", help="comma-separated dims; emits CSV")
    p.add_argument("--x-const", type=float, default=1.0,
                   help="constant query component value")
    p.add_argument("--x-uniform", metavar="LO:HI",
                   help="draw query components uniformly from [LO, HI]")
    p.add_argument("--q", type=float,
                   help="modulus; counts |noise| >= q/2 as decode failures")
    _add_plot_flags(p)
    p.set_defaults(handler=_cmd_noise_sim)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
