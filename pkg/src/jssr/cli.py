"""Command-line front end: dataset generation, training, threshold
calibration, one-off baseline runs, full sweeps, and result audits.

Every subcommand is a thin shell over the library; anything it can do
is equally reachable from Python.  Config files are the TOML schema of
`jssr.bench` (`write_config` emits a template).
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace

import numpy as np

from jssr.autoencoder import ActivityNet, NetConfig
from jssr.bench import (
    COLUMNS,
    ModelCache,
    SweepRecord,
    _Cell,
    _RUNNERS,
    _cfg_key,
    default_configs,
    derive_seed,
    read_config,
    run_sweep,
    time_detection,
    verify_results,
    write_config,
    write_csv,
)
from jssr.baselines import gaussian_pilots
from jssr.complexmat import ComplexMatrix, crandn, rng_from_seed
from jssr.signal_model import (
    GroupActivityModel,
    generate_dataset,
    load_dataset,
    write_dataset_file,
)
from jssr.thresholding import apply_threshold, calibrate_threshold, error_rate
from jssr.training import TrainConfig, load_checkpoint, save_checkpoint, train


def _chunked_scores(net: ActivityNet, Y: ComplexMatrix,
                    chunk: int = 4096) -> np.ndarray:
    out = []
    for lo in range(0, Y.shape[0], chunk):
        out.append(net.scores(ComplexMatrix(Y.re[lo:lo + chunk],
                                            Y.im[lo:lo + chunk])))
    return np.concatenate(out, axis=0)


def _noise_for(count: int, L: int, M: int, sigma2: float,
               seed: int) -> ComplexMatrix:
    return crandn(rng_from_seed(seed), count, L, M) * math.sqrt(sigma2)


# -- subcommands -----------------------------------------------------------

def cmd_generate(a) -> int:
    spec = read_config(a.config)
    write_dataset_file(a.out, spec.base_model, a.count, a.seed)
    print(f"wrote {a.count} samples ({spec.base_model.N} devices, "
          f"M={spec.base_model.M}) to {a.out}")
    return 0


def cmd_train(a) -> int:
    spec = read_config(a.config)
    model, L = spec.base_model, spec.L
    ckey = _cfg_key(model, L)
    X_tr, a_tr = generate_dataset(model, spec.train_count,
                                  derive_seed(a.seed, "train", ckey))
    X_va, a_va = generate_dataset(model, spec.val_count,
                                  derive_seed(a.seed, "val", ckey))
    cfg = NetConfig(N=model.N, L=L, M=model.M, sigma2=model.sigma2,
                    features=a.features)
    stream = "net_cov" if a.features == "covariance" else "net_raw"
    rng = rng_from_seed(derive_seed(a.seed, stream, ckey))
    net = ActivityNet.init(cfg, rng)
    tcfg = TrainConfig(batch_size=spec.batch_size,
                       max_epochs=spec.max_epochs,
                       patience=spec.patience, lr=spec.lr)
    res = train(net, X_tr, a_tr, X_va, a_va, rng, tcfg, verbose=not a.quiet)
    save_checkpoint(a.out, net, seed=a.seed)

    log_path = a.log or a.out + ".log.csv"
    with open(log_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["epoch", "train_loss", "val_loss", "wall_seconds"])
        w.writerows(res.log_rows())
    print(f"best val {min(res.val_loss):.5f} at epoch {res.best_epoch} "
          f"({res.epochs_run} epochs, {res.wall_seconds:.1f}s); "
          f"model -> {a.out}, log -> {log_path}")
    return 0


def cmd_calibrate(a) -> int:
    net, header = load_checkpoint(a.model)
    X, alpha, dhead = load_dataset(a.data, mmap=True)
    if (dhead["N"], dhead["M"]) != (net.cfg.N, net.cfg.M):
        raise SystemExit(
            f"dataset is N={dhead['N']}, M={dhead['M']} but the model wants "
            f"N={net.cfg.N}, M={net.cfg.M}")
    count = alpha.shape[0]
    Z = _noise_for(count, net.cfg.L, net.cfg.M, net.cfg.sigma2, a.noise_seed)
    Y = net.A @ ComplexMatrix(np.asarray(X.re), np.asarray(X.im)) + Z
    scores = _chunked_scores(net, Y)
    r_star, errs = calibrate_threshold(scores, np.asarray(alpha))
    save_checkpoint(a.model, net, seed=header["seed"], threshold=r_star)
    print(f"r* = {r_star:.2f} (validation error {errs.min():.5f}); "
          f"written into {a.model}")
    return 0


def cmd_baseline(a) -> int:
    X_te, a_te, dh = load_dataset(a.data)
    X_va, a_va, _ = load_dataset(a.val)
    model = GroupActivityModel(N=dh["N"], M=dh["M"], G=dh["G"],
                               p1=dh["p1"], p2=dh["p2"], sigma2=dh["sigma2"])
    if a.scheme == "naive":
        if not a.model:
            raise SystemExit("--scheme naive needs --model (a trained "
                             "raw-feature checkpoint)")
        net, _ = load_checkpoint(a.model)
        L = net.cfg.L
        Z_va = _noise_for(a_va.shape[0], L, model.M, model.sigma2,
                          a.noise_seed)
        Z_te = _noise_for(a_te.shape[0], L, model.M, model.sigma2,
                          a.noise_seed + 1)
        r_star, _ = calibrate_threshold(
            _chunked_scores(net, net.A @ X_va + Z_va), a_va)
        Y_te = net.A @ X_te + Z_te
        dec = apply_threshold(_chunked_scores(net, Y_te), r_star)
        err = error_rate(dec, a_te)
        runner = lambda Y: apply_threshold(net.scores(Y), r_star)  # noqa: E731
        tps = time_detection(runner, Y_te, reps=5)
        flags = ""
    else:
        if a.L is None:
            raise SystemExit(f"--scheme {a.scheme} needs --L (pilot length)")
        L = a.L
        base = default_configs()["desk"]
        spec = replace(base, name="baseline", N=model.N, L=L, M=model.M,
                       G=model.G, p1=model.p1, p2=model.p2,
                       sigma2=model.sigma2, axis="L_over_N",
                       values=(L / model.N,),
                       schemes=(a.scheme,), seeds=(a.noise_seed,),
                       val_count=a_va.shape[0], test_count=a_te.shape[0])
        ckey = _cfg_key(model, L)
        cell = _Cell(
            spec=spec, model=model, L=L, seed=a.noise_seed,
            value=L / model.N, X_va=X_va, a_va=a_va,
            Z_va=_noise_for(a_va.shape[0], L, model.M, model.sigma2,
                            derive_seed(a.noise_seed, "z_val", ckey)),
            X_te=X_te, a_te=a_te,
            Z_te=_noise_for(a_te.shape[0], L, model.M, model.sigma2,
                            derive_seed(a.noise_seed, "z_test", ckey)),
            A_base=gaussian_pilots(
                model.N, L,
                rng_from_seed(derive_seed(a.pilot_seed, "pilots", ckey))),
            cache=None)
        err, r_star, dec, ok, runner, flags = _RUNNERS[a.scheme](cell)
        Y_time = cell.A_base @ X_te + cell.Z_te
        tps = time_detection(runner,
                             ComplexMatrix(Y_time.re[:a.timing_count],
                                           Y_time.im[:a.timing_count]),
                             reps=5)

    rec = SweepRecord(scheme=a.scheme, axis="L_over_N",
                      axis_value=L / model.N, N=model.N, L=L, M=model.M,
                      L_over_N=L / model.N, p=model.p,
                      p1_over_p2=model.p1 / model.p2 if model.p2 > 0 else None,
                      G=model.G, seed=a.noise_seed, error_rate=err,
                      time_per_sample_s=tps, threshold_used=r_star,
                      solver_flags=flags)
    if a.out:
        write_csv(a.out, [rec])
        print(f"wrote {a.out}")
    else:
        w = csv.writer(sys.stdout)
        w.writerow(COLUMNS)
        w.writerow(rec.to_row())
    return 0


def cmd_bench(a) -> int:
    picked = [bool(a.spec), a.desk, a.paper_full]
    if sum(picked) != 1:
        raise SystemExit("pick exactly one of --spec, --desk, --paper-full")
    if a.spec:
        spec = read_config(a.spec)
    else:
        spec = default_configs()["desk" if a.desk else "paper-full"]
    overrides = {}
    if a.axis:
        overrides["axis"] = a.axis
    if a.values:
        overrides["values"] = tuple(float(v) for v in a.values.split(","))
    if a.schemes:
        overrides["schemes"] = tuple(a.schemes.split(","))
    if a.seeds:
        overrides["seeds"] = tuple(int(s) for s in a.seeds.split(","))
    if overrides:
        spec = replace(spec, **overrides)

    cache = ModelCache(a.model_cache) if a.model_cache else ModelCache()
    progress = None
    if not a.quiet:
        def progress(key, recs):
            value, seed = key
            done = ", ".join(
                f"{r.scheme}={r.error_rate:.4f}" if r.error_rate is not None
                else f"{r.scheme}=[{r.solver_flags}]" for r in recs)
            print(f"[{spec.axis}={value} seed={seed}] {done}", flush=True)

    records, problems = run_sweep(spec, a.out, cache, progress=progress)
    print(f"{len(records)} rows -> {a.out}")
    for p in problems:
        print(f"AUDIT: {p}", file=sys.stderr)
    return 1 if problems else 0


def cmd_verify(a) -> int:
    problems = verify_results(a.csv)
    if problems:
        for p in problems:
            print(f"MISMATCH: {p}", file=sys.stderr)
        return 1
    print(f"{a.csv}: error rates match stored decisions")
    return 0


def cmd_config(a) -> int:
    spec = default_configs()[a.base]
    write_config(a.out, spec)
    print(f"wrote {a.base} template to {a.out}")
    return 0


# -- wiring ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jssr",
        description="joint sparse support recovery: data, training, "
                    "baselines, benchmarks")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="write a dataset file")
    g.add_argument("--config", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--count", type=int, required=True)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="train pilots + decoder, save checkpoint")
    t.add_argument("--config", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--features", choices=("covariance", "raw"),
                   default="covariance")
    t.add_argument("--log", help="training-log CSV (default <out>.log.csv)")
    t.add_argument("--quiet", action="store_true")
    t.set_defaults(func=cmd_train)

    c = sub.add_parser("calibrate",
                       help="pick the decision threshold on a dataset and "
                            "store it in the checkpoint")
    c.add_argument("--model", required=True)
    c.add_argument("--data", required=True)
    c.add_argument("--noise-seed", type=int, default=0)
    c.set_defaults(func=cmd_calibrate)

    b = sub.add_parser("baseline", help="run one classical detector")
    b.add_argument("--scheme", required=True,
                   choices=("lasso", "glasso", "amp", "ml", "naive"))
    b.add_argument("--data", required=True, help="test dataset file")
    b.add_argument("--val", required=True,
                   help="validation dataset file (threshold/penalty "
                        "calibration)")
    b.add_argument("--model", help="checkpoint (required for naive)")
    b.add_argument("--L", type=int, help="pilot length for Gaussian pilots")
    b.add_argument("--pilot-seed", type=int, default=0)
    b.add_argument("--noise-seed", type=int, default=0)
    b.add_argument("--timing-count", type=int, default=200)
    b.add_argument("--out", help="CSV path (default: stdout)")
    b.set_defaults(func=cmd_baseline)

    e = sub.add_parser("bench", help="run a sweep, write the results CSV")
    e.add_argument("--spec", help="sweep TOML")
    e.add_argument("--desk", action="store_true")
    e.add_argument("--paper-full", action="store_true")
    e.add_argument("--out", required=True)
    e.add_argument("--axis")
    e.add_argument("--values", help="comma-separated axis values")
    e.add_argument("--schemes", help="comma-separated scheme names")
    e.add_argument("--seeds", help="comma-separated seeds")
    e.add_argument("--model-cache", help="directory for trained checkpoints")
    e.add_argument("--quiet", action="store_true")
    e.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify",
                       help="recompute error rates from stored decisions")
    v.add_argument("--csv", required=True)
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("config", help="write a config template")
    k.add_argument("--base", choices=("desk", "paper-full"), default="desk")
    k.add_argument("--out", required=True)
    k.set_defaults(func=cmd_config)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
