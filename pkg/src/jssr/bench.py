"""Sweep harness: error-rate and timing experiments on shared test sets.

A sweep varies exactly one axis (L_over_N, p, M, p1_over_p2, or G)
around a base configuration and evaluates a list of detection schemes
at every (axis value, seed) cell.  Within a cell every scheme sees
bitwise-identical test samples and the same noise realization; only
the pilot matrix differs (learned pilots for the trained schemes, one
shared i.i.d. Gaussian draw for the classical ones).  Results land in
a fixed-column CSV plus a sidecar .npz of hard decisions so error
rates can be re-derived from first principles afterwards.

Schemes:
  proposed  learned pilots + covariance-feature decoder
  naive     learned pilots + raw-measurement decoder (ablation)
  lasso     Gaussian pilots + nonnegative covariance lasso
  glasso    Gaussian pilots + row-sparse group lasso
  amp       Gaussian pilots + approximate message passing
  ml        Gaussian pilots + covariance maximum likelihood
  oracle    returns the true activity (harness plumbing probe)

Per-scheme failures become flagged rows (`solver_flags` column), never
abort a sweep, and are excluded from any aggregate a caller computes.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from jssr.autoencoder import ActivityNet, NetConfig, sample_covariance
from jssr.baselines import (
    cov_lasso,
    cov_ml,
    gaussian_pilots,
    group_lambda_max,
    group_lasso,
    lasso_dictionary,
    lasso_lambda_max,
    mmv_amp,
)
from jssr.complexmat import ComplexMatrix, crandn, rng_from_seed
from jssr.signal_model import GroupActivityModel, generate_dataset
from jssr.thresholding import (
    apply_threshold,
    calibrate_threshold,
    error_rate,
    squash_scores,
)
from jssr.training import (
    TrainConfig,
    load_checkpoint,
    save_checkpoint,
    train,
)

CSV_VERSION = 1

COLUMNS = [
    "schema_version", "scheme", "axis", "axis_value",
    "N", "L", "M", "L_over_N", "p", "p1_over_p2", "G", "seed",
    "error_rate", "time_per_sample_s", "threshold_used", "solver_flags",
]

AXES = ("L_over_N", "p", "M", "p1_over_p2", "G")
SCHEMES = ("proposed", "naive", "lasso", "glasso", "amp", "ml", "oracle")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a base configuration, one varied axis, schemes, seeds."""
    name: str
    N: int
    L: int
    M: int
    G: int
    p1: float
    p2: float
    sigma2: float
    axis: str
    values: tuple
    schemes: tuple = ("proposed", "naive", "lasso", "glasso", "amp", "ml")
    seeds: tuple = (0,)
    train_count: int = 20_000
    val_count: int = 2_000
    test_count: int = 2_000
    # training knobs (V fixed at 1, hidden width at 2N by NetConfig)
    batch_size: int = 128
    max_epochs: int = 200
    patience: int = 20
    lr: float = 1e-3
    # solver budgets for the classical schemes
    lasso_max_iter: int = 3000
    glasso_max_iter: int = 1000
    solver_tol: float = 1e-7
    lambda_split: int = 1000    # validation samples used to pick lambda
    # timing protocol
    timing_count: int = 200
    timing_reps: int = 5

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}; pick one of {AXES}")
        if not self.values:
            raise ValueError("values must be non-empty")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes {sorted(unknown)}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        for v in self.values:
            resolve_point(self, v)   # raises on invalid axis values

    @property
    def base_model(self) -> GroupActivityModel:
        return GroupActivityModel(N=self.N, M=self.M, G=self.G,
                                  p1=self.p1, p2=self.p2, sigma2=self.sigma2)


def resolve_point(spec: SweepSpec, value) -> tuple[GroupActivityModel, int]:
    """Base config with the swept axis set to `value` -> (model, L)."""
    N, L, M, G = spec.N, spec.L, spec.M, spec.G
    p1, p2 = spec.p1, spec.p2
    if spec.axis == "L_over_N":
        L = int(round(value * N))
        if L < 1:
            raise ValueError(f"L_over_N={value} gives L={L}")
    elif spec.axis == "M":
        if int(value) != value:
            raise ValueError(f"M must be an integer, got {value}")
        M = int(value)
    elif spec.axis == "G":
        if int(value) != value:
            raise ValueError(f"G must be an integer, got {value}")
        G = int(value)
    elif spec.axis == "p":
        # rescale both group probabilities, holding the ratio p1/p2
        if p2 <= 0:
            raise ValueError("p sweep needs p2 > 0 to hold the ratio fixed")
        ratio = p1 / p2
        g1 = (G + 1) // 2
        p2 = value * G / (g1 * ratio + (G - g1))
        p1 = ratio * p2
    elif spec.axis == "p1_over_p2":
        # change the ratio, holding the mean access probability p
        p_bar = spec.base_model.p
        g1 = (G + 1) // 2
        p2 = p_bar * G / (g1 * value + (G - g1))
        p1 = value * p2
    model = GroupActivityModel(N=N, M=M, G=G, p1=p1, p2=p2,
                               sigma2=spec.sigma2)
    return model, L


@dataclass
class SweepRecord:
    scheme: str
    axis: str
    axis_value: float
    N: int
    L: int
    M: int
    L_over_N: float
    p: float
    p1_over_p2: float
    G: int
    seed: int
    error_rate: float | None
    time_per_sample_s: float | None
    threshold_used: float | None
    solver_flags: str = ""

    def to_row(self) -> list:
        def num(x):
            return "" if x is None else repr(float(x))
        return [CSV_VERSION, self.scheme, self.axis, repr(float(self.axis_value)),
                self.N, self.L, self.M, repr(self.L_over_N),
                repr(self.p), num(self.p1_over_p2), self.G, self.seed,
                num(self.error_rate), num(self.time_per_sample_s),
                num(self.threshold_used), self.solver_flags]


def write_csv(path: str, records: list[SweepRecord]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(COLUMNS)
        for r in records:
            w.writerow(r.to_row())


def read_csv(path: str) -> list[dict]:
    """Rows as dicts with numeric fields parsed; '' stays None."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != COLUMNS:
            raise ValueError(
                f"unexpected CSV columns {reader.fieldnames}")
        rows = []
        for raw in reader:
            row = dict(raw)
            for k in ("axis_value", "L_over_N", "p", "p1_over_p2",
                      "error_rate", "time_per_sample_s", "threshold_used"):
                row[k] = float(raw[k]) if raw[k] != "" else None
            for k in ("schema_version", "N", "L", "M", "G", "seed"):
                row[k] = int(raw[k])
            rows.append(row)
    return rows


# -- deterministic stream derivation ---------------------------------------
#
# Data/noise/init streams are keyed by the *content* of the cell
# configuration, not its position in the sweep, so identical cells in
# different sweeps reuse identical samples (and cached models).

_STREAMS = {"train": 0, "val": 1, "test": 2, "z_test": 3, "z_val": 4,
            "pilots": 5, "net_cov": 6, "net_raw": 7}


def _cfg_key(model: GroupActivityModel, L: int) -> tuple:
    return (model.N, L, model.M, model.G,
            round(model.p1 * 10**9), round(model.p2 * 10**9),
            round(model.sigma2 * 10**9))


def derive_seed(seed: int, stream: str, key: tuple) -> int:
    ss = np.random.SeedSequence((seed, _STREAMS[stream]) + key)
    return int(ss.generate_state(1)[0])


# -- trained-model cache ---------------------------------------------------

class ModelCache:
    """Trained nets keyed by the full (config, seed) tuple.

    In-memory always; checkpoints are also written to / read from
    `directory` (default: $JSSR_MODEL_CACHE) when set, so repeated
    harness runs skip training entirely.
    """

    def __init__(self, directory: str | None = None):
        self.directory = directory if directory is not None \
            else os.environ.get("JSSR_MODEL_CACHE")
        self._mem: dict = {}
        self._lock = threading.Lock()

    def _disk_path(self, key) -> str | None:
        if not self.directory:
            return None
        tag = hashlib.sha1(repr(key).encode()).hexdigest()[:16]
        return os.path.join(self.directory, f"net-{tag}.ckpt")

    def get_or_train(self, model: GroupActivityModel, L: int, features: str,
                     seed: int, spec: SweepSpec,
                     verbose: bool = False) -> ActivityNet:
        ckey = _cfg_key(model, L)
        key = (ckey, features, spec.train_count, spec.val_count,
               spec.batch_size, spec.max_epochs, spec.patience,
               round(spec.lr * 10**12), seed)
        with self._lock:
            if key in self._mem:
                return self._mem[key]
        path = self._disk_path(key)
        if path and os.path.exists(path):
            net, _ = load_checkpoint(path)
            with self._lock:
                self._mem[key] = net
            return net

        X_tr, a_tr = generate_dataset(model, spec.train_count,
                                      derive_seed(seed, "train", ckey))
        X_va, a_va = generate_dataset(model, spec.val_count,
                                      derive_seed(seed, "val", ckey))
        cfg = NetConfig(N=model.N, L=L, M=model.M, sigma2=model.sigma2,
                        features=features)
        stream = "net_cov" if features == "covariance" else "net_raw"
        rng = rng_from_seed(derive_seed(seed, stream, ckey))
        net = ActivityNet.init(cfg, rng)
        tcfg = TrainConfig(batch_size=spec.batch_size,
                           max_epochs=spec.max_epochs,
                           patience=spec.patience, lr=spec.lr)
        train(net, X_tr, a_tr, X_va, a_va, rng, tcfg, verbose=verbose)
        if path:
            os.makedirs(self.directory, exist_ok=True)
            save_checkpoint(path, net, seed=seed)
        with self._lock:
            self._mem[key] = net
        return net


# -- timing ----------------------------------------------------------------

_TIMING_LOCK = threading.Lock()   # timed sections never overlap


def time_detection(runner, Y: ComplexMatrix, reps: int = 5) -> float:
    """Median wall-clock of a full `runner(Y)` pass over `reps`
    repetitions, divided by the sample count.  One untimed warm-up
    pass first; the lock keeps concurrent sweeps out of timed regions.
    """
    count = Y.shape[0]
    with _TIMING_LOCK:
        runner(Y)
        ts = []
        for _ in range(reps):
            t0 = time.perf_counter()
            runner(Y)
            ts.append(time.perf_counter() - t0)
    return float(np.median(ts)) / count


# -- lambda selection ------------------------------------------------------

LAMBDA_GRID_POWERS = tuple(range(0, -11, -1))   # lambda_max * 2**k


def _pick_lambda(solve_at, lam_max: float, alpha_val: np.ndarray) -> float:
    """Walk the penalty path from lambda_max downward (warm starts),
    calibrate a threshold at each stop, keep the best-error lambda.
    Ties go to the larger (sparser, cheaper) penalty.
    """
    best_err, best_lam = np.inf, lam_max
    warm = None
    for k in LAMBDA_GRID_POWERS:
        lam = lam_max * 2.0**k
        scores, warm = solve_at(lam, warm)
        _, errs = calibrate_threshold(scores, alpha_val)
        err = errs.min()
        if err < best_err:
            best_err, best_lam = err, lam
    return best_lam


# -- per-scheme evaluation -------------------------------------------------

@dataclass
class _Cell:
    """Everything shared by the schemes inside one (axis value, seed)."""
    spec: SweepSpec
    model: GroupActivityModel
    L: int
    seed: int
    value: float
    X_va: ComplexMatrix
    a_va: np.ndarray
    Z_va: ComplexMatrix
    X_te: ComplexMatrix
    a_te: np.ndarray
    Z_te: ComplexMatrix
    A_base: ComplexMatrix       # one Gaussian draw for all classical schemes
    cache: ModelCache = field(repr=False, default=None)


def _make_cell(spec: SweepSpec, value, seed: int, cache: ModelCache) -> _Cell:
    model, L = resolve_point(spec, value)
    ckey = _cfg_key(model, L)
    X_va, a_va = generate_dataset(model, spec.val_count,
                                  derive_seed(seed, "val", ckey))
    X_te, a_te = generate_dataset(model, spec.test_count,
                                  derive_seed(seed, "test", ckey))
    s = math.sqrt(model.sigma2)
    Z_va = crandn(rng_from_seed(derive_seed(seed, "z_val", ckey)),
                  spec.val_count, L, model.M) * s
    Z_te = crandn(rng_from_seed(derive_seed(seed, "z_test", ckey)),
                  spec.test_count, L, model.M) * s
    A_base = gaussian_pilots(model.N, L,
                             rng_from_seed(derive_seed(seed, "pilots", ckey)))
    return _Cell(spec, model, L, seed, value, X_va, a_va, Z_va,
                 X_te, a_te, Z_te, A_base, cache)


def _received(A: ComplexMatrix, X: ComplexMatrix,
              Z: ComplexMatrix) -> ComplexMatrix:
    return A @ X + Z


def _sub(Y: ComplexMatrix, n: int) -> ComplexMatrix:
    return ComplexMatrix(Y.re[:n], Y.im[:n])


def _evaluate(cell: _Cell, scores_of, Y_va: ComplexMatrix,
              Y_te: ComplexMatrix, ok: np.ndarray | None = None):
    """Calibrate on validation scores, decide on test scores.

    Returns (error, threshold, decisions).  `ok` masks out per-sample
    solver failures before the error aggregate.
    """
    r_star, _ = calibrate_threshold(scores_of(Y_va), cell.a_va)
    dec = apply_threshold(scores_of(Y_te), r_star)
    if ok is None:
        ok = np.ones(dec.shape[0], dtype=bool)
    err = error_rate(dec[ok], cell.a_te[ok])
    return err, r_star, dec, ok


def _run_trained(cell: _Cell, features: str):
    net = cell.cache.get_or_train(cell.model, cell.L, features,
                                  cell.seed, cell.spec)
    Y_va = _received(net.A, cell.X_va, cell.Z_va)
    Y_te = _received(net.A, cell.X_te, cell.Z_te)
    r_star, _ = calibrate_threshold(net.scores(Y_va), cell.a_va)
    dec = apply_threshold(net.scores(Y_te), r_star)
    ok = np.ones(dec.shape[0], dtype=bool)
    err = error_rate(dec, cell.a_te)
    runner = lambda Y: apply_threshold(net.scores(Y), r_star)  # noqa: E731
    return err, r_star, dec, ok, runner, ""


def _run_lasso(cell: _Cell):
    spec = cell.spec
    pre = lasso_dictionary(cell.A_base)
    Y_va = _received(cell.A_base, cell.X_va, cell.Z_va)
    n_sel = min(spec.lambda_split, spec.val_count)
    C_sel = sample_covariance(_sub(Y_va, n_sel))
    lam_max = lasso_lambda_max(C_sel, cell.A_base, pre)

    def solve_at(lam, warm):
        r, _ = cov_lasso(C_sel, cell.A_base, lam,
                         max_iter=spec.lasso_max_iter, tol=spec.solver_tol,
                         precomp=pre, r0=warm)
        return squash_scores(r), r

    lam = _pick_lambda(solve_at, lam_max, cell.a_va[:n_sel])

    def scores_of(Y):
        r, _ = cov_lasso(sample_covariance(Y), cell.A_base, lam,
                         max_iter=spec.lasso_max_iter, tol=spec.solver_tol,
                         precomp=pre)
        return squash_scores(r)

    Y_te = _received(cell.A_base, cell.X_te, cell.Z_te)
    err, r_star, dec, ok = _evaluate(cell, scores_of, Y_va, Y_te)
    runner = lambda Y: apply_threshold(scores_of(Y), r_star)  # noqa: E731
    return err, r_star, dec, ok, runner, ""


def _run_glasso(cell: _Cell):
    spec = cell.spec
    Y_va = _received(cell.A_base, cell.X_va, cell.Z_va)
    n_sel = min(spec.lambda_split, spec.val_count)
    Y_sel = _sub(Y_va, n_sel)
    lam_max = group_lambda_max(Y_sel, cell.A_base)

    def solve_at(lam, warm):
        norms, info = group_lasso(Y_sel, cell.A_base, lam,
                                  max_iter=spec.glasso_max_iter,
                                  tol=spec.solver_tol, W0=warm)
        return squash_scores(norms), info["W"]

    lam = _pick_lambda(solve_at, lam_max, cell.a_va[:n_sel])

    def scores_of(Y):
        norms, _ = group_lasso(Y, cell.A_base, lam,
                               max_iter=spec.glasso_max_iter,
                               tol=spec.solver_tol)
        return squash_scores(norms)

    Y_te = _received(cell.A_base, cell.X_te, cell.Z_te)
    err, r_star, dec, ok = _evaluate(cell, scores_of, Y_va, Y_te)
    runner = lambda Y: apply_threshold(scores_of(Y), r_star)  # noqa: E731
    return err, r_star, dec, ok, runner, ""


def _run_amp(cell: _Cell):
    model = cell.model

    def scores_of(Y):
        pi, _ = mmv_amp(Y, cell.A_base, model.p, model.sigma2)
        return pi

    Y_va = _received(cell.A_base, cell.X_va, cell.Z_va)
    Y_te = _received(cell.A_base, cell.X_te, cell.Z_te)
    r_star, _ = calibrate_threshold(scores_of(Y_va), cell.a_va)
    pi_te, info = mmv_amp(Y_te, cell.A_base, model.p, model.sigma2)
    dec = apply_threshold(pi_te, r_star)
    ok = ~np.atleast_1d(info["diverged"])
    flags = "" if ok.all() else f"diverged:{int((~ok).sum())}"
    err = error_rate(dec[ok], cell.a_te[ok]) if ok.any() else None
    runner = lambda Y: apply_threshold(scores_of(Y), r_star)  # noqa: E731
    return err, r_star, dec, ok, runner, flags


def _run_ml(cell: _Cell):
    model = cell.model

    def scores_of(Y):
        gamma, _ = cov_ml(sample_covariance(Y), cell.A_base, model.sigma2)
        return squash_scores(gamma)

    Y_va = _received(cell.A_base, cell.X_va, cell.Z_va)
    Y_te = _received(cell.A_base, cell.X_te, cell.Z_te)
    err, r_star, dec, ok = _evaluate(cell, scores_of, Y_va, Y_te)
    runner = lambda Y: apply_threshold(scores_of(Y), r_star)  # noqa: E731
    return err, r_star, dec, ok, runner, ""


def _run_oracle(cell: _Cell):
    dec = cell.a_te.copy()
    ok = np.ones(dec.shape[0], dtype=bool)

    def runner(Y):
        return dec[:Y.shape[0]].copy()

    return 0.0, None, dec, ok, runner, ""


_RUNNERS = {
    "proposed": lambda c: _run_trained(c, "covariance"),
    "naive": lambda c: _run_trained(c, "raw"),
    "lasso": _run_lasso,
    "glasso": _run_glasso,
    "amp": _run_amp,
    "ml": _run_ml,
    "oracle": _run_oracle,
}


def _cell_records(cell: _Cell, decisions: dict) -> list[SweepRecord]:
    spec, model = cell.spec, cell.model
    ratio = model.p1 / model.p2 if model.p2 > 0 else None
    common = dict(axis=spec.axis, axis_value=cell.value, N=model.N, L=cell.L,
                  M=model.M, L_over_N=cell.L / model.N, p=model.p,
                  p1_over_p2=ratio, G=model.G, seed=cell.seed)
    records = []
    for scheme in spec.schemes:
        try:
            err, r_star, dec, ok, runner, flags = _RUNNERS[scheme](cell)
        except Exception as exc:   # noqa: BLE001 -- flagged, never fatal
            records.append(SweepRecord(scheme=scheme, error_rate=None,
                                       time_per_sample_s=None,
                                       threshold_used=None,
                                       solver_flags=f"error:{type(exc).__name__}",
                                       **common))
            continue
        n_time = min(spec.timing_count, spec.test_count)
        Y_sub = _timing_input(cell, scheme)
        Y_sub = _sub(Y_sub, n_time)
        tps = time_detection(runner, Y_sub, spec.timing_reps)
        tag = _cell_tag(scheme, spec.axis, cell.value, cell.seed)
        decisions[tag + "|dec"] = dec.astype(np.uint8)
        decisions[tag + "|alpha"] = cell.a_te.astype(np.uint8)
        decisions[tag + "|ok"] = ok
        records.append(SweepRecord(scheme=scheme, error_rate=err,
                                   time_per_sample_s=tps,
                                   threshold_used=r_star,
                                   solver_flags=flags, **common))
    return records


def _timing_input(cell: _Cell, scheme: str) -> ComplexMatrix:
    if scheme in ("proposed", "naive"):
        net = cell.cache.get_or_train(cell.model, cell.L,
                                      "covariance" if scheme == "proposed"
                                      else "raw", cell.seed, cell.spec)
        return _received(net.A, cell.X_te, cell.Z_te)
    return _received(cell.A_base, cell.X_te, cell.Z_te)


def _cell_tag(scheme: str, axis: str, value, seed: int) -> str:
    return f"{scheme}|{axis}|{float(value):.6g}|{seed}"


# -- the sweep driver ------------------------------------------------------

def run_sweep(spec: SweepSpec, out_csv: str | None = None,
              cache: ModelCache | None = None,
              progress=None) -> tuple[list[SweepRecord], list[str]]:
    """Evaluate every (axis value, seed, scheme) cell; write CSV and the
    decisions sidecar when `out_csv` is given.

    Returns (records, audit_problems).  JSSR_THREADS > 1 runs cells in
    parallel threads (timing stays serialized by the lock).
    """
    if cache is None:
        cache = ModelCache()
    cells = [(value, seed) for value in spec.values for seed in spec.seeds]
    decisions: dict[str, np.ndarray] = {}
    results: dict[tuple, list[SweepRecord]] = {}

    def work(value, seed):
        local: dict[str, np.ndarray] = {}
        recs = _cell_records(_make_cell(spec, value, seed, cache), local)
        return (value, seed), recs, local

    workers = max(1, int(os.environ.get("JSSR_THREADS", "1")))
    if workers == 1:
        outs = [work(v, s) for v, s in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            outs = list(ex.map(lambda c: work(*c), cells))
    for key, recs, local in outs:
        results[key] = recs
        decisions.update(local)
        if progress:
            progress(key, recs)

    records = []
    for value in spec.values:         # deterministic CSV order
        for seed in spec.seeds:
            records.extend(results[(value, seed)])

    if out_csv:
        write_csv(out_csv, records)
        np.savez(out_csv + ".decisions.npz", **decisions)
    problems = audit(records, decisions)
    return records, problems


# -- invariant audit -------------------------------------------------------

def audit(records: list[SweepRecord],
          decisions: dict[str, np.ndarray]) -> list[str]:
    """Check record invariants against the stored decisions.

    Returns human-readable problem strings; empty means the sweep is
    internally consistent.
    """
    problems = []
    for r in records:
        where = f"{r.scheme}@{r.axis}={r.axis_value} seed {r.seed}"
        if r.solver_flags.startswith("error:"):
            if r.error_rate is not None:
                problems.append(f"{where}: failed row carries an error rate")
            continue
        if r.error_rate is None:
            if not r.solver_flags:   # fully-flagged cells have nothing to check
                problems.append(f"{where}: missing error_rate without a flag")
            continue
        if not 0.0 <= r.error_rate <= 1.0:
            problems.append(f"{where}: error_rate {r.error_rate!r} not in [0,1]")
            continue
        if r.time_per_sample_s is None or r.time_per_sample_s <= 0:
            problems.append(f"{where}: nonpositive time {r.time_per_sample_s!r}")
        if r.scheme == "oracle" and r.error_rate != 0.0:
            problems.append(f"{where}: oracle missed the truth")
        tag = _cell_tag(r.scheme, r.axis, r.axis_value, r.seed)
        try:
            dec = decisions[tag + "|dec"].astype(np.float64)
            alpha = decisions[tag + "|alpha"].astype(np.float64)
            ok = decisions[tag + "|ok"]
        except KeyError:
            problems.append(f"{where}: stored decisions missing")
            continue
        redo = error_rate(dec[ok], alpha[ok])
        if abs(redo - r.error_rate) > 1e-12:
            problems.append(
                f"{where}: stored decisions give {redo}, CSV says "
                f"{r.error_rate}")
    return problems


def verify_results(csv_path: str) -> list[str]:
    """Re-derive every error_rate from the decisions sidecar on disk."""
    rows = read_csv(csv_path)
    with np.load(csv_path + ".decisions.npz") as z:
        decisions = {k: z[k] for k in z.files}
    records = [SweepRecord(
        scheme=row["scheme"], axis=row["axis"], axis_value=row["axis_value"],
        N=row["N"], L=row["L"], M=row["M"], L_over_N=row["L_over_N"],
        p=row["p"], p1_over_p2=row["p1_over_p2"], G=row["G"],
        seed=row["seed"], error_rate=row["error_rate"],
        time_per_sample_s=row["time_per_sample_s"],
        threshold_used=row["threshold_used"],
        solver_flags=row["solver_flags"]) for row in rows]
    return audit(records, decisions)


# -- shipped configurations ------------------------------------------------

def default_configs() -> dict[str, SweepSpec]:
    """The two base configurations every experiment starts from.

    `desk` finishes on a laptop CPU; `paper-full` is the full-size run
    (hours of training) and is opt-in.  Both fix the mean access
    probability at 0.1 with the odd groups three times as active as
    the even ones.
    """
    desk = SweepSpec(
        name="desk", N=100, L=14, M=4, G=10, p1=0.15, p2=0.05, sigma2=0.1,
        axis="L_over_N", values=(0.08, 0.14, 0.20),
        train_count=20_000, val_count=2_000, test_count=2_000)
    full = SweepSpec(
        name="paper-full", N=500, L=70, M=4, G=50, p1=0.15, p2=0.05,
        sigma2=0.1, axis="L_over_N", values=(0.08, 0.14, 0.20),
        train_count=90_000, val_count=10_000, test_count=10_000)
    return {"desk": desk, "paper-full": full}


# -- config files ----------------------------------------------------------

CONFIG_SCHEMA = 1

_SECTIONS = {
    "sweep": ["name", "axis", "values", "schemes", "seeds"],
    "model": ["N", "L", "M", "G", "p1", "p2", "sigma2"],
    "data": ["train_count", "val_count", "test_count"],
    "train": ["batch_size", "max_epochs", "patience", "lr"],
    "solver": ["lasso_max_iter", "glasso_max_iter", "solver_tol",
               "lambda_split"],
    "timing": ["timing_count", "timing_reps"],
}


def _toml_value(v) -> str:
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def write_config(path: str, spec: SweepSpec) -> None:
    lines = [f"schema = {CONFIG_SCHEMA}", ""]
    for section, keys in _SECTIONS.items():
        lines.append(f"[{section}]")
        for k in keys:
            lines.append(f"{k} = {_toml_value(getattr(spec, k))}")
        lines.append("")
    with open(path, "w") as f:
        f.write("\n".join(lines))


def read_config(path: str) -> SweepSpec:
    try:
        import tomllib as toml
    except ModuleNotFoundError:       # Python < 3.11
        import tomli as toml
    with open(path, "rb") as f:
        data = toml.load(f)
    if data.get("schema") != CONFIG_SCHEMA:
        raise ValueError(f"unsupported config schema {data.get('schema')!r}")
    kwargs = {}
    known = {f.name for f in fields(SweepSpec)}
    for section, content in data.items():
        if section == "schema":
            continue
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section [{section}]")
        for k, v in content.items():
            if k not in known:
                raise ValueError(f"unknown key {k!r} in [{section}]")
            kwargs[k] = tuple(v) if isinstance(v, list) else v
    # a bare [model] config is enough to generate data / train: default
    # the sweep bookkeeping to a single point at the base configuration
    kwargs.setdefault("name", os.path.splitext(os.path.basename(path))[0])
    kwargs.setdefault("axis", "L_over_N")
    kwargs.setdefault("values", (kwargs["L"] / kwargs["N"],))
    return SweepSpec(**kwargs)
