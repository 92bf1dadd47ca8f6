#!/usr/bin/env python3
"""Same test set, every detector: error rate and per-sample runtime."""

import argparse
import time

import numpy as np

from jssr.autoencoder import ActivityNet, NetConfig, encoder_forward, \
    extract_sensing_matrix, sample_covariance
from jssr.baselines import cov_lasso, cov_ml, gaussian_pilots, \
    group_lambda_max, group_lasso, lasso_lambda_max, mmv_amp
from jssr.complexmat import ComplexMatrix, crandn, rng_from_seed
from jssr.signal_model import GroupActivityModel, measure, sample_batch
from jssr.thresholding import apply_threshold, calibrate_threshold, \
    error_rate, squash_scores
from jssr.training import TrainConfig, train

ap = argparse.ArgumentParser()
ap.add_argument("--N", type=int, default=40)
ap.add_argument("--L", type=int, default=8)
ap.add_argument("--M", type=int, default=4)
ap.add_argument("--test", type=int, default=400)
ap.add_argument("--epochs", type=int, default=40)
args = ap.parse_args()

model = GroupActivityModel(N=args.N, M=args.M, G=8, p1=0.15, p2=0.05,
                           sigma2=0.1)
rng = rng_from_seed(11)

X_tr, a_tr = sample_batch(model, rng, 4000)
X_va, a_va = sample_batch(model, rng, 600)
X_te, a_te = sample_batch(model, rng, args.test)
A_iid = gaussian_pilots(model.N, args.L, rng)
Y_va = measure(A_iid, X_va, model.sigma2, rng)
Y_te = measure(A_iid, X_te, model.sigma2, rng)

rows = []


def clock(name, fn, scores_va, scores_te):
    """Calibrate on val scores, threshold test scores, time the test pass."""
    r_star, _ = calibrate_threshold(scores_va, a_va)
    t0 = time.perf_counter()
    fn()  # timed re-run of the detector on the test set
    dt = (time.perf_counter() - t0) / args.test
    err = error_rate(apply_threshold(scores_te, r_star), a_te)
    rows.append((name, err, dt))


# -- trained decoder (learns its own pilots) -------------------------------
net = ActivityNet.init(NetConfig(N=model.N, L=args.L, M=args.M,
                                 sigma2=model.sigma2), rng)
train(net, X_tr, a_tr, X_va, a_va, rng,
      TrainConfig(max_epochs=args.epochs, patience=10))
A_net = extract_sensing_matrix(net)
Zv = crandn(rng, 600, args.L, args.M) * np.sqrt(model.sigma2)
Zt = crandn(rng, args.test, args.L, args.M) * np.sqrt(model.sigma2)
sv = net.scores(encoder_forward(X_va, A_net, Zv))
st = net.scores(encoder_forward(X_te, A_net, Zt))
clock("decoder", lambda: net.scores(encoder_forward(X_te, A_net, Zt)),
      sv, st)

# -- covariance lasso ------------------------------------------------------
C_va, C_te = sample_covariance(Y_va), sample_covariance(Y_te)
lam = 0.1 * lasso_lambda_max(C_va, A_iid)
sv = squash_scores(cov_lasso(C_va, A_iid, lam)[0])
st = squash_scores(cov_lasso(C_te, A_iid, lam)[0])
clock("cov-lasso", lambda: cov_lasso(C_te, A_iid, lam), sv, st)

# -- group lasso -----------------------------------------------------------
lam_g = 0.3 * group_lambda_max(Y_va, A_iid)
sv = squash_scores(group_lasso(Y_va, A_iid, lam_g)[0])
st = squash_scores(group_lasso(Y_te, A_iid, lam_g)[0])
clock("group-lasso", lambda: group_lasso(Y_te, A_iid, lam_g), sv, st)

# -- AMP -------------------------------------------------------------------
sv = mmv_amp(Y_va, A_iid, model.p, model.sigma2)[0]
st = mmv_amp(Y_te, A_iid, model.p, model.sigma2)[0]
clock("amp", lambda: mmv_amp(Y_te, A_iid, model.p, model.sigma2), sv, st)

# -- covariance ML ---------------------------------------------------------
sv = squash_scores(cov_ml(C_va, A_iid, model.sigma2)[0])
st = squash_scores(cov_ml(C_te, A_iid, model.sigma2)[0])
clock("cov-ml", lambda: cov_ml(C_te, A_iid, model.sigma2), sv, st)

print(f"\n{args.test} test samples, N={model.N}, L={args.L}, M={args.M}")
print(f"{'detector':<12} {'error':>8} {'sec/sample':>12}")
for name, err, dt in sorted(rows, key=lambda r: r[1]):
    print(f"{name:<12} {err:>8.4f} {dt:>12.2e}")
