"""Optimizer arithmetic, the training loop, and checkpoint files."""

import numpy as np
import pytest

from jssr.autoencoder import ActivityNet, NetConfig
from jssr.complexmat import ComplexMatrix, crandn, rng_from_seed
from jssr.signal_model import GroupActivityModel, sample_batch
from jssr.training import (
    Adam,
    TrainConfig,
    load_checkpoint,
    save_checkpoint,
    train,
)


def test_adam_matches_hand_rolled_two_steps():
    # independent reference: scalar Adam unrolled by hand
    p = np.array([1.0])
    opt = Adam([p], lr=0.1)
    g1, g2 = np.array([0.5]), np.array([-0.2])

    m = v = 0.0
    theta = 1.0
    for t, g in [(1, 0.5), (2, -0.2)]:
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        mhat = m / (1 - 0.9**t)
        vhat = v / (1 - 0.999**t)
        theta -= 0.1 * mhat / (np.sqrt(vhat) + 1e-8)

    opt.step([p], [g1])
    opt.step([p], [g2])
    assert p[0] == pytest.approx(theta, rel=1e-12)


def test_adam_minimizes_quadratic():
    p = np.array([5.0, -3.0])
    opt = Adam([p], lr=0.05)
    for _ in range(2000):
        opt.step([p], [2 * p])
    assert np.all(np.abs(p) < 1e-3)


def tiny_setup(seed=0, features="covariance"):
    model = GroupActivityModel(N=8, M=2, G=2, p1=0.3, p2=0.1, sigma2=0.1)
    cfg = NetConfig(N=8, L=4, M=2, sigma2=0.1, Q=16, features=features)
    rng = rng_from_seed(seed)
    net = ActivityNet.init(cfg, rng)
    Xtr, atr = sample_batch(model, rng, 256)
    Xva, ava = sample_batch(model, rng, 96)
    return net, Xtr, atr, Xva, ava


def test_training_improves_validation_loss():
    net, Xtr, atr, Xva, ava = tiny_setup()
    res = train(net, Xtr, atr, Xva, ava, rng_from_seed(1),
                TrainConfig(batch_size=32, max_epochs=15, patience=15))
    assert res.val_loss[-1] < res.val_loss[0] or \
        min(res.val_loss) < res.val_loss[0]
    assert res.best_epoch == int(np.argmin(res.val_loss)) + 1
    assert len(res.train_loss) == res.epochs_run


def test_early_stopping_respects_patience():
    net, Xtr, atr, Xva, ava = tiny_setup(seed=2)
    res = train(net, Xtr, atr, Xva, ava, rng_from_seed(3),
                TrainConfig(batch_size=32, max_epochs=200, patience=3))
    assert res.epochs_run <= 200
    if res.epochs_run < 200:
        assert res.epochs_run - res.best_epoch >= 3


def test_pilot_columns_stay_normalized():
    net, Xtr, atr, Xva, ava = tiny_setup(seed=4)
    train(net, Xtr, atr, Xva, ava, rng_from_seed(5),
          TrainConfig(batch_size=64, max_epochs=3, patience=3))
    np.testing.assert_allclose(net.A.column_norms(), 2.0, atol=1e-10)


def test_training_is_deterministic():
    outs = []
    for _ in range(2):
        net, Xtr, atr, Xva, ava = tiny_setup(seed=6)
        train(net, Xtr, atr, Xva, ava, rng_from_seed(7),
              TrainConfig(batch_size=64, max_epochs=3, patience=3))
        outs.append((net.A.re.copy(), net.dec.weights[0].copy()))
    np.testing.assert_array_equal(outs[0][0], outs[1][0])
    np.testing.assert_array_equal(outs[0][1], outs[1][1])


def test_epoch_log_rows_are_well_formed():
    net, Xtr, atr, Xva, ava = tiny_setup(seed=12)
    res = train(net, Xtr, atr, Xva, ava, rng_from_seed(13),
                TrainConfig(batch_size=64, max_epochs=4, patience=4))
    rows = res.log_rows()
    assert len(rows) == res.epochs_run
    assert [r[0] for r in rows] == list(range(1, res.epochs_run + 1))
    secs = [r[3] for r in rows]
    assert all(b >= a for a, b in zip(secs, secs[1:]))  # cumulative clock
    assert secs[-1] <= res.wall_seconds


def test_non_finite_loss_aborts_with_diagnostic():
    net, Xtr, atr, Xva, ava = tiny_setup(seed=14)
    net.dec.weights[0][0, 0] = np.nan
    with pytest.raises(RuntimeError, match="diverged"):
        train(net, Xtr, atr, Xva, ava, rng_from_seed(15),
              TrainConfig(batch_size=64, max_epochs=2, patience=2))


@pytest.mark.parametrize("features", ["covariance", "raw"])
def test_overfits_a_toy_problem(features):
    # 32 samples, tiny model: the loop should drive training BCE below
    # 0.05 within 500 epochs if gradients/optimizer/projection cooperate
    model = GroupActivityModel(N=20, M=4, G=4, p1=0.3, p2=0.1, sigma2=0.01)
    rng = rng_from_seed(16)
    cfg = NetConfig(N=20, L=6, M=4, sigma2=0.01, features=features)
    net = ActivityNet.init(cfg, rng)
    Xtr, atr = sample_batch(model, rng, 32)
    res = train(net, Xtr, atr, Xtr, atr, rng_from_seed(17),
                TrainConfig(batch_size=32, max_epochs=500, patience=500))
    assert min(res.train_loss) < 0.05, \
        f"stalled at {min(res.train_loss):.4f} ({features})"


def test_checkpoint_round_trip(tmp_path):
    net, *_ = tiny_setup(seed=8)
    path = str(tmp_path / "net.ckpt")
    save_checkpoint(path, net, seed=42, threshold=0.37)
    net2, meta = load_checkpoint(path)
    assert meta["threshold"] == 0.37
    assert meta["seed"] == 42
    assert net2.cfg == net.cfg
    np.testing.assert_array_equal(net2.A.re, net.A.re)
    np.testing.assert_array_equal(net2.A.im, net.A.im)
    for W1, W2 in zip(net.dec.weights, net2.dec.weights):
        np.testing.assert_array_equal(W1, W2)
    for b1, b2 in zip(net.dec.biases, net2.dec.biases):
        np.testing.assert_array_equal(b1, b2)

    Y = crandn(rng_from_seed(9), 5, 4, 2)
    np.testing.assert_array_equal(net.scores(Y), net2.scores(Y))


def test_checkpoint_without_threshold(tmp_path):
    net, *_ = tiny_setup(seed=10)
    path = str(tmp_path / "net.ckpt")
    save_checkpoint(path, net, seed=0)
    _, meta = load_checkpoint(path)
    assert meta["threshold"] is None


def test_checkpoint_rejects_bad_version(tmp_path):
    p = tmp_path / "bad.ckpt"
    p.write_bytes(b'{"version": 9}\n')
    with pytest.raises(ValueError, match="version"):
        load_checkpoint(str(p))


def test_checkpoint_rejects_truncation(tmp_path):
    net, *_ = tiny_setup(seed=11)
    path = str(tmp_path / "net.ckpt")
    save_checkpoint(path, net, seed=0)
    blob = open(path, "rb").read()
    open(path, "wb").write(blob[:-8])
    with pytest.raises(ValueError, match="payload"):
        load_checkpoint(path)
