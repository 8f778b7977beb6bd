import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levelblend.errors import ShapeError
from levelblend.neuralcore import (
    AdamState,
    DenseNet,
    GaussianParams,
    LRSchedule,
    adam_step,
    backward,
    forward,
    kl_standard_normal,
    reparameterize,
    softmax,
    softmax_cross_entropy,
)


def finite_difference(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        up = f()
        flat[i] = old - h
        down = f()
        flat[i] = old
        gflat[i] = (up - down) / (2 * h)
    return grad


def rel_error(a, b) -> float:
    return float(np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b))))


def random_net(rng, sizes):
    net = DenseNet.init(sizes, rng)
    for b in net.biases:
        b[:] = rng.normal(scale=0.1, size=b.shape)
    return net


# --- forward ------------------------------------------------------------------

def test_zero_net_gives_zero_output(rng):
    net = DenseNet.zeros([5, 4, 3])
    out, _ = forward(net, rng.normal(size=5))
    assert np.array_equal(out, np.zeros(3))


def test_identity_layer_passes_input_through(rng):
    net = DenseNet([np.eye(4)], [np.zeros(4)])
    x = rng.normal(size=4)
    out, _ = forward(net, x)
    assert np.array_equal(out, x)


def test_two_layer_fixture_matches_hand_product():
    w0 = np.array([[1.0, -1.0], [2.0, 0.5], [-1.0, -1.0]])
    b0 = np.array([0.0, -1.0, 0.5])
    w1 = np.array([[1.0, 2.0, 3.0]])
    b1 = np.array([0.25])
    x = np.array([1.0, 2.0])
    # hidden pre-activations: (-1, 2, -2.5) -> relu (0, 2, 0); output 2*2 + 0.25
    out, _ = forward(DenseNet([w0, w1], [b0, b1]), x)
    assert out.tolist() == [4.25]


def test_batched_forward_matches_rows(rng):
    net = random_net(rng, [6, 5, 4])
    x = rng.normal(size=(3, 6))
    batch, _ = forward(net, x)
    for i in range(3):
        row, _ = forward(net, x[i])
        np.testing.assert_allclose(batch[i], row, rtol=1e-12)


def test_forward_rejects_wrong_width():
    with pytest.raises(ShapeError):
        forward(DenseNet.zeros([3, 2]), np.zeros(4))


def test_mismatched_layers_rejected():
    with pytest.raises(ShapeError):
        DenseNet([np.zeros((3, 2)), np.zeros((2, 4))], [np.zeros(3), np.zeros(2)])


# --- backward -----------------------------------------------------------------

def check_gradients(net: DenseNet, x: np.ndarray, w: np.ndarray, tol: float) -> float:
    """Loss = sum(w * net(x)); compare analytic grads against central differences."""

    def loss():
        return float(np.sum(w * forward(net, x)[0]))

    out, cache = forward(net, x)
    grads, grad_in = backward(net, cache, w)
    worst = 0.0
    for p, g in zip(net.params(), grads):
        fd = finite_difference(loss, p)
        worst = max(worst, rel_error(g, fd))
    fd_in = finite_difference(loss, x)
    worst = max(worst, rel_error(grad_in, fd_in))
    assert worst < tol, worst
    return worst


def test_fixture_net_gradients(rng):
    net = random_net(rng, [4, 6, 5, 3])
    x = rng.normal(size=(2, 4))
    check_gradients(net, x, rng.normal(size=(2, 3)), 1e-4)


def test_zero_output_grad_gives_zero_gradients(rng):
    net = random_net(rng, [4, 5, 3])
    _, cache = forward(net, rng.normal(size=4))
    grads, grad_in = backward(net, cache, np.zeros(3))
    assert all(not g.any() for g in grads)
    assert not grad_in.any()


def test_dead_relu_unit_passes_no_gradient():
    w0 = np.array([[1.0, 0.0], [-1.0, 0.0]])
    b0 = np.array([0.0, -5.0])
    w1 = np.array([[1.0, 1.0]])
    net = DenseNet([w0, w1], [b0, np.zeros(1)])
    _, cache = forward(net, np.array([2.0, 1.0]))
    grads, _ = backward(net, cache, np.array([1.0]))
    assert not grads[0][1].any() and grads[1][1] == 0.0
    assert grads[2][0, 1] == 0.0


def test_backward_rejects_foreign_cache(rng):
    _, cache = forward(random_net(rng, [3, 4, 2]), np.zeros(3))
    with pytest.raises(ShapeError):
        backward(random_net(rng, [3, 5, 2]), cache, np.zeros(2))


@settings(max_examples=20)
@given(seed=st.integers(0, 2**32 - 1))
def test_gradient_property(seed):
    rng = np.random.default_rng(seed)
    depth = int(rng.integers(1, 4))
    sizes = [int(rng.integers(2, 7)) for _ in range(depth + 1)]
    net = random_net(rng, sizes)
    x = rng.normal(size=(int(rng.integers(1, 4)), sizes[0]))
    check_gradients(net, x, rng.normal(size=(x.shape[0], sizes[-1])), 1e-4)


# --- KL / softmax / reparameterisation ------------------------------------------

def test_kl_zero_at_standard_normal():
    kl, dmu, dlv = kl_standard_normal(GaussianParams(np.zeros(3), np.zeros(3)))
    assert kl == 0.0 and not dmu.any() and not dlv.any()


def test_kl_fixture_value():
    kl, _, _ = kl_standard_normal(GaussianParams([1.0, 0.0], [0.0, 0.0]))
    assert kl == pytest.approx(0.5, abs=1e-15)


def test_kl_gradients_match_finite_differences(rng):
    g = GaussianParams(rng.normal(size=5), rng.normal(scale=0.5, size=5))
    _, dmu, dlv = kl_standard_normal(g)
    fd_mu = finite_difference(lambda: kl_standard_normal(g)[0], g.mu)
    fd_lv = finite_difference(lambda: kl_standard_normal(g)[0], g.logvar)
    assert rel_error(dmu, fd_mu) < 1e-5
    assert rel_error(dlv, fd_lv) < 1e-5


def test_uniform_logits_loss_is_log_vocab():
    loss, _ = softmax_cross_entropy(np.zeros(4), np.array(2))
    assert loss == pytest.approx(math.log(4), abs=1e-14)


def test_peaked_logits_near_zero_loss():
    logits = np.array([0.0, 50.0, 0.0])
    loss, _ = softmax_cross_entropy(logits, np.array(1))
    assert loss < 1e-20


def test_cross_entropy_fixture_closed_form():
    logits = np.array([[1.0, 2.0, 3.0], [0.5, -0.5, 0.0]])
    target = np.array([0, 2])
    expected = -(math.log(math.exp(1) / (math.exp(1) + math.exp(2) + math.exp(3)))
                 + math.log(1.0 / (math.exp(0.5) + math.exp(-0.5) + 1.0)))
    loss, grad = softmax_cross_entropy(logits, target)
    assert loss == pytest.approx(expected, rel=1e-14)
    fd = finite_difference(lambda: softmax_cross_entropy(logits, target)[0], logits)
    assert rel_error(grad, fd) < 1e-6


def test_cross_entropy_rejects_bad_targets():
    with pytest.raises(ValueError):
        softmax_cross_entropy(np.zeros(3), np.array(3))
    with pytest.raises(ShapeError):
        softmax_cross_entropy(np.zeros((2, 3)), np.array([0]))


@given(st.lists(st.floats(-30, 30), min_size=1, max_size=8))
def test_softmax_normalised(values):
    p = softmax(np.array(values))
    assert p.sum() == pytest.approx(1.0) and (p >= 0).all()


def test_reparameterize_cases():
    mu = np.array([0.5, -1.0])
    assert np.array_equal(reparameterize(GaussianParams(mu, [3.0, -2.0]), np.zeros(2)), mu)
    n = np.array([0.25, 2.0])
    assert np.array_equal(reparameterize(GaussianParams(mu, np.zeros(2)), n), mu + n)
    z = reparameterize(GaussianParams(mu, [2.0, -2.0]), n)
    np.testing.assert_allclose(z, [0.5 + math.e * 0.25, -1.0 + 2.0 / math.e], rtol=1e-15)
    with pytest.raises(ShapeError):
        reparameterize(GaussianParams(mu, np.zeros(2)), np.zeros(3))


# --- Adam -----------------------------------------------------------------------

def reference_adam(p, g, m, v, t, lr, b1=0.9, b2=0.999, eps=1e-8):
    m = b1 * m + (1 - b1) * g
    v = b2 * v + (1 - b2) * g * g
    mhat = m / (1 - b1 ** t)
    vhat = v / (1 - b2 ** t)
    return p - lr * mhat / (np.sqrt(vhat) + eps), m, v


def test_zero_gradient_leaves_params(rng):
    params = [rng.normal(size=(3, 2)), rng.normal(size=3)]
    state = AdamState.for_params(params)
    new, state = adam_step(params, [np.zeros((3, 2)), np.zeros(3)], state)
    assert state.step == 1
    assert all(np.array_equal(a, b) for a, b in zip(params, new))


def test_first_step_moves_by_learning_rate():
    p = [np.array([1.0])]
    new, _ = adam_step(p, [np.array([1.0])], AdamState.for_params(p))
    assert 1.0 - new[0][0] == pytest.approx(0.001, rel=1e-6)


def test_adam_matches_reference_over_steps(rng):
    params = [rng.normal(size=(4, 3)), rng.normal(size=4)]
    ref = [p.copy() for p in params]
    rm = [np.zeros_like(p) for p in params]
    rv = [np.zeros_like(p) for p in params]
    state = AdamState.for_params(params)
    for t in range(1, 30):
        grads = [rng.normal(size=p.shape) for p in params]
        params, state = adam_step(params, grads, state, epoch=t)
        for i in range(2):
            ref[i], rm[i], rv[i] = reference_adam(ref[i], grads[i], rm[i], rv[i], t, 0.001)
    for a, b in zip(params, ref):
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_schedule_factor_and_decrement():
    s = LRSchedule()
    assert s.rate(0) == s.rate(2499) == 0.001
    assert s.rate(2500) == pytest.approx(1e-5, rel=1e-12)
    d = LRSchedule(factor=0.01, mode="decrement")
    assert d.rate(2500) == pytest.approx(0.001 * 0.99)
    with pytest.raises(ValueError):
        LRSchedule(mode="cosine")


def test_adam_uses_scheduled_rate():
    p = [np.array([0.0])]
    new, _ = adam_step(p, [np.array([1.0])], AdamState.for_params(p), epoch=2500)
    assert -new[0][0] == pytest.approx(1e-5, rel=1e-5)


def test_adam_shape_errors():
    p = [np.zeros(2)]
    with pytest.raises(ShapeError):
        adam_step(p, [np.zeros(3)], AdamState.for_params(p))
    with pytest.raises(ShapeError):
        adam_step(p, [], AdamState.for_params(p))
