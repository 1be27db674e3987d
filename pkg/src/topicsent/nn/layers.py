"""Recurrent, pooling and output layers with hand-written backward passes.

Everything is batched: sequences are (B, T, d) arrays with a (B, T) mask of
valid steps. Padding is on the right, and at a padded step the recurrent
state is carried through unchanged.
"""
import numpy as np

from ..errors import AllMasked, BadLabel, ShapeMismatch

GRU_NAMES = ("W_z", "U_z", "b_z", "W_r", "U_r", "b_r", "W_h", "U_h", "b_h")
LSTM_NAMES = ("W_i", "U_i", "b_i", "W_f", "U_f", "b_f",
              "W_o", "U_o", "b_o", "W_c", "U_c", "b_c")


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_gru(rng, d, h):
    p = {}
    for g in "zrh":
        p[f"W_{g}"] = glorot(rng, d, h)
        p[f"U_{g}"] = glorot(rng, h, h)
        p[f"b_{g}"] = np.zeros(h)
    return p


def init_lstm(rng, d, h):
    p = {}
    for g in "ifoc":
        p[f"W_{g}"] = glorot(rng, d, h)
        p[f"U_{g}"] = glorot(rng, h, h)
        p[f"b_{g}"] = np.ones(h) if g == "f" else np.zeros(h)
    return p


def _check_seq(x, mask, W):
    if x.ndim != 3 or mask.shape != x.shape[:2] or x.shape[2] != W.shape[0]:
        raise ShapeMismatch(f"input {x.shape} / mask {mask.shape} vs weights {W.shape}")


def gru_forward(x, mask, p, h0=None):
    """GRU over (B, T, d). Returns hidden states (B, T, h) and a backward cache."""
    _check_seq(x, mask, p["W_z"])
    B, T, _ = x.shape
    H = p["U_z"].shape[0]
    h = np.zeros((B, H)) if h0 is None else h0
    # input projections for all steps at once
    xz = x @ p["W_z"] + p["b_z"]
    xr = x @ p["W_r"] + p["b_r"]
    xh = x @ p["W_h"] + p["b_h"]
    hs = np.empty((B, T, H))
    steps = []
    for t in range(T):
        m = mask[:, t, None]
        z = sigmoid(xz[:, t] + h @ p["U_z"])
        r = sigmoid(xr[:, t] + h @ p["U_r"])
        hh = np.tanh(xh[:, t] + (r * h) @ p["U_h"])
        hn = (1 - z) * h + z * hh
        h_new = m * hn + (1 - m) * h
        steps.append((h, z, r, hh))
        hs[:, t] = h = h_new
    return hs, (x, mask, p, steps)


def gru_backward(dhs, cache):
    x, mask, p, steps = cache
    B, T, _ = x.shape
    grads = {k: np.zeros_like(v) for k, v in p.items() if k in GRU_NAMES}
    dx = np.zeros_like(x)
    dh = np.zeros((B, p["U_z"].shape[0]))
    for t in reversed(range(T)):
        h, z, r, hh = steps[t]
        m = mask[:, t, None]
        dh = dh + dhs[:, t]
        dhn = m * dh
        dprev = (1 - m) * dh + dhn * (1 - z)
        dz = dhn * (hh - h)
        dhh = dhn * z
        da_h = dhh * (1 - hh * hh)
        drh = da_h @ p["U_h"].T
        dr = drh * h
        dprev += drh * r
        da_z = dz * z * (1 - z)
        da_r = dr * r * (1 - r)
        dprev += da_z @ p["U_z"].T + da_r @ p["U_r"].T
        xt = x[:, t]
        grads["W_z"] += xt.T @ da_z
        grads["W_r"] += xt.T @ da_r
        grads["W_h"] += xt.T @ da_h
        grads["U_z"] += h.T @ da_z
        grads["U_r"] += h.T @ da_r
        grads["U_h"] += (r * h).T @ da_h
        grads["b_z"] += da_z.sum(0)
        grads["b_r"] += da_r.sum(0)
        grads["b_h"] += da_h.sum(0)
        dx[:, t] = da_z @ p["W_z"].T + da_r @ p["W_r"].T + da_h @ p["W_h"].T
        dh = dprev
    return dx, dh, grads


def lstm_forward(x, mask, p):
    _check_seq(x, mask, p["W_i"])
    B, T, _ = x.shape
    H = p["U_i"].shape[0]
    W = np.concatenate([p["W_i"], p["W_f"], p["W_o"], p["W_c"]], axis=1)
    U = np.concatenate([p["U_i"], p["U_f"], p["U_o"], p["U_c"]], axis=1)
    b = np.concatenate([p["b_i"], p["b_f"], p["b_o"], p["b_c"]])
    xa = x @ W + b
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    hs = np.empty((B, T, H))
    steps = []
    for t in range(T):
        m = mask[:, t, None]
        a = xa[:, t] + h @ U
        i = sigmoid(a[:, :H])
        f = sigmoid(a[:, H:2 * H])
        o = sigmoid(a[:, 2 * H:3 * H])
        g = np.tanh(a[:, 3 * H:])
        cn = f * c + i * g
        tc = np.tanh(cn)
        hn = o * tc
        steps.append((h, c, i, f, o, g, tc))
        c = m * cn + (1 - m) * c
        h = m * hn + (1 - m) * h
        hs[:, t] = h
    return hs, (x, mask, p, W, U, steps)


def lstm_backward(dhs, cache):
    x, mask, p, W, U, steps = cache
    B, T, _ = x.shape
    H = U.shape[0]
    dW = np.zeros_like(W)
    dU = np.zeros_like(U)
    db = np.zeros(4 * H)
    dx = np.zeros_like(x)
    dh = np.zeros((B, H))
    dc = np.zeros((B, H))
    for t in reversed(range(T)):
        h, c, i, f, o, g, tc = steps[t]
        m = mask[:, t, None]
        dh = dh + dhs[:, t]
        dhn = m * dh
        dcn = m * dc + dhn * o * (1 - tc * tc)
        da = np.concatenate([
            dcn * g * i * (1 - i),
            dcn * c * f * (1 - f),
            dhn * tc * o * (1 - o),
            dcn * i * (1 - g * g),
        ], axis=1)
        dW += x[:, t].T @ da
        dU += h.T @ da
        db += da.sum(0)
        dx[:, t] = da @ W.T
        dh = (1 - m) * dh + da @ U.T
        dc = (1 - m) * dc + dcn * f
    grads = {}
    for j, gname in enumerate("ifoc"):
        sl = slice(j * H, (j + 1) * H)
        grads[f"W_{gname}"] = dW[:, sl]
        grads[f"U_{gname}"] = dU[:, sl]
        grads[f"b_{gname}"] = db[sl]
    return dx, grads


def reverse_index(mask):
    """Per-row index that reverses the valid prefix and leaves padding in place."""
    B, T = mask.shape
    lengths = mask.sum(1).astype(int)
    t = np.arange(T)[None, :]
    rev = np.where(t < lengths[:, None], lengths[:, None] - 1 - t, t)
    return np.arange(B)[:, None], rev


def bilstm_forward(x, mask, p_fwd, p_bwd):
    """Concatenated [forward ; backward] states, shape (B, T, 2h)."""
    hf, cf = lstm_forward(x, mask, p_fwd)
    rows, rev = reverse_index(mask)
    hr, cb = lstm_forward(x[rows, rev], mask, p_bwd)
    hb = hr[rows, rev]
    return np.concatenate([hf, hb], axis=2), (cf, cb, rows, rev)


def bilstm_backward(dhs, cache):
    cf, cb, rows, rev = cache
    H = dhs.shape[2] // 2
    dxf, gf = lstm_backward(dhs[:, :, :H], cf)
    dxr, gb = lstm_backward(dhs[:, :, H:][rows, rev], cb)
    return dxf + dxr[rows, rev], gf, gb


def gap_forward(h, mask):
    n = mask.sum(1)
    if np.any(n == 0):
        raise AllMasked("sequence with no valid steps")
    return (h * mask[:, :, None]).sum(1) / n[:, None], (mask, n)


def gap_backward(dout, cache):
    mask, n = cache
    return dout[:, None, :] * mask[:, :, None] / n[:, None, None]


def softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def dense_softmax(x, W, b):
    return softmax(x @ W + b)


def cross_entropy(probs, labels):
    """Mean -log p[label] over the batch and d(loss)/d(logits)."""
    labels = np.asarray(labels)
    C = probs.shape[-1]
    if labels.size and (labels.min() < 0 or labels.max() >= C):
        raise BadLabel(f"labels outside 0..{C - 1}")
    B = probs.shape[0]
    p = np.maximum(probs[np.arange(B), labels], 1e-12)
    loss = float(-np.log(p).mean())
    dlogits = probs.copy()
    dlogits[np.arange(B), labels] -= 1.0
    return loss, dlogits / B
