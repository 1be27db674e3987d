import numpy as np


def rel_error(a, n):
    return np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)


def grad_check(loss_fn, params, analytic, epsilon=1e-5):
    """Max relative error between ``analytic`` grads and central differences.

    ``loss_fn()`` evaluates the scalar loss from the current contents of
    ``params`` (perturbed in place, then restored). Every entry of every
    array named in ``analytic`` is checked.
    """
    worst = 0.0
    for name, g in analytic.items():
        p = params[name]
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            ix = it.multi_index
            old = p[ix]
            p[ix] = old + epsilon
            lp = loss_fn()
            p[ix] = old - epsilon
            lm = loss_fn()
            p[ix] = old
            num = (lp - lm) / (2 * epsilon)
            worst = max(worst, float(rel_error(g[ix], num)))
    return worst
