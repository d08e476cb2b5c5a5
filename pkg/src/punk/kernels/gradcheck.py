"""Finite-difference gradient checking."""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor


def grad_check(fn, arrays: dict[str, np.ndarray], eps: float = 1e-4) -> float:
    """Max relative error between analytic and central-difference gradients.

    `fn` maps a dict of leaf Tensors to a scalar Tensor. Coordinates whose
    forward and backward one-sided differences disagree strongly are skipped:
    that signals the perturbation straddled a ReLU/max kink, where the
    comparison is meaningless.
    """
    leaves = {k: Tensor(np.array(v, dtype=np.float64)) for k, v in arrays.items()}
    out = fn(leaves)
    out.backward()
    analytic = {
        k: (t.grad if t.grad is not None else np.zeros_like(t.data))
        for k, t in leaves.items()
    }

    worst = 0.0
    for name, base in arrays.items():
        base = np.array(base, dtype=np.float64)
        flat_grad = analytic[name].reshape(-1)
        for i in range(base.size):
            orig = base.reshape(-1)[i]

            def eval_at(val):
                pt = {k: v.copy() for k, v in arrays.items()}
                pt[name] = np.array(pt[name], dtype=np.float64)
                pt[name].reshape(-1)[i] = val
                return float(fn({k: Tensor(v) for k, v in pt.items()}).data)

            f_plus = eval_at(orig + eps)
            f_minus = eval_at(orig - eps)
            f_mid = eval_at(orig)
            d_plus = (f_plus - f_mid) / eps
            d_minus = (f_mid - f_minus) / eps
            # kink detection: one-sided slopes should agree to O(eps)
            if abs(d_plus - d_minus) > 1e-2 * max(1.0, abs(d_plus) + abs(d_minus)):
                continue
            numeric = (f_plus - f_minus) / (2.0 * eps)
            a = flat_grad[i]
            if abs(a - numeric) < 1e-7:
                # below central-difference roundoff; treat as agreement
                continue
            err = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, err)
    return worst
