"""Batched matrix exponential: scaling and squaring around a [13/13] Pade core."""

from __future__ import annotations

import numpy as np

# Higham (2005), Table 2.3 / Algorithm 2.3
_B13 = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152


def _pade13(a: np.ndarray) -> np.ndarray:
    b = _B13
    n = a.shape[-1]
    ident = np.broadcast_to(np.eye(n, dtype=a.dtype), a.shape)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    return np.linalg.solve(v - u, v + u)


def expm(a) -> np.ndarray:
    """exp(a) for a square matrix or a stack of them (shape (..., n, n)).

    Each matrix in the stack gets its own scaling exponent.
    """
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expm needs square matrices, got shape {a.shape}")
    if not np.iscomplexobj(a):
        a = a.astype(float)
    stack = a.reshape((-1,) + a.shape[-2:])
    norms = np.abs(stack).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        s = np.where(norms > _THETA13, np.ceil(np.log2(norms / _THETA13)), 0.0).astype(int)
    # sort by exponent so every squaring pass works on a contiguous prefix
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    out = _pade13(stack[order] * (2.0 ** -s_sorted)[:, None, None])
    active = int(np.sum(s_sorted > 0))
    k = 0
    while active:
        out[:active] = out[:active] @ out[:active]
        k += 1
        active = int(np.sum(s_sorted > k))
        if k % 8 == 0 and active:
            # underflowed matrices stay zero under squaring
            dead = ~np.any(out[:active] != 0, axis=(1, 2))
            if dead.all():
                break
    result = np.empty_like(out)
    result[order] = out
    out = result
    return out.reshape(a.shape)
