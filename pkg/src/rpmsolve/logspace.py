"""Small log-space helpers. All arrays are float64 natural-log probabilities."""

import numpy as np

NEG_INF = -np.inf


def logsumexp(a, axis=None):
    """log(sum(exp(a))) that returns -inf (no warning) for all -inf input."""
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return NEG_INF if axis is None else np.full(np.delete(a.shape, axis), NEG_INF)
    m = np.max(a, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m_safe), axis=axis, keepdims=True)) + m_safe
    out = np.where(np.isfinite(m), out, m)
    if axis is None:
        return float(out.reshape(()))
    return np.squeeze(out, axis=axis)


def normalize(logp):
    """Shift log weights so they sum to one. Caller handles the all -inf case."""
    logp = np.asarray(logp, dtype=np.float64)
    return logp - logsumexp(logp)


def scatter_logsumexp(values, index, size):
    """Group-wise logsumexp: out[k] = logsumexp(values[index == k])."""
    values = np.asarray(values, dtype=np.float64)
    index = np.asarray(index, dtype=np.intp)
    m = np.full(size, NEG_INF)
    np.maximum.at(m, index, values)
    finite = np.isfinite(m)
    m_safe = np.where(finite, m, 0.0)
    acc = np.bincount(index, weights=np.exp(values - m_safe[index]), minlength=size)
    with np.errstate(divide="ignore"):
        out = np.log(acc) + m_safe
    out[~finite] = NEG_INF
    return out


def safe_log(p):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(p, dtype=np.float64))
