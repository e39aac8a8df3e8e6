"""L2-regularized binary logistic regression, trained by gradient descent.

The model is deliberately linear and nothing more: features do all the
lifting, the classifier only draws a hyperplane. Training minimizes

    (1/M) sum_i log(1 + exp(-y_i (w . x_i + b))) + (lambda/2) ||w||^2

with labels y in {-1, +1} internally ({0, 1} at the boundary) and the
intercept unpenalized. The optimizer is gradient descent with a backtracking
(Armijo) line search; the trial step uses the Barzilai-Borwein scaling from
the previous iterate, which keeps plain first-order descent usable at the
tight default tolerance. The loss sequence is non-increasing and the whole
procedure is deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .features import FeatureMatrix

_ARMIJO_C = 1e-4
_MAX_BACKTRACKS = 60


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, FeatureMatrix):
        return x.to_dense().astype(np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("design matrix must be 2-D")
    return x


def _as_labels(y, rows: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (rows,):
        raise ValueError(f"expected {rows} labels, got shape {y.shape}")
    vals = np.unique(y)
    if not np.isin(vals, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    if vals.size < 2:
        raise ValueError("training data must contain both classes")
    return y.astype(np.float64)


@dataclass
class LinearClassifier:
    """Trained weights, intercept, and the lambda they were fit with."""

    weights: np.ndarray
    intercept: float
    reg_lambda: float

    def decision_function(self, x) -> np.ndarray:
        x = _as_matrix(x)
        return x @ self.weights + self.intercept

    def predict(self, x) -> np.ndarray:
        """Predicted {0, 1} labels; a score of exactly 0 goes to class 0."""
        return (self.decision_function(x) > 0).astype(np.int64)

    def save(self, path: str | Path) -> None:
        payload = {
            "weights": self.weights.tolist(),
            "intercept": float(self.intercept),
            "lambda": float(self.reg_lambda),
        }
        Path(path).write_text(json.dumps(payload) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "LinearClassifier":
        payload = json.loads(Path(path).read_text())
        return cls(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            intercept=float(payload["intercept"]),
            reg_lambda=float(payload["lambda"]),
        )


def _margins(weights, intercept, x, y_pm) -> np.ndarray:
    return y_pm * (x @ weights + intercept)


def _loss_from_margins(margins, weights, reg_lambda) -> float:
    # log(1 + exp(-m)) via logaddexp stays finite for any margin
    loss = float(np.logaddexp(0.0, -margins).mean())
    return loss + 0.5 * reg_lambda * float(weights @ weights)


def _grad_from_margins(margins, weights, x, y_pm, reg_lambda):
    # d/dm log(1+e^-m) = -sigmoid(-m); evaluate sigmoid(-m) without overflow
    sig = np.empty_like(margins)
    pos = margins >= 0
    em = np.exp(-margins[pos])
    sig[pos] = em / (1.0 + em)
    sig[~pos] = 1.0 / (1.0 + np.exp(margins[~pos]))
    coef = (-y_pm / x.shape[0]) * sig
    grad_w = x.T @ coef + reg_lambda * weights
    grad_b = float(coef.sum())
    return grad_w, grad_b


def loss_and_gradient(
    weights: np.ndarray,
    intercept: float,
    x: np.ndarray,
    y01: np.ndarray,
    reg_lambda: float,
) -> tuple[float, np.ndarray, float]:
    """Regularized mean logistic loss and its gradient.

    Returns (loss, grad_weights, grad_intercept); the intercept is not
    regularized.
    """
    x = _as_matrix(x)
    weights = np.asarray(weights, dtype=np.float64)
    y_pm = 2.0 * np.asarray(y01, dtype=np.float64) - 1.0
    margins = _margins(weights, intercept, x, y_pm)
    loss = _loss_from_margins(margins, weights, reg_lambda)
    grad_w, grad_b = _grad_from_margins(margins, weights, x, y_pm, reg_lambda)
    return loss, grad_w, grad_b


def train(
    x,
    y,
    reg_lambda: float | None = None,
    tol: float = 1e-8,
    max_iter: int = 10_000,
) -> LinearClassifier:
    """Fit a classifier; lambda defaults to 1/M when not given.

    Accepts a dense array or a FeatureMatrix (unpacked once up front, so
    packed and dense training see the identical design matrix). Stops when
    the gradient's infinity norm drops to ``tol`` or after ``max_iter``
    gradient steps. The returned model carries a ``loss_history`` attribute
    with one entry per evaluated iterate.
    """
    xm = _as_matrix(x)
    if xm.size and not np.isfinite(xm).all():
        raise ValueError("design matrix must be finite")
    y01 = _as_labels(y, xm.shape[0])
    m, d = xm.shape
    lam = 1.0 / m if reg_lambda is None else float(reg_lambda)
    if lam < 0:
        raise ValueError("reg_lambda must be >= 0")
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be > 0 and max_iter >= 1")

    y_pm = 2.0 * y01 - 1.0
    w = np.zeros(d)
    b = 0.0
    margins = _margins(w, b, xm, y_pm)
    loss = _loss_from_margins(margins, w, lam)
    gw, gb = _grad_from_margins(margins, w, xm, y_pm, lam)
    history = [loss]
    prev_step_w = prev_step_b = None
    prev_gw = prev_gb = None

    for _ in range(max_iter):
        gnorm = max(np.abs(gw).max() if d else 0.0, abs(gb))
        if gnorm <= tol:
            break

        if prev_step_w is not None:
            # Barzilai-Borwein trial step: (s.s)/(s.dg) from the last move.
            dg_w = gw - prev_gw
            dg_b = gb - prev_gb
            ss = float(prev_step_w @ prev_step_w) + prev_step_b * prev_step_b
            sdg = float(prev_step_w @ dg_w) + prev_step_b * dg_b
            alpha = ss / sdg if sdg > 0 else 1.0
            alpha = min(max(alpha, 1e-12), 1e12)
        else:
            alpha = 1.0

        gg = float(gw @ gw) + gb * gb
        accepted = False
        for _bt in range(_MAX_BACKTRACKS):
            w_new = w - alpha * gw
            b_new = b - alpha * gb
            margins_new = _margins(w_new, b_new, xm, y_pm)
            loss_new = _loss_from_margins(margins_new, w_new, lam)
            if loss_new <= loss - _ARMIJO_C * alpha * gg:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break  # no descent at machine precision; treat as converged

        prev_step_w = w_new - w
        prev_step_b = b_new - b
        prev_gw, prev_gb = gw, gb
        w, b, loss = w_new, b_new, loss_new
        gw, gb = _grad_from_margins(margins_new, w, xm, y_pm, lam)
        history.append(loss)

    model = LinearClassifier(weights=w, intercept=float(b), reg_lambda=lam)
    model.loss_history = history
    return model


def evaluate(model: LinearClassifier, x, y) -> float:
    """Misclassification rate of the model on (x, y)."""
    xm = _as_matrix(x)
    y = np.asarray(y)
    if y.shape != (xm.shape[0],):
        raise ValueError("label count must match the number of rows")
    return float((model.predict(xm) != y).mean())
