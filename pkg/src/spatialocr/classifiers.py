"""One-vs-one kernel SVM (trained by SMO) and a k-nearest-neighbor baseline.

Both classifiers operate on min-max normalized feature vectors; the
normalization statistics travel with the model so ``predict`` accepts raw
feature vectors.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, TrainingError
from .features import FeatureVector, fit_normalization

DEFAULT_SIGMA = 0.6
DEFAULT_C = 10.0
DEFAULT_TOL = 1e-3
DEFAULT_MAX_UPDATES = 100_000
_SNAP = 1e-12


@dataclass(frozen=True)
class KernelParams:
    kind: str = "rbf"
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if self.kind not in ("rbf", "linear"):
            raise InvalidParameterError(f"unknown kernel {self.kind!r}")
        if self.kind == "rbf" and not self.sigma > 0:
            raise InvalidParameterError(f"RBF sigma must be > 0, got {self.sigma}")


def kernel_eval(x, y, p=KernelParams()):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if p.kind == "linear":
        return float(np.dot(x, y))
    d = x - y
    return math.exp(-float(np.dot(d, d)) / (2.0 * p.sigma * p.sigma))


def kernel_matrix(a, b, p):
    """Kernel values between rows of ``a`` and rows of ``b``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if p.kind == "linear":
        return a @ b.T
    # explicit differences keep K(x, y) == K(y, x) bit for bit
    d = a[:, None, :] - b[None, :, :]
    sq = np.einsum("ijk,ijk->ij", d, d)
    return np.exp(-sq / (2.0 * p.sigma * p.sigma))


@dataclass(frozen=True, eq=False)
class BinarySvmModel:
    support_vectors: np.ndarray  # (m, d)
    alphas: np.ndarray  # (m,)
    signs: np.ndarray  # (m,) of +-1
    bias: float
    C: float
    kernel: KernelParams
    converged: bool = True
    updates: int = 0

    def decision(self, x):
        """Decision values for one vector or a matrix of row vectors."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if self.alphas.size == 0:
            out = np.full(1 if single else x.shape[0], self.bias)
        else:
            k = kernel_matrix(x, self.support_vectors, self.kernel)
            out = k @ (self.alphas * self.signs) + self.bias
        return float(out[0]) if single else out

    def predict(self, x):
        d = self.decision(x)
        return np.where(np.asarray(d) >= 0, 1, -1)


class _Smo:
    """Platt's sequential minimal optimization on the soft-margin dual.

    Kernel rows are computed on demand; the error vector ``E = f(x) - y``
    is kept for every sample and updated incrementally after each step.
    """

    def __init__(self, x, y, C, kernel, tol, max_updates, rng, eps, callback):
        self.x, self.y, self.C, self.kernel = x, y, C, kernel
        self.tol, self.max_updates, self.rng, self.eps = tol, max_updates, rng, eps
        self.callback = callback
        n = len(y)
        self.alpha = np.zeros(n)
        self.b = 0.0
        self.E = -y.astype(float)
        self.updates = 0

    def row(self, i):
        return kernel_matrix(self.x[i], self.x, self.kernel)[0]

    def take_step(self, i1, i2):
        if i1 == i2:
            return False
        C, y, alpha = self.C, self.y, self.alpha
        a1, a2 = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        E1, E2 = self.E[i1], self.E[i2]
        s = y1 * y2
        if y1 != y2:
            lo, hi = max(0.0, a2 - a1), min(C, C + a2 - a1)
        else:
            lo, hi = max(0.0, a2 + a1 - C), min(C, a2 + a1)
        if hi - lo <= _SNAP * C:
            return False
        r1, r2 = self.row(i1), self.row(i2)
        k11, k12, k22 = r1[i1], r1[i2], r2[i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            new2 = min(max(a2 + y2 * (E1 - E2) / eta, lo), hi)
        else:
            # objective at both ends of the feasible segment
            f1 = y1 * (E1 - self.b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (E2 - self.b) - s * a1 * k12 - a2 * k22
            l1 = a1 + s * (a2 - lo)
            h1 = a1 + s * (a2 - hi)
            obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12
            obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12
            if obj_lo < obj_hi - self.eps:
                new2 = lo
            elif obj_lo > obj_hi + self.eps:
                new2 = hi
            else:
                new2 = a2
        if abs(new2 - a2) < self.eps * (new2 + a2 + self.eps):
            return False
        new1 = a1 + s * (a2 - new2)
        if new1 < _SNAP * C:
            new1 = 0.0
        elif new1 > C * (1 - _SNAP):
            new1 = C
        if new2 < _SNAP * C:
            new2 = 0.0
        elif new2 > C * (1 - _SNAP):
            new2 = C

        d1 = y1 * (new1 - a1)
        d2 = y2 * (new2 - a2)
        b1 = self.b - E1 - d1 * k11 - d2 * k12
        b2 = self.b - E2 - d1 * k12 - d2 * k22
        if 0 < new1 < C:
            b_new = b1
        elif 0 < new2 < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        self.E += d1 * r1 + d2 * r2 + (b_new - self.b)
        self.b = b_new
        alpha[i1], alpha[i2] = new1, new2
        self.updates += 1
        if self.callback is not None:
            self.callback(alpha.copy(), self.b)
        return True

    def violates(self, i):
        r = self.E[i] * self.y[i]
        a = self.alpha[i]
        return (r < -self.tol and a < self.C) or (r > self.tol and a > 0)

    def examine(self, i2):
        if not self.violates(i2):
            return False
        n = len(self.y)
        bound = (self.alpha <= 0) | (self.alpha >= self.C)
        free = np.flatnonzero(~bound)
        if free.size > 1:
            i1 = int(free[np.argmax(np.abs(self.E[free] - self.E[i2]))])
            if self.take_step(i1, i2):
                return True
        if free.size:
            start = int(self.rng.integers(free.size))
            for i1 in np.roll(free, -start):
                if self.take_step(int(i1), i2):
                    return True
        start = int(self.rng.integers(n))
        for i1 in np.roll(np.arange(n), -start):
            if self.take_step(int(i1), i2):
                return True
        return False

    def run(self):
        n = len(self.y)
        examine_all = True
        changed = 0
        while changed > 0 or examine_all:
            changed = 0
            if examine_all:
                candidates = range(n)
            else:
                candidates = np.flatnonzero((self.alpha > 0) & (self.alpha < self.C)).tolist()
            for i in candidates:
                changed += self.examine(i)
                if self.updates >= self.max_updates:
                    return False
            if examine_all:
                examine_all = False
            elif changed == 0:
                examine_all = True
        return True


def train_binary_svm(samples, labels, C=DEFAULT_C, kernel=KernelParams(), tol=DEFAULT_TOL,
                     max_passes=DEFAULT_MAX_UPDATES, seed=0, eps=1e-10, callback=None):
    """Soft-margin dual SVM trained with SMO.

    ``max_passes`` caps the number of pair updates; hitting it returns a
    best-effort model with ``converged=False``. ``seed`` drives the random
    starting points of the second-multiplier search. ``callback(alphas, b)``
    is invoked after every update.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    y = np.asarray(labels, dtype=float).ravel()
    if x.shape[0] != y.size:
        raise InvalidParameterError(f"{x.shape[0]} samples but {y.size} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InvalidParameterError("labels must be -1 or +1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise InvalidParameterError("both classes must be present")
    if not C > 0 or not tol > 0:
        raise InvalidParameterError("C and tol must be positive")
    smo = _Smo(x, y, float(C), kernel, float(tol), int(max_passes), np.random.default_rng(seed), eps, callback)
    finished = smo.run()
    sv = np.flatnonzero(smo.alpha > 0)
    model = BinarySvmModel(
        support_vectors=x[sv].copy(),
        alphas=smo.alpha[sv].copy(),
        signs=y[sv].astype(int),
        bias=float(smo.b),
        C=float(C),
        kernel=kernel,
        converged=finished,
        updates=smo.updates,
    )
    if finished and kkt_violations(model, x, y, tol, alphas=smo.alpha).size:
        model = BinarySvmModel(model.support_vectors, model.alphas, model.signs, model.bias,
                               model.C, kernel, False, smo.updates)
    return model


def kkt_violations(model, samples, labels, tol=DEFAULT_TOL, alphas=None):
    """Indices of training samples that break the KKT conditions by > ``tol``.

    ``alphas`` gives the multiplier of every training sample; when omitted
    it is recovered by matching rows against the model's support vectors.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    y = np.asarray(labels, dtype=float).ravel()
    if alphas is None:
        alphas = np.zeros(len(y))
        for sv, a in zip(model.support_vectors, model.alphas):
            hit = np.flatnonzero(np.all(x == sv, axis=1))
            if hit.size:
                alphas[hit[0]] = a
    margin = y * model.decision(x)
    at_zero = alphas <= 0
    at_c = alphas >= model.C
    free = ~at_zero & ~at_c
    bad = (at_zero & (margin < 1 - tol)) | (at_c & (margin > 1 + tol)) | (free & (np.abs(margin - 1) > tol))
    return np.flatnonzero(bad)


@dataclass(frozen=True, eq=False)
class MulticlassSvmModel:
    classes: tuple
    pairs: tuple  # ((i, j, BinarySvmModel), ...) with classes[i] as +1
    normalization: object
    se_fraction: float = 0.7
    op_order: str = "opening"
    kernel: KernelParams = field(default_factory=KernelParams)
    C: float = DEFAULT_C

    @property
    def converged(self):
        return all(m.converged for _, _, m in self.pairs)


def _as_rows(vectors):
    return np.vstack([v.as_array() if isinstance(v, FeatureVector) else np.asarray(v, dtype=float)
                      for v in vectors])


def train_multiclass(vectors, labels, C=DEFAULT_C, kernel=KernelParams(), seed=0, classes=None,
                     tol=DEFAULT_TOL, max_passes=DEFAULT_MAX_UPDATES, se_fraction=0.7, op_order="opening"):
    """One binary SVM per unordered class pair on normalized features."""
    labels = list(labels)
    if classes is None:
        classes = tuple(dict.fromkeys(labels))
    classes = tuple(classes)
    if len(classes) < 2:
        raise InvalidParameterError("need at least two classes")
    present = set(labels)
    missing = [c for c in classes if c not in present]
    if missing:
        raise InvalidParameterError(f"classes without training samples: {missing}")
    raw = _as_rows(vectors)
    stats = fit_normalization(raw)
    x = stats.apply(raw)
    y = np.array([classes.index(lbl) for lbl in labels])
    pairs = []
    for i, j in itertools.combinations(range(len(classes)), 2):
        mask = (y == i) | (y == j)
        signs = np.where(y[mask] == i, 1, -1)
        try:
            model = train_binary_svm(x[mask], signs, C, kernel, tol, max_passes, seed=[seed, i, j])
        except InvalidParameterError as exc:
            raise TrainingError(f"pair ({classes[i]}, {classes[j]}): {exc}", (classes[i], classes[j])) from exc
        pairs.append((i, j, model))
    return MulticlassSvmModel(classes, tuple(pairs), stats, se_fraction, op_order, kernel, float(C))


def vote(model, x_normalized):
    """Vote counts and summed |decision| of the winning votes, per class."""
    k = len(model.classes)
    votes = np.zeros(k, dtype=int)
    confidence = np.zeros(k)
    for i, j, m in model.pairs:
        d = m.decision(x_normalized)
        winner = i if d >= 0 else j
        votes[winner] += 1
        confidence[winner] += abs(d)
    return votes, confidence


def predict(model, x):
    """Majority vote; ties go to the largest summed |decision|, then class order."""
    raw = x.as_array() if isinstance(x, FeatureVector) else np.asarray(x, dtype=float)
    votes, confidence = vote(model, model.normalization.apply(raw))
    tied = np.flatnonzero(votes == votes.max())
    best = tied[np.argmax(confidence[tied])]  # argmax keeps the first on equal sums
    return model.classes[int(best)]


@dataclass(frozen=True, eq=False)
class KnnModel:
    vectors: np.ndarray  # normalized training vectors
    labels: tuple
    k: int
    normalization: object
    classes: tuple
    se_fraction: float = 0.7
    op_order: str = "opening"


def train_knn(vectors, labels, k=3, classes=None, se_fraction=0.7, op_order="opening"):
    labels = tuple(labels)
    if not labels:
        raise InvalidParameterError("k-NN needs at least one training vector")
    if not 1 <= k <= len(labels):
        raise InvalidParameterError(f"k must be in [1, {len(labels)}], got {k}")
    raw = _as_rows(vectors)
    stats = fit_normalization(raw)
    classes = tuple(classes) if classes is not None else tuple(dict.fromkeys(labels))
    return KnnModel(stats.apply(raw), labels, int(k), stats, classes, se_fraction, op_order)


def knn_classify(model, x):
    """Majority of the k nearest; vote ties go to the smallest mean distance, then class order."""
    raw = x.as_array() if isinstance(x, FeatureVector) else np.asarray(x, dtype=float)
    q = model.normalization.apply(raw)
    dist = np.sqrt(((model.vectors - q) ** 2).sum(axis=1))
    nearest = np.argsort(dist, kind="stable")[: model.k]
    tally = {}
    for idx in nearest:
        tally.setdefault(model.labels[idx], []).append(dist[idx])
    order = {c: n for n, c in enumerate(model.classes)}
    return min(tally, key=lambda c: (-len(tally[c]), sum(tally[c]) / len(tally[c]), order.get(c, len(order))))
