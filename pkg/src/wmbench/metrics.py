"""Evaluation quantities: bit accuracy, detection rate, ROC/AUC, TPR@FPR,
feature statistics and Frechet distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FeatureBackendMissing, InvalidArgument, NumericalInconsistency

# Bit-accuracy thresholds for the "successfully decodes" verdict, chosen so
# a random message clears them with probability ~1e-6 (binomial tail).
DETECT_THRESHOLDS = {100: 0.75, 32: 0.90}


def detect_threshold(bits: int) -> float:
    return DETECT_THRESHOLDS.get(int(bits), 0.75 if bits >= 100 else 0.90)


def bit_accuracy(pred, truth) -> float:
    """Fraction of matching positions between two equal-length bit vectors."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise InvalidArgument(f"length mismatch {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise InvalidArgument("empty messages")
    return float(np.mean(pred.astype(np.int64) == truth.astype(np.int64)))


def detection_rate(verdicts) -> float:
    """Fraction of positive verdicts."""
    verdicts = list(verdicts)
    if not verdicts:
        raise InvalidArgument("empty verdict list")
    return float(np.mean([bool(v) for v in verdicts]))


@dataclass(frozen=True)
class ROC:
    """Exact ROC curve from a threshold sweep (includes (0,0) and (1,1))."""

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def roc_auc(pos_scores, neg_scores) -> ROC:
    """Threshold-sweep ROC; AUC via trapezoid rule.

    Counts are accumulated as integers so the AUC equals the Mann-Whitney
    pairwise probability (ties counted 1/2) exactly, not just to rounding.
    """
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos.size == 0 or neg.size == 0:
        raise InvalidArgument("both score sets must be nonempty")

    scores = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(pos.size, dtype=np.int64),
                             np.zeros(neg.size, dtype=np.int64)])
    order = np.argsort(-scores, kind="stable")
    scores = scores[order]
    labels = labels[order]

    # group ties: one operating point per distinct score
    fprs = [0]
    tprs = [0]
    thresholds = []
    tp = fp = 0
    area2 = 0  # twice the area, in integer counts
    i = 0
    n = scores.size
    while i < n:
        j = i
        while j < n and scores[j] == scores[i]:
            j += 1
        tp_new = tp + int(labels[i:j].sum())
        fp_new = fp + int((j - i) - labels[i:j].sum())
        area2 += (fp_new - fp) * (tp + tp_new)
        thresholds.append(scores[i])
        fprs.append(fp_new)
        tprs.append(tp_new)
        tp, fp = tp_new, fp_new
        i = j

    auc = area2 / (2 * pos.size * neg.size)
    return ROC(thresholds=np.asarray(thresholds),
               fpr=np.asarray(fprs, dtype=np.float64) / neg.size,
               tpr=np.asarray(tprs, dtype=np.float64) / pos.size,
               auc=float(auc))


def tpr_at_fpr(roc: ROC, fpr_target: float) -> float:
    """TPR at the largest achievable FPR <= target (step convention)."""
    if not (0 < fpr_target < 1):
        raise InvalidArgument(f"fpr target must be in (0, 1), got {fpr_target}")
    feasible = roc.fpr <= fpr_target
    return float(np.max(roc.tpr[feasible]))


@dataclass(frozen=True)
class FeatureStats:
    """Gaussian fit of a feature matrix."""

    mu: np.ndarray
    sigma: np.ndarray
    n: int


def feature_stats(features: np.ndarray) -> FeatureStats:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] < 2:
        raise InvalidArgument("need an (n >= 2) x d feature matrix")
    mu = features.mean(axis=0)
    sigma = np.cov(features, rowvar=False)
    return FeatureStats(mu=mu, sigma=np.atleast_2d(sigma), n=features.shape[0])


def _psd_sqrt(mat: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
    if vals.min() < -tol:
        raise NumericalInconsistency(f"matrix has eigenvalue {vals.min():.3g} "
                                     f"below -{tol:.0e}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def fid(a: FeatureStats, b: FeatureStats) -> float:
    """Frechet distance between two Gaussian feature fits.

    Tr sqrt(Sigma_a Sigma_b) is computed from the eigendecomposition of the
    symmetrized product sqrt(Sigma_a) Sigma_b sqrt(Sigma_a), eigenvalues
    floored at zero.
    """
    if a.mu.shape != b.mu.shape:
        raise InvalidArgument(f"feature dimensionality mismatch "
                              f"{a.mu.shape} vs {b.mu.shape}")
    mean_term = float(np.sum((a.mu - b.mu) ** 2))
    sqrt_a = _psd_sqrt(a.sigma)
    inner = sqrt_a @ b.sigma @ sqrt_a
    vals = np.linalg.eigh((inner + inner.T) / 2.0)[0]
    if vals.min() < -1e-6:
        raise NumericalInconsistency(f"cross-covariance eigenvalue "
                                     f"{vals.min():.3g} below -1e-6")
    trace_sqrt = float(np.sum(np.sqrt(np.clip(vals, 0.0, None))))
    return mean_term + float(np.trace(a.sigma) + np.trace(b.sigma)) - 2.0 * trace_sqrt


class ProxyFeatureExtractor:
    """Fixed seeded convolutional feature backend for desk-scale FID.

    Absolute values are not comparable to Inception-based FIDs; only
    orderings are meaningful.
    """

    name = "proxy-conv-v1"

    def __init__(self, seed: int = 0, size: int = 64):
        import torch

        self.size = int(size)
        gen = torch.Generator().manual_seed(int(seed))
        widths = [3, 16, 32, 64]
        self._convs = []
        for cin, cout in zip(widths[:-1], widths[1:]):
            w = torch.randn((cout, cin, 3, 3), generator=gen)
            w /= np.sqrt(cin * 9)
            self._convs.append(w)

    def __call__(self, images: np.ndarray) -> np.ndarray:
        """images: (n, H, W, 3) in [0, 1] -> (n, d) feature matrix."""
        import torch
        import torch.nn.functional as tf

        images = np.asarray(images, dtype=np.float32)
        if images.ndim != 4 or images.shape[-1] != 3:
            raise InvalidArgument("expected (n, H, W, 3) image stack")
        if images.shape[1] != self.size or images.shape[2] != self.size:
            raise InvalidArgument(f"extractor expects {self.size}x{self.size} "
                                  f"input, got {images.shape[1:3]}")
        with torch.no_grad():
            x = torch.from_numpy(images).permute(0, 3, 1, 2)
            for w in self._convs:
                x = tf.relu(tf.conv2d(x, w, stride=2, padding=1))
            feats = torch.cat([x.mean(dim=(2, 3)), x.amax(dim=(2, 3))], dim=1)
        return feats.numpy().astype(np.float64)


def extract_features(images, extractor) -> np.ndarray:
    """One feature row per image via the given backend."""
    if extractor is None:
        raise FeatureBackendMissing("no feature backend configured")
    return extractor(np.asarray(images))
