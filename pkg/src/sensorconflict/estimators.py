"""scikit-learn style wrappers around the fusion pipeline.

Columns of ``X`` are sources, rows are synchronized samples.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .conflict import DEFAULT_MAX_SOURCES, build_lattice
from .evidence import SampleSeries, WindowSpec, evidence_frames
from .fusion import fuse_series


def _check_X(X, min_sources=1):
    X = check_array(X, dtype=float, ensure_all_finite=True, ensure_min_samples=1)
    if X.shape[1] < min_sources:
        raise ValueError(f"need at least {min_sources} source columns, got {X.shape[1]}")
    return X


class ConflictWeightedFusion(TransformerMixin, BaseEstimator):
    """Fuse sensor columns with weights that shrink as a source's conflict grows.

    Parameters
    ----------
    window : int
        Samples per evaluation window.
    stride : int
        Step between consecutive window starts.
    sigma_mult : float
        Interval half-width in standard deviations.
    exponent : int
        Weights are proportional to ``SumC ** -exponent``.
    weighting : {"window", "global"}
        Recompute weights per window, or once over the whole record.
    max_sources : int
        Refuse more sources than this (the lattice has ``2**n - 1`` entries).

    Attributes
    ----------
    sample_weights_ : ndarray of shape (n_samples, n_sources)
        Weight applied to each source at each sample of the fitted data.
    window_weights_ : ndarray of shape (n_windows, n_sources)
    window_starts_ : ndarray of shape (n_windows,)
    lattices_ : list of ConflictLattice
    """

    def __init__(self, window=10, stride=1, sigma_mult=3.0, exponent=1, weighting="window", max_sources=DEFAULT_MAX_SOURCES):
        self.window = window
        self.stride = stride
        self.sigma_mult = sigma_mult
        self.exponent = exponent
        self.weighting = weighting
        self.max_sources = max_sources

    def fit(self, X, y=None):
        X = _check_X(X, min_sources=2)
        spec = WindowSpec(self.window, self.stride, self.sigma_mult)
        fused, per_sample, records = fuse_series(
            X, spec, self.exponent, self.weighting, self.max_sources
        )
        self.n_features_in_ = X.shape[1]
        self.n_samples_fit_ = X.shape[0]
        self.sample_weights_ = per_sample
        self.window_weights_ = np.array([w.weights for _, _, w in records])
        self.window_starts_ = np.array([f.window_start for f, _, _ in records])
        self.lattices_ = [lat for _, lat, _ in records]
        self._fused = fused
        return self

    def transform(self, X):
        """Weighted sum of the columns, shape ``(n_samples, 1)``.

        Per-window weights are tied to sample positions, so ``X`` must have
        the fitted length unless ``weighting="global"``.
        """
        check_is_fitted(self, "sample_weights_")
        X = _check_X(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} sources, fitted with {self.n_features_in_}")
        if X.shape[0] == self.n_samples_fit_:
            w = self.sample_weights_
        elif self.weighting == "global":
            w = np.broadcast_to(self.window_weights_[0], X.shape)
        else:
            raise ValueError(
                f"X has {X.shape[0]} samples but per-window weights were fitted on {self.n_samples_fit_}"
            )
        fused = np.einsum("ij,ij->i", X, w)
        return np.clip(fused, X.min(axis=1), X.max(axis=1))[:, None]

    def get_feature_names_out(self, input_features=None):
        return np.array(["fused"], dtype=object)


class AverageFusion(TransformerMixin, BaseEstimator):
    """Equal-weight baseline: the row mean of the source columns."""

    def fit(self, X, y=None):
        X = _check_X(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_X(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} sources, fitted with {self.n_features_in_}")
        return np.clip(X.mean(axis=1), X.min(axis=1), X.max(axis=1))[:, None]

    def get_feature_names_out(self, input_features=None):
        return np.array(["average"], dtype=object)


class ConflictLatticeTransformer(TransformerMixin, BaseEstimator):
    """Map source columns to per-window conflict values, one column per subset.

    Output has shape ``(n_windows, 2**n_sources - 1)``; column ``c`` holds the
    subset with bitmask ``c + 1``.
    """

    def __init__(self, window=10, stride=1, sigma_mult=3.0, max_sources=DEFAULT_MAX_SOURCES):
        self.window = window
        self.stride = stride
        self.sigma_mult = sigma_mult
        self.max_sources = max_sources

    def fit(self, X, y=None):
        X = _check_X(X)
        if X.shape[1] > self.max_sources:
            raise ValueError(f"{X.shape[1]} sources exceeds max_sources={self.max_sources}")
        WindowSpec(self.window, self.stride, self.sigma_mult)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_X(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} sources, fitted with {self.n_features_in_}")
        series = [SampleSeries(j + 1, X[:, j]) for j in range(X.shape[1])]
        frames = evidence_frames(series, WindowSpec(self.window, self.stride, self.sigma_mult))
        n_subsets = 2 ** X.shape[1] - 1
        out = np.empty((len(frames), n_subsets))
        for r, frame in enumerate(frames):
            lattice = build_lattice(frame, self.max_sources)
            out[r] = [lattice[mask] for mask in range(1, n_subsets + 1)]
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_in_")
        n = self.n_features_in_
        names = []
        for mask in range(1, 2**n):
            members = [str(j + 1) for j in range(n) if mask >> j & 1]
            names.append("g_" + "_".join(members))
        return np.array(names, dtype=object)
