"""From-scratch fully connected network predicting the next configuration.

Inputs are (current, goal) pairs; positions are normalized to [-1, 1]
from the workspace bounds and every angle is fed and predicted as a
(sin, cos) pair so the +/-pi seam never appears in the loss.  Training is
plain mini-batch Adam on mean squared error, 64-bit throughout, fully
deterministic given a seed.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._kernels import KIND_ARM, KIND_POINT, KIND_RIGID, wrap_angles
from .geometry import CSpace

_MAGIC = b"NTPLMD01"


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 150
    batch_size: int = 64
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    val_split: float = 0.1
    hidden: tuple = (256, 256, 256, 256)
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if not 0.0 <= self.val_split < 1.0:
            raise ValueError(f"val_split must be in [0, 1), got {self.val_split}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


class Codec:
    """Configuration <-> network-vector encoding for one robot model."""

    def __init__(self, kind: int, dim: int, center, scale):
        self.kind = kind
        self.dim = dim
        self.center = np.asarray(center, dtype=np.float64)
        self.scale = np.asarray(scale, dtype=np.float64)
        if np.any(self.scale == 0) or not np.all(np.isfinite(self.scale)):
            raise ValueError("normalization scale must be finite and nonzero")
        self.enc_dim = {KIND_POINT: 2, KIND_RIGID: 4}.get(kind, 2 * dim)

    @classmethod
    def for_cspace(cls, cs: CSpace) -> "Codec":
        b = cs.bounds
        center = [(b[0] + b[2]) / 2.0, (b[1] + b[3]) / 2.0]
        scale = [(b[2] - b[0]) / 2.0, (b[3] - b[1]) / 2.0]
        return cls(cs.kind, cs.dim, center, scale)

    def encode(self, q: np.ndarray) -> np.ndarray:
        q = np.atleast_2d(np.asarray(q, dtype=np.float64))
        if self.kind == KIND_ARM:
            out = np.empty((q.shape[0], 2 * self.dim))
            out[:, 0::2] = np.sin(q)
            out[:, 1::2] = np.cos(q)
        elif self.kind == KIND_RIGID:
            out = np.empty((q.shape[0], 4))
            out[:, 0:2] = (q[:, 0:2] - self.center) / self.scale
            out[:, 2] = np.sin(q[:, 2])
            out[:, 3] = np.cos(q[:, 2])
        else:
            out = (q - self.center) / self.scale
        return out

    def decode(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        single = v.ndim == 1
        v = np.atleast_2d(v)
        if self.kind == KIND_ARM:
            out = np.arctan2(v[:, 0::2], v[:, 1::2])
            out = wrap_angles(out)
        elif self.kind == KIND_RIGID:
            out = np.empty((v.shape[0], 3))
            out[:, 0:2] = v[:, 0:2] * self.scale + self.center
            out[:, 2] = wrap_angles(np.arctan2(v[:, 2], v[:, 3]))
        else:
            out = v * self.scale + self.center
        return out[0] if single else out

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim,
                "center": self.center.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], d["dim"], d["center"], d["scale"])


class MlpModel:
    """ReLU multilayer perceptron with explicit float64 weight arrays."""

    def __init__(self, codec: Codec, weights, biases):
        self.codec = codec
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        for w, b in zip(self.weights, self.biases):
            if w.shape[1] != b.shape[0]:
                raise ValueError("weight/bias shape mismatch")
        for a, b in zip(self.weights, self.weights[1:]):
            if a.shape[1] != b.shape[0]:
                raise ValueError("consecutive layer dimensions incompatible")

    @property
    def layer_sizes(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def forward_encoded(self, x: np.ndarray) -> np.ndarray:
        h = np.atleast_2d(x)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i != last:
                np.maximum(h, 0.0, out=h)
        return h

    def predict_next(self, current, goal) -> np.ndarray:
        """Next configuration toward the goal (syntactic validity only)."""
        c = self.codec
        current = np.asarray(current, dtype=np.float64)
        goal = np.asarray(goal, dtype=np.float64)
        if current.shape != (c.dim,) or goal.shape != (c.dim,):
            raise ValueError(f"configuration shape mismatch, model dimension {c.dim}")
        x = np.concatenate([c.encode(current)[0], c.encode(goal)[0]])[None, :]
        return c.decode(self.forward_encoded(x))[0]

    def params(self):
        for w, b in zip(self.weights, self.biases):
            yield w
            yield b


def init_model(cs_or_codec, hidden=(256, 256, 256, 256), seed=0) -> MlpModel:
    codec = cs_or_codec if isinstance(cs_or_codec, Codec) else Codec.for_cspace(cs_or_codec)
    sizes = [2 * codec.enc_dim] + list(hidden) + [codec.enc_dim]
    rng = np.random.default_rng([seed, 0x11])
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(codec, weights, biases)


def mse_loss(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    out = model.forward_encoded(x)
    diff = out - y
    return float(np.mean(diff * diff))


def loss_and_grads(model: MlpModel, x: np.ndarray, y: np.ndarray):
    """Mean-squared-error loss and its gradient for every weight and bias."""
    acts = [np.atleast_2d(x)]
    pre = []
    h = acts[0]
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0) if i != last else z
        acts.append(h)
    diff = acts[-1] - y
    loss = float(np.mean(diff * diff))
    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    delta = 2.0 * diff / diff.size
    for i in range(last, -1, -1):
        grad_w[i] = acts[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (pre[i - 1] > 0.0)
    return loss, grad_w, grad_b


class _Adam:
    def __init__(self, params, cfg: TrainConfig):
        self.cfg = cfg
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        cfg = self.cfg
        self.t += 1
        b1t = 1.0 - cfg.beta1 ** self.t
        b2t = 1.0 - cfg.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * (g * g)
            p -= cfg.lr * (m / b1t) / (np.sqrt(v / b2t) + cfg.eps)


def encode_training_arrays(dataset, codec: Codec):
    """(current ++ goal) encodings as inputs, encoded next state as target."""
    xc = codec.encode(dataset.current)
    xg = codec.encode(dataset.goal)
    y = codec.encode(dataset.next)
    return np.hstack([xc, xg]), y


def train(dataset, cfg: TrainConfig, cs: CSpace = None, codec: Codec = None):
    """Fit a model to a dataset; returns (model, report).

    The report carries per-epoch train/validation losses.  Aborts with a
    diagnostic if the loss goes non-finite.
    """
    if dataset.n_samples == 0:
        raise ValueError("cannot train on an empty dataset")
    if codec is None:
        if cs is None:
            from .geometry import environment_from_dict
            cs = environment_from_dict(dataset.metadata["environment"]).cspace()
        codec = Codec.for_cspace(cs)
    model = init_model(codec, cfg.hidden, cfg.seed)
    x, y = encode_training_arrays(dataset, codec)

    rng = np.random.default_rng([cfg.seed, 0x7A])
    perm = rng.permutation(x.shape[0])
    n_val = int(round(x.shape[0] * cfg.val_split))
    val_idx = perm[:n_val]
    train_idx = perm[n_val:]
    if train_idx.size == 0:
        raise ValueError("validation split leaves no training samples")
    xv, yv = x[val_idx], y[val_idx]
    xt, yt = x[train_idx], y[train_idx]

    params = list(model.params())
    opt = _Adam(params, cfg)
    train_losses = []
    val_losses = []
    n = xt.shape[0]
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            loss, gw, gb = loss_and_grads(model, xt[idx], yt[idx])
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"training diverged: non-finite loss at epoch {epoch}, batch {lo // cfg.batch_size}")
            grads = []
            for a, b in zip(gw, gb):
                grads.append(a)
                grads.append(b)
            opt.step(params, grads)
            total += loss * idx.size
        train_losses.append(total / n)
        val_losses.append(mse_loss(model, xv, yv) if n_val else float("nan"))
    report = {
        "epochs": cfg.epochs,
        "n_train": int(n),
        "n_val": int(n_val),
        "train_loss": train_losses,
        "val_loss": val_losses,
        "final_train_loss": train_losses[-1],
    }
    return model, report


def gradient_check(model: MlpModel, x, y, n_coords=20, eps=1e-5, seed=0):
    """Largest relative error between analytic and central-difference
    gradients over randomly probed coordinates of every parameter tensor."""
    rng = np.random.default_rng(seed)
    _, gw, gb = loss_and_grads(model, x, y)
    analytic = []
    for a, b in zip(gw, gb):
        analytic.append(a)
        analytic.append(b)
    worst = 0.0
    for p, g in zip(model.params(), analytic):
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for k in rng.choice(flat.size, size=min(n_coords, flat.size), replace=False):
            orig = flat[k]
            flat[k] = orig + eps
            lp = mse_loss(model, x, y)
            flat[k] = orig - eps
            lm = mse_loss(model, x, y)
            flat[k] = orig
            fd = (lp - lm) / (2.0 * eps)
            denom = max(abs(fd), abs(gflat[k]), 1e-10)
            worst = max(worst, abs(fd - gflat[k]) / denom)
    return worst


# ---------------------------------------------------------------------------
# model files
# ---------------------------------------------------------------------------

def save_model(model: MlpModel, path):
    head = {
        "tool_version": __version__,
        "codec": model.codec.to_dict(),
        "layer_sizes": model.layer_sizes,
    }
    meta = json.dumps(head, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)
        for p in model.params():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_model(path) -> MlpModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _MAGIC:
        raise ValueError(f"{path} is not a model file (bad magic)")
    (meta_len,) = struct.unpack_from("<I", blob, 8)
    head = json.loads(blob[12:12 + meta_len].decode())
    codec = Codec.from_dict(head["codec"])
    sizes = head["layer_sizes"]
    off = 12 + meta_len
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        w = np.frombuffer(blob, "<f8", fan_in * fan_out, off).reshape(fan_in, fan_out)
        off += w.nbytes
        b = np.frombuffer(blob, "<f8", fan_out, off)
        off += b.nbytes
        weights.append(w.copy())
        biases.append(b.copy())
    return MlpModel(codec, weights, biases)
