"""Two-branch GRU / BiLSTM sentiment classifier: build, train, evaluate."""
import copy
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimMismatch, EmptyTest, EmptyTraining, NonFinite
from .ingest import CLASS_NAMES
from .nn import checkpoint
from .nn.layers import (GRU_NAMES, LSTM_NAMES, bilstm_backward, bilstm_forward,
                        cross_entropy, gap_backward, gap_forward, glorot,
                        gru_backward, gru_forward, init_gru, init_lstm, softmax)
from .nn.optim import RMSProp, clip_global_norm

log = logging.getLogger(__name__)

PAD, UNK = 0, 1
PAD_TOKEN, UNK_TOKEN = "<pad>", "<unk>"


@dataclass
class Dims:
    embed: int = 100
    gru_hidden: int = 128
    lstm_hidden: int = 256
    classes: int = 3


@dataclass
class TrainConfig:
    batch_size: int = 32
    max_epochs: int = 10
    lr: float = 0.001
    rho: float = 0.9
    eps: float = 1e-7
    seed: int = 0
    patience: int = 3  # 0 disables early stopping
    val_fraction: float = 0.1
    clip_norm: float = 5.0
    only_gru: bool = False
    only_bilstm: bool = False
    target_train_acc: float | None = None  # stop once reached (capacity checks)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0 <= self.val_fraction < 1:
            raise ValueError("val_fraction must be in [0, 1)")


@dataclass
class HybridModel:
    vocab: list
    dims: Dims
    params: dict

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def concat_width(self):
        return self.dims.gru_hidden + 2 * self.dims.lstm_hidden

    def n_params(self):
        return int(sum(p.size for p in self.params.values()))

    def encode(self, tokens):
        return [self.index.get(t, UNK) for t in tokens]

    def branch(self, prefix):
        n = len(prefix)
        return {k[n:]: v for k, v in self.params.items() if k.startswith(prefix)}

    def save(self, path, extra=None):
        meta = {"vocab": self.vocab, "dims": asdict(self.dims), **(extra or {})}
        checkpoint.save(path, self.params, meta)

    @classmethod
    def load(cls, path):
        tensors, meta = checkpoint.load(path)
        return cls(meta["vocab"], Dims(**meta["dims"]), tensors)


def param_names():
    names = ["emb_sa", "emb_tw"]
    names += [f"gru.{n}" for n in GRU_NAMES]
    names += [f"lstm_f.{n}" for n in LSTM_NAMES]
    names += [f"lstm_b.{n}" for n in LSTM_NAMES]
    return names + ["dense.W", "dense.b"]


def build_model(vocab, embeddings=None, dims=None, seed=0):
    """vocab: word list without the reserved ids; <pad>=0 and <unk>=1 are prepended."""
    dims = dims or Dims()
    if embeddings is not None and embeddings.dim != dims.embed:
        raise DimMismatch(f"embedding dim {embeddings.dim} != model dim {dims.embed}")
    words = [PAD_TOKEN, UNK_TOKEN] + [w for w in vocab if w not in (PAD_TOKEN, UNK_TOKEN)]
    rng = np.random.default_rng(seed)
    E = np.zeros((len(words), dims.embed))
    if embeddings is not None:
        for i, w in enumerate(words):
            if w in embeddings:
                E[i] = embeddings.vector(w)
    else:
        E[2:] = rng.uniform(-0.05, 0.05, size=(len(words) - 2, dims.embed))
    params = {"emb_sa": E.copy(), "emb_tw": E.copy()}
    params.update({f"gru.{k}": v for k, v in init_gru(rng, dims.embed, dims.gru_hidden).items()})
    params.update({f"lstm_f.{k}": v for k, v in init_lstm(rng, dims.embed, dims.lstm_hidden).items()})
    params.update({f"lstm_b.{k}": v for k, v in init_lstm(rng, dims.embed, dims.lstm_hidden).items()})
    params["dense.W"] = glorot(rng, dims.gru_hidden + 2 * dims.lstm_hidden, dims.classes)
    params["dense.b"] = np.zeros(dims.classes)
    params = {k: params[k] for k in param_names()}
    return HybridModel(words, dims, params)


def pad_batch(seqs, unk_if_empty=False):
    seqs = [list(s) if len(s) else ([UNK] if unk_if_empty else [PAD]) for s in seqs]
    T = max(len(s) for s in seqs)
    ids = np.zeros((len(seqs), T), dtype=np.int64)
    for i, s in enumerate(seqs):
        ids[i, :len(s)] = s
    mask = (ids != PAD).astype(np.float64)
    # an all-pad row (empty tweet) still gets one step so pooling is defined
    mask[mask.sum(1) == 0, 0] = 1.0
    return ids, mask


def forward_batch(model, sa_ids, sa_mask, tw_ids, tw_mask, only_gru=False, only_bilstm=False):
    p = model.params
    B = sa_ids.shape[0]
    feats, caches = [], {}
    if not only_bilstm:
        x_sa = p["emb_sa"][sa_ids]
        hs, cg = gru_forward(x_sa, sa_mask, model.branch("gru."))
        f_g, cp = gap_forward(hs, sa_mask)
        caches["gru"] = (cg, cp)
        feats.append(f_g)
    else:
        feats.append(np.zeros((B, model.dims.gru_hidden)))
    if not only_gru:
        x_tw = p["emb_tw"][tw_ids]
        hs, cl = bilstm_forward(x_tw, tw_mask, model.branch("lstm_f."), model.branch("lstm_b."))
        f_l, cp = gap_forward(hs, tw_mask)
        caches["lstm"] = (cl, cp)
        feats.append(f_l)
    else:
        feats.append(np.zeros((B, 2 * model.dims.lstm_hidden)))
    feat = np.concatenate(feats, axis=1)
    logits = feat @ p["dense.W"] + p["dense.b"]
    probs = softmax(logits)
    return probs, (feat, caches, sa_ids, tw_ids)


def backward_batch(model, dlogits, cache):
    feat, caches, sa_ids, tw_ids = cache
    p = model.params
    grads = {k: np.zeros_like(v) for k, v in p.items()}
    grads["dense.W"] = feat.T @ dlogits
    grads["dense.b"] = dlogits.sum(0)
    dfeat = dlogits @ p["dense.W"].T
    Hg = model.dims.gru_hidden
    if "gru" in caches:
        cg, cp = caches["gru"]
        dx, _, g = gru_backward(gap_backward(dfeat[:, :Hg], cp), cg)
        for k, v in g.items():
            grads[f"gru.{k}"] = v
        np.add.at(grads["emb_sa"], sa_ids, dx)
    if "lstm" in caches:
        cl, cp = caches["lstm"]
        dx, gf, gb = bilstm_backward(gap_backward(dfeat[:, Hg:], cp), cl)
        for k, v in gf.items():
            grads[f"lstm_f.{k}"] = v
        for k, v in gb.items():
            grads[f"lstm_b.{k}"] = v
        np.add.at(grads["emb_tw"], tw_ids, dx)
    grads["emb_sa"][PAD] = 0.0
    grads["emb_tw"][PAD] = 0.0
    return grads


def forward(model, sa_tokens, tweet_tokens):
    """Class probabilities for one example given id sequences for both branches."""
    sa_ids, sa_mask = pad_batch([sa_tokens], unk_if_empty=True)
    tw_ids, tw_mask = pad_batch([tweet_tokens], unk_if_empty=True)
    probs, _ = forward_batch(model, sa_ids, sa_mask, tw_ids, tw_mask)
    return probs[0]


@dataclass
class Example:
    sa: list
    tw: list
    label: int
    id: int = -1


def loss_and_grads(model, batch, only_gru=False, only_bilstm=False):
    sa_ids, sa_mask = pad_batch([e.sa for e in batch], unk_if_empty=True)
    tw_ids, tw_mask = pad_batch([e.tw for e in batch], unk_if_empty=True)
    labels = np.array([e.label for e in batch])
    probs, cache = forward_batch(model, sa_ids, sa_mask, tw_ids, tw_mask, only_gru, only_bilstm)
    loss, dlogits = cross_entropy(probs, labels)
    return loss, probs, backward_batch(model, dlogits, cache)


def predict_proba(model, examples, batch_size=64, only_gru=False, only_bilstm=False):
    out = []
    for s in range(0, len(examples), batch_size):
        batch = examples[s:s + batch_size]
        sa_ids, sa_mask = pad_batch([e.sa for e in batch], unk_if_empty=True)
        tw_ids, tw_mask = pad_batch([e.tw for e in batch], unk_if_empty=True)
        probs, _ = forward_batch(model, sa_ids, sa_mask, tw_ids, tw_mask, only_gru, only_bilstm)
        out.append(probs)
    return np.concatenate(out) if out else np.zeros((0, model.dims.classes))


def stratified_split(labels, fraction, seed):
    """Indices (train, val); each class contributes round(fraction * n_c) to val."""
    rng = np.random.default_rng(seed)
    labels = np.asarray(labels)
    val = []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        rng.shuffle(idx)
        val.extend(idx[: int(round(fraction * len(idx)))].tolist())
    val_set = set(val)
    train = [i for i in range(len(labels)) if i not in val_set]
    return train, sorted(val)


@dataclass
class History:
    rows: list = field(default_factory=list)
    best_epoch: int = 0

    def save_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_loss,train_acc,val_loss,val_acc\n")
            for r in self.rows:
                fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in r) + "\n")


def _dataset_loss(model, examples, cfg):
    if not examples:
        return float("nan"), float("nan")
    probs = predict_proba(model, examples, 64, cfg.only_gru, cfg.only_bilstm)
    labels = np.array([e.label for e in examples])
    loss, _ = cross_entropy(probs, labels)
    return loss, float(np.mean(probs.argmax(1) == labels))


def train(model, examples, config=None, val_examples=None, on_epoch=None):
    """Mini-batch RMSProp training with seeded shuffling and early stopping.

    If ``val_examples`` is None a stratified ``val_fraction`` of ``examples`` is
    held out. The returned model holds the parameters of the best validation
    epoch (last epoch when there is no validation set).
    """
    cfg = config or TrainConfig()
    if not examples:
        raise EmptyTraining("no training examples")
    if val_examples is None and cfg.val_fraction > 0:
        tr, va = stratified_split([e.label for e in examples], cfg.val_fraction, cfg.seed)
        train_ex = [examples[i] for i in tr]
        val_examples = [examples[i] for i in va]
    else:
        train_ex = list(examples)
        val_examples = val_examples or []
    opt = RMSProp(cfg.lr, cfg.rho, cfg.eps)
    rng = np.random.default_rng(cfg.seed + 1)
    hist = History()
    best_acc, best_params, stale = -1.0, None, 0
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(train_ex))
        tot_loss, correct = 0.0, 0
        for s in range(0, len(order), cfg.batch_size):
            batch = [train_ex[i] for i in order[s:s + cfg.batch_size]]
            loss, probs, grads = loss_and_grads(model, batch, cfg.only_gru, cfg.only_bilstm)
            if not np.isfinite(loss):
                raise NonFinite(f"loss became {loss} at epoch {epoch}")
            tot_loss += loss * len(batch)
            correct += int(np.sum(probs.argmax(1) == [e.label for e in batch]))
            clip_global_norm(grads, cfg.clip_norm)
            opt.step(model.params, grads)
        tr_loss, tr_acc = tot_loss / len(train_ex), correct / len(train_ex)
        va_loss, va_acc = _dataset_loss(model, val_examples, cfg)
        hist.rows.append((epoch, tr_loss, tr_acc, va_loss, va_acc))
        log.info("epoch %d loss %.4f acc %.4f val_loss %.4f val_acc %.4f",
                 epoch, tr_loss, tr_acc, va_loss, va_acc)
        if on_epoch is not None:
            on_epoch(epoch, model, hist)
        if val_examples:
            if va_acc > best_acc:
                best_acc, stale, hist.best_epoch = va_acc, 0, epoch
                best_params = copy.deepcopy(model.params)
            else:
                stale += 1
                if cfg.patience and stale >= cfg.patience:
                    break
        else:
            hist.best_epoch = epoch
        if cfg.target_train_acc is not None and tr_acc >= cfg.target_train_acc:
            break
    if best_params is not None:
        model.params = best_params
    return model, hist


@dataclass
class EvalReport:
    accuracy: float
    precision: list
    recall: list
    f1: list
    support: list
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    confusion: list

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**{k: obj[k] for k in cls.__dataclass_fields__})


def confusion_matrix(y_true, y_pred, n_classes=3):
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[t, p] += 1
    return cm


def report_from_confusion(cm):
    """Accuracy, per-class and support-weighted P/R/F1 from a confusion matrix
    (rows = true class, columns = predicted)."""
    cm = np.asarray(cm, dtype=np.int64)
    total = cm.sum()
    if total == 0:
        raise EmptyTest("empty confusion matrix")
    tp = np.diag(cm).astype(float)
    support = cm.sum(1)
    predicted = cm.sum(0)
    prec = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    rec = np.divide(tp, support, out=np.zeros_like(tp), where=support > 0)
    denom = prec + rec
    f1 = np.divide(2 * prec * rec, denom, out=np.zeros_like(tp), where=denom > 0)
    w = support / total
    return EvalReport(
        accuracy=float(tp.sum() / total),
        precision=prec.tolist(), recall=rec.tolist(), f1=f1.tolist(),
        support=support.tolist(),
        weighted_precision=float(w @ prec), weighted_recall=float(w @ rec),
        weighted_f1=float(w @ f1), confusion=cm.tolist(),
    )


def evaluate(model, examples, only_gru=False, only_bilstm=False):
    if not examples:
        raise EmptyTest("no test examples")
    probs = predict_proba(model, examples, 64, only_gru, only_bilstm)
    y_pred = probs.argmax(1)
    y_true = [e.label for e in examples]
    return report_from_confusion(confusion_matrix(y_true, y_pred, model.dims.classes))


def class_names():
    return list(CLASS_NAMES)
