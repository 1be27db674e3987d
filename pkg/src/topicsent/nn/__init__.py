from .gradcheck import grad_check
from .layers import (bilstm_backward, bilstm_forward, cross_entropy, dense_softmax,
                     gap_backward, gap_forward, gru_backward, gru_forward,
                     lstm_backward, lstm_forward, softmax)
from .optim import RMSProp, clip_global_norm, rmsprop_step

__all__ = ["grad_check", "bilstm_backward", "bilstm_forward", "cross_entropy", "dense_softmax",
           "gap_backward", "gap_forward", "gru_backward", "gru_forward", "lstm_backward",
           "lstm_forward", "softmax", "RMSProp", "clip_global_norm", "rmsprop_step"]
