"""Topic-based sentiment analysis of short texts: LDA topics labeled by
sentiment/aspect attribute tags, and a GRU + BiLSTM sentiment classifier."""

__version__ = "0.1.0"
