"""Exception hierarchy.

The three bases map onto CLI exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class TopicSentError(Exception):
    pass


class ConfigError(TopicSentError):
    pass


class DataError(TopicSentError):
    pass


class NumericError(TopicSentError):
    pass


# ingest
class MissingFile(DataError):
    pass


class MissingColumn(DataError):
    pass


class BadSentiment(DataError):
    pass


class EmptyFile(DataError):
    pass


# corpus / topics
class EmptyVocabulary(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class BadHyperparam(ConfigError):
    pass


class UnknownDoc(DataError):
    pass


# embeddings
class UnknownWord(DataError):
    pass


class ZeroVector(NumericError):
    pass


# labeler / harness
class EmptyTopic(DataError):
    pass


class EmptyUnigrams(DataError):
    pass


class MissingLabel(DataError):
    pass


class TopicCountMismatch(DataError):
    pass


# nn / model
class ShapeMismatch(NumericError):
    pass


class AllMasked(NumericError):
    pass


class BadLabel(DataError):
    pass


class DimMismatch(ConfigError):
    pass


class EmptyTraining(DataError):
    pass


class EmptyTest(DataError):
    pass


class NonFinite(NumericError):
    pass


# cli
class MissingAssignment(DataError):
    pass
