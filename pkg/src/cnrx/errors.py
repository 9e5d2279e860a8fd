"""Exception types raised by the extraction pipeline."""


class CnrxError(Exception):
    """Base class for all errors raised by this package."""


class UnknownNode(CnrxError, LookupError):
    """A node id does not belong to the tree it was used with."""


class InputNotDecodable(CnrxError):
    """The input byte stream could not be decoded even with replacement."""


class EmptyDocument(CnrxError):
    """The document contains no countable text, so no block can be selected."""


class EmptyBlockSet(CnrxError):
    """A main block was requested from an empty block set."""


class AtRoot(CnrxError):
    """Cannot expand the selection: the current node is the root."""


class NoChildren(CnrxError):
    """Cannot shrink the selection: the current node has no children."""


class ManifestError(CnrxError):
    """A gold manifest or gold path could not be resolved."""
