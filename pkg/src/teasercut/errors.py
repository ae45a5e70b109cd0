"""Exception hierarchy shared by all engine modules.

Every error raised on purpose derives from TeasercutError so callers (CLI,
HTTP service) can map failures to exit codes / status codes in one place.
"""


class TeasercutError(Exception):
    """Base class for all engine errors."""


# --- feature bundle ---------------------------------------------------------

class SchemaError(TeasercutError):
    """Bundle document is structurally malformed (missing field, wrong type)."""


class IntegrityError(TeasercutError):
    """Bundle document violates a cross-field invariant (ordering, references)."""


class UnknownSentence(TeasercutError):
    """A sentence id does not exist in the bundle."""


# --- LLM gateway ------------------------------------------------------------

class GatewayError(TeasercutError):
    """Base class for completion-backend and response-parsing failures."""


class TransportError(GatewayError):
    """Network-level failure talking to a remote completion backend."""


class RateLimited(GatewayError):
    """Remote backend kept rate-limiting after the retry budget was spent."""


class BackendUnavailable(GatewayError):
    """Remote backend is down or misconfigured."""


class ParseError(GatewayError):
    """Model reply could not be parsed into the expected shape."""


class ContractViolation(GatewayError):
    """Model reply parsed but violates the prompt's stated contract."""


# --- extraction -------------------------------------------------------------

class NoFeasibleWindow(TeasercutError):
    """No consecutive sentence window satisfies the hard speaker filter."""


# --- review -----------------------------------------------------------------

class EmptyInterval(TeasercutError):
    """Interval contains no envelope frames."""


# --- refine -----------------------------------------------------------------

class DuplicateSentence(TeasercutError):
    """The same sentence id appears twice in a selection."""


# --- production -------------------------------------------------------------

class NotAJumpCut(TeasercutError):
    """Requested boundary is not a jump cut."""


class EffectAlreadyPresent(TeasercutError):
    """The segment already carries an effect of this kind."""


class EffectNotPresent(TeasercutError):
    """No effect of this kind to remove at the boundary."""


class NoReactionAvailable(TeasercutError):
    """No qualifying reaction shot exists in the visibility data."""


class EmptyTrack(TeasercutError):
    """Music track has no usable segments for the requested layout."""


# --- finishing --------------------------------------------------------------

class UnsupportedAspect(TeasercutError):
    """Target aspect is wider than the source frame; crop-based reframe impossible."""


class NotInCutlist(TeasercutError):
    """Source timestamp falls outside every cut-list segment."""


# --- export -----------------------------------------------------------------

class EmptyProject(TeasercutError):
    """Project has no cut list to export."""


class MissingAsset(TeasercutError):
    """A referenced asset file (logo, music) cannot be resolved."""


# --- evaluation -------------------------------------------------------------

class EmptySet(TeasercutError):
    """Accuracy requested over an empty annotation set."""


# --- project / service ------------------------------------------------------

class UnknownProject(TeasercutError):
    """Project id not found in the store."""


class InvalidStepTransition(TeasercutError):
    """Operation requires workflow state the project has not reached."""
