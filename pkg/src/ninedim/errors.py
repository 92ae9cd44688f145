"""Exception taxonomy for the assessment engine.

Every domain error maps to one class here so callers (CLI, HTTP service,
tests) can translate failures uniformly.
"""


class EngineError(Exception):
    """Base class for all domain errors raised by this package."""


# --- graph store ---------------------------------------------------------

class KindMutation(EngineError):
    """An upsert attempted to change an existing entity's kind."""


class DanglingEndpoint(EngineError):
    """An edge references an entity id that is not in the graph."""


class InvalidInterval(EngineError):
    """An edge validity interval has valid_to <= valid_from."""


class DuplicateEdge(EngineError):
    """A parallel edge duplicates (source, target, kind, interval) under a new id."""


class UnknownEntity(EngineError):
    """A queried entity id is not present in the graph or view."""


# --- rubric evaluation ----------------------------------------------------

class EmptyRubric(EngineError):
    """No rubric criterion exists for the requested dimension."""


class DimensionMismatch(EngineError):
    """A transparency record targets a different dimension than the assessment."""


class MissingFactor(EngineError):
    """A comprehension-gap input family (complexity, diversity, coverage) is absent."""


class MixedEntities(EngineError):
    """A timeline was built from events belonging to more than one entity."""


class InvalidDamping(EngineError):
    """Impact propagation damping must satisfy 0 < damping <= 1."""


# --- evidence ledger ------------------------------------------------------

class UnknownParent(EngineError):
    """An appended node references a parent id not present in the ledger."""


class CycleDetected(EngineError):
    """An append would introduce a cycle into the provenance DAG."""


class OrphanNonSource(EngineError):
    """A non-source node was appended with an empty parent list."""


class UnknownNode(EngineError):
    """A queried node id is not present in the ledger."""


class NotAScore(EngineError):
    """trace_to_sources was called on a node whose stage is not Score."""


# --- profile assembly -----------------------------------------------------

class MissingDimension(EngineError):
    """A profile was composed without an assessment for some dimension."""


class DuplicateDimension(EngineError):
    """A profile was composed with two assessments for the same dimension."""


class SelfInteraction(EngineError):
    """An interaction annotation has identical source and target dimensions."""


# --- corpus / fixtures ----------------------------------------------------

class CorruptCorpus(EngineError):
    """The bundled incident corpus is missing, incomplete, or malformed."""


class FixtureError(EngineError):
    """A fixture file failed to load or violates its schema."""
