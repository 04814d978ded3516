"""
Custom exceptions for humangs
"""


class HumanGSError(Exception):
    """Base exception for humangs errors"""
    pass


class GraphError(HumanGSError):
    """Raised when a graph cannot be built from its input"""
    pass


class CycleDetected(GraphError):
    """Raised when the input edges contain a directed cycle"""
    pass


class UnknownNode(GraphError):
    """Raised when an edge or answer references an undeclared node"""
    pass


class DuplicateNode(GraphError):
    """Raised when a node name is declared twice"""
    pass


class EmptyGraph(GraphError):
    """Raised when a graph has no nodes"""
    pass


class WrongStructure(HumanGSError):
    """Raised when a solver receives a graph of the wrong shape"""
    pass


class EmptyCandidateSet(HumanGSError):
    """Raised when an empty candidate set is used to induce a graph"""
    pass


class InvalidTargetSet(HumanGSError):
    """Raised when a target set is empty, related, or too large for the variant"""
    pass


class InconsistentAnswers(HumanGSError):
    """Raised when answers contradict each other"""
    pass


class TooLarge(HumanGSError):
    """Raised when an exhaustive computation exceeds its configured limit"""
    pass


class BudgetTooLarge(HumanGSError):
    """Raised when a closed-form solver is asked outside its budget regime"""
    pass


class NoSolverApplicable(HumanGSError):
    """Raised when no solver handles the graph within the configured limits"""
    pass


class FormatError(HumanGSError):
    """Raised when a graph, answer or plan file is malformed"""
    pass
