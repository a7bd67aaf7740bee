"""
Custom exceptions for liquidweight
"""
from typing import Optional


class LiquidWeightException(Exception):
    """Base exception for liquidweight"""
    code = "error"

    def __init__(self, message: str, exit_code: int = 1, code: Optional[str] = None):
        self.message = message
        self.exit_code = exit_code
        if code:
            self.code = code
        super().__init__(self.message)


class ValidationError(LiquidWeightException):
    """Invalid delegation structures, documents or parameters"""
    code = "validation"

    def __init__(self, message: str = "Validation failed", code: Optional[str] = None):
        super().__init__(message, 1, code)


class UnknownAgent(ValidationError):
    code = "unknown-agent"

    def __init__(self, agent, context: str = "universe"):
        self.agent = agent
        super().__init__(f"Unknown agent {agent!r} (not in {context})")


class DuplicateDelegator(ValidationError):
    code = "duplicate-delegator"

    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"Agent {agent!r} has more than one outgoing delegation")


class DuplicateScope(ValidationError):
    code = "duplicate-scope"

    def __init__(self, agent, scope: str):
        self.agent = agent
        super().__init__(f"Agent {agent!r} has more than one delegation for scope {scope}")


class SelfDelegation(ValidationError):
    code = "self-delegation"

    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"Agent {agent!r} delegates to itself; omit the delegation instead")


class UnknownIssue(ValidationError):
    code = "unknown-issue"

    def __init__(self, issue):
        self.issue = issue
        super().__init__(f"Unknown issue {issue!r} (no policy area assigned)")


class MissingIssue(ValidationError):
    code = "missing-issue"

    def __init__(self, message: str = "Graph has area or issue scoped delegations; --issue is required"):
        super().__init__(message)


class MissingProbability(ValidationError):
    code = "missing-probability"

    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"No voting probability for non-endpoint agent {agent!r}")


class InvalidProbability(ValidationError):
    code = "invalid-probability"

    def __init__(self, value, message: Optional[str] = None, code: Optional[str] = None):
        self.value = value
        super().__init__(message or f"Invalid probability {value!r}", code)


class EmptyUniverse(ValidationError):
    code = "empty-universe"

    def __init__(self):
        super().__init__("A delegation profile needs at least one agent")


class ParseError(LiquidWeightException):
    """Malformed input text"""
    code = "parse-error"

    def __init__(self, message: str = "Parse failed", line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            position = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({position})"
        super().__init__(message, 1)


class OracleMismatch(LiquidWeightException):
    code = "oracle-mismatch"

    def __init__(self, message: str = "Analytic and exact values disagree"):
        super().__init__(message, 2)


class TooLarge(LiquidWeightException):
    """Resource guard tripped"""
    code = "too-large"

    def __init__(self, message: str = "Problem exceeds the enumeration guard"):
        super().__init__(message, 3)


class NoConvergence(LiquidWeightException):
    code = "no-convergence"

    def __init__(self, message: str = "Iterative solver did not converge"):
        super().__init__(message, 3)


def safe_execute(func, *args, error_message: str = "Operation failed", **kwargs):
    """
    Safely execute a function with error handling
    """
    try:
        return func(*args, **kwargs)
    except LiquidWeightException:
        raise
    except Exception as e:
        from liquidweight.utils.logging import log_error
        log_error(e, context=f"safe_execute: {func.__name__}")
        raise LiquidWeightException(f"{error_message}: {str(e)}")
