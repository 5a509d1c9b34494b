"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError -> 2, CapacityError -> 3,
ConsistencyError -> 4.
"""


class InputError(ValueError):
    """A caller-supplied value is out of range or malformed."""


class CapacityError(RuntimeError):
    """The requested problem size exceeds a configured desk-scale limit."""


class ConsistencyError(RuntimeError):
    """Two internal routes to the same quantity disagree, or an invariant broke."""


class StateShapeError(RuntimeError):
    """An operator was applied to a state whose register layout cannot support it."""
