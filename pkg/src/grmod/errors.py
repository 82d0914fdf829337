"""Exception hierarchy shared by every layer of the package."""


class GrmodError(Exception):
    """Base class for all errors raised by grmod."""


class DimensionMismatch(GrmodError, ValueError):
    pass


class NotContained(GrmodError):
    """The inner lattice is not a sublattice of the outer one."""


class NotEndomorphism(GrmodError):
    """A matrix does not define an endomorphism of the diagonal group."""


class NotStable(GrmodError):
    """A subgroup is not carried into itself by the module action."""


class InvalidModule(GrmodError):
    pass


class NotCyclic(GrmodError):
    pass


class CapExceeded(GrmodError):
    """A configured size cap would be exceeded."""
