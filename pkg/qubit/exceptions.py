class InvalidArgument(ValueError):
    """A numeric argument is outside the domain of a qubit operation."""
