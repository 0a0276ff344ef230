"""Base service class providing common functionality for all services."""

import logging


class BaseService:
    """Base class for all services in the deeptune system."""

    def __init__(self, name: str):
        """Initialize the base service.

        Args:
            name: The name of the service for logging purposes
        """
        self.name = name
        self.logger = logging.getLogger(f"deeptune.{name}")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"
