"""CNN speed classifier over exported scalogram image tensors."""

__version__ = "0.1.0"
