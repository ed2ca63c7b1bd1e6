"""Hessian bases for equivariant symmetric 2-tensors of finite reflection groups."""

__version__ = "0.1.0"
