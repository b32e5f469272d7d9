"""C harness emission (text generation only; never invokes a model checker)."""

from .emitter import CHarness, emit

__all__ = ["CHarness", "emit"]
