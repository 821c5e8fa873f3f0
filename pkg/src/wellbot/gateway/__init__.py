"""HTTP service and CLI binding the engine to clients."""
