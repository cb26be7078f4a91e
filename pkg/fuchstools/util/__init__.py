__all__ = ["general"]
