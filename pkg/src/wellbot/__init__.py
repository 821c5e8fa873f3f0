"""Grounded well-being conversational engine.

Routes utterances through a calibrated classification cascade (mode, topic,
confirm-or-answer), retrieves curated answers restricted to the predicted
topic, grounds them on a two-view body avatar, and degrades gracefully
through a social corpus and a template chat fallback.
"""

__version__ = "0.1.0"
