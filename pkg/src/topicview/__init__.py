"""Turn-level topic analytics for dialogue transcripts.

Pipeline: transcripts -> vocabulary -> word embeddings -> embedded topic
model -> per-turn topic score time series, served over HTTP to the dashboard.
"""

__version__ = "0.1.0"
