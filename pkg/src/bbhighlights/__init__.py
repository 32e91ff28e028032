"""Baseball highlight summarization from play-by-play logs.

Sabermetric play importance (win expectancy, WPA, leverage) is fused with
language-model context scores, the top plays are selected, and the result
is emitted as a clip manifest and evaluated against reference highlights.
"""

__version__ = "0.1.0"
