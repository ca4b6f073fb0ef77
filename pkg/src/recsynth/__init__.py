"""Bottom-up synthesizer of recursive functional programs over tree automata."""

__version__ = "0.1.0"
