"""obkit: occlusion-boundary generation, interaction, and evaluation toolkit."""

__version__ = "0.1.0"
