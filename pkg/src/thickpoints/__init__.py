"""Thick points of planar local times and intersection local times."""
__version__ = "0.1.0"
