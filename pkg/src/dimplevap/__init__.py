"""Dimple-trap loading and evaporative cooling toward Bose-Einstein condensation."""
