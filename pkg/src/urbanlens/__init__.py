"""City-scale 3D geospatial analysis engine.

Spatially indexed city scenes (terrain, buildings, roads, metro,
demographics) with terrain, sunlight, traffic, deformation, and community
analyses, LOD scene tiles, and an HTTP service for interactive viewers.
"""

__version__ = "0.1.0"
