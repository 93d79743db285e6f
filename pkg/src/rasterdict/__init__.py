"""rasterdict: progressive indexing and lookup for scanned raster dictionaries."""

__version__ = "0.1.0"
