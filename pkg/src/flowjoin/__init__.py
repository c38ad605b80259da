"""Certified checks for flow-space maps and their joins over group actions on trees and Euclidean spaces."""

__version__ = "0.1.0"
