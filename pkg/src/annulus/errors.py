"""Exception hierarchy shared across the package."""


class AnnulusError(Exception):
    """Base class for all package errors."""


class CircuitError(AnnulusError):
    """Malformed circuit, gate list, or document (bad index, overlap, schema)."""


class GeometryError(AnnulusError):
    """Invalid floorplan configuration or tile coordinate."""


class CapacityError(AnnulusError):
    """Workload does not fit on the floorplan (tiles or CR entry lanes)."""
