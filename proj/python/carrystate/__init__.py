from ._core import (
    CarrystateError,
    __version__,
    dequantize,
    detail_values,
    dq_exact,
    dq_lower_bound,
    families,
    ladder,
    phase_diagram,
    quantize,
    read_field,
    rho_hf,
    roundtrip,
    sample_family,
    write_field,
)

__all__ = [
    "CarrystateError",
    "__version__",
    "dequantize",
    "detail_values",
    "dq_exact",
    "dq_lower_bound",
    "families",
    "ladder",
    "phase_diagram",
    "quantize",
    "read_field",
    "rho_hf",
    "roundtrip",
    "sample_family",
    "write_field",
]
