"""Python bindings for the ciao architecture documentation generator."""

from ._ciao import (
    __version__,
    accumulate_cost,
    build_global_prompt,
    build_section_prompt,
    default_template_json,
    detect_language,
    estimate_tokens,
    extract_diagrams,
    flatten_repository,
    generate,
    strip_comments,
    strip_comments_for_path,
    validate_diagram,
    validate_template_json,
)

__all__ = [
    "__version__",
    "accumulate_cost",
    "build_global_prompt",
    "build_section_prompt",
    "default_template_json",
    "detect_language",
    "estimate_tokens",
    "extract_diagrams",
    "flatten_repository",
    "generate",
    "strip_comments",
    "strip_comments_for_path",
    "validate_diagram",
    "validate_template_json",
]
