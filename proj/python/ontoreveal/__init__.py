"""Python access to the ontoreveal core."""

import json

from ._core import (
    Ontology,
    UnknownIriError,
    estimate_tokens,
    find_path,
    generate,
    parse_turtle,
    seed_slice,
    toy_ontology,
    validate_query,
    verbalize_catalog,
    verbalize_slice,
)
from ._core import run_pipeline_json as _run_pipeline_json

__all__ = [
    "Ontology",
    "UnknownIriError",
    "estimate_tokens",
    "find_path",
    "generate",
    "parse_turtle",
    "run_pipeline",
    "seed_slice",
    "toy_ontology",
    "validate_query",
    "verbalize_catalog",
    "verbalize_slice",
]


def run_pipeline(question, ontology, transcript, **options):
    """Run the pipeline against a scripted transcript and return the session log.

    `transcript` is either the transcript document as a dict or its JSON text.
    """
    if not isinstance(transcript, str):
        transcript = json.dumps(transcript)
    return json.loads(_run_pipeline_json(question, ontology, transcript, **options))
