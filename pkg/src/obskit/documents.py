"""JSON document format for observers and environments.

Documents are UTF-8 JSON.  Identifier arrays keep their order, which is
the construction order of the machine.  Table keys join two identifiers
with a comma, so identifiers themselves must be comma-free, non-empty
strings.  Serialization is canonical: object keys sorted, two-space
indent, trailing newline, making equal machines byte-identical on disk.
"""

from __future__ import annotations

import json

from .core import Environment, Observer
from .errors import (
    DocumentCompletenessError,
    DocumentError,
    DocumentParseError,
    DocumentReferenceError,
)

FORMAT_VERSION = "1"


def _load_json(text: str | bytes) -> dict:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentParseError(f"document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise DocumentError("document root must be a JSON object")
    return doc


def _check_version(doc: dict) -> None:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION!r}")


def _identifier_array(doc: dict, name: str) -> tuple[str, ...]:
    value = doc.get(name)
    if not isinstance(value, list) or not value:
        raise DocumentError(f"{name!r} must be a non-empty array")
    for item in value:
        if not isinstance(item, str) or not item:
            raise DocumentError(f"{name!r} entries must be non-empty strings")
        if "," in item:
            raise DocumentError(f"identifier {item!r} in {name!r} must not contain a comma")
    if len(set(value)) != len(value):
        raise DocumentError(f"{name!r} has duplicate identifiers")
    return tuple(value)


def _pair_table(
    doc: dict,
    name: str,
    rows: tuple[str, ...],
    cols: tuple[str, ...],
    row_label: str,
    col_label: str,
    targets: tuple[str, ...],
) -> dict:
    raw = doc.get(name)
    if not isinstance(raw, dict):
        raise DocumentError(f"{name!r} must be an object")
    table = {}
    row_set, col_set, target_set = set(rows), set(cols), set(targets)
    for key, value in raw.items():
        head, sep, tail = key.partition(",")
        if not sep:
            raise DocumentError(f"{name!r} key {key!r} must be '{row_label},{col_label}'")
        if head not in row_set:
            raise DocumentReferenceError(f"{name!r} references undeclared {row_label} {head!r}")
        if tail not in col_set:
            raise DocumentReferenceError(f"{name!r} references undeclared {col_label} {tail!r}")
        if value not in target_set:
            raise DocumentReferenceError(f"{name!r}[{key!r}] = {value!r} is undeclared")
        table[(head, tail)] = value
    for r in rows:
        for c in cols:
            if (r, c) not in table:
                raise DocumentCompletenessError(f"{name!r} is missing the entry for ({r!r}, {c!r})")
    return table


def _value_table(
    doc: dict,
    name: str,
    keys: tuple[str, ...],
    key_label: str,
    targets: tuple[str, ...],
) -> dict:
    raw = doc.get(name)
    if not isinstance(raw, dict):
        raise DocumentError(f"{name!r} must be an object")
    table = {}
    key_set, target_set = set(keys), set(targets)
    for key, value in raw.items():
        if key not in key_set:
            raise DocumentReferenceError(f"{name!r} references undeclared {key_label} {key!r}")
        if value not in target_set:
            raise DocumentReferenceError(f"{name!r}[{key!r}] = {value!r} is undeclared")
        table[key] = value
    for k in keys:
        if k not in table:
            raise DocumentCompletenessError(f"{name!r} is missing the entry for {k!r}")
    return table


def parse_observer(text: str | bytes) -> Observer:
    """Parse and fully validate an observer document."""
    doc = _load_json(text)
    _check_version(doc)
    states = _identifier_array(doc, "states")
    inputs = _identifier_array(doc, "inputs")
    outputs = _identifier_array(doc, "outputs")
    transition = _pair_table(doc, "transitions", states, inputs, "state", "input", states)
    output_map = _value_table(doc, "output_map", states, "state", outputs)
    boundary = doc.get("boundary", "")
    if not isinstance(boundary, str):
        raise DocumentError("'boundary' must be a string")
    return Observer(
        states=states,
        inputs=inputs,
        outputs=outputs,
        transition=transition,
        output_map=output_map,
        boundary=boundary,
    )


def parse_environment(text: str | bytes) -> Environment:
    """Parse and fully validate an environment document."""
    doc = _load_json(text)
    _check_version(doc)
    env_states = _identifier_array(doc, "env_states")
    actions = _identifier_array(doc, "actions")
    observations = _identifier_array(doc, "observations")
    transition = _pair_table(
        doc, "env_transitions", env_states, actions, "env_state", "action", env_states
    )
    observation = _value_table(doc, "observation", env_states, "env_state", observations)
    return Environment(
        states=env_states,
        actions=actions,
        transition=transition,
        observation=observation,
    )


def _require_document_ids(label: str, items) -> None:
    for item in items:
        if not isinstance(item, str) or not item or "," in item:
            raise DocumentError(
                f"{label} identifier {item!r} cannot be serialized: "
                "documents need comma-free, non-empty strings"
            )


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def serialize_observer(obs: Observer) -> str:
    """Canonical document text for an observer."""
    _require_document_ids("state", obs.states)
    _require_document_ids("input", obs.inputs)
    _require_document_ids("output", obs.outputs)
    return _dump({
        "format_version": FORMAT_VERSION,
        "states": list(obs.states),
        "inputs": list(obs.inputs),
        "outputs": list(obs.outputs),
        "transitions": {f"{x},{y}": obs.transition[(x, y)] for x in obs.states for y in obs.inputs},
        "output_map": {x: obs.output_map[x] for x in obs.states},
        "boundary": obs.boundary,
    })


def serialize_environment(env: Environment) -> str:
    """Canonical document text for an environment."""
    _require_document_ids("env_state", env.states)
    _require_document_ids("action", env.actions)
    observations = []
    for s in env.states:
        reading = env.observation[s]
        if reading not in observations:
            observations.append(reading)
    _require_document_ids("observation", observations)
    return _dump({
        "format_version": FORMAT_VERSION,
        "env_states": list(env.states),
        "actions": list(env.actions),
        "observations": observations,
        "env_transitions": {f"{s},{a}": env.transition[(s, a)] for s in env.states for a in env.actions},
        "observation": {s: env.observation[s] for s in env.states},
    })
