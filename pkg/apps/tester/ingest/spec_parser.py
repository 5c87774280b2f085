"""API specification parsing.

Reads the OpenAPI-style subset the gateway documentation uses: paths,
GET/PUT, and per-property type, enum, format, range, description and the
``x-unit`` extension. Properties come from the PUT request body schema and
the GET 200 response schema; local ``#/components/schemas`` references are
followed.
"""

import json
import re
from pathlib import Path
from typing import Any, Literal

import structlog
import yaml
from pydantic import ValidationError

from apps.tester.core.exceptions import SchemaError, SpecSyntaxError
from apps.tester.domain.entities.spec import (
    ApiProperty,
    ApiSpec,
    DeclaredType,
    DomainKind,
    Endpoint,
    HttpMethod,
    TestObjectSet,
    ValueDomain,
)
from apps.tester.ingest.informal import normalize_informal_enum

logger = structlog.get_logger(__name__)

SpecFormat = Literal["yaml", "json"]

_JSON_MEDIA = "application/json"
_REF_PREFIX = "#/components/schemas/"
_BOOL_TAG = "tag:yaml.org,2002:bool"


class SpecLoader(yaml.SafeLoader):
    """SafeLoader that reads only true/false as booleans.

    YAML 1.1 also resolves yes/no/on/off, which would turn enum labels such
    as ON and OFF into booleans.
    """


SpecLoader.yaml_implicit_resolvers = {
    first: [(tag, regexp) for tag, regexp in resolvers if tag != _BOOL_TAG]
    for first, resolvers in yaml.SafeLoader.yaml_implicit_resolvers.items()
}
SpecLoader.add_implicit_resolver(
    _BOOL_TAG,
    re.compile(r"^(?:true|True|TRUE|false|False|FALSE)$"),
    list("tTfF"),
)


def load_yaml(document: str) -> Any:
    """Parse YAML text with SpecLoader."""
    return yaml.load(document, Loader=SpecLoader)  # noqa: S506


def parse_spec(document: str, fmt: SpecFormat = "yaml", source_path: str = "") -> ApiSpec:
    """Parse a spec document into an ApiSpec.

    Args:
        document: Document text
        fmt: ``yaml`` or ``json``
        source_path: Where the document came from, kept for reports

    Returns:
        Parsed specification

    Raises:
        SpecSyntaxError: Document is not valid in the stated format
        SchemaError: No endpoint found, or a property schema is unusable
        AmbiguousEnumError: An informal enum yields fewer than two labels
    """
    try:
        root = json.loads(document) if fmt == "json" else load_yaml(document)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise SpecSyntaxError(f"Malformed {fmt} document: {e}", {"source": source_path}) from e

    if not isinstance(root, dict):
        raise SpecSyntaxError("Spec root must be a mapping", {"source": source_path})
    paths = root.get("paths") or {}
    if not isinstance(paths, dict):
        raise SpecSyntaxError("'paths' must be a mapping", {"source": source_path})

    schemas = (root.get("components") or {}).get("schemas") or {}
    endpoints = []
    for path, item in paths.items():
        endpoint = _parse_endpoint(str(path), item or {}, schemas)
        if endpoint is not None:
            endpoints.append(endpoint)

    if not endpoints:
        raise SchemaError("Spec declares no GET or PUT endpoint", {"source": source_path})

    try:
        spec = ApiSpec(endpoints=tuple(endpoints), source_path=source_path)
    except ValidationError as e:
        raise SchemaError(str(e), {"source": source_path}) from e

    logger.info(
        "spec_parsed",
        source=source_path,
        endpoints=len(spec.endpoints),
        properties=sum(len(endpoint.properties) for endpoint in spec.endpoints),
    )
    return spec


def load_spec(path: Path) -> ApiSpec:
    """Read and parse a spec file; ``.json`` files are JSON, anything else YAML."""
    fmt: SpecFormat = "json" if path.suffix.lower() == ".json" else "yaml"
    return parse_spec(path.read_text(encoding="utf-8"), fmt, source_path=str(path))


def extract_test_objects(spec: ApiSpec) -> list[TestObjectSet]:
    """Project a spec onto one TestObjectSet per (endpoint, method)."""
    objects = [
        TestObjectSet(endpoint=endpoint.path, method=method, properties=endpoint.properties)
        for endpoint in spec.endpoints
        for method in endpoint.methods
    ]
    logger.debug("test_objects_extracted", count=len(objects))
    return objects


def serialize_spec(spec: ApiSpec, fmt: SpecFormat = "yaml") -> str:
    """Render a spec back into the subset document parse_spec reads."""
    paths: dict[str, Any] = {}
    for endpoint in spec.endpoints:
        item: dict[str, Any] = {}
        if endpoint.sample_request is not None:
            item["x-sample-request"] = endpoint.sample_request
        schema = {
            "type": "object",
            "properties": {prop.key: _property_schema(prop) for prop in endpoint.properties},
        }
        content = {"content": {_JSON_MEDIA: {"schema": schema}}}
        for method in endpoint.methods:
            if method is HttpMethod.PUT:
                item["put"] = {"requestBody": content}
            else:
                item["get"] = {"responses": {"200": content}}
        paths[endpoint.path] = item

    document = {"openapi": "3.0.0", "paths": paths}
    if fmt == "json":
        return json.dumps(document, indent=2)
    return yaml.safe_dump(document, sort_keys=False, allow_unicode=True)


def _parse_endpoint(path: str, item: Any, schemas: dict[str, Any]) -> Endpoint | None:
    if not isinstance(item, dict):
        raise SpecSyntaxError(f"Path item {path} must be a mapping", {"path": path})

    methods: list[HttpMethod] = []
    raw_properties: dict[str, Any] = {}
    for name, operation in item.items():
        lowered = str(name).lower()
        if lowered not in ("get", "put"):
            continue
        method = HttpMethod(lowered.upper())
        methods.append(method)
        body = _operation_schema(method, operation or {}, schemas)
        for key, prop_schema in body.items():
            raw_properties.setdefault(str(key), prop_schema)

    if not methods:
        logger.debug("path_without_supported_methods", path=path)
        return None

    properties = tuple(
        _parse_property(path, key, _resolve(schema, schemas))
        for key, schema in raw_properties.items()
    )
    sample = item.get("x-sample-request")
    try:
        return Endpoint(
            path=path,
            methods=tuple(methods),
            properties=properties,
            sample_request=dict(sample) if isinstance(sample, dict) else None,
        )
    except ValidationError as e:
        raise SchemaError(f"Invalid endpoint {path}: {e}", {"path": path}) from e


def _operation_schema(
    method: HttpMethod, operation: dict[str, Any], schemas: dict[str, Any]
) -> dict[str, Any]:
    if method is HttpMethod.PUT:
        holder = operation.get("requestBody") or {}
    else:
        responses = operation.get("responses") or {}
        holder = responses.get("200") or responses.get(200) or {}
    content = holder.get("content") or {}
    media = content.get(_JSON_MEDIA) or next(iter(content.values()), None) or {}
    schema = _resolve(media.get("schema") or {}, schemas)
    properties = schema.get("properties") or {}
    if not isinstance(properties, dict):
        raise SpecSyntaxError(f"{method} properties must be a mapping")
    return properties


def _resolve(schema: Any, schemas: dict[str, Any]) -> dict[str, Any]:
    if not isinstance(schema, dict):
        raise SpecSyntaxError(f"Schema must be a mapping, got {type(schema).__name__}")
    ref = schema.get("$ref")
    if ref is None:
        return schema
    if not isinstance(ref, str) or not ref.startswith(_REF_PREFIX):
        raise SchemaError(f"Only local component references are supported: {ref!r}")
    name = ref.removeprefix(_REF_PREFIX)
    if name not in schemas:
        raise SchemaError(f"Unresolved reference {ref}")
    return _resolve(schemas[name], schemas)


def _parse_property(path: str, key: str, schema: dict[str, Any]) -> ApiProperty:
    declared = str(schema.get("type", "string")).lower()
    enum = schema.get("enum")
    description = schema.get("description")
    unit = schema.get("x-unit")

    try:
        if enum is not None:
            labels = _enum_labels(enum)
            declared_type = DeclaredType.ENUM
            domain = ValueDomain(kind=DomainKind.ENUMERATION, labels=tuple(labels))
        elif declared == "boolean":
            declared_type = DeclaredType.BOOLEAN
            domain = ValueDomain(kind=DomainKind.BOOLEAN)
        elif declared in ("integer", "number"):
            declared_type = DeclaredType(declared)
            domain = ValueDomain(
                kind=DomainKind.NUMERIC_RANGE,
                minimum=_optional_float(schema.get("minimum")),
                maximum=_optional_float(schema.get("maximum")),
            )
        elif declared == "string" and schema.get("format") == "date-time":
            declared_type = DeclaredType.DATETIME
            domain = ValueDomain(kind=DomainKind.DATETIME)
        elif declared == "string":
            declared_type = DeclaredType.STRING
            domain = ValueDomain(kind=DomainKind.FREE_TEXT)
        else:
            raise SchemaError(
                f"Unsupported type {declared!r} for {path}#{key}",
                {"path": path, "key": key},
            )
        return ApiProperty(
            key=key,
            domain=domain,
            declared_type=declared_type,
            unit_text=str(unit) if unit is not None else None,
            description=str(description) if description is not None else None,
        )
    except ValidationError as e:
        raise SchemaError(f"Invalid property {path}#{key}: {e}", {"path": path}) from e


def _enum_labels(enum: Any) -> list[str]:
    if isinstance(enum, str):
        return normalize_informal_enum(enum)
    if isinstance(enum, list):
        if len(enum) == 1 and isinstance(enum[0], str):
            return normalize_informal_enum(enum[0])
        return [str(label).strip() for label in enum]
    raise SchemaError(f"enum must be a list or text, got {type(enum).__name__}")


def _optional_float(value: Any) -> float | None:
    return None if value is None else float(value)


def _property_schema(prop: ApiProperty) -> dict[str, Any]:
    schema: dict[str, Any]
    match prop.declared_type:
        case DeclaredType.ENUM:
            schema = {"type": "string", "enum": list(prop.domain.labels)}
        case DeclaredType.DATETIME:
            schema = {"type": "string", "format": "date-time"}
        case DeclaredType.INTEGER | DeclaredType.NUMBER:
            schema = {"type": prop.declared_type.value}
            if prop.domain.minimum is not None:
                schema["minimum"] = prop.domain.minimum
            if prop.domain.maximum is not None:
                schema["maximum"] = prop.domain.maximum
        case _:
            schema = {"type": prop.declared_type.value}
    if prop.unit_text is not None:
        schema["x-unit"] = prop.unit_text
    if prop.description is not None:
        schema["description"] = prop.description
    return schema
