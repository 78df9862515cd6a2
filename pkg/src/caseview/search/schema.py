"""Index schemas and document validation."""

from __future__ import annotations

from dataclasses import dataclass

from ..common import end_of_day_epoch, epoch_seconds

FIELD_TYPES = ("text", "keyword", "date", "numeric", "bool")


class SchemaError(ValueError):
    pass


class SchemaViolation(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


@dataclass(frozen=True)
class IndexSchema:
    name: str
    fields: dict[str, str]  # field -> type

    def __post_init__(self):
        for field, ftype in self.fields.items():
            if ftype not in FIELD_TYPES:
                raise SchemaError(f"bad type {ftype!r} for field {field!r} in {self.name}")

    def text_fields(self) -> list[str]:
        return sorted(f for f, t in self.fields.items() if t == "text")

    def validate_doc(self, key: str, fields: dict) -> dict:
        """Normalize a document against the schema, raising SchemaViolation.

        Date values become epoch seconds (original string kept for display
        under '<field>__raw'), bools become 'true'/'false' keywords.
        """
        out: dict = {}
        for field, value in fields.items():
            if field not in self.fields:
                raise SchemaViolation(key, f"unknown field {field!r}")
            if value is None:
                continue
            ftype = self.fields[field]
            if ftype == "text":
                out[field] = str(value)
            elif ftype == "keyword":
                if isinstance(value, (list, tuple)):
                    out[field] = [str(v) for v in value]
                else:
                    out[field] = str(value)
            elif ftype == "bool":
                out[field] = "true" if value in (True, "true", 1) else "false"
            elif ftype == "numeric":
                try:
                    out[field] = float(value)
                except (TypeError, ValueError):
                    raise SchemaViolation(key, f"non-numeric value for {field!r}: {value!r}")
            elif ftype == "date":
                try:
                    out[field] = epoch_seconds(str(value))
                except ValueError:
                    raise SchemaViolation(key, f"bad date for {field!r}: {value!r}")
                out[field + "__raw"] = str(value)
        return out

    def to_json(self) -> dict:
        return {"name": self.name, "fields": dict(sorted(self.fields.items()))}

    @classmethod
    def from_json(cls, obj: dict) -> "IndexSchema":
        return cls(name=obj["name"], fields=obj["fields"])


def coerce_range_bound(ftype: str, value, upper: bool = False):
    if value is None:
        return None
    if ftype == "date":
        return end_of_day_epoch(str(value)) if upper else epoch_seconds(str(value))
    if ftype == "numeric":
        return float(value)
    return str(value)
