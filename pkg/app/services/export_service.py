import csv
import io
from pathlib import Path
from typing import Iterable, Union

import orjson
import structlog
from filelock import FileLock
from jinja2 import Environment, FileSystemLoader
from pydantic import BaseModel

from app.api.models import HasseResponse, PolyRow

logger = structlog.get_logger(__name__)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"

environment = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    autoescape=False,
)


class ExportService:
    """Renders responses as DOT, JSON, CSV or plain lines and writes them out."""

    def hasse_dot(self, hasse: HasseResponse) -> str:
        nodes = [{"index": i, "label": ",".join(str(v) for v in w)} for i, w in enumerate(hasse.elements)]
        edges = []
        for edge in hasse.covers:
            attrs = []
            if edge.label is not None:
                attrs.append(f'label="({edge.label[0]},{edge.label[1]})"')
                attrs.append(f"movetype={edge.movetype}")
            if edge.highlight:
                attrs.append("color=blue")
            edges.append({"child": edge.child, "parent": edge.parent, "attrs": ", ".join(attrs)})
        return environment.get_template("hasse.dot.j2").render(n=hasse.n, nodes=nodes, edges=edges)

    def to_json(self, payload: Union[BaseModel, list, dict]) -> str:
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json", exclude_none=True)
        elif isinstance(payload, list):
            payload = [
                item.model_dump(mode="json", exclude_none=True) if isinstance(item, BaseModel) else item
                for item in payload
            ]
        return orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_NON_STR_KEYS).decode() + "\n"

    def polys_csv(self, rows: Iterable[PolyRow]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "k", "coefficients", "polynomial"])
        for row in rows:
            writer.writerow([row.n, row.k, row.coefficients, row.polynomial])
        return buffer.getvalue()

    def lines(self, items: Iterable[str]) -> str:
        return "".join(f"{item}\n" for item in items)

    def write(self, text: str, out: Path) -> None:
        """Write atomically under a lock file next to the target."""
        lock = FileLock(str(out) + ".lock")
        with lock:
            tmp = out.with_name(out.name + ".tmp")
            tmp.write_text(text, encoding="utf-8")
            tmp.replace(out)
        logger.info("Output written", path=str(out), size=len(text))
