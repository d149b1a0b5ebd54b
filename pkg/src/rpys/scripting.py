"""Analysis-script parsing and execution.

Scripts are a flat command language::

    importFile(files: ["part1.txt", "part2.txt"], type: "WOS",
               RPY: [1000, 2021, true], PY: [1900, 2021, true], maxCR: 0)
    cluster(threshold: 0.75, volume: true, page: true, DOI: false)
    merge()
    removeCR( N_CR: [0, 9])
    exportFile(file: "out_CR.csv", type: "CSV_CR")
    exportFile(file: "out_GRAPH.csv", type: "CSV_GRAPH")
    saveFile(file: "session.cre")

Whitespace and newlines are insignificant between tokens; commands may
span lines.  Unknown commands and unknown argument keys are hard errors
so a typo can never silently change an analysis.  Executing the same
script on the same inputs twice produces byte-identical outputs.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from . import exports
from .model import DatasetStats, EmptyDatasetError, YearFilter, build_dataset, compute_stats
from .clustering import ClusterConfig
from .session import OperationOrderError, Session
from .wos import parse_wos_file

Value = str | int | float | bool | list

COMMAND_ARGS: dict[str, set[str]] = {
    "importFile": {"file", "files", "type", "RPY", "PY", "maxCR"},
    "cluster": {"threshold", "volume", "page", "DOI"},
    "merge": set(),
    "removeCR": {"N_CR"},
    "exportFile": {"file", "type"},
    "saveFile": {"file"},
}

EXPORT_TYPES = ("CSV_CR", "CSV_GRAPH")


class ScriptSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class ScriptSemanticError(ValueError):
    pass


class ScriptExecutionError(RuntimeError):
    def __init__(self, index: int, message: str):
        super().__init__(f"command {index}: {message}")
        self.index = index


@dataclass
class ScriptCommand:
    name: str
    args: dict[str, Value] = field(default_factory=dict)


@dataclass
class Token:
    kind: str  # IDENT, STRING, NUMBER, PUNCT
    text: str
    value: Value
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        start_line, start_col = line, col
        if ch in "()[]:,":
            tokens.append(Token("PUNCT", ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch == '"':
            i += 1
            col += 1
            buf: list[str] = []
            while i < n and text[i] != '"':
                if text[i] == "\n":
                    raise ScriptSyntaxError("unterminated string", start_line, start_col)
                if text[i] == "\\" and i + 1 < n and text[i + 1] in ('"', "\\"):
                    buf.append(text[i + 1])
                    i += 2
                    col += 2
                else:
                    buf.append(text[i])
                    i += 1
                    col += 1
            if i >= n:
                raise ScriptSyntaxError("unterminated string", start_line, start_col)
            i += 1
            col += 1
            tokens.append(Token("STRING", "".join(buf), "".join(buf), start_line, start_col))
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            raw = text[i:j]
            value: Value = float(raw) if "." in raw else int(raw)
            tokens.append(Token("NUMBER", raw, value, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            raw = text[i:j]
            tokens.append(Token("IDENT", raw, raw, start_line, start_col))
            col += j - i
            i = j
            continue
        raise ScriptSyntaxError(f"unexpected character {ch!r}", start_line, start_col)
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], text: str):
        self.tokens = tokens
        self.pos = 0
        lines = text.split("\n")
        self.end_line = len(lines)
        self.end_col = len(lines[-1]) + 1

    def _error(self, message: str) -> ScriptSyntaxError:
        if self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            return ScriptSyntaxError(message, tok.line, tok.col)
        return ScriptSyntaxError(message, self.end_line, self.end_col)

    def _peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _expect(self, kind: str, text: str | None = None) -> Token:
        tok = self._peek()
        if tok is None or tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise self._error(f"expected {want!r}")
        self.pos += 1
        return tok

    def _value(self) -> Value:
        tok = self._peek()
        if tok is None:
            raise self._error("expected a value")
        if tok.kind == "STRING" or tok.kind == "NUMBER":
            self.pos += 1
            return tok.value
        if tok.kind == "IDENT" and tok.text in ("true", "false"):
            self.pos += 1
            return tok.text == "true"
        if tok.kind == "PUNCT" and tok.text == "[":
            self.pos += 1
            items = [self._value()]
            while True:
                nxt = self._peek()
                if nxt is not None and nxt.kind == "PUNCT" and nxt.text == ",":
                    self.pos += 1
                    items.append(self._value())
                else:
                    break
            self._expect("PUNCT", "]")
            return items
        raise self._error("expected a value")

    def command(self) -> ScriptCommand:
        name_tok = self._expect("IDENT")
        if name_tok.text not in COMMAND_ARGS:
            raise ScriptSemanticError(
                f"line {name_tok.line}: unknown command {name_tok.text!r}"
            )
        allowed = COMMAND_ARGS[name_tok.text]
        self._expect("PUNCT", "(")
        args: dict[str, Value] = {}
        nxt = self._peek()
        if not (nxt is not None and nxt.kind == "PUNCT" and nxt.text == ")"):
            while True:
                key_tok = self._expect("IDENT")
                if key_tok.text not in allowed:
                    raise ScriptSemanticError(
                        f"line {key_tok.line}: unknown argument {key_tok.text!r} "
                        f"for {name_tok.text}"
                    )
                if key_tok.text in args:
                    raise ScriptSemanticError(
                        f"line {key_tok.line}: duplicate argument {key_tok.text!r}"
                    )
                self._expect("PUNCT", ":")
                args[key_tok.text] = self._value()
                nxt = self._peek()
                if nxt is not None and nxt.kind == "PUNCT" and nxt.text == ",":
                    self.pos += 1
                    continue
                break
        self._expect("PUNCT", ")")
        return ScriptCommand(name=name_tok.text, args=args)

    def script(self) -> list[ScriptCommand]:
        commands = []
        while self._peek() is not None:
            commands.append(self.command())
        return commands


def parse_script(text: str) -> list[ScriptCommand]:
    """Parse script text into commands.

    Raises :class:`ScriptSyntaxError` (with line and column) on token or
    grammar problems and :class:`ScriptSemanticError` on unknown command
    or argument names.
    """
    return _Parser(_tokenize(text), text).script()


def _format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, list):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return repr(value)


def format_script(commands: list[ScriptCommand]) -> str:
    """Pretty-print commands; parsing the result reproduces them."""
    return "\n".join(
        "{}({})".format(
            c.name, ", ".join(f"{k}: {_format_value(v)}" for k, v in c.args.items())
        )
        for c in commands
    ) + ("\n" if commands else "")


@dataclass
class StepReport:
    index: int
    command: str
    elapsed_s: float
    stats: DatasetStats | None
    outputs: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "command": self.command,
            "elapsed_s": self.elapsed_s,
            "stats": self.stats.as_dict() if self.stats else None,
            "outputs": list(self.outputs),
            "notes": list(self.notes),
        }


@dataclass
class ExecutionReport:
    steps: list[StepReport] = field(default_factory=list)

    @property
    def outputs(self) -> list[str]:
        return [path for step in self.steps for path in step.outputs]

    def as_dict(self) -> dict:
        return {"steps": [s.as_dict() for s in self.steps]}


def _year_filter(value: Value, arg: str, index: int) -> YearFilter:
    ok = (
        isinstance(value, list)
        and len(value) == 3
        and all(isinstance(v, int) and not isinstance(v, bool) for v in value[:2])
        and isinstance(value[2], bool)
    )
    if not ok:
        raise ScriptExecutionError(index, f"{arg} expects [lo, hi, includeMissing]")
    return YearFilter(value[0], value[1], value[2])


def _import_file(cmd: ScriptCommand, index: int, session_box: dict,
                 workdir: Path, bind: dict[str, str]) -> list[str]:
    if ("file" in cmd.args) == ("files" in cmd.args):
        raise ScriptExecutionError(index, "importFile needs exactly one of file:/files:")
    names = cmd.args.get("files", [cmd.args.get("file")])
    if not isinstance(names, list) or not all(isinstance(f, str) for f in names):
        raise ScriptExecutionError(index, "importFile file names must be strings")
    ftype = cmd.args.get("type", "WOS")
    if ftype != "WOS":
        raise ScriptExecutionError(index, f"unsupported import type {ftype!r}")
    rpy = _year_filter(cmd.args.get("RPY", [1000, 2100, True]), "RPY", index)
    py = _year_filter(cmd.args.get("PY", [1000, 2100, True]), "PY", index)
    max_cr = cmd.args.get("maxCR", 0)
    if not isinstance(max_cr, int) or isinstance(max_cr, bool) or max_cr < 0:
        raise ScriptExecutionError(index, "maxCR must be a non-negative integer")

    records = []
    notes = []
    for name in names:
        path = workdir / bind.get(name, name)
        if not path.is_file():
            raise ScriptExecutionError(index, f"input file not found: {path}")
        result = parse_wos_file(path.read_bytes(), source_name=name)
        records.extend(result.records)
        notes.extend(result.diagnostics)
    try:
        dataset = build_dataset(records, rpy_filter=rpy, py_filter=py, max_cr=max_cr)
    except (EmptyDatasetError, ValueError) as exc:
        raise ScriptExecutionError(index, str(exc)) from exc
    session_box["session"] = Session(dataset)
    return notes


def execute(
    commands: list[ScriptCommand],
    workdir: str | Path,
    input_bind: dict[str, str] | None = None,
) -> ExecutionReport:
    """Run commands in order against one session rooted at ``workdir``.

    ``input_bind`` remaps the file names mentioned by ``importFile`` so
    published scripts can run unmodified against local data.  Exports
    and saves are written under ``workdir``.
    """
    workdir = Path(workdir)
    bind = input_bind or {}
    report = ExecutionReport()
    if not commands:
        return report
    if commands[0].name != "importFile":
        raise ScriptExecutionError(0, "scripts must start with importFile")

    box: dict[str, Session] = {}
    for index, cmd in enumerate(commands):
        t0 = time.perf_counter()
        outputs: list[str] = []
        notes: list[str] = []
        session = box.get("session")
        try:
            if cmd.name == "importFile":
                notes = _import_file(cmd, index, box, workdir, bind)
                session = box["session"]
            elif session is None:
                raise ScriptExecutionError(index, f"{cmd.name} before importFile")
            elif cmd.name == "cluster":
                threshold = cmd.args.get("threshold", 0.75)
                if isinstance(threshold, bool) or not isinstance(threshold, (int, float)):
                    raise ScriptExecutionError(index, "threshold must be a number")
                config = ClusterConfig(
                    threshold=float(threshold),
                    use_volume=bool(cmd.args.get("volume", True)),
                    use_page=bool(cmd.args.get("page", True)),
                    use_doi=bool(cmd.args.get("DOI", False)),
                )
                n = session.cluster(config)
                notes.append(f"{n} clusters")
            elif cmd.name == "merge":
                n = session.merge()
                notes.append(f"{n} distinct references")
            elif cmd.name == "removeCR":
                bounds = cmd.args.get("N_CR")
                ok = (
                    isinstance(bounds, list)
                    and len(bounds) == 2
                    and all(isinstance(b, int) and not isinstance(b, bool) for b in bounds)
                )
                if not ok:
                    raise ScriptExecutionError(index, "removeCR expects N_CR: [lo, hi]")
                n = session.remove_ncr(bounds[0], bounds[1])
                notes.append(f"removed {n} references")
            elif cmd.name == "exportFile":
                name = cmd.args.get("file")
                ftype = cmd.args.get("type")
                if not isinstance(name, str) or ftype not in EXPORT_TYPES:
                    raise ScriptExecutionError(
                        index, f"exportFile needs file: and type: one of {EXPORT_TYPES}"
                    )
                path = workdir / name
                if ftype == "CSV_CR":
                    exports.export_csv_cr(session.dataset, path)
                else:
                    exports.export_csv_graph(session.dataset, path)
                outputs.append(str(path))
            elif cmd.name == "saveFile":
                name = cmd.args.get("file")
                if not isinstance(name, str):
                    raise ScriptExecutionError(index, "saveFile needs file:")
                path = workdir / name
                exports.save_cre(session.dataset, path)
                outputs.append(str(path))
        except ScriptExecutionError:
            raise
        except (OperationOrderError, EmptyDatasetError, ValueError, OSError) as exc:
            raise ScriptExecutionError(index, str(exc)) from exc

        dataset = box["session"].dataset if "session" in box else None
        stats = None
        if dataset is not None and not dataset.is_empty:
            stats = compute_stats(dataset)
        report.steps.append(
            StepReport(
                index=index,
                command=cmd.name,
                elapsed_s=time.perf_counter() - t0,
                stats=stats,
                outputs=outputs,
                notes=notes,
            )
        )
    return report


def run_script_text(
    text: str, workdir: str | Path, input_bind: dict[str, str] | None = None
) -> ExecutionReport:
    """Parse and execute a script in one call."""
    return execute(parse_script(text), workdir, input_bind)
