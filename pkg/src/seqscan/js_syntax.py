"""Token-level JavaScript indexer.

Not a full parser: a structural scan over a hand-rolled token stream, good
enough for import bindings (require/import in all common forms), name-bound
function declarations with brace-matched line spans, textual call sites,
string literals (including template-literal chunks) and member reads.

Known precision limits, accepted as false negatives: object-literal methods
and anonymous callbacks attribute their bodies to the enclosing named scope;
computed member access and dynamic receivers are never matched; expression-
bodied arrow spans end at the statement heuristically.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .syntax import (
    AttributeRead,
    CallSite,
    Declaration,
    FileIndex,
    ImportBinding,
    StringLit,
)

KEYWORDS = {
    "if", "for", "while", "switch", "catch", "return", "typeof", "new",
    "delete", "void", "in", "of", "instanceof", "function", "class", "do",
    "else", "case", "throw", "await", "yield", "var", "let", "const",
    "import", "export", "from", "default", "async", "static", "get", "set",
    "extends", "super", "true", "false", "null", "undefined", "try",
    "finally", "break", "continue", "with", "debugger",
}

# after these a leading '/' starts a regex literal, not division
_REGEX_AFTER_IDENT = {
    "return", "typeof", "case", "delete", "void", "instanceof", "in", "of",
    "new", "do", "else", "yield", "await", "throw",
}

_OPERATORS = (
    ">>>=", "===", "!==", "**=", "<<=", ">>=", "&&=", "||=", "??=", "...",
    ">>>", "=>", "?.", "==", "!=", "<=", ">=", "&&", "||", "??", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "++", "--", "**",
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}


@dataclass
class Token:
    kind: str  # ident | string | num | punct | regex
    value: str
    pos: int  # absolute offset, mapped to (line, col) later
    line: int = 0
    col: int = 0


def _unescape(text: str) -> str:
    if "\\" not in text:
        return text
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch != "\\" or i + 1 >= n:
            out.append(ch)
            i += 1
            continue
        nxt = text[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt == "x" and i + 3 < n:
            try:
                out.append(chr(int(text[i + 2:i + 4], 16)))
                i += 4
            except ValueError:
                out.append(nxt)
                i += 2
        elif nxt == "u":
            hexpart = text[i + 2:i + 6]
            try:
                out.append(chr(int(hexpart, 16)))
                i += 6
            except ValueError:
                out.append(nxt)
                i += 2
        else:
            out.append(nxt)
            i += 2
    return "".join(out)


def _ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _regex_allowed(prev: Token | None) -> bool:
    if prev is None:
        return True
    if prev.kind in ("num", "string", "regex"):
        return False
    if prev.kind == "ident":
        return prev.value in _REGEX_AFTER_IDENT
    return prev.value not in (")", "]")


def tokenize(content: str) -> list[Token]:
    tokens: list[Token] = []
    # mode stack entries: ["tmpl"] scanning template text, ["expr", depth] inside ${}
    modes: list[list] = []
    i, n = 0, len(content)

    while i < n:
        if modes and modes[-1][0] == "tmpl":
            chunk_start = i
            closed = False
            while i < n:
                ch = content[i]
                if ch == "\\":
                    i += 2
                    continue
                if ch == "`":
                    if i > chunk_start:
                        tokens.append(Token("string", _unescape(content[chunk_start:i]), chunk_start))
                    modes.pop()
                    i += 1
                    closed = True
                    break
                if ch == "$" and content[i + 1:i + 2] == "{":
                    if i > chunk_start:
                        tokens.append(Token("string", _unescape(content[chunk_start:i]), chunk_start))
                    modes.append(["expr", 0])
                    i += 2
                    closed = True
                    break
                i += 1
            if not closed and i >= n and n > chunk_start:
                tokens.append(Token("string", _unescape(content[chunk_start:n]), chunk_start))
            continue

        ch = content[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "/" and i + 1 < n:
            nxt = content[i + 1]
            if nxt == "/":
                end = content.find("\n", i)
                i = n if end < 0 else end + 1
                continue
            if nxt == "*":
                end = content.find("*/", i + 2)
                i = n if end < 0 else end + 2
                continue
            if _regex_allowed(tokens[-1] if tokens else None):
                end = _scan_regex(content, i)
                if end is not None:
                    tokens.append(Token("regex", content[i:end], i))
                    i = end
                    continue
        if ch in "\"'":
            end, value = _scan_string(content, i)
            tokens.append(Token("string", value, i))
            i = end
            continue
        if ch == "`":
            modes.append(["tmpl"])
            i += 1
            continue
        if ch.isdigit() or (ch == "." and content[i + 1:i + 2].isdigit()):
            j = i + 1
            while j < n and (content[j].isalnum() or content[j] in "._"):
                j += 1
            tokens.append(Token("num", content[i:j], i))
            i = j
            continue
        if _ident_start(ch) or (ch == "#" and i + 1 < n and _ident_start(content[i + 1])):
            j = i + 1
            while j < n and (content[j].isalnum() or content[j] in "_$"):
                j += 1
            tokens.append(Token("ident", content[i:j], i))
            i = j
            continue
        if ch == "{" and modes and modes[-1][0] == "expr":
            modes[-1][1] += 1
        elif ch == "}" and modes and modes[-1][0] == "expr":
            if modes[-1][1] == 0:
                modes.pop()  # closes the ${...}, not a real brace
                i += 1
                continue
            modes[-1][1] -= 1
        matched = False
        for op in _OPERATORS:
            if content.startswith(op, i):
                tokens.append(Token("punct", op, i))
                i += len(op)
                matched = True
                break
        if not matched:
            tokens.append(Token("punct", ch, i))
            i += 1

    line_offsets = [0]
    for idx, c in enumerate(content):
        if c == "\n":
            line_offsets.append(idx + 1)
    for tok in tokens:
        row = bisect.bisect_right(line_offsets, tok.pos) - 1
        tok.line = row + 1
        tok.col = tok.pos - line_offsets[row]
    return tokens


def _scan_string(content: str, i: int) -> tuple[int, str]:
    quote = content[i]
    j = i + 1
    n = len(content)
    start = j
    while j < n:
        ch = content[j]
        if ch == "\\":
            j += 2
            continue
        if ch == quote:
            return j + 1, _unescape(content[start:j])
        if ch == "\n":
            break  # unterminated; salvage what we saw
        j += 1
    return j, _unescape(content[start:j])


def _scan_regex(content: str, i: int) -> int | None:
    j = i + 1
    n = len(content)
    in_class = False
    while j < n:
        ch = content[j]
        if ch == "\\":
            j += 2
            continue
        if ch == "\n":
            return None
        if ch == "[":
            in_class = True
        elif ch == "]":
            in_class = False
        elif ch == "/" and not in_class:
            j += 1
            while j < n and content[j].isalpha():
                j += 1
            return j
        j += 1
    return None


@dataclass
class _Scope:
    kind: str  # "function" | "class"
    name: str
    decl_index: int | None  # index into declarations, for span finalization


class _JsIndexer:
    def __init__(self, tokens: list[Token], n_lines: int) -> None:
        self.ts = tokens
        self.n_lines = n_lines
        self.declarations: list[Declaration] = []
        self.imports: list[ImportBinding] = []
        self.calls: list[CallSite] = []
        self.strings: list[StringLit] = []
        self.attributes: list[AttributeRead] = []
        self.scopes: list[_Scope] = []
        self.brackets: list[tuple[str, _Scope | None]] = []
        self.attach_at: dict[int, _Scope] = {}
        # brace-stack size marking each open class body, innermost last
        self.class_body_levels: list[int] = []

    # -- token helpers -------------------------------------------------

    def tok(self, i: int) -> Token | None:
        return self.ts[i] if 0 <= i < len(self.ts) else None

    def is_punct(self, i: int, value: str) -> bool:
        t = self.tok(i)
        return t is not None and t.kind == "punct" and t.value == value

    def is_ident(self, i: int, value: str | None = None) -> bool:
        t = self.tok(i)
        if t is None or t.kind != "ident":
            return False
        return value is None or t.value == value

    def _matching_paren(self, i: int) -> int | None:
        """Index of the ')' matching the '(' at i."""
        depth = 0
        for j in range(i, len(self.ts)):
            t = self.ts[j]
            if t.kind != "punct":
                continue
            if t.value == "(":
                depth += 1
            elif t.value == ")":
                depth -= 1
                if depth == 0:
                    return j
        return None

    # -- declaration plumbing -------------------------------------------

    def _dotted(self, name: str) -> str:
        return ".".join([s.name for s in self.scopes] + [name])

    def _enclosing_class(self) -> str | None:
        for scope in reversed(self.scopes):
            if scope.kind == "class":
                return ".".join(s.name for s in self.scopes[: self.scopes.index(scope) + 1])
        return None

    def _add_decl(self, name: str, start: Token, end_line: int | None = None) -> int:
        self.declarations.append(Declaration(
            name=name,
            dotted=self._dotted(name),
            start_line=start.line,
            end_line=end_line if end_line is not None else start.line,
            col=start.col,
            in_class=self._enclosing_class(),
        ))
        return len(self.declarations) - 1

    def _finalize(self, decl_index: int, end_line: int) -> None:
        d = self.declarations[decl_index]
        self.declarations[decl_index] = Declaration(
            name=d.name, dotted=d.dotted, start_line=d.start_line,
            end_line=max(end_line, d.start_line), col=d.col, in_class=d.in_class,
        )

    def _attach_body(self, name_tok: Token, name: str, params_open: int) -> int:
        """Register a brace-bodied declaration; returns resume index."""
        close = self._matching_paren(params_open)
        if close is None:
            self._add_decl(name, name_tok)
            return params_open
        body = close + 1
        if self.is_punct(body, "{"):
            idx = self._add_decl(name, name_tok)
            self.attach_at[body] = _Scope("function", name, idx)
        else:
            self._add_decl(name, name_tok, end_line=self.ts[close].line)
        return params_open  # params are re-walked normally

    def _arrow_expression_end(self, arrow_idx: int) -> int:
        """Line where an expression-bodied arrow's statement ends."""
        depth = 0
        last_line = self.ts[arrow_idx].line
        for j in range(arrow_idx + 1, len(self.ts)):
            t = self.ts[j]
            if t.kind == "punct":
                if t.value in "([{":
                    depth += 1
                elif t.value in ")]}":
                    if depth == 0:
                        return last_line
                    depth -= 1
                elif t.value in ";," and depth == 0:
                    return t.line
            last_line = t.line
        return last_line

    # -- statement-ish parsers -------------------------------------------

    def _parse_import(self, i: int) -> int:
        start = self.ts[i]
        t1 = self.tok(i + 1)
        if t1 is None:
            return i + 1
        if t1.kind == "string":
            self.imports.append(ImportBinding(module=t1.value, symbol=None, alias="",
                                              line=start.line, col=start.col))
            return i + 2
        if t1.kind == "punct" and t1.value == "(":
            t2 = self.tok(i + 2)
            if t2 is not None and t2.kind == "string" and self.is_punct(i + 3, ")"):
                self.imports.append(ImportBinding(module=t2.value, symbol=None, alias="",
                                                  line=start.line, col=start.col, is_dynamic=True))
                return i + 4
            return i + 1
        # clause ... from "module"
        pending: list[tuple[str | None, str]] = []  # (symbol, alias)
        j = i + 1
        limit = min(i + 120, len(self.ts))
        while j < limit:
            t = self.ts[j]
            if t.kind == "ident" and t.value == "from":
                spec = self.tok(j + 1)
                if spec is not None and spec.kind == "string":
                    for symbol, alias in pending or [(None, "")]:
                        self.imports.append(ImportBinding(module=spec.value, symbol=symbol,
                                                          alias=alias, line=start.line, col=start.col))
                    return j + 2
                return j + 1
            if t.kind == "punct" and t.value == "*":
                if self.is_ident(j + 1, "as") and self.is_ident(j + 2):
                    pending.append((None, self.ts[j + 2].value))
                    j += 3
                    continue
            if t.kind == "punct" and t.value == "{":
                j += 1
                while j < limit and not self.is_punct(j, "}"):
                    if self.is_ident(j):
                        name = self.ts[j].value
                        if self.is_ident(j + 1, "as") and self.is_ident(j + 2):
                            pending.append((name, self.ts[j + 2].value))
                            j += 3
                        else:
                            pending.append((name, name))
                            j += 1
                    else:
                        j += 1
                j += 1
                continue
            if t.kind == "ident" and t.value not in KEYWORDS:
                pending.append((None, t.value))  # default import: alias acts as namespace
            if t.kind == "punct" and t.value == ";":
                break
            j += 1
        return i + 1

    def _parse_require(self, i: int, alias: str | None = None) -> tuple[int, str | None]:
        """Cursor at `require`; returns (resume_index, module) or (i+1, None)."""
        if not (self.is_punct(i + 1, "(")):
            return i + 1, None
        spec = self.tok(i + 2)
        if spec is None or spec.kind != "string" or not self.is_punct(i + 3, ")"):
            return i + 1, None  # computed require: ignored
        module = spec.value
        req = self.ts[i]
        after = i + 4
        dot = self.tok(after)
        if dot is not None and dot.kind == "punct" and dot.value in (".", "?."):
            member = self.tok(after + 1)
            if member is not None and member.kind == "ident":
                target = f"{module}.{member.value}"
                if self.is_punct(after + 2, "("):
                    self.imports.append(ImportBinding(module=module, symbol=None, alias="",
                                                      line=req.line, col=req.col))
                    self.calls.append(CallSite(callee=member.value, line=req.line, col=req.col,
                                               via_module=module))
                    return after + 2, module  # resume at '(' so args are walked
                self.imports.append(ImportBinding(module=module, symbol=member.value,
                                                  alias=alias or "", line=req.line, col=req.col))
                self.attributes.append(AttributeRead(dotted=target, line=req.line, col=req.col))
                return after + 2, module
        self.imports.append(ImportBinding(module=module, symbol=None, alias=alias or "",
                                          line=req.line, col=req.col))
        return after, module

    def _parse_binding(self, i: int) -> int:
        """const/let/var NAME = <require | function | arrow>."""
        j = i + 1
        if self.is_punct(j, "{"):
            return self._parse_destructure_require(i)
        if not self.is_ident(j) or self.ts[j].value in KEYWORDS:
            return i + 1
        name_tok = self.ts[j]
        if not self.is_punct(j + 1, "="):
            return j + 1
        k = j + 2
        if self.is_ident(k, "require"):
            resume, module = self._parse_require(k, alias=name_tok.value)
            return resume if module is not None else j + 2
        return self._parse_named_value(name_tok, k, fallback=j + 2)

    def _parse_named_value(self, name_tok: Token, k: int, fallback: int,
                           name: str | None = None) -> int:
        """Function expression or arrow assigned to a name; k at the value."""
        name = name if name is not None else name_tok.value
        if self.is_ident(k, "async"):
            k += 1
        if self.is_ident(k, "function"):
            k += 1
            if self.is_punct(k, "*"):
                k += 1
            if self.is_ident(k):  # named function expression: binding name wins
                k += 1
            if self.is_punct(k, "("):
                return self._attach_body(name_tok, name, k)
            return fallback
        if self.is_punct(k, "("):
            close = self._matching_paren(k)
            if close is not None and self.is_punct(close + 1, "=>"):
                arrow = close + 1
                if self.is_punct(arrow + 1, "{"):
                    idx = self._add_decl(name, name_tok)
                    self.attach_at[arrow + 1] = _Scope("function", name, idx)
                else:
                    self._add_decl(name, name_tok,
                                   end_line=self._arrow_expression_end(arrow))
                return k
            return fallback
        if self.is_ident(k) and self.is_punct(k + 1, "=>"):
            arrow = k + 1
            if self.is_punct(arrow + 1, "{"):
                idx = self._add_decl(name, name_tok)
                self.attach_at[arrow + 1] = _Scope("function", name, idx)
            else:
                self._add_decl(name, name_tok,
                               end_line=self._arrow_expression_end(arrow))
            return k + 2 if self.is_punct(arrow + 1, "{") else k + 1
        return fallback

    def _parse_destructure_require(self, i: int) -> int:
        """const { a, b: c } = require('mod')."""
        j = i + 1  # at '{'
        names: list[tuple[str, str]] = []
        k = j + 1
        limit = min(k + 80, len(self.ts))
        while k < limit and not self.is_punct(k, "}"):
            if self.is_ident(k):
                prop = self.ts[k].value
                if self.is_punct(k + 1, ":") and self.is_ident(k + 2):
                    names.append((prop, self.ts[k + 2].value))
                    k += 3
                else:
                    names.append((prop, prop))
                    k += 1
            else:
                k += 1
        if not self.is_punct(k, "}") or not self.is_punct(k + 1, "="):
            return i + 1
        if not self.is_ident(k + 2, "require") or not self.is_punct(k + 3, "("):
            return i + 1
        spec = self.tok(k + 4)
        if spec is None or spec.kind != "string" or not self.is_punct(k + 5, ")"):
            return i + 1
        start = self.ts[i]
        for symbol, alias in names:
            self.imports.append(ImportBinding(module=spec.value, symbol=symbol, alias=alias,
                                              line=start.line, col=start.col))
        return k + 6

    def _parse_function_decl(self, i: int) -> int:
        j = i + 1
        if self.is_punct(j, "*"):
            j += 1
        if self.is_ident(j) and self.ts[j].value not in KEYWORDS and self.is_punct(j + 1, "("):
            return self._attach_body(self.ts[j], self.ts[j].value, j + 1)
        return i + 1  # anonymous: body walks as plain braces

    def _parse_class(self, i: int) -> int:
        j = i + 1
        name = None
        if self.is_ident(j) and self.ts[j].value not in KEYWORDS:
            name = self.ts[j].value
            j += 1
        limit = min(j + 40, len(self.ts))
        while j < limit and not self.is_punct(j, "{"):
            j += 1
        if self.is_punct(j, "{") and name:
            self.attach_at[j] = _Scope("class", name, None)
        return i + 1 if name is None else j

    def _parse_class_member(self, i: int) -> int | None:
        j = i
        while self.is_ident(j) and self.ts[j].value in ("static", "async", "get", "set"):
            # `get(...)` etc. used as a method name, not a modifier
            if self.is_punct(j + 1, "("):
                break
            j += 1
        if self.is_punct(j, "*"):
            j += 1
        t = self.tok(j)
        if t is None or t.kind != "ident":
            return None
        if self.is_punct(j + 1, "("):
            return self._attach_body(t, t.value, j + 1)
        if self.is_punct(j + 1, "="):
            resume = self._parse_named_value(t, j + 2, fallback=-1)
            return resume if resume != -1 else None
        return None

    def _parse_exports_binding(self, i: int, chain: list[str], after: int) -> int | None:
        """module.exports.NAME = fn / exports.NAME = fn."""
        if chain[:2] == ["module", "exports"] and len(chain) == 3:
            name = chain[2]
        elif chain[0] == "exports" and len(chain) == 2:
            name = chain[1]
        else:
            return None
        if not self.is_punct(after, "="):
            return None
        # bind under the simple name so in-file calls resolve
        resume = self._parse_named_value(self.ts[i], after + 1, fallback=-1, name=name)
        return None if resume == -1 else resume

    # -- main walk ---------------------------------------------------------

    def run(self) -> FileIndex:
        ts = self.ts
        i = 0
        while i < len(ts):
            t = ts[i]
            if t.kind == "punct":
                i = self._handle_punct(i)
                continue
            if t.kind == "string":
                self.strings.append(StringLit(value=t.value, line=t.line, col=t.col))
                i += 1
                continue
            if t.kind in ("num", "regex"):
                i += 1
                continue
            # idents ---------------------------------------------------------
            value = t.value
            if value == "import":
                i = self._parse_import(i)
                continue
            if value in ("const", "let", "var"):
                i = self._parse_binding(i)
                continue
            if value == "function":
                i = self._parse_function_decl(i)
                continue
            if value == "class":
                i = self._parse_class(i)
                continue
            if value == "require":
                resume, module = self._parse_require(i)
                i = resume
                continue
            if value == "new":
                j = i + 1
                chain: list[str] = []
                while self.is_ident(j) and self.ts[j].value not in KEYWORDS:
                    chain.append(self.ts[j].value)
                    if self.tok(j + 1) is not None and self.ts[j + 1].kind == "punct" \
                            and self.ts[j + 1].value in (".", "?.") and self.is_ident(j + 2):
                        j += 2
                        continue
                    j += 1
                    break
                if chain and self.is_punct(j, "("):
                    self.calls.append(CallSite(callee=".".join(chain), line=ts[i + 1].line,
                                               col=ts[i + 1].col, is_new=True))
                i = j if chain else i + 1
                continue
            if self.class_body_levels and len(self.brackets) == self.class_body_levels[-1]:
                resume = self._parse_class_member(i)
                if resume is not None:
                    i = resume
                    continue
            if value in KEYWORDS:
                i += 1
                continue
            # assignment-style require binding: `x = require('m')` (also the
            # second declarator of `const a = require('a'), x = require('m')`)
            if self.is_punct(i + 1, "=") and self.is_ident(i + 2, "require"):
                resume, module = self._parse_require(i + 2, alias=value)
                if module is not None:
                    i = resume
                    continue
            # generic chain: call site, exports binding or member read
            chain = [value]
            j = i + 1
            while self.tok(j) is not None and ts[j].kind == "punct" and ts[j].value in (".", "?.") \
                    and self.is_ident(j + 1) and not ts[j + 1].value.startswith("#"):
                chain.append(ts[j + 1].value)
                j += 2
            resume = self._parse_exports_binding(i, chain, j)
            if resume is not None:
                i = resume
                continue
            if self.is_punct(j, "("):
                self.calls.append(CallSite(callee=".".join(chain), line=t.line, col=t.col))
            elif len(chain) >= 2:
                self.attributes.append(AttributeRead(dotted=".".join(chain), line=t.line, col=t.col))
            i = j
        self._finalize_leftovers()
        return FileIndex(
            n_lines=self.n_lines,
            declarations=tuple(self.declarations),
            imports=tuple(self.imports),
            calls=tuple(sorted(self.calls, key=lambda c: (c.line, c.col))),
            strings=tuple(sorted(self.strings, key=lambda s: (s.line, s.col))),
            attributes=tuple(sorted(self.attributes, key=lambda a: (a.line, a.col))),
        )

    def _handle_punct(self, i: int) -> int:
        t = self.ts[i]
        value = t.value
        if value == "{":
            scope = self.attach_at.pop(i, None)
            self.brackets.append(("{", scope))
            if scope is not None:
                self.scopes.append(scope)
                if scope.kind == "class":
                    self.class_body_levels.append(len(self.brackets))
            return i + 1
        if value == "}":
            while self.brackets:
                kind, scope = self.brackets.pop()
                if kind == "{":
                    if scope is not None:
                        if scope.decl_index is not None:
                            self._finalize(scope.decl_index, t.line)
                        if self.scopes and self.scopes[-1] is scope:
                            self.scopes.pop()
                        if scope.kind == "class" and self.class_body_levels:
                            self.class_body_levels.pop()
                    break
            return i + 1
        if value in ("(", "["):
            self.brackets.append((value, None))
            return i + 1
        if value in (")", "]"):
            opener = "(" if value == ")" else "["
            for idx in range(len(self.brackets) - 1, -1, -1):
                if self.brackets[idx][0] == opener:
                    del self.brackets[idx]
                    break
            return i + 1
        if value in (".", "?."):
            # a '.'-led ident is a member, never a chain head
            return i + 2 if self.is_ident(i + 1) else i + 1
        return i + 1

    def _finalize_leftovers(self) -> None:
        last_line = self.ts[-1].line if self.ts else 1
        for _, scope in self.brackets:
            if scope is not None and scope.decl_index is not None:
                self._finalize(scope.decl_index, last_line)


def index_javascript(content: str) -> FileIndex:
    n_lines = content.count("\n") + 1
    try:
        tokens = tokenize(content)
        return _JsIndexer(tokens, n_lines).run()
    except (RecursionError, MemoryError) as exc:
        return FileIndex(n_lines=n_lines, parse_ok=False, error=f"javascript index failure: {exc}")
