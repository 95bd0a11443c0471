"""Recursive-descent parser producing `syntax.Program` trees.

Omitted type slots (method return, parameters, `var` locals, bare fields,
lambda parameters) are represented by ``annotation=None`` and marked for
inference later.
"""

from __future__ import annotations

from .errors import JtxSyntaxError
from .lexer import tokenize
from . import syntax as S


def parse(source):
    return _Parser(tokenize(source)).program()


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, offset=0):
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def at(self, kind, text=None):
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def at_punct(self, text):
        return self.at("punct", text)

    def advance(self):
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind, text=None):
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            raise JtxSyntaxError(f"expected {want!r}, found {t.text!r}",
                                 t.line, t.col)
        return self.advance()

    def pos(self):
        t = self.peek()
        return S.Pos(t.line, t.col)

    # -- grammar ------------------------------------------------------------

    def program(self):
        imports = []
        while self.at("keyword", "import"):
            self.advance()
            imports.append(self.qualname())
            self.expect("punct", ";")
        classes = []
        while self.at("keyword", "class"):
            classes.append(self.class_decl())
        self.expect("eof")
        return S.Program(imports=imports, classes=classes)

    def qualname(self):
        parts = [self.expect("ident").text]
        while self.at_punct("."):
            self.advance()
            parts.append(self.expect("ident").text)
        return ".".join(parts)

    def class_decl(self):
        pos = self.pos()
        self.expect("keyword", "class")
        name = self.expect("ident").text
        generics = self.generics_clause() if self.at_punct("<") else []
        self.expect("punct", "{")
        fields, methods = [], []
        seen_fields = set()
        while not self.at_punct("}"):
            member = self.member()
            if isinstance(member, S.FieldDecl):
                if member.name in seen_fields:
                    raise JtxSyntaxError(f"duplicate field '{member.name}'",
                                         member.pos.line, member.pos.col)
                seen_fields.add(member.name)
                fields.append(member)
            else:
                methods.append(member)
        self.expect("punct", "}")
        return S.ClassDecl(name=name, generics=generics, fields=fields,
                           methods=methods, pos=pos)

    def generics_clause(self):
        self.expect("punct", "<")
        params = []
        while True:
            name = self.expect("ident").text
            bound = None
            if self.at("keyword", "extends"):
                self.advance()
                bound = self.type_ref()
                if bound.name == "Object" and not bound.args:
                    bound = None
            params.append(S.GenericParam(name=name, bound=bound))
            if self.at_punct(","):
                self.advance()
                continue
            break
        self.expect("punct", ">")
        return params

    def member(self):
        pos = self.pos()
        generics = self.generics_clause() if self.at_punct("<") else []
        if self.at("keyword", "void"):
            self.advance()
            name = self.expect("ident").text
            return self.method_rest(name, S.SrcType("void"), generics, pos)
        # ident '(' -> method with return type to infer
        if self.at("ident") and self.peek(1).kind == "punct" \
                and self.peek(1).text == "(":
            name = self.advance().text
            if generics:
                return self.method_rest(name, None, generics, pos)
            return self.method_rest(name, None, [], pos)
        # bare field: ident ('=' expr)? ';'
        if self.at("ident") and self.peek(1).kind == "punct" \
                and self.peek(1).text in ("=", ";"):
            name = self.advance().text
            init = None
            if self.at_punct("="):
                self.advance()
                init = self.expr()
            self.expect("punct", ";")
            return S.FieldDecl(name=name, annotation=None, init=init, pos=pos)
        # annotated member: type ident ...
        ann = self.type_ref()
        name = self.expect("ident").text
        if self.at_punct("("):
            return self.method_rest(name, ann, generics, pos)
        init = None
        if self.at_punct("="):
            self.advance()
            init = self.expr()
        self.expect("punct", ";")
        if generics:
            raise JtxSyntaxError("generics clause on a field", pos.line, pos.col)
        return S.FieldDecl(name=name, annotation=ann, init=init, pos=pos)

    def method_rest(self, name, ret, generics, pos):
        self.expect("punct", "(")
        params = []
        seen = set()
        while not self.at_punct(")"):
            ppos = self.pos()
            if self.at("ident") and self.peek(1).kind == "ident":
                ann = self.type_ref()
                pname = self.expect("ident").text
            elif self.at("ident") and self.peek(1).kind == "punct" \
                    and self.peek(1).text in ("<", "."):
                ann = self.type_ref()
                pname = self.expect("ident").text
            else:
                ann = None
                pname = self.expect("ident").text
            if pname in seen:
                raise JtxSyntaxError(f"duplicate parameter '{pname}'",
                                     ppos.line, ppos.col)
            seen.add(pname)
            params.append(S.Param(name=pname, annotation=ann))
            if self.at_punct(","):
                self.advance()
        self.expect("punct", ")")
        body = self.block()
        return S.MethodDecl(name=name, generics=generics, ret=ret,
                            params=params, body=body, pos=pos)

    def type_ref(self):
        pos = self.pos()
        if self.at("keyword", "void"):
            self.advance()
            return S.SrcType("void", [], pos)
        name = self.qualname()
        args = []
        if self.at_punct("<"):
            self.advance()
            if self.at_punct(">"):  # diamond
                self.advance()
                return S.SrcType(name, None, pos)
            args.append(self.type_ref())
            while self.at_punct(","):
                self.advance()
                args.append(self.type_ref())
            self.expect("punct", ">")
        return S.SrcType(name, args, pos)

    def block(self):
        self.expect("punct", "{")
        stmts = []
        while not self.at_punct("}"):
            stmts.append(self.statement())
        self.expect("punct", "}")
        return stmts

    def statement(self):
        pos = self.pos()
        if self.at("keyword", "while"):
            self.advance()
            self.expect("punct", "(")
            cond = self.expr()
            self.expect("punct", ")")
            body = self.block()
            return S.While(cond=cond, body=body, pos=pos)
        if self.at("keyword", "return"):
            self.advance()
            value = None
            if not self.at_punct(";"):
                value = self.expr()
            self.expect("punct", ";")
            return S.Return(value=value, pos=pos)
        if self.at("keyword", "var"):
            self.advance()
            name = self.expect("ident").text
            init = None
            if self.at_punct("="):
                self.advance()
                init = self.expr()
            self.expect("punct", ";")
            return S.LocalDecl(name=name, annotation=None, init=init, pos=pos)
        # annotated local: type ident ('=' expr)? ';'
        if self.at("ident") and (
                self.peek(1).kind == "ident"
                or (self.peek(1).kind == "punct" and self.peek(1).text == "<"
                    and self._looks_like_generic_type())):
            ann = self.type_ref()
            name = self.expect("ident").text
            init = None
            if self.at_punct("="):
                self.advance()
                init = self.expr()
            self.expect("punct", ";")
            return S.LocalDecl(name=name, annotation=ann, init=init, pos=pos)
        expr = self.expr()
        if self.at_punct("="):
            self.advance()
            value = self.expr()
            self.expect("punct", ";")
            if not isinstance(expr, (S.Name, S.FieldAccess)):
                raise JtxSyntaxError("invalid assignment target",
                                     pos.line, pos.col)
            return S.Assign(target=expr, value=value, pos=pos)
        if self.at_punct("++"):
            self.advance()
            self.expect("punct", ";")
            if not isinstance(expr, (S.Name, S.FieldAccess)):
                raise JtxSyntaxError("invalid increment target",
                                     pos.line, pos.col)
            return S.Increment(target=expr, pos=pos)
        self.expect("punct", ";")
        return S.ExprStmt(expr=expr, pos=pos)

    def _looks_like_generic_type(self):
        """Disambiguate `Pair<A,B> x = ...` from expressions; the subset has
        no bare `<` operator, so ident `<` at statement start is a type."""
        return True

    # -- expressions --------------------------------------------------------

    def expr(self):
        return self.or_expr()

    def or_expr(self):
        left = self.rel_expr()
        while self.at_punct("||"):
            pos = self.pos()
            self.advance()
            right = self.rel_expr()
            left = S.Binary(op="||", left=left, right=right, pos=pos)
        return left

    def rel_expr(self):
        left = self.add_expr()
        while self.at_punct("<="):
            pos = self.pos()
            self.advance()
            right = self.add_expr()
            left = S.Binary(op="<=", left=left, right=right, pos=pos)
        return left

    def add_expr(self):
        left = self.mul_expr()
        while self.at_punct("+"):
            pos = self.pos()
            self.advance()
            right = self.mul_expr()
            left = S.Binary(op="+", left=left, right=right, pos=pos)
        return left

    def mul_expr(self):
        left = self.postfix_expr()
        while self.at_punct("*"):
            pos = self.pos()
            self.advance()
            right = self.postfix_expr()
            left = S.Binary(op="*", left=left, right=right, pos=pos)
        return left

    def postfix_expr(self):
        e = self.primary()
        while self.at_punct("."):
            pos = self.pos()
            self.advance()
            name = self.expect("ident").text
            if self.at_punct("("):
                args = self.call_args()
                e = S.Call(recv=e, name=name, args=args, pos=pos)
            else:
                e = S.FieldAccess(recv=e, name=name, pos=pos)
        return e

    def call_args(self):
        self.expect("punct", "(")
        args = []
        while not self.at_punct(")"):
            args.append(self.expr())
            if self.at_punct(","):
                self.advance()
        self.expect("punct", ")")
        return args

    def primary(self):
        pos = self.pos()
        t = self.peek()
        if t.kind == "int":
            self.advance()
            return S.IntLit(value=int(t.text), pos=pos)
        if t.kind == "string":
            self.advance()
            return S.StrLit(value=t.text, pos=pos)
        if self.at("keyword", "true") or self.at("keyword", "false"):
            self.advance()
            return S.BoolLit(value=(t.text == "true"), pos=pos)
        if self.at("keyword", "new"):
            self.advance()
            cls = self.type_ref()
            args = self.call_args()
            return S.New(cls=cls, args=args, pos=pos)
        if self.at_punct("("):
            if self._lambda_ahead():
                return self.lambda_expr(pos)
            self.advance()
            e = self.expr()
            self.expect("punct", ")")
            return e
        if t.kind == "ident":
            if self.peek(1).kind == "punct" and self.peek(1).text == "->":
                return self.lambda_expr(pos)
            self.advance()
            if self.at_punct("("):
                args = self.call_args()
                return S.Call(recv=None, name=t.text, args=args, pos=pos)
            return S.Name(ident=t.text, pos=pos)
        raise JtxSyntaxError(f"unexpected token {t.text!r}", t.line, t.col)

    def _lambda_ahead(self):
        """At '(': scan to the matching ')' and test for '->'."""
        depth = 0
        j = self.i
        while j < len(self.toks):
            tok = self.toks[j]
            if tok.kind == "punct" and tok.text == "(":
                depth += 1
            elif tok.kind == "punct" and tok.text == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.toks[j + 1] if j + 1 < len(self.toks) else None
                    return (nxt is not None and nxt.kind == "punct"
                            and nxt.text == "->")
            elif tok.kind == "eof":
                return False
            j += 1
        return False

    def lambda_expr(self, pos):
        params = []
        if self.at_punct("("):
            self.advance()
            while not self.at_punct(")"):
                if self.at("ident") and self.peek(1).kind == "ident":
                    ann = self.type_ref()
                    name = self.expect("ident").text
                elif self.at("ident") and self.peek(1).kind == "punct" \
                        and self.peek(1).text in ("<", "."):
                    ann = self.type_ref()
                    name = self.expect("ident").text
                else:
                    ann = None
                    name = self.expect("ident").text
                params.append(S.Param(name=name, annotation=ann))
                if self.at_punct(","):
                    self.advance()
            self.expect("punct", ")")
        else:
            name = self.expect("ident").text
            params.append(S.Param(name=name, annotation=None))
        self.expect("punct", "->")
        if self.at_punct("{"):
            body = self.block()
        else:
            body = self.expr()
        return S.Lambda(params=params, body=body, pos=pos)
