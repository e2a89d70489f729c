"""Immutable labelled trees.

Nonterminal nodes are :class:`Tree` instances; terminal leaves are plain
strings.  A ``Tree`` without children is an open tree (a substitution site).
"""
from __future__ import annotations

from typing import Iterable, Iterator, Union

from .errors import ParseError

Node = Union["Tree", str]


class Tree:
    __slots__ = ("label", "children", "_hash")

    def __init__(self, label: str, children: Iterable[Node] = ()):
        self.label = label
        self.children = tuple(children)
        self._hash = None

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.label, self.children))
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        if self._hash is not None and other._hash is not None and self._hash != other._hash:
            return False
        return self.label == other.label and self.children == other.children

    def __repr__(self):
        return "Tree(%r)" % str(self)

    def __str__(self):
        return to_bracket(self)

    @property
    def is_open(self) -> bool:
        return not self.children

    def leaves(self) -> list[Node]:
        """Frontier from left to right: terminal strings and open ``Tree`` nodes."""
        out: list[Node] = []
        stack: list[Node] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, str) or not node.children:
                out.append(node)
            else:
                stack.extend(reversed(node.children))
        return out

    def open_trees(self) -> list[Tree]:
        return [x for x in self.leaves() if isinstance(x, Tree)]

    def yield_(self) -> tuple[str, ...]:
        return tuple(x for x in self.leaves() if isinstance(x, str))

    def subtrees(self) -> Iterator[Tree]:
        """Nonterminal nodes in pre-order."""
        stack: list[Node] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Tree):
                yield node
                stack.extend(reversed(node.children))

    def size(self) -> int:
        """Number of nodes, terminals included."""
        return sum(1 + sum(isinstance(c, str) for c in t.children) for t in self.subtrees())

    def depth(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.depth() if isinstance(c, Tree) else 0 for c in self.children)


def plug(tree: Tree, fillers: Iterable[Node]) -> Tree:
    """Replace the open trees of ``tree`` left to right by ``fillers``."""
    it = iter(fillers)

    def walk(node):
        if isinstance(node, str):
            return node
        if not node.children:
            return next(it)
        return Tree(node.label, [walk(c) for c in node.children])

    return walk(tree)


def to_bracket(tree: Node) -> str:
    if isinstance(tree, str):
        return tree
    if not tree.children:
        return tree.label
    return "(%s %s)" % (tree.label, " ".join(to_bracket(c) for c in tree.children))


def _tokenize(text: str, line: int, offset: int):
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            yield ch, line, offset + i + 1
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], line, offset + i + 1
            i = j


def parse_bracket(text: str, terminals, line: int = 1, offset: int = 0) -> Tree:
    """Parse ``(S (A a) B)``.  Bare leaves are terminals when listed in
    ``terminals``, otherwise open nonterminals."""
    tokens = list(_tokenize(text, line, offset))
    if not tokens:
        raise ParseError("empty tree", line, offset + 1)
    pos = 0

    def node():
        nonlocal pos
        tok, ln, col = tokens[pos]
        if tok == ")":
            raise ParseError("unexpected ')'", ln, col)
        if tok != "(":
            pos += 1
            return tok if tok in terminals else Tree(tok)
        pos += 1
        if pos >= len(tokens):
            raise ParseError("unexpected end of tree", ln, col)
        label, ln2, col2 = tokens[pos]
        if label in "()":
            raise ParseError("expected a node label", ln2, col2)
        if label in terminals:
            raise ParseError("terminal %r used as an internal node" % label, ln2, col2)
        pos += 1
        children = []
        while True:
            if pos >= len(tokens):
                raise ParseError("missing ')'", ln, col)
            if tokens[pos][0] == ")":
                pos += 1
                break
            children.append(node())
        if not children:
            raise ParseError("node %r has no children" % label, ln2, col2)
        return Tree(label, children)

    result = node()
    if pos != len(tokens):
        _, ln, col = tokens[pos]
        raise ParseError("trailing input after tree", ln, col)
    if isinstance(result, str):
        raise ParseError("a tree cannot be a bare terminal", line, offset + 1)
    return result
