"""Bracketed constituency trees, leaf alignment, and label paths.

Trees come in Penn-style bracketed notation, e.g.

    (S (NP (DT The) (NN price)) (VP (VBD rose) (NP (CD five) (NN percent))))

A preterminal is a node holding exactly one word; its label is the word's
POS tag.  Functional tags and indices (NP-SBJ, NP=2) are preserved on the
nodes but stripped when labels enter a path.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Sentence
from .errors import TreeError


@dataclass(frozen=True)
class ParseTree:
    label: str
    children: tuple["ParseTree", ...] = ()
    leaf_word: str | None = None
    leaf_index: int | None = None

    def is_leaf(self) -> bool:
        return self.leaf_word is not None

    def leaves(self) -> list["ParseTree"]:
        if self.is_leaf():
            return [self]
        out: list[ParseTree] = []
        for child in self.children:
            out.extend(child.leaves())
        return out


@dataclass(frozen=True)
class TreePath:
    """Label path between two leaves.

    up_labels runs from the source preterminal's parent up to and including
    the lowest common ancestor; down_labels runs from the LCA's child on the
    target side down to the target preterminal's parent.  The LCA appears
    only on the up side.  POS preterminals never appear in either list.
    """

    up_labels: tuple[str, ...]
    down_labels: tuple[str, ...]


_WS = " \t\r\n"


def _tokenize(text: str):
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in _WS:
            i += 1
        elif c in "()":
            yield c, i
            i += 1
        else:
            j = i
            while j < n and text[j] not in _WS and text[j] not in "()":
                j += 1
            yield text[i:j], i
            i = j


def parse_bracketed(text: str) -> ParseTree:
    """Parse one bracketed tree, rejecting unbalanced or empty forms.

    Errors carry the character offset of the offending bracket.
    """
    trees = _parse_forest(text)
    if len(trees) != 1:
        raise TreeError(f"expected exactly one tree, found {len(trees)}")
    return trees[0]


def _parse_forest(text: str) -> list["ParseTree"]:
    tokens = list(_tokenize(text))
    trees = []
    pos = 0
    while pos < len(tokens):
        tree, pos = _parse_node(tokens, pos, text)
        trees.append(tree)
    return trees


def _parse_node(tokens, pos: int, text: str) -> tuple[ParseTree, int]:
    if pos >= len(tokens):
        raise TreeError(f"unbalanced parentheses at offset {len(text)}")
    tok, offset = tokens[pos]
    if tok != "(":
        raise TreeError(f"expected '(' at offset {offset}")
    pos += 1
    if pos >= len(tokens):
        raise TreeError(f"unbalanced parentheses at offset {len(text)}")
    tok, offset = tokens[pos]
    if tok == ")":
        raise TreeError(f"empty constituent at offset {offset}")
    # A bare "(" right after the opening bracket means an unlabeled node,
    # as in the "( (S ...))" wrapper some treebank files use.
    if tok == "(":
        label = ""
    else:
        label = tok
        pos += 1
    children: list[ParseTree] = []
    word: str | None = None
    while True:
        if pos >= len(tokens):
            raise TreeError(f"unbalanced parentheses at offset {len(text)}")
        tok, offset = tokens[pos]
        if tok == ")":
            pos += 1
            break
        if tok == "(":
            if word is not None:
                raise TreeError(
                    f"offset {offset}: subtree after word in the same constituent"
                )
            child, pos = _parse_node(tokens, pos, text)
            children.append(child)
        else:
            if children or word is not None:
                raise TreeError(f"offset {offset}: unexpected word {tok!r}")
            word = tok
            pos += 1
    if word is None and not children:
        raise TreeError(f"empty constituent at offset {offset}")
    if word is not None:
        return ParseTree(label=label, leaf_word=word), pos
    return ParseTree(label=label, children=tuple(children)), pos


def print_tree(tree: ParseTree) -> str:
    """Canonical single-line bracketed form; inverse of parse_bracketed."""
    if tree.is_leaf():
        return f"({tree.label} {tree.leaf_word})"
    inner = " ".join(print_tree(c) for c in tree.children)
    return f"({tree.label} {inner})"


def read_trees(text: str) -> list[ParseTree]:
    """Read a concatenation of bracketed trees, split on bracket balance."""
    return _parse_forest(text)


def write_trees(trees: list[ParseTree]) -> str:
    if not trees:
        return ""
    return "\n".join(print_tree(t) for t in trees) + "\n"


def align_leaves(tree: ParseTree, sentence: Sentence) -> ParseTree:
    """Assign 0-based leaf indices, checking words against the sentence."""
    leaves = tree.leaves()
    words = sentence.words()
    if len(leaves) != len(words):
        raise TreeError(
            f"sentence {sentence.sentence_id}: tree has {len(leaves)} leaves, "
            f"sentence has {len(words)} tokens"
        )
    for k, (leaf, word) in enumerate(zip(leaves, words)):
        if leaf.leaf_word != word:
            raise TreeError(
                f"sentence {sentence.sentence_id}: leaf {k} is "
                f"{leaf.leaf_word!r} but token {k} is {word!r}"
            )
    counter = [0]

    def rebuild(node: ParseTree) -> ParseTree:
        if node.is_leaf():
            idx = counter[0]
            counter[0] += 1
            return ParseTree(label=node.label, leaf_word=node.leaf_word, leaf_index=idx)
        return ParseTree(
            label=node.label, children=tuple(rebuild(c) for c in node.children)
        )

    return rebuild(tree)


def strip_label(label: str) -> str:
    """Truncate functional tags and indices: NP-SBJ and NP=2 both become NP."""
    for sep in "-=":
        cut = label.find(sep)
        if cut > 0:
            label = label[:cut]
    return label


def _spine(tree: ParseTree, leaf_pos: int) -> list[ParseTree]:
    """Nodes from the root down to the leaf at the given left-to-right position."""
    spine: list[ParseTree] = []

    def walk(node: ParseTree, offset: int) -> bool:
        spine.append(node)
        if node.is_leaf():
            if offset == leaf_pos:
                return True
            spine.pop()
            return False
        for child in node.children:
            width = len(child.leaves())
            if offset <= leaf_pos < offset + width:
                if walk(child, offset):
                    return True
            offset += width
        spine.pop()
        return False

    if not walk(tree, 0):
        raise TreeError(f"no leaf at position {leaf_pos}")
    return spine


def tree_path(tree: ParseTree, source: int, target: int) -> TreePath:
    """Label path from the source leaf to the target leaf.

    Both ordinals are left-to-right leaf positions.  The source and target
    preterminals themselves are excluded; the LCA label is the last entry
    of up_labels and never appears in down_labels.
    """
    n_leaves = len(tree.leaves())
    for name, idx in (("source", source), ("target", target)):
        if not 0 <= idx < n_leaves:
            raise TreeError(f"{name} leaf {idx} out of range for {n_leaves} leaves")
    if source == target:
        return TreePath(up_labels=(), down_labels=())
    spine_src = _spine(tree, source)
    spine_tgt = _spine(tree, target)
    lca_depth = 0
    for a, b in zip(spine_src, spine_tgt):
        if a is not b:
            break
        lca_depth += 1
    # spine = [root, ..., preterminal-leaf]; the leaf node is the preterminal.
    up_nodes = list(reversed(spine_src[lca_depth - 1 : len(spine_src) - 1]))
    down_nodes = spine_tgt[lca_depth : len(spine_tgt) - 1]
    return TreePath(
        up_labels=tuple(strip_label(n.label) for n in up_nodes),
        down_labels=tuple(strip_label(n.label) for n in down_nodes),
    )
