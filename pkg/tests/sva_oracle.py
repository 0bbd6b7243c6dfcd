"""Independent recognizer of the assertion template, built on lark's Earley parser.

Shares no code with deepsva.sva.grammar; used to decide whether a mutated
assertion is still inside the template.
"""

from lark import Lark
from lark.exceptions import LarkError

GRAMMAR = r"""
start: "assert" "property" "(" "@" "(" "posedge" clock ")" group "|->" group ")" ";"
clock: NAME | NAME "." NAME
group: "(" apexpr ")"
apexpr: conj ("||" conj)*
conj: ap ("&&" ap)*
ap: "!" sigref
  | sigref
  | sigref RELOP operand
  | "(" apexpr ")"
sigref: NAME "." NAME bitsel?
bitsel: "[" INDEX "]" | "[" INDEX ":" INDEX "]"
operand: LITERAL | sigref
RELOP: "==" | "!=" | "<=" | ">=" | "<" | ">"
INDEX: /[0-9]+/
LITERAL: /\d+\s*'\s*([bB][01_]+|[hH][0-9a-fA-F_]+|[dD][0-9_]+)/ | /\d[0-9_]*/
NAME: /(?!(assert|property|posedge)\b)[A-Za-z_]\w*/
%ignore /\s+/
"""

_PARSER = Lark(GRAMMAR, parser="earley", lexer="dynamic")


def in_template(text: str) -> bool:
    try:
        _PARSER.parse(text)
    except LarkError:
        return False
    return True
