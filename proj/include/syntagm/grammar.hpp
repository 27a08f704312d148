#pragma once

namespace syntagm {

// The PyOPL grammar/semantics reference injected verbatim into every prompt.
// The same text ships as grammar/pyopl_grammar.md; a test pins the two copies
// together.
inline const char* grammarReferenceMarkdown() {
    return R"GRAMMAR(# PyOPL Grammar and Semantics Reference

PyOPL is a declarative algebraic modelling language for linear and mixed-integer
linear programmes. A problem instance is a pair of text files:

* a **model file** (`.mod`) with typed declarations, exactly one labelled
  objective, and a `subject to { ... }` block of labelled constraints;
* a **data file** (`.dat`) with one literal assignment per model parameter.

Models are declarative: no loops, no assignments, no solver directives. The
compiler expands `forall`/`sum` over the declared index domains and hands the
flat linear programme to the solver.

## Lexical rules

* Identifiers match `[A-Za-z_][A-Za-z0-9_]*` and are case-sensitive.
* Numbers are `42`, `4.2`, or `1.5e-3`. Strings use double quotes: `"A1"`.
* Comments are `//` to end of line or `/* ... */`, in both file kinds.
  Use them for literate narration next to the declarations they explain.
* Keywords: `int float boolean string range dvar minimize maximize subject to
  forall sum in tuple true false`.

## Model file grammar (BNF)

```
<model>        ::= { <declaration> } <objective> [ <subject-to> ]

<declaration>  ::= <param-decl> | <range-decl> | <set-decl> | <tuple-decl> | <dvar-decl>
<param-decl>   ::= <scalar-type> <name> { "[" <domain> "]" } [ "=" <expr> ] ";"
<scalar-type>  ::= "int" | "float" | "boolean" | "string"
<range-decl>   ::= "range" <name> "=" <expr> ".." <expr> ";"
<set-decl>     ::= "{" ( <scalar-type> | <tuple-name> ) "}" <name> [ "=" <set-literal> ] ";"
<tuple-decl>   ::= "tuple" <name> "{" { <scalar-type> <name> ";" } "}" [ ";" ]
<dvar-decl>    ::= "dvar" ( "float" | "int" | "boolean" ) [ "+" ] <name>
                   { "[" <domain> "]" } [ "in" <expr> ".." <expr> ] ";"
<domain>       ::= <name> | <expr> ".." <expr>

<objective>    ::= ( "minimize" | "maximize" ) [ <name> ":" ] <expr> ";"

<subject-to>   ::= "subject" "to" "{" { <constraint-item> } "}"
<constraint-item> ::= [ <name> ":" ] <comparison> ";"
                    | "forall" "(" <iterators> ")" <constraint-item>
                    | "forall" "(" <iterators> ")" "{" { <constraint-item> } "}"
<iterators>    ::= <name> "in" <domain> { "," <name> "in" <domain> } [ ":" <condition> ]
<condition>    ::= <expr> ( "<" | "<=" | ">" | ">=" | "==" | "!=" ) <expr>

<comparison>   ::= <expr> ( "<=" | ">=" | "==" ) <expr>
<expr>         ::= <term> { ("+" | "-") <term> }
<term>         ::= <factor> { ("*" | "/") <factor> }
<factor>       ::= "-" <factor>
                 | "sum" "(" <iterators> ")" <term>
                 | <number> | <string> | "true" | "false"
                 | <name> { "[" <expr> { "," <expr> } "]" }
                 | "(" <expr> ")"
```

## Data file grammar (BNF)

```
<data>         ::= { <name> "=" <literal> ";" }
<literal>      ::= <number> | <string> | "true" | "false"
                 | "[" [ <literal> { "," <literal> } ] "]"        // array (nest for 2-D/3-D)
                 | "{" [ <literal> { "," <literal> } ] "}"        // set
                 | "<" <literal> { "," <literal> } ">"            // tuple
```

## Semantics and restrictions

* **Exactly one objective.** Label it (`minimize totalCost: ...;`) and label
  every constraint; a constraint inside `forall (i in S) label: ...;` yields one
  labelled row per member of `S`.
* **Model/data separation.** Data files contain only literals. Expressions,
  ranges (`1..N`), and decision variables are model-side only. A range used for
  indexing must be declared with explicit bounds in the model file, e.g.
  `range T = 1..N;` with `int N;` supplied from data.
* **Typed sets.** `{string} Sites = {"A", "B"};` declares an ordered set.
  Elements must match the declared element type and be distinct. Sets may also
  be supplied from data: declare `{string} Sites;` and assign in the `.dat`.
* **Tuples.** `tuple Arc { string from; string to; }` then `{Arc} Arcs;` with
  data `Arcs = { <"A","B">, <"B","C"> };`. Arrays may be indexed by a tuple set
  (`float cost[Arcs];`) and iterated with `forall (a in Arcs)`; tuple fields are
  not otherwise accessible in expressions.
* **Index typing and shapes.** Arrays are indexed positionally by their
  declared domains: `float c[I][J];` needs a rectangular literal whose extents
  match `|I|` and `|J|`. Integer indices must be integer-valued expressions;
  set-indexed dimensions take elements of that set.
* **Arithmetic.** `+ - * /` over int/float. `/` always yields float. Strings
  and booleans do not participate in arithmetic (boolean decision variables do:
  they are 0/1 integers). Constant subexpressions are folded at compile time.
* **Linearity.** Every constraint and the objective must be affine in the
  decision variables: no product of two decision variables, no decision
  variable in a divisor. Use standard linearization patterns (big-M,
  indicator-style bounds) instead.
* **Comparisons.** Constraints use `<=`, `>=`, `==` with exactly two operands.
  Chained comparisons (e.g., `a <= b <= c`) are not supported; split them into
  two constraints. Iterator filters additionally allow `<`, `>`, `!=`
  (e.g., `forall (i in S, j in S : i < j)`).
* **Variable domains.** `dvar float x;` is free, `dvar float+ x;` is
  nonnegative, `dvar int q in 0..5;` bounds an integer, `dvar boolean y;` is
  0/1. Declared bounds become variable bounds, not constraint rows.
* **Aggregates.** `sum (i in S) (expr)` sums over the domain. Without
  parentheses the sum binds only the next multiplicative term, so write
  `sum (i in S) (a[i]*x[i] + b[i]*y[i])` with explicit parentheses around
  compound bodies.

## Minimal example

Model (`.mod`):

```
// scale a single activity at minimum cost
float a;            // unit cost
float b;            // activity coefficient
dvar float x;       // activity level
minimize z: a*x;
subject to {
  c1: b*x >= 0;
}
```

Data (`.dat`):

```
a = 10;
b = 5;
```
)GRAMMAR";
}

}  // namespace syntagm
