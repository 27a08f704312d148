#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pyopl/span.hpp"

namespace pyopl {

enum class Severity { Error, Warning };

// Coded, line-anchored message with remedy text. The remedy is what makes the
// message actionable; error-severity diagnostics always carry one.
struct Diagnostic {
    std::string code;
    Severity severity = Severity::Error;
    std::optional<int> line;
    std::string message;
    std::string remedy;

    // Surface form, e.g. "Semantic Error (Line 37): Range bounds must be
    // integer-valued. Use integer expressions for both bounds."
    std::string render() const {
        std::string out = severity == Severity::Error ? "Semantic Error" : "Warning";
        if (line) {
            out += " (Line " + std::to_string(*line) + ")";
        }
        out += ": " + message;
        if (!remedy.empty()) {
            out += " " + remedy;
        }
        return out;
    }
};

namespace codes {
// Lexical / syntax
inline constexpr std::string_view SynIllegalChar = "SYN-ILLEGAL-CHAR";
inline constexpr std::string_view SynUnterminatedString = "SYN-UNTERMINATED-STRING";
inline constexpr std::string_view SynUnterminatedComment = "SYN-UNTERMINATED-COMMENT";
inline constexpr std::string_view SynNumberMalformed = "SYN-NUMBER-MALFORMED";
inline constexpr std::string_view SynUnexpectedToken = "SYN-UNEXPECTED-TOKEN";
inline constexpr std::string_view SynExpectedToken = "SYN-EXPECTED-TOKEN";
inline constexpr std::string_view SynMissingSemicolon = "SYN-MISSING-SEMICOLON";
inline constexpr std::string_view SynDatSyntax = "SYN-DAT-SYNTAX";
// Data file structure
inline constexpr std::string_view DatDuplicateAssign = "DAT-DUPLICATE-ASSIGN";
inline constexpr std::string_view DatRaggedArray = "DAT-RAGGED-ARRAY";
inline constexpr std::string_view DatExprInDat = "DAT-EXPR-IN-DAT";
// Symbols
inline constexpr std::string_view SemUndeclared = "SEM-UNDECLARED";
inline constexpr std::string_view SemDuplicateDecl = "SEM-DUPLICATE-DECL";
inline constexpr std::string_view SemShadowedIndex = "SEM-SHADOWED-INDEX";
inline constexpr std::string_view SemDuplicateIndex = "SEM-DUPLICATE-INDEX";
// Ranges
inline constexpr std::string_view SemRangeNonInt = "SEM-RANGE-NONINT";
inline constexpr std::string_view SemRangeInDat = "SEM-RANGE-IN-DAT";
inline constexpr std::string_view SemRangeBoundType = "SEM-RANGE-BOUND-TYPE";
inline constexpr std::string_view SemRangeEmpty = "SEM-RANGE-EMPTY";
// Types
inline constexpr std::string_view SemTypeMismatch = "SEM-TYPE-MISMATCH";
inline constexpr std::string_view SemStringArith = "SEM-STRING-ARITH";
inline constexpr std::string_view SemBoolArith = "SEM-BOOL-ARITH";
inline constexpr std::string_view SemDivByZero = "SEM-DIV-BY-ZERO";
// Sets
inline constexpr std::string_view SemSetElemType = "SEM-SET-ELEM-TYPE";
inline constexpr std::string_view SemSetDuplicateElem = "SEM-SET-DUPLICATE-ELEM";
inline constexpr std::string_view SemSetEmpty = "SEM-SET-EMPTY";
// Indexing
inline constexpr std::string_view SemIndexArity = "SEM-INDEX-ARITY";
inline constexpr std::string_view SemIndexType = "SEM-INDEX-TYPE";
inline constexpr std::string_view SemIndexDomainMismatch = "SEM-INDEX-DOMAIN-MISMATCH";
inline constexpr std::string_view SemScalarIndexed = "SEM-SCALAR-INDEXED";
inline constexpr std::string_view SemListTupleIndex = "SEM-LIST-TUPLE-INDEX";
inline constexpr std::string_view SemIndexOutOfRange = "SEM-INDEX-OUT-OF-RANGE";
inline constexpr std::string_view SemSetKeyUnknown = "SEM-SET-KEY-UNKNOWN";
// Tuples
inline constexpr std::string_view SemTupleArity = "SEM-TUPLE-ARITY";
inline constexpr std::string_view SemTupleFieldType = "SEM-TUPLE-FIELD-TYPE";
// Model/data consistency
inline constexpr std::string_view SemShapeMismatch = "SEM-SHAPE-MISMATCH";
inline constexpr std::string_view SemDimMismatch = "SEM-DIM-MISMATCH";
inline constexpr std::string_view SemMissingData = "SEM-MISSING-DATA";
inline constexpr std::string_view SemExtraData = "SEM-EXTRA-DATA";
inline constexpr std::string_view SemDataForDvar = "SEM-DATA-FOR-DVAR";
inline constexpr std::string_view SemParamInitAndData = "SEM-PARAM-INIT-AND-DATA";
inline constexpr std::string_view SemDataTypeMismatch = "SEM-DATA-TYPE-MISMATCH";
inline constexpr std::string_view SemDataNonInt = "SEM-DATA-NONINT";
// Objective and constraints
inline constexpr std::string_view SemChainedCmp = "SEM-CHAINED-CMP";
inline constexpr std::string_view SemNoObjective = "SEM-NO-OBJECTIVE";
inline constexpr std::string_view SemMultipleObjective = "SEM-MULTIPLE-OBJECTIVE";
inline constexpr std::string_view SemDuplicateLabel = "SEM-DUPLICATE-LABEL";
inline constexpr std::string_view SemUnlabelledConstraint = "SEM-UNLABELLED-CONSTRAINT";
inline constexpr std::string_view SemNonlinear = "SEM-NONLINEAR";
inline constexpr std::string_view SemDvarDivisor = "SEM-DVAR-DIVISOR";
inline constexpr std::string_view SemConstraintNoDvar = "SEM-CONSTRAINT-NO-DVAR";
inline constexpr std::string_view SemUnusedParam = "SEM-UNUSED-PARAM";
inline constexpr std::string_view SemUnusedDvar = "SEM-UNUSED-DVAR";
inline constexpr std::string_view SemBoundOrder = "SEM-BOUND-ORDER";
inline constexpr std::string_view SemBoolBounds = "SEM-BOOL-BOUNDS";
// Instantiation-time evaluation
inline constexpr std::string_view SemNonFinite = "SEM-NONFINITE";
// Orchestration
inline constexpr std::string_view OrcBadResponse = "ORC-BAD-RESPONSE";
}  // namespace codes

struct CatalogEntry {
    std::string_view code;
    Severity severity;
    std::string_view message;  // template; {..} marks the substituted part
    std::string_view remedy;
};

// Stable enumeration of every diagnostic code the toolkit can emit. Each code
// has a triggering fixture in the test suite.
inline const std::vector<CatalogEntry>& diagnosticCatalog() {
    using namespace codes;
    static const std::vector<CatalogEntry> entries = {
        {SynIllegalChar, Severity::Error, "Illegal character '{c}'.",
         "Remove or replace the character; it is not part of any PyOPL token."},
        {SynUnterminatedString, Severity::Error, "Unterminated string literal.",
         "Close the string with a double quote."},
        {SynUnterminatedComment, Severity::Error, "Unterminated block comment.",
         "Close the comment with '*/'."},
        {SynNumberMalformed, Severity::Error, "Malformed numeric literal '{text}'.",
         "Write numbers as integers (42) or decimals (4.2)."},
        {SynUnexpectedToken, Severity::Error,
         "Syntax error at or near token {kind}, value '{value}'.",
         "Check the statement against the PyOPL grammar."},
        {SynExpectedToken, Severity::Error,
         "Expected {what} before token {kind}, value '{value}'.",
         "Insert the missing {what}."},
        {SynMissingSemicolon, Severity::Error, "Missing ';' after {context}.",
         "Terminate the statement with ';'."},
        {SynDatSyntax, Severity::Error,
         "Syntax error in .dat file at or near token {kind}, value '{value}'.",
         "Data files contain only 'name = literal;' assignments."},
        {DatDuplicateAssign, Severity::Error,
         "Parameter '{name}' is assigned more than once in the .dat file.",
         "Keep a single assignment per parameter."},
        {DatRaggedArray, Severity::Error,
         "Array literal for '{name}' is ragged: row {i} has {n} elements, expected {m}.",
         "Make every row of the array literal the same length."},
        {DatExprInDat, Severity::Error, "Expressions are not allowed in .dat files.",
         "Data files may contain only literal values; move computation into the model."},
        {SemUndeclared, Severity::Error, "Undeclared symbol '{name}'.",
         "Declare '{name}' in the model file before using it."},
        {SemDuplicateDecl, Severity::Error,
         "Symbol '{name}' is declared more than once (first declaration at line {L}).",
         "Rename or remove one of the declarations."},
        {SemShadowedIndex, Severity::Error,
         "Index '{name}' shadows an existing declaration.",
         "Rename the iterator so it does not hide the declared symbol."},
        {SemDuplicateIndex, Severity::Error,
         "Iterator '{name}' is bound twice in the same quantifier.",
         "Give each iterator in the quantifier a distinct name."},
        {SemRangeNonInt, Severity::Error, "Range bounds must be integer-valued.",
         "Use integer expressions for both bounds (e.g., 'range T = 1..N;')."},
        {SemRangeInDat, Severity::Error,
         "Range '{name}' was supplied in the data file, but ranges used for indexing "
         "must be declared with explicit bounds in the model file.",
         "Declare it in the model (e.g., 'range T = 1..N;') and remove it from the .dat."},
        {SemRangeBoundType, Severity::Error,
         "Range bound references '{name}' of type {type}; bounds must be integer scalars.",
         "Use an integer parameter or literal for the bound."},
        {SemRangeEmpty, Severity::Warning,
         "Range '{name}' is empty (lower bound exceeds upper bound).",
         "Check the range bounds if an empty index set is unintended."},
        {SemTypeMismatch, Severity::Error, "Type mismatch: {details}.",
         "Make both operands the same type."},
        {SemStringArith, Severity::Error,
         "String-valued operand in arithmetic expression.",
         "Strings cannot be used with +, -, *, /."},
        {SemBoolArith, Severity::Error,
         "Boolean-valued operand in arithmetic expression.",
         "Use an int or float value instead of a boolean."},
        {SemDivByZero, Severity::Error, "Division by constant zero.",
         "Provide a nonzero divisor."},
        {SemSetElemType, Severity::Error,
         "Element {value} is not a valid {type} for set '{name}'.",
         "Use only elements of the set's declared element type."},
        {SemSetDuplicateElem, Severity::Error,
         "Duplicate element {value} in set '{name}'.", "Remove the duplicate element."},
        {SemSetEmpty, Severity::Warning, "Set '{name}' is empty.",
         "Check the set literal if an empty index set is unintended."},
        {SemIndexArity, Severity::Error,
         "'{name}' expects {n} indices, got {m}.",
         "Use exactly one subscript per declared dimension."},
        {SemIndexType, Severity::Error,
         "Index {k} of '{name}' must be {expected}, got {actual}.",
         "Index the array with values from its declared index domain."},
        {SemIndexDomainMismatch, Severity::Warning,
         "Index '{iter}' iterates over '{domainA}' but '{name}' is indexed by '{domainB}'.",
         "Iterate over the array's declared index domain."},
        {SemScalarIndexed, Severity::Error, "Scalar '{name}' cannot be subscripted.",
         "Remove the subscript or declare '{name}' as an array."},
        {SemListTupleIndex, Severity::Error,
         "List parameter '{name}' requires integer indices, got tuple: {value}.",
         "Supply a bracketed list (e.g., '[0, 35, 35]') instead of a tuple."},
        {SemIndexOutOfRange, Severity::Error,
         "Index {value} is outside the declared domain of '{name}' ({lo}..{hi}).",
         "Keep subscripts within the declared range."},
        {SemSetKeyUnknown, Severity::Error,
         "Value {value} is not an element of set '{name}'.",
         "Index the array with a member of its declared index set."},
        {SemTupleArity, Severity::Error,
         "Tuple literal for type '{type}' has {m} fields, expected {n}.",
         "Provide one value per declared tuple field."},
        {SemTupleFieldType, Severity::Error,
         "Field {k} of tuple type '{type}' must be {expected}, got {actual}.",
         "Match each tuple field's declared type."},
        {SemShapeMismatch, Severity::Error,
         "Array '{name}' expects extent {n} along dimension {k}, but data provides {m}.",
         "Make the data literal's extent match the declared index domain."},
        {SemDimMismatch, Severity::Error,
         "Array '{name}' is declared with {n} dimensions, but the data literal has {m}.",
         "Nest the data literal to match the declared dimensionality."},
        {SemMissingData, Severity::Error,
         "Parameter '{name}' has no assignment in the .dat file.",
         "Add '{name} = ...;' to the data file."},
        {SemExtraData, Severity::Warning,
         "Data assignment '{name}' does not correspond to any model parameter.",
         "Remove the assignment or declare the parameter in the model."},
        {SemDataForDvar, Severity::Error,
         "Data assignment for decision variable '{name}' is not allowed.",
         "Decision variables are chosen by the solver; remove the assignment."},
        {SemParamInitAndData, Severity::Error,
         "Parameter '{name}' is initialized in the model and assigned in the .dat file.",
         "Keep exactly one of the two definitions."},
        {SemDataTypeMismatch, Severity::Error,
         "Parameter '{name}' is declared {expected}, but the data literal is {actual}.",
         "Match the data literal to the declared type."},
        {SemDataNonInt, Severity::Error,
         "Integer parameter '{name}' assigned non-integer value {value}.",
         "Use a whole number or declare the parameter as float."},
        {SemChainedCmp, Severity::Error,
         "Chained comparisons (e.g., a <= b <= c) are not supported.",
         "Split into two constraints: a <= b; b <= c;"},
        {SemNoObjective, Severity::Error,
         "Model must declare exactly one objective; found none.",
         "Add a 'minimize' or 'maximize' statement."},
        {SemMultipleObjective, Severity::Error,
         "Model must declare exactly one objective; found {n}.",
         "Keep a single 'minimize' or 'maximize' statement."},
        {SemDuplicateLabel, Severity::Error,
         "Constraint label '{name}' is used more than once.",
         "Give each constraint a distinct label."},
        {SemUnlabelledConstraint, Severity::Error, "Constraint is missing a label.",
         "Add 'label:' before the constraint."},
        {SemNonlinear, Severity::Error,
         "Nonlinear term: product of decision-variable expressions is not supported.",
         "Reformulate with a linearization pattern (e.g., big-M)."},
        {SemDvarDivisor, Severity::Error,
         "Division by a decision-variable expression is not supported.",
         "Multiply through by the divisor or restructure the constraint."},
        {SemConstraintNoDvar, Severity::Warning,
         "Constraint '{label}' involves no decision variables.",
         "Constant constraints are either redundant or contradictory; check the model."},
        {SemUnusedParam, Severity::Warning,
         "Parameter '{name}' is declared but never used.",
         "Remove the declaration or reference the parameter."},
        {SemUnusedDvar, Severity::Warning,
         "Decision variable '{name}' does not appear in the objective or any constraint.",
         "Remove the declaration or use the variable."},
        {SemBoundOrder, Severity::Error,
         "Lower bound exceeds upper bound for '{name}'.",
         "Swap or correct the bounds."},
        {SemBoolBounds, Severity::Error,
         "Bounds are not allowed on boolean decision variables.",
         "Drop the 'in lo..hi' clause; booleans are always 0..1."},
        {SemNonFinite, Severity::Error,
         "Non-finite coefficient produced while evaluating '{label}'.",
         "Check the parameter magnitudes used in this expression."},
        {OrcBadResponse, Severity::Error,
         "Response did not contain a valid model/data object.",
         "Return ONLY a JSON object with keys \"model\" and \"data\"."},
    };
    return entries;
}

inline const CatalogEntry* findCatalogEntry(std::string_view code) {
    const auto& cat = diagnosticCatalog();
    auto it = std::find_if(cat.begin(), cat.end(),
                           [&](const CatalogEntry& e) { return e.code == code; });
    return it == cat.end() ? nullptr : &*it;
}

// All diagnostics are created here so that uncatalogued codes cannot leak out.
inline Diagnostic makeDiagnostic(std::string_view code, std::optional<int> line,
                                 std::string message, std::string remedy = {}) {
    const CatalogEntry* entry = findCatalogEntry(code);
    if (entry == nullptr) {
        throw std::logic_error("uncatalogued diagnostic code: " + std::string(code));
    }
    Diagnostic d;
    d.code = std::string(code);
    d.severity = entry->severity;
    d.line = line;
    d.message = std::move(message);
    d.remedy = remedy.empty() ? std::string(entry->remedy) : std::move(remedy);
    return d;
}

inline Diagnostic makeDiagnostic(std::string_view code, const Span& span,
                                 std::string message, std::string remedy = {}) {
    return makeDiagnostic(code, std::optional<int>(span.line), std::move(message),
                          std::move(remedy));
}

inline bool hasErrors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

inline void sortByLine(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return a.line.value_or(0) < b.line.value_or(0);
    });
}

}  // namespace pyopl
