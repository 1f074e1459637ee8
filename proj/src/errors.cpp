#include "amrpe/errors.hpp"

namespace amrpe {

const char* errc_name(errc code) {
    switch (code) {
    case errc::empty_input: return "EmptyInput";
    case errc::unbalanced_parens: return "UnbalancedParens";
    case errc::dangling_variable: return "DanglingVariable";
    case errc::duplicate_variable_definition: return "DuplicateVariableDefinition";
    case errc::malformed_penman: return "MalformedPenman";
    case errc::cycle_detected: return "CycleDetected";
    case errc::parse_error_at: return "ParseErrorAt";
    case errc::io_error: return "IoError";
    case errc::invariant_violation: return "InvariantViolation";
    case errc::unknown_label_shape: return "UnknownLabelShape";
    case errc::pointer_redefinition: return "PointerRedefinition";
    case errc::malformed_segment: return "MalformedSegment";
    case errc::dangling_pointer: return "DanglingPointer";
    case errc::unknown_token: return "UnknownToken";
    case errc::empty_tokenization: return "EmptyTokenization";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::duplicate_vocab_entry: return "DuplicateVocabEntry";
    case errc::empty_corpus: return "EmptyCorpus";
    case errc::unknown_feature: return "UnknownFeature";
    case errc::id_mismatch: return "IdMismatch";
    case errc::convergence_failure: return "ConvergenceFailure";
    }
    return "UnknownError";
}

namespace {

std::string format_message(errc code, const std::string& message, long line) {
    std::string out = errc_name(code);
    if (line >= 0) {
        out += " at line ";
        out += std::to_string(line);
    }
    out += ": ";
    out += message;
    return out;
}

} // namespace

Error::Error(errc code, const std::string& message, long line)
    : std::runtime_error(format_message(code, message, line)), code_(code), line_(line) {}

void fail(errc code, const std::string& message, long line) {
    throw Error(code, message, line);
}

} // namespace amrpe
