#pragma once

#include <stdexcept>
#include <string>

namespace amrpe {

enum class errc {
    // penman / corpus
    empty_input,
    unbalanced_parens,
    dangling_variable,
    duplicate_variable_definition,
    malformed_penman,
    cycle_detected,
    parse_error_at,
    io_error,
    invariant_violation,
    // labels / spg
    unknown_label_shape,
    pointer_redefinition,
    malformed_segment,
    dangling_pointer,
    // encoding
    unknown_token,
    empty_tokenization,
    dimension_mismatch,
    length_mismatch,
    duplicate_vocab_entry,
    // metrics
    empty_corpus,
    unknown_feature,
    id_mismatch,
    // numerics
    convergence_failure,
};

const char* errc_name(errc code);

/// Error carrying a machine-checkable code and, for corpus errors, a 1-based line.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message, long line = -1);

    errc code() const noexcept { return code_; }
    long line() const noexcept { return line_; }

private:
    errc code_;
    long line_;
};

[[noreturn]] void fail(errc code, const std::string& message, long line = -1);

} // namespace amrpe
