#pragma once

// MatrixFile: {"dim": n, "data": [[[re, im], ...], ...]}, one matrix per file.

#include <stdexcept>
#include <string>

#include "oplens/linalg.hpp"

namespace oplens::cli {

/// Malformed or unreadable input; maps to exit status 2.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] ComplexMatrix parse_matrix(const std::string& text);
/// Doubles are written in shortest round-trip form, so parsing the result
/// reproduces every finite entry bit for bit.
[[nodiscard]] std::string serialize_matrix(const ComplexMatrix& m);

[[nodiscard]] ComplexMatrix read_matrix_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace oplens::cli
