#pragma once

#include "fsi/errors.hpp"

#include <json.hpp>

#include <string>

namespace fsi::cli {

/// Report tree. Insertion order is the emission order:
///   command, metadata, summary, table{columns, rows}.
/// Table rows start with fiber_index, x1..xk, d.
using Tree = nlohmann::ordered_json;

/// JSON with every double printed as %.17g. Non-finite doubles become the
/// strings "inf", "-inf" and "nan".
std::string emit_json(const Tree& report);

/// One CSV row per fiber with d > 0. Strings are quoted when needed.
std::string emit_csv(const Tree& report);

std::string emit(const Tree& report, const std::string& format);

/// Machine-readable description of a library error.
Tree error_tree(const Error& e);

/// 0 success, 2 validation or resource, 3 infeasible, 4 internal.
int exit_code(const Error& e) noexcept;

}  // namespace fsi::cli
