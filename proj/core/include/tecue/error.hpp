#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tecue {

/// Failure raised by any tecue operation.
///
/// The kind decides how callers react: config errors are the caller's
/// fault (bad parameters, unknown keys), data errors come from input
/// files or series, numeric errors from fits that did not converge.
class Error : public std::runtime_error {
 public:
  enum class Kind { config, data, numeric, io };

  Error(Kind kind, const std::string& what,
        std::optional<std::size_t> row = std::nullopt);

  Kind kind() const noexcept { return kind_; }
  /// 1-based data row for file-parsing failures.
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  Kind kind_;
  std::optional<std::size_t> row_;
};

[[noreturn]] void throw_config(const std::string& what);
[[noreturn]] void throw_data(const std::string& what,
                             std::optional<std::size_t> row = std::nullopt);
[[noreturn]] void throw_numeric(const std::string& what);
[[noreturn]] void throw_io(const std::string& what);

const char* to_string(Error::Kind kind) noexcept;

}  // namespace tecue
