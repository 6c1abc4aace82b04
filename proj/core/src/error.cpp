#include "tecue/error.hpp"

namespace tecue {

Error::Error(Kind kind, const std::string& what, std::optional<std::size_t> row)
    : std::runtime_error(what), kind_(kind), row_(row) {}

void throw_config(const std::string& what) { throw Error(Error::Kind::config, what); }

void throw_data(const std::string& what, std::optional<std::size_t> row) {
  if (row) {
    throw Error(Error::Kind::data, what + " (row " + std::to_string(*row) + ")", row);
  }
  throw Error(Error::Kind::data, what);
}

void throw_numeric(const std::string& what) { throw Error(Error::Kind::numeric, what); }

void throw_io(const std::string& what) { throw Error(Error::Kind::io, what); }

const char* to_string(Error::Kind kind) noexcept {
  switch (kind) {
    case Error::Kind::config: return "config";
    case Error::Kind::data: return "data";
    case Error::Kind::numeric: return "numeric";
    case Error::Kind::io: return "io";
  }
  return "unknown";
}

}  // namespace tecue
